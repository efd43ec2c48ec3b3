# Frixion - friction of ion chains in optical cavities
# Copyright (C) 2024 - The Frixion developers

# Frixion is free software: you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.

# Frixion is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.

# You should have received a copy of the GNU Lesser General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

"""
equilibrium.py

Minimization of the total potential of the chain.

Minimization is done in the reduced units of ReducedPotential. A BFGS
descent brings the configuration close to a minimum; Newton steps with the
analytic Hessian then converge it to the requested gradient tolerance. The
result is a stationary point: saddles are returned (flagged through
ChainState.is_local_min) rather than rejected.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import logging
import warnings
import numpy as np
from scipy import linalg, optimize
from collections import namedtuple
from dataclasses import dataclass, replace

from frixion.potential import ChainState, ReducedPotential

logger = logging.getLogger(__name__)

SeedStrategy = namedtuple("SeedStrategy", ["BARE_CHAIN", "PROVIDED", "PERTURBED_PROVIDED"])
SeedStrategy = SeedStrategy(
    BARE_CHAIN="bare_chain", PROVIDED="provided", PERTURBED_PROVIDED="perturbed_provided"
)

# Central ion within this distance (rad) of a cavity maximum counts as
# having reached it
_TARGET_TOLERANCE = 1e-3


class MinimizationError(RuntimeError):
    def __init__(self, msg, iterations=0, gradient_norm=np.nan, positions=None):
        super(MinimizationError, self).__init__(
            "{0} (iterations: {1}, max gradient: {2:.3e} m*omega^2*L)".format(
                msg, iterations, gradient_norm
            )
        )
        self.iterations = iterations
        self.gradient_norm = gradient_norm
        self.positions = positions


class BracketError(RuntimeError):
    def __init__(self, msg, bracket):
        super(BracketError, self).__init__(
            "{0} (bracket: [{1:.6g}, {2:.6g}] m*omega^2*L)".format(msg, *bracket)
        )
        self.bracket = tuple(bracket)


@dataclass(frozen=True)
class MinimizeOptions(object):

    """MinimizeOptions

    Settings for minimize and the functions built on it.

    | Args:
    |   gradient_tolerance (float): convergence threshold on the largest
    |                               gradient component, in m*omega^2*L.
    |                               Default is 1e-9.
    |   max_iterations (int): maximum number of BFGS iterations. Default
    |                         is 5000.
    |   newton_iterations (int): maximum number of Newton refinement steps.
    |                            Default is 50.
    |   perturbation_scale (float): size of seed perturbations and saddle
    |                               escape steps, as a fraction of the
    |                               wavelength. Default is 0.01.
    |   seed_strategy (str): one of the SeedStrategy values. Default is
    |                        SeedStrategy.PROVIDED.
    |   random_seed (int): seed of the generator used for perturbed seeds.
    |                      Default is 0.
    |   hessian_rtol (float): a state is a local minimum if the smallest
    |                         Hessian eigenvalue exceeds hessian_rtol times
    |                         the largest in magnitude. Default is 1e-10.

    """

    gradient_tolerance: float = 1e-9
    max_iterations: int = 5000
    newton_iterations: int = 50
    perturbation_scale: float = 0.01
    seed_strategy: str = SeedStrategy.PROVIDED
    random_seed: int = 0
    hessian_rtol: float = 1e-10

    def __post_init__(self):
        if not self.gradient_tolerance > 0:
            raise ValueError("gradient_tolerance must be positive")
        if self.max_iterations < 1 or self.newton_iterations < 1:
            raise ValueError("Iteration limits must be at least 1")
        if self.perturbation_scale < 0:
            raise ValueError("perturbation_scale can not be negative")
        if self.seed_strategy not in SeedStrategy:
            raise ValueError("Invalid seed_strategy {0}".format(self.seed_strategy))


@dataclass(frozen=True)
class DepinningResult(object):

    """DepinningResult

    | Args:
    |   restoring_force (float): smallest uniform force (m*omega^2*L)
    |                            bringing the central ion to the cavity
    |                            potential maximum
    |   converged (bool): whether the bisection reached its tolerance
    |   tilted_state (ChainState): equilibrium under restoring_force
    |   evaluations (int): number of tilted minimizations performed

    """

    restoring_force: float
    converged: bool
    tilted_state: ChainState
    evaluations: int = 0


def _ordered(phi):
    return len(phi) < 2 or bool(np.all(np.diff(phi) > 0))


def _reduced_tolerance(rp, opts):
    return opts.gradient_tolerance * rp.scales.force / (
        rp.scales.energy * rp.scales.wavenumber
    )


def _preconditioner(rp, phi):
    # Cholesky factor of the Hessian at the seed with its eigenvalues
    # replaced by their moduli and floored at the trap stiffness
    evals, evecs = np.linalg.eigh(rp.hessian(phi))
    evals = np.maximum(np.abs(evals), rp.a_trap)
    P = (evecs * evals) @ evecs.T
    return linalg.cholesky(0.5 * (P + P.T), lower=True)


def _relax(rp, phi, opts):
    """Drive phi to a stationary point of rp. Returns the phases and the
    number of Newton steps taken.

    The descent runs in the variables y = L^T (phi - phi0), L being the
    Cholesky factor of the modified Hessian at the seed phi0 (see
    _preconditioner). Near a minimum the first BFGS step is then a Newton
    step and does not overshoot into a distant well.
    """

    tol = _reduced_tolerance(rp, opts)
    to_force_unit = rp.scales.energy * rp.scales.wavenumber / rp.scales.force

    phi0 = np.array(phi, dtype=float)
    L = _preconditioner(rp, phi0)

    def to_phi(y):
        return phi0 + linalg.solve_triangular(L, y, lower=True, trans="T")

    def energy(y):
        return rp.energy(to_phi(y))

    def gradient(y):
        return linalg.solve_triangular(L, rp.gradient(to_phi(y)), lower=True)

    res = optimize.minimize(
        energy,
        np.zeros(len(phi0)),
        jac=gradient,
        method="BFGS",
        options={
            "gtol": 1e3 * tol / np.max(np.abs(np.diag(L))),
            "maxiter": opts.max_iterations,
        },
    )
    logger.debug("BFGS stopped after %d iterations: %s", res.nit, res.message)

    phi = to_phi(res.x)
    g = rp.gradient(phi)
    gnorm = np.max(np.abs(g))
    if not _ordered(phi):
        raise MinimizationError(
            "Ions exchanged order during descent",
            res.nit,
            gnorm * to_force_unit,
            rp.scales.from_phase(phi),
        )

    steps = 0
    while gnorm >= tol:
        if steps >= opts.newton_iterations:
            raise MinimizationError(
                "Newton refinement did not converge",
                res.nit + steps,
                gnorm * to_force_unit,
                rp.scales.from_phase(phi),
            )
        try:
            dphi = linalg.solve(rp.hessian(phi), -g, assume_a="sym")
        except (linalg.LinAlgError, ValueError):
            raise MinimizationError(
                "Singular Hessian in Newton refinement",
                res.nit + steps,
                gnorm * to_force_unit,
                rp.scales.from_phase(phi),
            )
        # Backtrack on the gradient norm, keeping the ions ordered
        t = 1.0
        for _ in range(40):
            trial = phi + t * dphi
            if _ordered(trial):
                g_trial = rp.gradient(trial)
                if np.max(np.abs(g_trial)) < gnorm:
                    break
            t *= 0.5
        else:
            raise MinimizationError(
                "Line search failed in Newton refinement",
                res.nit + steps,
                gnorm * to_force_unit,
                rp.scales.from_phase(phi),
            )
        phi, g = trial, g_trial
        gnorm = np.max(np.abs(g))
        steps += 1

    logger.debug("Newton refinement: %d steps, max gradient %.3e", steps, gnorm)

    return phi, steps


def _initial_chain(params):
    # Uniform chain with the approximate central spacing of an N ion crystal
    n = params.n_ions
    if n == 1:
        return np.array([params.trap_center_offset])
    spacing = 2.018 * params.char_length * n ** -0.559
    return params.trap_center_offset + spacing * (np.arange(n) - (n - 1) / 2.0)


def bare_chain(params, opts=None):
    """Equilibrium of the ions in the trap alone (eta = 0).

    | Args:
    |   params (SystemParams): the system parameters. The drive is ignored.
    |   opts (Optional[MinimizeOptions]): solver settings

    | Returns:
    |   state (ChainState): the bare Coulomb crystal, centred on the trap

    | Raises:
    |   MinimizationError: if the solver does not converge

    """

    opts = MinimizeOptions() if opts is None else opts
    bare = params.with_drive(eta=0.0)
    rp = ReducedPotential(bare)

    phi, _ = _relax(rp, rp.scales.to_phase(_initial_chain(bare)), opts)

    return ChainState.from_positions(
        bare, rp.scales.from_phase(phi), rtol=opts.hessian_rtol
    )


def perturbed_seed(params, state, opts=None):
    """Copy of state with every ion displaced at random by a normal
    deviate of perturbation_scale wavelengths (reproducible through
    opts.random_seed)"""

    opts = MinimizeOptions() if opts is None else opts
    rng = np.random.default_rng(opts.random_seed)
    dx = rng.normal(scale=opts.perturbation_scale * params.wavelength, size=state.n_ions)
    return ChainState.from_positions(params, state.positions + dx, is_local_min=False)


def minimize(params, seed=None, opts=None, tilt=0.0):
    """Find a stationary point of the total potential V_ion + V_cav.

    | Args:
    |   params (SystemParams): the system parameters
    |   seed (ChainState): starting configuration. Ignored (and may be None)
    |                      with SeedStrategy.BARE_CHAIN.
    |   opts (Optional[MinimizeOptions]): solver settings
    |   tilt (Optional[float]): uniform force on all ions, in m*omega^2*L,
    |                           adding -tilt*sum(x) to the potential

    | Returns:
    |   state (ChainState): the stationary point. Its energy does not
    |                       include the tilt. is_local_min is False for a
    |                       saddle.

    | Raises:
    |   MinimizationError: if the solver does not converge

    """

    opts = MinimizeOptions() if opts is None else opts

    if opts.seed_strategy == SeedStrategy.BARE_CHAIN:
        seed = bare_chain(params, opts)
    elif seed is None:
        raise ValueError("A seed is needed with seed strategy {0}".format(opts.seed_strategy))
    elif opts.seed_strategy == SeedStrategy.PERTURBED_PROVIDED:
        seed = perturbed_seed(params, seed, opts)

    if seed.n_ions != params.n_ions:
        raise ValueError(
            "Seed has {0} ions, parameters have {1}".format(seed.n_ions, params.n_ions)
        )

    rp = ReducedPotential(params)
    rp.tilt = rp.scales.to_reduced_force(tilt * rp.scales.force)

    phi, _ = _relax(rp, rp.scales.to_phase(seed.positions), opts)

    return ChainState.from_positions(
        params, rp.scales.from_phase(phi), rtol=opts.hessian_rtol
    )


def escape_saddle(params, state, opts=None):
    """Step away from a saddle along the eigenvector of the lowest Hessian
    eigenvalue, by perturbation_scale wavelengths, and minimize again. The
    sign of the step is fixed by making the largest component of the
    eigenvector positive."""

    opts = MinimizeOptions() if opts is None else opts
    rp = ReducedPotential(params)
    phi = rp.scales.to_phase(state.positions)

    _, evecs = np.linalg.eigh(rp.hessian(phi))
    v = evecs[:, 0]
    if v[np.argmax(np.abs(v))] < 0:
        v = -v

    phi = phi + opts.perturbation_scale * 2 * np.pi * v
    seed = ChainState.from_positions(params, rp.scales.from_phase(phi), is_local_min=False)

    return minimize(params, seed, replace(opts, seed_strategy=SeedStrategy.PROVIDED))


def central_spacing(state):
    """Distance (m) between the central ion and its nearest neighbour, or
    between the two central ions for an even chain"""

    x = state.positions
    n = len(x)
    if n < 2:
        raise ValueError("A single ion has no spacing")
    i = n // 2
    if n % 2 == 0:
        return x[i] - x[i - 1]
    return min(x[i] - x[i - 1], x[i + 1] - x[i])


def _cavity_maximum(phi, cooperativity):
    # Maxima of the cavity potential: antinodes for C > 0, nodes for C < 0
    if cooperativity < 0:
        return np.pi / 2 + np.round((phi - np.pi / 2) / np.pi) * np.pi
    return np.round(phi / np.pi) * np.pi


def _central_phase(state, scales):
    return float(scales.to_phase(state.central_position()))


def depinning_force(params, state, opts=None, rel_tol=1e-4, max_expansions=8,
                    max_bisections=60):
    """Restoring force of an equilibrium: the smallest uniform force that,
    applied to every ion, brings the central ion to the nearest maximum of
    the cavity potential (or past it). The force is found by bisection;
    every trial force is applied to the untilted equilibrium, which is
    re-minimized under the tilt from scratch.

    | Args:
    |   params (SystemParams): the system parameters
    |   state (ChainState): a stable equilibrium
    |   opts (Optional[MinimizeOptions]): solver settings
    |   rel_tol (Optional[float]): relative width of the final bisection
    |                              bracket. Default is 1e-4.
    |   max_expansions (Optional[int]): number of times the initial bracket
    |                                   [0, 2*peak lattice force] may be
    |                                   doubled. Default is 8.
    |   max_bisections (Optional[int]): cap on the number of bisection
    |                                   steps. Default is 60.

    | Returns:
    |   result (DepinningResult): the restoring force in m*omega^2*L

    | Raises:
    |   BracketError: if no force within the expanded bracket reaches the
    |                 maximum

    """

    opts = replace(
        MinimizeOptions() if opts is None else opts,
        seed_strategy=SeedStrategy.PROVIDED,
    )
    rp = ReducedPotential(params)
    sc = rp.scales
    to_force_unit = sc.energy * sc.wavenumber / sc.force

    if state.n_ions % 2 == 0:
        logger.info("Even chain: depinning the midpoint of the two central ions")

    phi_c = _central_phase(state, sc)
    target = _cavity_maximum(phi_c, params.cooperativity)
    if abs(phi_c - target) < _TARGET_TOLERANCE:
        return DepinningResult(0.0, True, state, 0)
    direction = np.sign(target - phi_c)

    evaluations = [0]

    def trial(f, seed):
        evaluations[0] += 1
        tilted = minimize(params, seed, opts, tilt=direction * f * to_force_unit)
        reached = direction * (target - _central_phase(tilted, sc)) < _TARGET_TOLERANCE
        return reached, tilted

    n_bar = rp.photon_number(sc.to_phase(state.positions))
    f_hi = 2 * abs(params.cooperativity) / params.n_ions * n_bar
    if f_hi <= 0:
        f_hi = rp.a_trap * abs(target - phi_c)
    f_lo = 0.0

    reached, hi_state = trial(f_hi, state)
    expansions = 0
    while not reached:
        if expansions >= max_expansions:
            raise BracketError(
                "Restoring force not bracketed", (0.0, f_hi * to_force_unit)
            )
        f_lo = f_hi
        f_hi *= 2
        expansions += 1
        reached, hi_state = trial(f_hi, state)
    logger.debug(
        "Restoring force bracketed in [%g, %g] after %d expansions",
        f_lo * to_force_unit,
        f_hi * to_force_unit,
        expansions,
    )

    for _ in range(max_bisections):
        if f_hi - f_lo <= rel_tol * f_hi:
            break
        f_mid = 0.5 * (f_lo + f_hi)
        reached, mid_state = trial(f_mid, state)
        if reached:
            f_hi, hi_state = f_mid, mid_state
        else:
            f_lo = f_mid

    converged = f_hi - f_lo <= rel_tol * f_hi
    if not converged:
        warnings.warn(
            "Restoring force bisection stopped at relative width {0:.3g}".format(
                (f_hi - f_lo) / f_hi
            )
        )

    return DepinningResult(f_hi * to_force_unit, converged, hi_state, evaluations[0])
