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
phases.py

Classification of equilibria into sliding, pinned and bistable phases, and
the sweeps that build phase diagrams out of them.

A point of the diagram is characterised by two equilibria, found by
continuation from below (forward, starting from the bare chain) and from
above (backward, starting from a chain pinned at the lattice minima) in
the drive strength eta. Where both are stable and differ the point is
bistable.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import logging
import warnings
import numpy as np
from collections import namedtuple
from multiprocessing import Pool
from dataclasses import dataclass, field, replace

from frixion.params import scale_to_n
from frixion.potential import ChainState, ReducedPotential
from frixion.equilibrium import (
    MinimizeOptions,
    SeedStrategy,
    MinimizationError,
    BracketError,
    bare_chain,
    minimize,
    escape_saddle,
    depinning_force,
)
from frixion.phases.modes import ModesError, normal_modes
from frixion.utils import linear_fit

logger = logging.getLogger(__name__)

Phases = namedtuple("Phases", ["SLIDING", "PINNED", "BISTABLE"])
Phases = Phases(SLIDING="sliding", PINNED="pinned", BISTABLE="bistable")

AXES = ("eta", "C", "delta_c", "N")

Branch = namedtuple("Branch", ["states", "errors"])
GapScan = namedtuple("GapScan", ["eta", "forward", "backward"])
KinkScaling = namedtuple("KinkScaling", ["points", "fit"])
CriticalPoint = namedtuple("CriticalPoint", ["eta", "gap", "state"])


@dataclass(frozen=True)
class PhaseOptions(object):

    """PhaseOptions

    Thresholds and settings of the phase classification.

    | Args:
    |   order_tolerance (float): central ion displacement (in wavelengths)
    |                            above which the reflection symmetry counts
    |                            as broken. Default is 1e-3.
    |   force_tolerance (float): restoring force (m*omega^2*L) above which
    |                            a chain counts as pinned. Default is 1e-6.
    |   energy_tolerance (float): relative energy difference above which
    |                             two branches are distinct. Default 1e-9.
    |   position_tolerance (float): largest ion displacement (wavelengths)
    |                               above which two branches are distinct.
    |                               Default is 1e-3.
    |   gap_tolerance (float): phonon gap, in units of the trap frequency,
    |                          below which a mode counts as soft. Default
    |                          is 0.02.
    |   fluctuations (bool): also analyse the linearized fluctuations of
    |                        each point (stability and chain temperature).
    |                        Default is True.
    |   minimize (MinimizeOptions): solver settings

    """

    order_tolerance: float = 1e-3
    force_tolerance: float = 1e-6
    energy_tolerance: float = 1e-9
    position_tolerance: float = 1e-3
    gap_tolerance: float = 0.02
    fluctuations: bool = True
    minimize: MinimizeOptions = field(default_factory=MinimizeOptions)


@dataclass(frozen=True, eq=False)
class PhasePoint(object):

    """PhasePoint

    Classification of a single point of the phase diagram.

    | Args:
    |   params (SystemParams): parameters of the point
    |   bunching (float): B_N of the reported (lower energy) equilibrium
    |   phonon_gap (float): lowest normal mode frequency, rad/s
    |   restoring_force (float): depinning force, m*omega^2*L
    |   order_parameter (float): displacement of the central ion from the
    |                            trap centre, in wavelengths
    |   classification (str): one of the Phases values
    |   bistable (bool): forward and backward branches are both stable and
    |                    distinct
    |   quantum_flag (bool): mean photon number below one
    |   fluct_stable (bool): linearized fluctuations are stable
    |   chain_temperature (float): mean mode temperature of the steady
    |                              state, K (nan if not available)
    |   kink_estimate (float): B_N*N for C >= 0, (1-B_N)*N for C < 0
    |   delta_eff (float): effective detuning, rad/s
    |   photon_number (float): mean intracavity photon number
    |   finite_size_warning (bool): even number of ions
    |   state (ChainState): the reported equilibrium
    |   branches (tuple): forward and backward equilibria
    |   errors (tuple): descriptions of the failures met at this point

    """

    params: object
    bunching: float
    phonon_gap: float
    restoring_force: float
    order_parameter: float
    classification: str
    bistable: bool
    quantum_flag: bool
    fluct_stable: bool
    chain_temperature: float
    kink_estimate: float
    delta_eff: float
    photon_number: float
    finite_size_warning: bool
    state: ChainState = None
    branches: tuple = ()
    errors: tuple = ()

    @property
    def eta(self):
        return self.params.eta

    @property
    def cooperativity(self):
        return self.params.cooperativity

    @property
    def delta_c(self):
        return self.params.delta_c

    @property
    def ok(self):
        return len(self.errors) == 0

    def check_invariants(self, opts=None):
        """List of violated invariants of the point and its state"""
        opts = PhaseOptions() if opts is None else opts
        errs = []
        if self.classification == Phases.SLIDING and not (
            self.restoring_force < opts.force_tolerance
        ):
            errs.append("sliding point with restoring force {0}".format(self.restoring_force))
        if self.state is not None:
            errs += self.state.check_invariants(self.params)
        return errs


def apply_axis(params, axis, value, auto_offset=False):
    """Copy of params with one sweep axis set to value.

    | Args:
    |   params (SystemParams): the base parameters
    |   axis (str): 'eta' (rad/s), 'C' (cooperativity), 'delta_c' (rad/s)
    |               or 'N' (number of ions, parameters scaled with
    |               scale_to_n)
    |   value (float): the new value
    |   auto_offset (Optional[bool]): when setting C, also move the trap
    |                                 centre to a maximum of the cavity
    |                                 potential. Default is False.

    """

    if axis == "eta":
        return params.with_drive(eta=value)
    elif axis == "C":
        return params.with_cooperativity(value, auto_offset=auto_offset)
    elif axis == "delta_c":
        return params.with_drive(delta_c=value)
    elif axis == "N":
        return scale_to_n(params, params.n_ions, int(value))
    raise ValueError("Invalid sweep axis {0}, must be one of {1}".format(axis, AXES))


def pinned_seed(params, opts=None):
    """Bare chain with every ion moved to the nearest minimum of the
    cavity potential (nodes for C > 0, antinodes for C < 0), the limit of a
    strongly pinned chain. Falls back to the bare chain if two ions would
    land on the same minimum."""

    state = bare_chain(params, opts)
    rp = ReducedPotential(params)
    phi = rp.scales.to_phase(state.positions)
    if params.cooperativity >= 0:
        phi = np.pi / 2 + np.round((phi - np.pi / 2) / np.pi) * np.pi
    else:
        phi = np.round(phi / np.pi) * np.pi
    if len(phi) > 1 and np.any(np.diff(phi) <= 0):
        return state
    return ChainState.from_positions(params, rp.scales.from_phase(phi), is_local_min=False)


def _settle(params, seed, opts, max_escapes=3):
    state = minimize(params, seed, opts)
    for _ in range(max_escapes):
        if state.is_local_min:
            break
        logger.debug("Saddle found, escaping along the softest mode")
        state = escape_saddle(params, state, opts)
    return state


def continuation_scan(params, eta_values, direction="forward", opts=None, seed=None):
    """Follow an equilibrium branch along eta, seeding each point with the
    solution of the previous one.

    | Args:
    |   params (SystemParams): the system parameters (eta is overridden)
    |   eta_values (np.ndarray): strictly increasing drive strengths, rad/s
    |   direction (Optional[str]): 'forward' scans eta upwards starting
    |                              from the bare chain, 'backward' scans it
    |                              downwards starting from a pinned chain
    |   opts (Optional[MinimizeOptions]): solver settings
    |   seed (Optional[ChainState]): overrides the starting configuration

    | Returns:
    |   branch (Branch): the states (None where minimization failed) and
    |                    the error messages (None where it succeeded),
    |                    both in the order of eta_values

    """

    opts = MinimizeOptions() if opts is None else opts
    opts = replace(opts, seed_strategy=SeedStrategy.PROVIDED)
    eta_values = _check_eta_axis(eta_values)

    if direction == "forward":
        order = range(len(eta_values))
    elif direction == "backward":
        order = range(len(eta_values) - 1, -1, -1)
    else:
        raise ValueError("Invalid continuation direction {0}".format(direction))

    states = [None] * len(eta_values)
    errors = [None] * len(eta_values)
    prev = seed
    for i in order:
        p = params.with_drive(eta=eta_values[i])
        if prev is None:
            prev = bare_chain(p, opts) if direction == "forward" else pinned_seed(p, opts)
        try:
            states[i] = _settle(p, prev, opts)
            prev = states[i]
        except MinimizationError as e:
            errors[i] = "{0} branch: {1}".format(direction, e)
            logger.info("eta = %g: %s", eta_values[i], errors[i])

    return Branch(states, errors)


def _check_eta_axis(eta_values):
    eta_values = np.atleast_1d(np.asarray(eta_values, dtype=float))
    if len(eta_values) == 0:
        raise ValueError("Empty eta axis")
    if np.any(np.diff(eta_values) <= 0):
        raise ValueError("The eta axis must be strictly increasing")
    return eta_values


def _distinct(s1, s2, params, opts):
    dE = abs(s1.energy - s2.energy)
    scale = max(abs(s1.energy), abs(s2.energy))
    dx = np.max(np.abs(s1.positions - s2.positions)) / params.wavelength
    return dE > opts.energy_tolerance * scale and dx > opts.position_tolerance


def _fluctuation_summary(params, state):
    from frixion.fluctuations import (
        FluctuationError,
        fluctuation_model,
        stability,
        steady_covariance,
    )

    try:
        model = fluctuation_model(params, state)
    except ModesError:
        # Unstable at fixed photon number
        return False, np.nan
    except FluctuationError as e:
        logger.debug("No fluctuation analysis: %s", e)
        return False, np.nan

    stable = stability(model).stable
    if not stable:
        return False, np.nan
    try:
        cov = steady_covariance(model)
    except FluctuationError as e:
        logger.debug("No steady state: %s", e)
        return True, np.nan
    return True, cov.chain_temperature


def kink_estimate(params, bunching):
    if params.cooperativity < 0:
        return (1.0 - bunching) * params.n_ions
    return bunching * params.n_ions


def _point_from_branches(params, forward, backward, opts, errors=()):

    errors = list(errors)
    stable = [s for s in (forward, backward) if s is not None and s.is_local_min]
    candidates = stable or [s for s in (forward, backward) if s is not None]

    if not candidates:
        errors.append("no equilibrium found")
        return PhasePoint(
            params=params,
            bunching=np.nan,
            phonon_gap=np.nan,
            restoring_force=np.nan,
            order_parameter=np.nan,
            classification=Phases.PINNED,
            bistable=False,
            quantum_flag=False,
            fluct_stable=False,
            chain_temperature=np.nan,
            kink_estimate=np.nan,
            delta_eff=np.nan,
            photon_number=np.nan,
            finite_size_warning=params.n_ions % 2 == 0,
            branches=(forward, backward),
            errors=tuple(errors),
        )

    state = min(candidates, key=lambda s: s.energy)
    bistable = len(stable) == 2 and _distinct(stable[0], stable[1], params, opts)

    if not state.is_local_min:
        errors.append("no stable equilibrium found")
        gap = np.nan
    else:
        try:
            gap = normal_modes(params, state, rtol=opts.minimize.hessian_rtol).gap
        except ModesError as e:
            errors.append(str(e))
            gap = np.nan

    try:
        force = depinning_force(params, state, opts.minimize).restoring_force
    except (BracketError, MinimizationError) as e:
        errors.append("restoring force: {0}".format(e))
        force = np.nan

    order = (state.central_position() - params.trap_center_offset) / params.wavelength

    if bistable:
        phase = Phases.BISTABLE
    elif abs(order) < opts.order_tolerance and force < opts.force_tolerance:
        phase = Phases.SLIDING
    else:
        phase = Phases.PINNED

    if opts.fluctuations and state.is_local_min:
        fluct_stable, temperature = _fluctuation_summary(params, state)
    else:
        fluct_stable, temperature = False, np.nan

    return PhasePoint(
        params=params,
        bunching=state.bunching,
        phonon_gap=gap,
        restoring_force=force,
        order_parameter=order,
        classification=phase,
        bistable=bistable,
        quantum_flag=state.quantum_regime,
        fluct_stable=fluct_stable,
        chain_temperature=temperature,
        kink_estimate=kink_estimate(params, state.bunching),
        delta_eff=state.delta_eff,
        photon_number=state.photon_number,
        finite_size_warning=params.n_ions % 2 == 0,
        state=state,
        branches=(forward, backward),
        errors=tuple(errors),
    )


def classify_point(params, opts=None, forward_seed=None, backward_seed=None):
    """Classify a single point of the phase diagram.

    The chain is minimized from a symmetric seed (the bare chain, or
    forward_seed) and from a pinned seed (see pinned_seed, or
    backward_seed); saddles are escaped along their softest mode. The
    lower energy stable equilibrium is reported. The point is sliding if
    its central ion sits at the trap centre and its restoring force
    vanishes, pinned otherwise, and bistable if the two equilibria are
    both stable and distinct.

    | Args:
    |   params (SystemParams): the system parameters
    |   opts (Optional[PhaseOptions]): thresholds and solver settings
    |   forward_seed (Optional[ChainState]): seed of the forward branch
    |   backward_seed (Optional[ChainState]): seed of the backward branch

    | Returns:
    |   point (PhasePoint): the classified point. Failures of either
    |                       branch are listed in point.errors.

    """

    opts = PhaseOptions() if opts is None else opts
    mopts = replace(opts.minimize, seed_strategy=SeedStrategy.PROVIDED)

    if params.n_ions % 2 == 0:
        warnings.warn(
            "Even number of ions: the phonon gap may not close at the transition"
        )

    errors = []
    branches = []
    for name, seed, default in (
        ("forward", forward_seed, bare_chain),
        ("backward", backward_seed, pinned_seed),
    ):
        try:
            seed = default(params, mopts) if seed is None else seed
            branches.append(_settle(params, seed, mopts))
        except MinimizationError as e:
            errors.append("{0} branch: {1}".format(name, e))
            branches.append(None)

    return _point_from_branches(params, branches[0], branches[1], opts, errors)


def _sweep_row(task):
    params, eta_values, opts = task
    logger.info(
        "Sweeping row C = %g, delta_c = %g, N = %d",
        params.cooperativity,
        params.delta_c,
        params.n_ions,
    )
    mopts = opts.minimize
    fwd = continuation_scan(params, eta_values, "forward", mopts)
    bwd = continuation_scan(params, eta_values, "backward", mopts)

    points = []
    for i, eta in enumerate(eta_values):
        errors = [e for e in (fwd.errors[i], bwd.errors[i]) if e is not None]
        points.append(
            _point_from_branches(
                params.with_drive(eta=eta), fwd.states[i], bwd.states[i], opts, errors
            )
        )
    return points


def sweep_phase_diagram(params_base, eta_values, row_axis=None, row_values=(None,),
                        opts=None, workers=1, auto_offset=False):
    """Phase diagram over a grid of drive strengths and one other axis.

    Every row (a value of row_axis) is scanned along eta forward and
    backward; rows are independent and run in parallel over a pool of
    worker processes. Failures at a point are stored in its errors and do
    not stop the sweep.

    | Args:
    |   params_base (SystemParams): the base parameters
    |   eta_values (np.ndarray): strictly increasing eta values, rad/s
    |   row_axis (Optional[str]): one of 'C', 'delta_c', 'N', or None for a
    |                             single row
    |   row_values (Optional[list]): values along row_axis
    |   opts (Optional[PhaseOptions]): thresholds and solver settings
    |   workers (Optional[int]): number of worker processes. Default is 1.
    |   auto_offset (Optional[bool]): move the trap centre to a maximum of
    |                                 the cavity potential whenever C is
    |                                 set. Default is False.

    | Returns:
    |   points (list[PhasePoint]): ordered by ascending row value, then by
    |                              eta

    """

    opts = PhaseOptions() if opts is None else opts
    eta_values = _check_eta_axis(eta_values)
    if row_axis is None:
        row_values = (None,)
    elif row_axis not in AXES or row_axis == "eta":
        raise ValueError("Invalid row axis {0}".format(row_axis))
    if len(row_values) == 0:
        raise ValueError("Empty row axis")
    if row_axis is not None:
        row_values = sorted(row_values)

    tasks = []
    for v in row_values:
        p = params_base if row_axis is None else apply_axis(
            params_base, row_axis, v, auto_offset
        )
        tasks.append((p, eta_values, opts))

    if any(t[0].n_ions % 2 == 0 for t in tasks):
        warnings.warn(
            "Even number of ions: the phonon gap may not close at the transition"
        )

    if workers > 1 and len(tasks) > 1:
        with Pool(min(workers, len(tasks))) as pool:
            rows = pool.map(_sweep_row, tasks)
    else:
        rows = [_sweep_row(t) for t in tasks]

    return [pt for row in rows for pt in row]


def gap_scan(params, eta_values, opts=None):
    """Phonon gap (rad/s) along eta on the forward and backward branches.
    Points without a stable equilibrium hold nan."""

    opts = PhaseOptions() if opts is None else opts
    eta_values = _check_eta_axis(eta_values)

    gaps = {}
    for direction in ("forward", "backward"):
        branch = continuation_scan(params, eta_values, direction, opts.minimize)
        g = np.full(len(eta_values), np.nan)
        for i, s in enumerate(branch.states):
            if s is not None and s.is_local_min:
                p = params.with_drive(eta=eta_values[i])
                try:
                    g[i] = normal_modes(p, s, rtol=opts.minimize.hessian_rtol).gap
                except ModesError:
                    pass
        gaps[direction] = g

    return GapScan(eta_values, gaps["forward"], gaps["backward"])


def critical_eta(params, eta_values, opts=None, rtol=1e-7):
    """Drive strength at which the symmetric (sliding) equilibrium stops
    being a stable minimum.

    The forward branch along eta_values brackets the transition between
    the last point where the equilibrium is a minimum with an order
    parameter below opts.order_tolerance and the next one. The bracket is
    then bisected, every trial re-minimized from the symmetric state at
    the lower end, until its relative width is below rtol.

    | Args:
    |   params (SystemParams): the system parameters (eta is overridden)
    |   eta_values (np.ndarray): strictly increasing drive strengths, rad/s
    |   opts (Optional[PhaseOptions]): classification settings
    |   rtol (Optional[float]): relative width of the final bracket

    | Returns:
    |   point (CriticalPoint): the lower end of the final bracket, the
    |                          phonon gap there (rad/s) and the symmetric
    |                          state

    | Raises:
    |   ValueError: if the branch is not symmetric at the first point or
    |               stays symmetric along the whole axis

    """

    opts = PhaseOptions() if opts is None else opts
    mopts = replace(opts.minimize, seed_strategy=SeedStrategy.PROVIDED)
    eta_values = _check_eta_axis(eta_values)

    def symmetric(eta, s):
        if s is None or not s.is_local_min:
            return False
        p = params.with_drive(eta=eta)
        order = (s.central_position() - p.trap_center_offset) / p.wavelength
        return abs(order) < opts.order_tolerance

    branch = continuation_scan(params, eta_values, "forward", mopts)
    flags = [symmetric(eta, s) for eta, s in zip(eta_values, branch.states)]
    if not flags[0]:
        raise ValueError("The branch is not symmetric at the start of the eta axis")
    if all(flags):
        raise ValueError("The branch stays symmetric along the whole eta axis")

    i = flags.index(False)
    lo, hi = eta_values[i - 1], eta_values[i]
    state = branch.states[i - 1]
    while (hi - lo) > rtol * hi:
        mid = 0.5 * (lo + hi)
        try:
            trial = minimize(params.with_drive(eta=mid), state, mopts)
        except MinimizationError:
            trial = None
        if symmetric(mid, trial):
            lo, state = mid, trial
        else:
            hi = mid

    p = params.with_drive(eta=lo)
    try:
        gap = normal_modes(p, state, rtol=opts.minimize.hessian_rtol).gap
    except ModesError:
        gap = np.nan
    logger.info("Critical drive %g kappa, gap %g trap frequencies",
                lo / params.kappa, gap / params.trap_freq)

    return CriticalPoint(lo, gap, state)


def find_eta_for_bunching(params, target, eta_values, opts=None, direction="forward"):
    """Drive strength at which the equilibrium reaches a given bunching
    parameter, following a continuation branch along eta_values and
    interpolating linearly between the two points that bracket it.

    | Returns:
    |   eta (float): the drive strength, rad/s
    |   state (ChainState): the equilibrium at that drive

    | Raises:
    |   ValueError: if the bunching never crosses target along the branch

    """

    opts = MinimizeOptions() if opts is None else opts
    eta_values = _check_eta_axis(eta_values)
    branch = continuation_scan(params, eta_values, direction, opts)

    pts = [
        (eta, s) for eta, s in zip(eta_values, branch.states) if s is not None
    ]
    for (e1, s1), (e2, s2) in zip(pts[:-1], pts[1:]):
        b1, b2 = s1.bunching - target, s2.bunching - target
        if b1 == 0:
            return e1, s1
        if b1 * b2 < 0:
            eta = e1 + (e2 - e1) * b1 / (b1 - b2)
            p = params.with_drive(eta=eta)
            seed = s1 if direction == "forward" else s2
            return eta, _settle(p, seed, replace(opts, seed_strategy=SeedStrategy.PROVIDED))
    if pts and pts[-1][1].bunching == target:
        return pts[-1]

    raise ValueError("Bunching {0} not reached along the branch".format(target))


def kink_scaling(params_base, n_values, opts=None, steps=20):
    """Kink count estimate as a function of the number of ions, parameters
    scaled with scale_to_n from params_base.n_ions.

    For every N the chain is followed along the forward branch, from the
    bare chain at eta = 0 up to params_base.eta in equal steps, so that all
    N report the equilibrium reached by switching the drive on slowly.

    | Args:
    |   params_base (SystemParams): the base parameters
    |   n_values (list[int]): odd numbers of ions
    |   opts (Optional[MinimizeOptions]): solver settings
    |   steps (Optional[int]): number of continuation steps in eta.
    |                          Default is 20.

    | Returns:
    |   scaling (KinkScaling): the (N, kink estimate) pairs and their least
    |                          squares straight line fit (None with fewer
    |                          than two distinct N)

    | Raises:
    |   MinimizationError: if the branch fails at the final drive

    """

    opts = MinimizeOptions() if opts is None else opts
    if steps < 1:
        raise ValueError("kink_scaling needs at least one continuation step")
    ladder = np.linspace(0.0, params_base.eta, steps + 1)

    points = []
    for n in n_values:
        if n % 2 == 0:
            raise ValueError("kink_scaling needs odd numbers of ions, got {0}".format(n))
        p = params_base if n == params_base.n_ions else scale_to_n(
            params_base, params_base.n_ions, n
        )
        if params_base.eta > 0:
            branch = continuation_scan(p, ladder, "forward", opts)
            state = branch.states[-1]
            if state is None:
                raise MinimizationError("N = {0}: {1}".format(n, branch.errors[-1]))
        else:
            state = bare_chain(p, opts)
        points.append((n, kink_estimate(p, state.bunching)))
        logger.info("N = %d: kink estimate %g", n, points[-1][1])

    fit = linear_fit([pt[0] for pt in points], [pt[1] for pt in points])

    return KinkScaling(points, fit)
