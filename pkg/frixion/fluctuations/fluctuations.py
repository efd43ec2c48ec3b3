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
fluctuations.py

Linearized dynamics of the cavity field and of the normal modes of the
chain around a mean-field equilibrium.

Fluctuations are described by the real quadratures
X = (x_a, p_a, q_1, p_1, ..., q_N, p_N), with delta_a = (x_a + i p_a)/sqrt(2)
and b_n = (q_n + i p_n)/sqrt(2). They obey dX/dt = A X + noise, where the
drift A couples the cavity to each mode with strength 2*a*c_n and the noise
has diffusion matrix D. The steady state covariance solves the Lyapunov
equation A S + S A^T + D = 0.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import logging
import numpy as np
import scipy.constants as cnst
from scipy import linalg
from collections import namedtuple
from dataclasses import dataclass

from frixion.phases.modes import ModesError, normal_modes

logger = logging.getLogger(__name__)

Stability = namedtuple("Stability", ["stable", "eigenvalues", "margin"])
StabilityEntry = namedtuple("StabilityEntry", ["delta_eff", "stable", "margin"])

# Largest real part of the drift eigenvalues (units of kappa) still
# considered stable, and the margin required to solve for a steady state
_STABILITY_TOLERANCE = 1e-12
_STEADY_STATE_MARGIN = -1e-9
# Cavity coupling 2*a*|c_n| (units of kappa) below which an undamped mode
# is left out of the steady state
_DECOUPLED_TOLERANCE = 1e-6


class FluctuationError(RuntimeError):
    def __init__(self, msg, margin=None, nu=None):
        super(FluctuationError, self).__init__(msg)
        self.margin = margin
        self.nu = nu


@dataclass(frozen=True, eq=False)
class FluctuationModel(object):

    """FluctuationModel

    Linearized cavity-phonon system. Rates are in rad/s.

    | Args:
    |   couplings (np.ndarray): cavity-mode couplings c_n
    |   mode_freqs (np.ndarray): mode frequencies omega_n
    |   mode_damping (np.ndarray): mode damping rates Gamma_n
    |   bath_occ (np.ndarray): reservoir occupations of the modes
    |   delta_eff (float): effective detuning
    |   kappa (float): cavity half-linewidth
    |   mean_field (float): real intracavity amplitude, sqrt(n)
    |   drift (np.ndarray): (2N+2)x(2N+2) drift matrix A
    |   diffusion (np.ndarray): (2N+2)x(2N+2) diffusion matrix D
    |   mode_matrix (np.ndarray): normal mode vectors, if known
    |   mass (float): ion mass in kg, if known

    """

    couplings: np.ndarray
    mode_freqs: np.ndarray
    mode_damping: np.ndarray
    bath_occ: np.ndarray
    delta_eff: float
    kappa: float
    mean_field: float
    drift: np.ndarray
    diffusion: np.ndarray
    mode_matrix: np.ndarray = None
    mass: float = None

    @property
    def n_modes(self):
        return len(self.mode_freqs)


@dataclass(frozen=True, eq=False)
class CovarianceResult(object):

    """CovarianceResult

    | Args:
    |   covariance (np.ndarray): symmetrized quadrature covariance matrix
    |   mode_occupations (np.ndarray): mean phonon number of each mode
    |   mode_temperatures (np.ndarray): temperature of each mode, K
    |   chain_temperature (float): mean of the mode temperatures, K
    |   position_spreads (np.ndarray): rms position fluctuation of each
    |                                  ion, m (nan if the modes are unknown
    |                                  or some mode is undamped)
    |   residual (float): max norm of A S + S A^T + D
    |   damped (np.ndarray): False for the undamped modes, whose entries
    |                        are nan

    """

    covariance: np.ndarray
    mode_occupations: np.ndarray
    mode_temperatures: np.ndarray
    chain_temperature: float
    position_spreads: np.ndarray
    residual: float
    damped: np.ndarray = None


@dataclass(frozen=True, eq=False)
class SpectrumResult(object):

    """SpectrumResult

    | Args:
    |   nu_grid (np.ndarray): frequencies relative to the pump, rad/s
    |   values (np.ndarray): output spectrum S(nu), arbitrary units

    """

    nu_grid: np.ndarray
    values: np.ndarray


def mode_couplings(params, state, modes, gap_tolerance=0.02):
    """Couplings of the cavity field to the normal modes,
    c_n = x_zpf,n U0 sum_j M_jn d/dx_j cos^2(k x_j) (rad/s), with
    x_zpf,n = sqrt(hbar/(2 m omega_n)).

    | Args:
    |   params (SystemParams): the system parameters
    |   state (ChainState): the equilibrium the modes belong to
    |   modes (NormalModes): the normal modes
    |   gap_tolerance (Optional[float]): smallest accepted mode frequency,
    |                                    in units of the trap frequency

    | Raises:
    |   FluctuationError: for modes softer than gap_tolerance

    """

    freqs = np.asarray(modes.frequencies)
    if np.any(freqs < gap_tolerance * params.trap_freq):
        raise FluctuationError(
            "Mode of frequency {0:.4g} omega below the gap tolerance: no "
            "bosonic normalization".format(np.min(freqs) / params.trap_freq)
        )

    kx = params.k * state.positions
    dcos2 = -params.k * np.sin(2 * kx)
    x_zpf = np.sqrt(cnst.hbar / (2 * params.mass * freqs))

    return x_zpf * params.u0 * (modes.mode_matrix.T @ dcos2)


def drift_matrix(couplings, mode_freqs, mode_damping, bath_occ, delta_eff, kappa,
                 mean_field, mode_matrix=None, mass=None):
    """Assemble the drift and diffusion matrices of the linearized system.

    The cavity quadratures decay at rate kappa and rotate at delta_eff;
    mode n oscillates at omega_n and decays at Gamma_n; the momentum of
    each oscillator is driven by the position of the other one with
    strength 2*a*c_n. The cavity input is vacuum (diffusion kappa per
    quadrature), mode n sees a thermal reservoir of occupation N_n
    (diffusion Gamma_n*(2*N_n + 1) per quadrature).

    | Returns:
    |   model (FluctuationModel): the assembled model

    """

    c = np.atleast_1d(np.asarray(couplings, dtype=float))
    w = np.atleast_1d(np.asarray(mode_freqs, dtype=float))
    g = np.atleast_1d(np.asarray(mode_damping, dtype=float))
    nb = np.atleast_1d(np.asarray(bath_occ, dtype=float))
    n = len(w)
    if not (len(c) == len(g) == len(nb) == n):
        raise ValueError("Mode data of inconsistent length passed to drift_matrix")

    dim = 2 * n + 2
    A = np.zeros((dim, dim))
    D = np.zeros((dim, dim))

    A[0, 0] = A[1, 1] = -kappa
    A[0, 1] = -delta_eff
    A[1, 0] = delta_eff
    D[0, 0] = D[1, 1] = kappa

    for i in range(n):
        q, p = 2 + 2 * i, 3 + 2 * i
        A[q, q] = A[p, p] = -g[i]
        A[q, p] = w[i]
        A[p, q] = -w[i]
        A[1, q] = -2 * mean_field * c[i]
        A[p, 0] = -2 * mean_field * c[i]
        D[q, q] = D[p, p] = g[i] * (2 * nb[i] + 1)

    return FluctuationModel(
        couplings=c,
        mode_freqs=w,
        mode_damping=g,
        bath_occ=nb,
        delta_eff=float(delta_eff),
        kappa=float(kappa),
        mean_field=float(mean_field),
        drift=A,
        diffusion=D,
        mode_matrix=mode_matrix,
        mass=mass,
    )


def fluctuation_model(params, state, modes=None, gap_tolerance=0.02):
    """Linearized model around an equilibrium. Unless given, the normal
    modes are those at fixed photon number: the cavity dynamics in the
    drift already accounts for the response of the photon number.

    | Raises:
    |   ModesError: if the equilibrium is unstable at fixed photon number
    |   FluctuationError: for modes softer than gap_tolerance

    """

    if modes is None:
        modes = normal_modes(params, state, fixed_photon_number=True)

    c = mode_couplings(params, state, modes, gap_tolerance)

    return drift_matrix(
        c,
        modes.frequencies,
        params.mode_damping(modes.n_modes),
        params.mode_bath_occupation(modes.frequencies),
        state.delta_eff,
        params.kappa,
        np.sqrt(state.photon_number),
        mode_matrix=modes.mode_matrix,
        mass=params.mass,
    )


def stability(model):
    """Dynamical stability of the linearized system: stable if no
    eigenvalue of the drift has a positive real part (up to 1e-12*kappa).

    | Returns:
    |   result (Stability): verdict, drift eigenvalues (rad/s) and margin,
    |                       the largest real part in units of kappa

    """

    evals = linalg.eigvals(model.drift)
    margin = float(np.max(evals.real)) / model.kappa
    return Stability(margin < _STABILITY_TOLERANCE, evals, margin)


def symplectic_eigenvalues(cov):
    """Symplectic eigenvalues of a covariance matrix in the quadrature
    ordering (x_1, p_1, x_2, p_2, ...), ascending. They are at least 1/2
    for any physical state."""

    n = cov.shape[0] // 2
    omega = np.kron(np.identity(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    nu = np.sort(np.abs(linalg.eigvals(1j * omega @ cov)))
    return nu[::2]


def mode_temperatures(freqs, occupations):
    """Temperatures (K) giving each mode its occupation,
    T = hbar*omega/(k_B*ln(1 + 1/n)). Non-positive occupations give 0,
    nan occupations nan."""

    freqs = np.asarray(freqs, dtype=float)
    occ = np.asarray(occupations, dtype=float)
    T = np.where(np.isnan(occ), np.nan, 0.0)
    hot = occ > 0
    T[hot] = cnst.hbar * freqs[hot] / (cnst.k * np.log1p(1.0 / occ[hot]))
    return T


def undamped_modes(model, tolerance=_DECOUPLED_TOLERANCE):
    """Modes without a reservoir whose coupling to the cavity, 2*a*|c_n|,
    is below tolerance*kappa. Nothing damps or heats them, so they have no
    steady state of their own; in a reflection symmetric chain the
    symmetric modes are of this kind.

    | Returns:
    |   mask (np.ndarray): True for each undamped mode

    """

    coupling = np.abs(2 * model.mean_field * model.couplings) / model.kappa
    return (model.mode_damping <= 0) & (coupling < tolerance)


def _quadratures(keep):
    # Indices of the cavity quadratures and of those of the kept modes
    idx = [0, 1]
    for i in np.flatnonzero(keep):
        idx += [2 + 2 * i, 3 + 2 * i]
    return np.array(idx)


def steady_covariance(model, floor_tolerance=1e-6):
    """Steady state covariance of the linearized system.

    Undamped modes (see undamped_modes) are left out of the solution:
    their rows and columns of the covariance, their occupations and
    temperatures are nan, and the chain temperature is the mean over the
    remaining modes.

    | Args:
    |   model (FluctuationModel): a stable model
    |   floor_tolerance (Optional[float]): tolerance on the uncertainty
    |                                      bound of the symplectic
    |                                      eigenvalues. Default is 1e-6.

    | Returns:
    |   result (CovarianceResult): covariance, mode occupations and
    |                              temperatures, ion position spreads

    | Raises:
    |   FluctuationError: if no mode is damped, if the damped system is not
    |                     stable by a margin of at least 1e-9*kappa, or if
    |                     the solution fails its residual or uncertainty
    |                     checks

    """

    n = model.n_modes
    damped = ~undamped_modes(model)
    if not np.any(damped):
        raise FluctuationError("No steady state: no mode is damped")
    idx = _quadratures(damped)

    # Lyapunov equation in units of kappa, damped subsystem only
    A = model.drift[np.ix_(idx, idx)] / model.kappa
    D = model.diffusion[np.ix_(idx, idx)] / model.kappa

    margin = float(np.max(linalg.eigvals(A).real))
    if margin >= _STEADY_STATE_MARGIN:
        raise FluctuationError(
            "No steady state: largest drift eigenvalue real part is "
            "{0:.3e} kappa".format(margin),
            margin=margin,
        )

    sub = linalg.solve_continuous_lyapunov(A, -D)
    sub = 0.5 * (sub + sub.T)

    residual = np.max(np.abs(A @ sub + sub @ A.T + D))
    if residual >= 1e-8 * np.max(np.abs(D)):
        raise FluctuationError(
            "Lyapunov solution residual {0:.3e} too large".format(residual),
            margin=margin,
        )
    logger.debug("Steady state found, margin %.3e kappa, residual %.3e", margin, residual)
    if not np.all(damped):
        logger.debug("%d undamped modes left out", n - np.count_nonzero(damped))

    nu = symplectic_eigenvalues(sub)
    if nu[0] < 0.5 - floor_tolerance:
        raise FluctuationError(
            "Unphysical covariance: symplectic eigenvalue {0:.8f} < 1/2".format(nu[0]),
            margin=margin,
        )

    cov = np.full(model.drift.shape, np.nan)
    cov[np.ix_(idx, idx)] = sub

    iq = 2 + 2 * np.arange(n)
    occ = 0.5 * (cov[iq, iq] + cov[iq + 1, iq + 1]) - 0.5
    temps = mode_temperatures(model.mode_freqs, occ)

    if model.mode_matrix is not None and model.mass is not None and np.all(damped):
        x_zpf = np.sqrt(cnst.hbar / (2 * model.mass * model.mode_freqs))
        # delta x_j = sum_n M_jn x_zpf,n sqrt(2) q_n
        T = model.mode_matrix * x_zpf[None, :] * np.sqrt(2)
        spreads = np.sqrt(np.einsum("jn,nm,jm->j", T, cov[np.ix_(iq, iq)], T))
    else:
        spreads = np.full(n, np.nan)

    return CovarianceResult(
        covariance=cov,
        mode_occupations=occ,
        mode_temperatures=temps,
        chain_temperature=float(np.mean(temps[damped])),
        position_spreads=spreads,
        residual=float(residual),
        damped=damped,
    )


def output_spectrum(model, nu_grid):
    """Spectrum of the light leaking out of the cavity, at frequencies
    nu_grid (rad/s) relative to the pump. The Rayleigh peak at nu = 0 is
    not included.

    The first term is the vacuum noise of the cavity scattered by the
    modes, the second the thermal noise of the modes; both are shaped by
    the response of the coupled system S0(nu).

    | Raises:
    |   FluctuationError: if the spectrum is not finite at some frequency

    """

    nu = np.atleast_1d(np.asarray(nu_grid, dtype=float))
    k = model.kappa
    d = model.delta_eff
    a2 = model.mean_field ** 2
    c2 = model.couplings ** 2
    w = model.mode_freqs
    g = model.mode_damping
    nb = model.bath_occ

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        theta = np.sum(
            c2[None, :] * w[None, :]
            / (w[None, :] ** 2 + (g[None, :] - 1j * nu[:, None]) ** 2),
            axis=1,
        )
        s0 = (2.0 / (k ** 2 + (nu + d) ** 2)) / np.abs(
            1 + 4 * theta * d * a2 / ((k - 1j * nu) ** 2 + d ** 2)
        ) ** 2
        vacuum = 4 * k * np.abs(theta) ** 2 * a2 / (k ** 2 + (nu - d) ** 2)
        thermal = np.sum(
            c2[None, :] * g[None, :] ** 2
            * (
                nb[None, :] / (g[None, :] ** 2 + (w[None, :] - nu[:, None]) ** 2)
                + (nb[None, :] + 1) / (g[None, :] ** 2 + (w[None, :] + nu[:, None]) ** 2)
            ),
            axis=1,
        )
        values = s0 * (vacuum + thermal)

    bad = ~np.isfinite(values)
    if np.any(bad):
        nu_bad = nu[np.argmax(bad)]
        raise FluctuationError(
            "Spectrum not finite at nu = {0:.6g} rad/s".format(nu_bad), nu=nu_bad
        )

    return SpectrumResult(nu_grid=nu, values=values)


def stability_map(points):
    """Stability of the linearized fluctuations for a collection of
    equilibria.

    | Args:
    |   points (iterable): pairs (params, state)

    | Returns:
    |   entries (list[StabilityEntry]): effective detuning (rad/s), verdict
    |                                   and margin of each point. States
    |                                   unstable at fixed photon number are
    |                                   reported unstable with margin nan,
    |                                   as are states with a mode softer
    |                                   than the gap tolerance.

    """

    entries = []
    for params, state in points:
        try:
            st = stability(fluctuation_model(params, state))
            entries.append(StabilityEntry(state.delta_eff, st.stable, st.margin))
        except (ModesError, FluctuationError) as e:
            logger.debug("No stability verdict: %s", e)
            entries.append(StabilityEntry(state.delta_eff, False, np.nan))
    return entries
