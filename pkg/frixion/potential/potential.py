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
potential.py

The potential V = V_ion + V_cav of N ions along the cavity axis.

V_ion is the harmonic trap plus Coulomb repulsion. V_cav is the mean-field
cavity potential -(hbar eta^2/kappa) arctan(Delta_eff/kappa), where the
effective detuning Delta_eff = Delta_c - N U0 B_N depends on all the ion
positions through the bunching parameter B_N = sum_j cos^2(k x_j)/N.

The heavy lifting is done by ReducedPotential in reduced units (phases
phi = k x, energies in hbar kappa); the module level functions are thin SI
wrappers around it.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import numpy as np
from ase import Atoms
from dataclasses import dataclass

from frixion.params import derived_scales


class PotentialError(ValueError):
    pass


def _check_positions(phi):
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 1 or len(phi) == 0:
        raise PotentialError("Positions must be a non-empty one-dimensional array")
    if len(phi) > 1 and np.min(np.abs(np.diff(np.sort(phi)))) == 0:
        raise PotentialError(
            "Coincident ion positions: the Coulomb energy is singular"
        )
    return phi


class ReducedPotential(object):

    """ReducedPotential

    Total potential of the chain in reduced units: positions are phases
    phi_j = k x_j, energies are in units of hbar*kappa. An optional uniform
    tilt force f (in units of hbar*kappa*k) adds -f*sum(phi) to the
    potential.

    | Args:
    |   params (SystemParams): the system parameters
    |   tilt (Optional[float]): uniform force applied to every ion, in
    |                           reduced units. Default is 0.

    """

    def __init__(self, params, tilt=0.0):

        self.params = params
        self.scales = derived_scales(params)
        self.n = params.n_ions
        self.tilt = float(tilt)

        self.a_trap = self.scales.trap
        self.a_coul = self.scales.coulomb
        self.phi0 = self.scales.phase_offset
        self.eta2 = (params.eta / params.kappa) ** 2
        self.coop = params.cooperativity
        self.dc = params.delta_c / params.kappa

    def bunching(self, phi):
        return np.mean(np.cos(phi) ** 2)

    def detuning(self, phi):
        """Effective detuning in units of kappa"""
        return self.dc - self.coop * self.bunching(phi)

    def photon_number(self, phi):
        return self.eta2 / (1.0 + self.detuning(phi) ** 2)

    def _pairs(self, phi):
        # Signed separations and |r|^-3 with a zero diagonal
        dphi = phi[:, None] - phi[None, :]
        with np.errstate(divide="ignore"):
            inv3 = np.abs(dphi) ** -3.0
        np.fill_diagonal(inv3, 0.0)
        return dphi, inv3

    def ion_energy(self, phi):
        phi = _check_positions(phi)
        e = 0.5 * self.a_trap * np.sum((phi - self.phi0) ** 2)
        if self.n > 1:
            iu = np.triu_indices(self.n, 1)
            e += self.a_coul * np.sum(1.0 / np.abs(phi[iu[0]] - phi[iu[1]]))
        return e

    def cavity_energy(self, phi):
        return -self.eta2 * np.arctan(self.detuning(phi))

    def energy(self, phi):
        """Total reduced energy, tilt included"""
        return self.ion_energy(phi) + self.cavity_energy(phi) - self.tilt * np.sum(phi)

    def ion_gradient(self, phi):
        phi = _check_positions(phi)
        g = self.a_trap * (phi - self.phi0)
        if self.n > 1:
            dphi, inv3 = self._pairs(phi)
            g -= self.a_coul * np.sum(dphi * inv3, axis=1)
        return g

    def _cavity_terms(self, phi):
        # dB/dphi_j and the prefactor dV_cav/dB
        delta = self.detuning(phi)
        dB = -np.sin(2 * phi) / self.n
        h = self.eta2 * self.coop / (1.0 + delta ** 2)
        return delta, dB, h

    def cavity_gradient(self, phi):
        _, dB, h = self._cavity_terms(phi)
        return h * dB

    def gradient(self, phi):
        """Gradient of the total reduced energy, tilt included"""
        return self.ion_gradient(phi) + self.cavity_gradient(phi) - self.tilt

    def ion_hessian(self, phi):
        phi = _check_positions(phi)
        H = np.identity(self.n) * self.a_trap
        if self.n > 1:
            _, inv3 = self._pairs(phi)
            H += 2 * self.a_coul * (np.diag(np.sum(inv3, axis=1)) - inv3)
        return H

    def cavity_hessian(self, phi, fixed_photon_number=False):
        """Hessian of the cavity potential. The local part is diagonal; the
        global part, a rank one term along dB/dphi, comes from the
        dependence of the photon number on B_N and is left out with
        fixed_photon_number=True."""
        delta, dB, h = self._cavity_terms(phi)
        H = np.diag(-2 * h * np.cos(2 * phi) / self.n)
        if not fixed_photon_number:
            glob = 2 * self.eta2 * self.coop ** 2 * delta / (1.0 + delta ** 2) ** 2
            H += glob * np.outer(dB, dB)
        return H

    def hessian(self, phi, fixed_photon_number=False):
        H = self.ion_hessian(phi) + self.cavity_hessian(phi, fixed_photon_number)
        # Exact symmetry
        return 0.5 * (H + H.T)


def _reduced(params, positions):
    rp = ReducedPotential(params)
    return rp, _check_positions(rp.scales.to_phase(positions))


def bunching(positions, k):
    """Bunching parameter B_N = sum_j cos^2(k x_j) / N

    | Args:
    |   positions (np.ndarray): ion positions, m
    |   k (float): cavity wavenumber, 1/m

    | Returns:
    |   B (float): the bunching parameter, in [0, 1]

    """
    positions = np.asarray(positions, dtype=float)
    if positions.size == 0:
        raise PotentialError("Bunching parameter of an empty chain")
    return float(np.mean(np.cos(k * positions) ** 2))


def effective_detuning(params, bunching):
    """Effective detuning Delta_c - N U0 B_N, rad/s"""
    if not (0.0 <= bunching <= 1.0):
        raise PotentialError("Bunching parameter out of [0, 1]: {0}".format(bunching))
    return params.delta_c - params.n_ions * params.u0 * bunching


def mean_photon_number(params, delta_eff):
    """Mean intracavity photon number eta^2/(kappa^2 + Delta_eff^2). Values
    below one mark the quantum regime, where the mean-field treatment is
    not reliable (see ChainState.quantum_regime)."""
    return params.eta ** 2 / (params.kappa ** 2 + delta_eff ** 2)


def cavity_potential(params, positions):
    """Mean-field cavity potential -(hbar eta^2/kappa) arctan(Delta_eff/kappa),
    in J"""
    rp, phi = _reduced(params, positions)
    return float(rp.scales.from_reduced_energy(rp.cavity_energy(phi)))


def ion_potential(params, positions):
    """Trap plus Coulomb energy of the ions, in J"""
    rp, phi = _reduced(params, positions)
    return float(rp.scales.from_reduced_energy(rp.ion_energy(phi)))


def total_gradient(params, positions):
    """Analytic gradient of V = V_ion + V_cav with respect to the ion
    positions, J/m"""
    rp, phi = _reduced(params, positions)
    return rp.gradient(phi) * rp.scales.energy * rp.scales.wavenumber


def total_hessian(params, positions, fixed_photon_number=False):
    """Analytic Hessian of V, J/m^2.

    | Args:
    |   params (SystemParams): the system parameters
    |   positions (np.ndarray): ion positions, m
    |   fixed_photon_number (Optional[bool]): if True, the photon number is
    |                                         held at its value for these
    |                                         positions, dropping the global
    |                                         rank one term. Default is False.

    | Returns:
    |   H (np.ndarray): symmetric N x N matrix of second derivatives

    """
    rp, phi = _reduced(params, positions)
    H = rp.hessian(phi, fixed_photon_number=fixed_photon_number)
    return H * rp.scales.energy * rp.scales.wavenumber ** 2


def single_ion_profile(params, x):
    """Cavity potential (J) felt by one ion at positions x with the other
    N-1 ions contributing their mean share of the bunching, i.e. the shape
    of V_cav for a uniform configuration with B_N = cos^2(kx). It is
    sinusoidal for |C| < 1 and flattens away from the minima for |C| > 1."""
    x = np.asarray(x, dtype=float)
    rp = ReducedPotential(params)
    delta = rp.dc - rp.coop * np.cos(params.k * x) ** 2
    return -rp.eta2 * np.arctan(delta) * rp.scales.energy / params.n_ions


@dataclass(frozen=True, eq=False)
class ChainState(object):

    """ChainState

    An ion configuration together with the cavity observables it produces.

    | Args:
    |   positions (np.ndarray): ion positions, m, ascending
    |   bunching (float): bunching parameter B_N
    |   delta_eff (float): effective detuning, rad/s
    |   photon_number (float): mean intracavity photon number
    |   energy (float): total potential V, J (any tilt excluded)
    |   is_local_min (bool): whether the Hessian of V is positive definite

    """

    positions: np.ndarray
    bunching: float
    delta_eff: float
    photon_number: float
    energy: float
    is_local_min: bool

    @classmethod
    def from_positions(cls, params, positions, is_local_min=None, rtol=1e-10):
        """Build a fully populated state from a set of positions (m). If
        is_local_min is None it is decided from the Hessian: the smallest
        eigenvalue must exceed rtol times the largest in magnitude."""

        positions = np.sort(np.asarray(positions, dtype=float))
        rp, phi = _reduced(params, positions)

        if is_local_min is None:
            evals = np.linalg.eigvalsh(rp.hessian(phi))
            is_local_min = bool(evals[0] > rtol * np.max(np.abs(evals)))

        B = rp.bunching(phi)
        d_eff = effective_detuning(params, B)
        energy = rp.ion_energy(phi) + rp.cavity_energy(phi)

        return cls(
            positions=positions,
            bunching=float(B),
            delta_eff=float(d_eff),
            photon_number=float(mean_photon_number(params, d_eff)),
            energy=float(rp.scales.from_reduced_energy(energy)),
            is_local_min=bool(is_local_min),
        )

    @property
    def n_ions(self):
        return len(self.positions)

    @property
    def quantum_regime(self):
        """True when the mean photon number is below one"""
        return self.photon_number < 1.0

    def central_position(self):
        """Position of the central ion, or of the midpoint of the two central
        ions for an even chain"""
        n = self.n_ions
        if n % 2 == 1:
            return self.positions[n // 2]
        return 0.5 * (self.positions[n // 2 - 1] + self.positions[n // 2])

    def mirrored(self, params):
        """The state reflected through the trap centre"""
        x = 2 * params.trap_center_offset - self.positions[::-1]
        return ChainState.from_positions(params, x, is_local_min=self.is_local_min)

    def check_invariants(self, params, rtol=1e-12):
        """Return a list of descriptions of violated invariants (empty if the
        state is consistent)"""

        errs = []
        if np.any(np.diff(self.positions) <= 0):
            errs.append("positions are not strictly increasing")
        B = bunching(self.positions, params.k)
        if abs(B - self.bunching) > rtol * max(abs(B), 1e-300):
            errs.append("stored bunching {0} != {1}".format(self.bunching, B))
        if not (0.0 <= self.bunching <= 1.0):
            errs.append("bunching out of [0, 1]")
        n = mean_photon_number(params, self.delta_eff)
        if abs(n - self.photon_number) > 1e-10 * max(n, 1e-300):
            errs.append("stored photon number {0} != {1}".format(self.photon_number, n))
        return errs

    def to_atoms(self, symbol="Yb"):
        """Export the chain as an ase.Atoms object, ions along the x axis
        (positions in Angstrom), cavity observables stored in info"""
        pos = np.zeros((self.n_ions, 3))
        pos[:, 0] = self.positions * 1e10
        return Atoms(
            symbols=[symbol] * self.n_ions,
            positions=pos,
            info={
                "bunching": self.bunching,
                "delta_eff": self.delta_eff,
                "photon_number": self.photon_number,
                "energy": self.energy,
                "is_local_min": self.is_local_min,
            },
        )
