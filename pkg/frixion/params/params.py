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
params.py

Definition of the SystemParams record and of the reduced units.

Internally every calculation runs with positions expressed as phases
phi = k*x (radians), energies in units of hbar*kappa and rates in units of
kappa. The conversion factors all live in UnitScales, so that SystemParams
stays the single source of truth for SI values.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import numpy as np
import scipy.constants as cnst
from dataclasses import dataclass, field, replace

from frixion.data import ion_mass, ion_charge


class ParamsError(ValueError):
    pass


def _as_rates(seq, name):
    seq = tuple(float(s) for s in np.atleast_1d(seq))
    if len(seq) == 0:
        raise ParamsError("{0} can not be empty".format(name))
    if any(s < 0 or not np.isfinite(s) for s in seq):
        raise ParamsError("{0} must be finite and non-negative".format(name))
    return seq


def bose_occupation(freqs, temperature):
    """Mean thermal occupation of oscillators of angular frequency freqs
    (rad/s) at the given temperature (K). Zero temperature gives zero."""

    freqs = np.asarray(freqs, dtype=float)
    if temperature <= 0:
        return np.zeros(freqs.shape)
    x = cnst.hbar * freqs / (cnst.k * temperature)
    with np.errstate(over="ignore"):
        return 1.0 / np.expm1(x)


@dataclass(frozen=True)
class SystemParams(object):

    """SystemParams

    Immutable record of every physical constant and drive parameter of the
    system. All values are in SI units, with rates as angular frequencies.

    | Args:
    |   n_ions (int): number of ions N
    |   mass (float): ion mass in kg
    |   charge (float): ion charge in Coulomb
    |   wavelength (float): cavity wavelength in m
    |   trap_freq (float): axial trap frequency in rad/s
    |   kappa (float): cavity half-linewidth in rad/s
    |   delta_c (float): pump-cavity detuning in rad/s
    |   u0 (float): light shift per photon g^2/Delta_0 in rad/s, carrying the
    |               sign of Delta_0
    |   eta (float): pump amplitude in rad/s. Its phase is chosen so that
    |                the intracavity mean field is real, so only the
    |                non-negative modulus is stored.
    |   trap_center_offset (float): position of the trap centre in m with
    |                               respect to an antinode of the cavity
    |                               field. 0 places the trap centre on a
    |                               maximum of the cavity potential for
    |                               C > 0, a quarter wavelength does the
    |                               same for C < 0.
    |   gamma_modes (tuple): damping rate of each normal mode, rad/s. A
    |                        single value applies to all modes.
    |   bath_occupation (tuple): mean occupation of the reservoir of each
    |                            mode. A single value applies to all modes.
    |   bath_temperature (float): if not None, temperature (K) of the mode
    |                             reservoir; bath occupations are then
    |                             computed for each mode frequency and
    |                             bath_occupation is ignored.

    """

    n_ions: int
    mass: float
    charge: float
    wavelength: float
    trap_freq: float
    kappa: float
    delta_c: float = 0.0
    u0: float = 0.0
    eta: float = 0.0
    trap_center_offset: float = 0.0
    gamma_modes: tuple = (0.0,)
    bath_occupation: tuple = (0.0,)
    bath_temperature: float = field(default=None)

    def __post_init__(self):

        if int(self.n_ions) != self.n_ions or self.n_ions < 1:
            raise ParamsError("n_ions must be a positive integer")
        object.__setattr__(self, "n_ions", int(self.n_ions))

        for name in ("mass", "wavelength", "trap_freq", "kappa"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ParamsError("{0} must be positive, got {1}".format(name, val))
        if self.charge == 0 or not np.isfinite(self.charge):
            raise ParamsError("charge must be finite and non-zero")
        if not (np.isfinite(self.eta) and self.eta >= 0):
            raise ParamsError("eta must be non-negative (its phase is fixed)")
        for name in ("delta_c", "u0", "trap_center_offset"):
            if not np.isfinite(getattr(self, name)):
                raise ParamsError("{0} must be finite".format(name))
        if self.bath_temperature is not None and self.bath_temperature < 0:
            raise ParamsError("bath_temperature can not be negative")

        object.__setattr__(
            self, "gamma_modes", _as_rates(self.gamma_modes, "gamma_modes")
        )
        object.__setattr__(
            self, "bath_occupation", _as_rates(self.bath_occupation, "bath_occupation")
        )

    @classmethod
    def from_species(cls, species, n_ions, wavelength, trap_freq, kappa, **kwargs):
        """Create a SystemParams record for a given ion species, e.g.
        '174Yb'. Any other field can be passed as a keyword argument."""
        return cls(
            n_ions=n_ions,
            mass=ion_mass(species),
            charge=ion_charge(species),
            wavelength=wavelength,
            trap_freq=trap_freq,
            kappa=kappa,
            **kwargs
        )

    @classmethod
    def yb174_reference(cls, n_ions=11, cooperativity=0.0, eta=0.0, delta_c=0.0,
                        **kwargs):
        """Reference parameters: 174Yb+ ions in a 369 nm cavity with
        kappa = 2pi x 0.2 MHz, trap frequency 2pi x 1.12 MHz for 11 ions
        (scaled to n_ions with scale_to_n). eta and delta_c are given in
        units of kappa.

        The mass and charge use the rounded constants u = 1.66e-27 kg,
        e = 1.6e-19 C and eps0 = 8.85e-12 F/m. With these the bare 11 ion
        chain has its central spacing at 2d/lambda = 7.3507. The charge is
        rescaled so that the Coulomb constant built from scipy's eps0
        matches the rounded one."""

        kappa = 2 * np.pi * 0.2e6
        base = cls(
            n_ions=11,
            mass=174 * 1.66e-27,
            charge=1.6e-19 * np.sqrt(cnst.epsilon_0 / 8.85e-12),
            wavelength=369e-9,
            trap_freq=2 * np.pi * 1.12e6,
            kappa=kappa,
            **kwargs
        )
        if n_ions != 11:
            base = scale_to_n(base, 11, n_ions)
        return base.with_cooperativity(cooperativity, auto_offset=True).with_drive(
            eta=eta * kappa, delta_c=delta_c * kappa
        )

    @property
    def k(self):
        """Cavity wavenumber, 1/m"""
        return 2 * np.pi / self.wavelength

    @property
    def cooperativity(self):
        """C = N U0 / kappa"""
        return self.n_ions * self.u0 / self.kappa

    @property
    def char_length(self):
        """Characteristic length L = (q^2/(4 pi eps0 m omega^2))^(1/3), m"""
        return (
            self.charge ** 2
            / (4 * np.pi * cnst.epsilon_0 * self.mass * self.trap_freq ** 2)
        ) ** (1.0 / 3.0)

    @property
    def force_unit(self):
        """m omega^2 L, the natural unit of force of the chain, N"""
        return self.mass * self.trap_freq ** 2 * self.char_length

    def with_cooperativity(self, C, auto_offset=False):
        """Copy with u0 set to give cooperativity C. With auto_offset the
        trap centre is moved to a maximum of the cavity potential (0 for
        C >= 0, a quarter wavelength for C < 0)."""
        kw = {"u0": C * self.kappa / self.n_ions}
        if auto_offset:
            kw["trap_center_offset"] = 0.0 if C >= 0 else self.wavelength / 4.0
        return replace(self, **kw)

    def with_drive(self, eta=None, delta_c=None):
        """Copy with a different pump amplitude and/or detuning (rad/s)"""
        kw = {}
        if eta is not None:
            kw["eta"] = eta
        if delta_c is not None:
            kw["delta_c"] = delta_c
        return replace(self, **kw)

    def mode_damping(self, n_modes=None):
        """Array of the mode damping rates Gamma_n (rad/s)"""
        return self._broadcast(self.gamma_modes, n_modes, "gamma_modes")

    def mode_bath_occupation(self, freqs):
        """Array of the reservoir occupations N_n for modes of angular
        frequencies freqs"""
        freqs = np.asarray(freqs, dtype=float)
        if self.bath_temperature is not None:
            return bose_occupation(freqs, self.bath_temperature)
        return self._broadcast(self.bath_occupation, len(freqs), "bath_occupation")

    def _broadcast(self, seq, n_modes, name):
        n_modes = self.n_ions if n_modes is None else n_modes
        if len(seq) == 1:
            return np.full(n_modes, seq[0])
        elif len(seq) == n_modes:
            return np.array(seq)
        raise ParamsError(
            "{0} has {1} values for {2} modes".format(name, len(seq), n_modes)
        )


@dataclass(frozen=True)
class UnitScales(object):

    """UnitScales

    Conversion factors between SI values and the reduced units. Positions
    are phases k*x, energies are in units of hbar*kappa and rates in units of
    kappa.

    Derived constants of the reduced potential:

    | trap (float): trap stiffness, m omega^2/(hbar kappa k^2)
    | coulomb (float): Coulomb strength, q^2 k/(4 pi eps0 hbar kappa)
    | recoil (float): hbar k^2/(m kappa), so that a reduced Hessian
    |                 eigenvalue h gives a frequency kappa*sqrt(recoil*h)
    | phase_offset (float): trap centre as a phase

    """

    length: float
    energy: float
    frequency: float
    wavenumber: float
    force: float
    trap: float
    coulomb: float
    recoil: float
    phase_offset: float

    def to_phase(self, x):
        return np.asarray(x, dtype=float) * self.wavenumber

    def from_phase(self, phi):
        return np.asarray(phi, dtype=float) / self.wavenumber

    def to_reduced_energy(self, E):
        return np.asarray(E, dtype=float) / self.energy

    def from_reduced_energy(self, e):
        return np.asarray(e, dtype=float) * self.energy

    def to_reduced_rate(self, w):
        return np.asarray(w, dtype=float) / self.frequency

    def from_reduced_rate(self, w):
        return np.asarray(w, dtype=float) * self.frequency

    def to_reduced_force(self, F):
        """SI force (N) to reduced force (hbar kappa k)"""
        return np.asarray(F, dtype=float) / (self.energy * self.wavenumber)

    def from_reduced_force(self, f):
        return np.asarray(f, dtype=float) * self.energy * self.wavenumber


def derived_scales(params):
    """Conversion factors to and from the reduced units for a set of
    parameters.

    | Args:
    |   params (SystemParams): the system parameters

    | Returns:
    |   scales (UnitScales): the conversion factors

    """

    hk = cnst.hbar * params.kappa
    k = params.k

    return UnitScales(
        length=params.char_length,
        energy=hk,
        frequency=params.kappa,
        wavenumber=k,
        force=params.force_unit,
        trap=params.mass * params.trap_freq ** 2 / (hk * k ** 2),
        coulomb=params.charge ** 2 * k / (4 * np.pi * cnst.epsilon_0 * hk),
        recoil=cnst.hbar * k ** 2 / (params.mass * params.kappa),
        phase_offset=k * params.trap_center_offset,
    )


def _log_scaling(n):
    return np.sqrt(np.log(n)) / n


def scale_to_n(base, base_n, target_n):
    """Scale parameters to a different number of ions following the
    thermodynamic-limit prescription: U0 ~ 1/N keeps the cooperativity
    fixed, omega ~ sqrt(log N)/N keeps the central interparticle distance
    approximately fixed.

    | Args:
    |   base (SystemParams): parameters defined for base_n ions
    |   base_n (int): number of ions the base parameters refer to
    |   target_n (int): number of ions to scale to

    | Returns:
    |   scaled (SystemParams): parameters for target_n ions

    """

    if base_n < 2 or target_n < 2:
        raise ParamsError(
            "Thermodynamic scaling needs a chain, got N = {0} -> {1}".format(
                base_n, target_n
            )
        )

    if target_n == base_n:
        return replace(base, n_ions=int(target_n))

    return replace(
        base,
        n_ions=int(target_n),
        u0=base.u0 * base_n / target_n,
        trap_freq=base.trap_freq * _log_scaling(target_n) / _log_scaling(base_n),
    )
