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
modes.py

Normal modes of the chain in the mean-field potential.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import numpy as np
from dataclasses import dataclass

from frixion.potential import ReducedPotential


class ModesError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class NormalModes(object):

    """NormalModes

    | Args:
    |   frequencies (np.ndarray): mode angular frequencies omega_n, rad/s,
    |                             ascending
    |   mode_matrix (np.ndarray): orthogonal N x N matrix, column n holding
    |                             the displacement pattern M_jn of mode n

    """

    frequencies: np.ndarray
    mode_matrix: np.ndarray

    @property
    def gap(self):
        """Phonon gap, the lowest mode frequency (rad/s)"""
        return float(self.frequencies[0])

    @property
    def n_modes(self):
        return len(self.frequencies)


def normal_modes(params, state, fixed_photon_number=False, rtol=1e-10):
    """Normal modes of small oscillations around an equilibrium, from the
    eigendecomposition of the Hessian of V divided by the ion mass.

    Each column of the mode matrix is normalised and its sign is fixed so
    that its largest component is positive.

    | Args:
    |   params (SystemParams): the system parameters
    |   state (ChainState): a stable equilibrium
    |   fixed_photon_number (Optional[bool]): diagonalize the Hessian at
    |                                         fixed intracavity photon
    |                                         number (cavity fluctuations
    |                                         set to zero, no global
    |                                         term). Default is False.
    |   rtol (Optional[float]): negative eigenvalues smaller than rtol times
    |                           the largest one in magnitude are taken as
    |                           zero. Default is 1e-10.

    | Returns:
    |   modes (NormalModes): frequencies and mode matrix

    | Raises:
    |   ModesError: if the Hessian has a negative eigenvalue

    """

    rp = ReducedPotential(params)
    phi = rp.scales.to_phase(state.positions)
    evals, evecs = np.linalg.eigh(rp.hessian(phi, fixed_photon_number=fixed_photon_number))

    if evals[0] < -rtol * np.max(np.abs(evals)):
        raise ModesError(
            "Negative Hessian eigenvalue {0:.4e} hbar*kappa*k^2: "
            "the state is not a local minimum".format(evals[0])
        )
    evals = np.clip(evals, 0.0, None)

    cols = np.arange(len(evals))
    evecs = evecs * np.sign(evecs[np.argmax(np.abs(evecs), axis=0), cols])

    freqs = rp.scales.from_reduced_rate(np.sqrt(rp.scales.recoil * evals))

    return NormalModes(frequencies=freqs, mode_matrix=evecs)
