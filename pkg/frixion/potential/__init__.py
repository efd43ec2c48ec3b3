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
Total potential of an ion chain in a driven cavity: Coulomb crystal in a
harmonic trap plus the nonlinear, globally deformable cavity potential, with
analytic gradients and Hessians and the cavity observables (bunching,
effective detuning, photon number).
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import

from frixion.potential.potential import (
    ChainState,
    ReducedPotential,
    PotentialError,
    bunching,
    effective_detuning,
    mean_photon_number,
    cavity_potential,
    ion_potential,
    total_gradient,
    total_hessian,
    single_ion_profile,
)
