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
Linearized cavity-phonon fluctuations: drift matrix and dynamical
stability, steady state covariance and temperatures, output spectrum.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import

from frixion.params import bose_occupation as thermal_occupation
from frixion.fluctuations.fluctuations import (
    FluctuationModel,
    CovarianceResult,
    SpectrumResult,
    Stability,
    FluctuationError,
    mode_couplings,
    drift_matrix,
    fluctuation_model,
    stability,
    symplectic_eigenvalues,
    mode_temperatures,
    steady_covariance,
    undamped_modes,
    output_spectrum,
    stability_map,
)
