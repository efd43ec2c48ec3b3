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
Normal modes, phonon gap and classification of the friction phases of the
chain (sliding, pinned, bistable), with the sweeps building phase diagrams.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import

from frixion.phases.modes import NormalModes, ModesError, normal_modes
from frixion.phases.phases import (
    Phases,
    PhaseOptions,
    PhasePoint,
    AXES,
    apply_axis,
    pinned_seed,
    classify_point,
    continuation_scan,
    sweep_phase_diagram,
    gap_scan,
    critical_eta,
    find_eta_for_bunching,
    kink_estimate,
    kink_scaling,
)
