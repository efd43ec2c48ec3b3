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
Physical parameters of an ion chain in a driven optical cavity, the reduced
unit system used internally by all calculations and the thermodynamic-limit
scaling of parameters with the number of ions.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import

from frixion.params.params import (
    SystemParams,
    UnitScales,
    ParamsError,
    derived_scales,
    scale_to_n,
    bose_occupation,
)
