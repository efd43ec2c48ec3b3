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
Data on the ion species commonly trapped in Paul traps - isotope masses and
charge states.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import

from frixion.data.ions import ion_mass, ion_charge, ion_species
