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
Ion data

Isotope masses and charge states of ions commonly used in trapped-ion
experiments. Masses are in unified atomic mass units, charges in units of the
elementary charge.
"""

import re
import json
import pkgutil
import warnings
import scipy.constants as cnst
from ase.data import atomic_numbers, atomic_masses

try:
    _ion_data = pkgutil.get_data("frixion", "data/ions.json").decode("utf-8")
    _ion_data = json.loads(_ion_data)
except IOError:
    _ion_data = None


def _get_ion_data():

    if _ion_data is not None:
        return _ion_data
    else:
        raise RuntimeError(
            "Ion data not available. Something may be "
            "wrong with this installation of Frixion"
        )


def _el_iso(sym):
    """Utility function: split isotope and element in conventional
    representation (e.g. '174Yb').
    """

    match = re.findall("^([0-9]*)([A-Za-z]+)$", sym.strip())
    if len(match) != 1:
        raise ValueError("Invalid isotope symbol '{0}'".format(sym))

    el = match[0][1].capitalize()
    if el not in atomic_numbers:
        raise ValueError("Invalid element symbol '{0}'".format(el))

    iso = match[0][0]
    if iso == "":
        ion_data = _get_ion_data()
        if el not in ion_data:
            raise ValueError(
                "No default isotope known for element {0}, please "
                "specify one".format(el)
            )
        iso = str(ion_data[el]["iso"])

    return el, iso


def ion_species(sym):
    """Normalised isotope symbol, e.g. 'yb' -> '174Yb'"""
    el, iso = _el_iso(sym)
    return "{0}{1}".format(iso, el)


def ion_mass(sym, si=True):
    """Mass of an ion

    Return the mass of the given isotope. The electron mass is neglected.
    Isotopes missing from the tables fall back on ASE's standard atomic
    weight, with a warning.

    | Args:
    |   sym (str):  isotope symbol, e.g. '174Yb'. Without a mass number the
    |               default isotope for the element is used.
    |   si (bool):  if True (default) return the mass in kg, otherwise in
    |               unified atomic mass units

    | Returns:
    |   m (float):  ion mass
    """

    el, iso = _el_iso(sym)
    ion_data = _get_ion_data()

    try:
        m = ion_data[el]["masses"][iso]
    except KeyError:
        m = atomic_masses[atomic_numbers[el]]
        warnings.warn(
            "No isotope mass for {0}{1}, using the standard atomic "
            "weight {2:.4f} u".format(iso, el, m)
        )

    if si:
        m *= cnst.physical_constants["atomic mass constant"][0]

    return m


def ion_charge(sym, si=True):
    """Charge of an ion

    | Args:
    |   sym (str):  isotope or element symbol
    |   si (bool):  if True (default) return the charge in Coulomb, otherwise
    |               in units of the elementary charge

    | Returns:
    |   q (float):  ion charge
    """

    el, _ = _el_iso(sym)
    ion_data = _get_ion_data()

    z = ion_data.get(el, {}).get("charge", 1)

    return z * cnst.e if si else float(z)
