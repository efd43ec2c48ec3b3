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
config.py

Parser for the run configuration files of the frixion command line tool.

A configuration file is made of [section] headers followed by
'key = value' lines; everything after a '#' is a comment. Physical values
carry their unit after the number:

    [run]
    command = phase-diagram

    [params]
    species = 174Yb
    n_ions = 11
    wavelength = 369 nm
    trap_freq = 1.12 MHz
    kappa = 0.2 MHz
    delta_c = 0 kappa
    cooperativity = 0.5

    [grid]
    axis = eta
    min = 10 kappa
    max = 1000 kappa
    count = 50
    spacing = log

Frequencies in Hz, kHz, MHz and GHz are cyclic and converted to angular
frequencies; 'kappa' measures rates in units of the cavity linewidth and
'lambda' lengths in units of the wavelength. Only [run] command is
required; every other key takes the default listed in _SCHEMA.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import re
import numpy as np
import scipy.constants as cnst
from dataclasses import dataclass, field

from frixion.params import SystemParams, ParamsError
from frixion.data import ion_mass, ion_charge
from frixion.equilibrium import MinimizeOptions, SeedStrategy
from frixion.phases import PhaseOptions, AXES


class ConfigError(ValueError):
    def __init__(self, msg, lineno=None):
        if lineno is not None:
            msg = "line {0}: {1}".format(lineno, msg)
        super(ConfigError, self).__init__(msg)
        self.lineno = lineno


COMMANDS = (
    "equilibrium",
    "phase-diagram",
    "modes",
    "fluctuations",
    "spectrum",
    "kink-scaling",
)

_TWOPI = 2 * np.pi
_UNITS = {
    "rate": {
        "rad/s": 1.0,
        "Hz": _TWOPI,
        "kHz": _TWOPI * 1e3,
        "MHz": _TWOPI * 1e6,
        "GHz": _TWOPI * 1e9,
        "kappa": None,
    },
    "length": {"m": 1.0, "um": 1e-6, "nm": 1e-9, "lambda": None},
    "mass": {"kg": 1.0, "u": cnst.physical_constants["atomic mass constant"][0]},
    "charge": {"C": 1.0, "e": cnst.e},
    "temperature": {"K": 1.0, "mK": 1e-3, "uK": 1e-6, "nK": 1e-9},
}

# Every key of every section: (kind, default). Kinds are the unit
# families above or one of int, float, bool, str, rate_list, float_list
# and grid_value (unit depending on the grid axis).
_SCHEMA = {
    "run": {"command": ("str", None)},
    "params": {
        "species": ("str", "174Yb"),
        "n_ions": ("int", 11),
        "mass": ("mass", None),
        "charge": ("charge", None),
        "wavelength": ("length", (369.0, "nm")),
        "trap_freq": ("rate", (1.12, "MHz")),
        "kappa": ("rate", (0.2, "MHz")),
        "delta_c": ("rate", (0.0, "kappa")),
        "u0": ("rate", None),
        "cooperativity": ("float", None),
        "eta": ("rate", (0.0, "kappa")),
        "trap_center_offset": ("length", "auto"),
        "gamma_modes": ("rate_list", [(0.0, "kappa")]),
        "bath_occupation": ("float_list", [0.0]),
        "bath_temperature": ("temperature", None),
    },
    "grid": {
        "axis": ("str", None),
        "min": ("grid_value", None),
        "max": ("grid_value", None),
        "count": ("int", 1),
        "spacing": ("str", "linear"),
        "values": ("grid_list", None),
    },
    "solver": {
        "gradient_tolerance": ("float", 1e-9),
        "max_iterations": ("int", 5000),
        "newton_iterations": ("int", 50),
        "perturbation_scale": ("float", 0.01),
        "seed_strategy": ("str", SeedStrategy.BARE_CHAIN),
        "random_seed": ("int", 0),
        "hessian_rtol": ("float", 1e-10),
    },
    "phases": {
        "order_tolerance": ("float", 1e-3),
        "force_tolerance": ("float", 1e-6),
        "energy_tolerance": ("float", 1e-9),
        "position_tolerance": ("float", 1e-3),
        "gap_tolerance": ("float", 0.02),
        "fluctuations": ("bool", True),
    },
    "spectrum": {
        "nu_min": ("rate", None),
        "nu_max": ("rate", None),
        "count": ("int", 2001),
        "target_bunching": ("float", None),
        "direction": ("str", "forward"),
    },
    "output": {
        "path": ("str", None),
        "format": ("str", "csv"),
        "precision": ("int", 10),
    },
}

_section_re = re.compile(r"^\[\s*([a-z_]+)\s*\]$")
_entry_re = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.*)$")
_quantity_re = re.compile(r"^([-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?)\s*(\S*)$")


@dataclass(frozen=True)
class GridAxis(object):

    """GridAxis

    A sweep axis. Values of eta and delta_c are in rad/s.

    | Args:
    |   name (str): one of 'eta', 'C', 'delta_c', 'N'
    |   vmin, vmax (float): axis range
    |   count (int): number of points
    |   spacing (str): 'linear' or 'log'
    |   explicit (tuple): explicit list of values, overriding the range

    """

    name: str
    vmin: float = None
    vmax: float = None
    count: int = 1
    spacing: str = "linear"
    explicit: tuple = None

    def values(self):
        if self.explicit is not None:
            v = np.array(self.explicit, dtype=float)
        elif self.count == 1:
            v = np.array([self.vmin], dtype=float)
        elif self.spacing == "log":
            v = np.geomspace(self.vmin, self.vmax, self.count)
        else:
            v = np.linspace(self.vmin, self.vmax, self.count)
        if self.name == "N":
            return np.round(v).astype(int)
        return v


@dataclass(frozen=True)
class SpectrumConfig(object):
    nu_min: float = None
    nu_max: float = None
    count: int = 2001
    target_bunching: float = None
    direction: str = "forward"

    def nu_grid(self, params, mode_freqs=None):
        """Frequencies of the spectrum, rad/s. The default range reaches
        1.2 times the highest of mode_freqs on either side of the pump, or
        2.5 trap frequencies when no modes are given."""
        if mode_freqs is not None and len(mode_freqs) > 0:
            edge = 1.2 * np.max(mode_freqs)
        else:
            edge = 2.5 * params.trap_freq
        lo = -edge if self.nu_min is None else self.nu_min
        hi = edge if self.nu_max is None else self.nu_max
        return np.linspace(lo, hi, self.count)


@dataclass(frozen=True)
class OutputConfig(object):
    path: str = None
    format: str = "csv"
    precision: int = 10


@dataclass(frozen=True)
class RunConfig(object):

    """RunConfig

    A validated run configuration.

    | Args:
    |   command (str): one of COMMANDS
    |   params (SystemParams): the system parameters
    |   species (str): ion species, used to label exported structures
    |   auto_offset (bool): the trap offset follows the sign of C
    |   grids (tuple): GridAxis objects, in file order
    |   solver (MinimizeOptions): solver settings
    |   phases (PhaseOptions): classification settings
    |   spectrum (SpectrumConfig): spectrum settings
    |   output (OutputConfig): output settings

    """

    command: str
    params: SystemParams
    species: str = "174Yb"
    auto_offset: bool = True
    grids: tuple = ()
    solver: MinimizeOptions = field(default_factory=MinimizeOptions)
    phases: PhaseOptions = field(default_factory=PhaseOptions)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def grid(self, name):
        """The first grid along axis name, or None"""
        for g in self.grids:
            if g.name == name:
                return g
        return None


def _split_value(raw):
    return raw.split("#", 1)[0].strip()


def _parse_number(text, lineno, cast=float):
    try:
        return cast(text)
    except ValueError:
        raise ConfigError("malformed number '{0}'".format(text), lineno)


def _check_unit(unit, kind, lineno):
    if kind is None:
        if unit != "":
            raise ConfigError("unexpected unit '{0}' for a pure number".format(unit), lineno)
        return
    if unit not in _UNITS[kind]:
        raise ConfigError(
            "invalid unit '{0}' for a {1}, expected one of: {2}".format(
                unit, kind, ", ".join(_UNITS[kind])
            ),
            lineno,
        )


def _parse_quantity(text, kind, lineno):
    """(value, unit) pair for a physical quantity, unit checked against
    its family"""
    m = _quantity_re.match(text)
    if m is None:
        raise ConfigError("malformed quantity '{0}'".format(text), lineno)
    value, unit = float(m.group(1)), m.group(2)
    _check_unit(unit, kind, lineno)
    return value, unit


def _parse_bool(text, lineno):
    t = text.lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ConfigError("invalid boolean '{0}'".format(text), lineno)


def _parse_entry(kind, text, lineno):
    if kind == "str":
        return text
    if kind == "int":
        return _parse_number(text, lineno, int)
    if kind == "float":
        m = _quantity_re.match(text)
        if m is None or m.group(2) != "":
            raise ConfigError("malformed number '{0}'".format(text), lineno)
        return float(m.group(1))
    if kind == "bool":
        return _parse_bool(text, lineno)
    if kind == "rate_list":
        return [_parse_quantity(t.strip(), "rate", lineno) for t in text.split(",")]
    if kind == "float_list":
        return [_parse_quantity(t.strip(), None, lineno)[0] for t in text.split(",")]
    if kind in ("grid_value", "grid_list"):
        # Unit checked once the axis is known
        items = [_quantity_re.match(t.strip()) for t in text.split(",")]
        if any(m is None for m in items):
            raise ConfigError("malformed quantity '{0}'".format(text), lineno)
        vals = [(float(m.group(1)), m.group(2)) for m in items]
        return vals if kind == "grid_list" else vals[0]
    if kind == "length" and text == "auto":
        return "auto"
    return _parse_quantity(text, kind, lineno)


def _tokenize(text):
    """Split the text into a list of (section, {key: (value, lineno)},
    header lineno)"""

    blocks = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = _split_value(line)
        if line == "":
            continue
        m = _section_re.match(line)
        if m is not None:
            name = m.group(1)
            if name not in _SCHEMA:
                raise ConfigError("unknown section [{0}]".format(name), lineno)
            if name != "grid" and any(b[0] == name for b in blocks):
                raise ConfigError("repeated section [{0}]".format(name), lineno)
            blocks.append((name, {}, lineno))
            continue
        m = _entry_re.match(line)
        if m is None:
            raise ConfigError("can not parse '{0}'".format(line), lineno)
        if not blocks:
            raise ConfigError("entry outside of any section", lineno)
        section, entries, _ = blocks[-1]
        key, raw = m.group(1), m.group(2).strip()
        if key not in _SCHEMA[section]:
            raise ConfigError("unknown key '{0}' in [{1}]".format(key, section), lineno)
        if key in entries:
            raise ConfigError("repeated key '{0}'".format(key), lineno)
        entries[key] = (_parse_entry(_SCHEMA[section][key][0], raw, lineno), lineno)

    return blocks


class _Section(object):
    """Parsed values of a section with their line numbers, falling back to
    the defaults"""

    def __init__(self, name, entries, lineno):
        self.name = name
        self.entries = entries
        self.lineno = lineno

    def __contains__(self, key):
        return key in self.entries

    def get(self, key):
        if key in self.entries:
            return self.entries[key][0]
        return _SCHEMA[self.name][key][1]

    def line(self, key):
        return self.entries[key][1] if key in self.entries else self.lineno


def _to_si(q, kind, kappa=None, wavelength=None, lineno=None):
    value, unit = q
    if unit == "kappa":
        if kappa is None:
            raise ConfigError("kappa can not be measured in units of itself", lineno)
        return value * kappa
    if unit == "lambda":
        if wavelength is None:
            raise ConfigError("wavelength can not be measured in units of itself", lineno)
        return value * wavelength
    return value * _UNITS[kind][unit]


def _build_params(sec):

    kappa = _to_si(sec.get("kappa"), "rate", lineno=sec.line("kappa"))
    wavelength = _to_si(sec.get("wavelength"), "length", lineno=sec.line("wavelength"))

    def rate(key):
        return _to_si(sec.get(key), "rate", kappa, lineno=sec.line(key))

    try:
        species = sec.get("species")
        mass = ion_mass(species) if "mass" not in sec else _to_si(sec.get("mass"), "mass")
        charge = ion_charge(species) if "charge" not in sec else _to_si(
            sec.get("charge"), "charge"
        )
    except ValueError as e:
        raise ConfigError(str(e), sec.line("species"))

    n_ions = sec.get("n_ions")
    if "u0" in sec and "cooperativity" in sec:
        raise ConfigError("u0 and cooperativity can not both be set", sec.line("cooperativity"))
    if "cooperativity" in sec:
        u0 = sec.get("cooperativity") * kappa / n_ions
    elif "u0" in sec:
        u0 = rate("u0")
    else:
        u0 = 0.0

    offset = sec.get("trap_center_offset")
    auto = offset == "auto"
    if auto:
        offset = 0.0 if u0 >= 0 else wavelength / 4.0
    else:
        offset = _to_si(offset, "length", wavelength=wavelength)

    bath_T = sec.get("bath_temperature")
    if bath_T is not None:
        bath_T = _to_si(bath_T, "temperature")

    try:
        params = SystemParams(
            n_ions=n_ions,
            mass=mass,
            charge=charge,
            wavelength=wavelength,
            trap_freq=rate("trap_freq"),
            kappa=kappa,
            delta_c=rate("delta_c"),
            u0=u0,
            eta=rate("eta"),
            trap_center_offset=offset,
            gamma_modes=tuple(
                _to_si(q, "rate", kappa, lineno=sec.line("gamma_modes"))
                for q in sec.get("gamma_modes")
            ),
            bath_occupation=tuple(sec.get("bath_occupation")),
            bath_temperature=bath_T,
        )
    except ParamsError as e:
        raise ConfigError(str(e), sec.lineno)

    return params, auto


def _build_grid(sec, params):

    name = sec.get("axis")
    if name is None:
        raise ConfigError("missing required key 'axis' in [grid]", sec.lineno)
    if name not in AXES:
        raise ConfigError(
            "invalid grid axis '{0}', must be one of {1}".format(name, ", ".join(AXES)),
            sec.line("axis"),
        )
    kind = "rate" if name in ("eta", "delta_c") else None

    def convert(q, lineno):
        _check_unit(q[1], kind, lineno)
        return _to_si(q, kind, params.kappa, lineno=lineno) if kind else q[0]

    count = sec.get("count")
    if count < 1:
        raise ConfigError("grid count must be at least 1", sec.line("count"))
    spacing = sec.get("spacing")
    if spacing not in ("linear", "log"):
        raise ConfigError("spacing must be linear or log", sec.line("spacing"))

    if "values" in sec:
        vals = tuple(convert(q, sec.line("values")) for q in sec.get("values"))
        grid = GridAxis(name, explicit=vals, count=len(vals))
    else:
        for key in ("min", "max") if count > 1 else ("min",):
            if key not in sec:
                raise ConfigError(
                    "missing required key '{0}' in [grid]".format(key), sec.lineno
                )
        vmin = convert(sec.get("min"), sec.line("min"))
        vmax = convert(sec.get("max"), sec.line("max")) if "max" in sec else vmin
        if spacing == "log" and (vmin <= 0 or vmax <= 0):
            raise ConfigError("log spacing needs positive limits", sec.line("spacing"))
        grid = GridAxis(name, vmin, vmax, count, spacing)

    if name == "N":
        raw = np.array(grid.explicit if grid.explicit is not None else [grid.vmin, grid.vmax])
        key = "values" if grid.explicit is not None else "min"
        if np.any(raw != np.round(raw)):
            raise ConfigError("N grid values must be integers", sec.line(key))
        if np.any(raw < 2):
            raise ConfigError("N grid values must be at least 2", sec.line(key))
        if grid.explicit is None and count > 1 and grid.vmin >= grid.vmax:
            raise ConfigError("the N grid needs min < max", sec.line("max"))
        if np.any(np.diff(grid.values()) <= 0):
            raise ConfigError("the N grid must be strictly increasing", sec.line(key))
    if name == "eta" and np.any(np.diff(grid.values()) <= 0):
        raise ConfigError("the eta grid must be strictly increasing", sec.lineno)

    return grid


def _build_options(cls, sec, **extra):
    kw = {k: sec.get(k) for k in _SCHEMA[sec.name]}
    kw.update(extra)
    try:
        return cls(**kw)
    except ValueError as e:
        raise ConfigError(str(e), sec.lineno)


def parse_config(text):
    """Parse and validate the text of a configuration file.

    | Args:
    |   text (str): the file contents

    | Returns:
    |   config (RunConfig): the validated configuration

    | Raises:
    |   ConfigError: for unknown sections or keys, malformed numbers,
    |                invalid units, missing or inconsistent values. The
    |                message and the lineno attribute give the offending
    |                line.

    """

    blocks = _tokenize(text)
    sections = {}
    grids = []
    for name, entries, lineno in blocks:
        if name == "grid":
            grids.append(_Section(name, entries, lineno))
        else:
            sections[name] = _Section(name, entries, lineno)
    for name in _SCHEMA:
        if name not in sections and name != "grid":
            sections[name] = _Section(name, {}, 0)

    command = sections["run"].get("command")
    if command is None:
        raise ConfigError("missing required key 'command' in [run]", sections["run"].lineno)
    if command not in COMMANDS:
        raise ConfigError(
            "unknown command '{0}', must be one of {1}".format(command, ", ".join(COMMANDS)),
            sections["run"].line("command"),
        )

    params, auto = _build_params(sections["params"])
    grids = tuple(_build_grid(g, params) for g in grids)

    solver = _build_options(MinimizeOptions, sections["solver"])
    phases = _build_options(PhaseOptions, sections["phases"], minimize=solver)

    sp = sections["spectrum"]
    if sp.get("direction") not in ("forward", "backward"):
        raise ConfigError("direction must be forward or backward", sp.line("direction"))
    nu = [
        None if sp.get(k) is None else _to_si(sp.get(k), "rate", params.kappa)
        for k in ("nu_min", "nu_max")
    ]
    spectrum = SpectrumConfig(
        nu[0], nu[1], sp.get("count"), sp.get("target_bunching"), sp.get("direction")
    )
    if spectrum.count < 1:
        raise ConfigError("spectrum count must be at least 1", sp.line("count"))

    out = sections["output"]
    output = OutputConfig(out.get("path"), out.get("format"), out.get("precision"))
    if output.format not in ("csv", "json"):
        raise ConfigError("format must be csv or json", out.line("format"))
    if not 6 <= output.precision <= 17:
        raise ConfigError("precision must be between 6 and 17", out.line("precision"))

    config = RunConfig(
        command,
        params,
        sections["params"].get("species"),
        auto,
        grids,
        solver,
        phases,
        spectrum,
        output,
    )
    _check_command(config, sections)

    return config


def _check_command(config, sections):

    lineno = sections["run"].line("command")
    if config.command == "phase-diagram":
        if not config.grids or config.grids[0].name != "eta":
            raise ConfigError("phase-diagram needs an eta [grid] first", lineno)
        if len(config.grids) > 2:
            raise ConfigError("phase-diagram takes at most two grids", lineno)
        if len(config.grids) == 2 and config.grids[1].name == "eta":
            raise ConfigError("phase-diagram row axis can not be eta", lineno)
    elif config.command == "kink-scaling":
        g = config.grid("N")
        if g is None:
            raise ConfigError("kink-scaling needs an N [grid]", lineno)
        if np.any(g.values() % 2 == 0):
            raise ConfigError("kink-scaling needs odd numbers of ions", lineno)
    elif config.command == "spectrum" and config.spectrum.target_bunching is not None:
        if config.grid("eta") is None:
            raise ConfigError("target_bunching needs an eta [grid] to search", lineno)


def load_config(path):
    """Read and parse a configuration file"""
    with open(path, encoding="utf-8") as f:
        return parse_config(f.read())
