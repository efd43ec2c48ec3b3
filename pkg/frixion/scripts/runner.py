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
runner.py

Execution of a RunConfig and serialization of its results.

Rates are written in units of kappa (or of the trap frequency for the
phonon modes) and lengths in units of the wavelength; with si_units the SI
values are appended as extra columns. Numbers are formatted with a fixed
number of significant digits so that identical runs give byte-identical
files.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import re
import csv
import json
import logging
import numpy as np
import scipy.constants as cnst
from ase import io as ase_io
from collections import namedtuple

from frixion.utils import sidecar_path
from frixion.data import ion_species
from frixion.equilibrium import (
    SeedStrategy,
    bare_chain,
    minimize,
    escape_saddle,
    central_spacing,
)
from frixion.phases import (
    ModesError,
    normal_modes,
    sweep_phase_diagram,
    find_eta_for_bunching,
    kink_scaling,
)
from frixion.fluctuations import (
    FluctuationError,
    fluctuation_model,
    stability,
    steady_covariance,
    output_spectrum,
)

logger = logging.getLogger(__name__)

PHASE_COLUMNS = [
    "eta_over_kappa",
    "C",
    "delta_c_over_kappa",
    "B_N",
    "order_parameter_over_lambda",
    "phonon_gap_over_omega",
    "restoring_force",
    "classification",
    "bistable",
    "n_bar",
    "delta_eff_over_kappa",
    "fluct_stable",
    "chain_temperature_K",
    "quantum_flag",
]
PHASE_SI_COLUMNS = [
    "eta_rad_s",
    "delta_c_rad_s",
    "order_parameter_m",
    "phonon_gap_rad_s",
    "restoring_force_N",
    "delta_eff_rad_s",
]
SPECTRUM_COLUMNS = ["nu_over_kappa", "S"]

# Outcome of a command: table, free-form summary, point errors and the
# equilibria worth exporting
RunResult = namedtuple("RunResult", ["columns", "rows", "summary", "errors", "states"])


def format_value(v, precision):
    """Deterministic text form of a table entry"""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    if v is None or not np.isfinite(v):
        return "nan" if v is None or np.isnan(v) else ("inf" if v > 0 else "-inf")
    return "{0:.{1}g}".format(float(v), precision)


def _json_value(v, precision):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, str) or v is None:
        return v
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(x, precision) for x in v]
    if not np.isfinite(v):
        return None
    return float(format_value(v, precision))


def write_csv(path, columns, rows, precision):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([format_value(v, precision) for v in r])


def write_json(path, command, result, precision):
    data = {
        "command": command,
        "columns": list(result.columns),
        "rows": [
            dict(zip(result.columns, [_json_value(v, precision) for v in r]))
            for r in result.rows
        ],
        "summary": {k: _json_value(v, precision) for k, v in result.summary.items()},
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2)
        f.write("\n")


def write_errors(path, errors):
    with open(path, "w", encoding="utf-8") as f:
        for e in errors:
            f.write(e + "\n")


def find_equilibrium(params, opts):
    """Equilibrium for the single point commands: the solver seed strategy
    applied to the bare chain, saddles escaped along their softest mode"""

    seed = None
    if opts.seed_strategy != SeedStrategy.BARE_CHAIN:
        seed = bare_chain(params, opts)
    state = minimize(params, seed, opts)
    for _ in range(3):
        if state.is_local_min:
            break
        state = escape_saddle(params, state, opts)
    return state


def _state_summary(params, state):
    summary = {
        "B_N": state.bunching,
        "delta_eff_over_kappa": state.delta_eff / params.kappa,
        "n_bar": state.photon_number,
        "energy_over_hbar_kappa": state.energy / (cnst.hbar * params.kappa),
        "is_local_min": state.is_local_min,
        "quantum_flag": state.quantum_regime,
    }
    if state.n_ions > 1:
        summary["central_spacing_over_lambda"] = central_spacing(state) / params.wavelength
    return summary


def _run_equilibrium(config, si_units):

    params = config.params
    state = find_equilibrium(params, config.solver)

    columns = ["ion", "position_over_lambda", "cos2_kx"]
    if si_units:
        columns.append("position_m")
    rows = []
    for i, x in enumerate(state.positions):
        r = [i, x / params.wavelength, np.cos(params.k * x) ** 2]
        if si_units:
            r.append(x)
        rows.append(r)

    errors = [] if state.is_local_min else ["equilibrium: no stable equilibrium found"]
    return RunResult(columns, rows, _state_summary(params, state), errors, [state])


def _run_modes(config, si_units):

    params = config.params
    state = find_equilibrium(params, config.solver)
    summary = _state_summary(params, state)
    n = params.n_ions

    columns = ["mode", "frequency_over_omega"] + ["M_{0}".format(j) for j in range(n)]
    if si_units:
        columns.append("frequency_rad_s")

    try:
        modes = normal_modes(params, state, rtol=config.solver.hessian_rtol)
    except ModesError as e:
        return RunResult(columns, [], summary, ["modes: {0}".format(e)], [state])

    rows = []
    for i, w in enumerate(modes.frequencies):
        r = [i, w / params.trap_freq] + list(modes.mode_matrix[:, i])
        if si_units:
            r.append(w)
        rows.append(r)
    summary["phonon_gap_over_omega"] = modes.gap / params.trap_freq

    return RunResult(columns, rows, summary, [], [state])


def _fluctuation_table(config, params, state, si_units):

    summary = _state_summary(params, state)
    columns = [
        "mode",
        "frequency_over_omega",
        "coupling_over_kappa",
        "occupation",
        "temperature_K",
    ]
    if si_units:
        columns += ["frequency_rad_s", "coupling_rad_s"]

    try:
        model = fluctuation_model(
            params, state, gap_tolerance=config.phases.gap_tolerance
        )
    except ModesError as e:
        logger.info("Unstable at fixed photon number: %s", e)
        summary["fluct_stable"] = False
        return None, RunResult(columns, [], summary, [], [state])

    st = stability(model)
    summary["fluct_stable"] = st.stable
    summary["stability_margin_over_kappa"] = st.margin

    occ = np.full(model.n_modes, np.nan)
    temps = np.full(model.n_modes, np.nan)
    if st.stable:
        try:
            cov = steady_covariance(model)
            occ, temps = cov.mode_occupations, cov.mode_temperatures
            summary["chain_temperature_K"] = cov.chain_temperature
            summary["position_spreads_over_lambda"] = cov.position_spreads / params.wavelength
        except FluctuationError as e:
            logger.info("No steady state: %s", e)

    rows = []
    for i in range(model.n_modes):
        r = [
            i,
            model.mode_freqs[i] / params.trap_freq,
            model.couplings[i] / params.kappa,
            occ[i],
            temps[i],
        ]
        if si_units:
            r += [model.mode_freqs[i], model.couplings[i]]
        rows.append(r)

    return model, RunResult(columns, rows, summary, [], [state])


def _run_fluctuations(config, si_units):
    params = config.params
    state = find_equilibrium(params, config.solver)
    return _fluctuation_table(config, params, state, si_units)[1]


def _run_spectrum(config, si_units):

    params = config.params
    sp = config.spectrum
    if sp.target_bunching is not None:
        eta, state = find_eta_for_bunching(
            params,
            sp.target_bunching,
            config.grid("eta").values(),
            config.solver,
            sp.direction,
        )
        params = params.with_drive(eta=eta)
    else:
        state = find_equilibrium(params, config.solver)

    model, table = _fluctuation_table(config, params, state, si_units)
    summary = table.summary
    summary["eta_over_kappa"] = params.eta / params.kappa

    columns = list(SPECTRUM_COLUMNS)
    if si_units:
        columns.append("nu_rad_s")
    if model is None:
        return RunResult(columns, [], summary, ["spectrum: no normal modes"], [state])

    summary["mode_frequencies_over_kappa"] = model.mode_freqs / params.kappa
    spec = output_spectrum(model, sp.nu_grid(params, model.mode_freqs))
    rows = []
    for nu, s in zip(spec.nu_grid, spec.values):
        r = [nu / params.kappa, s]
        if si_units:
            r.append(nu)
        rows.append(r)

    return RunResult(columns, rows, summary, [], [state])


def _phase_row(pt, si_units):
    p = pt.params
    r = [
        p.eta / p.kappa,
        p.cooperativity,
        p.delta_c / p.kappa,
        pt.bunching,
        pt.order_parameter,
        pt.phonon_gap / p.trap_freq,
        pt.restoring_force,
        pt.classification,
        pt.bistable,
        pt.photon_number,
        pt.delta_eff / p.kappa,
        pt.fluct_stable,
        pt.chain_temperature,
        pt.quantum_flag,
    ]
    if si_units:
        r += [
            p.eta,
            p.delta_c,
            pt.order_parameter * p.wavelength,
            pt.phonon_gap,
            pt.restoring_force * p.force_unit,
            pt.delta_eff,
        ]
    return r


def _run_phase_diagram(config, si_units, workers=1, validate=False):

    eta_grid = config.grids[0]
    row = config.grids[1] if len(config.grids) > 1 else None

    points = sweep_phase_diagram(
        config.params,
        eta_grid.values(),
        row_axis=None if row is None else row.name,
        row_values=(None,) if row is None else row.values(),
        opts=config.phases,
        workers=workers,
        auto_offset=config.auto_offset,
    )

    columns = PHASE_COLUMNS + (PHASE_SI_COLUMNS if si_units else [])
    rows = [_phase_row(pt, si_units) for pt in points]

    errors = []
    for i, pt in enumerate(points):
        tag = "point {0} (eta = {1:.6g} kappa, C = {2:.6g}, delta_c = {3:.6g} kappa)".format(
            i,
            pt.eta / pt.params.kappa,
            pt.cooperativity,
            pt.delta_c / pt.params.kappa,
        )
        errors += ["{0}: {1}".format(tag, e) for e in pt.errors]
        if validate:
            errors += [
                "{0}: invalid: {1}".format(tag, e)
                for e in pt.check_invariants(config.phases)
            ]

    summary = {
        "points": len(points),
        "bistable_points": sum(pt.bistable for pt in points),
        "failed_points": sum(not pt.ok for pt in points),
    }
    states = [pt.state for pt in points if pt.state is not None]

    return RunResult(columns, rows, summary, errors, states)


def _run_kink_scaling(config, si_units):

    scaling = kink_scaling(
        config.params, [int(n) for n in config.grid("N").values()], config.solver
    )
    rows = [[n, kink] for n, kink in scaling.points]
    fit = scaling.fit
    summary = {
        "slope": None if fit is None else fit.slope,
        "intercept": None if fit is None else fit.intercept,
        "r_squared": None if fit is None else fit.r_squared,
    }
    return RunResult(["N", "kink_estimate"], rows, summary, [], [])


_COMMANDS = {
    "equilibrium": _run_equilibrium,
    "modes": _run_modes,
    "fluctuations": _run_fluctuations,
    "spectrum": _run_spectrum,
    "kink-scaling": _run_kink_scaling,
}


def execute(config, workers=1, si_units=False, validate=False):
    """Run the command of a configuration and return its RunResult"""

    logger.info("Running command %s", config.command)
    if config.command == "phase-diagram":
        result = _run_phase_diagram(config, si_units, workers, validate)
    else:
        result = _COMMANDS[config.command](config, si_units)
        if validate:
            inv = []
            for s in result.states:
                inv += ["invalid state: {0}".format(e) for e in s.check_invariants(config.params)]
            result = result._replace(errors=result.errors + inv)
    return result


def run(config, path, workers=1, si_units=False, validate=False, xyz=None):
    """Run a configuration and write its output files.

    | Args:
    |   config (RunConfig): the configuration
    |   path (str): output file
    |   workers (Optional[int]): worker processes for sweeps
    |   si_units (Optional[bool]): add columns with SI values
    |   validate (Optional[bool]): check the invariants of every output
    |                              row, reporting violations as errors
    |   xyz (Optional[str]): if given, write the equilibria found to this
    |                        extended XYZ file

    | Returns:
    |   status (int): 0 if every point succeeded, 2 if some failed. The
    |                 failures are written to the '<seedname>.errors' file
    |                 next to the output.

    """

    result = execute(config, workers, si_units, validate)
    precision = config.output.precision

    if config.output.format == "json":
        write_json(path, config.command, result, precision)
    else:
        write_csv(path, result.columns, result.rows, precision)

    if xyz is not None and result.states:
        symbol = re.sub("^[0-9]+", "", ion_species(config.species))
        ase_io.write(xyz, [s.to_atoms(symbol) for s in result.states], format="extxyz")

    if result.errors:
        epath = sidecar_path(path, "errors")
        write_errors(epath, result.errors)
        logger.warning("%d errors, see %s", len(result.errors), epath)
        return 2

    return 0
