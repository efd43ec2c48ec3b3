#!/usr/bin/env python
"""
End to end checks on the reference system. These take minutes to hours and
only run with FRIXION_SLOW=1 in the environment.
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import os
import sys
import unittest
import numpy as np
from dataclasses import replace
from scipy.signal import find_peaks

sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../"))
)  # noqa

_SLOW = os.environ.get("FRIXION_SLOW", "0") == "1"


def _first(mask):
    idx = np.where(mask)[0]
    return idx[0] if len(idx) > 0 else None


def _order(params, state):
    return (state.central_position() - params.trap_center_offset) / params.wavelength


@unittest.skipUnless(_SLOW, "slow; set FRIXION_SLOW=1 to run")
class TestStatics(unittest.TestCase):
    def test_geometry(self):

        from frixion.params import SystemParams
        from frixion.equilibrium import bare_chain, central_spacing

        p = SystemParams.yb174_reference()
        d = central_spacing(bare_chain(p))
        self.assertTrue(abs(2 * d / p.wavelength - 7.3507) < 1e-3)

    def test_transition(self):

        from frixion.params import SystemParams
        from frixion.phases import (sweep_phase_diagram, gap_scan, critical_eta,
                                    PhaseOptions)

        p = SystemParams.yb174_reference(cooperativity=0.5)
        opts = PhaseOptions(fluctuations=False)
        etas = np.geomspace(10, 1000, 200) * p.kappa

        crit = critical_eta(p, etas, opts)
        self.assertTrue(crit.gap < opts.gap_tolerance * p.trap_freq)
        j = int(np.searchsorted(etas, crit.eta, side="right"))

        pts = sweep_phase_diagram(p, etas, opts=opts)
        i_order = _first([abs(pt.order_parameter) > opts.order_tolerance for pt in pts])
        i_force = _first([pt.restoring_force > opts.force_tolerance for pt in pts])
        self.assertIsNotNone(i_order)
        self.assertIsNotNone(i_force)
        self.assertTrue(abs(i_order - j) <= 1)
        self.assertTrue(abs(i_force - j) <= 1)

        gaps = gap_scan(p, etas[:j], opts).forward
        self.assertTrue(np.all(gaps >= crit.gap))

    def test_fk_scaling(self):

        from frixion.params import SystemParams
        from frixion.phases import continuation_scan
        from frixion.utils import power_law_exponent

        coops = np.array([0.01, 0.02, 0.05, 0.1])
        etas = np.geomspace(10, 1e4, 120)
        eta_c = []
        for C in coops:
            p = SystemParams.yb174_reference(cooperativity=C)
            branch = continuation_scan(p, etas * p.kappa)
            i = _first([s is not None and abs(_order(p, s)) > 1e-3
                        for s in branch.states])
            self.assertIsNotNone(i)
            eta_c.append(etas[i])

        self.assertTrue(abs(power_law_exponent(coops, eta_c) + 0.5) < 0.1)

    def test_bistability(self):

        from frixion.params import SystemParams
        from frixion.phases import continuation_scan

        # With C > 0 the coexistence window depends on N; the eleven ion
        # chain breaks symmetry continuously, nine ions show two branches
        p = replace(SystemParams.yb174_reference(), n_ions=9)
        p = p.with_cooperativity(2.4, auto_offset=True)
        etas = np.geomspace(10, 1000, 100) * p.kappa
        fwd = continuation_scan(p, etas, "forward")
        bwd = continuation_scan(p, etas, "backward")

        window = []
        for i in range(len(etas)):
            f, b = fwd.states[i], bwd.states[i]
            if f is None or b is None or not (f.is_local_min and b.is_local_min):
                continue
            dx = np.max(np.abs(f.positions - b.positions)) / p.wavelength
            dE = abs(f.energy - b.energy) / abs(f.energy)
            if dx > 1e-3 and dE > 1e-9:
                window.append(i)
        self.assertTrue(len(window) > 0)
        # The window opens after the forward branch has left the symmetric state
        i_break = _first([s is not None and abs(_order(p, s)) > 1e-3
                          for s in fwd.states])
        self.assertIsNotNone(i_break)
        self.assertTrue(window[0] > i_break)
        self.assertEqual(window[-1], len(etas) - 1)

    def test_kink_linearity(self):

        from frixion.params import SystemParams
        from frixion.phases import kink_scaling

        p = SystemParams.yb174_reference(cooperativity=0.5, eta=500)
        ks = kink_scaling(p, list(range(11, 82, 10)))
        self.assertTrue(ks.fit.slope > 0)
        self.assertTrue(ks.fit.r_squared > 0.95)

    def test_deep_pinning(self):

        from frixion.params import SystemParams
        from frixion.phases import find_eta_for_bunching

        p = SystemParams.yb174_reference(n_ions=81, cooperativity=0.5)
        etas = np.linspace(100, 6000, 60) * p.kappa
        eta, s = find_eta_for_bunching(p, 1.5e-3, etas)
        self.assertTrue(4000 < eta / p.kappa < 5000)

        # Kinks gather in the dense centre, the edges sit on the nodes
        c2 = np.cos(p.k * s.positions) ** 2
        edges = np.concatenate([c2[:10], c2[-10:]])
        self.assertTrue(np.mean(edges) < 0.1 * np.mean(c2[30:51]))


@unittest.skipUnless(_SLOW, "slow; set FRIXION_SLOW=1 to run")
class TestDynamics(unittest.TestCase):
    def test_stability_theorem(self):

        from frixion.params import SystemParams
        from frixion.equilibrium import bare_chain, minimize, escape_saddle
        from frixion.phases import normal_modes, ModesError
        from frixion.fluctuations import stability_map

        rng = np.random.default_rng(7)
        checked = 0
        while checked < 100:
            p = SystemParams.yb174_reference(
                n_ions=5,
                cooperativity=rng.uniform(-3, 3),
                eta=rng.uniform(1, 300),
                delta_c=rng.uniform(-5, 5),
            )
            s = minimize(p, bare_chain(p))
            if not s.is_local_min:
                s = escape_saddle(p, s)
            if not s.is_local_min or abs(s.delta_eff) < 1e-6 * p.kappa:
                continue
            try:
                if normal_modes(p, s, fixed_photon_number=True).gap < 0.02 * p.trap_freq:
                    continue
            except ModesError:
                pass
            entry = stability_map([(p, s)])[0]
            self.assertEqual(entry.stable, s.delta_eff < 0)
            checked += 1

    def test_cooling(self):

        from frixion.params import SystemParams
        from frixion.phases import continuation_scan
        from frixion.fluctuations import (fluctuation_model, stability,
                                          steady_covariance, FluctuationError)
        from frixion.phases import ModesError

        temps = []
        etas = np.geomspace(10, 1000, 10)
        for C in (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0):
            p = SystemParams.yb174_reference(cooperativity=C, delta_c=-10)
            branch = continuation_scan(p, etas * p.kappa)
            for eta, s in zip(etas, branch.states):
                if s is None or not s.is_local_min:
                    continue
                q = p.with_drive(eta=eta * p.kappa)
                try:
                    m = fluctuation_model(q, s)
                    if stability(m).stable:
                        temps.append(steady_covariance(m).chain_temperature)
                except (ModesError, FluctuationError):
                    continue

        self.assertTrue(len(temps) > 0)
        self.assertTrue(60e-6 <= min(temps) <= 250e-6)

    def test_spectrum_bands(self):

        from frixion.params import SystemParams
        from frixion.equilibrium import bare_chain, minimize
        from frixion.phases import find_eta_for_bunching
        from frixion.fluctuations import fluctuation_model, output_spectrum

        def peaks(p, s):
            gamma = p.mode_damping(1)[0]
            m = fluctuation_model(p, s)
            w = m.mode_freqs
            nu = np.linspace(0.05 * p.trap_freq, 1.2 * np.max(w), 60001)
            S = output_spectrum(m, nu).values
            idx, _ = find_peaks(S)
            c2 = m.couplings ** 2
            for wn in w[c2 >= 0.3 * np.max(c2)]:
                self.assertTrue(np.any(np.abs(nu[idx] - wn) <= 2 * gamma))
            return nu[idx[np.argmax(S[idx])]], gamma

        p = SystemParams.yb174_reference(
            cooperativity=-2.0, delta_c=-2, bath_temperature=1e-4
        )
        p = replace(p, gamma_modes=(0.1 * p.kappa,))

        sliding = p.with_drive(eta=5 * p.kappa)
        nu_sliding, gamma = peaks(sliding, minimize(sliding, bare_chain(sliding)))

        eta, s = find_eta_for_bunching(p, 0.95, np.geomspace(1, 2000, 200) * p.kappa)
        nu_pinned, _ = peaks(p.with_drive(eta=eta), s)

        self.assertTrue(abs(nu_pinned - nu_sliding) > 10 * gamma)


if __name__ == "__main__":
    unittest.main()
