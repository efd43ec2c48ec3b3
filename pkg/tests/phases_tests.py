#!/usr/bin/env python
"""
Test code for normal modes and phase classification
"""

# Python 2-to-3 compatibility code
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
from __future__ import unicode_literals

import os
import sys
import unittest
import warnings
import numpy as np
from dataclasses import replace

sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../"))
)  # noqa


class TestModes(unittest.TestCase):
    def test_bare_modes(self):

        from frixion.params import SystemParams
        from frixion.equilibrium import bare_chain
        from frixion.phases import normal_modes

        p = SystemParams.yb174_reference(n_ions=5)
        modes = normal_modes(p, bare_chain(p))
        w = modes.frequencies / p.trap_freq

        self.assertEqual(modes.n_modes, 5)
        # Centre of mass and breathing modes
        self.assertTrue(np.isclose(w[0], 1.0, rtol=1e-8))
        self.assertTrue(np.isclose(w[1], np.sqrt(3), rtol=1e-6))
        self.assertEqual(modes.gap, modes.frequencies[0])
        self.assertTrue(np.all(np.diff(w) > 0))

        M = modes.mode_matrix
        self.assertTrue(np.allclose(M.T @ M, np.identity(5), atol=1e-10))
        for n in range(5):
            self.assertTrue(M[np.argmax(np.abs(M[:, n])), n] > 0)
        self.assertTrue(np.allclose(M[:, 0], 1 / np.sqrt(5)))

    def test_unstable(self):

        from frixion.params import SystemParams
        from frixion.potential import ChainState
        from frixion.phases import normal_modes, ModesError

        p = replace(SystemParams.yb174_reference(), n_ions=1)
        p = p.with_cooperativity(0.5).with_drive(eta=100 * p.kappa)
        top = ChainState.from_positions(p, [0.0])
        with self.assertRaises(ModesError):
            normal_modes(p, top)

    def test_fixed_photon_number(self):

        from frixion.params import SystemParams, derived_scales
        from frixion.potential import ReducedPotential
        from frixion.equilibrium import minimize
        from frixion.phases import normal_modes, pinned_seed

        p = SystemParams.yb174_reference(
            n_ions=3, cooperativity=2.0, eta=200, delta_c=-1
        )
        s = minimize(p, pinned_seed(p))
        self.assertTrue(s.is_local_min)

        rp = ReducedPotential(p)
        sc = derived_scales(p)
        H = rp.hessian(sc.to_phase(s.positions), fixed_photon_number=True)
        ref = p.kappa * np.sqrt(sc.recoil * np.linalg.eigvalsh(H))

        modes = normal_modes(p, s, fixed_photon_number=True)
        self.assertTrue(np.allclose(modes.frequencies, ref, rtol=1e-10))

        # Red detuned: the photon number response softens the modes
        full = normal_modes(p, s)
        self.assertTrue(np.all(full.frequencies <= modes.frequencies * (1 + 1e-12)))


class TestAxes(unittest.TestCase):
    def test_apply_axis(self):

        from frixion.params import SystemParams
        from frixion.phases import apply_axis, AXES

        p = SystemParams.yb174_reference(n_ions=5, cooperativity=0.5)
        self.assertEqual(AXES, ("eta", "C", "delta_c", "N"))

        self.assertEqual(apply_axis(p, "eta", 3.0).eta, 3.0)
        self.assertEqual(apply_axis(p, "delta_c", -3.0).delta_c, -3.0)
        q = apply_axis(p, "C", -1.0, auto_offset=True)
        self.assertAlmostEqual(q.cooperativity, -1.0)
        self.assertAlmostEqual(q.trap_center_offset, p.wavelength / 4)
        self.assertEqual(apply_axis(p, "C", -1.0).trap_center_offset, 0.0)
        q = apply_axis(p, "N", 21)
        self.assertEqual(q.n_ions, 21)
        self.assertAlmostEqual(q.cooperativity, 0.5)

        with self.assertRaises(ValueError):
            apply_axis(p, "kappa", 1.0)

    def test_pinned_seed(self):

        from frixion.params import SystemParams
        from frixion.phases import pinned_seed

        p = SystemParams.yb174_reference(n_ions=3, cooperativity=0.5, eta=10)
        self.assertTrue(pinned_seed(p).bunching < 1e-12)
        p = SystemParams.yb174_reference(n_ions=3, cooperativity=-0.5, eta=10)
        self.assertTrue(pinned_seed(p).bunching > 1 - 1e-12)

    def test_kink_estimate(self):

        from frixion.params import SystemParams
        from frixion.phases import kink_estimate

        p = SystemParams.yb174_reference(n_ions=11, cooperativity=0.5)
        self.assertAlmostEqual(kink_estimate(p, 0.1), 1.1)
        p = SystemParams.yb174_reference(n_ions=11, cooperativity=-0.5)
        self.assertAlmostEqual(kink_estimate(p, 0.9), 1.1)


class TestClassification(unittest.TestCase):
    def test_sliding(self):

        from frixion.params import SystemParams
        from frixion.equilibrium import bare_chain
        from frixion.phases import classify_point, Phases

        p = SystemParams.yb174_reference(n_ions=5, cooperativity=0.5)
        pt = classify_point(p)

        self.assertEqual(pt.classification, Phases.SLIDING)
        self.assertTrue(pt.ok)
        self.assertFalse(pt.bistable)
        self.assertFalse(pt.finite_size_warning)
        self.assertEqual(pt.restoring_force, 0.0)
        self.assertTrue(abs(pt.order_parameter) < 1e-3)
        self.assertTrue(np.isclose(pt.phonon_gap, p.trap_freq, rtol=1e-8))
        self.assertAlmostEqual(pt.bunching, bare_chain(p).bunching)
        self.assertTrue(pt.quantum_flag)
        self.assertTrue(pt.fluct_stable)
        self.assertTrue(np.isnan(pt.chain_temperature))
        self.assertEqual(pt.check_invariants(), [])
        self.assertEqual(pt.eta, 0.0)
        self.assertAlmostEqual(pt.cooperativity, 0.5)

    def test_driven_default_options(self):

        from frixion.params import SystemParams
        from frixion.phases import classify_point, Phases

        # Fluctuation analysis on: stability verdict and chain temperature
        p = SystemParams.yb174_reference(
            n_ions=5, cooperativity=-0.5, eta=20, delta_c=-2
        )
        pt = classify_point(p)

        self.assertIn(pt.classification, tuple(Phases))
        self.assertTrue(pt.state.is_local_min)
        self.assertTrue(pt.fluct_stable)
        self.assertTrue(np.isfinite(pt.chain_temperature))
        self.assertTrue(pt.chain_temperature > 0)

    def test_pinned(self):

        from frixion.params import SystemParams
        from frixion.phases import classify_point, PhaseOptions, Phases

        p = SystemParams.yb174_reference(n_ions=5, cooperativity=0.5, eta=300)
        opts = PhaseOptions(fluctuations=False)
        pt = classify_point(p, opts)

        self.assertNotEqual(pt.classification, Phases.SLIDING)
        self.assertTrue(abs(pt.order_parameter) > opts.order_tolerance)
        self.assertTrue(pt.restoring_force > opts.force_tolerance)
        self.assertTrue(pt.phonon_gap > 0)
        self.assertTrue(pt.state.is_local_min)
        self.assertFalse(pt.quantum_flag)
        self.assertFalse(pt.fluct_stable)
        self.assertEqual(pt.check_invariants(opts), [])

    def test_mirror(self):

        from frixion.params import SystemParams
        from frixion.phases import classify_point, PhaseOptions

        opts = PhaseOptions(fluctuations=False)
        for C in (0.5, -0.5):
            p = SystemParams.yb174_reference(n_ions=5, cooperativity=C, eta=300)
            pt = classify_point(p, opts)
            f, b = pt.branches
            m = classify_point(p, opts, f.mirrored(p), b.mirrored(p))

            self.assertEqual(m.classification, pt.classification)
            self.assertEqual(m.bistable, pt.bistable)
            self.assertTrue(np.isclose(m.state.energy, pt.state.energy, rtol=1e-10))
            self.assertTrue(np.isclose(m.bunching, pt.bunching, rtol=1e-8))
            self.assertTrue(np.isclose(abs(m.order_parameter), abs(pt.order_parameter),
                                       rtol=1e-6))
            self.assertTrue(np.isclose(m.phonon_gap, pt.phonon_gap, rtol=1e-6,
                                       equal_nan=True))
            self.assertTrue(np.isclose(m.restoring_force, pt.restoring_force, rtol=1e-3,
                                       equal_nan=True))

    def test_even(self):

        from frixion.params import SystemParams
        from frixion.phases import classify_point, PhaseOptions

        p = SystemParams.yb174_reference(n_ions=4, cooperativity=0.5)
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            pt = classify_point(p, PhaseOptions(fluctuations=False))
        self.assertTrue(any(issubclass(x.category, UserWarning) for x in w))
        self.assertTrue(pt.finite_size_warning)


class TestScans(unittest.TestCase):
    def test_continuation(self):

        from frixion.params import SystemParams
        from frixion.equilibrium import bare_chain
        from frixion.phases import continuation_scan

        p = SystemParams.yb174_reference(n_ions=3, cooperativity=0.5)
        etas = np.array([0.0, 5.0, 10.0]) * p.kappa

        fwd = continuation_scan(p, etas, "forward")
        bwd = continuation_scan(p, etas, "backward")
        self.assertEqual(len(fwd.states), 3)
        self.assertEqual(len(bwd.states), 3)
        self.assertEqual(fwd.errors, [None] * 3)
        self.assertTrue(np.allclose(fwd.states[0].positions, bare_chain(p).positions,
                                    rtol=0, atol=1e-7 * p.char_length))

        with self.assertRaises(ValueError):
            continuation_scan(p, etas, "sideways")
        with self.assertRaises(ValueError):
            continuation_scan(p, etas[::-1])
        with self.assertRaises(ValueError):
            continuation_scan(p, [])

    def test_sweep(self):

        from frixion.params import SystemParams
        from frixion.phases import sweep_phase_diagram, PhaseOptions, Phases

        p = SystemParams.yb174_reference(n_ions=3)
        opts = PhaseOptions(fluctuations=False)
        etas = np.array([0.0, 5.0]) * p.kappa

        pts = sweep_phase_diagram(p, [0.0], opts=opts)
        self.assertEqual(len(pts), 1)
        self.assertEqual(pts[0].classification, Phases.SLIDING)

        pts = sweep_phase_diagram(p, etas, "C", [0.5, 1.0], opts=opts, auto_offset=True)
        self.assertEqual(len(pts), 4)
        self.assertTrue(np.allclose([pt.cooperativity for pt in pts], [0.5, 0.5, 1, 1]))
        self.assertTrue(np.allclose([pt.eta for pt in pts], list(etas) * 2))

        # Same results from a pool of workers
        pts2 = sweep_phase_diagram(p, etas, "C", [0.5, 1.0], opts=opts,
                                   workers=2, auto_offset=True)
        self.assertTrue(np.array_equal([pt.bunching for pt in pts],
                                       [pt.bunching for pt in pts2]))
        self.assertEqual([pt.classification for pt in pts],
                         [pt.classification for pt in pts2])

        # Rows come out in ascending order whatever the input order
        pts3 = sweep_phase_diagram(p, etas, "C", [1.0, 0.5], opts=opts, auto_offset=True)
        self.assertTrue(np.allclose([pt.cooperativity for pt in pts3], [0.5, 0.5, 1, 1]))
        self.assertTrue(np.array_equal([pt.bunching for pt in pts],
                                       [pt.bunching for pt in pts3]))

        with self.assertRaises(ValueError):
            sweep_phase_diagram(p, etas, "eta", [1.0])
        with self.assertRaises(ValueError):
            sweep_phase_diagram(p, etas, "C", [])

    def test_hysteresis(self):

        from frixion.params import SystemParams
        from frixion.phases import (continuation_scan, classify_point,
                                    PhaseOptions, Phases)

        p = replace(SystemParams.yb174_reference(), n_ions=9)
        p = p.with_cooperativity(2.4, auto_offset=True)
        etas = np.geomspace(10, 300, 30) * p.kappa
        fwd = continuation_scan(p, etas, "forward")
        bwd = continuation_scan(p, etas, "backward")

        # One branch below the transition
        f, b = fwd.states[0], bwd.states[0]
        self.assertTrue(np.allclose(f.positions, b.positions, rtol=0,
                                    atol=1e-6 * p.wavelength))

        # Two stable pinned branches at the top of the scan
        f, b = fwd.states[-1], bwd.states[-1]
        self.assertTrue(f.is_local_min and b.is_local_min)
        self.assertTrue(f.energy < b.energy)

        q = p.with_drive(eta=etas[-1])
        pt = classify_point(q, PhaseOptions(fluctuations=False), f, b)
        self.assertTrue(pt.bistable)
        self.assertEqual(pt.classification, Phases.BISTABLE)
        self.assertTrue(np.isclose(pt.state.energy, f.energy, rtol=1e-10))

    def test_bunching_trend(self):

        from frixion.params import SystemParams
        from frixion.phases import continuation_scan

        # Deepening the lattice drives the ions to its minima: nodes for
        # C > 0, antinodes for C < 0
        etas = np.geomspace(10, 1000, 31)
        for C, sign in ((0.5, -1), (-0.5, 1)):
            p = SystemParams.yb174_reference(n_ions=5, cooperativity=C)
            branch = continuation_scan(p, etas * p.kappa)
            B = np.array([s.bunching for eta, s in zip(etas, branch.states) if eta >= 300])
            self.assertTrue(np.all(sign * np.diff(B) > 0), C)

    def test_gap_scan(self):

        from frixion.params import SystemParams
        from frixion.phases import gap_scan

        p = SystemParams.yb174_reference(n_ions=3, cooperativity=0.5)
        etas = np.array([0.0, 1.0]) * p.kappa
        scan = gap_scan(p, etas)
        self.assertEqual(len(scan.forward), 2)
        self.assertEqual(len(scan.backward), 2)
        self.assertTrue(np.isclose(scan.forward[0], p.trap_freq, rtol=1e-8))

    def test_critical_eta(self):

        from frixion.params import SystemParams
        from frixion.phases import critical_eta, gap_scan

        p = SystemParams.yb174_reference(n_ions=5, cooperativity=0.5)
        etas = np.linspace(10, 600, 60) * p.kappa
        crit = critical_eta(p, etas)

        self.assertTrue(etas[0] < crit.eta < etas[-1])
        # The gap closes at the transition
        self.assertTrue(0 <= crit.gap < 0.02 * p.trap_freq)
        order = (crit.state.central_position() - p.trap_center_offset) / p.wavelength
        self.assertTrue(abs(order) < 1e-3)

        below = etas[etas < crit.eta]
        self.assertTrue(np.all(gap_scan(p, below).forward >= crit.gap))

        with self.assertRaises(ValueError):
            critical_eta(p, np.array([0.0, 1.0]) * p.kappa)

    def test_find_eta(self):

        from frixion.params import SystemParams
        from frixion.phases import continuation_scan, find_eta_for_bunching

        p = SystemParams.yb174_reference(n_ions=3, cooperativity=0.5)
        etas = np.linspace(0, 300, 7) * p.kappa
        branch = continuation_scan(p, etas)
        target = 0.5 * (branch.states[0].bunching + branch.states[-1].bunching)

        eta, state = find_eta_for_bunching(p, target, etas)
        self.assertTrue(etas[0] <= eta <= etas[-1])
        self.assertEqual(state.n_ions, 3)

        with self.assertRaises(ValueError):
            find_eta_for_bunching(p, 2.0, etas)

    def test_kink_scaling(self):

        from frixion.params import SystemParams
        from frixion.phases import kink_scaling

        p = SystemParams.yb174_reference(n_ions=5, cooperativity=0.5, eta=100)
        ks = kink_scaling(p, [5])
        self.assertEqual(ks.points[0][0], 5)
        self.assertTrue(0 <= ks.points[0][1] <= 5)
        self.assertIsNone(ks.fit)

        with self.assertRaises(ValueError):
            kink_scaling(p, [4])
        with self.assertRaises(ValueError):
            kink_scaling(p, [5], steps=0)

    def test_kink_scaling_pinned(self):

        from frixion.params import SystemParams
        from frixion.phases import kink_scaling

        # Deep in the pinned regime the kink count grows with N
        p = SystemParams.yb174_reference(cooperativity=0.5, eta=500)
        ks = kink_scaling(p, [5, 9, 13])
        kinks = [k for _, k in ks.points]
        self.assertTrue(np.all(np.diff(kinks) > 0))
        self.assertTrue(ks.fit.slope > 0)
        self.assertTrue(all(0 < k < 0.5 for k in kinks[:2]))


if __name__ == "__main__":
    unittest.main()
