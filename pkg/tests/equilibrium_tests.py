#!/usr/bin/env python
"""
Test code for the equilibrium solver
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


def _single_ion(C, eta):
    from frixion.params import SystemParams

    p = replace(SystemParams.yb174_reference(), n_ions=1)
    p = p.with_cooperativity(C, auto_offset=True)
    return p.with_drive(eta=eta * p.kappa)


class TestBareChain(unittest.TestCase):
    def test_analytic(self):

        from frixion.params import SystemParams
        from frixion.equilibrium import bare_chain, central_spacing

        p = _single_ion(0.0, 0.0)
        s = bare_chain(p)
        self.assertEqual(s.positions[0], 0.0)
        self.assertTrue(s.is_local_min)
        with self.assertRaises(ValueError):
            central_spacing(s)

        p = SystemParams.yb174_reference(n_ions=2)
        L = p.char_length
        s = bare_chain(p)
        self.assertTrue(np.allclose(s.positions / L, [-0.25 ** (1 / 3), 0.25 ** (1 / 3)],
                                    rtol=1e-7))

        p = SystemParams.yb174_reference(n_ions=3)
        L = p.char_length
        s = bare_chain(p)
        a = 1.25 ** (1 / 3)
        self.assertTrue(np.allclose(s.positions / L, [-a, 0, a], rtol=1e-7, atol=1e-8))
        self.assertTrue(np.isclose(central_spacing(s) / L, a, rtol=1e-7))
        self.assertTrue(s.is_local_min)
        self.assertEqual(s.check_invariants(p), [])

    def test_reference_geometry(self):

        from frixion.params import SystemParams
        from frixion.equilibrium import bare_chain, central_spacing

        p = SystemParams.yb174_reference()
        s = bare_chain(p)
        self.assertTrue(abs(2 * central_spacing(s) / p.wavelength - 7.3507) < 1e-3)
        self.assertTrue(np.isclose(central_spacing(s) / p.char_length, 0.5371725,
                                   rtol=1e-6))

    def test_drive_ignored(self):

        from frixion.params import SystemParams
        from frixion.equilibrium import bare_chain

        p = SystemParams.yb174_reference(n_ions=5, cooperativity=1, eta=100)
        s1 = bare_chain(p)
        s2 = bare_chain(p.with_drive(eta=0.0))
        self.assertTrue(np.all(s1.positions == s2.positions))
        self.assertEqual(s1.photon_number, 0.0)


class TestMinimize(unittest.TestCase):
    def test_options(self):

        from frixion.equilibrium import MinimizeOptions

        MinimizeOptions(seed_strategy="bare_chain")
        for kw in [{"gradient_tolerance": 0}, {"max_iterations": 0},
                   {"perturbation_scale": -1}, {"seed_strategy": "random"}]:
            with self.assertRaises(ValueError):
                MinimizeOptions(**kw)

    def test_seeds(self):

        from frixion.params import SystemParams
        from frixion.equilibrium import (minimize, bare_chain, perturbed_seed,
                                         MinimizeOptions, SeedStrategy)

        p = SystemParams.yb174_reference(n_ions=3)
        with self.assertRaises(ValueError):
            minimize(p)
        with self.assertRaises(ValueError):
            minimize(p, bare_chain(SystemParams.yb174_reference(n_ions=5)))

        s = bare_chain(p)
        s1 = perturbed_seed(p, s, MinimizeOptions(random_seed=3))
        s2 = perturbed_seed(p, s, MinimizeOptions(random_seed=3))
        s3 = perturbed_seed(p, s, MinimizeOptions(random_seed=4))
        self.assertTrue(np.all(s1.positions == s2.positions))
        self.assertFalse(np.all(s1.positions == s3.positions))

        # Without a drive every seed relaxes to the bare chain
        opts = MinimizeOptions(seed_strategy=SeedStrategy.PERTURBED_PROVIDED)
        m = minimize(p, s, opts)
        self.assertTrue(np.allclose(m.positions, s.positions, atol=1e-7 * p.char_length))

        m = minimize(p, None, MinimizeOptions(seed_strategy=SeedStrategy.BARE_CHAIN))
        self.assertTrue(np.allclose(m.positions, s.positions, atol=1e-7 * p.char_length))

    def test_converged(self):

        from frixion.params import SystemParams
        from frixion.potential import total_gradient
        from frixion.equilibrium import minimize, bare_chain, perturbed_seed

        p = SystemParams.yb174_reference(
            n_ions=5, cooperativity=0.5, eta=50, delta_c=-1
        )
        seed = perturbed_seed(p, bare_chain(p))
        s = minimize(p, seed)

        g = total_gradient(p, s.positions) / p.force_unit
        self.assertTrue(np.max(np.abs(g)) < 1e-9)
        self.assertEqual(s.check_invariants(p), [])

        # Idempotent
        s2 = minimize(p, s)
        self.assertTrue(np.allclose(s2.positions, s.positions, rtol=0,
                                    atol=1e-9 * p.wavelength))

        # Mirror image of the seed gives the mirror image of the result
        m = minimize(p, seed.mirrored(p))
        self.assertTrue(np.allclose(m.positions, -s.positions[::-1], rtol=0,
                                    atol=1e-6 * p.wavelength))
        self.assertTrue(np.isclose(m.energy, s.energy, rtol=1e-10))

    def test_tilt(self):

        from frixion.equilibrium import minimize, bare_chain

        p = _single_ion(0.0, 0.0)
        s = minimize(p, bare_chain(p), tilt=0.3)
        L = p.char_length
        self.assertTrue(np.isclose(s.positions[0], 0.3 * L, rtol=1e-7))
        # The tilt does not enter the stored energy
        self.assertTrue(np.isclose(s.energy,
                                   0.5 * p.mass * p.trap_freq ** 2 * (0.3 * L) ** 2,
                                   rtol=1e-7))

    def test_saddle(self):

        from frixion.potential import ChainState
        from frixion.equilibrium import minimize, escape_saddle

        p = _single_ion(0.5, 100.0)
        top = ChainState.from_positions(p, [0.0])
        s = minimize(p, top)
        self.assertFalse(s.is_local_min)
        self.assertEqual(s.positions[0], 0.0)

        e = escape_saddle(p, s)
        self.assertTrue(e.is_local_min)
        self.assertTrue(e.positions[0] > 0)
        self.assertTrue(e.energy < s.energy)


class TestDepinning(unittest.TestCase):
    def test_single_ion(self):

        from frixion.potential import ChainState, ReducedPotential
        from frixion.equilibrium import minimize, depinning_force

        p = _single_ion(1e-6, 1e6)
        rp = ReducedPotential(p)
        sc = rp.scales

        s = minimize(p, ChainState.from_positions(p, [1.0 / p.k]))
        self.assertTrue(s.is_local_min)
        self.assertTrue(abs(sc.to_phase(s.positions[0]) - np.pi / 2) < 1e-3)

        V0 = rp.eta2 * rp.coop
        phi_c = 0.5 * np.arccos(rp.a_trap / (2 * V0))
        f_c = V0 * np.sin(2 * phi_c) - rp.a_trap * phi_c
        f_c *= sc.energy * sc.wavenumber / sc.force

        res = depinning_force(p, s)
        self.assertTrue(res.converged)
        self.assertTrue(np.isclose(res.restoring_force, f_c, rtol=1e-2))
        self.assertTrue(sc.to_phase(res.tilted_state.positions[0]) < 1e-3)

    def test_trials_start_untilted(self):

        from unittest import mock
        from frixion.potential import ChainState
        from frixion.equilibrium import equilibrium, minimize, depinning_force

        p = _single_ion(1e-6, 1e6)
        s = minimize(p, ChainState.from_positions(p, [1.0 / p.k]))

        seeds = []

        def recording(params, seed=None, opts=None, tilt=0.0):
            seeds.append(seed)
            return minimize(params, seed, opts, tilt)

        with mock.patch.object(equilibrium, "minimize", side_effect=recording):
            res = depinning_force(p, s)

        self.assertEqual(len(seeds), res.evaluations)
        self.assertTrue(all(seed is s for seed in seeds))

    def test_bisection_cap(self):

        from frixion.potential import ChainState
        from frixion.equilibrium import minimize, depinning_force

        p = _single_ion(1e-6, 1e6)
        s = minimize(p, ChainState.from_positions(p, [1.0 / p.k]))

        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            res = depinning_force(p, s, max_bisections=2)
        self.assertFalse(res.converged)
        self.assertTrue(any("bisection" in str(x.message) for x in w))
        full = depinning_force(p, s)
        self.assertTrue(res.restoring_force >= full.restoring_force * (1 - 1e-3))

    def test_at_maximum(self):

        from frixion.equilibrium import bare_chain, depinning_force

        p = _single_ion(0.5, 0.0)
        s = bare_chain(p)
        res = depinning_force(p, s)
        self.assertEqual(res.restoring_force, 0.0)
        self.assertEqual(res.evaluations, 0)


if __name__ == "__main__":
    unittest.main()
