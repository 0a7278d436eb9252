from django.test import SimpleTestCase

import math
from types import SimpleNamespace
from unittest import mock

import numpy as np

from polcascade.transmission.cascade import pair_transmission_raw, triple_transmission
from polcascade.transmission.core import (
    HALF_PI,
    ModelDomainError,
    TransmissionProfileParams,
    profile_from_preset,
)
from polcascade.transmission.epr import coincidence_rate
from polcascade.transmission.montecarlo import (
    TABLE_ROWS,
    McConfig,
    SamplingTable,
    SamplingTableError,
    mc_coincidence,
    mc_pair,
    mc_pair_shrinkage,
    mc_triple,
    sampling_table,
)
from polcascade.transmission.quadrature import DEFAULT_SPEC, integrate
from polcascade.transmission.shrinkage import (
    ShrinkageParams,
    kernel_normalization,
    pair_transmission_shrinkage,
    shrinkage_from_preset,
)


class McConfigTest(SimpleTestCase):
    def test_validation(self):
        with self.assertRaises(ModelDomainError):
            McConfig(samples=0)
        with self.assertRaises(ModelDomainError):
            McConfig(samples=10, seed=-1)
        with self.assertRaises(ModelDomainError):
            McConfig(samples=10, stream_count=0)
        with self.assertRaises(ModelDomainError):
            McConfig(samples=2.5)

    def test_streams_split_samples(self):
        counts = [n for _, n in McConfig(samples=10, stream_count=4).streams()]
        self.assertEqual(counts, [3, 3, 2, 2])

    def test_single_sample(self):
        est = mc_pair(profile_from_preset("fig1-simple"), 0.0, McConfig(samples=1))
        self.assertEqual(est.stderr, 0.0)
        self.assertIn(est.mean, (0.0, 1.0))


class SimpleEstimatorTest(SimpleTestCase):
    def setUp(self):
        self.p = profile_from_preset("fig1-simple")
        self.cfg = McConfig(samples=200000, seed=11)

    def test_reproducible(self):
        first = mc_pair(self.p, 0.4, self.cfg)
        second = mc_pair(self.p, 0.4, McConfig(samples=200000, seed=11))
        self.assertEqual(first, second)
        other = mc_pair(self.p, 0.4, McConfig(samples=200000, seed=12))
        self.assertNotEqual(first.mean, other.mean)

    def test_transparent_profile(self):
        clear = TransmissionProfileParams(a=1e-9, e=1.0, c=1.0)
        self.assertGreater(mc_pair(clear, 0.7, McConfig(samples=10000)).mean, 0.999)

    def test_triple_below_pair(self):
        pair = mc_pair(self.p, 0.5, self.cfg)
        triple = mc_triple(self.p, 0.5, 1.0, self.cfg)
        self.assertLessEqual(triple.mean, pair.mean)

    def test_coincidence_is_pair(self):
        self.assertEqual(
            mc_coincidence(self.p, 0.0, 0.6, self.cfg), mc_pair(self.p, 0.6, self.cfg)
        )

    def test_pair_agrees(self):
        for alpha in (0.0, 0.5, 1.2):
            est = mc_pair(self.p, alpha, self.cfg)
            self.assertTrue(est.agrees_with(pair_transmission_raw(self.p, alpha) / math.pi))

    def test_triple_agrees(self):
        est = mc_triple(self.p, 0.4, 0.8, self.cfg)
        self.assertTrue(est.agrees_with(triple_transmission(self.p, 0.4, 0.8) / math.pi))

    def test_coincidence_agrees(self):
        est = mc_coincidence(self.p, 0.3, 0.1, self.cfg, perpendicular=True)
        expected = coincidence_rate(self.p, 0.3, 0.1, perpendicular=True)
        self.assertTrue(est.agrees_with(expected))

    def test_stderr_scaling(self):
        small = mc_pair(self.p, 0.5, McConfig(samples=10000, seed=3))
        large = mc_pair(self.p, 0.5, McConfig(samples=1000000, seed=3))
        ratio = small.stderr / large.stderr
        self.assertTrue(8.0 <= ratio <= 12.5, ratio)


class SamplingTableTest(SimpleTestCase):
    def setUp(self):
        self.s = shrinkage_from_preset("fig2-shrinkage")
        self.table = sampling_table(self.s)

    def test_samples_in_range(self):
        rng = np.random.default_rng(2)
        lam_prime = HALF_PI - math.pi * rng.random(50000)
        lam = self.table.sample(lam_prime, rng.random(50000), rng.random(50000))
        self.assertTrue(np.all(lam >= -HALF_PI))
        self.assertTrue(np.all(lam <= HALF_PI))

    def test_kernel_mean(self):
        n = 100000
        rng = np.random.default_rng(5)
        lam = self.table.sample(np.full(n, 0.5), rng.random(n), rng.random(n))

        norm = kernel_normalization(self.s, DEFAULT_SPEC, TABLE_ROWS)
        expected = integrate(
            lambda x: x * norm(0.5) * norm.gaussian(x, 0.5),
            -HALF_PI,
            HALF_PI,
            points=norm.mass_points(0.5),
        ).value
        stderr = np.std(lam, ddof=1) / math.sqrt(n)
        self.assertLessEqual(abs(np.mean(lam) - expected), 4 * stderr + 1e-4)

    def test_bad_mass(self):
        norm = kernel_normalization(self.s, DEFAULT_SPEC, TABLE_ROWS)
        broken = SimpleNamespace(
            grid=norm.grid, values=2.0 * norm.values, gaussian=norm.gaussian
        )
        with mock.patch(
            "polcascade.transmission.montecarlo.kernel_normalization",
            return_value=broken,
        ):
            with self.assertRaises(SamplingTableError):
                SamplingTable(self.s, bins=512)


class ShrinkageEstimatorTest(SimpleTestCase):
    def test_agrees_with_quadrature(self):
        p = profile_from_preset("fig2-shrinkage")
        s = shrinkage_from_preset("fig2-shrinkage")
        cfg = McConfig(samples=200000, seed=7)
        for alpha in (0.0, 0.9):
            est = mc_pair_shrinkage(p, s, alpha, cfg)
            expected = pair_transmission_shrinkage(p, s, alpha) / math.pi
            self.assertTrue(est.agrees_with(expected), (alpha, est, expected))

    def test_sharp_kernel_is_simple_pair(self):
        p = profile_from_preset("fig1-simple")
        s = ShrinkageParams(sigma=1e6, eps_shift=0.0, eta=1.38)
        est = mc_pair_shrinkage(p, s, 0.6, McConfig(samples=100000, seed=9))
        expected = pair_transmission_raw(p, 0.6) / math.pi
        self.assertLessEqual(abs(est.mean - expected), 4 * est.stderr + 1e-3)
