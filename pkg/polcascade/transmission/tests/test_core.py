from django.test import SimpleTestCase

import math

import numpy as np

from polcascade.transmission.core import (
    HALF_PI,
    MalusTarget,
    ModelDomainError,
    TransmissionProfileParams,
    angular_distance,
    belifante_profile,
    canonical_angle,
    malus,
    p1,
    phi,
    profile_from_preset,
    qm_cascade,
    qm_pair,
    qm_triple,
)


class AngleTest(SimpleTestCase):
    def test_canonical_range(self):
        x = np.random.default_rng(3).uniform(-20, 20, 500)
        c = canonical_angle(x)
        self.assertTrue(np.all(c > -HALF_PI))
        self.assertTrue(np.all(c <= HALF_PI))
        self.assertTrue(np.allclose(np.cos(2 * c), np.cos(2 * x)))

    def test_canonical_endpoints(self):
        self.assertEqual(canonical_angle(HALF_PI), HALF_PI)
        self.assertEqual(canonical_angle(-HALF_PI), HALF_PI)
        self.assertEqual(canonical_angle(0.0), 0.0)
        self.assertAlmostEqual(canonical_angle(math.pi), 0.0, delta=1e-15)

    def test_canonical_idempotent(self):
        for x in (0.3, -1.2, 2.9, 7.0, -HALF_PI):
            c = canonical_angle(x)
            self.assertEqual(canonical_angle(c), c)

    def test_distance_metric(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            x, y, z = rng.uniform(-10, 10, 3)
            d = angular_distance(x, y)
            self.assertGreaterEqual(d, 0.0)
            self.assertLessEqual(d, HALF_PI)
            self.assertAlmostEqual(d, angular_distance(y, x), delta=1e-12)
            self.assertLessEqual(d, angular_distance(x, z) + angular_distance(z, y) + 1e-12)

    def test_distance_examples(self):
        self.assertAlmostEqual(angular_distance(0.0, math.pi), 0.0, delta=1e-15)
        self.assertAlmostEqual(angular_distance(0.1, HALF_PI + 0.1), HALF_PI, delta=1e-15)
        self.assertAlmostEqual(angular_distance(-0.2, 0.3), 0.5, delta=1e-15)


class ProfileTest(SimpleTestCase):
    def setUp(self):
        self.p = profile_from_preset("fig1-simple")

    def test_params_validation(self):
        for bad in (0.0, -1.0, float("nan"), float("inf"), "x", None):
            with self.assertRaises(ModelDomainError):
                TransmissionProfileParams(a=bad, e=1.0, c=1.0)
        TransmissionProfileParams(a=np.float64(1.0), e=np.int64(2), c=3)

    def test_phi_limits(self):
        self.assertEqual(phi(0.0, self.p), 0.0)
        self.assertTrue(0.98 < phi(HALF_PI, self.p) < 1.0)
        with self.assertRaises(ModelDomainError):
            phi(-0.1, self.p)

    def test_phi_at_one_radian(self):
        q = profile_from_preset("fig2-shrinkage")
        s = 2.38
        expected = -math.expm1(-s) / (1.0 + 186.8 * math.exp(-s))
        self.assertAlmostEqual(phi(1.0, q), expected, delta=1e-14)
        self.assertAlmostEqual(phi(1.0, q), 0.05, delta=1e-3)

    def test_phi_monotone(self):
        rng = np.random.default_rng(11)
        g = np.linspace(0.0, HALF_PI, 400)
        for _ in range(20):
            q = TransmissionProfileParams(*rng.uniform([0.5, 1.0, 1.0], [4.0, 5.0, 400.0]))
            self.assertTrue(np.all(np.diff(phi(g, q)) >= 0))

    def test_p1(self):
        self.assertEqual(p1(0.0, self.p), 1.0)
        self.assertTrue(0.01 < p1(HALF_PI, self.p) < 0.02)
        # folding can land one ulp above pi/2
        self.assertTrue(0 < p1(HALF_PI + 1e-13, self.p) < 1)
        with self.assertRaises(ModelDomainError):
            p1(HALF_PI + 1e-3, self.p)
        with self.assertRaises(ModelDomainError):
            p1(-1e-3, self.p)

    def test_p1_array(self):
        d = np.array([0.0, 0.5, 1.0])
        r = p1(d, self.p)
        self.assertEqual(r.shape, (3,))
        self.assertEqual(r[1], p1(0.5, self.p))

    def test_belifante_profile(self):
        self.assertEqual(belifante_profile(0.0), 1.0)
        self.assertAlmostEqual(belifante_profile(math.pi / 4), 0.5, delta=1e-15)


class ReferenceTest(SimpleTestCase):
    def test_malus(self):
        self.assertEqual(malus(0.0, MalusTarget()), 1.0)
        self.assertAlmostEqual(malus(HALF_PI, MalusTarget(0.1)), 0.1, delta=1e-15)
        self.assertAlmostEqual(malus(math.pi / 3, MalusTarget()), 0.25, delta=1e-15)

    def test_malus_target_validation(self):
        for bad in (-0.1, 1.0, 2.0):
            with self.assertRaises(ModelDomainError):
                MalusTarget(eps_leak=bad)

    def test_qm_triple(self):
        for a in np.linspace(0, HALF_PI, 7):
            self.assertAlmostEqual(qm_triple(a, 0.0), math.cos(a) ** 4, delta=1e-15)

    def test_qm_cascade(self):
        self.assertAlmostEqual(qm_cascade([0.0, 0.4]), qm_pair(0.4), delta=1e-15)
        self.assertAlmostEqual(
            qm_cascade([0.0, 0.4, 1.1]), qm_triple(0.4, 1.1), delta=1e-15
        )
        self.assertAlmostEqual(
            qm_cascade([0.0, math.pi / 4, HALF_PI]), 0.25, delta=1e-15
        )
        with self.assertRaises(ModelDomainError):
            qm_cascade([0.0])

    def test_unknown_preset(self):
        with self.assertRaises(ModelDomainError):
            profile_from_preset("fig9")
