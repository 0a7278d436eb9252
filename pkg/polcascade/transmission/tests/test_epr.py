from django.test import SimpleTestCase

import math

from polcascade.transmission.cascade import cascade_transmission, pair_transmission_raw
from polcascade.transmission.core import HALF_PI, ModelDomainError, profile_from_preset
from polcascade.transmission.epr import (
    CHSH_QM_OPTIMUM,
    TEXTBOOK_SETTINGS,
    AnalyzerSettings,
    bound_respected,
    chsh,
    chsh_scan,
    coincidence_rate,
    correlation,
    qm_chsh,
    qm_chsh_scan,
    qm_correlation,
)


class AnalyzerSettingsTest(SimpleTestCase):
    def test_canonical(self):
        s = AnalyzerSettings(math.pi, -HALF_PI, HALF_PI, 0.3 + math.pi)
        self.assertAlmostEqual(s.a, 0.0, delta=1e-15)
        self.assertAlmostEqual(s.a_prime, HALF_PI, delta=1e-15)
        self.assertEqual(s.b, HALF_PI)
        self.assertAlmostEqual(s.b_prime, 0.3, delta=1e-15)

    def test_degrees(self):
        d = TEXTBOOK_SETTINGS.as_degrees()
        self.assertAlmostEqual(d["a_prime"], 45.0, delta=1e-12)
        self.assertAlmostEqual(d["b_prime"], 67.5, delta=1e-12)

    def test_rotated(self):
        r = TEXTBOOK_SETTINGS.rotated(math.pi / 7)
        self.assertAlmostEqual(r.a, math.pi / 7, delta=1e-15)
        self.assertAlmostEqual(r.b_prime, 3 * math.pi / 8 + math.pi / 7 - math.pi, delta=1e-14)

    def test_not_finite(self):
        with self.assertRaises(ModelDomainError):
            AnalyzerSettings(0.0, float("nan"), 0.0, 0.0)


class CoincidenceTest(SimpleTestCase):
    def setUp(self):
        self.p = profile_from_preset("fig1-simple")

    def test_matches_pair(self):
        for alpha in (0.0, 0.4, 1.1):
            self.assertAlmostEqual(
                coincidence_rate(self.p, 0.0, alpha) * math.pi,
                pair_transmission_raw(self.p, alpha),
                delta=1e-12,
            )

    def test_symmetric(self):
        self.assertAlmostEqual(
            coincidence_rate(self.p, 0.2, 0.9),
            coincidence_rate(self.p, 0.9, 0.2),
            delta=1e-12,
        )

    def test_rotation_invariant(self):
        offset = math.pi / 7
        for alpha, beta in ((0.0, 0.4), (0.2, 1.3), (-1.1, 0.5)):
            self.assertAlmostEqual(
                coincidence_rate(self.p, alpha + offset, beta + offset),
                coincidence_rate(self.p, alpha, beta),
                delta=1e-10,
            )

    def test_perpendicular(self):
        crossed = coincidence_rate(self.p, 0.3, 0.5, perpendicular=True)
        turned = cascade_transmission([self.p, self.p], [0.3, 0.5 + HALF_PI]) / math.pi
        self.assertAlmostEqual(crossed, turned, delta=1e-15)


class CorrelationTest(SimpleTestCase):
    def setUp(self):
        self.p = profile_from_preset("fig1-simple")

    def test_bounded(self):
        for alpha, beta in ((0.0, 0.0), (0.0, 0.5), (0.3, 1.4), (-1.0, 1.0)):
            self.assertLessEqual(abs(correlation(self.p, alpha, beta)), 1.0)
        self.assertGreaterEqual(correlation(self.p, 0.7, 0.7), 0.0)

    def test_rotation_invariant(self):
        offset = math.pi / 7
        for alpha, beta in ((0.0, 0.4), (0.2, 1.3)):
            self.assertAlmostEqual(
                correlation(self.p, alpha, beta),
                correlation(self.p, alpha + offset, beta + offset),
                delta=1e-9,
            )

    def test_perpendicular(self):
        self.assertAlmostEqual(
            correlation(self.p, 0.1, 0.6, perpendicular=True),
            correlation(self.p, 0.1, 0.6 + HALF_PI),
            delta=1e-15,
        )

    def test_qm(self):
        self.assertEqual(qm_correlation(0.0, 0.0), 1.0)
        self.assertAlmostEqual(qm_correlation(0.0, math.pi / 4), 0.0, delta=1e-15)
        self.assertAlmostEqual(qm_correlation(0.2, 0.2, perpendicular=True), -1.0, delta=1e-15)


class ChshTest(SimpleTestCase):
    def setUp(self):
        self.p = profile_from_preset("fig1-simple")

    def test_qm_textbook(self):
        self.assertAlmostEqual(qm_chsh(TEXTBOOK_SETTINGS), CHSH_QM_OPTIMUM, delta=1e-9)
        self.assertFalse(bound_respected(qm_chsh(TEXTBOOK_SETTINGS)))

    def test_equal_settings(self):
        s = AnalyzerSettings(0.4, 0.4, 0.4, 0.4)
        self.assertAlmostEqual(
            chsh(self.p, s), 2 * correlation(self.p, 0.4, 0.4), delta=1e-12
        )

    def test_rotation_invariant(self):
        for settings in (TEXTBOOK_SETTINGS, AnalyzerSettings(0.1, 0.9, -0.4, 1.2)):
            turned = settings.rotated(math.pi / 7)
            self.assertAlmostEqual(chsh(self.p, turned), chsh(self.p, settings), delta=1e-9)
            self.assertAlmostEqual(qm_chsh(turned), qm_chsh(settings), delta=1e-12)

    def test_hv_textbook(self):
        self.assertTrue(bound_respected(chsh(self.p, TEXTBOOK_SETTINGS)))

    def test_qm_scan(self):
        value, settings = qm_chsh_scan(math.pi / 24)
        self.assertAlmostEqual(value, CHSH_QM_OPTIMUM, delta=1e-3)
        self.assertEqual(settings.a, 0.0)

    def test_hv_scan(self):
        value, settings = chsh_scan(self.p, math.pi / 8)
        self.assertTrue(bound_respected(value))
        self.assertGreater(value, 0.0)
        self.assertAlmostEqual(chsh(self.p, settings), value, delta=1e-8)

    def test_scan_step(self):
        with self.assertRaises(ModelDomainError):
            qm_chsh_scan(0.0)
        with self.assertRaises(ModelDomainError):
            qm_chsh_scan(math.pi / 4)
