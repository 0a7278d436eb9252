#
# Coincidence experiments on photon pairs that share one hidden polarization
# axis lambda, uniform on (-pi/2, pi/2]. Each photon meets its own analyzer
# and passes independently with p1. Outcomes are two-channel: transmitted
# counts as +1, absorbed as -1.
#
# With perpendicular=True the source emits crossed pairs, which is the same
# as turning the second analyzer by pi/2.
#

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .cascade import cascade_transmission, fold_points
from .core import (
    HALF_PI,
    ModelDomainError,
    angular_distance,
    canonical_angle,
    p1,
)
from .quadrature import integrate

log = logging.getLogger(__name__)

# Largest S a factorizable model can reach, and the slack allowed on it.
CHSH_LOCAL_BOUND = 2.0
CHSH_BOUND_SLACK = 1e-6
CHSH_QM_OPTIMUM = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class AnalyzerSettings:
    a: float
    a_prime: float
    b: float
    b_prime: float

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ModelDomainError("Analyzer angle %s is not finite" % name)
            object.__setattr__(self, name, canonical_angle(v))

    def as_degrees(self):
        return {
            "a": math.degrees(self.a),
            "a_prime": math.degrees(self.a_prime),
            "b": math.degrees(self.b),
            "b_prime": math.degrees(self.b_prime),
        }

    def rotated(self, offset):
        return AnalyzerSettings(
            self.a + offset,
            self.a_prime + offset,
            self.b + offset,
            self.b_prime + offset,
        )


# The settings at which the quantum reference reaches 2*sqrt(2).
TEXTBOOK_SETTINGS = AnalyzerSettings(0.0, math.pi / 4, math.pi / 8, 3 * math.pi / 8)


def _second_side(beta, perpendicular):
    if perpendicular:
        return beta + HALF_PI
    return beta


def coincidence_rate(p, alpha, beta, spec=None, perpendicular=False):
    beta = _second_side(beta, perpendicular)
    return cascade_transmission([p, p], [alpha, beta], spec) / math.pi


def correlation(p, alpha, beta, spec=None, perpendicular=False):
    beta = _second_side(beta, perpendicular)

    def integrand(lam):
        left = 2.0 * p1(angular_distance(lam, alpha), p) - 1.0
        right = 2.0 * p1(angular_distance(lam, beta), p) - 1.0
        return left * right

    r = integrate(
        integrand, -HALF_PI, HALF_PI, spec, points=fold_points([alpha, beta])
    ).value
    return r / math.pi


def qm_correlation(alpha, beta, perpendicular=False):
    r = math.cos(2.0 * (alpha - beta))
    if perpendicular:
        return -r
    return r


def _combine(e, settings):
    s = settings
    return e(s.a, s.b) - e(s.a, s.b_prime) + e(s.a_prime, s.b) + e(s.a_prime, s.b_prime)


def chsh(p, settings, spec=None, perpendicular=False):
    return _combine(
        lambda x, y: correlation(p, x, y, spec, perpendicular), settings
    )


def qm_chsh(settings, perpendicular=False):
    return _combine(lambda x, y: qm_correlation(x, y, perpendicular), settings)


def _lattice_size(step):
    if not (0 < step <= math.pi / 8 + 1e-15):
        raise ModelDomainError(
            "CHSH scan step must be in (0, pi/8], got %r" % (step,)
        )
    return int(math.ceil(math.pi / step - 1e-9))


def _scan(e, step):
    """
    Exhaustive search with a = 0 over the lattice k*step in [0, pi) for
    a', b and b', followed by a Nelder-Mead polish from the best point.
    e(x, y) depends on x - y only, so it is tabulated once per lattice
    distance.
    """
    n = _lattice_size(step)
    table = np.array([e(0.0, k * step) for k in range(n)])

    idx = np.arange(n)
    i = idx[:, None, None]
    j = idx[None, :, None]
    k = idx[None, None, :]
    s = table[j] - table[k] + table[np.abs(j - i)] + table[np.abs(k - i)]
    # argmax returns the first maximum in C order: ties go to the
    # lexicographically smallest (a', b, b').
    flat = int(np.argmax(s))
    bi, bj, bk = np.unravel_index(flat, s.shape)
    lattice_best = float(s[bi, bj, bk])
    start = np.array([bi, bj, bk], dtype=float) * step
    log.debug("CHSH lattice of %d points peaks at %.12g" % (n**3, lattice_best))

    def negative_s(x):
        return -_combine(e, AnalyzerSettings(0.0, x[0], x[1], x[2]))

    res = scipy.optimize.minimize(
        negative_s,
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 2000},
    )
    polished = -float(res.fun)
    if polished > lattice_best:
        return polished, AnalyzerSettings(0.0, *res.x)
    return lattice_best, AnalyzerSettings(0.0, *start)


def chsh_scan(p, step, spec=None, perpendicular=False):
    return _scan(lambda x, y: correlation(p, x, y, spec, perpendicular), step)


def qm_chsh_scan(step, perpendicular=False):
    return _scan(lambda x, y: qm_correlation(x, y, perpendicular), step)


def bound_respected(s):
    return s <= CHSH_LOCAL_BOUND + CHSH_BOUND_SLACK
