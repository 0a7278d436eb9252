#
# Generalized transmission model: a photon entering a polarizer with axis
# lambda' leaves it with axis lambda drawn from the kernel
#
#     c(lambda, lambda') = A(lambda') exp(-sigma (lambda' - lambda_e(lambda))^2)
#
# where lambda_e pulls axes below the watershed angle eta toward the polarizer
# axis and axes above it toward the perpendicular. A(lambda') normalizes the
# kernel over lambda in [-pi/2, pi/2].
#

import enum
import functools
import logging
import math
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .cascade import fold_points
from .core import (
    HALF_PI,
    ModelDomainError,
    TransmissionProfileParams,
    angular_distance,
    canonical_angle,
    p1,
    preset_values,
)
from .quadrature import DEFAULT_SPEC, integrate

log = logging.getLogger(__name__)

KERNEL_CACHE_POINTS = 1441
OUTPUT_TABLE_POINTS = 181

# Kernel peaks get breakpoints at these multiples of the kernel width.
_PEAK_WINDOWS = (8.0, 16.0)


@dataclass(frozen=True)
class ShrinkageParams:
    sigma: float
    eps_shift: float
    eta: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ModelDomainError("sigma must be positive, got %r" % (self.sigma,))
        if not (math.isfinite(self.eps_shift) and self.eps_shift >= 0):
            raise ModelDomainError(
                "eps_shift must be nonnegative, got %r" % (self.eps_shift,)
            )
        if not (math.pi / 4 < self.eta < HALF_PI):
            raise ModelDomainError(
                "eta must lie strictly between pi/4 and pi/2, got %r" % (self.eta,)
            )

    @property
    def width(self):
        # standard deviation of the kernel Gaussian
        return 1.0 / math.sqrt(2.0 * self.sigma)

    def as_dict(self):
        return asdict(self)


class TotalsConvention(enum.Enum):
    RAW = "raw"
    OVER_PI = "over_pi"
    OVER_HALF_PI = "over_half_pi"

    @property
    def factor(self):
        return {
            TotalsConvention.RAW: 1.0,
            TotalsConvention.OVER_PI: 1.0 / math.pi,
            TotalsConvention.OVER_HALF_PI: 1.0 / HALF_PI,
        }[self]


def shrinkage_from_preset(name):
    v = preset_values(name)
    if "sigma" not in v:
        raise ModelDomainError("Preset %r has no shrinkage parameters" % name)
    return ShrinkageParams(sigma=v["sigma"], eps_shift=v["eps_shift"], eta=v["eta"])


def _lambda_e_array(lam, s):
    lam = np.asarray(lam, dtype=float)
    x = np.abs(lam)
    inner = x * (1.0 + s.eps_shift * (s.eta - x))
    outer = HALF_PI - (HALF_PI - x) * (1.0 + s.eps_shift * (x - s.eta))
    return np.sign(lam) * np.where(x <= s.eta, inner, outer)


def lambda_e(lam, s):
    """
    Axis a photon of polarization lam is pulled to. Odd in lam; fixes 0 and
    +/- pi/2 and is continuous across +/- eta.
    """
    r = _lambda_e_array(canonical_angle(lam), s)
    if np.ndim(r) == 0:
        return float(r)
    return r


class KernelNormalization(object):
    """
    Cache of A(lambda') on an equidistant grid over [-pi/2, pi/2], read back
    through a cubic spline. Built once per (ShrinkageParams, QuadratureSpec).
    """

    def __init__(self, s, spec=None, points=KERNEL_CACHE_POINTS):
        self.s = s
        self.spec = spec or DEFAULT_SPEC
        self._dense = np.linspace(-HALF_PI, HALF_PI, 4097)
        self._dense_e = _lambda_e_array(self._dense, s)

        self.grid = np.linspace(-HALF_PI, HALF_PI, points)
        log.debug(
            "Building kernel normalization cache for %s on %d points" % (s, points)
        )
        values = np.array([1.0 / self.mass(lp) for lp in self.grid])
        self.values = values
        self._spline = CubicSpline(self.grid, values)

    def roots(self, target):
        """
        Solutions lambda of lambda_e(lambda) = target, located on a dense grid
        and refined by linear interpolation.
        """
        g = self._dense_e - target
        x = self._dense
        i = np.flatnonzero((g[:-1] * g[1:] <= 0) & (g[:-1] != g[1:]))
        return x[i] - g[i] * (x[i + 1] - x[i]) / (g[i + 1] - g[i])

    def mass_points(self, lam_prime):
        pts = [-self.s.eta, 0.0, self.s.eta]
        w = self.s.width
        for r in self.roots(lam_prime):
            pts.append(r)
            for k in _PEAK_WINDOWS:
                pts.extend((r - k * w, r + k * w))
        return pts

    def gaussian(self, lam, lam_prime):
        return np.exp(-self.s.sigma * (lam_prime - _lambda_e_array(lam, self.s)) ** 2)

    def mass(self, lam_prime):
        """
        Integral over lambda of the unnormalized kernel at fixed lambda'.
        """
        return integrate(
            lambda lam: self.gaussian(lam, lam_prime),
            -HALF_PI,
            HALF_PI,
            self.spec,
            points=self.mass_points(lam_prime),
        ).value

    def __call__(self, lam_prime):
        return self._spline(lam_prime)


@functools.lru_cache(maxsize=8)
def kernel_normalization(s, spec=None, points=KERNEL_CACHE_POINTS):
    return KernelNormalization(s, spec, points)


@dataclass(frozen=True, eq=False)
class OutputDistribution:
    """
    d(lambda) sampled on a grid covering [-pi/2, pi/2]. The grid is split at
    the kinks of lambda_e (0 and +/- eta) and each smooth piece is read back
    through its own cubic spline.
    """

    grid: np.ndarray
    densities: np.ndarray
    knots: tuple
    splines: tuple

    def __post_init__(self):
        if np.any(self.densities < 0):
            raise ModelDomainError("Output distribution must be nonnegative")

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = np.empty_like(lam)
        piece = np.clip(np.searchsorted(self.knots, lam, side="right") - 1, 0, len(self.splines) - 1)
        for i, spline in enumerate(self.splines):
            m = piece == i
            if m.any():
                out[m] = spline(lam[m])
        # spline overshoot near a zero density
        return np.maximum(out, 0.0)


class ShrinkageModel(object):
    def __init__(
        self,
        profile,
        s,
        spec=None,
        cache_points=KERNEL_CACHE_POINTS,
        table_points=OUTPUT_TABLE_POINTS,
    ):
        if not isinstance(profile, TransmissionProfileParams):
            raise ModelDomainError("profile must be TransmissionProfileParams")
        self.profile = profile
        self.s = s
        self.spec = spec or DEFAULT_SPEC
        self.table_points = table_points
        self.norm = kernel_normalization(s, self.spec, cache_points)

    @property
    def knots(self):
        return (-HALF_PI, -self.s.eta, 0.0, self.s.eta, HALF_PI)

    def kernel(self, lam, lam_prime):
        lam_prime = canonical_angle(lam_prime)
        r = self.norm(lam_prime) * self.norm.gaussian(canonical_angle(lam), lam_prime)
        if np.ndim(r) == 0:
            return float(r)
        return r

    def kernel_mass(self, lam_prime):
        """
        Integral of c(lambda, lambda') over lambda; 1 up to cache accuracy.
        """
        return float(self.norm(lam_prime)) * self.norm.mass(lam_prime)

    def _direct_output(self, lam):
        center = float(_lambda_e_array(lam, self.s))
        w = self.s.width
        pts = [0.0, center]
        for k in _PEAK_WINDOWS:
            pts.extend((center - k * w, center + k * w))

        def integrand(lp):
            return (
                p1(angular_distance(lp, 0.0), self.profile)
                * self.norm(lp)
                * np.exp(-self.s.sigma * (lp - center) ** 2)
            )

        return integrate(integrand, -HALF_PI, HALF_PI, self.spec, points=pts).value

    def output_distribution(self, lam):
        """
        d(lambda) by direct quadrature over lambda'.
        """
        lam = canonical_angle(lam)
        if np.ndim(lam) == 0:
            return max(self._direct_output(lam), 0.0)
        return np.maximum(np.array([self._direct_output(x) for x in lam]), 0.0)

    @cached_property
    def table(self):
        knots = self.knots
        grids = []
        splines = []
        for lo, hi in zip(knots, knots[1:]):
            g = np.linspace(lo, hi, self.table_points)
            d = np.array([self._direct_output(x) for x in g])
            grids.append((g, d))
            splines.append(CubicSpline(g, d))
        log.debug(
            "Built output distribution table for %s, %s" % (self.profile, self.s)
        )
        grid = np.concatenate([grids[0][0]] + [g[1:] for g, _ in grids[1:]])
        dens = np.concatenate([grids[0][1]] + [d[1:] for _, d in grids[1:]])
        return OutputDistribution(
            grid=grid,
            densities=np.maximum(dens, 0.0),
            knots=knots,
            splines=tuple(splines),
        )

    def pair_transmission(self, alpha):
        table = self.table

        def integrand(lam):
            return table(lam) * p1(angular_distance(lam, alpha), self.profile)

        return integrate(
            integrand,
            -HALF_PI,
            HALF_PI,
            self.spec,
            points=list(self.knots[1:-1]) + fold_points([alpha]),
        ).value

    def output_integral(self, weight=None):
        """
        Integral of d(lambda) (optionally times weight(lambda)) with d
        evaluated by direct quadrature at every node.
        """

        def integrand(lam):
            d = np.maximum(np.array([self._direct_output(x) for x in lam]), 0.0)
            if weight is not None:
                d = d * weight(lam)
            return d

        return integrate(
            integrand, -HALF_PI, HALF_PI, self.spec, points=list(self.knots[1:-1])
        ).value

    @cached_property
    def totals(self):
        """
        Raw integrals of d and of d weighted by the first polarizer.
        """
        i1 = self.output_integral()
        i2 = self.output_integral(lambda lam: p1(angular_distance(lam, 0.0), self.profile))
        return i1, i2

    def total_ratios(self, convention=TotalsConvention.OVER_PI):
        n = convention.factor
        i1, i2 = self.totals
        return n * i1, n * i2


@functools.lru_cache(maxsize=8)
def _cached_model(profile, s, spec, cache_points, table_points):
    return ShrinkageModel(profile, s, spec, cache_points, table_points)


def get_model(
    profile,
    s,
    spec=None,
    cache_points=KERNEL_CACHE_POINTS,
    table_points=OUTPUT_TABLE_POINTS,
):
    return _cached_model(profile, s, spec or DEFAULT_SPEC, cache_points, table_points)


def kernel(lam, lam_prime, s, spec=None):
    norm = kernel_normalization(s, spec or DEFAULT_SPEC, KERNEL_CACHE_POINTS)
    lam_prime = canonical_angle(lam_prime)
    return float(norm(lam_prime) * norm.gaussian(canonical_angle(lam), lam_prime))


def output_distribution(p, s, lam, spec=None):
    return get_model(p, s, spec).output_distribution(lam)


def pair_transmission_shrinkage(p, s, alpha, spec=None):
    return get_model(p, s, spec).pair_transmission(alpha)


def total_ratios(p, s, spec=None, convention=TotalsConvention.OVER_PI):
    return get_model(p, s, spec).total_ratios(convention)
