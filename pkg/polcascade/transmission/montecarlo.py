#
# Photon-level Monte Carlo estimators. They simulate the same experiments
# the quadrature code integrates and serve as an independent cross-check.
#
# Randomness comes from numpy's Philox counter-based generator. The seed is
# expanded with SeedSequence and spawned into stream_count independent
# sub-streams; stream i simulates a fixed share of the photons and the
# results are merged in stream order, so an estimate depends on
# (seed, stream_count) only.
#

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import HALF_PI, ModelDomainError, angular_distance, p1
from .quadrature import DEFAULT_SPEC
from .shrinkage import kernel_normalization

log = logging.getLogger(__name__)

TABLE_BINS = 4096
# Kernel rows of the sampling table, coarser than the normalization cache.
TABLE_ROWS = 721
BATCH_SIZE = 1 << 16

# Largest relative error of the trapezoidal kernel mass before the sampling
# table is refused.
TABLE_MASS_TOLERANCE = 1e-3


class SamplingTableError(RuntimeError):
    pass


@dataclass(frozen=True)
class McConfig:
    samples: int
    seed: int = 1
    stream_count: int = 4

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise ModelDomainError("samples must be a positive integer")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2**64):
            raise ModelDomainError("seed must be a 64-bit unsigned integer")
        if int(self.stream_count) != self.stream_count or self.stream_count < 1:
            raise ModelDomainError("stream_count must be a positive integer")

    def streams(self):
        """
        (generator, photon count) for every sub-stream, in stream order.
        """
        children = np.random.SeedSequence(int(self.seed)).spawn(int(self.stream_count))
        base, extra = divmod(int(self.samples), int(self.stream_count))
        return [
            (np.random.Generator(np.random.Philox(child)), base + (i < extra))
            for i, child in enumerate(children)
        ]


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    samples: int

    def agrees_with(self, value, k=4.0):
        return abs(self.mean - value) <= k * self.stderr

    def as_dict(self):
        return {"mean": self.mean, "stderr": self.stderr, "samples": self.samples}


def _estimate(passed, samples):
    mean = passed / samples
    if samples == 1:
        return McEstimate(mean=mean, stderr=0.0, samples=1)
    # sample standard deviation of 0/1 outcomes
    std = math.sqrt(mean * (1.0 - mean) * samples / (samples - 1))
    return McEstimate(mean=mean, stderr=std / math.sqrt(samples), samples=samples)


def _uniform_axes(rng, n):
    # maps [0, 1) onto (-pi/2, pi/2]
    return HALF_PI - math.pi * rng.random(n)


def _run(cfg, batch):
    """
    Sum of batch(rng, n) over every sub-stream, in chunks of BATCH_SIZE.
    batch returns the number of photons that passed.
    """
    passed = 0
    for rng, count in cfg.streams():
        done = 0
        while done < count:
            n = min(BATCH_SIZE, count - done)
            passed += int(batch(rng, n))
            done += n
    return _estimate(passed, cfg.samples)


def _cascade_batch(p, angles):
    def batch(rng, n):
        lam = _uniform_axes(rng, n)
        u = rng.random((len(angles), n))
        ok = np.ones(n, dtype=bool)
        for row, theta in zip(u, angles):
            ok &= row < p1(angular_distance(lam, theta), p)
        return np.count_nonzero(ok)

    return batch


def mc_cascade(p, angles, cfg):
    return _run(cfg, _cascade_batch(p, [float(a) for a in angles]))


def mc_pair(p, alpha, cfg):
    """
    Estimates pair_transmission_raw(alpha) / pi.
    """
    return mc_cascade(p, [0.0, alpha], cfg)


def mc_triple(p, alpha, beta, cfg):
    return mc_cascade(p, [0.0, alpha, beta], cfg)


def mc_coincidence(p, alpha, beta, cfg, perpendicular=False):
    if perpendicular:
        beta = beta + HALF_PI
    return mc_cascade(p, [alpha, beta], cfg)


class SamplingTable(object):
    """
    Inverse-CDF tables of the kernel c(., lambda') for lambda' on the kernel
    normalization grid. Row j holds the cumulative distribution of the
    outgoing axis over `bins` equal bins of [-pi/2, pi/2].
    """

    def __init__(self, s, spec=None, bins=TABLE_BINS, points=TABLE_ROWS):
        norm = kernel_normalization(s, spec or DEFAULT_SPEC, points)
        self.s = s
        self.bins = bins
        self.grid = norm.grid
        self.step = norm.grid[1] - norm.grid[0]
        self.edges = np.linspace(-HALF_PI, HALF_PI, bins + 1)
        self.width = self.edges[1] - self.edges[0]

        dens = norm.values[:, None] * norm.gaussian(self.edges[None, :], self.grid[:, None])
        masses = 0.5 * self.width * (dens[:, 1:] + dens[:, :-1])
        totals = masses.sum(axis=1)
        worst = int(np.argmax(np.abs(totals - 1.0)))
        if not abs(totals[worst] - 1.0) <= TABLE_MASS_TOLERANCE:
            raise SamplingTableError(
                "Kernel mass at lambda' = %.6g is %.9g, expected 1"
                % (self.grid[worst], totals[worst])
            )
        cdf = np.zeros_like(dens)
        cdf[:, 1:] = np.cumsum(masses, axis=1) / totals[:, None]
        cdf[:, -1] = 1.0
        self.cdf = cdf
        # Row j shifted into [j, j + 1] so one searchsorted covers every row.
        self._flat = (cdf + np.arange(len(self.grid))[:, None]).ravel()
        log.debug("Built %d x %d sampling table for %s" % (cdf.shape + (s,)))

    def sample(self, lam_prime, u_row, u_bin):
        """
        Outgoing axes for incoming axes lam_prime. u_row picks between the two
        neighbouring table rows in proportion to the distance, u_bin drives the
        inverse CDF.
        """
        pos = (np.asarray(lam_prime) + HALF_PI) / self.step
        j = np.clip(np.floor(pos).astype(np.int64), 0, len(self.grid) - 2)
        j = j + (u_row < pos - j)

        width = self.bins + 1
        i = np.searchsorted(self._flat, j + u_bin, side="right") - 1
        k = np.clip(i - j * width, 0, self.bins - 1)
        lo = self.cdf[j, k]
        hi = self.cdf[j, k + 1]
        frac = (u_bin - lo) / np.where(hi > lo, hi - lo, 1.0)
        return self.edges[k] + np.clip(frac, 0.0, 1.0) * self.width


@functools.lru_cache(maxsize=4)
def sampling_table(s, spec=None, bins=TABLE_BINS):
    return SamplingTable(s, spec, bins)


def mc_pair_shrinkage(p, s, alpha, cfg, spec=None, bins=TABLE_BINS):
    """
    Estimates pair_transmission_shrinkage(alpha) / pi: an unpolarized photon
    passes the first polarizer with p1, leaves it with an axis drawn from
    the kernel and then meets the second polarizer.
    """
    table = sampling_table(s, spec or DEFAULT_SPEC, bins)

    def batch(rng, n):
        lam_prime = _uniform_axes(rng, n)
        u = rng.random((4, n))
        lam = table.sample(lam_prime, u[1], u[2])
        first = u[0] < p1(angular_distance(lam_prime, 0.0), p)
        second = u[3] < p1(angular_distance(lam, alpha), p)
        return np.count_nonzero(first & second)

    return _run(cfg, batch)
