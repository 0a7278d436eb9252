#
# One-dimensional Gauss-Legendre quadrature with node doubling.
#
# Integrands are called with a numpy array of abscissae and must return an
# array of the same length. Every integral of the model runs through
# integrate(), usually over the polarization range [-pi/2, pi/2].
#

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

log = logging.getLogger(__name__)


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    base_nodes: int = 64
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_doublings: int = 6

    def __post_init__(self):
        if int(self.base_nodes) != self.base_nodes or self.base_nodes < 16:
            raise ValueError("base_nodes must be an integer >= 16")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("Quadrature tolerances must be positive")
        if int(self.max_doublings) != self.max_doublings or self.max_doublings < 1:
            raise ValueError("max_doublings must be a positive integer")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class IntegralResult:
    value: float
    est_error: float
    nodes_used: int
    converged: bool


@functools.lru_cache(maxsize=16)
def legendre_rule(n):
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _evaluate(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    bad = ~np.isfinite(y)
    if bad.any():
        i = int(np.argmax(bad))
        raise QuadratureError(
            "Integrand returned %r at abscissa %.17g" % (float(y[i]), float(x[i]))
        )
    return y


def _fixed_rule(f, lo, hi, n):
    x, w = legendre_rule(n)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    # np.sum uses pairwise summation, so the result does not depend on how
    # the integrand values were produced.
    return half * np.sum(w * _evaluate(f, mid + half * x))


def _integrate_piece(f, lo, hi, spec, abs_tol):
    n = spec.base_nodes
    prev = _fixed_rule(f, lo, hi, n)
    used = n
    diff = math.inf
    for _ in range(spec.max_doublings):
        n *= 2
        cur = _fixed_rule(f, lo, hi, n)
        used += n
        diff = abs(cur - prev)
        prev = cur
        if diff <= max(abs_tol, spec.rel_tol * abs(cur)):
            return prev, diff, used, True
    return prev, diff, used, False


def _breakpoints(lo, hi, points):
    edges = [lo]
    if points is not None:
        width = hi - lo
        for p in sorted(float(p) for p in np.ravel(points)):
            if lo < p < hi and p - edges[-1] > 1e-12 * width:
                edges.append(p)
        if hi - edges[-1] <= 1e-12 * width and len(edges) > 1:
            edges.pop()
    edges.append(hi)
    return edges


def integrate(f, lo, hi, spec=None, points=None):
    """
    Integrate f over [lo, hi].

    The rule is applied at spec.base_nodes Gauss-Legendre nodes and the node
    count is doubled until two successive values agree within tolerance or
    spec.max_doublings is reached. If points is given, the interval is split
    at those abscissae (kinks of the integrand) and each piece is integrated
    the same way.
    """
    if spec is None:
        spec = DEFAULT_SPEC
    if not lo < hi:
        raise QuadratureError("integrate needs lo < hi, got [%r, %r]" % (lo, hi))

    edges = _breakpoints(float(lo), float(hi), points)
    width = hi - lo
    values = []
    err = 0.0
    used = 0
    converged = True
    for a, b in zip(edges, edges[1:]):
        v, e, n, ok = _integrate_piece(
            f, a, b, spec, spec.abs_tol * (b - a) / width
        )
        values.append(v)
        err += e
        used += n
        converged = converged and ok

    value = math.fsum(values)
    if converged and err > max(spec.abs_tol, spec.rel_tol * abs(value)):
        converged = False
    if not converged:
        log.warning(
            "Quadrature on [%g, %g] did not converge: value %.15g, error estimate %.3g after %d nodes"
            % (lo, hi, value, err, used)
        )
    return IntegralResult(value=value, est_error=err, nodes_used=used, converged=converged)
