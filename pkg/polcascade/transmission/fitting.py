#
# Least-squares recovery of profile (and shrinkage) parameters from a target
# transmission curve, normally the generalized Malus law.
#

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .cascade import pair_transmission_raw
from .core import (
    HALF_PI,
    MalusTarget,
    ModelDomainError,
    TransmissionProfileParams,
    malus,
    preset_values,
)
from .quadrature import DEFAULT_SPEC
from .shrinkage import ShrinkageModel, ShrinkageParams

log = logging.getLogger(__name__)

REPORT_SCHEMA = 1


class ParameterBoundsError(ValueError):
    pass


class FitModel(enum.Enum):
    SIMPLE = "simple"
    SHRINKAGE = "shrinkage"

    @property
    def parameter_names(self):
        if self is FitModel.SIMPLE:
            return ("a", "e", "c")
        return ("a", "e", "c", "sigma", "eps_shift", "eta")

    @property
    def preset(self):
        if self is FitModel.SIMPLE:
            return "fig1-simple"
        return "fig2-shrinkage"


# Positive parameters are optimized in log coordinates, the rest directly
# with clamping to the box.
LOG_PARAMETERS = frozenset(("a", "e", "c", "sigma"))

# Coarser shrinkage caches for fits, which rebuild the model per evaluation.
FIT_KERNEL_POINTS = 361
FIT_TABLE_POINTS = 91

DEFAULT_BOUNDS = {
    "a": (1e-3, 1e3),
    "e": (0.1, 20.0),
    "c": (1e-3, 1e5),
    "sigma": (1e-2, 1e7),
    "eps_shift": (0.0, 2.0),
    "eta": (math.pi / 4 + 1e-6, HALF_PI - 1e-6),
}


@dataclass(frozen=True, eq=False)
class FitProblem:
    model: FitModel
    grid: np.ndarray
    target: MalusTarget = field(default_factory=MalusTarget)
    weights: np.ndarray = None
    start: tuple = None
    bounds: tuple = None
    # explicit target values on the grid; replaces the Malus law when given
    target_values: np.ndarray = None

    def __post_init__(self):
        names = self.model.parameter_names
        grid = np.asarray(self.grid, dtype=float)
        if grid.ndim != 1 or len(grid) == 0:
            raise ModelDomainError("Fit grid must be a nonempty list of angles")
        object.__setattr__(self, "grid", grid)

        if self.weights is None:
            weights = np.ones_like(grid)
        else:
            weights = np.asarray(self.weights, dtype=float)
        if weights.shape != grid.shape:
            raise ModelDomainError("Fit grid and weights differ in length")
        if np.any(weights < 0):
            raise ModelDomainError("Fit weights must be nonnegative")
        object.__setattr__(self, "weights", weights)

        if self.target_values is not None:
            tv = np.asarray(self.target_values, dtype=float)
            if tv.shape != grid.shape:
                raise ModelDomainError("Target values must match the fit grid")
            object.__setattr__(self, "target_values", tv)

        bounds = self.bounds
        if bounds is None:
            bounds = tuple(DEFAULT_BOUNDS[n] for n in names)
        bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
        if len(bounds) != len(names):
            raise ModelDomainError("Need one (low, high) bound per parameter")
        for n, (lo, hi) in zip(names, bounds):
            if not lo <= hi:
                raise ModelDomainError("Bound for %s is empty" % n)
            if n in LOG_PARAMETERS and not lo > 0:
                raise ModelDomainError("Lower bound for %s must be positive" % n)
        object.__setattr__(self, "bounds", bounds)

        start = self.start
        if start is None:
            p = preset_values(self.model.preset)
            start = tuple(p[n] for n in names)
        start = tuple(float(v) for v in start)
        if len(start) != len(names):
            raise ModelDomainError(
                "Model %s takes %d parameters" % (self.model.value, len(names))
            )
        object.__setattr__(self, "start", start)
        check_bounds(self, start)

    @property
    def names(self):
        return self.model.parameter_names

    @property
    def targets(self):
        if self.target_values is not None:
            return self.target_values
        return malus(self.grid, self.target)

    @property
    def underdetermined(self):
        return int(np.count_nonzero(self.weights)) < len(self.names)


@dataclass(eq=False)
class FitResult:
    params: dict
    objective: float
    iterations: int
    converged: bool
    per_point_residuals: np.ndarray
    evaluations: int = 0
    replica: int = 0
    underdetermined: bool = False


def check_bounds(problem, params):
    for n, v, (lo, hi) in zip(problem.names, params, problem.bounds):
        if not (lo <= v <= hi):
            raise ParameterBoundsError(
                "Parameter %s = %r outside bounds [%r, %r]" % (n, v, lo, hi)
            )


def model_curve(model, params, grid, spec=None):
    """
    UNIT_AT_ZERO pair transmission of the selected model on the grid. The
    value at alpha = 0 is computed separately, the grid need not contain 0.
    """
    spec = spec or DEFAULT_SPEC
    profile = TransmissionProfileParams(a=params[0], e=params[1], c=params[2])
    if model is FitModel.SIMPLE:

        def evaluate(alpha):
            return pair_transmission_raw(profile, alpha, spec)

    else:
        s = ShrinkageParams(sigma=params[3], eps_shift=params[4], eta=params[5])
        evaluate = ShrinkageModel(
            profile, s, spec, FIT_KERNEL_POINTS, FIT_TABLE_POINTS
        ).pair_transmission

    zero = evaluate(0.0)
    if not zero > 0:
        raise ModelDomainError("Pair transmission at alpha = 0 vanishes")
    return np.array([evaluate(float(a)) for a in grid]) / zero


def residuals(problem, params, spec=None):
    params = tuple(float(v) for v in params)
    check_bounds(problem, params)
    return model_curve(problem.model, params, problem.grid, spec) - problem.targets


def objective(problem, params, spec=None):
    r = residuals(problem, params, spec)
    return float(np.sum(problem.weights * r * r))


class _Transform(object):
    def __init__(self, problem):
        self.problem = problem
        self.log = np.array([n in LOG_PARAMETERS for n in problem.names])
        self.lo = np.array([b[0] for b in problem.bounds])
        self.hi = np.array([b[1] for b in problem.bounds])

    def to_internal(self, params):
        params = np.asarray(params, dtype=float)
        return np.where(self.log, np.log(np.where(self.log, params, 1.0)), params)

    def to_params(self, z):
        z = np.asarray(z, dtype=float)
        raw = np.where(self.log, np.exp(np.where(self.log, z, 0.0)), z)
        return tuple(float(v) for v in np.clip(raw, self.lo, self.hi))

    def spread(self, scale):
        """
        Per-coordinate standard deviation of the start dispersion.
        """
        return np.where(self.log, scale, scale * (self.hi - self.lo) / 4.0)


def _start_points(problem, starts, seed, spread):
    t = _Transform(problem)
    rng = np.random.default_rng(seed)
    z0 = t.to_internal(problem.start)
    points = [problem.start]
    for _ in range(1, starts):
        z = z0 + rng.normal(0.0, 1.0, size=len(z0)) * t.spread(spread)
        points.append(t.to_params(z))
    return points


XATOL = 1e-8
FATOL = 1e-12


def _simplex_settled(sim, fsim, xatol, fatol):
    return bool(
        np.max(np.abs(sim[1:] - sim[0])) <= xatol
        or np.max(np.abs(fsim[1:] - fsim[0])) <= fatol
    )


def nelder_mead(fn, x0, xatol, fatol, maxiter, maxfev):
    """
    Nelder-Mead that stops as soon as the simplex spans at most xatol in every
    coordinate OR its values differ by at most fatol. scipy only stops when
    both hold, so the search is advanced one iteration per call, handing the
    simplex back through initial_simplex, and the test is made here. Values
    are memoized, so handing the simplex back costs no evaluations.

    Returns (x, value, iterations, converged).
    """
    memo = {}

    def cached(z):
        key = tuple(z.tolist())
        if key not in memo:
            memo[key] = float(fn(z))
        return memo[key]

    simplex = None
    nit = 0
    while True:
        # scipy counts iterations from 1: maxiter 1 only builds and sorts the
        # starting simplex, maxiter 2 runs a single iteration.
        res = scipy.optimize.minimize(
            cached,
            x0,
            method="Nelder-Mead",
            options={
                "xatol": xatol,
                "fatol": fatol,
                "maxiter": 1 if simplex is None else 2,
                "initial_simplex": simplex,
            },
        )
        sim, fsim = res.final_simplex
        stalled = False
        if simplex is not None:
            nit += 1
            stalled = np.array_equal(sim, simplex)
        if _simplex_settled(sim, fsim, xatol, fatol):
            return sim[0], float(fsim[0]), nit, True
        if stalled or nit >= maxiter or len(memo) >= maxfev:
            return sim[0], float(fsim[0]), nit, False
        simplex = sim


def _run_replica(problem, start, spec, maxiter):
    t = _Transform(problem)
    best = {"params": start, "value": objective(problem, start, spec)}
    count = [1]

    def fn(z):
        params = t.to_params(z)
        value = objective(problem, params, spec)
        count[0] += 1
        if value < best["value"]:
            best["params"] = params
            best["value"] = value
        return value

    _, _, nit, converged = nelder_mead(
        fn, t.to_internal(start), XATOL, FATOL, maxiter, 4 * maxiter
    )
    return best["params"], best["value"], nit, converged, count[0]


def minimize(problem, spec=None, starts=20, seed=0, maxiter=5000, spread=0.3):
    """
    Multi-start Nelder-Mead fit. Replica 0 starts at problem.start, the others
    at seeded perturbations of it. The lowest objective wins, ties go to the
    lower replica index.
    """
    if starts < 1:
        raise ModelDomainError("Need at least one start")
    spec = spec or DEFAULT_SPEC

    best = None
    for i, start in enumerate(_start_points(problem, starts, seed, spread)):
        log.info("Fit replica %d of %d starting at %s" % (i + 1, starts, start))
        params, value, nit, ok, nfev = _run_replica(problem, start, spec, maxiter)
        log.info(
            "Fit replica %d finished: objective %.6g after %d iterations (converged: %s)"
            % (i + 1, value, nit, ok)
        )
        if best is None or value < best[1]:
            best = (params, value, nit, ok, nfev, i)

    params, value, nit, ok, nfev, replica = best
    return FitResult(
        params=dict(zip(problem.names, params)),
        objective=value,
        iterations=nit,
        converged=ok,
        per_point_residuals=residuals(problem, params, spec),
        evaluations=nfev,
        replica=replica,
        underdetermined=problem.underdetermined,
    )


def residual_report(result, problem):
    targets = problem.targets
    r = result.per_point_residuals
    return [
        {
            "alpha_deg": float(np.rad2deg(a)),
            "model": float(t + res),
            "target": float(t),
            "residual": float(res),
        }
        for a, t, res in zip(problem.grid, targets, r)
    ]


def report_document(result, problem):
    return {
        "schema": REPORT_SCHEMA,
        "model": problem.model.value,
        "params": {k: float(v) for k, v in result.params.items()},
        "objective": float(result.objective),
        "iterations": result.iterations,
        "converged": result.converged,
        "underdetermined": result.underdetermined,
        "eps_leak": problem.target.eps_leak,
        "grid": [float(v) for v in np.rad2deg(problem.grid)],
        "residuals": [float(v) for v in result.per_point_residuals],
    }
