#
# Checks of the headline claims of the model: Malus agreement, fit quality,
# the shrinkage totals, the three-polarizer divergence, the CHSH bound,
# kernel normalization, Monte Carlo equivalence, the Belifante deviation and
# the degenerate-kernel limit. Each check returns a record
#
#   {id, title, achieved, threshold, passed, detail}
#
# and never raises on a failed verdict; the record carries it.
#

import logging
import math

import numpy as np

from .cascade import (
    Normalization,
    belifante_pair_raw,
    curve,
    degree_grid,
    pair_transmission_raw,
    triple_transmission,
)
from .core import (
    HALF_PI,
    TransmissionProfileParams,
    preset_values,
    profile_from_preset,
    qm_pair,
)
from .epr import (
    CHSH_BOUND_SLACK,
    CHSH_LOCAL_BOUND,
    CHSH_QM_OPTIMUM,
    TEXTBOOK_SETTINGS,
    chsh_scan,
    coincidence_rate,
    qm_chsh,
    qm_chsh_scan,
)
from .fitting import FitModel, FitProblem, minimize, objective
from .montecarlo import (
    McConfig,
    mc_coincidence,
    mc_pair,
    mc_pair_shrinkage,
    mc_triple,
)
from .quadrature import DEFAULT_SPEC
from .shrinkage import (
    ShrinkageModel,
    ShrinkageParams,
    TotalsConvention,
    get_model,
    shrinkage_from_preset,
)

log = logging.getLogger(__name__)

REPORT_SCHEMA = 1

TOTALS_EXPECTED = (0.496, 0.482)
TOTALS_TOLERANCE = 0.02


class ClaimOptions(object):
    def __init__(
        self,
        spec=None,
        starts=20,
        seed=1,
        maxiter=5000,
        samples=1000000,
        streams=4,
        configurations=10,
        only=None,
        shrinkage_starts=1,
        shrinkage_maxiter=60,
    ):
        self.spec = spec or DEFAULT_SPEC
        self.starts = starts
        self.seed = seed
        self.maxiter = maxiter
        self.samples = samples
        self.streams = streams
        self.configurations = configurations
        self.only = set(only) if only else None
        # the shrinkage refit rebuilds the kernel cache per evaluation
        self.shrinkage_starts = shrinkage_starts
        self.shrinkage_maxiter = shrinkage_maxiter


def _record(cid, title, achieved, threshold, passed, detail=None):
    log.info(
        "Claim %d (%s): achieved %r, threshold %r, %s"
        % (cid, title, achieved, threshold, passed and "passed" or "FAILED")
    )
    return {
        "id": cid,
        "title": title,
        "achieved": achieved,
        "threshold": threshold,
        "passed": bool(passed),
        "detail": detail or {},
    }


def _normalized(evaluator, grid):
    return curve(evaluator, grid, Normalization.UNIT_AT_ZERO).values


def _worst(grid, deviation):
    i = int(np.argmax(deviation))
    return float(deviation[i]), float(np.rad2deg(grid[i]))


def malus_agreement(opts):
    p = profile_from_preset("fig1-simple")
    grid = degree_grid(0.0, 90.0, 1.0)
    values = _normalized(lambda a: pair_transmission_raw(p, a, opts.spec), grid)
    upper = grid >= math.radians(30.0) - 1e-12
    dev = np.abs(values - qm_pair(grid))
    achieved, at = _worst(grid[upper], dev[upper])
    below, below_at = _worst(grid[~upper], dev[~upper])
    return _record(
        1,
        "Malus agreement above 30 degrees",
        achieved,
        0.05,
        achieved <= 0.05,
        {"at_deg": at, "max_below_30": below, "max_below_30_at_deg": below_at},
    )


def preset_dominance(opts):
    detail = {}
    margin = -math.inf
    grid = degree_grid(0.0, 90.0, 1.0)
    for model in (FitModel.SIMPLE, FitModel.SHRINKAGE):
        problem = FitProblem(model=model, grid=grid)
        preset = objective(problem, problem.start, opts.spec)
        if model is FitModel.SIMPLE:
            starts, maxiter = opts.starts, opts.maxiter
        else:
            starts = min(opts.starts, opts.shrinkage_starts)
            maxiter = min(opts.maxiter, opts.shrinkage_maxiter)
        result = minimize(
            problem, opts.spec, starts=starts, seed=opts.seed, maxiter=maxiter
        )
        detail[model.value] = {
            "preset_objective": preset,
            "refit_objective": result.objective,
            "params": result.params,
            "converged": result.converged,
        }
        margin = max(margin, result.objective - preset)
    return _record(
        2, "Refit at least as good as the presets", margin, 0.0, margin <= 0.0, detail
    )


def shrinkage_totals(opts):
    p = profile_from_preset("fig2-shrinkage")
    s = shrinkage_from_preset("fig2-shrinkage")
    model = get_model(p, s, opts.spec)
    conventions = {}
    best = None
    for convention in TotalsConvention:
        i1, i2 = model.total_ratios(convention)
        dev = max(abs(i1 - TOTALS_EXPECTED[0]), abs(i2 - TOTALS_EXPECTED[1]))
        conventions[convention.value] = {"I1_over_I0": i1, "I2_over_I0": i2}
        if best is None or dev < best[1]:
            best = (convention.value, dev)
    passed = best[1] <= TOTALS_TOLERANCE
    return _record(
        3,
        "Shrinkage totals 0.496 / 0.482",
        best[1],
        TOTALS_TOLERANCE,
        passed,
        {
            "conventions": conventions,
            "closest": best[0],
            "passing": passed and best[0] or None,
        },
    )


def triple_divergence(opts):
    p = profile_from_preset("fig1-simple")
    grid = degree_grid(50.0, 75.0, 1.0)
    zero = triple_transmission(p, 0.0, 0.0, opts.spec)
    hv = np.array([triple_transmission(p, a, 0.0, opts.spec) for a in grid]) / zero
    gap = np.abs(hv - np.cos(grid) ** 4)
    achieved, at = _worst(grid, gap)
    return _record(
        4,
        "Three-polarizer divergence between 50 and 75 degrees",
        achieved,
        0.05,
        achieved >= 0.05,
        {"at_deg": at},
    )


def chsh_bound(opts):
    p = profile_from_preset("fig1-simple")
    step = math.pi / 24
    hv, hv_at = chsh_scan(p, step, opts.spec)
    qm, _ = qm_chsh_scan(step)
    textbook = qm_chsh(TEXTBOOK_SETTINGS)
    passed = (
        hv <= CHSH_LOCAL_BOUND + CHSH_BOUND_SLACK
        and abs(qm - CHSH_QM_OPTIMUM) <= 1e-3
        and abs(textbook - CHSH_QM_OPTIMUM) <= 1e-9
    )
    return _record(
        5,
        "CHSH bound for the hidden-variable model",
        hv,
        CHSH_LOCAL_BOUND + CHSH_BOUND_SLACK,
        passed,
        {"settings_deg": hv_at.as_degrees(), "qm_scan": qm, "qm_textbook": textbook},
    )


def kernel_normalization_check(opts):
    p = profile_from_preset("fig2-shrinkage")
    s = shrinkage_from_preset("fig2-shrinkage")
    model = get_model(p, s, opts.spec)
    grid = np.linspace(-HALF_PI, HALF_PI, 181)
    dev = np.abs(np.array([model.kernel_mass(lp) for lp in grid]) - 1.0)
    achieved, at = _worst(grid, dev)

    # Between the cache knots the spline carries its own error.
    rng = np.random.default_rng(opts.seed)
    between = rng.uniform(-HALF_PI, HALF_PI, 50)
    off_knot, off_at = _worst(
        between, np.abs(np.array([model.kernel_mass(lp) for lp in between]) - 1.0)
    )
    return _record(
        6,
        "Kernel normalization",
        achieved,
        1e-9,
        achieved <= 1e-9 and off_knot <= 1e-8,
        {
            "at_deg": at,
            "off_knot": off_knot,
            "off_knot_at_deg": off_at,
            "off_knot_threshold": 1e-8,
        },
    )


def _random_profile(rng):
    return TransmissionProfileParams(
        a=float(rng.uniform(1.0, 3.0)),
        e=float(rng.uniform(2.0, 4.0)),
        c=float(rng.uniform(50.0, 300.0)),
    )


def oracle_equivalence(opts):
    rng = np.random.default_rng(opts.seed)
    s = shrinkage_from_preset("fig2-shrinkage")
    worst = 0.0
    rows = []
    for i in range(opts.configurations):
        p = _random_profile(rng)
        alpha, beta = (float(v) for v in rng.uniform(-HALF_PI, HALF_PI, 2))
        cfg = McConfig(samples=opts.samples, seed=opts.seed + i, stream_count=opts.streams)
        checks = {
            "pair": (
                mc_pair(p, alpha, cfg),
                pair_transmission_raw(p, alpha, opts.spec) / math.pi,
            ),
            "triple": (
                mc_triple(p, alpha, beta, cfg),
                triple_transmission(p, alpha, beta, opts.spec) / math.pi,
            ),
            "shrinkage_pair": (
                mc_pair_shrinkage(p, s, alpha, cfg, opts.spec),
                ShrinkageModel(p, s, opts.spec).pair_transmission(alpha) / math.pi,
            ),
            "coincidence": (
                mc_coincidence(p, alpha, beta, cfg),
                coincidence_rate(p, alpha, beta, opts.spec),
            ),
        }
        for name, (est, exact) in checks.items():
            z = abs(est.mean - exact) / est.stderr if est.stderr > 0 else math.inf
            worst = max(worst, z)
            rows.append(
                {
                    "configuration": i,
                    "quantity": name,
                    "mean": est.mean,
                    "stderr": est.stderr,
                    "quadrature": exact,
                    "z": z,
                }
            )
    return _record(
        7,
        "Monte Carlo agrees with quadrature",
        worst,
        4.0,
        worst <= 4.0,
        {"samples": opts.samples, "checks": rows},
    )


def belifante_deviation(opts):
    grid = degree_grid(0.0, 90.0, 1.0)
    values = _normalized(lambda a: belifante_pair_raw(a, opts.spec), grid)
    dev = np.abs(values - qm_pair(grid))
    achieved, at = _worst(grid, dev)
    return _record(
        8,
        "cos^2 profile deviates from Malus",
        achieved,
        0.1,
        achieved >= 0.1,
        {"at_deg": at},
    )


def degenerate_kernel(opts):
    p = profile_from_preset("fig1-simple")
    eta = preset_values("fig2-shrinkage")["eta"]
    s = ShrinkageParams(sigma=1e6, eps_shift=0.0, eta=eta)
    model = ShrinkageModel(p, s, opts.spec)
    grid = degree_grid(0.0, 90.0, 1.0)
    shrunk = curve(model.pair_transmission, grid, Normalization.RAW).values
    simple = curve(
        lambda a: pair_transmission_raw(p, a, opts.spec), grid, Normalization.RAW
    ).values
    achieved, at = _worst(grid, np.abs(shrunk - simple))
    return _record(
        9,
        "Sharp kernel reduces to the simple model",
        achieved,
        1e-3,
        achieved <= 1e-3,
        {"at_deg": at},
    )


CLAIMS = (
    (1, malus_agreement),
    (2, preset_dominance),
    (3, shrinkage_totals),
    (4, triple_divergence),
    (5, chsh_bound),
    (6, kernel_normalization_check),
    (7, oracle_equivalence),
    (8, belifante_deviation),
    (9, degenerate_kernel),
)


def evaluate_claims(opts=None):
    opts = opts or ClaimOptions()
    return [fn(opts) for cid, fn in CLAIMS if opts.only is None or cid in opts.only]


def report_document(records):
    return {
        "schema": REPORT_SCHEMA,
        "claims": records,
        "passed": all(r["passed"] for r in records),
    }
