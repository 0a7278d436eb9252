#
# Closed-form scalar functions of the hidden-variable transmission model:
# the profile function phi, the single-polarizer transmission p1, the
# generalized Malus law, Belifante's cos^2 profile and the quantum
# mechanical reference predictions.
#
# Angles are radians. A polarization axis has no direction, so every angle
# is identified modulo pi and canonicalized into (-pi/2, pi/2].
#
# All functions accept python floats or numpy arrays.
#

import math
from dataclasses import asdict, dataclass
from types import MappingProxyType

import numpy as np

HALF_PI = math.pi / 2

# Slack allowed on domain checks for values that went through floating point
# folding (pi - d can land one ulp above pi/2).
DOMAIN_SLACK = 1e-12


class ModelDomainError(ValueError):
    pass


@dataclass(frozen=True)
class TransmissionProfileParams:
    a: float
    e: float
    c: float

    def __post_init__(self):
        for name in ("a", "e", "c"):
            v = getattr(self, name)
            try:
                ok = math.isfinite(v) and v > 0
            except TypeError:
                ok = False
            if not ok:
                raise ModelDomainError(
                    "Profile parameter %s must be a finite positive number, got %r"
                    % (name, v)
                )

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class MalusTarget:
    eps_leak: float = 0.0

    def __post_init__(self):
        if not (0 <= self.eps_leak < 1):
            raise ModelDomainError(
                "Malus leakage must be in [0, 1), got %r" % (self.eps_leak,)
            )


# Fitted parameter sets. The shrinkage entries are turned into a
# ShrinkageParams by the shrinkage module.
PRESETS = MappingProxyType(
    {
        "fig1-simple": MappingProxyType({"a": 1.74, "e": 3.78, "c": 200.0}),
        "fig2-shrinkage": MappingProxyType(
            {
                "a": 2.38,
                "e": 2.54,
                "c": 186.8,
                "sigma": 40.5,
                "eps_shift": 0.40,
                "eta": 1.38,
            }
        ),
    }
)


def preset_values(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ModelDomainError(
            "Unknown preset %r, choose one of: %s" % (name, ", ".join(PRESETS))
        )


def profile_from_preset(name):
    v = preset_values(name)
    return TransmissionProfileParams(a=v["a"], e=v["e"], c=v["c"])


def canonical_angle(x):
    """
    Representative of x modulo pi in (-pi/2, pi/2]. Idempotent.
    """
    y = x - math.pi * np.ceil((np.asarray(x, dtype=float) - HALF_PI) / math.pi)
    if np.ndim(y) == 0:
        return float(y)
    return y


def angular_distance(x, y):
    """
    Distance between two polarization axes, in [0, pi/2].
    """
    d = np.mod(np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)), math.pi)
    r = np.minimum(d, math.pi - d)
    if np.ndim(r) == 0:
        return float(r)
    return r


def _check_range(name, v, lo, hi):
    arr = np.asarray(v, dtype=float)
    if np.any(np.isnan(arr)):
        raise ModelDomainError("%s is not a number" % name)
    if np.any(arr < lo - DOMAIN_SLACK) or np.any(arr > hi + DOMAIN_SLACK):
        raise ModelDomainError(
            "%s must be within [%g, %g], got %s" % (name, lo, hi, np.array2string(arr))
        )
    return np.clip(arr, lo, hi)


def _scalar_or_array(r):
    if np.ndim(r) == 0:
        return float(r)
    return r


def phi(gamma, p):
    g = np.asarray(gamma, dtype=float)
    if np.any(np.isnan(g)) or np.any(g < 0):
        raise ModelDomainError("phi is defined for gamma >= 0 only")
    s = p.a * g**p.e
    # 1 - exp(-s) computed without cancellation for small gamma
    return _scalar_or_array(-np.expm1(-s) / (1.0 + p.c * np.exp(-s)))


def p1(delta, p):
    """
    Transmission probability of a photon whose axis is delta away from the
    polarizer axis. Callers fold raw differences with angular_distance.
    """
    d = _check_range("delta", delta, 0.0, HALF_PI)
    return _scalar_or_array(1.0 - phi(d, p))


def belifante_profile(delta):
    d = _check_range("delta", delta, 0.0, HALF_PI)
    return _scalar_or_array(np.cos(d) ** 2)


def malus(alpha, t):
    return _scalar_or_array(
        (1.0 - t.eps_leak) * np.cos(np.asarray(alpha, dtype=float)) ** 2 + t.eps_leak
    )


def qm_pair(alpha):
    return _scalar_or_array(np.cos(np.asarray(alpha, dtype=float)) ** 2)


def qm_triple(alpha, beta):
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    return _scalar_or_array(np.cos(alpha) ** 2 * np.cos(alpha - beta) ** 2)


def qm_cascade(angles):
    """
    Ideal-polarizer intensity after a cascade, relative to the light leaving
    the first polarizer. angles[0] is the first polarizer.
    """
    if len(angles) < 2:
        raise ModelDomainError("A cascade needs at least two polarizers")
    r = 1.0
    for prev, cur in zip(angles, angles[1:]):
        r *= math.cos(cur - prev) ** 2
    return r
