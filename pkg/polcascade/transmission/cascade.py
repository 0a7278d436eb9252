#
# Light transmission through cascades of polarizers in the simple model,
# where a photon keeps its hidden polarization axis lambda while passing.
#

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    HALF_PI,
    ModelDomainError,
    TransmissionProfileParams,
    angular_distance,
    belifante_profile,
    canonical_angle,
    p1,
)
from .quadrature import integrate

DEFAULT_GRID = (0.0, 90.0, 1.0)


class Normalization(enum.Enum):
    RAW = "raw"
    UNIT_AT_ZERO = "unit0"
    INCIDENT_DENSITY = "density"


@dataclass(frozen=True, eq=False)
class TransmissionCurve:
    angles: np.ndarray
    values: np.ndarray
    normalization: Normalization

    def __post_init__(self):
        if len(self.angles) != len(self.values):
            raise ModelDomainError("Curve angles and values differ in length")
        if len(self.angles) > 1 and np.any(np.diff(self.angles) <= 0):
            raise ModelDomainError("Curve angles must be strictly increasing")
        if np.any(self.values < 0):
            raise ModelDomainError("Transmission values must be nonnegative")
        if self.normalization is Normalization.UNIT_AT_ZERO:
            i = _zero_index(self.angles)
            if i is None or self.values[i] != 1.0:
                raise ModelDomainError("UNIT_AT_ZERO curve must equal 1 at alpha = 0")

    @property
    def degrees(self):
        return np.rad2deg(self.angles)

    def __len__(self):
        return len(self.angles)


def degree_grid(start, stop, step):
    """
    Radian grid from start to stop (inclusive) in degree steps. Points are
    start + k*step so that 0 is hit exactly when start is 0.
    """
    if not step > 0:
        raise ModelDomainError("Grid step must be positive")
    if stop < start:
        raise ModelDomainError("Grid stop must not be below start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.deg2rad(start + step * np.arange(n))


def _zero_index(angles):
    hits = np.flatnonzero(np.abs(angles) <= 1e-15)
    if len(hits) == 0:
        return None
    return int(hits[0])


def fold_points(angles):
    """
    Abscissae in (-pi/2, pi/2] where p1(delta(lambda, theta)) has a kink:
    lambda = theta and lambda = theta + pi/2 (mod pi).
    """
    pts = []
    for theta in angles:
        pts.append(canonical_angle(theta))
        pts.append(canonical_angle(theta + HALF_PI))
    return pts


def _transmission_factor(profile):
    if isinstance(profile, TransmissionProfileParams):
        return lambda delta: p1(delta, profile)
    if callable(profile):
        return profile
    raise ModelDomainError("Unsupported transmission profile %r" % (profile,))


def cascade_integral(profiles, angles, spec=None):
    """
    Integral over lambda of the product of the transmission probabilities of
    every polarizer in the cascade. profiles are TransmissionProfileParams or
    callables of the folded angle (like belifante_profile).
    """
    if len(profiles) != len(angles):
        raise ModelDomainError("Need one profile per polarizer")
    if len(angles) == 0:
        raise ModelDomainError("A cascade needs at least one polarizer")
    factors = [(_transmission_factor(p), float(theta)) for p, theta in zip(profiles, angles)]

    def integrand(lam):
        r = np.ones_like(lam)
        for fn, theta in factors:
            r = r * fn(angular_distance(lam, theta))
        return r

    return integrate(integrand, -HALF_PI, HALF_PI, spec, points=fold_points(angles))


def cascade_transmission(profiles, angles, spec=None):
    return cascade_integral(profiles, angles, spec).value


def pair_transmission_raw(p, alpha, spec=None):
    return cascade_transmission([p, p], [0.0, alpha], spec)


def pair_transmission_normalized(p, alpha, spec=None):
    zero = pair_transmission_raw(p, 0.0, spec)
    if not zero > 0:
        raise ModelDomainError("Pair transmission at alpha = 0 vanishes")
    return pair_transmission_raw(p, alpha, spec) / zero


def simple_output_distribution(p, lam):
    return p1(angular_distance(lam, 0.0), p) / HALF_PI


def triple_transmission(p, alpha, beta, spec=None):
    return cascade_transmission([p, p, p], [0.0, alpha, beta], spec)


def belifante_pair_raw(alpha, spec=None):
    return cascade_transmission([belifante_profile, belifante_profile], [0.0, alpha], spec)


def belifante_pair_normalized(alpha):
    """
    UNIT_AT_ZERO pair curve of the cos^2 profile, in closed form.
    """
    return (2.0 + np.cos(2 * np.asarray(alpha, dtype=float))) / 3.0


def curve(evaluator, grid, normalization=Normalization.RAW):
    angles = np.asarray(grid, dtype=float)
    if angles.ndim != 1 or len(angles) == 0:
        raise ModelDomainError("Curve grid must be a nonempty list of angles")
    if np.any(np.diff(angles) <= 0):
        raise ModelDomainError("Curve grid must be strictly increasing")

    values = np.array([evaluator(float(a)) for a in angles], dtype=float)
    if normalization is Normalization.UNIT_AT_ZERO:
        i = _zero_index(angles)
        if i is None:
            raise ModelDomainError("UNIT_AT_ZERO normalization needs alpha = 0 in the grid")
        if not values[i] > 0:
            raise ModelDomainError("Curve value at alpha = 0 vanishes")
        values = values / values[i]
        values[i] = 1.0
    elif normalization is Normalization.INCIDENT_DENSITY:
        values = values / math.pi
    return TransmissionCurve(angles=angles, values=values, normalization=normalization)
