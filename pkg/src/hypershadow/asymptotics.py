"""Limit laws for the random-line statistics and the critical ball radius.

For i.i.d. positive ``X_i`` with ``E X = mu`` and ``E X^2 = 1``,
``sqrt(n) (s^2/(n t) - mu^2)`` is asymptotically normal with variance
``mu^4 b + 4 mu^2 - 4 mu^3 a - mu^4`` where ``a = E X^3`` and ``b = E X^4``.
For half-normal coordinates this gives the laws of ``cos(theta)`` and of the
line-to-vertex distance, and from the latter the radius at which the blocked
fraction tends to ``Phi(z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .capgeom import dimension
from .errors import DomainError
from .specfun import std_normal_cdf, std_normal_quantile

__all__ = [
    "CRITICAL_FRACTION",
    "HALF_NORMAL_RATIO_VARIANCE",
    "DISTANCE_LIMIT_VARIANCE",
    "DISTANCE_LIMIT_SD",
    "COS_THETA_LIMIT_VARIANCE",
    "MomentSet",
    "LimitLaw",
    "Regime",
    "half_normal_moments",
    "ratio_limit_variance",
    "ratio_limit",
    "delta_method_variance",
    "cos_theta_limit",
    "cos_theta_variance_by_delta_method",
    "distance_variance_by_delta_method",
    "distance_limit",
    "threshold_radius",
    "target_probability_offset",
    "classify_regime",
]

PI = math.pi
CRITICAL_FRACTION = 1.0 - 2.0 / PI
HALF_NORMAL_RATIO_VARIANCE = 8.0 / PI - 24.0 / PI**2
COS_THETA_LIMIT_VARIANCE = (PI - 3.0) / PI
DISTANCE_LIMIT_VARIANCE = 2.0 * (PI - 3.0) / (PI * (PI - 2.0))
DISTANCE_LIMIT_SD = math.sqrt(DISTANCE_LIMIT_VARIANCE)

_M2_TOL = 1e-12


@dataclass(frozen=True)
class MomentSet:
    """First four raw moments of a positive variable normalized to ``E X^2 = 1``."""

    mu: float
    m2: float
    a: float
    b: float

    def __post_init__(self) -> None:
        for name in ("mu", "m2", "a", "b"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"moment {name} must be finite")
        if abs(self.m2 - 1.0) > _M2_TOL:
            raise DomainError(f"second moment must equal 1, got {self.m2!r}; use MomentSet.rescaled")
        if self.mu * self.mu > 1.0 + _M2_TOL:
            raise DomainError(f"inconsistent moments: mu^2 = {self.mu**2!r} exceeds E X^2 = 1")
        if self.b < 1.0 - _M2_TOL:
            raise DomainError(f"inconsistent moments: E X^4 = {self.b!r} is below (E X^2)^2 = 1")

    @classmethod
    def rescaled(cls, m1: float, m2: float, m3: float, m4: float) -> MomentSet:
        """Moments of ``X / sqrt(E X^2)`` given the raw moments of ``X``."""
        if not m2 > 0:
            raise DomainError(f"second moment must be positive, got {m2!r}")
        scale = math.sqrt(m2)
        return cls(m1 / scale, 1.0, m3 / scale**3, m4 / m2**2)


@dataclass(frozen=True)
class LimitLaw:
    """Normal law ``N(mean, variance)``."""

    mean: float
    variance: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.variance)):
            raise DomainError("limit law parameters must be finite")
        if self.variance < 0.0:
            raise DomainError(f"variance must be >= 0, got {self.variance!r}")

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    def quantile(self, p: float) -> float:
        return self.mean + self.sd * std_normal_quantile(p)

    def scaled(self, factor: float) -> LimitLaw:
        """Law of ``factor * X`` for ``X`` with this law."""
        return LimitLaw(factor * self.mean, factor * factor * self.variance)


@dataclass(frozen=True)
class Regime:
    """Which case of the blocked-fraction limit a radius falls in."""

    kind: str  # "vanishing", "critical" or "full"
    z: float
    predicted_alpha: float


def half_normal_moments() -> MomentSet:
    mu = math.sqrt(2.0 / PI)
    return MomentSet(mu=mu, m2=1.0, a=2.0 * mu, b=3.0)


def ratio_limit_variance(m: MomentSet) -> float:
    mu2 = m.mu * m.mu
    mu4 = mu2 * mu2
    var = mu4 * m.b + 4.0 * mu2 - 4.0 * mu2 * m.mu * m.a - mu4
    if var < 0.0:
        # rounding around a degenerate (zero-variance) law
        if var > -1e-12:
            return 0.0
        raise DomainError(f"moments give a negative limit variance {var!r}")
    return var


def ratio_limit(m: MomentSet | None = None) -> LimitLaw:
    """Limit law of ``sqrt(n) (s^2/(n t) - mu^2)``; half-normal coordinates by default."""
    return LimitLaw(0.0, ratio_limit_variance(m or half_normal_moments()))


def delta_method_variance(variance: float, derivative: float) -> float:
    return variance * derivative * derivative


def _sqrt_derivative(x: float) -> float:
    return 0.5 / math.sqrt(x)


def cos_theta_limit() -> LimitLaw:
    """Law of ``cos(theta)`` in the sense ``sqrt(n) (cos theta - mean) -> N(0, variance)``."""
    return LimitLaw(math.sqrt(2.0 / PI), COS_THETA_LIMIT_VARIANCE)


def distance_limit() -> LimitLaw:
    """Limit law of ``d - sqrt((1 - 2/pi) n)``; no scaling by ``sqrt(n)`` is needed."""
    return LimitLaw(0.0, DISTANCE_LIMIT_VARIANCE)


def cos_theta_variance_by_delta_method() -> float:
    return delta_method_variance(ratio_limit_variance(half_normal_moments()), _sqrt_derivative(2.0 / PI))


def distance_variance_by_delta_method() -> float:
    return delta_method_variance(ratio_limit_variance(half_normal_moments()), _sqrt_derivative(CRITICAL_FRACTION))


def threshold_radius(n: int, z: float) -> float:
    """Ball radius ``sqrt((1 - 2/pi) n) + z * DISTANCE_LIMIT_SD``.

    Raises ``DomainError`` when the radius falls outside ``[0, sqrt(n)]``.
    """
    n = dimension(n)
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"z must be finite, got {z!r}")
    r = math.sqrt(CRITICAL_FRACTION * n) + z * DISTANCE_LIMIT_SD
    if not 0.0 <= r <= math.sqrt(n):
        raise DomainError(f"radius {r!r} for n={n}, z={z!r} lies outside [0, sqrt(n)]")
    return r


def target_probability_offset(a: float) -> float:
    """Offset ``z`` whose threshold radius drives the blocked fraction to ``a``."""
    a = float(a)
    if not 0.0 < a < 1.0:
        raise DomainError(f"target probability must lie in (0, 1), got {a!r}")
    return std_normal_quantile(a)


def classify_regime(n: int, r: float, z_max: float = 6.0) -> Regime:
    """Place ``(n, r)`` in the vanishing, critical or full regime.

    The critical window is ``|z| <= z_max`` with ``z`` the radius offset in
    limit standard deviations; outside it ``r^2/n`` lies on one side of
    ``1 - 2/pi`` and the predicted blocked fraction is 0 or 1.
    """
    n = dimension(n)
    r = float(r)
    if not (math.isfinite(r) and 0.0 <= r <= math.sqrt(n)):
        raise DomainError(f"radius must lie in [0, sqrt({n})], got {r!r}")
    z = (r - math.sqrt(CRITICAL_FRACTION * n)) / DISTANCE_LIMIT_SD
    if z < -z_max:
        return Regime("vanishing", z, 0.0)
    if z > z_max:
        return Regime("full", z, 1.0)
    return Regime("critical", z, std_normal_cdf(z))
