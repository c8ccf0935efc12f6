"""Hypersphere areas, spherical caps, and the shadow cast by balls at cube vertices.

The light source sits at the origin and the balls sit at the vertices of
``[-1, 1]^n``, i.e. at distance ``sqrt(n)`` from the origin.  A ball of radius
``r`` shadows a cap of half-angle ``theta`` with ``sin(theta) = r / sqrt(n)`` on
any sphere centred at the origin.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

from .errors import DomainError
from .specfun import log_gamma, reg_inc_beta

__all__ = [
    "CapSpec",
    "BallArrangement",
    "dimension",
    "log_sphere_area",
    "sphere_area",
    "cap_convert",
    "cap_area",
    "shadow_half_angle",
    "single_shadow_fraction",
    "beta_tail_bound",
    "disjoint_union_fraction",
    "adjacent_vertex_cosine",
    "steele_inner_radius",
]

_LOG_MAX = math.log(1.7976931348623157e308)
_LOG_PI = math.log(math.pi)
_LOG_2 = math.log(2.0)


def dimension(n, minimum: int = 2) -> int:
    """Validate an integer dimension."""
    if isinstance(n, bool):
        raise DomainError(f"dimension must be an integer, got {n!r}")
    try:
        n = operator.index(n)
    except TypeError:
        raise DomainError(f"dimension must be an integer, got {n!r}") from None
    if n < minimum:
        raise DomainError(f"dimension must be >= {minimum}, got {n}")
    return n


def _positive(x: float, name: str) -> float:
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise DomainError(f"{name} must be a positive finite real, got {x!r}")
    return x


def _angle(theta: float, upper: float = math.pi / 2) -> float:
    theta = float(theta)
    if not (math.isfinite(theta) and 0.0 <= theta <= upper):
        raise DomainError(f"angle must lie in [0, {upper!r}], got {theta!r}")
    return theta


def _ball_radius(n: int, r: float) -> float:
    r = float(r)
    if not (math.isfinite(r) and 0.0 <= r <= math.sqrt(n)):
        raise DomainError(f"ball radius must lie in [0, sqrt({n})], got {r!r}")
    return r


def log_sphere_area(n: int, R: float = 1.0) -> float:
    """Log of the surface area of the (n-1)-sphere of radius ``R`` in R^n."""
    n = dimension(n)
    R = _positive(R, "R")
    return _LOG_2 + 0.5 * n * _LOG_PI + (n - 1) * math.log(R) - log_gamma(0.5 * n)


def sphere_area(n: int, R: float = 1.0) -> float:
    """Surface area ``2 pi^(n/2) R^(n-1) / Gamma(n/2)``.

    Raises ``OverflowError`` when the area is not representable as a float.
    """
    log_area = log_sphere_area(n, R)
    if log_area > _LOG_MAX:
        raise OverflowError(f"sphere area exp({log_area:.6g}) overflows (n={n}, R={R})")
    return math.exp(log_area)


def cap_convert(theta: float, R: float = 1.0) -> tuple[float, float]:
    """Half-angle -> (distance of the cutting plane, chord radius) for the same cap."""
    theta = _angle(theta)
    R = _positive(R, "R")
    return R * math.cos(theta), 2.0 * R * math.sin(0.5 * theta)


@dataclass(frozen=True)
class CapSpec:
    """A cap of half-angle ``theta`` on the sphere of radius ``R`` in R^n."""

    n: int
    R: float
    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "n", dimension(self.n))
        object.__setattr__(self, "R", _positive(self.R, "R"))
        object.__setattr__(self, "theta", _angle(self.theta))

    @classmethod
    def from_epsilon(cls, n: int, R: float, epsilon: float) -> CapSpec:
        R = _positive(R, "R")
        if not 0.0 <= epsilon <= R:
            raise DomainError(f"epsilon must lie in [0, R], got {epsilon!r}")
        return cls(n, R, math.acos(epsilon / R))

    @classmethod
    def from_chord(cls, n: int, R: float, chord: float) -> CapSpec:
        R = _positive(R, "R")
        if not 0.0 <= chord <= R * math.sqrt(2.0):
            raise DomainError(f"chord must lie in [0, R*sqrt(2)], got {chord!r}")
        # validated chord means theta <= pi/2; the clamp only absorbs rounding
        return cls(n, R, min(0.5 * math.pi, 2.0 * math.asin(chord / (2.0 * R))))

    @property
    def epsilon(self) -> float:
        return cap_convert(self.theta, self.R)[0]

    @property
    def chord(self) -> float:
        return cap_convert(self.theta, self.R)[1]

    def area_fraction(self) -> float:
        """Cap area divided by the whole sphere area."""
        return 0.5 * reg_inc_beta(math.sin(self.theta) ** 2, 0.5 * (self.n - 1), 0.5)


def cap_area(spec: CapSpec) -> float:
    """Area of the smaller cap: half the sphere area times I_{sin^2 theta}((n-1)/2, 1/2)."""
    return sphere_area(spec.n, spec.R) * spec.area_fraction()


def shadow_half_angle(n: int, r: float) -> float:
    """Half-angle of the cap shadowed by a radius-``r`` ball at a cube vertex."""
    n = dimension(n)
    r = _ball_radius(n, r)
    return math.asin(min(1.0, r / math.sqrt(n)))


def single_shadow_fraction(n: int, r: float) -> float:
    """Fraction of the sphere shadowed by one ball of radius ``r`` at a vertex.

    ``0.5 * I_z((n-1)/2, 1/2)`` with ``z = r^2 / n``.
    """
    n = dimension(n)
    r = _ball_radius(n, r)
    # r = sqrt(n) is the hemisphere even when (sqrt n)^2 rounds below n
    z = 1.0 if r >= math.sqrt(n) else min(1.0, r * r / n)
    return 0.5 * reg_inc_beta(z, 0.5 * (n - 1), 0.5)


def beta_tail_bound(n: int, z: float) -> float:
    """Upper bound ``z^((n-1)/2) / sqrt(pi)`` on ``I_z((n-1)/2, 1/2)``."""
    n = dimension(n, minimum=3)
    z = float(z)
    if not (math.isfinite(z) and 0.0 <= z <= 1.0):
        raise DomainError(f"z must lie in [0, 1], got {z!r}")
    return z ** (0.5 * (n - 1)) / math.sqrt(math.pi)


def disjoint_union_fraction(n: int, r: float) -> float:
    """Total shadowed fraction of all ``2^n`` balls while their shadows are disjoint.

    Shadows of adjacent vertices touch exactly at ``r = 1``; beyond that they
    overlap and the sum over balls is no longer the union, so ``r > 1`` is
    rejected.
    """
    n = dimension(n)
    r = float(r)
    if not (math.isfinite(r) and 0.0 <= r <= 1.0):
        raise DomainError(f"shadows are only known to be disjoint for 0 <= r <= 1, got {r!r}")
    single = single_shadow_fraction(n, r)
    if single == 0.0:
        return 0.0
    return min(1.0, math.exp(n * _LOG_2 + math.log(single)))


def adjacent_vertex_cosine(n: int) -> float:
    """Cosine of the angle between two cube vertices that differ in one coordinate."""
    n = dimension(n)
    return (n - 2) / n


def steele_inner_radius(n: int) -> tuple[float, bool]:
    """Radius of the sphere at the origin tangent to unit balls at the vertices.

    Returns the radius ``sqrt(n) - 1`` and whether that sphere pokes out of
    the bounding cube ``[-2, 2]^n``.
    """
    n = dimension(n)
    radius = math.sqrt(n) - 1.0
    return radius, radius > 2.0


@dataclass(frozen=True)
class BallArrangement:
    """Balls of common radius ``r`` centred at every vertex of ``[-1, 1]^n``."""

    n: int
    r: float

    def __post_init__(self) -> None:
        n = dimension(self.n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", _ball_radius(n, self.r))

    @property
    def shadows_disjoint(self) -> bool:
        return self.r <= 1.0

    def single_fraction(self) -> float:
        return single_shadow_fraction(self.n, self.r)

    def union_fraction(self) -> float:
        return disjoint_union_fraction(self.n, self.r)
