"""Latitudes of hypercube vertices relative to a pole.

A vertex drawn uniformly from ``{-1, 1}^n`` disagrees with a fixed pole in
``K ~ Binomial(n, 1/2)`` coordinates; ``K`` is its latitude and the cosine of
its angle with the pole is ``(n - 2K) / n``.  Most of the mass sits in a thin
slab around the equator ``K = n/2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .capgeom import dimension
from .errors import DomainError
from .specfun import std_normal_cdf

__all__ = [
    "EXACT_LIMIT",
    "LatitudeModel",
    "SlabProbability",
    "latitude_log_pmf",
    "latitude_pmf",
    "latitude_pmf_all",
    "latitude_cosine",
    "slab_bounds",
    "slab_probability",
    "cap_mass",
]

log = logging.getLogger(__name__)

# Above this many coordinates the binomial sums are replaced by the normal law.
EXACT_LIMIT = 100_000

_LOG_2PI = math.log(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * _LOG_2PI
_FUZZ = 1e-9

# Up to this n the pmf is C(n, k) / 2^n in exact integer arithmetic, rounded once.
_EXACT_INT_LIMIT = 4096


def _stirlerr(k: np.ndarray) -> np.ndarray:
    """log(k!) - [(k + 1/2) log k - k + log sqrt(2 pi)] for integer k >= 1."""
    k = np.asarray(k, dtype=np.float64)
    out = np.empty_like(k)
    small = k <= 15
    ks = k[small]
    out[small] = [math.lgamma(v + 1.0) - (v + 0.5) * math.log(v) + v - _LOG_SQRT_2PI for v in ks]
    kb = k[~small]
    kk = kb * kb
    out[~small] = (1.0 / 12 - (1.0 / 360 - (1.0 / 1260 - (1.0 / 1680 - (1.0 / 1188) / kk) / kk) / kk) / kk) / kb
    return out


def _bd0(x: np.ndarray, mean: float) -> np.ndarray:
    """Deviance term x log(x/mean) + mean - x, accurate when x is close to mean."""
    x = np.asarray(x, dtype=np.float64)
    out = x * np.log(x / mean) + mean - x
    close = np.abs(x - mean) < 0.1 * (x + mean)
    if close.any():
        xc = x[close]
        v = (xc - mean) / (xc + mean)
        acc = (xc - mean) * v
        ej = 2.0 * xc * v
        v2 = v * v
        j = 1
        while True:
            ej = ej * v2
            term = ej / (2 * j + 1)
            new = acc + term
            if np.array_equal(new, acc):
                break
            acc = new
            j += 1
        out[close] = acc
    return out


def _log_pmf_array(n: int, k: np.ndarray) -> np.ndarray:
    k = np.asarray(k, dtype=np.float64)
    out = np.full(k.shape, -n * math.log(2.0))
    inner = (k > 0) & (k < n)
    ki = k[inner]
    half = 0.5 * n
    lc = (
        _stirlerr(np.array([float(n)]))[0]
        - _stirlerr(ki)
        - _stirlerr(n - ki)
        - _bd0(ki, half)
        - _bd0(n - ki, half)
    )
    lf = _LOG_2PI + np.log(ki) + np.log1p(-ki / n)
    out[inner] = lc - 0.5 * lf
    return out


def _check_k(n: int, k) -> int:
    if isinstance(k, bool) or int(k) != k or not 0 <= int(k) <= n:
        raise DomainError(f"latitude index must be an integer in [0, {n}], got {k!r}")
    return int(k)


def latitude_log_pmf(n: int, k: int) -> float:
    n = dimension(n, minimum=1)
    k = _check_k(n, k)
    if n <= _EXACT_INT_LIMIT:
        p = math.comb(n, k) / (1 << n)  # int / int is correctly rounded
        if p > 0.0:
            return math.log(p)
    return float(_log_pmf_array(n, np.array([min(k, n - k)]))[0])


def latitude_pmf(n: int, k: int) -> float:
    """P(K = k) = C(n, k) / 2^n."""
    n = dimension(n, minimum=1)
    k = _check_k(n, k)
    if n <= _EXACT_INT_LIMIT:
        return math.comb(n, k) / (1 << n)
    if k == 0 or k == n:
        return math.ldexp(1.0, -n)
    return math.exp(latitude_log_pmf(n, k))


def latitude_pmf_all(n: int) -> np.ndarray:
    """The whole pmf ``[P(K = 0), ..., P(K = n)]``."""
    n = dimension(n, minimum=1)
    if n <= _EXACT_INT_LIMIT:
        scale = 1 << n
        out = np.empty(n + 1)
        c = 1
        for k in range(n + 1):
            out[k] = c / scale
            c = c * (n - k) // (k + 1)
        return out
    # evaluate the lower half only so that P(K = k) == P(K = n - k) bit for bit
    half = np.exp(_log_pmf_array(n, np.arange(n // 2 + 1)))
    pmf = np.concatenate([half, half[: (n + 1) // 2][::-1]])
    pmf[0] = pmf[-1] = math.ldexp(1.0, -n)
    return pmf


def latitude_cosine(n: int, k: int) -> float:
    """Cosine of the angle between the pole and any vertex at latitude ``k``."""
    n = dimension(n, minimum=1)
    k = _check_k(n, k)
    return (n - 2 * k) / n


@dataclass(frozen=True)
class SlabProbability:
    """Mass of the latitudes ``lo..hi`` around the equator.

    ``approximated`` is set when ``n`` exceeded :data:`EXACT_LIMIT` and
    ``exact`` holds the normal approximation instead of the binomial sum.
    """

    n: int
    eps: float
    lo: int
    hi: int
    exact: float
    normal_approx: float
    approximated: bool = False


def slab_bounds(n: int, eps: float) -> tuple[int, int]:
    """Smallest and largest ``k`` with ``|k - n/2| <= eps n``."""
    half_width = eps * n
    lo = max(0, math.ceil(0.5 * n - half_width - _FUZZ))
    hi = min(n, math.floor(0.5 * n + half_width + _FUZZ))
    return lo, hi


def _normal_interval(n: int, lo: int, hi: int) -> float:
    # continuity-corrected N(n/2, n/4) mass of [lo, hi]
    sd = 0.5 * math.sqrt(n)
    upper = (hi + 0.5 - 0.5 * n) / sd
    lower = (lo - 0.5 - 0.5 * n) / sd
    if lower > 0.0:
        return std_normal_cdf(-lower) - std_normal_cdf(-upper)
    return std_normal_cdf(upper) - std_normal_cdf(lower)


def slab_probability(n: int, eps: float) -> SlabProbability:
    """Probability that a uniform vertex's latitude is within ``eps n`` of ``n/2``."""
    n = dimension(n, minimum=1)
    eps = float(eps)
    if not (math.isfinite(eps) and 0.0 <= eps <= 0.5):
        raise DomainError(f"eps must lie in [0, 1/2], got {eps!r}")
    lo, hi = slab_bounds(n, eps)
    approx = _normal_interval(n, lo, hi)
    if n > EXACT_LIMIT:
        log.warning("n=%d exceeds %d; slab mass uses the normal approximation", n, EXACT_LIMIT)
        return SlabProbability(n, eps, lo, hi, approx, approx, approximated=True)
    if lo > hi:
        exact = 0.0
    else:
        exact = min(1.0, math.fsum(latitude_pmf_all(n)[lo : hi + 1]))
    return SlabProbability(n, eps, lo, hi, exact, approx)


def cap_mass(n: int, theta: float) -> float:
    """Probability that a uniform vertex lies within angle ``theta`` of the pole.

    Equivalently ``P(K <= n (1 - cos theta) / 2)``.
    """
    n = dimension(n, minimum=1)
    theta = float(theta)
    if not (math.isfinite(theta) and 0.0 <= theta <= math.pi):
        raise DomainError(f"theta must lie in [0, pi], got {theta!r}")
    k_max = min(n, math.floor(0.5 * n * (1.0 - math.cos(theta)) + _FUZZ))
    if k_max < 0:
        return 0.0
    if k_max == n:
        return 1.0
    if n > EXACT_LIMIT:
        log.warning("n=%d exceeds %d; cap mass uses the normal approximation", n, EXACT_LIMIT)
        return std_normal_cdf((k_max + 0.5 - 0.5 * n) / (0.5 * math.sqrt(n)))
    pmf = latitude_pmf_all(n)
    return min(1.0, math.fsum(pmf[: k_max + 1]))


@dataclass(frozen=True)
class LatitudeModel:
    """Uniform vertices of ``{-1, 1}^n`` seen from a pole."""

    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "n", dimension(self.n, minimum=1))

    @property
    def mean(self) -> float:
        return 0.5 * self.n

    @property
    def variance(self) -> float:
        return 0.25 * self.n

    def pmf(self, k: int) -> float:
        return latitude_pmf(self.n, k)

    def cosine(self, k: int) -> float:
        return latitude_cosine(self.n, k)

    def slab(self, eps: float) -> SlabProbability:
        return slab_probability(self.n, eps)

    def cap(self, theta: float) -> float:
        return cap_mass(self.n, theta)
