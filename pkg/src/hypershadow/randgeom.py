"""Seeded sampling on spheres and the random-line / nearest-vertex statistics.

A random line through the origin has direction ``Y`` with i.i.d. standard
normal coordinates.  Its closest cube vertex is ``sign(Y)`` and, by symmetry,
the distance to it has the law of the distance from ``(1, ..., 1)`` to the line
spanned by ``X = |Y|``.  With ``s = sum(X)`` and ``t = sum(X^2)`` that squared
distance is ``n - s^2 / t``.

Randomness comes from :class:`RandomStream`, a value naming a Philox
counter-based generator keyed by ``(seed, stream_id)``.  Normal variates are
produced by the inverse-CDF transform of open-interval uniforms, so a stream
yields the same numbers on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DomainError
from .specfun import norm_ppf, ppf_scalar

__all__ = [
    "RandomStream",
    "LineStats",
    "CoordinateLaw",
    "HALF_NORMAL",
    "UNIFORM_SQRT3",
    "sample_uniform",
    "sample_std_normal",
    "sample_std_normal_vec",
    "sample_unit_sphere",
    "sample_half_normal_vec",
    "nearest_vertex",
    "distance_sq_to_line",
    "line_stats",
    "batch_line_stats",
    "sample_line_stats",
]

_U64 = (1 << 64) - 1


def _u64(value, name: str) -> int:
    if isinstance(value, bool) or int(value) != value or not 0 <= int(value) <= _U64:
        raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class RandomStream:
    """Deterministic substream ``stream_id`` of the generator family ``seed``.

    A stream is a value: every consumer handed the same ``RandomStream``
    starts from the beginning of the same sequence.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed", _u64(self.seed, "seed"))
        object.__setattr__(self, "stream_id", _u64(self.stream_id, "stream_id"))

    def bit_generator(self) -> np.random.Philox:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Philox(key=key)

    def substream(self, index: int) -> RandomStream:
        return RandomStream(self.seed, index)


@numba.njit(cache=True, nogil=True)
def _uniform_from_raw(raw):
    # 53-bit midpoint uniform: strictly inside (0, 1) and symmetric about 1/2
    return (float(raw >> numba.uint64(11)) + 0.5) * 1.1102230246251565e-16


@numba.njit(cache=True, nogil=True)
def _raw_to_uniform(raw, out):
    for i in range(raw.size):
        out[i] = _uniform_from_raw(raw[i])


def _uniforms(bitgen: np.random.Philox, size: int) -> np.ndarray:
    out = np.empty(size, dtype=np.float64)
    _raw_to_uniform(bitgen.random_raw(size), out)
    return out


def sample_uniform(shape, stream: RandomStream) -> np.ndarray:
    """Uniform variates on the open interval (0, 1), filled in C order."""
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    size = int(np.prod(shape, dtype=np.int64))
    return _uniforms(stream.bit_generator(), size).reshape(shape)


def sample_std_normal(shape, stream: RandomStream) -> np.ndarray:
    """Standard normal variates of the given shape, filled in C order."""
    return norm_ppf(sample_uniform(shape, stream))


def sample_std_normal_vec(n: int, stream: RandomStream) -> np.ndarray:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return sample_std_normal(n, stream)


def sample_half_normal_vec(n: int, stream: RandomStream) -> np.ndarray:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return HALF_NORMAL.sample(n, stream)


def sample_unit_sphere(n: int, stream: RandomStream) -> np.ndarray:
    """Uniform point on the unit sphere in R^n: a normalized standard normal vector."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    bitgen = stream.bit_generator()
    while True:
        y = norm_ppf(_uniforms(bitgen, n))
        norm = math.sqrt(math.fsum(y * y))
        if norm > 0.0:
            return y / norm


def nearest_vertex(y) -> np.ndarray:
    """Cube vertex closest to the line through the origin with direction ``y``.

    The antipodal vertex is equally close.  Zero coordinates map to +1.
    """
    y = np.asarray(y, dtype=np.float64)
    return np.where(y >= 0.0, 1, -1).astype(np.int8)


def distance_sq_to_line(point, direction) -> float:
    """Squared distance from ``point`` to the line through 0 spanned by ``direction``."""
    point = np.asarray(point, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    dd = float(direction @ direction)
    if dd == 0.0:
        raise DomainError("direction must be non-zero")
    residual = point - (float(point @ direction) / dd) * direction
    return float(residual @ residual)


@dataclass(frozen=True)
class LineStats:
    """Statistics of a line spanned by a positive vector, relative to ``(1, ..., 1)``.

    ``s`` and ``t`` are the sum and the sum of squares of the coordinates,
    ``d_sq`` the squared distance from the all-ones vertex to the line and
    ``cos_sq`` the squared cosine of the angle between them.
    """

    n: int
    s: float
    t: float
    d_sq: float
    cos_sq: float

    @property
    def distance(self) -> float:
        return math.sqrt(max(self.d_sq, 0.0))

    @property
    def cos_theta(self) -> float:
        return math.sqrt(max(self.cos_sq, 0.0))


def line_stats(x) -> LineStats:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("x must be a non-empty vector")
    n = x.size
    s = math.fsum(x)
    t = math.fsum(x * x)
    if t == 0.0:
        raise DomainError("x must be non-zero")
    ratio = s * s / t
    return LineStats(n=n, s=s, t=t, d_sq=n - ratio, cos_sq=ratio / n)


def batch_line_stats(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise ``(d_sq, cos_sq)`` for a ``(trials, n)`` array of positive vectors."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    m, n = x.shape
    d_sq = np.empty(m)
    cos_sq = np.empty(m)
    _rows_line_stats(x.ravel(), n, d_sq, cos_sq)
    return d_sq, cos_sq


@numba.njit(cache=True, nogil=True)
def _finish_row(s, t, n, d_sq, cos_sq, i):
    ratio = s * s / t
    d_sq[i] = n - ratio
    cos_sq[i] = ratio / n


@numba.njit(cache=True, nogil=True)
def _rows_line_stats(flat, n, d_sq, cos_sq):
    k = 0
    for i in range(d_sq.size):
        s = 0.0
        t = 0.0
        for _ in range(n):
            xv = flat[k]
            k += 1
            s += xv
            t += xv * xv
        _finish_row(s, t, n, d_sq, cos_sq, i)


@numba.njit(cache=True, nogil=True)
def _rows_line_stats_from_raw(raw, n, transform, d_sq, cos_sq):
    k = 0
    for i in range(d_sq.size):
        s = 0.0
        t = 0.0
        for _ in range(n):
            xv = transform(_uniform_from_raw(raw[k]))
            k += 1
            s += xv
            t += xv * xv
        _finish_row(s, t, n, d_sq, cos_sq, i)


@numba.njit(cache=True, nogil=True)
def _apply(raw, transform, out):
    for i in range(raw.size):
        out[i] = transform(_uniform_from_raw(raw[i]))


@dataclass(frozen=True)
class CoordinateLaw:
    """Law of the i.i.d. positive coordinates ``X_i`` fed to the line statistics.

    ``transform`` is a compiled scalar inverse CDF taking an open-interval
    uniform to a variate; ``mean`` is ``E X`` under the normalization
    ``E X^2 = 1``.
    """

    name: str
    mean: float
    transform: object

    def sample(self, shape, stream: RandomStream) -> np.ndarray:
        shape = (shape,) if np.isscalar(shape) else tuple(shape)
        size = int(np.prod(shape, dtype=np.int64))
        out = np.empty(size, dtype=np.float64)
        _apply(stream.bit_generator().random_raw(size), self.transform, out)
        return out.reshape(shape)


def sample_line_stats(
    trials: int, n: int, stream: RandomStream, law: CoordinateLaw
) -> tuple[np.ndarray, np.ndarray]:
    """``(d_sq, cos_sq)`` for ``trials`` lines with coordinates drawn from ``law``.

    Equivalent to ``batch_line_stats(law.sample((trials, n), stream))`` without
    materializing the ``(trials, n)`` array.
    """
    raw = stream.bit_generator().random_raw(trials * n)
    d_sq = np.empty(trials)
    cos_sq = np.empty(trials)
    _rows_line_stats_from_raw(raw, n, law.transform, d_sq, cos_sq)
    return d_sq, cos_sq


@numba.njit(cache=True, nogil=True)
def _half_normal_from_uniform(u):
    return abs(ppf_scalar(u))


@numba.njit(cache=True, nogil=True)
def _uniform_sqrt3_from_uniform(u):
    return u * 1.7320508075688772


HALF_NORMAL = CoordinateLaw("half_normal", math.sqrt(2.0 / math.pi), _half_normal_from_uniform)
UNIFORM_SQRT3 = CoordinateLaw("uniform_sqrt3", math.sqrt(3.0) / 2.0, _uniform_sqrt3_from_uniform)
