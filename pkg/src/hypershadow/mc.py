"""Monte Carlo estimation of the blocked-light probability and of limit statistics.

Every trial draws one direction and compares it with its nearest cube vertex
only, so a trial costs O(n) whatever the number of balls.  Trials are grouped
into fixed-size blocks; block ``k`` always reads substream ``k`` of the seed,
which makes every result a function of ``(seed, n, trials)`` alone and not of
how many workers ran the blocks.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import asymptotics
from .asymptotics import LimitLaw, MomentSet
from .capgeom import dimension
from .errors import DomainError
from .randgeom import HALF_NORMAL, CoordinateLaw, RandomStream, sample_line_stats
from .specfun import std_normal_cdf, std_normal_quantile

__all__ = [
    "DEFAULT_SEED",
    "KINDS",
    "MCEstimate",
    "StatisticSample",
    "MomentReport",
    "QuantileReport",
    "AlphaRow",
    "block_size",
    "wilson_interval",
    "estimate_alpha",
    "sample_limit_statistic",
    "sample_limit_statistics",
    "law_for",
    "moment_check",
    "quantile_check",
    "alpha_convergence_table",
]

log = logging.getLogger(__name__)

DEFAULT_SEED = 271828
KINDS = ("ratio_centered", "cos_theta", "distance_centered")

# Random numbers per block; fixed so block boundaries never depend on workers.
BLOCK_ELEMENTS = 1 << 20


def block_size(n: int) -> int:
    """Trials per block for dimension ``n``."""
    return max(1, BLOCK_ELEMENTS // n)


def _blocks(trials: int, n: int) -> list[tuple[int, int]]:
    size = block_size(n)
    return [(k, min(size, trials - k * size)) for k in range((trials + size - 1) // size)]


def _map_blocks(fn: Callable[[int, int], object], trials: int, n: int, workers: int) -> list:
    blocks = _blocks(trials, n)
    if workers <= 1 or len(blocks) <= 1:
        return [fn(k, m) for k, m in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda km: fn(*km), blocks))


def _check_trials(trials: int, minimum: int = 1) -> int:
    if isinstance(trials, bool) or int(trials) != trials or trials < minimum:
        raise DomainError(f"trials must be an integer >= {minimum}, got {trials!r}")
    return int(trials)


def _check_workers(workers: int) -> int:
    if int(workers) != workers or workers < 1:
        raise DomainError(f"workers must be a positive integer, got {workers!r}")
    return int(workers)


def wilson_interval(hits: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {level!r}")
    z = std_normal_quantile(0.5 + 0.5 * level)
    p = hits / trials
    z2n = z * z / trials
    centre = (p + 0.5 * z2n) / (1.0 + z2n)
    half = z / (1.0 + z2n) * math.sqrt(p * (1.0 - p) / trials + 0.25 * z2n / trials)
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


@dataclass(frozen=True)
class MCEstimate:
    n: int
    r: float
    trials: int
    hits: int
    p_hat: float
    ci_low: float
    ci_high: float
    ci_level: float
    seed: int

    @property
    def standard_error(self) -> float:
        return math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.trials)


def estimate_alpha(
    n: int,
    r: float,
    trials: int,
    seed: int = DEFAULT_SEED,
    ci_level: float = 0.95,
    workers: int = 1,
) -> MCEstimate:
    """Estimate the probability that a random line through the origin meets a ball.

    Balls of radius ``r`` sit at all vertices of ``[-1, 1]^n``.  A line meets
    one iff its distance to the nearest vertex is at most ``r``.
    """
    n = dimension(n)
    r = float(r)
    if not (math.isfinite(r) and 0.0 <= r <= math.sqrt(n)):
        raise DomainError(f"ball radius must lie in [0, sqrt({n})], got {r!r}")
    trials = _check_trials(trials)
    workers = _check_workers(workers)
    if not 0.0 < ci_level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {ci_level!r}")
    stream = RandomStream(seed)
    r_sq = r * r

    def run(k: int, m: int) -> int:
        d_sq, _ = sample_line_stats(m, n, stream.substream(k), HALF_NORMAL)
        return int(np.count_nonzero(d_sq <= r_sq))

    hits = sum(_map_blocks(run, trials, n, workers))
    low, high = wilson_interval(hits, trials, ci_level)
    return MCEstimate(n, r, trials, hits, hits / trials, low, high, ci_level, stream.seed)


@dataclass(frozen=True)
class StatisticSample:
    """Per-trial values of one of the studied statistics.

    ``ratio_centered``: ``sqrt(n) (s^2/(n t) - mu^2)``;
    ``cos_theta``: ``sqrt(s^2/(n t))``;
    ``distance_centered``: ``sqrt(d^2) - sqrt((1 - mu^2) n)``.
    """

    kind: str
    n: int
    values: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.values)


def sample_limit_statistics(
    kinds: Sequence[str],
    n: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    coords: CoordinateLaw = HALF_NORMAL,
) -> dict[str, StatisticSample]:
    """Several statistics computed from the same simulated lines."""
    kinds = tuple(kinds)
    for kind in kinds:
        if kind not in KINDS:
            raise DomainError(f"unknown statistic kind {kind!r}; expected one of {KINDS}")
    n = dimension(n, minimum=1)
    trials = _check_trials(trials, minimum=2)
    workers = _check_workers(workers)
    stream = RandomStream(seed)
    mu_sq = coords.mean * coords.mean
    root_n = math.sqrt(n)
    centre_d = math.sqrt((1.0 - mu_sq) * n)

    def run(k: int, m: int) -> list[np.ndarray]:
        d_sq, cos_sq = sample_line_stats(m, n, stream.substream(k), coords)
        out = []
        for kind in kinds:
            if kind == "ratio_centered":
                out.append(root_n * (cos_sq - mu_sq))
            elif kind == "cos_theta":
                out.append(np.sqrt(cos_sq))
            else:
                out.append(np.sqrt(np.maximum(d_sq, 0.0)) - centre_d)
        return out

    parts = _map_blocks(run, trials, n, workers)
    return {
        kind: StatisticSample(kind, n, np.concatenate([p[i] for p in parts]))
        for i, kind in enumerate(kinds)
    }


def sample_limit_statistic(
    kind: str,
    n: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    coords: CoordinateLaw = HALF_NORMAL,
) -> StatisticSample:
    return sample_limit_statistics((kind,), n, trials, seed, workers, coords)[kind]


def law_for(kind: str, n: int, moments: MomentSet | None = None) -> LimitLaw:
    """Normal approximation, at dimension ``n``, to the values of a ``kind`` sample.

    ``cos_theta`` values are not rescaled, so their law has variance shrinking
    like ``1/n``; the centred kinds have ``n``-free limits.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown statistic kind {kind!r}; expected one of {KINDS}")
    m = moments or asymptotics.half_normal_moments()
    sigma2 = asymptotics.ratio_limit_variance(m)
    if kind == "ratio_centered":
        return LimitLaw(0.0, sigma2)
    if kind == "cos_theta":
        return LimitLaw(m.mu, sigma2 / (4.0 * m.mu * m.mu) / n)
    return LimitLaw(0.0, sigma2 / (4.0 * (1.0 - m.mu * m.mu)))


@dataclass(frozen=True)
class MomentReport:
    kind: str
    n: int
    size: int
    mean: float
    variance: float
    law_mean: float
    law_variance: float
    tol_mean: float
    tol_var: float
    mean_ok: bool
    var_ok: bool | None  # None when the variance check was skipped
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.mean_ok and self.var_ok is not False

    @property
    def variance_ratio(self) -> float:
        return self.variance / self.law_variance if self.law_variance > 0 else math.nan


def moment_check(sample: StatisticSample, law: LimitLaw, tol_mean: float, tol_var: float) -> MomentReport:
    """Compare the sample mean and variance with a normal law.

    Passes when ``|mean - law.mean| <= tol_mean`` and
    ``|variance / law.variance - 1| <= tol_var``.
    """
    values = np.asarray(sample.values, dtype=np.float64)
    if values.size == 0:
        raise DomainError("sample is empty")
    # compensated sums: exact for constant samples, no drift for long ones
    mean = math.fsum(values) / values.size
    variance = math.fsum((values - mean) ** 2) / (values.size - 1) if values.size > 1 else 0.0
    mean_ok = abs(mean - law.mean) <= tol_mean
    note = ""
    if law.variance == 0.0:
        var_ok = None
        note = "law variance is 0; variance check skipped"
        log.warning(note)
    else:
        var_ok = abs(variance / law.variance - 1.0) <= tol_var
    return MomentReport(sample.kind, sample.n, int(values.size), mean, variance, law.mean,
                        law.variance, tol_mean, tol_var, mean_ok, var_ok, note)


@dataclass(frozen=True)
class QuantileReport:
    kind: str
    n: int
    size: int
    probabilities: tuple[float, ...]
    empirical: tuple[float, ...]
    expected: tuple[float, ...]
    tol: float

    @property
    def gaps(self) -> tuple[float, ...]:
        return tuple(abs(e - x) for e, x in zip(self.empirical, self.expected))

    @property
    def passed(self) -> bool:
        return all(g <= self.tol for g in self.gaps)


def quantile_check(sample: StatisticSample, law: LimitLaw, quantiles: Sequence[float], tol: float) -> QuantileReport:
    """Compare empirical quantiles with those of a normal law, in value units."""
    values = np.asarray(sample.values, dtype=np.float64)
    if values.size < 1000:
        raise DomainError(f"quantile check needs at least 1000 values, got {values.size}")
    probs = tuple(float(p) for p in quantiles)
    if not probs or any(not 0.0 < p < 1.0 for p in probs):
        raise DomainError(f"quantile probabilities must lie in (0, 1), got {quantiles!r}")
    empirical = tuple(float(q) for q in np.quantile(values, probs))
    expected = tuple(law.quantile(p) for p in probs)
    return QuantileReport(sample.kind, sample.n, int(values.size), probs, empirical, expected, float(tol))


@dataclass(frozen=True)
class AlphaRow:
    n: int
    z: float
    r: float
    estimate: MCEstimate
    predicted: float


def alpha_convergence_table(
    n_list: Sequence[int],
    z_list: Sequence[float],
    trials: int,
    seed: int = DEFAULT_SEED,
    ci_level: float = 0.95,
    workers: int = 1,
) -> list[AlphaRow]:
    """Estimated blocked fraction at the threshold radius next to its limit ``Phi(z)``."""
    rows = []
    for n in n_list:
        for z in z_list:
            r = asymptotics.threshold_radius(n, z)
            est = estimate_alpha(n, r, trials, seed=seed, ci_level=ci_level, workers=workers)
            rows.append(AlphaRow(n, float(z), r, est, std_normal_cdf(z)))
    return rows
