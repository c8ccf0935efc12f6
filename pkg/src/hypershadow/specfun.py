"""Special functions: log-gamma, regularized incomplete beta, normal CDF/quantile.

Everything here is scalar and pure.  ``ppf_scalar``/``norm_ppf`` are the
compiled quantile used by the samplers to turn uniform variates into normal
ones; ``std_normal_quantile`` is the slower root-finding inverse used for
everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "BetaParams",
    "log_gamma",
    "log_beta",
    "reg_inc_beta",
    "std_normal_cdf",
    "std_normal_pdf",
    "std_normal_quantile",
    "norm_ppf",
    "ppf_scalar",
]

LOG_SQRT_2PI = 0.91893853320467274178  # log(sqrt(2*pi))
SQRT1_2 = 0.70710678118654752440  # 1/sqrt(2)

# Lanczos approximation, g and N=13, as used by Boost/SciPy (lanczos13m53).
# The sum is stored pre-scaled by exp(-g) as a ratio of degree-12 polynomials,
# coefficients highest degree first; the denominator is x(x+1)...(x+11).
LANCZOS_G = 6.024680040776729583740234375
_LANCZOS_NUM = (
    0.006061842346248906525783753964555936883222,
    0.5098416655656676188125178644804694509993,
    19.51992788247617482847860966235652136208,
    449.9445569063168119446858607650988409623,
    6955.999602515376140356310115515198987526,
    75999.29304014542649875303443598909137092,
    601859.6171681098786670226533699352302507,
    3481712.15498064590882071018964774556468,
    14605578.08768506808414169982791359218571,
    43338889.32467613834773723740590533316085,
    86363131.28813859145546927288977868422342,
    103794043.1163445451906271053616070238554,
    56906521.91347156388090791033559122686859,
)
_LANCZOS_DEN = (
    1.0,
    66.0,
    1925.0,
    32670.0,
    357423.0,
    2637558.0,
    13339535.0,
    45995730.0,
    105258076.0,
    150917976.0,
    120543840.0,
    39916800.0,
    0.0,
)

# Stirling-series coefficients for the remainder
# log_gamma(x) - [(x - 1/2) log x - x + log sqrt(2 pi)], in powers of 1/x^2.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

BETA_CF_EPS = 1e-14
BETA_CF_MAXITER = 300
_TINY = 1e-300


def _finite(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def _lanczos_sum_expg_scaled(x: float) -> float:
    if x <= 1.0:
        num = 0.0
        den = 0.0
        for cn, cd in zip(_LANCZOS_NUM, _LANCZOS_DEN):
            num = num * x + cn
            den = den * x + cd
        return num / den
    # Evaluate in 1/x to stay clear of overflow for huge x.
    y = 1.0 / x
    num = 0.0
    den = 0.0
    for cn, cd in zip(reversed(_LANCZOS_NUM), reversed(_LANCZOS_DEN)):
        num = num * y + cn
        den = den * y + cd
    return num / den


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for positive real ``x``.

    Lanczos approximation; for ``x < 0.5`` the value is obtained from
    ``log_gamma(x + 1) - log(x)``.
    """
    x = _finite(x, "x")
    if x <= 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    if x < 0.5:
        return log_gamma(x + 1.0) - math.log(x)
    if x == 1.0 or x == 2.0:
        return 0.0
    zgh = x + LANCZOS_G - 0.5
    return (x - 0.5) * (math.log(zgh) - 1.0) + math.log(_lanczos_sum_expg_scaled(x))


def _stirling_remainder(x: float) -> float:
    # valid (to ~1e-17 absolute) for x >= 10
    y = 1.0 / (x * x)
    acc = 0.0
    for c in reversed(_STIRLING):
        acc = acc * y + c
    return acc / x


def _log_gamma_ratio(big: float, small: float) -> float:
    """log Gamma(big) - log Gamma(big + small) for big >= 10, without cancellation."""
    return (
        -small * math.log(big)
        - (big + small - 0.5) * math.log1p(small / big)
        + small
        + _stirling_remainder(big)
        - _stirling_remainder(big + small)
    )


def log_beta(a: float, b: float) -> float:
    """log B(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a + b)."""
    a = _finite(a, "a")
    b = _finite(b, "b")
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"log_beta requires a, b > 0, got {a!r}, {b!r}")
    small, big = (a, b) if a <= b else (b, a)
    if big < 10.0:
        return log_gamma(a) + log_gamma(b) - log_gamma(a + b)
    return log_gamma(small) + _log_gamma_ratio(big, small)


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of a beta distribution."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive finite real, got {value!r}")

    def cdf(self, z: float) -> float:
        return reg_inc_beta(z, self.alpha, self.beta)


def _beta_cf(z: float, a: float, b: float) -> float:
    """Continued fraction for I_z(a, b), modified Lentz evaluation."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * z / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, BETA_CF_MAXITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * z / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < BETA_CF_EPS:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge in {BETA_CF_MAXITER} "
        f"iterations (z={z!r}, a={a!r}, b={b!r})"
    )


def reg_inc_beta(z: float, alpha: float, beta: float) -> float:
    """Regularized incomplete beta function, the Beta(alpha, beta) CDF at ``z``.

    Parameters
    ----------
    z
        Evaluation point in [0, 1].
    alpha, beta
        Positive shape parameters.

    Returns
    -------
    float
        ``I_z(alpha, beta)`` in [0, 1].
    """
    z = _finite(z, "z")
    params = BetaParams(float(alpha), float(beta))
    a, b = params.alpha, params.beta
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"reg_inc_beta requires 0 <= z <= 1, got {z!r}")
    if z == 0.0:
        return 0.0
    if z == 1.0:
        return 1.0
    log_front = a * math.log(z) + b * math.log1p(-z) - log_beta(a, b)
    front = math.exp(log_front)
    if z < (a + 1.0) / (a + b + 2.0):
        value = front * _beta_cf(z, a, b) / a
    else:
        value = 1.0 - front * _beta_cf(1.0 - z, b, a) / b
    return min(1.0, max(0.0, value))


def std_normal_pdf(x: float) -> float:
    x = _finite(x, "x")
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    x = _finite(x, "x")
    return 0.5 * math.erfc(-x * SQRT1_2)


def std_normal_quantile(p: float) -> float:
    """Inverse of :func:`std_normal_cdf` on (0, 1).

    Bisection on a fixed bracket until it is narrow, then safeguarded Newton.
    Upper-half probabilities are reflected so the root-find always works on
    the accurately represented lower tail.
    """
    p = _finite(p, "p")
    if not 0.0 < p < 1.0:
        raise DomainError(f"std_normal_quantile requires 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -std_normal_quantile(1.0 - p)

    lo, hi = -40.0, 0.0
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if std_normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(100):
        f = std_normal_cdf(x) - p
        if f == 0.0:
            return x
        if f < 0.0:
            lo = x
        else:
            hi = x
        step = f / std_normal_pdf(x)
        x_new = x - step
        if not lo <= x_new <= hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 1e-15 * max(1.0, abs(x)):
            return x_new
        x = x_new
    raise ConvergenceError(f"std_normal_quantile did not converge for p={p!r}")


# Wichura's AS241 (PPND16) rational approximations, ~1e-16 relative accuracy.
_AS241_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
            1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
            3.3430575583588128105e4, 2.5090809287301226727e3)
_AS241_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
            2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
            5.2264952788528545610e3)
_AS241_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
            3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
            2.27238449892691845833e-2, 7.74545014278341407640e-4)
_AS241_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
            1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
            1.05075007164441684324e-9)
_AS241_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
            2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
            2.71155556874348757815e-5, 2.01033439929228813265e-7)
_AS241_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
            7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
            2.04426310338993978564e-15)


@numba.njit(cache=True, nogil=True)
def _horner8(c, x):
    acc = c[7]
    for i in range(6, -1, -1):
        acc = acc * x + c[i]
    return acc


@numba.njit(cache=True, nogil=True)
def ppf_scalar(p):
    """AS241 standard normal quantile for ``0 < p < 1`` (no validation)."""
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _horner8(_AS241_A, r) / _horner8(_AS241_B, r)
    r = math.sqrt(-math.log(p if q < 0.0 else 1.0 - p))
    if r <= 5.0:
        r -= 1.6
        val = _horner8(_AS241_C, r) / _horner8(_AS241_D, r)
    else:
        r -= 5.0
        val = _horner8(_AS241_E, r) / _horner8(_AS241_F, r)
    return -val if q < 0.0 else val


@numba.njit(cache=True, nogil=True)
def _ppf_array(p, out):
    for i in range(p.size):
        out[i] = ppf_scalar(p[i])


def norm_ppf(p) -> np.ndarray:
    """Vectorized standard normal quantile for probabilities strictly inside (0, 1).

    No input validation; callers pass uniforms from an open-interval generator.
    """
    p = np.asarray(p, dtype=np.float64)
    flat = np.ascontiguousarray(p).ravel()
    out = np.empty_like(flat)
    _ppf_array(flat, out)
    return out.reshape(p.shape)
