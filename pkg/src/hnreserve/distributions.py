"""Half-normal and inverse-gamma distributions.

Both use the parametrizations of the reserving model directly:

* ``HalfNormal(omega)`` is the law of ``|Y|`` with ``Y ~ N(0, omega * pi / 2)``,
  so that its mean is ``sqrt(omega)``.
* ``InverseGamma(alpha, beta)`` has density proportional to
  ``theta**-(alpha + 1) * exp(-beta / theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .exceptions import DomainError, MomentError
from .numerics import (
    QuadratureSpec,
    gamma_ratio_half,
    integrate,
    log_gamma,
    std_normal_cdf,
)

__all__ = [
    "HalfNormal",
    "InverseGamma",
    "hn_mean",
    "hn_mgf",
    "hn_pdf",
    "hn_sample",
    "hn_variance",
    "ig_mean_sqrt",
    "ig_pdf",
]

_LOG_2_OVER_PI = math.log(2.0 / math.pi)


def _check_positive(name, value):
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")
    return value


@dataclass(frozen=True)
class HalfNormal:
    omega: float

    def __post_init__(self):
        object.__setattr__(self, "omega", _check_positive("omega", self.omega))

    @property
    def sigma(self) -> float:
        """Standard deviation of the underlying centered normal."""
        return math.sqrt(self.omega * math.pi / 2.0)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("half-normal density is defined for x >= 0 only")
        out = _LOG_2_OVER_PI - 0.5 * math.log(self.omega) - x * x / (self.omega * math.pi)
        return out if out.ndim else float(out)

    def pdf(self, x):
        out = np.exp(self.logpdf(x))
        return out if np.ndim(out) else float(out)

    def cdf(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return 2.0 * std_normal_cdf(x * math.sqrt(2.0 / (math.pi * self.omega))) - 1.0

    def mean(self) -> float:
        return math.sqrt(self.omega)

    def second_moment(self) -> float:
        return math.pi * self.omega / 2.0

    def variance(self) -> float:
        return self.omega * (math.pi / 2.0 - 1.0)

    def mgf(self, t: float) -> float:
        """Moment generating function, finite for every real ``t``."""
        return (
            2.0
            * math.exp(math.pi * self.omega * t * t / 4.0)
            * (1.0 - std_normal_cdf(-t * math.sqrt(math.pi * self.omega / 2.0)))
        )

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """``|Y|`` for ``count`` i.i.d. draws ``Y ~ N(0, omega * pi / 2)``."""
        return np.abs(rng.normal(0.0, self.sigma, size=count))


def _log_standard_norm(a: float) -> float:
    """a*log(a) - a - log_gamma(a), via Stirling's series once a is large.

    The direct difference cancels badly for large shapes.
    """
    if a < 20.0:
        return a * math.log(a) - a - log_gamma(a)
    inv = 1.0 / a
    inv2 = inv * inv
    series = inv * (1 / 12 - inv2 * (1 / 360 - inv2 * (1 / 1260 - inv2 / 1680)))
    return 0.5 * math.log(a / (2.0 * math.pi)) - series


@lru_cache(maxsize=256)
def _standard_ppf(alpha: float, q: float) -> float:
    """Quantile of InverseGamma(alpha, 1) by root-finding on the quadrature CDF."""
    d = InverseGamma(alpha, 1.0)
    # bracket in log(theta) with steps of the density's width, 1/sqrt(alpha)
    center = -math.log(alpha)
    step = 1.0 / math.sqrt(alpha)
    lo, hi = center - step, center + step
    while d.cdf(math.exp(lo)) > q:
        lo -= hi - lo
    while d.cdf(math.exp(hi)) < q:
        hi += hi - lo
    root = brentq(lambda y: d.cdf(math.exp(y)) - q, lo, hi, xtol=1e-15, rtol=1e-15)
    return math.exp(root)


@dataclass(frozen=True)
class InverseGamma:
    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_positive("alpha", self.alpha))
        object.__setattr__(self, "beta", _check_positive("beta", self.beta))

    def logpdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        if np.any(theta <= 0):
            raise DomainError("inverse-gamma density is defined for theta > 0 only")
        a, b = self.alpha, self.beta
        out = a * math.log(b) - log_gamma(a) - (a + 1.0) * np.log(theta) - b / theta
        return out if out.ndim else float(out)

    def pdf(self, theta):
        out = np.exp(self.logpdf(theta))
        return out if np.ndim(out) else float(out)

    def mode(self) -> float:
        return self.beta / (self.alpha + 1.0)

    def mean_sqrt(self) -> float:
        """E(sqrt(Theta)) = G(alpha - 1/2) / G(alpha) * sqrt(beta)."""
        if not self.alpha > 0.5:
            raise MomentError(
                f"E(sqrt(Theta)) does not exist for shape alpha={self.alpha} <= 1/2"
            )
        return gamma_ratio_half(self.alpha) * math.sqrt(self.beta)

    def cdf(self, theta: float, rel_tol: float = 1e-12) -> float:
        """CDF by quadrature of the density (lower or upper tail, whichever is smaller).

        With w = log(theta) - log(beta/alpha) the log-density of w is
        c(alpha) - alpha * (w + exp(-w) - 1), whose width is 1/sqrt(alpha).
        Integrating in z = w * sqrt(alpha) keeps the mass at unit scale for
        any shape, which the infinite-range mapping relies on.
        """
        if theta <= 0:
            return 0.0
        if math.isinf(theta):
            return 1.0
        a = self.alpha
        root_a = math.sqrt(a)
        log_norm = _log_standard_norm(a) - 0.5 * math.log(a)

        def density(z):
            w = z / root_a
            with np.errstate(over="ignore", invalid="ignore"):
                out = np.exp(log_norm - a * (np.expm1(-w) + w))
            return np.nan_to_num(out, nan=0.0, posinf=0.0)

        z0 = root_a * (math.log(theta) - math.log(self.beta / a))
        if z0 <= 0.0:
            spec = QuadratureSpec(-math.inf, z0, rel_tol=rel_tol, abs_tol=1e-300)
            return integrate(density, spec, vectorized=True)
        spec = QuadratureSpec(z0, math.inf, rel_tol=rel_tol, abs_tol=1e-300)
        return 1.0 - integrate(density, spec, vectorized=True)

    def ppf(self, q: float) -> float:
        """Quantile function.

        Uses the scale family property: Theta = beta * Theta_1 with
        Theta_1 ~ InverseGamma(alpha, 1), so only the standardized quantile is
        root-found (and cached).
        """
        if not 0.0 < q < 1.0:
            raise DomainError(f"quantile level must lie in (0, 1), got {q!r}")
        return self.beta * _standard_ppf(self.alpha, float(q))

    def sqrt_interval(self, level: float = 0.9) -> tuple[float, float]:
        """Equal-tailed credible interval for sqrt(Theta)."""
        tail = (1.0 - level) / 2.0
        return math.sqrt(self.ppf(tail)), math.sqrt(self.ppf(1.0 - tail))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.beta / rng.gamma(self.alpha, 1.0, size=count)


def hn_pdf(d: HalfNormal, x):
    return d.pdf(x)


def hn_mean(d: HalfNormal) -> float:
    return d.mean()


def hn_variance(d: HalfNormal) -> float:
    return d.variance()


def hn_mgf(d: HalfNormal, t: float) -> float:
    return d.mgf(t)


def hn_sample(d: HalfNormal, rng: np.random.Generator, count: int) -> np.ndarray:
    return d.sample(rng, count)


def ig_pdf(d: InverseGamma, theta):
    return d.pdf(theta)


def ig_mean_sqrt(d: InverseGamma) -> float:
    return d.mean_sqrt()
