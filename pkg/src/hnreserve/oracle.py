"""Brute-force numerical oracles for the closed-form results.

Every check here recomputes a closed-form quantity by quadrature (or exact
arithmetic) along a route that does not reuse the closed form. The CLI's
``verify`` subcommand runs :func:`run_checks`; the test-suite uses the same
oracles with its own grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .distributions import HalfNormal, InverseGamma
from .numerics import QuadratureSpec, gamma_ratio_half, integrate, log_gamma, std_normal_cdf
from .reserving import PriorSpec, bayes_factors, bayes_posteriors, elicit_prior
from .triangle import Triangle

__all__ = [
    "Check",
    "fixture_triangle",
    "posterior_mean_sqrt_by_quadrature",
    "random_triangles",
    "run_checks",
]

_LOG_2_OVER_PI = math.log(2.0 / math.pi)


def fixture_triangle() -> Triangle:
    """The 3-year cumulative triangle {100,150,165 / 110,154 / 120}."""
    nan = np.nan
    return Triangle(np.array([
        [100.0, 150.0, 165.0],
        [110.0, 154.0, nan],
        [120.0, nan, nan],
    ]))


def random_triangles(count: int = 10, seed: int = 12345) -> list[Triangle]:
    """Seeded cumulative triangles of sizes 3..7 with varied row growth."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(3, 8))
        values = np.full((n, n), np.nan)
        for r in range(n):
            values[r, 0] = rng.uniform(50.0, 5000.0)
            for j in range(1, n - r):
                values[r, j] = values[r, j - 1] * rng.uniform(0.8, 2.5)
        out.append(Triangle(values))
    return out


def _log_unnormalized_posterior(prev, cur, alpha, beta) -> Callable:
    """log of prior kernel x product of half-normal densities, as a function of y = log(theta).

    The prior kernel is theta^-(alpha+1) exp(-beta/theta); each cell contributes
    the half-normal log-density of S_{i,j} with omega = theta * S_{i,j-1}^2.
    The extra ``+ y`` is the Jacobian of theta = exp(y).
    """
    prev = np.asarray(prev, dtype=float)
    cur = np.asarray(cur, dtype=float)

    def logpost(y):
        y = np.asarray(y, dtype=float)[..., None]
        with np.errstate(over="ignore", invalid="ignore"):
            inv_theta = np.exp(-y)
            prior = -(alpha + 1.0) * y[..., 0] - beta * inv_theta[..., 0]
            log_omega = y + 2.0 * np.log(prev)
            cells = _LOG_2_OVER_PI - 0.5 * log_omega - cur * cur * np.exp(-log_omega) / math.pi
            return prior + cells.sum(axis=-1) + y[..., 0]

    return logpost


def posterior_mean_sqrt_by_quadrature(prev, cur, alpha: float, beta: float,
                                      rel_tol: float = 1e-12) -> float:
    """E(sqrt(theta) | column data) from the unsimplified posterior, by quadrature.

    The log-density is maximized on a grid over log(theta) first, and both
    integrals are taken in the variable log(theta) - peak, so the result does
    not depend on where the mass sits on the theta axis.
    """
    logpost = _log_unnormalized_posterior(prev, cur, alpha, beta)
    grid = np.linspace(-60.0, 60.0, 4001)
    values = logpost(grid)
    peak = grid[int(np.nanargmax(values))]
    top = float(logpost(np.array([peak]))[0])

    def weight(z, power=0.0):
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.exp(logpost(peak + z) - top + power * z)
        return np.nan_to_num(out, nan=0.0, posinf=0.0)

    spec = QuadratureSpec(-math.inf, math.inf, rel_tol=rel_tol, max_subdivisions=2000)
    mass = integrate(weight, spec, vectorized=True, initial_panels=8)
    moment = integrate(lambda z: weight(z, 0.5), spec, vectorized=True, initial_panels=8)
    return math.exp(0.5 * peak) * moment / mass


@dataclass(frozen=True)
class Check:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)


def _rel(a, b):
    return abs(a - b) / abs(b)


def _half_line(f, rel_tol=1e-12):
    return integrate(f, QuadratureSpec(0.0, math.inf, rel_tol=rel_tol))


def _ig_in_log(d, y, power):
    """pdf(theta) * theta**power at theta = exp(y).

    ``power`` includes the Jacobian, so power=1 integrates the density itself.
    """
    if not -700.0 < y < 700.0:
        return 0.0
    theta = math.exp(y)
    return math.exp(d.logpdf(theta) + power * y)


def run_checks(triangles=None) -> list[Check]:
    """Run every oracle identity on the default grid."""
    checks = []

    exact = math.log(math.factorial(44))
    checks.append(Check("log_gamma(45) vs ln(44!)", abs(log_gamma(45.0) - exact), 1e-12))
    # Gamma(3.5) = 15/8 sqrt(pi) and Gamma(3) = 2, so ratio = 16 / (15 sqrt(pi))
    ratio = float(Fraction(16, 15)) / math.sqrt(math.pi)
    checks.append(Check("gamma_ratio_half(3.5) vs recurrence",
                        _rel(gamma_ratio_half(3.5), ratio), 1e-12))

    phi = integrate(lambda x: math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi),
                    QuadratureSpec(-math.inf, 1.0, rel_tol=1e-13))
    checks.append(Check("std_normal_cdf(1) vs quadrature", abs(std_normal_cdf(1.0) - phi), 1e-12))

    for omega in (0.5, 1.0, 2.0):
        d = HalfNormal(omega)
        mass = _half_line(d.pdf)
        mean = _half_line(lambda x: x * d.pdf(x))
        second = _half_line(lambda x: x * x * d.pdf(x))
        checks.append(Check(f"half-normal omega={omega}: density integrates to 1",
                            abs(mass - 1.0), 1e-9))
        checks.append(Check(f"half-normal omega={omega}: mean", _rel(d.mean(), mean), 1e-8))
        checks.append(Check(f"half-normal omega={omega}: variance",
                            _rel(d.variance(), second - mean * mean), 1e-8))
        for t in (-2.0, -1.0, 0.0, 1.0, 2.0):
            mgf = _half_line(lambda x: math.exp(t * x + d.logpdf(x)))
            checks.append(Check(f"half-normal omega={omega}: MGF at t={t}",
                                _rel(d.mgf(t), mgf), 1e-6))

    for alpha, beta in ((1.0, 1.0), (2.0, 3.0), (2.0, 5.0), (3.5, 3.0), (45.0, 0.5)):
        d = InverseGamma(alpha, beta)
        mass = integrate(lambda y: _ig_in_log(d, y, 1.0),
                         QuadratureSpec(-math.inf, math.inf, rel_tol=1e-12))
        moment = integrate(lambda y: _ig_in_log(d, y, 1.5),
                           QuadratureSpec(-math.inf, math.inf, rel_tol=1e-12))
        checks.append(Check(f"inverse-gamma ({alpha}, {beta}): density integrates to 1",
                            abs(mass - 1.0), 1e-9))
        checks.append(Check(f"inverse-gamma ({alpha}, {beta}): E(sqrt(Theta))",
                            _rel(d.mean_sqrt(), moment), 1e-8))

    if triangles is None:
        triangles = [fixture_triangle()] + random_triangles(3)
    for k, tri in enumerate(triangles):
        for alpha, beta in ((1.0, 0.1), (3.5, 3.0), (45.0, 1.0)):
            prior = PriorSpec.constant(tri.n, alpha, beta)
            factors = bayes_factors(bayes_posteriors(tri, prior)).factors
            worst = 0.0
            for j in range(1, tri.n):
                rows = tri.n - j
                brute = posterior_mean_sqrt_by_quadrature(
                    tri.values[:rows, j - 1], tri.values[:rows, j], alpha, beta)
                worst = max(worst, _rel(factors[j - 1], brute))
            checks.append(Check(
                f"triangle {k} (n={tri.n}), prior ({alpha}, {beta}): "
                "Bayesian factors vs posterior quadrature", worst, 1e-8))
        for alpha in (1.0, 5.0, 45.0):
            prior = elicit_prior(tri, alpha)
            worst = 0.0
            for j, d in enumerate(prior.distributions(), start=1):
                rows = tri.n - j
                target = math.sqrt(np.sum(tri.values[:rows, j] ** 2)
                                   / np.sum(tri.values[:rows, j - 1] ** 2))
                worst = max(worst, _rel(d.mean_sqrt(), target))
            checks.append(Check(f"triangle {k} (n={tri.n}), alpha={alpha}: elicitation identity",
                                worst, 1e-10))
    return checks
