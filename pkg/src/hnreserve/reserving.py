"""Chain-ladder engines: Mack and the half-normal Bayesian variant.

Both engines produce :class:`DevFactors`; :func:`project` turns any factor
sequence into ultimates, outstanding claims and the total IBNR reserve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .distributions import InverseGamma
from .exceptions import ContractError, DomainError, MomentError, ValidationError
from .numerics import gamma_ratio_half
from .triangle import CUMULATIVE, FutureCellIndex, Triangle

__all__ = [
    "BAYES",
    "MACK",
    "Comparison",
    "DevFactors",
    "PriorSpec",
    "ReserveReport",
    "bayes_factors",
    "bayes_posteriors",
    "compare",
    "default_alpha",
    "elicit_prior",
    "mack_factors",
    "project",
    "run_bayes",
]

MACK = "mack"
BAYES = "bayes_half_normal"
_METHODS = (MACK, BAYES)


@dataclass(frozen=True)
class DevFactors:
    """Development factors f_1..f_{n-1}; ``factors[k]`` is f_{k+1}."""

    method: str
    factors: tuple

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        factors = tuple(float(f) for f in self.factors)
        for j, f in enumerate(factors, start=1):
            if not (f > 0 and math.isfinite(f)):
                raise ContractError(f"development factor f_{j} = {f!r} must be positive and finite")
        object.__setattr__(self, "factors", factors)

    def __len__(self):
        return len(self.factors)

    def __getitem__(self, j):
        """1-indexed access, ``f[j]`` for j = 1..n-1."""
        if not 1 <= j <= len(self.factors):
            raise IndexError(f"factor index {j} outside 1..{len(self.factors)}")
        return self.factors[j - 1]


@dataclass(frozen=True)
class PriorSpec:
    """Inverse-gamma prior hyperparameters per development year j = 1..n-1."""

    alpha: tuple
    beta: tuple
    mode: str = "explicit"

    def __post_init__(self):
        if self.mode not in ("explicit", "auto_eq24"):
            raise ValueError(f"unknown elicitation mode {self.mode!r}")
        alpha = tuple(float(a) for a in self.alpha)
        beta = tuple(float(b) for b in self.beta)
        if len(alpha) != len(beta):
            raise ContractError(f"{len(alpha)} alpha values but {len(beta)} beta values")
        for j, (a, b) in enumerate(zip(alpha, beta), start=1):
            if not (a > 0.5 and math.isfinite(a)):
                raise DomainError(f"prior alpha_{j} = {a!r} must exceed 1/2")
            if not (b > 0 and math.isfinite(b)):
                raise DomainError(f"prior beta_{j} = {b!r} must be positive")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def constant(cls, n: int, alpha: float, beta: float) -> "PriorSpec":
        return cls((alpha,) * (n - 1), (beta,) * (n - 1))

    def __len__(self):
        return len(self.alpha)

    def distributions(self) -> list[InverseGamma]:
        return [InverseGamma(a, b) for a, b in zip(self.alpha, self.beta)]


@dataclass(frozen=True)
class ReserveReport:
    """Projection results.

    ``ultimates`` and ``outstanding`` hold accident years 2..n in order;
    ``completed`` is the n x n cumulative square with the future triangle
    filled in.
    """

    method: str
    factors: DevFactors
    accident_years: tuple
    ultimates: tuple
    outstanding: tuple
    total_reserve: float
    input_fingerprint: str
    completed: np.ndarray = field(repr=False)
    posteriors: Optional[tuple] = field(default=None, repr=False)
    prior: Optional[PriorSpec] = field(default=None, repr=False)

    def predictions(self) -> dict:
        """Future-cell predictions keyed by :class:`FutureCellIndex`."""
        n = self.completed.shape[0]
        return {
            FutureCellIndex(i, j): float(self.completed[i - 1, j])
            for i in range(2, n + 1)
            for j in range(n - i + 1, n)
        }


def _require_cumulative(t: Triangle) -> None:
    if t.kind != CUMULATIVE:
        raise ContractError("reserving engines need a cumulative triangle; call cumulate() first")


def _column_pairs(t: Triangle, j: int):
    """(S_{i,j-1}, S_{i,j}) for i = 1..n-j as two arrays."""
    rows = t.n - j
    return t.values[:rows, j - 1], t.values[:rows, j]


def mack_factors(t: Triangle) -> DevFactors:
    """Column-sum ratios sum_i S_{i,j} / sum_i S_{i,j-1} over rows observed at j."""
    _require_cumulative(t)
    factors = []
    for j in range(1, t.n):
        prev, cur = _column_pairs(t, j)
        denom = prev.sum()
        if not denom > 0:
            raise ValidationError(f"column dev_{j - 1} sums to {denom!r}; cannot form f_{j}")
        factors.append(cur.sum() / denom)
    return DevFactors(MACK, tuple(factors))


def default_alpha(n: int) -> float:
    """Number of future cells of an n-year triangle, n(n-1)/2."""
    return n * (n - 1) / 2.0


def _per_column(value, n: int, name: str) -> tuple:
    if np.ndim(value) == 0:
        return (float(value),) * (n - 1)
    values = tuple(float(v) for v in value)
    if len(values) != n - 1:
        raise ContractError(f"{name} needs {n - 1} per-column values, got {len(values)}")
    return values


def elicit_prior(t: Triangle, alpha: Union[float, Sequence[float], None] = None) -> PriorSpec:
    """Data-driven prior: beta_j chosen so the prior mean factor equals
    ``sqrt(sum_i S_{i,j}^2 / sum_i S_{i,j-1}^2)``.

    ``alpha`` defaults to n(n-1)/2 for every column.
    """
    _require_cumulative(t)
    n = t.n
    if alpha is None:
        alpha = default_alpha(n)
    alphas = _per_column(alpha, n, "alpha")
    betas = []
    for j, a in enumerate(alphas, start=1):
        if not a > 0.5:
            raise DomainError(f"alpha_{j} = {a!r} must exceed 1/2")
        prev, cur = _column_pairs(t, j)
        # G(a)^2 / G(a - 1/2)^2 == gamma_ratio_half(a) ** -2, never formed directly
        ratio = gamma_ratio_half(a)
        betas.append(float(np.sum(cur * cur) / np.sum(prev * prev)) / (ratio * ratio))
    return PriorSpec(alphas, tuple(betas), mode="auto_eq24")


def bayes_posteriors(t: Triangle, prior: PriorSpec) -> list[InverseGamma]:
    """Conjugate update: shape alpha_j + (n-j)/2, scale beta_j + sum (S_{i,j}/S_{i,j-1})^2 / pi."""
    _require_cumulative(t)
    n = t.n
    if len(prior) != n - 1:
        raise ContractError(f"prior covers {len(prior)} columns, triangle needs {n - 1}")
    posteriors = []
    for j in range(1, n):
        prev, cur = _column_pairs(t, j)
        ratios = cur / prev
        shape = prior.alpha[j - 1] + 0.5 * (n - j)
        scale = prior.beta[j - 1] + float(np.sum(ratios * ratios)) / math.pi
        posteriors.append(InverseGamma(shape, scale))
    return posteriors


def bayes_factors(posteriors: Sequence[InverseGamma]) -> DevFactors:
    """Posterior means of sqrt(Theta_j)."""
    factors = []
    for j, post in enumerate(posteriors, start=1):
        try:
            factors.append(post.mean_sqrt())
        except MomentError as exc:
            raise MomentError(f"development year {j}: {exc}") from None
    return DevFactors(BAYES, tuple(factors))


def project(t: Triangle, f: DevFactors, **extra) -> ReserveReport:
    """Fill the future triangle with latest-diagonal times cumulative factor products."""
    _require_cumulative(t)
    n = t.n
    if len(f) != n - 1:
        raise ContractError(f"{len(f)} development factors given for an {n}-year triangle")
    completed = np.array(t.values)
    for r in range(1, n):
        last = n - 1 - r
        for j in range(last + 1, n):
            completed[r, j] = completed[r, j - 1] * f.factors[j - 1]
    completed.setflags(write=False)
    latest = t.latest()
    ultimates = tuple(float(completed[r, n - 1]) for r in range(1, n))
    outstanding = tuple(u - float(latest[r]) for r, u in zip(range(1, n), ultimates))
    return ReserveReport(
        method=f.method,
        factors=f,
        accident_years=tuple(t.labels[1:]),
        ultimates=ultimates,
        outstanding=outstanding,
        total_reserve=math.fsum(outstanding),
        input_fingerprint=t.fingerprint,
        completed=completed,
        **extra,
    )


@dataclass(frozen=True)
class Comparison:
    mack: ReserveReport
    bayes: ReserveReport

    @property
    def factor_deltas(self) -> tuple:
        """Bayesian minus Mack factor, per development year."""
        return tuple(b - m for b, m in zip(self.bayes.factors.factors, self.mack.factors.factors))

    @property
    def reserve_delta(self) -> float:
        return self.bayes.total_reserve - self.mack.total_reserve


def run_bayes(t: Triangle, prior: PriorSpec) -> ReserveReport:
    posteriors = bayes_posteriors(t, prior)
    return project(t, bayes_factors(posteriors), posteriors=tuple(posteriors), prior=prior)


def compare(t: Triangle, prior: Optional[PriorSpec] = None) -> Comparison:
    """Run both engines on ``t``; ``prior`` defaults to the elicited one."""
    if prior is None:
        prior = elicit_prior(t)
    return Comparison(mack=project(t, mack_factors(t)), bayes=run_bayes(t, prior))
