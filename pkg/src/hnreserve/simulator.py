"""Simulate cumulative triangles from the half-normal chain model.

Each row starts from a first-column value and evolves as

    S_{i,j} | S_{i,j-1}, theta_j  ~  HalfNormal(theta_j * S_{i,j-1}**2)

so that ``E(S_{i,j} | S_{i,j-1}) = S_{i,j-1} * sqrt(theta_j)``.

Randomness is drawn from counter-based Philox substreams indexed by
(replicate, row, column, attempt), so any replicate can be regenerated on
its own and replicates can run in any order or in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .distributions import HalfNormal, InverseGamma
from .exceptions import DomainError, GenerationError, ReservingError
from .reserving import PriorSpec, bayes_factors, bayes_posteriors
from .triangle import CUMULATIVE, Triangle

__all__ = [
    "GenerativeSpec",
    "RecoverySummary",
    "recovery_study",
    "replicate_theta",
    "simulate_triangle",
]

_MAX_ATTEMPTS = 100
_THETA_ROW = 0


def _substream(seed: int, replicate: int, row: int, col: int, attempt: int = 0):
    counter = [0, attempt, (row << 32) | col, replicate]
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))


FirstColumn = Union[float, Sequence[float], Callable[[np.random.Generator], float]]


@dataclass(frozen=True)
class GenerativeSpec:
    """Parameters of a simulation run.

    ``theta`` holds the true theta_1..theta_{n-1}. When ``theta_prior`` is
    given instead, every replicate draws its own theta_j from that prior, so
    the data are generated from exactly the model the Bayesian engine assumes.
    ``first_column`` is a constant, a per-row sequence, or a callable drawing
    one positive value from a ``numpy.random.Generator``.
    """

    n: int
    theta: Optional[tuple] = None
    first_column: FirstColumn = 100.0
    seed: int = 0
    replications: int = 1
    theta_prior: Optional[PriorSpec] = field(default=None)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if self.replications < 1:
            raise DomainError("replications must be at least 1")
        if self.seed < 0:
            raise DomainError("seed must be a nonnegative integer")
        if self.theta is None and self.theta_prior is None:
            raise DomainError("give either theta or theta_prior")
        if self.theta is not None:
            theta = tuple(float(t) for t in self.theta)
            if len(theta) != self.n - 1:
                raise DomainError(f"theta needs {self.n - 1} values, got {len(theta)}")
            for j, t in enumerate(theta, start=1):
                if not (t > 0 and math.isfinite(t)):
                    raise DomainError(f"theta_{j} = {t!r} must be positive")
            object.__setattr__(self, "theta", theta)
        if self.theta_prior is not None and len(self.theta_prior) != self.n - 1:
            raise DomainError(f"theta_prior needs {self.n - 1} columns")
        fc = self.first_column
        if not callable(fc):
            values = (float(fc),) * self.n if np.ndim(fc) == 0 else tuple(float(v) for v in fc)
            if len(values) != self.n:
                raise DomainError(f"first_column needs {self.n} values, got {len(values)}")
            for i, v in enumerate(values, start=1):
                if not (v > 0 and math.isfinite(v)):
                    raise DomainError(f"first-column value for accident year {i} must be > 0")


def replicate_theta(spec: GenerativeSpec, replicate: int) -> np.ndarray:
    """True theta_1..theta_{n-1} used by ``replicate``."""
    if spec.theta_prior is None:
        return np.array(spec.theta, dtype=float)
    out = np.empty(spec.n - 1)
    for j, prior in enumerate(spec.theta_prior.distributions(), start=1):
        out[j - 1] = prior.sample(_substream(spec.seed, replicate, _THETA_ROW, j), 1)[0]
    return out


def _first_value(spec: GenerativeSpec, replicate: int, row: int) -> float:
    fc = spec.first_column
    if callable(fc):
        for attempt in range(_MAX_ATTEMPTS):
            value = float(fc(_substream(spec.seed, replicate, row, 0, attempt)))
            if value > 0 and math.isfinite(value):
                return value
        raise GenerationError(
            f"replicate {replicate}: first-column sampler gave no positive value "
            f"for accident year {row} in {_MAX_ATTEMPTS} attempts"
        )
    return float(fc) if np.ndim(fc) == 0 else float(fc[row - 1])


def simulate_triangle(spec: GenerativeSpec, replicate: int = 0) -> Triangle:
    """Generate the observed cumulative triangle of one replicate."""
    n = spec.n
    theta = replicate_theta(spec, replicate)
    values = np.full((n, n), np.nan)
    for i in range(1, n + 1):
        values[i - 1, 0] = _first_value(spec, replicate, i)
        for j in range(1, n - i + 1):
            omega = theta[j - 1] * values[i - 1, j - 1] ** 2
            if not (omega > 0 and math.isfinite(omega)):
                raise GenerationError(
                    f"replicate {replicate}: scale {omega!r} for accident year {i}, "
                    f"dev_{j} is not a positive finite number"
                )
            law = HalfNormal(omega)
            for attempt in range(_MAX_ATTEMPTS):
                draw = law.sample(_substream(spec.seed, replicate, i, j, attempt), 1)[0]
                if draw > 0:
                    break
            else:
                raise GenerationError(
                    f"replicate {replicate}: accident year {i}, dev_{j} sampled 0 "
                    f"in {_MAX_ATTEMPTS} attempts"
                )
            values[i - 1, j] = draw
    return Triangle(values, kind=CUMULATIVE)


@dataclass
class RecoverySummary:
    """Per-column results of a recovery study.

    Arrays are indexed by development year j = 1..n-1 (position j-1). Rows
    of ``factors``, ``true_sqrt_theta`` and ``covered`` belong to replicates
    that completed; failed replicates are listed in ``failures``.
    """

    level: float
    replicates: np.ndarray
    factors: np.ndarray
    true_sqrt_theta: np.ndarray
    covered: np.ndarray
    failures: list

    @property
    def n_ok(self) -> int:
        return self.factors.shape[0]

    @property
    def factor_mean(self) -> np.ndarray:
        return self.factors.mean(axis=0)

    @property
    def factor_std(self) -> np.ndarray:
        if self.n_ok < 2:
            return np.zeros(self.factors.shape[1])
        return self.factors.std(axis=0, ddof=1)

    @property
    def factor_se(self) -> np.ndarray:
        return self.factor_std / math.sqrt(max(self.n_ok, 1))

    @property
    def true_sqrt_theta_mean(self) -> np.ndarray:
        return self.true_sqrt_theta.mean(axis=0)

    @property
    def coverage(self) -> np.ndarray:
        return self.covered.mean(axis=0)

    def to_dict(self) -> dict:
        return {
            "replicates_ok": int(self.n_ok),
            "interval_level": self.level,
            "factor_mean": self.factor_mean.tolist(),
            "factor_std": self.factor_std.tolist(),
            "true_sqrt_theta_mean": self.true_sqrt_theta_mean.tolist(),
            "coverage": self.coverage.tolist(),
            "failures": [{"replicate": r, "error": msg} for r, msg in self.failures],
        }


def _one_replicate(spec, prior, level, replicate):
    try:
        tri = simulate_triangle(spec, replicate)
        posteriors = bayes_posteriors(tri, prior)
        factors = bayes_factors(posteriors).factors
        truth = np.sqrt(replicate_theta(spec, replicate))
        covered = []
        for post, true_value in zip(posteriors, truth):
            lo, hi = post.sqrt_interval(level)
            covered.append(lo <= true_value <= hi)
    except ReservingError as exc:
        return replicate, None, f"{type(exc).__name__}: {exc}"
    return replicate, (np.array(factors), truth, np.array(covered)), None


def recovery_study(
    spec: GenerativeSpec,
    prior: PriorSpec,
    level: float = 0.9,
    n_jobs: int = 1,
) -> RecoverySummary:
    """Simulate ``spec.replications`` triangles and fit the Bayesian engine to each.

    Returns the sampling distribution of the Bayesian factors together with the
    coverage of equal-tailed ``level`` posterior intervals for sqrt(theta_j).
    Errors in single replicates are recorded, not raised.
    """
    if not 0 < level < 1:
        raise DomainError(f"interval level must lie in (0, 1), got {level!r}")
    if len(prior) != spec.n - 1:
        raise DomainError(f"prior covers {len(prior)} columns, spec needs {spec.n - 1}")
    reps = range(spec.replications)
    if n_jobs == 1:
        results = [_one_replicate(spec, prior, level, r) for r in reps]
    else:
        from joblib import Parallel, delayed

        results = Parallel(n_jobs=n_jobs)(
            delayed(_one_replicate)(spec, prior, level, r) for r in reps
        )
    results.sort(key=lambda item: item[0])

    width = spec.n - 1
    ok = [(r, res) for r, res, _ in results if res is not None]
    failures = [(r, msg) for r, res, msg in results if res is None]

    def stack(k, dtype):
        if not ok:
            return np.empty((0, width), dtype=dtype)
        return np.vstack([res[k] for _, res in ok]).astype(dtype)

    return RecoverySummary(
        level=level,
        replicates=np.array([r for r, _ in ok], dtype=int),
        factors=stack(0, float),
        true_sqrt_theta=stack(1, float),
        covered=stack(2, bool),
        failures=failures,
    )
