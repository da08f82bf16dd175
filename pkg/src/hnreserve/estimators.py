"""scikit-learn style estimators around the reserving engines.

``fit`` takes a run-off triangle (a :class:`~hnreserve.triangle.Triangle`,
DataFrame or square array with NaN future cells) and learns development
factors; ``predict`` returns the completed square for any triangle of the
same size, projected with the fitted factors.

    >>> from hnreserve.oracle import fixture_triangle
    >>> est = MackChainLadder().fit(fixture_triangle())
    >>> round(est.ibnr_, 4)
    86.4857
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import ContractError
from .reserving import (
    PriorSpec,
    bayes_factors,
    bayes_posteriors,
    elicit_prior,
    mack_factors,
    project,
)
from .triangle import CUMULATIVE, INCREMENTAL, Triangle, cumulate, decumulate
from .validation import check_triangle

__all__ = ["HalfNormalChainLadder", "MackChainLadder", "TriangleCumulator"]


class _ChainLadderBase(BaseEstimator):
    def _store(self, tri: Triangle, report):
        self.n_years_ = tri.n
        self.factors_ = np.array(report.factors.factors)
        self.report_ = report
        self.ultimate_ = np.array(report.ultimates)
        self.outstanding_ = np.array(report.outstanding)
        self.ibnr_ = report.total_reserve
        return self

    def predict(self, X):
        """Completed n x n cumulative square for ``X`` using the fitted factors."""
        check_is_fitted(self, "factors_")
        tri = check_triangle(X, input_kind=self.input_kind)
        if tri.n != self.n_years_:
            raise ContractError(f"fitted on {self.n_years_} years, got a {tri.n}-year triangle")
        return np.array(project(tri, self.report_.factors).completed)

    def reserve(self, X) -> float:
        """Total IBNR reserve of ``X`` under the fitted factors."""
        check_is_fitted(self, "factors_")
        tri = check_triangle(X, input_kind=self.input_kind)
        return project(tri, self.report_.factors).total_reserve


class MackChainLadder(_ChainLadderBase):
    """Deterministic chain ladder with column-sum-ratio development factors.

    Parameters
    ----------
    input_kind : {"cumulative", "incremental"}
        How plain arrays passed to ``fit``/``predict`` are interpreted.

    Attributes
    ----------
    factors_ : ndarray of shape (n - 1,)
    ultimate_, outstanding_ : ndarray of shape (n - 1,)
        Accident years 2..n.
    ibnr_ : float
        Total reserve.
    report_ : ReserveReport
    """

    def __init__(self, input_kind=CUMULATIVE):
        self.input_kind = input_kind

    def fit(self, X, y=None):
        tri = check_triangle(X, input_kind=self.input_kind)
        return self._store(tri, project(tri, mack_factors(tri)))


class HalfNormalChainLadder(_ChainLadderBase):
    """Bayesian chain ladder under a half-normal model with inverse-gamma priors.

    Parameters
    ----------
    alpha : float, sequence of float or None
        Prior shape per development year; None means n(n-1)/2.
    beta : "auto", float or sequence of float
        Prior scale. ``"auto"`` elicits it from the data so the prior mean
        factor equals the root of the squared-column-sum ratio.
    input_kind : {"cumulative", "incremental"}

    Attributes
    ----------
    prior_ : PriorSpec
    posteriors_ : list of InverseGamma
    factors_, ultimate_, outstanding_, ibnr_, report_
        As for :class:`MackChainLadder`.
    """

    def __init__(self, alpha=None, beta="auto", input_kind=CUMULATIVE):
        self.alpha = alpha
        self.beta = beta
        self.input_kind = input_kind

    def _prior(self, tri: Triangle) -> PriorSpec:
        if isinstance(self.beta, str):
            if self.beta != "auto":
                raise ValueError(f"beta must be 'auto' or numeric, got {self.beta!r}")
            return elicit_prior(tri, self.alpha)
        n = tri.n
        alpha = n * (n - 1) / 2.0 if self.alpha is None else self.alpha
        expand = (lambda v: (float(v),) * (n - 1) if np.ndim(v) == 0 else tuple(v))
        return PriorSpec(expand(alpha), expand(self.beta))

    def fit(self, X, y=None):
        tri = check_triangle(X, input_kind=self.input_kind)
        self.prior_ = self._prior(tri)
        self.posteriors_ = bayes_posteriors(tri, self.prior_)
        report = project(tri, bayes_factors(self.posteriors_),
                         posteriors=tuple(self.posteriors_), prior=self.prior_)
        return self._store(tri, report)

    def credible_intervals(self, level=0.9) -> np.ndarray:
        """Equal-tailed posterior intervals for sqrt(Theta_j), shape (n - 1, 2)."""
        check_is_fitted(self, "posteriors_")
        return np.array([p.sqrt_interval(level) for p in self.posteriors_]).reshape(-1, 2)


class TriangleCumulator(TransformerMixin, BaseEstimator):
    """Incremental <-> cumulative conversion as a stateless transformer."""

    def __init__(self, allow_negative_increments=False):
        self.allow_negative_increments = allow_negative_increments

    def fit(self, X, y=None):
        self.n_years_ = check_triangle(
            X, INCREMENTAL, allow_negative_increments=self.allow_negative_increments).n
        return self

    def transform(self, X):
        check_is_fitted(self, "n_years_")
        return cumulate(check_triangle(
            X, INCREMENTAL, allow_negative_increments=self.allow_negative_increments))

    def inverse_transform(self, X):
        check_is_fitted(self, "n_years_")
        return decumulate(check_triangle(X, CUMULATIVE))
