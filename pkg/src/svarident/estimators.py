"""Scikit-learn style wrappers around the functional core.

These classes follow the estimator protocol (hyperparameters in
``__init__``, data in ``fit``, fitted attributes with trailing
underscores, ``get_params``/``set_params`` via ``BaseEstimator``) so
the pieces compose with the wider ecosystem.  The variance-break index
is sample metadata and is passed to ``fit``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .split_test import _TestContext, combine_p_values
from .structural import StructuralEstimate, structural_shocks
from .validation import as_float_matrix, as_rng, check_break_index
from .var import TimeSeriesSample, estimate_var


def _require_fitted(obj, attr: str):
    if not hasattr(obj, attr):
        raise NotFittedError(
            f"this {type(obj).__name__} instance is not fitted yet; "
            "call 'fit' first"
        )


class ReducedFormVAR(TransformerMixin, BaseEstimator):
    """Reduced-form VAR(p) fitted by multivariate least squares.

    ``transform`` maps a series to its residuals under the fitted
    coefficients, so the estimator chains naturally into the
    identification test.

    Parameters
    ----------
    order : int
        Autoregressive order P >= 0.
    """

    def __init__(self, order: int = 1):
        self.order = order

    def fit(self, X, y=None, break_index: int | None = None):
        X = as_float_matrix(X, "X")
        t_c = break_index if break_index is not None else X.shape[0] // 2
        fit = estimate_var(TimeSeriesSample(X, t_c), self.order)
        self.intercept_ = fit.spec.intercept
        self.lag_matrices_ = fit.spec.lag_matrices
        self.residuals_ = fit.residuals
        self.n_vars_ = X.shape[1]
        self.effective_break_index_ = (
            fit.effective_break_index if break_index is not None else None
        )
        return self

    def transform(self, X) -> np.ndarray:
        """Residuals of ``X`` under the fitted coefficients, (T-P) x K."""
        _require_fitted(self, "intercept_")
        X = as_float_matrix(X, "X")
        if X.shape[1] != self.n_vars_:
            raise ValueError(f"X must have {self.n_vars_} columns")
        p = len(self.lag_matrices_)
        if X.shape[0] <= p:
            raise ValueError("X has fewer rows than the VAR order")
        fitted = np.tile(self.intercept_, (X.shape[0] - p, 1))
        for i, a in enumerate(self.lag_matrices_):
            fitted += X[p - 1 - i: X.shape[0] - 1 - i] @ a.T
        return X[p:] - fitted


class VarianceShiftSVAR(TransformerMixin, BaseEstimator):
    """Two-regime structural model fitted by closed-form ML.

    ``fit`` takes the residual matrix and the break index and recovers
    the instantaneous effect matrix and the relative variances;
    ``transform`` whitens residuals into standardized structural shocks
    using the regime layout seen in ``fit``.
    """

    def fit(self, X, y=None, break_index: int | None = None):
        X = as_float_matrix(X, "X")
        if break_index is None:
            raise ValueError("break_index is required")
        ctx = _TestContext(X, break_index, "fixed3")
        self.estimate_ = ctx.estimate
        self.effect_matrix_ = ctx.estimate.effect_matrix
        self.rel_variances_ = ctx.estimate.rel_variances
        self.theta_ = ctx.estimate.theta
        self.break_index_ = ctx.break_index
        return self

    def transform(self, X) -> np.ndarray:
        _require_fitted(self, "estimate_")
        X = as_float_matrix(X, "X")
        return structural_shocks(self.estimate_, X, self.break_index_)


class SplitIdentificationTest(BaseEstimator):
    """End-to-end split-sample identification test on a raw series.

    Fitting runs the whole pipeline: VAR(p) residuals, full-sample
    structural estimate, ``n_splits`` stratified splits, and (for
    ``n_splits`` >= 2) the truncated harmonic-mean combination.  The
    headline ``p_value_`` is the combined value, or the single split's
    p-value when ``n_splits`` is 1.

    Parameters
    ----------
    var_order : int
        Reduced-form VAR order fitted before testing.
    n_splits : int
        Number of random splits N.
    kurtosis : {"estimated", "fixed3"}
        Kurtosis handling for the statistic.
    truncation : pair of float
        Lower/upper quantiles of the p-values kept in the harmonic mean.
    random_state : int, SeedSequence or Generator, optional
    """

    def __init__(self, var_order: int = 0, n_splits: int = 100,
                 kurtosis: str = "estimated",
                 truncation: tuple[float, float] = (0.2, 0.8),
                 random_state=None):
        self.var_order = var_order
        self.n_splits = n_splits
        self.kurtosis = kurtosis
        self.truncation = truncation
        self.random_state = random_state

    def fit(self, X, y=None, break_index: int | None = None):
        X = as_float_matrix(X, "X")
        if break_index is None:
            raise ValueError("break_index is required")
        check_break_index(break_index, X.shape[0])
        if int(self.n_splits) < 1:
            raise ValueError("n_splits must be >= 1")

        var_fit = estimate_var(TimeSeriesSample(X, break_index), self.var_order)
        ctx = _TestContext(var_fit.residuals, var_fit.effective_break_index,
                           self.kurtosis)
        streams = as_rng(self.random_state).spawn(int(self.n_splits))
        results = [ctx.split_result(stream) for stream in streams]

        self.var_estimate_ = var_fit
        self.estimate_ = ctx.estimate
        self.theta_ = ctx.estimate.theta
        self.kurtosis_ = ctx.kurtosis
        self.df_ = ctx.estimate.n_params
        self.statistic_ = results[0].statistic
        self.split_results_ = tuple(results)
        self.p_values_ = np.array([r.p_value for r in results])
        self.clamped_count_ = sum(r.clamped for r in results)
        if len(results) >= 2:
            combined = combine_p_values(self.p_values_, *self.truncation)
            self.combined_ = combined.combined
            self.scaling_ = combined.scaling
            self.kept_count_ = combined.kept_count
            self.p_value_ = combined.combined
        else:
            self.combined_ = None
            self.scaling_ = None
            self.kept_count_ = None
            self.p_value_ = results[0].p_value
        return self

    def fit_predict(self, X, y=None, break_index: int | None = None,
                    alpha: float = 0.05) -> bool:
        """True when the null of identification is rejected at ``alpha``."""
        self.fit(X, break_index=break_index)
        return bool(self.p_value_ <= alpha)
