"""Reduced-form VAR(p) simulation and least-squares estimation.

Model: Y_t = mu + A_1 Y_{t-1} + ... + A_P Y_{t-P} + e_t, with a variance
break in e_t at a known time index.  With an intercept and identical
regressors in every equation, GLS coincides with equation-by-equation
least squares, so estimation is plain multivariate least squares.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import as_float_matrix, as_square_matrix, check_break_index


@dataclass(frozen=True)
class TimeSeriesSample:
    """A T x K observation matrix with a known variance-break index.

    ``break_index`` is the last time index (1-based count) of the first
    variance regime; rows ``0..break_index-1`` belong to regime 1.
    """

    data: np.ndarray
    break_index: int

    def __post_init__(self):
        data = as_float_matrix(self.data, "data")
        object.__setattr__(self, "data", data)
        object.__setattr__(
            self, "break_index", check_break_index(self.break_index, data.shape[0])
        )

    @property
    def n_obs(self) -> int:
        return self.data.shape[0]

    @property
    def n_vars(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class VarSpec:
    """Intercept and lag coefficient matrices of a VAR(P)."""

    intercept: np.ndarray
    lag_matrices: tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.intercept, dtype=float))
        if mu.ndim != 1:
            raise ValueError("intercept must be a vector")
        k = mu.shape[0]
        mats = tuple(as_square_matrix(a, k, f"lag matrix A_{i + 1}")
                     for i, a in enumerate(self.lag_matrices))
        object.__setattr__(self, "intercept", mu)
        object.__setattr__(self, "lag_matrices", mats)

    @property
    def n_vars(self) -> int:
        return self.intercept.shape[0]

    @property
    def order(self) -> int:
        return len(self.lag_matrices)

    def companion_matrix(self) -> np.ndarray:
        """Companion form of the lag polynomial, shape (K*P, K*P)."""
        k, p = self.n_vars, self.order
        if p == 0:
            return np.zeros((0, 0))
        comp = np.zeros((k * p, k * p))
        comp[:k] = np.hstack(self.lag_matrices)
        if p > 1:
            comp[k:, :-k] = np.eye(k * (p - 1))
        return comp

    def spectral_radius(self) -> float:
        if self.order == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(self.companion_matrix()))))

    def is_stable(self) -> bool:
        return self.spectral_radius() < 1.0


@dataclass(frozen=True)
class VarEstimate:
    """Fitted reduced form: coefficient estimates plus the residual matrix.

    ``effective_break_index`` is the break index shifted by the P initial
    observations consumed by the lags, so regime proportions of the
    residual sample match the original data.
    """

    spec: VarSpec
    residuals: np.ndarray
    effective_break_index: int


def simulate_var(spec: VarSpec, shocks, effect_matrix, break_index: int,
                 burnin_shocks=None) -> TimeSeriesSample:
    """Simulate Y_t = mu + sum_p A_p Y_{t-p} + B u_t from given shocks.

    Pre-sample values are zero; if ``burnin_shocks`` (rows preceding the
    sample) are supplied, the corresponding initial stretch is simulated
    and discarded, which removes initialization bias for stationary
    specs.  ``break_index`` is the regime boundary used to generate the
    shocks and is copied onto the returned sample.
    """
    u = as_float_matrix(shocks, "shocks")
    k = spec.n_vars
    b = as_square_matrix(effect_matrix, k, "effect_matrix")
    if u.shape[1] != k:
        raise ValueError(f"shocks must have {k} columns, got {u.shape[1]}")
    if abs(np.linalg.det(b)) == 0.0:
        raise ValueError("effect_matrix is singular")
    p = spec.order
    if u.shape[0] <= p:
        raise ValueError("need more shock rows than the VAR order")
    check_break_index(break_index, u.shape[0])

    n_burn = 0
    if burnin_shocks is not None:
        burn = as_float_matrix(burnin_shocks, "burnin_shocks")
        if burn.shape[1] != k:
            raise ValueError(f"burnin_shocks must have {k} columns")
        if not spec.is_stable():
            raise ValueError(
                "burn-in requires a stationary spec "
                f"(spectral radius {spec.spectral_radius():.3f} >= 1)"
            )
        n_burn = burn.shape[0]
        u = np.vstack([burn, u])

    n_total = u.shape[0]
    eps = u @ b.T
    y = np.zeros((n_total + p, k))
    for t in range(n_total):
        y[t + p] = spec.intercept + eps[t]
        for i, a in enumerate(spec.lag_matrices):
            y[t + p] += a @ y[t + p - 1 - i]
    return TimeSeriesSample(y[p + n_burn:], break_index)


def estimate_var(sample: TimeSeriesSample, order: int) -> VarEstimate:
    """Fit a VAR(order) with intercept by multivariate least squares."""
    p = int(order)
    if p < 0:
        raise ValueError("order must be >= 0")
    y = sample.data
    t, k = y.shape
    n_obs = t - p
    n_reg = k * p + 1
    if n_obs <= n_reg:
        raise ValueError(
            f"too few observations: T - P = {n_obs} <= {n_reg} regressors"
        )
    eff_break = sample.break_index - p
    if not 1 <= eff_break < n_obs:
        raise ValueError(
            "break index falls outside the residual sample after lag trimming"
        )

    regressors = np.ones((n_obs, n_reg))
    for i in range(p):
        regressors[:, 1 + i * k: 1 + (i + 1) * k] = y[p - 1 - i: t - 1 - i]
    target = y[p:]
    coef, _, rank, _ = np.linalg.lstsq(regressors, target, rcond=None)
    if rank < n_reg:
        raise ValueError("regressor matrix is rank deficient")
    residuals = target - regressors @ coef

    spec = VarSpec(
        intercept=coef[0],
        lag_matrices=tuple(coef[1 + i * k: 1 + (i + 1) * k].T for i in range(p)),
    )
    return VarEstimate(spec=spec, residuals=residuals,
                       effective_break_index=eff_break)
