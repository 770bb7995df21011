"""Closed-form ML for the two-regime structural model of VAR residuals.

Residuals are e_t = B u_t with uncorrelated structural shocks u_t whose
covariance is I before the break and Lambda = diag(lambda_1..lambda_K)
after it, so Sigma_1 = BB' and Sigma_2 = B Lambda B'.  The model has
exactly K^2 + K free parameters, matching the distinct entries of the
two regime covariances, so the ML estimator is obtained in closed form
by decomposing the two regime sample covariance matrices; no iterative
optimizer is involved.

The parameter vector is theta = (vec(B)', lambda_1..lambda_K)' with
column-major vec, of length M = K^2 + K.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import as_float_matrix, check_break_index

# Central finite-difference step scale for the Hessian.
_FD_STEP = float(np.cbrt(np.finfo(float).eps))


@dataclass(frozen=True)
class RegimeCovariances:
    """Per-regime ML covariance matrices of the residuals."""

    sigma1: np.ndarray
    sigma2: np.ndarray
    n1: int
    n2: int

    def __post_init__(self):
        for name in ("sigma1", "sigma2"):
            s = np.asarray(getattr(self, name), dtype=float)
            if np.max(np.abs(s - s.T)) > 1e-12 * max(1.0, np.max(np.abs(s))):
                raise ValueError(f"{name} is not symmetric")
            try:
                np.linalg.cholesky(s)
            except np.linalg.LinAlgError:
                regime = 1 if name == "sigma1" else 2
                raise ValueError(
                    f"covariance of regime {regime} is not positive definite"
                ) from None
            object.__setattr__(self, name, s)


@dataclass(frozen=True)
class StructuralEstimate:
    """Instantaneous effect matrix B and relative variances lambda.

    Estimates produced by :func:`structural_decompose` are normalized:
    lambdas descending, and in every column of B the entry of largest
    absolute value is positive (ties: lowest row index).  The packed
    parameter vector ``theta`` round-trips bit-exactly with (B, lambda).
    """

    effect_matrix: np.ndarray
    rel_variances: np.ndarray

    def __post_init__(self):
        b = as_float_matrix(self.effect_matrix, "effect_matrix")
        if b.shape[0] != b.shape[1]:
            raise ValueError("effect_matrix must be square")
        lam = np.atleast_1d(np.asarray(self.rel_variances, dtype=float))
        if lam.shape != (b.shape[0],):
            raise ValueError("rel_variances length must match effect_matrix size")
        if not np.isfinite(lam).all() or np.any(lam <= 0):
            raise ValueError("rel_variances must be finite and positive")
        object.__setattr__(self, "effect_matrix", b)
        object.__setattr__(self, "rel_variances", lam)

    @property
    def n_vars(self) -> int:
        return self.effect_matrix.shape[0]

    @property
    def n_params(self) -> int:
        k = self.n_vars
        return k * k + k

    @property
    def theta(self) -> np.ndarray:
        return pack_theta(self.effect_matrix, self.rel_variances)

    @classmethod
    def from_theta(cls, theta) -> "StructuralEstimate":
        b, lam = unpack_theta(np.asarray(theta, dtype=float))
        return cls(effect_matrix=b, rel_variances=lam)


def pack_theta(effect_matrix: np.ndarray, rel_variances: np.ndarray) -> np.ndarray:
    return np.concatenate([effect_matrix.flatten(order="F"), rel_variances])


def unpack_theta(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = _n_vars_from_len(theta.shape[0])
    return theta[: k * k].reshape(k, k, order="F"), theta[k * k:]


def _n_vars_from_len(m: int) -> int:
    k = int(round((np.sqrt(4 * m + 1) - 1) / 2))
    if k * k + k != m:
        raise ValueError(f"theta length {m} is not of the form K^2 + K")
    return k


def normalize_structure(effect_matrix, rel_variances) -> tuple[np.ndarray, np.ndarray]:
    """Canonical column order and signs for (B, lambda).

    Columns are sorted by descending lambda (stable for ties); each
    column is flipped so its entry of largest absolute value is
    positive, with ties going to the lowest row index.  Idempotent.
    """
    b = np.array(effect_matrix, dtype=float)
    lam = np.asarray(rel_variances, dtype=float)
    order = np.argsort(-lam, kind="stable")
    b = b[:, order]
    lam = lam[order]
    lead = np.argmax(np.abs(b), axis=0)
    signs = np.where(b[lead, np.arange(b.shape[1])] < 0, -1.0, 1.0)
    return b * signs, lam


def regime_covariances(residuals, break_index: int) -> RegimeCovariances:
    """ML covariance of each regime: (1/n_i) * sum of e_t e_t'.

    No mean is subtracted; residuals from an intercept fit are already
    mean zero over the full sample.
    """
    eps = as_float_matrix(residuals, "residuals")
    t, k = eps.shape
    t_c = check_break_index(break_index, t)
    n1, n2 = t_c, t - t_c
    if min(n1, n2) < k + 1:
        raise ValueError(
            f"each regime needs at least K+1 = {k + 1} rows, got ({n1}, {n2})"
        )
    e1, e2 = eps[:t_c], eps[t_c:]
    return RegimeCovariances(
        sigma1=e1.T @ e1 / n1, sigma2=e2.T @ e2 / n2, n1=n1, n2=n2
    )


def structural_decompose(cov: RegimeCovariances) -> StructuralEstimate:
    """Recover (B, lambda) with BB' = Sigma_1 and B Lambda B' = Sigma_2.

    Factor Sigma_1 = LL', symmetrically eigendecompose
    L^{ -1} Sigma_2 L^{-T} = Q Lambda Q', and set B = LQ; lambda are then
    the eigenvalues of Sigma_2 Sigma_1^{-1}.  The result is normalized
    per :class:`StructuralEstimate`.
    """
    try:
        chol = np.linalg.cholesky(cov.sigma1)
    except np.linalg.LinAlgError:
        raise ValueError("regime-1 covariance is not positive definite") from None
    linv = np.linalg.inv(chol)
    mid = linv @ cov.sigma2 @ linv.T
    lam, q = np.linalg.eigh(0.5 * (mid + mid.T))
    if np.any(lam <= 0):
        raise ValueError("regime-2 covariance is not positive definite")
    b, lam = normalize_structure(chol @ q, lam)
    return StructuralEstimate(effect_matrix=b, rel_variances=lam)


def _regime_scatters(residuals: np.ndarray, break_index: int):
    """Unnormalized per-regime scatter matrices sum(e_t e_t')."""
    e1, e2 = residuals[:break_index], residuals[break_index:]
    return e1.T @ e1, e2.T @ e2


def _loglik_batch(thetas: np.ndarray, scatter1: np.ndarray, scatter2: np.ndarray,
                  n2: int, n_total: int) -> np.ndarray:
    """Two-regime Gaussian log-likelihood at a batch of theta vectors.

    ``thetas`` has shape (S, M).  Data enters only through the regime
    scatter matrices, so each evaluation is O(K^3).  Rows with singular
    B or non-positive lambda get -inf.
    """
    s, m = thetas.shape
    k = _n_vars_from_len(m)
    b = thetas[:, : k * k].reshape(s, k, k).transpose(0, 2, 1)
    lam = thetas[:, k * k:]
    out = np.full(s, -np.inf)
    dets = np.abs(np.linalg.det(b))
    ok = (dets > 0) & np.all(lam > 0, axis=1)
    if not ok.any():
        return out
    b, lam, dets = b[ok], lam[ok], dets[ok]
    sig1 = np.einsum("sik,sjk->sij", b, b)
    sig2 = np.einsum("sik,sk,sjk->sij", b, lam, b)
    try:
        inv1 = np.linalg.inv(sig1)
        inv2 = np.linalg.inv(sig2)
    except np.linalg.LinAlgError:
        return out
    out[ok] = (
        -n_total * np.log(dets)
        - 0.5 * n2 * np.sum(np.log(lam), axis=1)
        - 0.5 * np.einsum("sij,ji->s", inv1, scatter1)
        - 0.5 * np.einsum("sij,ji->s", inv2, scatter2)
    )
    return out


def log_likelihood(est: StructuralEstimate, residuals, break_index: int) -> float:
    """Two-regime Gaussian log-likelihood at ``est``.

    Matches the model equation as written: the additive Gaussian
    constant -(TK/2) log 2pi is omitted; it affects neither the Hessian
    nor any test statistic.  The determinant term uses log |det B|.
    For plain evaluation ``break_index`` may equal the row count, in
    which case the second regime is empty and the lambda terms vanish.
    """
    eps = as_float_matrix(residuals, "residuals")
    t_c = int(break_index)
    if not 1 <= t_c <= eps.shape[0]:
        raise ValueError(
            f"break_index must satisfy 1 <= break_index <= {eps.shape[0]}, got {t_c}"
        )
    if eps.shape[1] != est.n_vars:
        raise ValueError("residual columns do not match the estimate dimension")
    if abs(np.linalg.det(est.effect_matrix)) == 0.0:
        raise ValueError("effect_matrix is singular")
    w1, w2 = _regime_scatters(eps, t_c)
    value = _loglik_batch(est.theta[None, :], w1, w2,
                          eps.shape[0] - t_c, eps.shape[0])[0]
    return float(value)


def _hessian_from_scatters(theta: np.ndarray, scatter1: np.ndarray,
                           scatter2: np.ndarray, n2: int, n_total: int) -> np.ndarray:
    """Average Hessian (1/T) d^2 l / dtheta dtheta' by central differences.

    Per-coordinate steps are cbrt(machine eps) * max(|theta_j|, 1).  All
    stencil points are evaluated in one batched likelihood call.
    """
    m = theta.shape[0]
    h = _FD_STEP * np.maximum(np.abs(theta), 1.0)

    points = [theta]
    for i in range(m):
        e = np.zeros(m)
        e[i] = h[i]
        points.append(theta + e)
        points.append(theta - e)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    for i, j in pairs:
        ei = np.zeros(m)
        ej = np.zeros(m)
        ei[i] = h[i]
        ej[j] = h[j]
        points.append(theta + ei + ej)
        points.append(theta + ei - ej)
        points.append(theta - ei + ej)
        points.append(theta - ei - ej)

    values = _loglik_batch(np.asarray(points), scatter1, scatter2, n2, n_total)
    if not np.isfinite(values).all():
        raise ValueError("log-likelihood is not finite within the difference stencil")

    f0 = values[0]
    hess = np.zeros((m, m))
    for i in range(m):
        fp, fm = values[1 + 2 * i], values[2 + 2 * i]
        hess[i, i] = (fp - 2.0 * f0 + fm) / h[i] ** 2
    base = 1 + 2 * m
    for idx, (i, j) in enumerate(pairs):
        fpp, fpm, fmp, fmm = values[base + 4 * idx: base + 4 * idx + 4]
        hess[i, j] = hess[j, i] = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j])
    hess /= n_total
    return 0.5 * (hess + hess.T)


def hessian(est: StructuralEstimate, residuals, break_index: int) -> np.ndarray:
    """Average Hessian of the log-likelihood at ``est``, shape (M, M)."""
    eps = as_float_matrix(residuals, "residuals")
    t_c = check_break_index(break_index, eps.shape[0])
    if eps.shape[1] != est.n_vars:
        raise ValueError("residual columns do not match the estimate dimension")
    w1, w2 = _regime_scatters(eps, t_c)
    return _hessian_from_scatters(est.theta, w1, w2,
                                  eps.shape[0] - t_c, eps.shape[0])


def structural_shocks(est: StructuralEstimate, residuals, break_index: int) -> np.ndarray:
    """Recover standardized structural shocks from residuals.

    u_t = B^{-1} e_t before the break and Lambda^{-1/2} B^{-1} e_t after
    it, so every component has unit variance under the model.
    """
    eps = as_float_matrix(residuals, "residuals")
    t_c = check_break_index(break_index, eps.shape[0])
    if eps.shape[1] != est.n_vars:
        raise ValueError("residual columns do not match the estimate dimension")
    shocks = np.linalg.solve(est.effect_matrix, eps.T).T.copy()
    shocks[t_c:] /= np.sqrt(est.rel_variances)
    return shocks


def kurtosis_estimate(residuals, est: StructuralEstimate, break_index: int) -> float:
    """Pooled average component kurtosis of the standardized shocks.

    kappa_hat = (1/K) sum_k m4_k / m2_k^2 with moments pooled over the
    whole sample; consistent for the common shock kurtosis when the
    components are i.i.d., and equal to 3 in the Gaussian limit.
    """
    shocks = structural_shocks(est, residuals, break_index)
    m2 = np.mean(shocks ** 2, axis=0)
    if np.any(m2 <= 0):
        raise ValueError("a structural shock component has zero empirical variance")
    m4 = np.mean(shocks ** 4, axis=0)
    return float(np.mean(m4 / m2 ** 2))
