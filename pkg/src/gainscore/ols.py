"""Ordinary least squares with an intercept, classical homoskedastic
standard errors, and Student-t 95% confidence intervals.

An intercept is always included: the binary regressors produced by the
thresholded generator have nonzero means, and the reference results were
produced by an estimator that fits a constant by default.  Critical values
are Student-t with dof = n - p - 1; at the grid sample sizes this is
indistinguishable from normal, but the convention is pinned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from .dgp import PairSample


class CollinearDesignError(ValueError):
    """The design matrix (with intercept) is rank deficient."""


@dataclass(frozen=True)
class FitResult:
    """Coefficients, classical SEs, and 95% CIs for one regression.

    Arrays are aligned with ``names``; the intercept is reported separately.
    """

    names: tuple[str, ...]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    intercept: float
    intercept_se: float
    intercept_ci_low: float
    intercept_ci_high: float
    dof: int
    sigma2_resid: float

    def __getitem__(self, name: str) -> tuple[float, float, float, float]:
        """(coefficient, se, ci_low, ci_high) for a named regressor."""
        i = self.names.index(name)
        return (
            float(self.coefficients[i]),
            float(self.standard_errors[i]),
            float(self.ci_low[i]),
            float(self.ci_high[i]),
        )


def fit(X: np.ndarray, y: np.ndarray, names: tuple[str, ...] | None = None) -> FitResult:
    """OLS of y on X plus an intercept, via QR of the design matrix.

    Raises CollinearDesignError on a rank-deficient design and ValueError
    when n <= p + 1 or the inputs are not finite.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    elif X.ndim != 2:
        raise ValueError(f"X must be 1- or 2-dimensional, got ndim={X.ndim}")
    y = np.asarray(y, dtype=float).ravel()
    n, p = X.shape
    if y.shape[0] != n:
        raise ValueError(f"X has {n} rows but y has {y.shape[0]}")
    if n <= p + 1:
        raise ValueError(f"need n > p + 1 observations, got n={n}, p={p}")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("design and response must be finite")
    if names is None:
        names = tuple(f"x{i + 1}" for i in range(p))
    if len(names) != p:
        raise ValueError(f"got {len(names)} names for {p} regressors")

    design = np.column_stack([np.ones(n), X])
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    if diag.min() <= diag.max() * n * np.finfo(float).eps:
        raise CollinearDesignError("collinear design")
    beta = linalg.solve_triangular(r, q.T @ y)
    residuals = y - design @ beta
    dof = n - p - 1
    sigma2 = float(residuals @ residuals) / dof
    r_inv = linalg.solve_triangular(r, np.eye(p + 1))
    se = np.sqrt(sigma2 * np.sum(r_inv * r_inv, axis=1))
    t_crit = float(stats.t.ppf(0.975, dof))
    low = beta - t_crit * se
    high = beta + t_crit * se

    return FitResult(
        names=names,
        coefficients=beta[1:],
        standard_errors=se[1:],
        ci_low=low[1:],
        ci_high=high[1:],
        intercept=float(beta[0]),
        intercept_se=float(se[0]),
        intercept_ci_low=float(low[0]),
        intercept_ci_high=float(high[0]),
        dof=dof,
        sigma2_resid=sigma2,
    )


def gain_score_regression(
    sample: PairSample, include_c: bool = False, include_u: bool = False
) -> FitResult:
    """Regress the gain-score d on (t1, t2[, c][, u_prime]) with intercept.

    With neither flag this is the plain two-treatment regression; adding c
    is the observable robustness test; adding u_prime is the infeasible
    oracle version that conditions on the latent confounder directly.
    """
    if sample.n == 0:
        raise ValueError("sample is empty")
    columns = [sample.t1, sample.t2]
    names = ["t1", "t2"]
    if include_c:
        columns.append(sample.c)
        names.append("c")
    if include_u:
        columns.append(sample.u_prime)
        names.append("u_prime")
    X = np.column_stack([np.asarray(col, dtype=float) for col in columns])
    return fit(X, sample.d, names=tuple(names))
