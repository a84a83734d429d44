"""Vector autoregression estimation and its moving-average representation.

Estimation is equation-by-equation least squares with an intercept, solved
through an orthogonal decomposition of the regressor matrix (never the normal
equations) so that near-collinear windows do not lose precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import CollinearWindowError, DataError

__all__ = [
    "VarModel",
    "fit_var",
    "select_lag",
    "ma_coefficients",
    "companion_matrix",
    "simulate_var",
]


@dataclass(frozen=True)
class VarModel:
    """A fitted VAR(p): y_t = c + sum_j Phi_j y_{t-j} + eps_t.

    Coefficient matrices are oriented so that ``phi[j][row, col]`` is the
    loading of equation ``row`` on lag ``j+1`` of variable ``col``.
    """

    dim: int
    lag_order: int
    intercept: np.ndarray           # (k,)
    phi: tuple[np.ndarray, ...]     # p matrices, each (k, k)
    sigma_eps: np.ndarray           # (k, k) residual covariance
    nobs: int                       # rows actually regressed (T - p)
    spectral_radius: float
    stationary: bool

    def to_json(self) -> str:
        """Diagnostic dump of the fitted model."""
        return json.dumps(
            {
                "dim": self.dim,
                "lag_order": self.lag_order,
                "intercept": self.intercept.tolist(),
                "phi": [m.tolist() for m in self.phi],
                "sigma": self.sigma_eps.tolist(),
                "nobs": self.nobs,
                "spectral_radius": self.spectral_radius,
                "stationary": self.stationary,
            }
        )


def companion_matrix(phi) -> np.ndarray:
    """Stack lag matrices into the (k*p, k*p) companion form."""
    phi = [np.asarray(m, dtype=float) for m in phi]
    k = phi[0].shape[0]
    p = len(phi)
    comp = np.zeros((k * p, k * p))
    comp[:k] = np.hstack(phi)
    if p > 1:
        comp[k:, :-k] = np.eye(k * (p - 1))
    return comp


def _deficiency_is_duplicate_only(x: np.ndarray) -> bool:
    # Exactly repeated regressor columns (e.g. one panel fed as both sign
    # blocks of a signed system) leave a well-defined minimum-norm solution
    # that preserves the duplication symmetry; any other rank deficiency,
    # such as a constant variable, is unrecoverable.
    uniq = np.unique(x.T, axis=0)
    return np.linalg.matrix_rank(uniq.T) == uniq.shape[0]


def fit_var(window, p: int) -> VarModel:
    """Fit a VAR(p) by least squares on a T x k window.

    The residual covariance is the residual cross-product divided by the
    effective sample size T - p, with no further degrees-of-freedom
    adjustment. Windows whose companion matrix has spectral radius >= 1 are
    flagged, not rejected.
    """
    y = np.asarray(window, dtype=float)
    if y.ndim != 2:
        raise DataError("window must be a T x k array")
    T, k = y.shape
    if p < 1:
        raise DataError("lag order must be at least 1")
    if not np.isfinite(y).all():
        raise DataError("window contains non-finite values")
    ncoef = k * p + 1
    if T - p < ncoef:
        raise DataError(
            f"window too short: {T} rows cannot identify a VAR({p}) in {k} variables"
        )

    dep = y[p:]
    x = np.empty((T - p, ncoef))
    x[:, 0] = 1.0
    for j in range(1, p + 1):
        x[:, 1 + (j - 1) * k : 1 + j * k] = y[p - j : T - j]

    coef, _, rank, _ = np.linalg.lstsq(x, dep, rcond=None)
    if rank < ncoef and not _deficiency_is_duplicate_only(x):
        raise CollinearWindowError("collinear window: regressor cross-product is singular")

    resid = dep - x @ coef
    sigma = resid.T @ resid / (T - p)
    sigma = (sigma + sigma.T) / 2.0

    intercept = coef[0].copy()
    phi = tuple(coef[1 + (j - 1) * k : 1 + j * k].T.copy() for j in range(1, p + 1))
    radius = float(np.max(np.abs(np.linalg.eigvals(companion_matrix(phi)))))
    return VarModel(
        dim=k,
        lag_order=p,
        intercept=intercept,
        phi=phi,
        sigma_eps=sigma,
        nobs=T - p,
        spectral_radius=radius,
        stationary=radius < 1.0,
    )


def select_lag(window, p_max: int) -> int:
    """Pick the lag order in 1..p_max minimizing the multivariate AIC.

    AIC(p) = ln det Sigma_hat(p) + 2 (k^2 p + k) / T_eff, with every candidate
    fit on the common sample that drops the first p_max rows so the criteria
    are comparable. Ties go to the smaller order.
    """
    y = np.asarray(window, dtype=float)
    if p_max < 1:
        raise DataError("p_max must be at least 1")
    T, k = y.shape
    t_eff = T - p_max
    if t_eff < k * p_max + 1:
        raise DataError(f"window too short to compare lags up to {p_max}")

    best_p = 1
    best_aic = np.inf
    for p in range(1, p_max + 1):
        model = fit_var(y[p_max - p :], p)
        sign, logdet = np.linalg.slogdet(model.sigma_eps)
        aic = logdet + 2.0 * (k * k * p + k) / t_eff if sign > 0 else np.inf
        if aic < best_aic:
            best_aic = aic
            best_p = p
    return best_p


def ma_coefficients(model: VarModel, H: int) -> list[np.ndarray]:
    """Moving-average matrices Psi_0..Psi_{H-1} of a fitted VAR.

    Psi_0 = I and Psi_h = sum_{j=1}^{min(h,p)} Phi_j Psi_{h-j}.
    """
    if H < 1:
        raise DataError("horizon must be at least 1")
    k = model.dim
    psi = [np.eye(k)]
    for h in range(1, H):
        acc = np.zeros((k, k))
        for j in range(1, min(h, model.lag_order) + 1):
            acc += model.phi[j - 1] @ psi[h - j]
        psi.append(acc)
    return psi


def simulate_var(phi, sigma, T: int, rng: np.random.Generator, intercept=None, burn: int = 200) -> np.ndarray:
    """Draw T observations from a Gaussian VAR, discarding a burn-in."""
    phi = [np.asarray(m, dtype=float) for m in phi]
    sigma = np.asarray(sigma, dtype=float)
    k = sigma.shape[0]
    p = len(phi)
    c = np.zeros(k) if intercept is None else np.asarray(intercept, dtype=float)
    chol = np.linalg.cholesky(sigma)
    eps = rng.standard_normal((T + burn, k)) @ chol.T
    y = np.zeros((T + burn, k))
    for t in range(T + burn):
        acc = c + eps[t]
        for j in range(1, min(t, p) + 1):
            acc = acc + phi[j - 1] @ y[t - j]
        y[t] = acc
    return y[burn:]
