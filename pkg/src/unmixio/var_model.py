"""Vector autoregression: least-squares fitting, AIC order selection and
the frequency-domain transfer matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .core import NumericalError, RankDeficientError, as_series


@dataclass(frozen=True, eq=False)
class VarModel:
    """Fitted VAR(q): ``y_t = sum_k coefs[k-1] @ y_{t-k} + e_t``.

    Attributes
    ----------
    coefs : ndarray, shape (q, p, p)
    sigma : ndarray, shape (p, p)
        Innovation covariance ``E.T @ E / n_effective``.
    n_effective : int
        Number of residual rows the fit used.
    """

    coefs: np.ndarray
    sigma: np.ndarray
    n_effective: int

    def __post_init__(self):
        coefs = np.asarray(self.coefs, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if coefs.ndim != 3 or coefs.shape[1] != coefs.shape[2] or coefs.shape[0] < 1:
            raise ValueError(f"coefs must have shape (q, p, p), got {coefs.shape}")
        if sigma.shape != coefs.shape[1:]:
            raise ValueError("sigma shape does not match coefficients")
        coefs.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "coefs", coefs)
        object.__setattr__(self, "sigma", sigma)

    @property
    def order(self) -> int:
        return self.coefs.shape[0]

    @property
    def n_channels(self) -> int:
        return self.coefs.shape[1]


def lagged_design(y: np.ndarray, q: int, start: int | None = None):
    """Regressors ``[y_{t-1}, ..., y_{t-q}]`` and targets ``y_t`` for ``t >= start``.

    ``start`` is a 0-based row index and defaults to ``q``.
    """
    n, p = y.shape
    start = q if start is None else start
    if start < q:
        raise ValueError("start must be at least q")
    z = np.hstack([y[start - k:n - k] for k in range(1, q + 1)])
    return z, y[start:]


def _ols(y: np.ndarray, q: int, start: int | None = None):
    n, p = y.shape
    z, target = lagged_design(y, q, start)
    if z.shape[0] <= z.shape[1]:
        raise ValueError(
            f"order {q} needs more than {p * q} usable samples, only {z.shape[0]} available"
        )
    beta, _, rank, _ = np.linalg.lstsq(z, target, rcond=None)
    if rank < z.shape[1]:
        raise RankDeficientError(
            f"lagged regressor matrix has rank {rank} < {z.shape[1]} (order {q}, {p} channels)"
        )
    resid = target - z @ beta
    # beta rows are grouped by lag; block k transposed is A_k
    coefs = np.stack([beta[k * p:(k + 1) * p].T for k in range(q)])
    return coefs, resid


def innovation_covariance(e) -> np.ndarray:
    """``E.T @ E / rows``, symmetrised."""
    e = np.asarray(e, dtype=np.float64)
    s = e.T @ e / e.shape[0]
    return 0.5 * (s + s.T)


def fit_var(y, q: int, demean: bool = False):
    """Ordinary least-squares VAR(q) fit without intercept.

    Returns ``(model, innovations)`` where row r of the ``(N - q, p)``
    innovations matrix is the residual at sample ``q + r``.
    """
    if q < 1:
        raise ValueError("order q must be at least 1")
    y = as_series(y, "y")
    if demean:
        y = y - y.mean(axis=0)
    coefs, resid = _ols(y, q)
    return VarModel(coefs, innovation_covariance(resid), resid.shape[0]), resid


def _logdet_spd(s: np.ndarray) -> float:
    try:
        c = linalg.cholesky(s, lower=True)
    except linalg.LinAlgError:
        raise NumericalError("residual covariance is not positive definite") from None
    return 2.0 * float(np.sum(np.log(np.diag(c))))


def select_order_aic(y, q_max: int, demean: bool = False):
    """Pick the VAR order minimising AIC over ``1..q_max``.

    Every candidate is fitted on the same sample window (rows ``q_max``
    onward) so scores are comparable:
    ``AIC(q) = N_eff * log det(Sigma_q) + 2 * q * p**2``.

    Returns ``(best_q, scores)`` with ``scores[q - 1]`` for order q; ties go
    to the smaller order.
    """
    if q_max < 1:
        raise ValueError("q_max must be at least 1")
    y = as_series(y, "y")
    if demean:
        y = y - y.mean(axis=0)
    p = y.shape[1]
    scores = []
    for q in range(1, q_max + 1):
        _, resid = _ols(y, q, start=q_max)
        n_eff = resid.shape[0]
        scores.append(n_eff * _logdet_spd(innovation_covariance(resid)) + 2.0 * q * p * p)
    best = int(np.argmin(scores)) + 1  # argmin returns the first minimum
    return best, scores


def var_transfer(model: VarModel, freqs_hz, sampling_rate: float) -> np.ndarray:
    """``I - sum_k A_k exp(-2j*pi*f*k/fs)`` for each frequency.

    Returns a complex array of shape ``(n_freqs, p, p)``.
    """
    if sampling_rate <= 0:
        raise ValueError("sampling_rate must be positive")
    f = np.atleast_1d(np.asarray(freqs_hz, dtype=np.float64))
    if np.any(f < 0) or np.any(f > sampling_rate / 2):
        raise ValueError("frequencies must lie in [0, sampling_rate/2]")
    k = np.arange(1, model.order + 1)
    phase = np.exp(-2j * np.pi * np.outer(f, k) / sampling_rate)  # (F, q)
    return np.eye(model.n_channels) - np.einsum("fk,kij->fij", phase, model.coefs)
