"""Unmixing pipelines.

``innovations_orthogonalize`` fits a VAR to the observed series, finds the
nearest orthogonal-column version of its residuals, reads the mixing
matrix off the residual regression and inverts it. ``leakage_correct``
applies the same orthogonal factorization to the signals themselves and
is provided as the comparator.

Mixing matrices follow the column-vector convention ``Y_t = M X_t``, so a
time-in-rows series mixes as ``Y = X @ M.T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SingularMatrixError, as_series
from .procrustes import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    OrthogonalFactorization,
    orthogonal_procrustes,
)
from .var_model import VarModel, fit_var

MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class UnmixResult:
    """Everything produced by :func:`innovations_orthogonalize`."""

    estimated_mixing: np.ndarray
    unmixed: np.ndarray
    model: VarModel
    mixed_innovations: np.ndarray
    orthogonal_innovations: np.ndarray
    factorization: OrthogonalFactorization

    @property
    def diagonal_deviation(self) -> float:
        """Largest ``|M_ii - 1|``; the estimator does not force a unit diagonal."""
        return float(np.max(np.abs(np.diag(self.estimated_mixing) - 1.0)))

    @property
    def condition_number(self) -> float:
        return float(np.linalg.cond(self.estimated_mixing))


def estimate_mixing(eps_io, eta, d_io) -> np.ndarray:
    """Least-squares mixing matrix from orthogonal and mixed innovations.

    Solves ``eta ~ eps_io @ M.T``. Because ``eps_io = V diag(d)`` has
    orthogonal columns the normal equations reduce to
    ``M.T = diag(d)**-1 @ V.T @ eta`` with ``V = eps_io / d``.
    """
    eps_io = np.asarray(eps_io, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    d = np.asarray(d_io, dtype=np.float64)
    if eps_io.shape != eta.shape or d.shape != (eps_io.shape[1],):
        raise ValueError(
            f"shape mismatch: eps_io {eps_io.shape}, eta {eta.shape}, d {d.shape}"
        )
    if np.any(d == 0):
        raise SingularMatrixError("orthogonal innovations have a zero-scale column")
    v = eps_io / d
    m_t = (v.T @ eta) / d[:, None]
    return m_t.T


def _check_invertible(m: np.ndarray) -> None:
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularMatrixError(f"mixing matrix is singular (condition number {cond:.3g})")


def unmix(y, m) -> np.ndarray:
    """``X_t = M^-1 Y_t`` for every sample of a time-in-rows series."""
    y = as_series(y, "y")
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (y.shape[1], y.shape[1]):
        raise ValueError(f"matrix shape {m.shape} does not match {y.shape[1]} channels")
    _check_invertible(m)
    return np.linalg.solve(m, y.T).T


def innovations_orthogonalize(y, q: int, tol: float = DEFAULT_TOL,
                              max_iter: int = DEFAULT_MAX_ITER,
                              demean: bool = False) -> UnmixResult:
    """Unmix an instantaneous mixture by orthogonalizing VAR(q) innovations."""
    y = as_series(y, "y")
    model, eta = fit_var(y, q, demean=demean)
    fac = orthogonal_procrustes(eta, tol=tol, max_iter=max_iter)
    eps_io = fac.product()
    m_hat = estimate_mixing(eps_io, eta, fac.d)
    x_hat = unmix(y, m_hat)
    return UnmixResult(
        estimated_mixing=m_hat,
        unmixed=x_hat,
        model=model,
        mixed_innovations=eta,
        orthogonal_innovations=eps_io,
        factorization=fac,
    )


def leakage_correct(y, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                    demean: bool = True):
    """Signal orthogonalization: replace ``Y`` by its nearest ``V diag(d)``.

    Returns ``(x_lc, factorization)``; the columns of ``x_lc`` are exactly
    orthogonal. With ``demean`` the channel means are removed first, which
    keeps ``V`` in the zero-mean subspace so the output is also exactly
    uncorrelated in the Pearson sense.
    """
    y = as_series(y, "y")
    if demean:
        y = y - y.mean(axis=0)
    fac = orthogonal_procrustes(y, tol=tol, max_iter=max_iter)
    return fac.product(), fac
