"""Orthogonal-but-not-orthonormal Procrustes factorization ``A ~ V @ diag(d)``.

``V`` has orthonormal columns and ``d`` is a non-negative vector. The
solver alternates two closed-form steps, each of which can only lower
``||A - V diag(d)||_F**2``:

1. for fixed ``d``, ``V = L @ R.T`` from the thin SVD ``A diag(d) = L S R.T``;
2. for fixed ``V``, ``d = diag(V.T @ A)``.

Column i of ``V`` stays tied to column i of ``A``; there is no sign or
permutation ambiguity as in PCA or ICA.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import ConvergenceWarning, RankDeficientError

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1000


@dataclass(frozen=True, eq=False)
class OrthogonalFactorization:
    """Result of :func:`orthogonal_procrustes`.

    Attributes
    ----------
    V : ndarray, shape (N, p)
        Orthonormal columns.
    d : ndarray, shape (p,)
        Non-negative diagonal of D.
    iterations : int
    objective : float
        Final ``||A - V diag(d)||_F**2``.
    converged : bool
    history : tuple of float
        Objective after each iteration.
    """

    V: np.ndarray
    d: np.ndarray
    iterations: int
    objective: float
    converged: bool
    history: tuple = field(default=(), repr=False)

    @property
    def D(self) -> np.ndarray:
        return np.diag(self.d)

    def product(self) -> np.ndarray:
        """The orthogonal-column approximation ``V @ diag(d)``."""
        return self.V * self.d


def procrustes_objective(a, f: OrthogonalFactorization) -> float:
    """``tr[(A - VD).T (A - VD)]``."""
    a = np.asarray(a, dtype=np.float64)
    if a.shape != f.V.shape:
        raise ValueError(f"shape mismatch: A is {a.shape}, V is {f.V.shape}")
    r = a - f.V * f.d
    return float(np.sum(r * r))


def _check_full_rank(a: np.ndarray) -> None:
    norms = np.linalg.norm(a, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise RankDeficientError(f"column {int(zero[0]) + 1} of A is identically zero")
    s = np.linalg.svd(a / norms, compute_uv=False)
    if s[-1] <= s[0] * max(a.shape) * np.finfo(float).eps:
        raise RankDeficientError(
            f"A is rank deficient (smallest/largest singular value {s[-1] / s[0]:.3g})"
        )


def orthogonal_procrustes(a, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                          ) -> OrthogonalFactorization:
    """Factor a full-column-rank ``(N, p)`` matrix as ``V @ diag(d)``.

    Starts from ``d = 1`` and iterates until the largest change in ``d`` is
    at most ``tol * max(|d|)``. If ``max_iter`` is hit, the current iterate
    is returned with ``converged=False`` and a ``ConvergenceWarning``.
    Negative entries of ``d`` are flipped together with their ``V`` column.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("A must be a 2-D matrix")
    n, p = a.shape
    if n < p:
        raise ValueError(f"A must have at least as many rows as columns, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("A contains non-finite entries")
    _check_full_rank(a)

    a_sq = float(np.sum(a * a))
    d = np.ones(p)
    history = []
    converged = False
    it = 0
    v = None
    while it < max_iter:
        it += 1
        left, _, rt = np.linalg.svd(a * d, full_matrices=False)
        v = left @ rt
        d_new = np.einsum("ij,ij->j", v, a)  # diag(V.T @ A)
        # ||A||^2 - 2 tr(D V'A) + sum d^2 with d = diag(V'A)
        history.append(max(a_sq - float(np.sum(d_new * d_new)), 0.0))
        step = np.max(np.abs(d_new - d))
        d = d_new
        if step <= tol * np.max(np.abs(d)):
            converged = True
            break

    if not converged:
        warnings.warn(
            f"orthogonal Procrustes did not converge in {max_iter} iterations",
            ConvergenceWarning,
            stacklevel=2,
        )

    neg = d < 0
    if np.any(neg):
        v = v.copy()
        v[:, neg] *= -1.0
        d = np.abs(d)
    r = a - v * d
    return OrthogonalFactorization(
        V=v, d=d, iterations=it, objective=float(np.sum(r * r)),
        converged=converged, history=tuple(history),
    )
