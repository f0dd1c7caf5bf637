import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import linalg

from unmixio import (
    ConvergenceWarning,
    OrthogonalFactorization,
    RankDeficientError,
    orthogonal_procrustes,
    procrustes_objective,
)
from oracles import procrustes_oracle


def _random(seed, n=200, p=4):
    rng = np.random.default_rng(seed)
    # correlated columns with unequal scales make the problem non-trivial
    a = rng.normal(size=(n, p)) @ rng.normal(size=(p, p)) * rng.uniform(0.5, 3, p)
    return a / np.linalg.norm(a)


def _feasible(f, p):
    return np.max(np.abs(f.V.T @ f.V - np.eye(p)))


def test_orthogonal_columns_are_fixed_point():
    a = np.zeros((6, 3))
    a[:3, :3] = np.diag([2.0, 0.5, 3.0])
    f = orthogonal_procrustes(a)
    np.testing.assert_allclose(f.d, [2.0, 0.5, 3.0], atol=1e-14)
    np.testing.assert_allclose(f.V, a / f.d, atol=1e-14)
    assert f.iterations <= 2
    assert f.objective <= 1e-28


def test_identity():
    f = orthogonal_procrustes(np.eye(4))
    np.testing.assert_allclose(f.V, np.eye(4), atol=1e-15)
    np.testing.assert_allclose(f.d, np.ones(4), atol=1e-15)
    assert f.converged


@pytest.mark.parametrize("seed", range(100))
def test_matches_oracle(seed):
    a = _random(seed)
    f = orthogonal_procrustes(a)
    v_o, d_o, obj_o = procrustes_oracle(a)
    assert f.converged
    assert f.objective == pytest.approx(obj_o, abs=1e-9)
    # the oracle leaves signs free
    np.testing.assert_allclose(f.d, np.abs(d_o), atol=1e-6)


def test_beats_symmetric_orthogonalization():
    for seed in range(20):
        a = _random(seed)
        # symmetric orthogonalization: V = A (A^T A)^(-1/2)
        v = a @ linalg.inv(linalg.sqrtm(a.T @ a)).real
        naive = OrthogonalFactorization(v, np.einsum("ij,ij->j", v, a), 0, 0.0, True)
        f = orthogonal_procrustes(a)
        assert f.objective <= procrustes_objective(a, naive) + 1e-15


def test_objective_zero_for_exact_factorization():
    v = np.linalg.qr(np.random.default_rng(3).normal(size=(10, 3)))[0]
    f = OrthogonalFactorization(v, np.array([1.0, 2.0, 3.0]), 0, 0.0, True)
    assert procrustes_objective(v * f.d, f) == 0.0


def test_objective_expansion(rng):
    a = np.vstack([rng.normal(size=(5, 3)), np.zeros((3, 3))])
    v = np.linalg.qr(rng.normal(size=(8, 3)))[0]
    d = rng.uniform(0.1, 2, 3)
    f = OrthogonalFactorization(v, d, 0, 0.0, True)
    expected = np.sum(a * a) - 2 * np.trace(np.diag(d) @ v.T @ a) + np.sum(d * d)
    assert procrustes_objective(a, f) == pytest.approx(expected, rel=1e-12)


def test_objective_shape_mismatch():
    f = orthogonal_procrustes(np.eye(3))
    with pytest.raises(ValueError):
        procrustes_objective(np.eye(4), f)


def test_scale_equivariance():
    a = _random(7)
    f1 = orthogonal_procrustes(a)
    f2 = orthogonal_procrustes(2 * a)
    np.testing.assert_allclose(f2.V, f1.V, atol=1e-9)
    np.testing.assert_allclose(f2.d, 2 * f1.d, rtol=1e-9)
    assert np.sqrt(f2.objective) == pytest.approx(2 * np.sqrt(f1.objective), rel=1e-6)


def test_history_matches_objective():
    a = _random(11)
    f = orthogonal_procrustes(a)
    assert len(f.history) == f.iterations
    assert f.history[-1] == pytest.approx(f.objective, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(0, 40))
def test_invariants_random(seed, p, extra):
    rng = np.random.default_rng(seed)
    n = p + 1 + extra
    a = rng.normal(size=(n, p)) @ (np.eye(p) + 0.8 * rng.normal(size=(p, p)))
    assume(np.linalg.cond(a) < 1e8)
    with warnings.catch_warnings():
        warnings.simplefilter("error", ConvergenceWarning)
        f = orthogonal_procrustes(a)
    # monotone objective
    h = np.array(f.history)
    assert np.all(np.diff(h) <= 1e-12 * max(h[0], 1.0))
    # feasibility and sign convention
    assert _feasible(f, p) <= 1e-10
    assert np.all(f.d >= 0)
    # column i of V follows column i of A
    for i in range(p):
        assert f.V[:, i] @ a[:, i] > 0


def test_deterministic():
    a = _random(5)
    f1, f2 = orthogonal_procrustes(a), orthogonal_procrustes(a)
    assert f1.V.tobytes() == f2.V.tobytes()
    assert f1.d.tobytes() == f2.d.tobytes()


def test_sign_flip_keeps_product():
    # a column nearly opposite to its orthogonal partner drives d negative mid-run
    a = np.array([[1.0, -0.99], [0.0, 0.14], [0.0, 0.0]])
    f = orthogonal_procrustes(a)
    assert np.all(f.d >= 0)
    assert procrustes_objective(a, f) == pytest.approx(f.objective)


def test_zero_column_rejected():
    a = np.zeros((5, 2))
    a[:, 0] = 1.0
    with pytest.raises(RankDeficientError, match="column 2"):
        orthogonal_procrustes(a)


def test_collinear_rejected():
    x = np.arange(1.0, 6.0)
    with pytest.raises(RankDeficientError):
        orthogonal_procrustes(np.column_stack([x, 3 * x]))


def test_wide_matrix_rejected():
    with pytest.raises(ValueError):
        orthogonal_procrustes(np.ones((2, 3)))


def test_nonconvergence_warns():
    a = _random(2)
    with pytest.warns(ConvergenceWarning):
        f = orthogonal_procrustes(a, tol=0.0, max_iter=3)
    assert not f.converged
    assert f.iterations == 3
    assert _feasible(f, 4) <= 1e-10
