import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from kminerr.numerics import (DimensionError, complement_basis, orthonormal_range_basis,
                              pseudo_apply, retained, sym_eig)

# no subnormal entries: 1/lambda of their squares overflows
finite = st.one_of(st.just(0.0), st.floats(1e-3, 5), st.floats(-5, -1e-3))
mats = arrays(np.float64, st.tuples(st.integers(1, 7), st.integers(1, 7)), elements=finite)


def test_two_by_two_eigenpairs():
    eig = sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert eig.eigenvalues == pytest.approx([3.0, 1.0], abs=1e-15)
    s = np.sqrt(0.5)
    # tie in magnitude: the first entry is made positive
    assert np.allclose(eig.eigenvectors, [[s, s], [s, -s]], atol=1e-15)


@pytest.mark.parametrize("method", ["jacobi", "lapack"])
@settings(max_examples=30, deadline=None)
@given(G=mats)
def test_decomposition_properties(method, G):
    S = G @ G.T
    eig = sym_eig(S, method=method)
    lam, V = eig.eigenvalues, eig.eigenvectors
    assert (np.diff(lam) <= 1e-12 * max(1.0, lam[0])).all()
    assert np.allclose(V.T @ V, np.eye(S.shape[0]), atol=1e-12)
    assert np.allclose(eig.reconstruct(), S, atol=1e-10 * max(1.0, np.abs(S).max()))
    # largest-magnitude entry of every eigenvector is positive
    idx = np.argmax(np.abs(V), axis=0)
    assert (V[idx, np.arange(V.shape[1])] > 0).all()


def test_jacobi_and_lapack_match():
    rng = np.random.default_rng(3)
    G = rng.standard_normal((12, 12))
    S = G + G.T
    a, b = sym_eig(S, method="jacobi"), sym_eig(S, method="lapack")
    assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-12)
    assert np.allclose(a.eigenvectors, b.eigenvectors, atol=1e-9)


def test_rejects_nonsymmetric_and_nonsquare():
    with pytest.raises(ValueError):
        sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DimensionError):
        sym_eig(np.ones((2, 3)))


@settings(max_examples=30, deadline=None)
@given(G=mats)
def test_pseudo_apply_is_pinv(G):
    S = G @ G.T
    v = np.arange(S.shape[0], dtype=float) - 1.5
    got = pseudo_apply(sym_eig(S), v, rank_tol=1e-10)
    want = np.linalg.pinv(S, rcond=1e-10, hermitian=True) @ v
    assert np.allclose(got, want, atol=1e-8 * (1 + np.abs(want).max()))


def test_rank_tolerance_must_be_a_fraction():
    eig = sym_eig(np.eye(2))
    with pytest.raises(ValueError):
        pseudo_apply(eig, np.ones(2), rank_tol=1.5)


def test_retained_counts_rank():
    S = np.diag([4.0, 1e-20, 0.0])
    assert retained(sym_eig(S), 1e-12).tolist() == [True, False, False]


@settings(max_examples=30, deadline=None)
@given(G=mats)
def test_range_and_complement_split_space(G):
    B = orthonormal_range_basis(G, 1e-10)
    Z = complement_basis(G, 1e-10)
    n = G.shape[1]
    assert B.shape[1] + Z.shape[1] == n
    assert B.shape[1] == np.linalg.matrix_rank(G, tol=1e-5 * max(1e-300, np.abs(G).max())) or \
        np.linalg.svd(G, compute_uv=False).min() < 1e-4
    Q = np.column_stack([B, Z])
    assert np.allclose(Q.T @ Q, np.eye(n), atol=1e-10)
    if Z.shape[1]:
        assert np.abs(G @ Z).max() <= 1e-6 * max(1.0, np.abs(G).max())
