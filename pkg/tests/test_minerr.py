import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corpus import random_system
from kminerr.minerr import KrylovBasis, heuristic_best, minerr_solve, orthogonalize
from kminerr.system import build_projectors, partition_uniform

A2 = np.array([[1.0, 0.0], [1.0, 1.0]])
b2 = np.array([1.0, 2.0])
XS2 = np.array([1.0, 1.0])


def hand_run(**kw):
    P = build_projectors(partition_uniform(A2, b2, 1))
    return minerr_solve(P, np.zeros(2), x_star=XS2, store_iterates=True, **kw)


def test_hand_case_terminates_in_two_steps():
    x, tr, basis = hand_run()
    assert tr.status == "converged"
    assert basis.k == 2
    assert np.allclose(tr.iterates[1], [1.2, 0.4], atol=1e-15)
    assert np.allclose(x, XS2, atol=1e-15)
    assert tr.column("gamma")[:2] == pytest.approx([2.0, 0.16], abs=1e-15)
    assert tr.column("qtilde_norm")[:2] == pytest.approx([np.sqrt(2.5), 0.16 / 0.632455532],
                                                         rel=1e-8)


def test_errors_never_increase_while_exact():
    P, A, b, xs = random_system(1, kind="full")
    _, tr, _ = minerr_solve(P, np.zeros(P.n), x_star=xs)
    e = tr.errors()
    assert (np.diff(e) <= 1e-10 * e[0]).all()


def test_heuristic_picks_smallest_gamma():
    x, tr, basis = hand_run()
    x_opt, k = heuristic_best(tr, basis, np.zeros(2))
    assert k == 2
    assert np.allclose(x_opt, x)
    basis.gammas[:] = [1.0, 1.0]
    assert heuristic_best(tr, basis, np.zeros(2))[1] == 1


def test_heuristic_needs_a_step():
    _, tr, basis = hand_run()
    with pytest.raises(ValueError):
        heuristic_best(tr, KrylovBasis(2), np.zeros(2))


def test_max_iter_leaves_final_check():
    P, A, b, xs = random_system(0, kind="full")
    x, tr, basis = minerr_solve(P, np.zeros(P.n), max_iter=2, x_star=xs)
    assert tr.status == "max_iter"
    assert basis.k == 2 and len(tr) == 3
    assert np.isfinite(tr.column("qtilde_norm")).all()


def test_breakdown_when_direction_collapses():
    P = build_projectors(partition_uniform(A2, b2, 1))
    _, tr, basis = minerr_solve(P, np.zeros(2), tol=1e-300, breakdown_tol=0.9)
    assert tr.status == "breakdown"
    assert tr.breakdown_step == basis.k


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_basis_stays_orthonormal(seed, reorth):
    P, A, b, xs = random_system(seed, n_max=15, m_max=30)
    _, _, basis = minerr_solve(P, np.zeros(P.n), reorth=reorth)
    Q = basis.vectors
    assert np.abs(Q.T @ Q - np.eye(basis.k)).max() < 1e-6


def test_growth_beyond_capacity():
    basis = KrylovBasis(3, capacity=1)
    for i in range(3):
        basis.append(np.eye(3)[i], float(i + 1), 1.0)
    assert basis.reconstruct(np.zeros(3)).tolist() == [1.0, 2.0, 3.0]


def test_single_pass_differs_from_cgs2_only_in_rounding():
    Q = np.linalg.qr(np.random.default_rng(0).standard_normal((6, 3)))[0]
    r = np.arange(6.0)
    a, b = orthogonalize(r, Q, True), orthogonalize(r, Q, False)
    assert np.allclose(a, b, atol=1e-12)
    assert np.abs(Q.T @ a).max() < 1e-14
