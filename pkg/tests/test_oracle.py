import numpy as np
import pytest

from corpus import random_system
from kminerr.minerr import minerr_solve
from kminerr.operator import assemble
from kminerr.oracle import (best_in_krylov, explicit_krylov, krylov_distance, range_solution,
                            verify_abstract_representation)


def test_power_and_arnoldi_spans_agree_when_well_conditioned():
    C = np.diag([1.0, 2.0, 3.0, 4.0])
    r0 = np.ones(4)
    a = explicit_krylov(lambda v: C @ v, r0, 6, mode="power")
    b = explicit_krylov(lambda v: C @ v, r0, 6, mode="arnoldi")
    assert a.degree_d == b.degree_d == 4
    for k in range(1, 5):
        Pa = a.basis_k(k) @ a.basis_k(k).T
        Pb = b.basis_k(k) @ b.basis_k(k).T
        assert np.allclose(Pa, Pb, atol=1e-10)


def test_degree_of_repeated_eigenvalues():
    C = np.diag([2.0, 2.0, 5.0])
    kry = explicit_krylov(lambda v: C @ v, np.array([1.0, 1.0, 1.0]), 3, mode="arnoldi")
    assert kry.degree_d == 2


def test_zero_start_rejected():
    with pytest.raises(ValueError):
        explicit_krylov(lambda v: v, np.zeros(2), 2)


def test_best_point_is_projection():
    x0 = np.array([1.0, 0.0, 0.0])
    basis = np.array([[0.0], [1.0], [0.0]])
    xs = np.array([3.0, 2.0, 5.0])
    assert best_in_krylov(x0, basis, xs).tolist() == [1.0, 2.0, 0.0]
    assert krylov_distance(x0, basis, xs) == pytest.approx(np.sqrt(4 + 25))


def test_range_solution_minimum_norm():
    A = np.array([[1.0, 1.0]])
    assert np.allclose(range_solution(A, np.array([2.0])), [1.0, 1.0])
    assert np.allclose(range_solution(A, np.array([2.0]), x0=np.array([2.0, 0.0])), [2.0, 0.0])


@pytest.mark.parametrize("seed", range(5))
def test_representation_holds_for_minerr(seed):
    P, A, b, xs = random_system(seed)
    x0 = np.zeros(P.n)
    _, tr, basis = minerr_solve(P, x0, tol=1e-13, store_iterates=True)
    op = assemble(P)
    residuals = [op.g - op.C @ x for x in tr.iterates]
    rep = verify_abstract_representation(x0, xs, basis.vectors, residuals,
                                         iterates=tr.iterates[:basis.k + 1])
    assert rep.max_deviation < 1e-6
    assert rep.triangular < 1e-6
