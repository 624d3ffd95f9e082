import numpy as np
import pytest

from corpus import random_system
from kminerr.operator import (ASSEMBLY_LIMIT, AssemblyTooLarge, apply_C, assemble, cg_bound,
                              matrix_free_C, quasi_opt_factor, spectral_report)
from kminerr.sweep import cycle
from kminerr.system import build_projectors, partition_uniform, symmetric_expand

A2 = np.array([[1.0, 0.0], [1.0, 1.0]])
b2 = np.array([1.0, 2.0])


def test_hand_operator():
    op = assemble(build_projectors(partition_uniform(A2, b2, 1)))
    # P(x) = (x1 + (2 - x1 - x2) / 2 ... ) worked out by hand
    assert np.allclose(op.T, [[0.0, -0.5], [0.0, 0.5]], atol=1e-15)
    assert np.allclose(op.g, [1.5, 0.5], atol=1e-15)
    assert np.allclose(op.C, [[1.0, 0.5], [0.0, 0.5]], atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_affine_form_reproduces_cycle(seed):
    P, A, b, xs = random_system(seed)
    op = assemble(P)
    x = np.random.default_rng(seed).standard_normal(P.n)
    assert np.allclose(op.apply(x), cycle(P, x).y, atol=1e-10)
    assert np.allclose(apply_C(op, x), apply_C(P, x), atol=1e-10)
    assert np.allclose(matrix_free_C(P)(x), op.C @ x, atol=1e-10)
    # the solution is a fixed point
    assert np.allclose(op.C @ xs, op.g, atol=1e-9)


def test_size_gate():
    n = ASSEMBLY_LIMIT + 1
    P = build_projectors(partition_uniform(np.ones((1, n)), np.ones(1), 1))
    with pytest.raises(AssemblyTooLarge):
        assemble(P)


def test_quasi_optimality_factor():
    assert quasi_opt_factor(0.9) == 19.0
    assert quasi_opt_factor(0.0) == 1.0
    assert quasi_opt_factor(1.0) == float("inf")


def test_cg_bound_values():
    assert cg_bound(1.0, 3, 2.0) == 0.0
    assert cg_bound(9.0, [0, 1, 2], 1.0) == pytest.approx([2.0, 1.0, 0.5])


@pytest.mark.parametrize("seed", range(5))
def test_contraction_and_symmetry(seed):
    P, A, b, xs = random_system(seed)
    rep = spectral_report(assemble(P), A)
    assert 0.0 <= rep.t2_norm < 1.0
    sym = symmetric_expand(P.system)
    rs = spectral_report(assemble(build_projectors(sym)), A)
    assert rs.c2_symmetric
    assert rs.c2_eigenvalues.min() > 0 and rs.kappa >= 1.0
