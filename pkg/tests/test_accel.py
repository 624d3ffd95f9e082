import numpy as np
import pytest

from corpus import random_system
from kminerr.accel import AffineSearchState, RankDeficiencyError, gamma, gk_solve, gk_step
from kminerr.sweep import cycle
from kminerr.system import build_projectors, partition_uniform

A2 = np.array([[1.0, 0.0], [1.0, 1.0]])
b2 = np.array([1.0, 2.0])


def test_gamma_is_mean():
    assert gamma(1.5, 2.5) == 2.0
    with pytest.raises(ValueError):
        gamma(-1.0, 0.0)


def test_hand_sequence():
    P = build_projectors(partition_uniform(A2, b2, 1))
    x, tr = gk_solve(P, np.zeros(2), x_star=np.array([1.0, 1.0]))
    assert tr.status == "converged"
    assert len(tr) == 3
    assert np.allclose(x, [1.0, 1.0], atol=1e-15)
    assert tr.column("gamma")[:2] == pytest.approx([2.0, 0.16], abs=1e-15)


def test_first_step_is_scaled_cycle_step():
    P = build_projectors(partition_uniform(A2, b2, 1))
    st = AffineSearchState(np.zeros(2))
    x1 = gk_step(st, cycle(P, np.zeros(2)))
    # x1 = x0 + gamma / rho * (P(x0) - x0) = 0.8 * (1.5, 0.5)
    assert np.allclose(x1, [1.2, 0.4], atol=1e-15)


@pytest.mark.parametrize("seed", range(6))
def test_qr_and_eig_paths_agree(seed):
    P, A, b, xs = random_system(seed, kind="full", n_max=10)
    xq, _ = gk_solve(P, np.zeros(P.n), method="qr")
    xe, _ = gk_solve(P, np.zeros(P.n), method="eig")
    assert np.allclose(xq, xe, atol=1e-6 * (1 + np.linalg.norm(xs)))


def test_rank_deficiency_detected():
    # in one dimension any two search directions are collinear
    P = build_projectors(partition_uniform(np.array([[2.0]]), np.array([2.0]), 1))
    for method in ("qr", "eig"):
        st = AffineSearchState(np.zeros(1))
        st.anchors.append(np.array([0.5]))
        with pytest.raises(RankDeficiencyError):
            gk_step(st, cycle(P, st.current), method=method)


def test_unknown_method():
    P = build_projectors(partition_uniform(A2, b2, 1))
    with pytest.raises(ValueError):
        gk_step(AffineSearchState(np.zeros(2)), cycle(P, np.zeros(2)), method="lu")
