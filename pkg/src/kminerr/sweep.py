"""Block Kaczmarz cycle and the plain fixed-point iteration."""
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .numerics import DimensionError
from .trace import CONVERGED, MAX_ITER, SolveTrace, make_record


@dataclass(frozen=True)
class CycleOutcome:
    y: np.ndarray
    omega: float
    w_sq: np.ndarray


def _check_len(x, n):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise DimensionError(f"vector of shape {x.shape} does not match n = {n}")
    return x


def apply_block(proj, x):
    """Project ``x`` onto ``{z : A_j z = b_j}``; returns ``(y, ||y - x||^2)``."""
    x = _check_len(x, proj.A_j.shape[1])
    d = proj.A_j.T @ proj.pseudo_apply(proj.b_j - proj.A_j @ x)
    return x + d, float(d @ d)


def cycle(projectors, x, compensated=False):
    """One block Kaczmarz cycle ``P(x) = P_p(...P_1(x))``.

    ``omega`` accumulates ``||d_j||^2`` in block order, optionally with
    Kahan summation.
    """
    x = np.ascontiguousarray(_check_len(x, projectors.n))
    sys = projectors.system
    y, omega, w_sq = _kernels.cycle(sys.A, sys.b, projectors.starts, projectors.Qflat,
                                    projectors.qoffs, projectors.invlam, x, compensated)
    return CycleOutcome(y, float(omega), w_sq)


def cycle_many(projectors, X):
    """Apply ``P`` column-wise to an ``(n, k)`` matrix of points."""
    Y = np.array(X, dtype=np.float64, copy=True)
    for proj in projectors:
        R = proj.b_j[:, None] - proj.A_j @ Y
        Q = proj.gram_eig.eigenvectors
        Y += proj.A_j.T @ (Q @ (proj.inv_eigenvalues[:, None] * (Q.T @ R)))
    return Y


def iterate_fixed_point(projectors, x0, max_cycles, tol, x_star=None, store_iterates=False):
    """Repeat ``x <- P(x)`` until ``||P(x) - x|| <= tol (1 + ||x||)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = _check_len(x0, projectors.n).copy()
    trace = SolveTrace("kaczmarz", x_star=x_star)
    A, b = projectors.system.A, projectors.system.b
    t0 = time.perf_counter()
    for k in range(max_cycles + 1):
        out = cycle(projectors, x)
        rec = make_record(k, x, out.y, out.omega, x_star, A, b,
                          qtilde_norm=np.linalg.norm(out.y - x),
                          wall_ms=1e3 * (time.perf_counter() - t0))
        trace.records.append(rec)
        if store_iterates:
            trace.iterates.append(x.copy())
        if rec.rho <= (tol * (1.0 + np.linalg.norm(x))) ** 2:
            trace.status = CONVERGED
            return x, trace
        if k == max_cycles:
            break
        x = out.y
    trace.status = MAX_ITER
    return x, trace

