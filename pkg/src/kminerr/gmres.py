"""Full (unrestarted) GMRES on the Kaczmarz-preconditioned system ``C x = g``."""
import time
from dataclasses import dataclass, field

import numpy as np

from .sweep import cycle
from .trace import CONVERGED, MAX_ITER, SolveTrace, make_record


@dataclass
class ArnoldiState:
    V: np.ndarray
    H: np.ndarray
    k: int = 0
    cs: list = field(default_factory=list)
    sn: list = field(default_factory=list)


def _givens(a, b):
    if b == 0.0:
        return 1.0, 0.0
    r = np.hypot(a, b)
    return a / r, b / r


def gmres_solve(apply_C, g, x0, max_iter, tol=1e-10, projectors=None, x_star=None,
                store_iterates=False, breakdown_tol=1e-14):
    """GMRES with modified Gram-Schmidt Arnoldi (one reorthogonalisation pass)
    and Givens rotations.

    ``x_k`` minimises ``||g - C x||`` over ``x_0 + K_k(C, r_0)``. Because
    ``g - C x = P(x) - x``, when ``projectors`` is given each record carries
    ``rho``/``omega``/``gamma`` from a cycle at ``x_k`` and ``qtilde_norm``
    is the Arnoldi subdiagonal entry of the step that produced the next
    basis vector. An Arnoldi breakdown means the Krylov space is invariant;
    the least-squares solution is then exact and the solve stops.
    """
    x0 = np.asarray(x0, dtype=np.float64).copy()
    n = x0.shape[0]
    r0 = g - apply_C(x0)
    beta = float(np.linalg.norm(r0))
    V = np.zeros((n, max_iter + 1))
    H = np.zeros((max_iter + 1, max_iter))
    state = ArnoldiState(V, H)
    rhs = np.zeros(max_iter + 1)
    rhs[0] = beta
    R = np.zeros((max_iter, max_iter))
    trace = SolveTrace("gmres", x_star=x_star, x0=x0.copy())
    t0 = time.perf_counter()
    if beta > 0:
        V[:, 0] = r0 / beta

    def solution(k):
        if k == 0:
            return x0.copy()
        y = np.linalg.solve(np.triu(R[:k, :k]), rhs[:k])
        return x0 + V[:, :k] @ y

    def record(k, x, hnext):
        if projectors is not None:
            sys = projectors.system
            out = cycle(projectors, x)
            rec = make_record(k, x, out.y, out.omega, x_star, sys.A, sys.b, qtilde_norm=hnext,
                              wall_ms=1e3 * (time.perf_counter() - t0))
        else:
            res = g - apply_C(x)
            rho = float(res @ res)
            rec = make_record(k, x, x + res, 0.0, x_star, qtilde_norm=hnext,
                              wall_ms=1e3 * (time.perf_counter() - t0))
            rec.rho = rho
        trace.records.append(rec)
        if store_iterates:
            trace.iterates.append(x.copy())
        return rec

    x = x0.copy()
    k = 0
    while True:
        converged = beta == 0.0 or abs(rhs[k]) <= tol * (1.0 + np.linalg.norm(x))
        if converged or k == max_iter:
            record(k, x, 0.0)
            trace.status = CONVERGED if converged else MAX_ITER
            return x, trace
        w = apply_C(V[:, k])
        for _ in range(2):
            for i in range(k + 1):
                h = float(V[:, i] @ w)
                H[i, k] += h
                w = w - h * V[:, i]
        hnext = float(np.linalg.norm(w))
        H[k + 1, k] = hnext
        record(k, x, hnext)
        col = H[:k + 2, k].copy()
        for i in range(k):
            c, s = state.cs[i], state.sn[i]
            col[i], col[i + 1] = c * col[i] + s * col[i + 1], -s * col[i] + c * col[i + 1]
        c, s = _givens(col[k], col[k + 1])
        state.cs.append(c)
        state.sn.append(s)
        col[k] = c * col[k] + s * col[k + 1]
        col[k + 1] = 0.0
        R[:k + 1, k] = col[:k + 1]
        rhs[k], rhs[k + 1] = c * rhs[k], -s * rhs[k]
        lucky = hnext <= breakdown_tol * max(float(np.linalg.norm(H[:k + 2, k])), 1e-300)
        if not lucky:
            V[:, k + 1] = w / hnext
        k += 1
        state.k = k
        x = solution(k)
        if lucky:
            record(k, x, 0.0)
            trace.status = CONVERGED
            return x, trace
