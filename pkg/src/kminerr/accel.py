"""Generalized Gearhart-Koshy acceleration of the block Kaczmarz cycle.

Each step minimises the Euclidean distance to the (unknown) solution over
the affine hull of all previous iterates and the new cycle output. The
normal equations of that least-squares problem have right-hand side
``(0, ..., 0, gamma_k)``, so the solution never appears explicitly.
"""
import time
from dataclasses import dataclass, field

import numpy as np

from .numerics import sym_eig
from .sweep import _check_len, cycle
from .trace import BREAKDOWN, CONVERGED, MAX_ITER, SolveTrace, make_record


class RankDeficiencyError(ArithmeticError):
    """The search directions lost affine independence at ``step``."""

    def __init__(self, step, detail=""):
        super().__init__(f"affine search matrix is numerically singular at step {step}"
                         + (f": {detail}" if detail else ""))
        self.step = step


@dataclass
class AffineSearchState:
    x0: np.ndarray
    anchors: list = field(default_factory=list)

    def __post_init__(self):
        if not self.anchors:
            self.anchors = [np.asarray(self.x0, dtype=np.float64).copy()]

    @property
    def current(self):
        return self.anchors[-1]

    @property
    def k(self):
        return len(self.anchors) - 1


def gamma(omega, rho):
    """Known value of ``<x* - x, P(x) - x>``: the mean of ``omega`` and ``rho``."""
    if omega < 0 or rho < 0:
        raise ValueError("omega and rho must be nonnegative")
    return 0.5 * (omega + rho)


def search_matrix(state, y):
    """``M_k = (x_0 - x_k, ..., x_{k-1} - x_k, P(x_k) - x_k)``."""
    xk = state.current
    cols = [a - xk for a in state.anchors[:-1]] + [y - xk]
    return np.column_stack(cols)


def gk_step(state, cycle_out, method="qr", rank_tol=1e-12):
    """Next iterate ``x_k + M_k s`` with ``M_k^T M_k s = (0, ..., 0, gamma_k)``.

    ``method="qr"`` factors ``M_k = QR`` and solves the two triangular
    systems ``R^T z = rhs``, ``R s = z``; ``method="eig"`` decomposes the
    Gram matrix. Either raises :class:`RankDeficiencyError` when a column
    of ``M_k`` is numerically dependent on the others.
    """
    xk = state.current
    y = np.asarray(cycle_out.y, dtype=np.float64)
    step = y - xk
    rho = float(step @ step)
    if rho == 0.0:
        raise ValueError("P(x_k) == x_k: the current iterate already solves the system")
    g = gamma(cycle_out.omega, rho)
    M = search_matrix(state, y)
    kk = M.shape[1]
    rhs = np.zeros(kk)
    rhs[-1] = g
    if method not in ("qr", "eig"):
        raise ValueError(f"unknown method {method!r}")
    if kk > M.shape[0]:
        raise RankDeficiencyError(state.k, f"{kk} search directions in dimension {M.shape[0]}")
    if method == "qr":
        _, R = np.linalg.qr(M, mode="reduced")
        diag = np.abs(np.diag(R))
        colnorm = np.linalg.norm(M, axis=0)
        bad = np.nonzero(diag <= rank_tol * colnorm)[0]
        if bad.size:
            raise RankDeficiencyError(state.k, f"column {int(bad[0])}")
        z = np.linalg.solve(R.T, rhs)
        s = np.linalg.solve(R, z)
    elif method == "eig":
        eig = sym_eig(M.T @ M)
        lam = eig.eigenvalues
        if lam[-1] <= rank_tol ** 2 * lam[0]:
            raise RankDeficiencyError(state.k, f"Gram eigenvalue ratio {lam[-1] / lam[0]:.3e}")
        Q = eig.eigenvectors
        s = Q @ ((Q.T @ rhs) / lam)
    else:
        raise ValueError(f"unknown method {method!r}")
    return xk + M @ s


def gk_solve(projectors, x0, max_iter=None, tol=1e-10, x_star=None, method="qr",
             rank_tol=1e-12, store_iterates=False):
    """Block Kaczmarz with generalized Gearhart-Koshy acceleration.

    Stops when ``rho_k <= (tol (1 + ||x_k||))^2`` (checked at every iterate,
    the last one included), after ``max_iter`` updates (default ``n``), or
    on rank deficiency, in which case the last accepted iterate is returned.
    """
    x = _check_len(x0, projectors.n).copy()
    if max_iter is None:
        max_iter = projectors.n
    sys = projectors.system
    state = AffineSearchState(x)
    trace = SolveTrace("gk", x_star=x_star)
    t0 = time.perf_counter()
    for k in range(max_iter + 1):
        x = state.current
        out = cycle(projectors, x)
        rec = make_record(k, x, out.y, out.omega, x_star, sys.A, sys.b,
                          wall_ms=1e3 * (time.perf_counter() - t0))
        if store_iterates:
            trace.iterates.append(x.copy())
        if rec.rho <= (tol * (1.0 + np.linalg.norm(x))) ** 2:
            trace.records.append(rec)
            trace.status = CONVERGED
            return x, trace
        # norm of the component of P(x_k) - x_k outside the previous search space
        if k:
            D = np.column_stack([a - state.x0 for a in state.anchors[1:]])
            Qd, _ = np.linalg.qr(D, mode="reduced")
            r = out.y - x
            r = r - Qd @ (Qd.T @ r)
            rec.qtilde_norm = float(np.linalg.norm(r - Qd @ (Qd.T @ r)))
        else:
            rec.qtilde_norm = float(np.sqrt(rec.rho))
        trace.records.append(rec)
        if k == max_iter:
            break
        try:
            x_new = gk_step(state, out, method=method, rank_tol=rank_tol)
        except RankDeficiencyError as exc:
            trace.status = BREAKDOWN
            trace.breakdown_step = exc.step
            return x, trace
        state.anchors.append(x_new)
    trace.status = MAX_ITER
    return state.current, trace
