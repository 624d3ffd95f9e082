"""Gram-Schmidt based minimal-error Krylov method preconditioned by block Kaczmarz.

The iterate ``x_k`` is the point of ``x_0 + K_k(C, r_0)`` closest to the
solution in the Euclidean norm. The update coefficient along each new
orthonormal direction is known because ``<x* - x_k, r_k>`` equals the mean
of ``omega_k`` and ``rho_k``.
"""
import time
from dataclasses import dataclass, field

import numpy as np

from .sweep import _check_len, cycle
from .trace import BREAKDOWN, CONVERGED, MAX_ITER, SolveTrace, make_record


@dataclass
class KrylovBasis:
    """Orthonormal directions ``q_1..q_k`` and the applied coefficients.

    ``coeffs[j]`` is ``nu_{j+1} * gamma_{j+1}`` and ``gammas[j]`` is
    ``gamma_{j+1}``, so ``x_k = x_0 + sum_j coeffs[j] q_{j+1}``.
    """

    n: int
    capacity: int = 16
    Q: np.ndarray = field(default=None, repr=False)
    coeffs: list = field(default_factory=list)
    gammas: list = field(default_factory=list)

    def __post_init__(self):
        if self.Q is None:
            self.Q = np.zeros((self.n, max(1, self.capacity)))

    @property
    def k(self):
        return len(self.coeffs)

    @property
    def vectors(self):
        return self.Q[:, :self.k]

    def append(self, q, coeff, gamma):
        if self.k == self.Q.shape[1]:
            grown = np.zeros((self.n, 2 * self.Q.shape[1]))
            grown[:, :self.k] = self.Q[:, :self.k]
            self.Q = grown
        self.Q[:, self.k] = q
        self.coeffs.append(float(coeff))
        self.gammas.append(float(gamma))

    def reconstruct(self, x0, k=None):
        k = self.k if k is None else k
        return x0 + self.Q[:, :k] @ np.asarray(self.coeffs[:k])


@dataclass
class StepResult:
    """Outcome of one step: ``status`` is ``"step"``, ``converged`` or ``breakdown``."""

    status: str
    x: np.ndarray
    rho: float
    omega: float
    gamma: float
    qtilde_norm: float
    y: np.ndarray


def orthogonalize(r, Q, reorth=True):
    """Classical Gram-Schmidt of ``r`` against the columns of ``Q``; one
    repeated pass when ``reorth`` (CGS2)."""
    if Q.shape[1] == 0:
        return r.copy()
    q = r - Q @ (Q.T @ r)
    if reorth:
        q = q - Q @ (Q.T @ q)
    return q


def minerr_step(projectors, x, basis, tol=1e-10, reorth=True, breakdown_tol=1e-12):
    """Cycle at ``x``, then either stop or extend the basis and update ``x``.

    The basis is modified in place only when a step is taken.
    """
    out = cycle(projectors, x)
    r = out.y - x
    rho = float(r @ r)
    g = 0.5 * (out.omega + rho)
    qt = orthogonalize(r, basis.vectors, reorth)
    qn = float(np.linalg.norm(qt))
    if rho <= (tol * (1.0 + np.linalg.norm(x))) ** 2:
        return StepResult(CONVERGED, x, rho, out.omega, g, qn, out.y)
    if qn <= breakdown_tol * np.sqrt(rho):
        return StepResult(BREAKDOWN, x, rho, out.omega, g, qn, out.y)
    nu = 1.0 / qn
    q = nu * qt
    coeff = nu * g
    basis.append(q, coeff, g)
    return StepResult("step", x + coeff * q, rho, out.omega, g, qn, out.y)


def minerr_solve(projectors, x0, max_iter=None, tol=1e-10, x_star=None, reorth=True,
                 breakdown_tol=1e-12, store_iterates=False):
    """Run the minimal-error iteration from ``x0``.

    Parameters
    ----------
    projectors : ProjectorSet
    x0 : ndarray
    max_iter : int, optional
        Number of updates; defaults to ``n``.
    tol : float
        Stop when ``rho_k <= (tol (1 + ||x_k||))^2``.
    x_star : ndarray, optional
        Reference solution, used only to fill ``true_error`` in the trace.
    reorth : bool
        CGS2 when true; ``False`` is the plain single-pass classical
        Gram-Schmidt that loses orthogonality near the solution.

    Returns
    -------
    x, trace, basis
    """
    x = _check_len(x0, projectors.n).copy()
    x_init = x.copy()
    if max_iter is None:
        max_iter = projectors.n
    sys = projectors.system
    basis = KrylovBasis(projectors.n, capacity=min(max_iter, projectors.n) + 1)
    trace = SolveTrace("minerr", x_star=x_star)
    t0 = time.perf_counter()
    for k in range(max_iter + 1):
        if store_iterates:
            trace.iterates.append(x.copy())
        if k == max_iter:
            # final check only: no further update is allowed
            out = cycle(projectors, x)
            qt = orthogonalize(out.y - x, basis.vectors, reorth)
            rec = make_record(k, x, out.y, out.omega, x_star, sys.A, sys.b,
                              qtilde_norm=np.linalg.norm(qt),
                              wall_ms=1e3 * (time.perf_counter() - t0))
            trace.records.append(rec)
            if rec.rho <= (tol * (1.0 + np.linalg.norm(x))) ** 2:
                trace.status = CONVERGED
            else:
                trace.status = MAX_ITER
            break
        res = minerr_step(projectors, x, basis, tol, reorth, breakdown_tol)
        rec = make_record(k, x, res.y, res.omega, x_star, sys.A, sys.b,
                          qtilde_norm=res.qtilde_norm,
                          wall_ms=1e3 * (time.perf_counter() - t0))
        trace.records.append(rec)
        if res.status == CONVERGED:
            trace.status = CONVERGED
            break
        if res.status == BREAKDOWN:
            trace.status = BREAKDOWN
            trace.breakdown_step = k
            break
        x = res.x
    trace.x0 = x_init
    return x, trace, basis


def heuristic_best(trace, basis, x0):
    """Truncate at the step with the smallest ``gamma``.

    Returns ``(x_opt, k_opt)`` where ``k_opt`` is 1-based over the completed
    steps (first minimiser on ties) and ``x_opt`` is rebuilt from the
    coefficients that were actually applied.
    """
    if len(trace) == 0 or basis.k == 0:
        raise ValueError("heuristic_best needs at least one completed step")
    gam = np.asarray(basis.gammas)
    k_opt = int(np.argmin(gam)) + 1
    return basis.reconstruct(np.asarray(x0, dtype=np.float64), k_opt), k_opt
