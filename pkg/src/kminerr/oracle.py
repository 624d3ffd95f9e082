"""Brute-force references that do not share code paths with the solvers.

Krylov spaces are built from explicit power vectors, closest points from
orthogonal projection, and reference solutions from an SVD least-squares
solve.
"""
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ExplicitKrylov:
    powers: np.ndarray
    basis: np.ndarray
    ranks: list = field(default_factory=list)
    degree_d: int = 0

    def basis_k(self, k):
        """Orthonormal basis of ``K_k`` (first ``min(k, d)`` columns)."""
        return self.basis[:, :min(k, self.basis.shape[1])]


def _orthonormalize_against(v, Q, passes=2):
    for _ in range(passes):
        if Q.shape[1]:
            v = v - Q @ (Q.T @ v)
    return v


def explicit_krylov(apply_C, r0, k_max, rank_tol=1e-10, mode="power"):
    """Orthonormal bases of ``K_k(C, r_0)`` for ``k = 1..k_max``.

    ``mode="power"`` stores the normalised powers ``C^j r_0 / ||C^j r_0||``
    and orthonormalises them in order, rejecting a vector whose component
    outside the current span is below ``rank_tol``. The first rejection
    fixes ``degree_d``. ``mode="arnoldi"`` applies ``C`` to the newest
    orthonormal vector instead of the newest power; the spans agree in exact
    arithmetic but this variant is far better conditioned.
    """
    r0 = np.asarray(r0, dtype=np.float64)
    nrm = float(np.linalg.norm(r0))
    if nrm == 0.0:
        raise ValueError("r0 = 0: the starting point already solves the system")
    n = r0.shape[0]
    powers = [r0 / nrm]
    Q = np.zeros((n, 0))
    ranks = []
    degree = 0
    v = powers[0]
    for k in range(1, k_max + 1):
        if k > 1:
            src = powers[-1] if mode == "power" else Q[:, -1]
            w = apply_C(src)
            wn = float(np.linalg.norm(w))
            if wn == 0.0:
                degree = Q.shape[1]
                break
            v = w / wn
            if mode == "power":
                powers.append(v)
        resid = _orthonormalize_against(v, Q)
        rn = float(np.linalg.norm(resid))
        if rn <= rank_tol:
            degree = Q.shape[1]
            ranks.append(Q.shape[1])
            break
        Q = np.column_stack([Q, resid / rn])
        ranks.append(Q.shape[1])
        degree = Q.shape[1]
    P = np.column_stack(powers) if mode == "power" else Q.copy()
    return ExplicitKrylov(P, Q, ranks, degree)


def best_in_krylov(x0, basis, x_star):
    """Closest point to ``x_star`` in ``x0 + span(basis)`` for orthonormal columns."""
    x0 = np.asarray(x0, dtype=np.float64)
    basis = np.asarray(basis, dtype=np.float64).reshape(x0.shape[0], -1)
    if basis.shape[1] == 0:
        return x0.copy()
    return x0 + basis @ (basis.T @ (np.asarray(x_star) - x0))


def krylov_distance(x0, basis, x_star):
    return float(np.linalg.norm(best_in_krylov(x0, basis, x_star) - x_star))


def range_solution(A, b, x0=None, rcond=None):
    """The unique solution in ``x0 + R(A^T)``: ``x0 + A^+ (b - A x0)``."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    x0 = np.zeros(A.shape[1]) if x0 is None else np.asarray(x0, dtype=np.float64)
    if rcond is None:
        rcond = max(A.shape) * np.finfo(float).eps
    dx, *_ = np.linalg.lstsq(A, b - A @ x0, rcond=rcond)
    return x0 + dx


@dataclass
class RepresentationReport:
    solution: float
    iterates: float
    errors: float
    coordinates: float
    skipped: list = field(default_factory=list)
    triangular: float = 0.0

    @property
    def max_deviation(self):
        return max(self.solution, self.iterates, self.errors, self.coordinates)


def verify_abstract_representation(x0, x_star, basis, residuals, iterates=None, div_tol=1e-12):
    """Check the coordinate identities of a minimal-error Krylov method.

    With ``mu_i = <x* - x0, q_i>`` and ``u_{i,k+1} = <r_k, q_i>``:

    (i)   ``x0 + sum_{i<=d} mu_i q_i = x*``
    (ii)  ``x_k = x0 + sum_{i<=k} mu_i q_i``  (``iterates`` if given, else the
          oracle closest points)
    (iii) ``x* - x_k = sum_{i>k} mu_i q_i``
    (iv)  ``mu_{k+1} = <x* - x_k, r_k> / u_{k+1,k+1}``

    Deviations are divided by ``||x* - x0||``. Steps with
    ``|u_{k+1,k+1}| <= div_tol ||r_k||`` are skipped in (iv) and listed.
    ``triangular`` reports how far each ``r_k`` leaks outside
    ``span(q_1..q_{k+1})``, relative to ``||r_0||``.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    x_star = np.asarray(x_star, dtype=np.float64)
    Q = np.asarray(basis, dtype=np.float64).reshape(x0.shape[0], -1)
    d = Q.shape[1]
    e0 = x_star - x0
    scale = max(float(np.linalg.norm(e0)), np.finfo(float).tiny)
    mu = Q.T @ e0
    dev_i = float(np.linalg.norm(x0 + Q @ mu - x_star)) / scale
    dev_ii = dev_iii = dev_iv = tri = 0.0
    skipped = []
    r_scale = np.finfo(float).tiny
    if len(residuals):
        r_scale = max(float(np.linalg.norm(residuals[0])), r_scale)
    for k in range(d + 1):
        rep = x0 + Q[:, :k] @ mu[:k]
        xk = rep if iterates is None else np.asarray(iterates[k])
        if iterates is None:
            ref = best_in_krylov(x0, Q[:, :k], x_star)
            dev_ii = max(dev_ii, float(np.linalg.norm(rep - ref)) / scale)
        else:
            dev_ii = max(dev_ii, float(np.linalg.norm(xk - rep)) / scale)
        ek = x_star - xk
        dev_iii = max(dev_iii, float(np.linalg.norm(ek - Q[:, k:] @ mu[k:])) / scale)
        if k < d and k < len(residuals):
            rk = np.asarray(residuals[k], dtype=np.float64)
            rnorm = float(np.linalg.norm(rk))
            leak = rk - Q[:, :k + 1] @ (Q[:, :k + 1].T @ rk)
            tri = max(tri, float(np.linalg.norm(leak)) / r_scale)
            ukk = float(Q[:, k] @ rk)
            if abs(ukk) <= div_tol * rnorm:
                skipped.append(k)
                continue
            mu_pred = float(ek @ rk) / ukk
            dev_iv = max(dev_iv, abs(mu_pred - mu[k]) / scale)
    return RepresentationReport(dev_i, dev_ii, dev_iii, dev_iv, skipped, tri)
