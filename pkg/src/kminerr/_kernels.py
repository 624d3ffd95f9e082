"""Hot inner loops, compiled with numba when available.

Every kernel exists twice: a loop formulation that numba compiles in
nopython mode, and a vectorised pure-numpy formulation used when numba is
missing or ``KMINERR_DISABLE_NUMBA`` is set to a truthy value before import.
Both are importable directly (``*_loops`` / ``*_numpy``) so tests and the
benchmark can compare them in one process; the unsuffixed names are the
selected backend.
"""
import math
import os

import numpy as np

_DISABLE = os.environ.get("KMINERR_DISABLE_NUMBA", "").strip().lower() not in (
    "", "0", "false", "no")

try:
    if _DISABLE:
        raise ImportError
    from numba import njit
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f

BACKEND = "numba" if HAS_NUMBA else "numpy"

MAX_SWEEPS = 60


# ---------------------------------------------------------------------------
# cyclic Jacobi eigenvalue iteration
# ---------------------------------------------------------------------------

def _rotation(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c


_rotation_jit = njit(cache=True)(_rotation) if HAS_NUMBA else _rotation


def _jacobi_eig_loops_py(S, max_sweeps):
    n = S.shape[0]
    a = S.copy()
    v = np.eye(n)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j] * a[i, j]
    fro = math.sqrt(fro)
    sweeps = 0
    if fro == 0.0:
        return np.zeros(n), v, sweeps
    thresh = 1e-18 * fro
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                rotated = True
                c, s = _rotation_jit(a[p, p], a[q, q], apq)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
        sweeps = sweep + 1
        if not rotated:
            break
    lam = np.empty(n)
    for i in range(n):
        lam[i] = a[i, i]
    return lam, v, sweeps


jacobi_eig_loops = njit(cache=True)(_jacobi_eig_loops_py) if HAS_NUMBA else _jacobi_eig_loops_py


def jacobi_eig_numpy(S, max_sweeps):
    n = S.shape[0]
    a = np.array(S, dtype=np.float64, copy=True)
    v = np.eye(n)
    fro = float(np.sqrt(np.sum(a * a)))
    if fro == 0.0:
        return np.zeros(n), v, 0
    thresh = 1e-18 * fro
    sweeps = 0
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                rotated = True
                c, s = _rotation(a[p, p], a[q, q], apq)
                cp = a[:, p].copy()
                cq = a[:, q]
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        sweeps = sweep + 1
        if not rotated:
            break
    return np.diag(a).copy(), v, sweeps


def jacobi_eig(S, max_sweeps=MAX_SWEEPS):
    """Unsorted eigenpairs of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors, sweeps_used)``.
    """
    S = np.ascontiguousarray(S, dtype=np.float64)
    if HAS_NUMBA:
        return jacobi_eig_loops(S, max_sweeps)
    return jacobi_eig_numpy(S, max_sweeps)


# ---------------------------------------------------------------------------
# block Kaczmarz cycle
# ---------------------------------------------------------------------------

def _cycle_py(A, b, starts, Qflat, qoffs, invlam, x, compensated):
    p = starts.shape[0] - 1
    y = x.copy()
    w_sq = np.zeros(p)
    omega = 0.0
    carry = 0.0
    for j in range(p):
        r0 = starts[j]
        r1 = starts[j + 1]
        mj = r1 - r0
        Aj = A[r0:r1]
        res = b[r0:r1] - Aj @ y
        Q = Qflat[qoffs[j]:qoffs[j + 1]].reshape(mj, mj)
        z = Q.T @ res
        z = z * invlam[r0:r1]
        z = Q @ z
        d = Aj.T @ z
        y = y + d
        dsq = d @ d
        w_sq[j] = dsq
        if compensated:
            t = dsq - carry
            s = omega + t
            carry = (s - omega) - t
            omega = s
        else:
            omega += dsq
    return y, omega, w_sq


cycle_loops = njit(cache=True)(_cycle_py) if HAS_NUMBA else _cycle_py


def cycle_numpy(A, b, starts, Qflat, qoffs, invlam, x, compensated):
    return _cycle_py(A, b, starts, Qflat, qoffs, invlam, x, compensated)


def cycle(A, b, starts, Qflat, qoffs, invlam, x, compensated=False):
    """One sweep ``y = P_p(...P_1(x))`` with per-block squared update norms."""
    if HAS_NUMBA:
        return cycle_loops(A, b, starts, Qflat, qoffs, invlam, x, compensated)
    return cycle_numpy(A, b, starts, Qflat, qoffs, invlam, x, compensated)


# ---------------------------------------------------------------------------
# parallel-beam ray tracing (Siddon-style exact chord lengths)
# ---------------------------------------------------------------------------

_EPS_LEN = 1e-12


def _trace_rays_py(N, thetas, offsets):
    """Dense system matrix, one row per (angle, offset) ray, angle-major."""
    n_rays = offsets.shape[0]
    m = thetas.shape[0] * n_rays
    A = np.zeros((m, N * N))
    half = 0.5 * N
    big = 1e300
    tx = np.empty(N + 1)
    ty = np.empty(N + 1)
    for ia in range(thetas.shape[0]):
        th = thetas[ia]
        dx = math.cos(th)
        dy = math.sin(th)
        for ir in range(n_rays):
            row = ia * n_rays + ir
            s = offsets[ir]
            px = -s * dy
            py = s * dx
            # entry/exit parameters of the ray inside [-half, half]^2
            if abs(dx) > 1e-15:
                a1 = (-half - px) / dx
                a2 = (half - px) / dx
                txlo = min(a1, a2)
                txhi = max(a1, a2)
            else:
                if px <= -half or px >= half:
                    continue
                txlo = -big
                txhi = big
            if abs(dy) > 1e-15:
                b1 = (-half - py) / dy
                b2 = (half - py) / dy
                tylo = min(b1, b2)
                tyhi = max(b1, b2)
            else:
                if py <= -half or py >= half:
                    continue
                tylo = -big
                tyhi = big
            tmin = max(txlo, tylo)
            tmax = min(txhi, tyhi)
            if tmax - tmin <= _EPS_LEN:
                continue
            nx = 0
            if abs(dx) > 1e-15:
                for k in range(N + 1):
                    t = (k - half - px) / dx
                    if t > tmin and t < tmax:
                        tx[nx] = t
                        nx += 1
            ny = 0
            if abs(dy) > 1e-15:
                for k in range(N + 1):
                    t = (k - half - py) / dy
                    if t > tmin and t < tmax:
                        ty[ny] = t
                        ny += 1
            ts = np.empty(nx + ny + 2)
            ts[0] = tmin
            for k in range(nx):
                ts[1 + k] = tx[k]
            for k in range(ny):
                ts[1 + nx + k] = ty[k]
            ts[nx + ny + 1] = tmax
            ts = np.sort(ts)
            for k in range(ts.shape[0] - 1):
                length = ts[k + 1] - ts[k]
                if length <= _EPS_LEN:
                    continue
                tm = 0.5 * (ts[k] + ts[k + 1])
                ix = int(math.floor(px + tm * dx + half))
                iy = int(math.floor(py + tm * dy + half))
                if ix < 0 or ix >= N or iy < 0 or iy >= N:
                    continue
                A[row, iy * N + ix] += length
    return A


trace_rays_loops = njit(cache=True)(_trace_rays_py) if HAS_NUMBA else _trace_rays_py


def trace_rays_numpy(N, thetas, offsets):
    n_rays = offsets.shape[0]
    A = np.zeros((thetas.shape[0] * n_rays, N * N))
    half = 0.5 * N
    planes = np.arange(N + 1) - half
    for ia, th in enumerate(thetas):
        dx, dy = math.cos(th), math.sin(th)
        for ir, s in enumerate(offsets):
            px, py = -s * dy, s * dx
            lo, hi = -np.inf, np.inf
            cuts = []
            for p0, dd in ((px, dx), (py, dy)):
                if abs(dd) > 1e-15:
                    t = (planes - p0) / dd
                    lo = max(lo, t.min())
                    hi = min(hi, t.max())
                    cuts.append(t)
                elif p0 <= -half or p0 >= half:
                    lo, hi = 0.0, 0.0
            if hi - lo <= _EPS_LEN:
                continue
            ts = np.concatenate(cuts)
            ts = np.sort(np.concatenate(([lo], ts[(ts > lo) & (ts < hi)], [hi])))
            lengths = np.diff(ts)
            keep = lengths > _EPS_LEN
            tm = 0.5 * (ts[:-1] + ts[1:])[keep]
            ix = np.floor(px + tm * dx + half).astype(np.int64)
            iy = np.floor(py + tm * dy + half).astype(np.int64)
            ok = (ix >= 0) & (ix < N) & (iy >= 0) & (iy < N)
            np.add.at(A[ia * n_rays + ir], (iy * N + ix)[ok], lengths[keep][ok])
    return A


def trace_rays(N, thetas, offsets):
    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.float64)
    if HAS_NUMBA:
        return trace_rays_loops(int(N), thetas, offsets)
    return trace_rays_numpy(int(N), thetas, offsets)
