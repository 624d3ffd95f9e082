"""Dense affine form ``P(x) = T x + g`` of a Kaczmarz cycle and its spectral diagnostics."""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import DimensionError, orthonormal_range_basis, sym_eig
from .sweep import _check_len, cycle, cycle_many

ASSEMBLY_LIMIT = 4096
_CHUNK = 256


class AssemblyTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class AffineOperator:
    T: np.ndarray
    g: np.ndarray
    C: np.ndarray

    @property
    def n(self):
        return self.g.shape[0]

    def apply(self, x):
        return self.T @ x + self.g


@dataclass(frozen=True)
class SpectralReport:
    t2_norm: float
    kappa: float
    quasi_opt_factor: float
    c2_symmetric: bool
    c2_asymmetry: float
    c2_eigenvalues: np.ndarray = None
    rank: int = 0


def quasi_opt_factor(t2_norm):
    """``(1 + ||T||) / (1 - ||T||)``; infinite when ``||T|| >= 1``.

    Evaluated in rational arithmetic on the shortest decimal form of the
    input, so ``quasi_opt_factor(0.9) == 19.0``; plain floating point gives
    ``18.999999999999996`` there.
    """
    if t2_norm >= 1.0:
        return float("inf")
    t = Fraction(repr(float(t2_norm)))
    return float((1 + t) / (1 - t))


def assemble(projectors, n=None, allow_large=False):
    """Probe the cycle with ``0`` and the unit vectors: ``g = P(0)``, ``T e_i = P(e_i) - g``.

    Columns are probed in chunks through :func:`cycle_many`; each column is
    written to its own slot so the result does not depend on chunking.
    """
    if n is None:
        n = projectors.n
    if n != projectors.n:
        raise DimensionError(f"n = {n} does not match the system with {projectors.n} columns")
    if n > ASSEMBLY_LIMIT and not allow_large:
        raise AssemblyTooLarge(f"dense assembly of an {n}x{n} operator exceeds the limit "
                               f"{ASSEMBLY_LIMIT}; pass allow_large=True to override")
    g = cycle(projectors, np.zeros(n)).y
    T = np.empty((n, n))
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        E = np.zeros((n, hi - lo))
        E[np.arange(lo, hi), np.arange(hi - lo)] = 1.0
        T[:, lo:hi] = cycle_many(projectors, E) - g[:, None]
    C = np.eye(n) - T
    return AffineOperator(T, g, C)


def apply_C(op_or_projectors, v):
    """``C v``: dense product for an :class:`AffineOperator`, otherwise the
    matrix-free form ``v - P(v) + P(0)``."""
    if isinstance(op_or_projectors, AffineOperator):
        v = _check_len(v, op_or_projectors.n)
        return op_or_projectors.C @ v
    projs = op_or_projectors
    v = _check_len(v, projs.n)
    g = getattr(projs, "_g_cache", None)
    if g is None:
        g = cycle(projs, np.zeros(projs.n)).y
        projs._g_cache = g
    return v - cycle(projs, v).y + g


def matrix_free_C(projectors):
    """Closure ``v -> C v`` with ``P(0)`` computed once."""
    g = cycle(projectors, np.zeros(projectors.n)).y

    def apply(v):
        return v - cycle(projectors, v).y + g

    apply.g = g
    return apply


def spectral_report(op, A, rank_tol=None, sym_tol=1e-8):
    """Norm of ``T`` restricted to R(A^T) and, if symmetric there, the condition of ``C``.

    With ``B`` an orthonormal basis of R(A^T), ``T_2 = B^T T B`` and
    ``C_2 = B^T C B``. ``t2_norm`` is the largest singular value of ``T_2``
    taken from the eigenvalues of ``T_2^T T_2``. ``kappa`` is reported only
    when ``C_2`` is symmetric to ``sym_tol`` (relative to its largest entry).
    """
    B = orthonormal_range_basis(A, rank_tol)
    r = B.shape[1]
    if r == 0:
        return SpectralReport(0.0, float("nan"), 1.0, True, 0.0, np.zeros(0), 0)
    T2 = B.T @ op.T @ B
    C2 = B.T @ op.C @ B
    gram = T2.T @ T2
    lam = sym_eig(0.5 * (gram + gram.T)).eigenvalues
    t2 = float(np.sqrt(max(lam[0], 0.0)))
    scale = max(float(np.max(np.abs(C2))), np.finfo(float).tiny)
    asym = float(np.max(np.abs(C2 - C2.T))) / scale
    symmetric = asym <= sym_tol
    kappa = float("nan")
    ev = None
    if symmetric:
        ev = sym_eig(0.5 * (C2 + C2.T)).eigenvalues
        if ev[-1] > 0:
            kappa = float(ev[0] / ev[-1])
        else:
            kappa = float("inf")
    return SpectralReport(t2, kappa, quasi_opt_factor(t2), bool(symmetric), asym, ev, r)


def cg_bound(kappa, k, e0_norm=1.0):
    """``2 ((sqrt(kappa) - 1) / (sqrt(kappa) + 1))^k ||e_0||``."""
    sk = np.sqrt(kappa)
    return 2.0 * ((sk - 1.0) / (sk + 1.0)) ** np.asarray(k, dtype=np.float64) * e0_norm
