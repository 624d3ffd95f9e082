"""Row-block partitions of a consistent system ``Ax = b`` and their projectors."""
from dataclasses import dataclass, field

import numpy as np

from .numerics import DimensionError, SymEig, default_rank_tol, inverse_eigenvalues, sym_eig


@dataclass(frozen=True)
class PartitionedSystem:
    """``A`` and ``b`` split into contiguous row blocks.

    ``block_ranges`` holds half-open ``(start, stop)`` row ranges, in order,
    covering ``0..m`` exactly.
    """

    A: np.ndarray
    b: np.ndarray
    block_ranges: tuple

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise DimensionError(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
        ranges = tuple((int(lo), int(hi)) for lo, hi in self.block_ranges)
        expect = 0
        for lo, hi in ranges:
            if lo != expect or hi <= lo:
                raise ValueError(f"invalid block ranges {ranges} for {A.shape[0]} rows")
            expect = hi
        if expect != A.shape[0]:
            raise ValueError(f"block ranges {ranges} do not cover {A.shape[0]} rows")
        object.__setattr__(self, "A", np.ascontiguousarray(A))
        object.__setattr__(self, "b", np.ascontiguousarray(b))
        object.__setattr__(self, "block_ranges", ranges)

    @property
    def shape(self):
        return self.A.shape

    @property
    def n_blocks(self):
        return len(self.block_ranges)

    def block(self, j):
        lo, hi = self.block_ranges[j]
        return self.A[lo:hi], self.b[lo:hi]

    def blocks(self):
        return [self.block(j) for j in range(self.n_blocks)]


def partition_uniform(A, b, block_size):
    """Split rows into consecutive blocks of ``block_size`` (last may be short)."""
    if block_size < 1:
        raise ValueError("block_size must be >= 1")
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if A.shape[0] != b.shape[0]:
        raise DimensionError(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
    m = A.shape[0]
    ranges = [(lo, min(lo + block_size, m)) for lo in range(0, m, block_size)]
    return PartitionedSystem(A, b, tuple(ranges))


def symmetric_expand(sys):
    """Palindromic block sequence ``(B_1, ..., B_p, ..., B_1)`` of ``2p - 1`` blocks."""
    order = list(range(sys.n_blocks)) + list(range(sys.n_blocks - 2, -1, -1))
    pieces_A, pieces_b, ranges = [], [], []
    row = 0
    for j in order:
        Aj, bj = sys.block(j)
        pieces_A.append(Aj)
        pieces_b.append(bj)
        ranges.append((row, row + Aj.shape[0]))
        row += Aj.shape[0]
    return PartitionedSystem(np.vstack(pieces_A), np.concatenate(pieces_b), tuple(ranges))


@dataclass(frozen=True)
class BlockProjector:
    """Orthogonal projector onto ``{z : A_j z = b_j}`` via the eigenpairs of ``A_j A_j^T``."""

    A_j: np.ndarray
    b_j: np.ndarray
    gram_eig: SymEig
    rank_tol: float
    inv_eigenvalues: np.ndarray = field(repr=False)

    def pseudo_apply(self, v):
        Q = self.gram_eig.eigenvectors
        return Q @ (self.inv_eigenvalues * (Q.T @ v))


def make_projector(A_j, b_j, rank_tol=None):
    A_j = np.ascontiguousarray(np.atleast_2d(A_j), dtype=np.float64)
    b_j = np.ascontiguousarray(b_j, dtype=np.float64).reshape(-1)
    if rank_tol is None:
        rank_tol = default_rank_tol(*A_j.shape)
    eig = sym_eig(A_j @ A_j.T)
    lam = eig.eigenvalues.copy()
    # Gram matrices are PSD; negative values are rounding noise
    lam[lam < 0.0] = 0.0
    eig = SymEig(lam, eig.eigenvectors)
    return BlockProjector(A_j, b_j, eig, rank_tol, inverse_eigenvalues(eig, rank_tol))


def build_projectors(sys, rank_tol=None):
    """One :class:`BlockProjector` per block of ``sys``."""
    return ProjectorSet(sys, [make_projector(Aj, bj, rank_tol) for Aj, bj in sys.blocks()])


class ProjectorSet(list):
    """List of block projectors plus the packed arrays the cycle kernel reads."""

    def __init__(self, sys, projectors):
        super().__init__(projectors)
        self.system = sys
        self.n = sys.A.shape[1]
        self.starts = np.array([lo for lo, _ in sys.block_ranges] + [sys.A.shape[0]],
                               dtype=np.int64)
        qs = [np.ascontiguousarray(p.gram_eig.eigenvectors).ravel() for p in projectors]
        self.qoffs = np.concatenate(([0], np.cumsum([q.size for q in qs]))).astype(np.int64)
        self.Qflat = np.ascontiguousarray(np.concatenate(qs)) if qs else np.zeros(0)
        self.invlam = np.ascontiguousarray(np.concatenate([p.inv_eigenvalues for p in projectors]))

    def with_rhs(self, b):
        """Same matrix and factorisations, different right-hand side."""
        b = np.asarray(b, dtype=np.float64).reshape(-1)
        sys = PartitionedSystem(self.system.A, b, self.system.block_ranges)
        projs = [BlockProjector(p.A_j, b[lo:hi].copy(), p.gram_eig, p.rank_tol, p.inv_eigenvalues)
                 for p, (lo, hi) in zip(self, sys.block_ranges)]
        return ProjectorSet(sys, projs)
