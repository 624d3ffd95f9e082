"""Generators for consistent test systems.

Every generator returns ``(A, b, x_star)`` with ``b = A @ x_star``.
"""
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .rng import SplitMix64

KINDS = ("random", "rank_deficient", "tomography", "file")
_DIMS = {"random": 2, "rank_deficient": 3, "tomography": 3, "file": 0}


@dataclass(frozen=True)
class ProblemSpec:
    """``dims`` is ``(m, n)``, ``(m, n, rank)`` or ``(N, n_angles, n_rays)``
    depending on ``kind``; ``noise`` must be zero."""

    kind: str
    dims: tuple
    seed: int = 0
    noise: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}; expected one of {KINDS}")
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != _DIMS[self.kind] or any(d < 1 for d in dims):
            raise ValueError(f"{self.kind} needs {_DIMS[self.kind]} positive dims, got {dims}")
        if self.noise != 0:
            raise ValueError("noise must be zero: only consistent systems are supported")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "seed", int(self.seed))

    def to_json(self):
        d = asdict(self)
        d["dims"] = list(self.dims)
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        extra = set(d) - {"kind", "dims", "seed", "noise"}
        if extra:
            raise ValueError(f"unknown ProblemSpec fields {sorted(extra)}")
        return cls(d["kind"], tuple(d["dims"]), d.get("seed", 0), d.get("noise", 0.0))

    def generate(self):
        if self.kind == "random":
            return gen_random(*self.dims, seed=self.seed)
        if self.kind == "rank_deficient":
            return gen_rank_deficient(*self.dims, seed=self.seed)
        if self.kind == "tomography":
            return gen_tomography(*self.dims, seed=self.seed)
        raise ValueError("file problems are loaded, not generated")


def gen_random(m, n, seed=0):
    """Gaussian ``A`` (row-major draw order) and ``x_star``; ``b = A x_star``."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    rng = SplitMix64(seed)
    A = rng.normal(m * n).reshape(m, n)
    x_star = rng.normal(n)
    return A, A @ x_star, x_star


def gen_rank_deficient(m, n, rank, seed=0):
    """``A = F G`` with Gaussian ``F`` (m x rank) and ``G`` (rank x n).

    The returned solution is the one in ``R(A^T) = R(G^T)``, i.e. the target
    of every Kaczmarz-type method started at ``x0 = 0``.
    """
    if not 1 <= rank < min(m, n):
        raise ValueError(f"rank must satisfy 1 <= rank < min(m, n), got {rank}")
    rng = SplitMix64(seed)
    F = rng.normal(m * rank).reshape(m, rank)
    G = rng.normal(rank * n).reshape(rank, n)
    x_any = rng.normal(n)
    x_star = G.T @ np.linalg.solve(G @ G.T, G @ x_any)
    A = F @ G
    return A, A @ x_star, x_star


def ray_geometry(N, n_angles, n_rays):
    """Angles uniform in [0, pi) and detector offsets spanning the grid diagonal."""
    thetas = np.pi * np.arange(n_angles) / n_angles
    width = math.sqrt(2.0) * N
    offsets = (np.arange(n_rays) + 0.5 - 0.5 * n_rays) * (width / n_rays)
    return thetas, offsets


def ray_matrix(N, thetas, offsets):
    """Chord lengths of parallel rays through an ``N x N`` unit-pixel grid.

    Row ``a * len(offsets) + r`` is the ray with direction
    ``(cos theta_a, sin theta_a)`` passing through ``offsets[r] * (-sin, cos)``;
    the grid is centred at the origin and pixel ``(ix, iy)`` maps to column
    ``iy * N + ix``.
    """
    return _kernels.trace_rays(N, np.atleast_1d(thetas), np.atleast_1d(offsets))


def disk_phantom(N, radius=None, supersample=8):
    """Centred disk of intensity 1, each pixel weighted by its covered area."""
    if radius is None:
        radius = 0.35 * N
    sub = (np.arange(supersample) + 0.5) / supersample
    coords = (np.arange(N)[:, None] + sub[None, :]).ravel() - 0.5 * N
    X, Y = np.meshgrid(coords, coords)
    inside = (X * X + Y * Y <= radius * radius).astype(np.float64)
    return inside.reshape(N, supersample, N, supersample).mean(axis=(1, 3)).ravel()


def gen_tomography(N, n_angles, n_rays, seed=0):
    """Parallel-beam tomography system on an ``N x N`` grid.

    Rays missing the grid are dropped. The geometry and phantom are fully
    determined by ``(N, n_angles, n_rays)``; ``seed`` is accepted so every
    generator shares one signature.
    """
    if N < 4:
        raise ValueError("N must be at least 4")
    thetas, offsets = ray_geometry(N, n_angles, n_rays)
    A = ray_matrix(N, thetas, offsets)
    A = np.ascontiguousarray(A[A.sum(axis=1) > 1e-12])
    x_star = disk_phantom(N)
    return A, A @ x_star, x_star
