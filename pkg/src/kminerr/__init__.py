"""Block Kaczmarz solvers, generalized Gearhart-Koshy acceleration and the
minimal-error Krylov method it is equivalent to."""
from ._kernels import BACKEND
from .accel import RankDeficiencyError, gk_solve, gk_step
from .gmres import gmres_solve
from .minerr import KrylovBasis, heuristic_best, minerr_solve, minerr_step
from .numerics import SymEig, orthonormal_range_basis, pseudo_apply, sym_eig
from .operator import AffineOperator, apply_C, assemble, matrix_free_C, spectral_report
from .problems import ProblemSpec, gen_random, gen_rank_deficient, gen_tomography
from .sweep import CycleOutcome, apply_block, cycle, iterate_fixed_point
from .system import PartitionedSystem, build_projectors, partition_uniform, symmetric_expand
from .trace import SolveTrace

__version__ = "0.1.0"
