"""HPCG on a small GraphBLAS-style sparse core."""

from .algebra import (
    PLUS_TIMES,
    ArithmeticSemiring,
    Descriptor,
    IndexMask,
    SparseMatrix,
    apply_masked,
    build_from_triplets,
    dot,
    mxv,
    set_all,
    set_num_threads,
    transpose_explicit,
    vector,
    waxpby,
    work_counter,
)
from .bench import BenchConfig, Report, run_benchmark, symmetry_test
from .cg import CGBreakdown, CGConfig, CGResult, cg_solve, residual_norm
from .coloring import Coloring, greedy_color, validate_coloring
from .cost_model import (
    NodeGrid,
    blockcyclic_comm_volume,
    compare_distributions,
    factor_nodes,
    halo_volume,
)
from .multigrid import KernelTimer, mg_vcycle, refine_and_add, restrict_vector
from .problem import (
    GridDims,
    ProblemLevel,
    build_hierarchy,
    build_matrix,
    build_restriction,
    build_rhs,
    extract_diagonal,
    linearize,
    make_level,
)
from .smoother import SmootherConfig, rbgs_backward, rbgs_forward, rbgs_symmetric

__version__ = "0.1.0"
