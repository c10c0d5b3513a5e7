"""Analytic BSP cost model for one ``mxv`` of the HPCG operator.

Compares the geometric 3D block distribution (face halos only) with the 1D
block-cyclic row distribution that needs the whole input vector on every
node.  Nothing is simulated; all numbers come from closed-form expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .problem import GridDims, stencil_nnz


@dataclass(frozen=True)
class NodeGrid:
    px: int
    py: int
    pz: int

    def __post_init__(self):
        if min(self.px, self.py, self.pz) < 1:
            raise ValueError("node grid extents must be >= 1")

    @property
    def p(self) -> int:
        return self.px * self.py * self.pz

    def as_tuple(self):
        return (self.px, self.py, self.pz)


@dataclass(frozen=True)
class CostBreakdown:
    """Per-node, per-``mxv`` costs.

    ``raw_communication`` keeps the unadjusted formula value when
    ``communication`` had to be zeroed (a single node has no neighbours).
    """

    computation: float
    communication: float
    synchronization: int
    raw_communication: float | None = None
    has_neighbors: bool = True


def _local_extents(dims: GridDims, grid: NodeGrid):
    out = []
    for name, n, p in zip("xyz", dims.as_tuple(), grid.as_tuple()):
        if n % p:
            raise ValueError(f"n_{name}={n} not divisible by p_{name}={p}")
        out.append(n // p)
    return out


def halo_volume(dims: GridDims, grid: NodeGrid) -> int:
    """``2 (sx sy + sy sz + sx sz)`` with ``s_d = n_d / p_d``."""
    sx, sy, sz = _local_extents(dims, grid)
    return 2 * (sx * sy + sy * sz + sx * sz)


def _triples(p):
    for px in range(1, p + 1):
        if p % px:
            continue
        for py in range(1, p // px + 1):
            if (p // px) % py:
                continue
            yield px, py, p // (px * py)


def factor_nodes(p: int, dims: GridDims) -> NodeGrid:
    """Exhaustive search for the node grid with the smallest halo.

    Ties prefer the most cubic local block (smallest largest extent), then the
    lexicographically smallest ``(px, py, pz)``.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    best = None
    for t in _triples(p):
        if any(n % q for n, q in zip(dims.as_tuple(), t)):
            continue
        g = NodeGrid(*t)
        key = (halo_volume(dims, g), max(_local_extents(dims, g)), t)
        if best is None or key < best[0]:
            best = (key, g)
    if best is None:
        raise ValueError(f"no factorization of p={p} divides grid {dims.as_tuple()}")
    return best[1]


def blockcyclic_comm_volume(n: int, p: int) -> int:
    """Values a node receives to hold the full vector: ``ceil(n (p-1) / p)``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return -(-n * (p - 1) // p)


def twod_comm_volume(n: int, p: int) -> float:
    """2D matrix distribution: ``n/p (sqrt(p) - 1)``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return n / p * (math.sqrt(p) - 1)


@dataclass(frozen=True)
class DistributionComparison:
    p: int
    grid: NodeGrid
    geometric: CostBreakdown
    blockcyclic: CostBreakdown
    twod_communication: float


def compare_distributions(dims: GridDims, p: int) -> DistributionComparison:
    grid = factor_nodes(p, dims)
    work = stencil_nnz(dims) / p
    h = halo_volume(dims, grid)
    alone = grid.p == 1
    geometric = CostBreakdown(work, 0.0 if alone else float(h), 1,
                              raw_communication=float(h), has_neighbors=not alone)
    blockcyclic = CostBreakdown(work, float(blockcyclic_comm_volume(dims.n, p)), 1,
                                has_neighbors=not alone)
    return DistributionComparison(p, grid, geometric, blockcyclic, twod_comm_volume(dims.n, p))
