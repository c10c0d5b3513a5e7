"""HPCG problem generation: 27-point stencil, right-hand side, injection
operators and the multigrid level hierarchy."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .algebra import IndexMask, SparseMatrix, from_coo, vector
from .coloring import Coloring, greedy_color

DIAGONAL_VALUE = 26.0
OFFDIAGONAL_VALUE = -1.0


@dataclass(frozen=True)
class GridDims:
    nx: int
    ny: int
    nz: int

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            v = getattr(self, name)
            if int(v) != v or v < 2:
                raise ValueError(f"{name}={v}: grid dimensions must be integers >= 2")

    @property
    def n(self) -> int:
        return self.nx * self.ny * self.nz

    def as_tuple(self):
        return (self.nx, self.ny, self.nz)

    def coarsened(self) -> "GridDims":
        for name, v in zip(("nx", "ny", "nz"), self.as_tuple()):
            if v % 2:
                raise ValueError(f"{name}={v} is odd and cannot be coarsened")
        return GridDims(self.nx // 2, self.ny // 2, self.nz // 2)


def linearize(dims: GridDims, ix: int, iy: int, iz: int) -> int:
    """Index of grid point ``(ix, iy, iz)``; x varies fastest."""
    for name, c, n in (("ix", ix, dims.nx), ("iy", iy, dims.ny), ("iz", iz, dims.nz)):
        if not 0 <= c < n:
            raise ValueError(f"{name}={c} outside [0, {n})")
    return ix + dims.nx * (iy + dims.ny * iz)


def _coords(shape):
    nx, ny, nz = shape
    iz, iy, ix = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx), indexing="ij")
    return ix.ravel(), iy.ravel(), iz.ravel()


def build_matrix(dims: GridDims) -> SparseMatrix:
    """Assemble the 27-point operator: 26 on the diagonal, -1 for every
    in-grid neighbour of the 3x3x3 box around each point."""
    nx, ny, nz = dims.as_tuple()
    ix, iy, iz = _coords(dims.as_tuple())
    row_ids = np.arange(dims.n, dtype=np.int64)
    rows, cols, vals = [], [], []
    for dz, dy, dx in itertools.product((-1, 0, 1), repeat=3):
        jx, jy, jz = ix + dx, iy + dy, iz + dz
        ok = (jx >= 0) & (jx < nx) & (jy >= 0) & (jy < ny) & (jz >= 0) & (jz < nz)
        rows.append(row_ids[ok])
        cols.append((jx + nx * (jy + ny * jz))[ok])
        v = DIAGONAL_VALUE if (dx, dy, dz) == (0, 0, 0) else OFFDIAGONAL_VALUE
        vals.append(np.full(int(ok.sum()), v))
    return from_coo(dims.n, dims.n, np.concatenate(rows), np.concatenate(cols),
                    np.concatenate(vals))


def stencil_nnz(dims: GridDims) -> int:
    """Closed-form nonzero count of :func:`build_matrix`."""
    return (3 * dims.nx - 2) * (3 * dims.ny - 2) * (3 * dims.nz - 2)


def build_rhs(dims: GridDims) -> np.ndarray:
    return vector(dims.n, 1.0)


def extract_diagonal(A: SparseMatrix) -> np.ndarray:
    if A.nrows != A.ncols:
        raise ValueError(f"matrix is {A.nrows}x{A.ncols}, not square")
    d = vector(A.nrows)
    rows = A.row_of_entries()
    on_diag = rows == A.col_indices
    present = np.zeros(A.nrows, dtype=bool)
    present[rows[on_diag]] = True
    d[rows[on_diag]] = A.values[on_diag]
    bad = np.flatnonzero(~present | (d == 0.0))
    if bad.size:
        raise ValueError(f"row {bad[0]} has no nonzero stored diagonal")
    return d


def build_restriction(fine: GridDims) -> SparseMatrix:
    """Straight-injection operator of shape ``(n/8, n)``.

    Coarse point ``(cx, cy, cz)`` takes the fine value at ``(2cx, 2cy, 2cz)``.
    """
    nx, ny, nz = fine.as_tuple()
    for name, v in zip(("nx", "ny", "nz"), (nx, ny, nz)):
        if v % 2:
            raise ValueError(f"{name}={v} is odd; restriction needs even dimensions")
    coarse = (nx // 2, ny // 2, nz // 2)
    cx, cy, cz = _coords(coarse)
    nc = coarse[0] * coarse[1] * coarse[2]
    fine_idx = 2 * cx + nx * (2 * cy + ny * 2 * cz)
    return from_coo(nc, fine.n, np.arange(nc), fine_idx, np.ones(nc))


@dataclass(eq=False)
class ProblemLevel:
    """One multigrid level.

    Holds the operator, its diagonal, the color masks and, unless this is the
    coarsest level, the injection operator ``R`` to the next level together
    with the workspaces the V-cycle needs (``f``, ``r_c``, ``z_c``).
    """

    A: SparseMatrix
    A_diag: np.ndarray
    colors: list
    dims: GridDims | None = None
    R: SparseMatrix | None = None
    coarser: "ProblemLevel | None" = None
    depth: int = 0
    s: np.ndarray = field(default=None, repr=False)
    f: np.ndarray = field(default=None, repr=False)
    r_c: np.ndarray | None = field(default=None, repr=False)
    z_c: np.ndarray | None = field(default=None, repr=False)
    injected: IndexMask | None = field(default=None, repr=False)

    def __post_init__(self):
        n = self.A.nrows
        if self.A.ncols != n:
            raise ValueError("level operator must be square")
        if (self.R is None) != (self.coarser is None):
            raise ValueError("R must be present exactly when a coarser level exists")
        self.s = vector(n)
        self.f = vector(n)
        if self.R is not None:
            if self.R.shape != (self.coarser.n, n):
                raise ValueError(f"R has shape {self.R.shape}, expected {(self.coarser.n, n)}")
            self.r_c = vector(self.coarser.n)
            self.z_c = vector(self.coarser.n)
            self.injected = IndexMask.from_indices(n, np.unique(self.R.col_indices))

    @property
    def n(self) -> int:
        return self.A.nrows

    @property
    def num_levels(self) -> int:
        return 1 + (self.coarser.num_levels if self.coarser is not None else 0)

    def levels(self):
        lvl = self
        while lvl is not None:
            yield lvl
            lvl = lvl.coarser


def make_level(A: SparseMatrix, coloring: Coloring | None = None, **kwargs) -> ProblemLevel:
    """Wrap an arbitrary square matrix as a single (or linked) level."""
    if coloring is None:
        coloring = greedy_color(A)
    return ProblemLevel(A=A, A_diag=extract_diagonal(A), colors=list(coloring.masks), **kwargs)


def build_hierarchy(dims: GridDims, levels: int = 4) -> ProblemLevel:
    """Build ``levels`` nested problems, each grid halved in every dimension.

    Returns the finest level; follow ``.coarser`` to walk the chain.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    factor = 2 ** (levels - 1)
    for name, v in zip(("nx", "ny", "nz"), dims.as_tuple()):
        if v % factor:
            raise ValueError(f"{name}={v} is not divisible by 2**{levels - 1}={factor} "
                             f"required for {levels} levels")
        if v // factor < 2:
            raise ValueError(f"{name}={v} is too small for {levels} levels "
                             f"(coarsest grid would have {v // factor} points)")
    chain = [dims]
    for _ in range(levels - 1):
        chain.append(chain[-1].coarsened())

    coarser = None
    for depth in range(levels - 1, -1, -1):
        d = chain[depth]
        R = build_restriction(d) if coarser is not None else None
        coarser = make_level(build_matrix(d), dims=d, R=R, coarser=coarser, depth=depth)
    return coarser
