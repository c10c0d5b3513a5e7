"""Greedy distance-1 coloring of a matrix's adjacency structure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import IndexMask, SparseMatrix, transpose_explicit


@dataclass(frozen=True)
class Coloring:
    num_colors: int
    masks: tuple
    color_of: np.ndarray


@dataclass(frozen=True)
class ColoringVerdict:
    valid: bool
    reason: str = ""
    edge: tuple | None = None

    def __bool__(self):
        return self.valid


def _symmetric_adjacency(A):
    At = transpose_explicit(A)
    rows = np.concatenate([A.row_of_entries(), At.row_of_entries()])
    cols = np.concatenate([A.col_indices, At.col_indices])
    keep = rows != cols
    rows, cols = rows[keep], cols[keep]
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    uniq = np.ones(rows.size, dtype=bool)
    uniq[1:] = (np.diff(rows) != 0) | (np.diff(cols) != 0)
    rows, cols = rows[uniq], cols[uniq]
    offsets = np.zeros(A.nrows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=A.nrows), out=offsets[1:])
    return offsets, cols


def greedy_color(A: SparseMatrix) -> Coloring:
    """Color rows in increasing index order with the smallest color unused by
    any already-colored neighbor.

    Neighbors are taken from the union of the patterns of ``A`` and ``A^T``;
    diagonal entries are ignored.
    """
    if A.nrows != A.ncols:
        raise ValueError("coloring needs a square matrix")
    n = A.nrows
    offsets, adj = _symmetric_adjacency(A)
    color = np.full(n, -1, dtype=np.int64)
    offsets_l = offsets.tolist()
    adj_l = adj.tolist()
    color_l = [-1] * n
    for i in range(n):
        used = {color_l[j] for j in adj_l[offsets_l[i]:offsets_l[i + 1]]}
        c = 0
        while c in used:
            c += 1
        color_l[i] = c
    color[:] = color_l
    num = int(color.max()) + 1 if n else 0
    masks = tuple(IndexMask(n, np.flatnonzero(color == k)) for k in range(num))
    return Coloring(num, masks, color)


def validate_coloring(A: SparseMatrix, coloring: Coloring) -> ColoringVerdict:
    """Check that the masks partition the rows and no stored off-diagonal
    entry joins two rows of the same color."""
    n = A.nrows
    owner = np.full(n, -1, dtype=np.int64)
    for k, mask in enumerate(coloring.masks):
        if mask.universe_size != n:
            return ColoringVerdict(False, f"mask {k} has universe {mask.universe_size}, expected {n}")
        m = mask.members
        clash = m[owner[m] >= 0]
        if clash.size:
            return ColoringVerdict(False, f"index {clash[0]} appears in more than one mask")
        owner[m] = k
    missing = np.flatnonzero(owner < 0)
    if missing.size:
        return ColoringVerdict(False, f"index {missing[0]} has no color")
    rows = A.row_of_entries()
    cols = A.col_indices
    bad = np.flatnonzero((rows != cols) & (owner[rows] == owner[cols]))
    if bad.size:
        k = bad[0]
        return ColoringVerdict(False, "adjacent indices share a color", (int(rows[k]), int(cols[k])))
    return ColoringVerdict(True)
