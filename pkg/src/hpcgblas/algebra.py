"""GraphBLAS-flavoured containers and primitives.

Every numerical kernel in the package goes through the operations defined
here: ``mxv`` (optionally masked, optionally transposed), ``dot``,
``waxpby``, ``apply_masked`` and ``set_all``.  Dense vectors are plain
one-dimensional ``float64`` numpy arrays; sparse matrices are stored in CSR.

Reductions are performed over fixed-size chunks with a fixed combine order,
so results do not depend on the number of worker threads.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "PLUS_TIMES",
    "ArithmeticSemiring",
    "Descriptor",
    "IndexMask",
    "SparseMatrix",
    "apply_masked",
    "build_from_triplets",
    "dot",
    "get_num_threads",
    "mxv",
    "set_all",
    "set_num_threads",
    "to_matrix_market",
    "transpose_explicit",
    "vector",
    "waxpby",
    "work_counter",
]

# rows per mxv work item and elements per dot partial sum
ROW_CHUNK = 2048
DOT_CHUNK = 4096


class _Pool:
    def __init__(self):
        self.threads = 1
        self._executor = None
        self._lock = threading.Lock()

    def set(self, n):
        n = int(n)
        if n < 1:
            raise ValueError("thread count must be >= 1")
        with self._lock:
            if self._executor is not None:
                self._executor.shutdown(wait=True)
                self._executor = None
            self.threads = n

    def map(self, fn, items):
        items = list(items)
        if self.threads == 1 or len(items) < 2:
            return [fn(item) for item in items]
        with self._lock:
            if self._executor is None:
                self._executor = ThreadPoolExecutor(max_workers=self.threads)
            executor = self._executor
        return list(executor.map(fn, items))


_pool = _Pool()


def set_num_threads(n: int) -> None:
    """Cap the number of worker threads used inside the primitives."""
    _pool.set(n)


def get_num_threads() -> int:
    return _pool.threads


class WorkCounter:
    """Counts stored nonzeros visited by ``mxv`` calls."""

    def __init__(self):
        self.nnz_visits = 0

    def reset(self):
        self.nnz_visits = 0


work_counter = WorkCounter()


@dataclass(frozen=True)
class ArithmeticSemiring:
    """Additive monoid plus multiplicative operator.

    Only the numpy ufunc pair ``(np.add, np.multiply)`` is used by HPCG; the
    kernels are specialised for it and reject anything else.
    """

    add: np.ufunc = np.add
    mul: np.ufunc = np.multiply
    zero: float = 0.0
    one: float = 1.0


PLUS_TIMES = ArithmeticSemiring()


@dataclass(frozen=True)
class Descriptor:
    structural: bool = False
    transpose_matrix: bool = False


DEFAULT = Descriptor()
TRANSPOSE = Descriptor(transpose_matrix=True)


def _readonly(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class IndexMask:
    """Structural mask: a strictly increasing set of indices in ``[0, universe_size)``."""

    universe_size: int
    members: np.ndarray

    def __post_init__(self):
        members = _readonly(np.asarray(self.members).ravel(), np.intp)
        if self.universe_size < 0:
            raise ValueError("universe_size must be non-negative")
        if members.size:
            if members[0] < 0 or members[-1] >= self.universe_size:
                raise ValueError("mask member out of range")
            if np.any(np.diff(members) <= 0):
                raise ValueError("mask members must be strictly increasing")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_indices(cls, universe_size: int, indices: Iterable[int]) -> "IndexMask":
        """Build a mask from an unordered, duplicate-free index collection."""
        idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                         dtype=np.intp)
        srt = np.sort(idx)
        if srt.size and np.any(np.diff(srt) == 0):
            raise ValueError("duplicate mask member")
        return cls(universe_size, srt)

    def __len__(self):
        return int(self.members.size)

    def __contains__(self, i):
        k = np.searchsorted(self.members, i)
        return bool(k < self.members.size and self.members[k] == i)


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """CSR matrix with explicit dimensions.

    The index and value arrays are copied and made read-only on construction.
    Use :func:`build_from_triplets` to build one from coordinates.
    """

    nrows: int
    ncols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    _plans: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ro = _readonly(self.row_offsets, np.int64)
        ci = _readonly(self.col_indices, np.int64)
        va = _readonly(self.values, np.float64)
        object.__setattr__(self, "row_offsets", ro)
        object.__setattr__(self, "col_indices", ci)
        object.__setattr__(self, "values", va)
        if self.nrows < 0 or self.ncols < 0:
            raise ValueError("negative matrix dimension")
        if ro.shape != (self.nrows + 1,):
            raise ValueError("row_offsets must have length nrows + 1")
        if ro[0] != 0 or ro[-1] != ci.size or ci.size != va.size:
            raise ValueError("row_offsets inconsistent with index/value arrays")
        if np.any(np.diff(ro) < 0):
            raise ValueError("row_offsets must be non-decreasing")
        if ci.size:
            if ci.min() < 0 or ci.max() >= self.ncols:
                raise ValueError("column index out of range")
            # strictly increasing within each row; row starts are exempt
            step = np.diff(ci)
            row_start = np.zeros(ci.size, dtype=bool)
            row_start[ro[:-1][ro[:-1] < ci.size]] = True
            if np.any((step <= 0) & ~row_start[1:]):
                raise ValueError("column indices must be strictly increasing within a row")

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self):
        return int(self.values.size)

    def row(self, i):
        """Return ``(cols, vals)`` views of row ``i``."""
        lo, hi = self.row_offsets[i], self.row_offsets[i + 1]
        return self.col_indices[lo:hi], self.values[lo:hi]

    def row_lengths(self):
        return np.diff(self.row_offsets)

    def row_of_entries(self):
        """Row index of every stored entry, in storage order."""
        return np.repeat(np.arange(self.nrows, dtype=np.int64), self.row_lengths())

    def triplets(self):
        """Stored entries as a list of ``(row, col, value)`` tuples."""
        rows = self.row_of_entries()
        return list(zip(rows.tolist(), self.col_indices.tolist(), self.values.tolist()))

    def to_dense(self):
        out = np.zeros(self.shape)
        out[self.row_of_entries(), self.col_indices] = self.values
        return out


def vector(n: int, value: float = 0.0) -> np.ndarray:
    """Allocate a dense vector of length ``n`` filled with ``value``."""
    return np.full(int(n), float(value), dtype=np.float64)


def _coo_to_csr(nrows, ncols, rows, cols, vals):
    rows = np.asarray(rows, dtype=np.int64).ravel()
    cols = np.asarray(cols, dtype=np.int64).ravel()
    vals = np.asarray(vals, dtype=np.float64).ravel()
    if not rows.size == cols.size == vals.size:
        raise ValueError("row, column and value arrays differ in length")
    if rows.size:
        if rows.min() < 0 or rows.max() >= nrows:
            raise ValueError(f"row index out of range for {nrows} rows")
        if cols.min() < 0 or cols.max() >= ncols:
            raise ValueError(f"column index out of range for {ncols} columns")
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    dup = (np.diff(rows) == 0) & (np.diff(cols) == 0)
    if np.any(dup):
        k = int(np.flatnonzero(dup)[0])
        raise ValueError(f"duplicate entry at ({rows[k]}, {cols[k]})")
    offsets = np.zeros(nrows + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=nrows), out=offsets[1:])
    return SparseMatrix(nrows, ncols, offsets, cols, vals)


def build_from_triplets(nrows: int, ncols: int,
                        triplets: Sequence[tuple[int, int, float]]) -> SparseMatrix:
    """Build a CSR matrix from ``(row, col, value)`` triplets.

    Rows are sorted by column.  Duplicate coordinates are rejected rather than
    summed, as are out-of-range indices.

    >>> A = build_from_triplets(1, 3, [(0, 2, 5.0), (0, 0, 3.0)])
    >>> A.row_offsets.tolist(), A.col_indices.tolist(), A.values.tolist()
    ([0, 2], [0, 2], [3.0, 5.0])
    """
    trip = list(triplets)
    if trip:
        rows, cols, vals = zip(*trip)
    else:
        rows, cols, vals = (), (), ()
    return _coo_to_csr(nrows, ncols, rows, cols, vals)


def from_coo(nrows, ncols, rows, cols, vals) -> SparseMatrix:
    """Array form of :func:`build_from_triplets`."""
    return _coo_to_csr(nrows, ncols, rows, cols, vals)


def transpose_explicit(A: SparseMatrix) -> SparseMatrix:
    """Materialise the transpose of ``A`` as a new CSR matrix."""
    return _coo_to_csr(A.ncols, A.nrows, A.col_indices, A.row_of_entries(), A.values)


class _RowPlan:
    # Gathers for a fixed row subset.  Rows are sorted by decreasing length so
    # that slot k of every row with more than k entries forms a prefix; each
    # row is then summed left to right in column order, exactly like a scalar
    # loop ``s = 0.0; s += a_ij * x_j``.
    __slots__ = ("rows", "slots", "nnz")

    def __init__(self, A, rows):
        starts = A.row_offsets[rows]
        lengths = A.row_offsets[rows + 1] - starts
        order = np.argsort(-lengths, kind="stable")
        self.rows = rows[order]
        starts, lengths = starts[order], lengths[order]
        self.nnz = int(lengths.sum())
        self.slots = []
        maxlen = int(lengths[0]) if lengths.size else 0
        for k in range(maxlen):
            count = int(np.count_nonzero(lengths > k))
            pos = starts[:count] + k
            self.slots.append((count, A.col_indices[pos], A.values[pos]))

    def run(self, x, y):
        acc = np.zeros(self.rows.size)
        for count, cols, vals in self.slots:
            acc[:count] += vals * x[cols]
        y[self.rows] = acc


class _TransposePlan:
    # y = A^T x restricted to the masked output columns.  np.bincount adds
    # the weights sequentially in storage order, i.e. by increasing row.
    __slots__ = ("rows", "cols", "vals", "out", "nnz")

    def __init__(self, A, out):
        rows = A.row_of_entries()
        if out is None:
            keep = slice(None)
        else:
            keep = np.isin(A.col_indices, out)
        self.rows = rows[keep]
        self.cols = A.col_indices[keep]
        self.vals = A.values[keep]
        self.out = out
        self.nnz = int(self.vals.size)


def _plan(A, mask, transpose):
    key = (None if mask is None else id(mask), transpose)
    hit = A._plans.get(key)
    if hit is not None and hit[0] is mask:
        return hit[1]
    if len(A._plans) > 64:
        A._plans.clear()
    if transpose:
        plan = _TransposePlan(A, None if mask is None else mask.members)
    else:
        rows = np.arange(A.nrows, dtype=np.int64) if mask is None \
            else mask.members.astype(np.int64)
        plan = [_RowPlan(A, rows[i:i + ROW_CHUNK]) for i in range(0, rows.size, ROW_CHUNK)]
    A._plans[key] = (mask, plan)
    return plan


def _check_len(v, n, name):
    if not isinstance(v, np.ndarray) or v.ndim != 1:
        raise TypeError(f"{name} must be a one-dimensional numpy array")
    if v.shape[0] != n:
        raise ValueError(f"{name} has length {v.shape[0]}, expected {n}")


def _check_semiring(semiring):
    if semiring.add is not np.add or semiring.mul is not np.multiply:
        raise NotImplementedError("only the plus-times semiring is supported")


def mxv(y: np.ndarray, mask: IndexMask | None, A: SparseMatrix, x: np.ndarray,
        semiring: ArithmeticSemiring = PLUS_TIMES,
        desc: Descriptor = DEFAULT) -> np.ndarray:
    """Sparse matrix-vector product into ``y``, optionally masked.

    Computes ``y[i] = sum_j A'[i, j] * x[j]`` for every ``i`` in ``mask`` (all
    ``i`` if ``mask`` is None), where ``A'`` is ``A`` or its transpose per
    ``desc.transpose_matrix``.  Positions outside the mask keep their previous
    value.  The mask is always interpreted structurally.

    Parameters
    ----------
    y : ndarray
        Output vector, overwritten at masked positions.
    mask : IndexMask or None
    A : SparseMatrix
    x : ndarray
        Input vector; must not alias ``y``.
    semiring : ArithmeticSemiring
    desc : Descriptor

    Returns
    -------
    y
    """
    _check_semiring(semiring)
    out_n, in_n = (A.ncols, A.nrows) if desc.transpose_matrix else (A.nrows, A.ncols)
    _check_len(x, in_n, "x")
    _check_len(y, out_n, "y")
    if mask is not None and mask.universe_size != out_n:
        raise ValueError(f"mask universe {mask.universe_size} does not match output length {out_n}")
    if np.shares_memory(x, y):
        raise ValueError("x and y must not alias")

    plan = _plan(A, mask, desc.transpose_matrix)
    if desc.transpose_matrix:
        full = np.bincount(plan.cols, weights=plan.vals * x[plan.rows], minlength=out_n)
        if plan.out is None:
            y[:] = full
        else:
            y[plan.out] = full[plan.out]
        work_counter.nnz_visits += plan.nnz
    else:
        _pool.map(lambda p: p.run(x, y), plan)
        work_counter.nnz_visits += sum(p.nnz for p in plan)
    return y


def dot(x: np.ndarray, y: np.ndarray) -> float:
    """Inner product with a fixed, thread-count independent reduction order."""
    n = len(x)
    _check_len(x, n, "x")
    _check_len(y, n, "y")
    bounds = range(0, n, DOT_CHUNK)
    partials = _pool.map(lambda lo: float(np.sum(x[lo:lo + DOT_CHUNK] * y[lo:lo + DOT_CHUNK])),
                         bounds)
    total = 0.0
    for p in partials:
        total += p
    return total


def waxpby(w: np.ndarray, alpha: float, x: np.ndarray, beta: float, y: np.ndarray) -> np.ndarray:
    """``w = alpha * x + beta * y``; ``w`` may alias ``x`` or ``y``."""
    n = len(w)
    _check_len(w, n, "w")
    _check_len(x, n, "x")
    _check_len(y, n, "y")
    if alpha == 1.0 and beta == 0.0:
        w[:] = x
    elif alpha == 1.0:
        np.add(x, beta * y, out=w)
    elif beta == 1.0:
        np.add(alpha * x, y, out=w)
    else:
        np.add(alpha * x, beta * y, out=w)
    return w


def apply_masked(mask: IndexMask, body: Callable[..., None], *bound: np.ndarray) -> None:
    """Run ``body(idx, *bound)`` over the members of ``mask``.

    ``idx`` is an integer array holding a chunk of mask members; the body
    must only read and write positions ``idx`` of the bound vectors.  Chunks
    partition the mask, so every member is visited exactly once, in no
    particular order.
    """
    for k, v in enumerate(bound):
        _check_len(v, mask.universe_size, f"bound vector {k}")
    m = mask.members
    if m.size == 0:
        return
    chunks = [m[i:i + ROW_CHUNK] for i in range(0, m.size, ROW_CHUNK)]
    _pool.map(lambda idx: body(idx, *bound), chunks)


def set_all(v: np.ndarray, value: float) -> np.ndarray:
    v.fill(value)
    return v


def to_matrix_market(A: SparseMatrix, path=None) -> str:
    """Render ``A`` as MatrixMarket coordinate text (1-based), optionally writing it."""
    lines = ["%%MatrixMarket matrix coordinate real general",
             f"{A.nrows} {A.ncols} {A.nnz}"]
    for r, c, v in A.triplets():
        lines.append(f"{r + 1} {c + 1} {v!r}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def from_matrix_market(text: str) -> SparseMatrix:
    """Parse the output of :func:`to_matrix_market`."""
    body = [ln for ln in text.splitlines() if ln and not ln.startswith("%")]
    nrows, ncols, nnz = (int(t) for t in body[0].split())
    entries = [ln.split() for ln in body[1:1 + nnz]]
    return build_from_triplets(nrows, ncols,
                               [(int(r) - 1, int(c) - 1, float(v)) for r, c, v in entries])
