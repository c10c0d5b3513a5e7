"""Build the 27-point problem, its grid hierarchy, and the 8-color partition."""

from hpcgblas import GridDims, build_hierarchy, build_matrix, greedy_color, validate_coloring

dims = GridDims(8, 8, 8)
A = build_matrix(dims)
print(f"{dims.as_tuple()} grid: n={A.nrows}, nnz={A.nnz}")

cols, vals = A.row(0)
print("corner row has", len(cols), "entries, diagonal", vals[cols.tolist().index(0)])

coloring = greedy_color(A)
print("colors:", coloring.num_colors, "sizes:", [len(m) for m in coloring.masks])
print("valid:", bool(validate_coloring(A, coloring)))

h = build_hierarchy(GridDims(16, 16, 16), levels=4)
for lvl in h.levels():
    R = "-" if lvl.R is None else f"R {lvl.R.nrows}x{lvl.R.ncols}"
    print(f"level {lvl.depth}: {lvl.dims.as_tuple()} n={lvl.n:5d} colors={len(lvl.colors)} {R}")

try:
    build_hierarchy(GridDims(12, 12, 12), levels=4)
except ValueError as exc:
    print("rejected:", exc)
