"""Masked sparse matrix-vector products, dot and waxpby on a tiny matrix."""

import numpy as np

from hpcgblas import IndexMask, build_from_triplets, dot, mxv, vector, waxpby, work_counter
from hpcgblas.algebra import TRANSPOSE

A = build_from_triplets(4, 4, [
    (0, 0, 2.0), (0, 1, -1.0),
    (1, 0, -1.0), (1, 1, 2.0), (1, 2, -1.0),
    (2, 1, -1.0), (2, 2, 2.0), (2, 3, -1.0),
    (3, 2, -1.0), (3, 3, 2.0),
])
print(A.to_dense())

x = np.arange(1.0, 5.0)
y = vector(4)
mxv(y, None, A, x)
print("A x         =", y)

# only rows 0 and 2 are written; rows 1 and 3 keep their previous value
y = np.full(4, -7.0)
mxv(y, IndexMask.from_indices(4, [0, 2]), A, x)
print("masked A x  =", y)

yt = vector(4)
mxv(yt, None, A, x, desc=TRANSPOSE)
print("A^T x       =", yt)

w = vector(4)
waxpby(w, 2.0, x, -1.0, y)
print("2x - y      =", w, " x.x =", dot(x, x))

work_counter.reset()
mxv(vector(4), None, A, x)
print("nonzeros visited by one product:", work_counter.nnz_visits)
