"""Communication volume of geometric vs block-cyclic distribution."""

from hpcgblas import GridDims, compare_distributions

for n in (16, 32, 64):
    dims = GridDims(n, n, n)
    print(f"{n}^3 grid")
    for p in (1, 2, 4, 8):
        c = compare_distributions(dims, p)
        print(f"  p={p}: grid {c.grid.as_tuple()}  geometric {c.geometric.communication:>8.0f}"
              f"  block-cyclic {c.blockcyclic.communication:>8.0f}  2D {c.twod_communication:>8.0f}")
