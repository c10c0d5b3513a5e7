"""Smoothing sweeps and one V-cycle, with per-level kernel timings."""

import numpy as np

from hpcgblas import GridDims, KernelTimer, build_hierarchy, mg_vcycle, rbgs_symmetric, residual_norm

h = build_hierarchy(GridDims(16, 16, 16), levels=4)
r = np.ones(h.n)

z = np.zeros(h.n)
for sweep in range(1, 6):
    rbgs_symmetric(h, z, r)
    print(f"after {sweep} symmetric sweep(s): |r - Az| = {residual_norm(h.A, z, r):.4e}")

timer = KernelTimer()
z = np.zeros(h.n)
mg_vcycle(h, z, r, timer=timer)
print(f"one V-cycle:                 |r - Az| = {residual_norm(h.A, z, r):.4e}")
for lvl in h.levels():
    print(f"  level {lvl.depth}: smoother {timer.get('smoother', lvl.depth) * 1e3:7.2f} ms,"
          f" transfer {timer.get('transfer', lvl.depth) * 1e3:6.2f} ms")
