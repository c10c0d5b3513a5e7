"""Recursive V-cycle preconditioner with straight-injection transfers."""

from __future__ import annotations

import time
from collections import defaultdict

import numpy as np

from .algebra import TRANSPOSE, apply_masked, mxv, set_all, waxpby
from .smoother import SmootherConfig, rbgs_symmetric


class KernelTimer:
    """Accumulates wall-clock seconds per ``(kernel, level)``.

    The V-cycle records ``"smoother"`` and ``"transfer"`` (restriction plus
    refinement) per level; the CG driver records ``"mg"`` (whole
    preconditioner applications) with ``level=None``.
    """

    clock = staticmethod(time.perf_counter)

    def __init__(self):
        self.totals = defaultdict(float)

    def add(self, kernel, seconds, level=None):
        self.totals[(kernel, level)] += seconds

    def get(self, kernel, level=None):
        return self.totals.get((kernel, level), 0.0)


def restrict_vector(level, v_fine: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """``R @ v_fine`` as an unmasked rectangular ``mxv``."""
    if level.R is None:
        raise ValueError("coarsest level has no restriction operator")
    if out is None:
        out = np.zeros(level.R.nrows)
    return mxv(out, None, level.R, v_fine)


def _add_at(idx, z, w):
    z[idx] += w[idx]


def refine_and_add(level, z: np.ndarray, z_c: np.ndarray) -> np.ndarray:
    """``z += R^T z_c`` through the transpose descriptor.

    Only the injected fine positions are touched; ``level.f`` is used as
    scratch space.
    """
    if level.R is None:
        raise ValueError("coarsest level has no refinement operator")
    if z.shape != (level.n,):
        raise ValueError(f"z has shape {z.shape}, level size is {level.n}")
    mxv(level.f, level.injected, level.R, z_c, desc=TRANSPOSE)
    apply_masked(level.injected, _add_at, z, level.f)
    return z


def mg_vcycle(level, z: np.ndarray, r: np.ndarray,
              smoother_cfg: SmootherConfig | None = None,
              timer: KernelTimer | None = None,
              smoother=rbgs_symmetric) -> np.ndarray:
    """Apply one V-cycle to ``z`` (in place) for the system ``A z = r``.

    Parameters
    ----------
    level : ProblemLevel
        Finest level of the hierarchy to cycle through.
    z : ndarray
        Initial guess, overwritten.  The CG driver passes zeros.
    r : ndarray
        Right-hand side at this level.
    smoother_cfg : SmootherConfig, optional
    timer : KernelTimer, optional
        Receives per-level smoother and transfer timings.
    smoother : callable
        ``smoother(level, z, r, cfg)``; the symmetric RBGS by default.

    Returns
    -------
    z
    """
    if z.shape != (level.n,) or r.shape != (level.n,):
        raise ValueError(f"z and r must have length {level.n}")
    clock = KernelTimer.clock

    t0 = clock()
    smoother(level, z, r, smoother_cfg)
    if timer is not None:
        timer.add("smoother", clock() - t0, level.depth)
    if level.coarser is None:
        return z

    f = level.f
    mxv(f, None, level.A, z)
    waxpby(f, 1.0, r, -1.0, f)
    t0 = clock()
    restrict_vector(level, f, out=level.r_c)
    if timer is not None:
        timer.add("transfer", clock() - t0, level.depth)

    set_all(level.z_c, 0.0)
    mg_vcycle(level.coarser, level.z_c, level.r_c, smoother_cfg, timer, smoother)

    t0 = clock()
    refine_and_add(level, z, level.z_c)
    if timer is not None:
        timer.add("transfer", clock() - t0, level.depth)

    t0 = clock()
    smoother(level, z, r, smoother_cfg)
    if timer is not None:
        timer.add("smoother", clock() - t0, level.depth)
    return z
