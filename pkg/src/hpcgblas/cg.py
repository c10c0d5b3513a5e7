"""Preconditioned conjugate gradient driver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import SparseMatrix, dot, mxv, set_all, vector, waxpby
from .multigrid import KernelTimer, mg_vcycle
from .smoother import SmootherConfig


class CGBreakdown(ArithmeticError):
    """Raised when ``p . A p <= 0``, i.e. the operator is not SPD."""


@dataclass(frozen=True)
class CGConfig:
    max_iters: int = 500
    rtol: float = 1e-6
    use_preconditioner: bool = True
    fixed_iterations: int | None = None

    def __post_init__(self):
        if not self.rtol > 0:
            raise ValueError("rtol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.fixed_iterations is not None and self.fixed_iterations < 1:
            raise ValueError("fixed_iterations must be >= 1")


@dataclass
class CGResult:
    iterations: int
    residual_history: list = field(repr=False)
    converged: bool
    solution: np.ndarray = field(repr=False)
    true_residual: float = float("nan")

    @property
    def final_residual(self):
        return self.residual_history[-1]


def residual_norm(A: SparseMatrix, x: np.ndarray, b: np.ndarray) -> float:
    """``||b - A x||_2``."""
    if b.shape != (A.nrows,):
        raise ValueError(f"b has shape {b.shape}, expected ({A.nrows},)")
    w = vector(A.nrows)
    mxv(w, None, A, x)
    waxpby(w, 1.0, b, -1.0, w)
    return math.sqrt(dot(w, w))


def cg_solve(hierarchy, b: np.ndarray, x0: np.ndarray, cfg: CGConfig | None = None,
             smoother_cfg: SmootherConfig | None = None,
             timer: KernelTimer | None = None, smoother=None) -> CGResult:
    """Solve ``A x = b`` on the finest level of ``hierarchy``.

    With ``cfg.use_preconditioner`` each iteration applies one V-cycle starting
    from ``z = 0``.  When ``cfg.fixed_iterations`` is set exactly that many
    iterations run (unless the residual becomes exactly zero) and ``rtol`` only
    decides the ``converged`` flag.

    Raises
    ------
    CGBreakdown
        If a search direction has non-positive curvature.
    """
    cfg = cfg or CGConfig()
    A = hierarchy.A
    n = A.nrows
    if b.shape != (n,) or x0.shape != (n,):
        raise ValueError(f"b and x0 must have length {n}")
    vcycle_kw = {} if smoother is None else {"smoother": smoother}
    clock = KernelTimer.clock

    x = x0.astype(np.float64, copy=True)
    r, z, p, q = vector(n), vector(n), vector(n), vector(n)
    mxv(q, None, A, x)
    waxpby(r, 1.0, b, -1.0, q)

    norm_b = math.sqrt(dot(b, b))
    scale = norm_b if norm_b > 0 else 1.0
    normr = math.sqrt(dot(r, r))
    history = [normr]
    limit = cfg.fixed_iterations if cfg.fixed_iterations is not None else cfg.max_iters

    def done(k):
        if normr == 0.0:
            return True
        if cfg.fixed_iterations is not None:
            return k >= cfg.fixed_iterations
        return normr / scale < cfg.rtol or k >= limit

    k = 0
    rho_prev = 0.0
    while not done(k):
        k += 1
        if cfg.use_preconditioner:
            set_all(z, 0.0)
            t0 = clock()
            mg_vcycle(hierarchy, z, r, smoother_cfg, timer, **vcycle_kw)
            if timer is not None:
                timer.add("mg", clock() - t0)
        else:
            waxpby(z, 1.0, r, 0.0, r)
        rho = dot(r, z)
        if k == 1:
            waxpby(p, 1.0, z, 0.0, z)
        else:
            waxpby(p, 1.0, z, rho / rho_prev, p)
        mxv(q, None, A, p)
        pq = dot(p, q)
        if not pq > 0.0:
            raise CGBreakdown(f"non-positive curvature p.Ap={pq!r} at iteration {k}")
        alpha = rho / pq
        waxpby(x, 1.0, x, alpha, p)
        waxpby(r, 1.0, r, -alpha, q)
        normr = math.sqrt(dot(r, r))
        history.append(normr)
        rho_prev = rho

    return CGResult(iterations=k, residual_history=history,
                    converged=normr / scale < cfg.rtol, solution=x,
                    true_residual=residual_norm(A, x, b))
