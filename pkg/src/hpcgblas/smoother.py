"""Multicolor (red-black) Gauss-Seidel smoothing.

Colors are processed one after another.  Inside a color the update of every
member depends only on values of other colors, so each color costs one
masked ``mxv`` plus one masked element-wise update.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import apply_masked, mxv


@dataclass(frozen=True)
class SmootherConfig:
    sweeps: int = 1

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")


def _update(idx, z, r, s, d):
    # s[i] includes A_ii * z_i, hence the add-back before dividing
    di = d[idx]
    z[idx] = (r[idx] - s[idx] + z[idx] * di) / di


def _check(level, z, r):
    n = level.n
    for name, v in (("z", z), ("r", r)):
        if v.shape != (n,):
            raise ValueError(f"{name} has shape {v.shape}, level size is {n}")


def _sweep(level, z, r, colors):
    for mask in colors:
        mxv(level.s, mask, level.A, z)
        apply_masked(mask, _update, z, r, level.s, level.A_diag)
    return z


def rbgs_forward(level, z: np.ndarray, r: np.ndarray) -> np.ndarray:
    """One forward pass over colors ``0 .. c-1``, updating ``z`` in place."""
    _check(level, z, r)
    return _sweep(level, z, r, level.colors)


def rbgs_backward(level, z: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Same as :func:`rbgs_forward` with the colors visited in reverse."""
    _check(level, z, r)
    return _sweep(level, z, r, level.colors[::-1])


def rbgs_symmetric(level, z: np.ndarray, r: np.ndarray,
                   config: SmootherConfig | None = None) -> np.ndarray:
    """``config.sweeps`` repetitions of a forward then a backward pass."""
    sweeps = 1 if config is None else config.sweeps
    _check(level, z, r)
    for _ in range(sweeps):
        _sweep(level, z, r, level.colors)
        _sweep(level, z, r, level.colors[::-1])
    return z


def forward_only(level, z, r, config=None):
    """Non-symmetric smoother of the same cost; used to exercise the symmetry test."""
    sweeps = 1 if config is None else config.sweeps
    _check(level, z, r)
    for _ in range(2 * sweeps):
        _sweep(level, z, r, level.colors)
    return z
