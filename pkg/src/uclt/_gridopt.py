"""One-dimensional extremization: coarse log-spaced grid plus golden-section refinement.

All sup/inf computations in the toolkit are extremizations of smooth scalar
functions over an interval, so a dense grid scan followed by one stage of
golden-section refinement around the best node is accurate and predictable.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def log_grid(lo: float, hi: float, nodes: int) -> np.ndarray:
    """Geometrically spaced grid on [lo, hi]; requires 0 < lo <= hi."""
    if not (0.0 < lo <= hi):
        raise ValueError(f"log_grid needs 0 < lo <= hi, got ({lo}, {hi})")
    if lo == hi or nodes == 1:
        return np.array([lo])
    return np.geomspace(lo, hi, nodes)


def golden_minimize(f: Callable[[float], float], a: float, b: float,
                    tol: float = 1e-9) -> tuple[float, float]:
    """Golden-section minimum of f on [a, b] to relative x-tolerance tol."""
    if b < a:
        a, b = b, a
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    scale = max(abs(a), abs(b), 1.0)
    while (b - a) > tol * scale:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    if fc <= fd:
        return c, fc
    return d, fd


def minimize_on_grid(f: Callable[[float], float], grid: Sequence[float],
                     fvec: Callable[[np.ndarray], np.ndarray] | None = None,
                     tol: float = 1e-9, refine: bool = True) -> tuple[float, float]:
    """Minimum of f over a grid, refined between the neighbours of the best node.

    Infinite or nan grid values are ignored; returns (+inf at grid[0]) when
    nothing is finite.  `fvec` is an optional vectorized evaluator used for
    the scan; `f` is always used inside the refinement.
    """
    grid = np.asarray(grid, dtype=float)
    vals = fvec(grid) if fvec is not None else np.array([f(x) for x in grid], dtype=float)
    vals = np.where(np.isnan(vals), np.inf, vals)
    i = int(np.argmin(vals))
    best_x, best_v = float(grid[i]), float(vals[i])
    if not math.isfinite(best_v):
        return best_x, math.inf
    if refine and len(grid) > 1:
        a = float(grid[max(i - 1, 0)])
        b = float(grid[min(i + 1, len(grid) - 1)])
        if b > a:
            x, v = golden_minimize(f, a, b, tol=tol)
            if v < best_v:
                best_x, best_v = x, v
    return best_x, best_v


def maximize_on_grid(f: Callable[[float], float], grid: Sequence[float],
                     fvec: Callable[[np.ndarray], np.ndarray] | None = None,
                     tol: float = 1e-9, refine: bool = True) -> tuple[float, float]:
    """Maximum counterpart of :func:`minimize_on_grid`."""
    neg = (lambda x: -f(x))
    negvec = (lambda xs: -fvec(xs)) if fvec is not None else None
    x, v = minimize_on_grid(neg, grid, fvec=negvec, tol=tol, refine=refine)
    return x, -v
