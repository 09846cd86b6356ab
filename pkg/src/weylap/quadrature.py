"""Cell grids and the cumulative-integral machinery behind every window average.

Cells are aligned to multiples of ``1/density`` and additionally split at the
breakpoints a signal reports, so piecewise-constant integrands are integrated
exactly by the midpoint rule.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .signals import Signal


def cell_edges(lo: float, hi: float, density: int, breaks: np.ndarray = ()) -> np.ndarray:
    h = 1.0 / density
    k0, k1 = math.ceil(lo / h), math.floor(hi / h)
    aligned = np.arange(k0, k1 + 1, dtype=float) * h
    base = np.concatenate([[lo], aligned[(aligned > lo) & (aligned < hi)], [hi]])
    brk = np.asarray(breaks, dtype=float)
    brk = np.unique(brk[(brk > lo) & (brk < hi)])
    if brk.size == 0:
        return base
    pos = np.searchsorted(base, brk)
    brk = brk[base[pos] != brk]
    return np.insert(base, np.searchsorted(base, brk), brk)


def signal_cells(f: Signal, lo: float, hi: float, density: int):
    """Edges, widths and midpoint values of ``f`` on ``[lo, hi]``."""
    edges = cell_edges(lo, hi, density, f.breaks(lo, hi))
    mids = 0.5 * (edges[1:] + edges[:-1])
    return edges, np.diff(edges), f.values(mids)


def cumulative(edges: np.ndarray, widths: np.ndarray, g: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(g * widths)])


def window_integrals(edges, cum, starts, length) -> np.ndarray:
    """``int_s^{s+length}`` of the cell-constant integrand for every start ``s``."""
    starts = np.asarray(starts, dtype=float)
    return np.interp(starts + length, edges, cum) - np.interp(starts, edges, cum)


def xi_grid(xi_min: float, xi_max: float, xi_step: float) -> np.ndarray:
    n = int(math.floor((xi_max - xi_min) / xi_step + 1e-9))
    grid = xi_min + xi_step * np.arange(n + 1)
    return grid[grid <= xi_max + 1e-12 * max(1.0, abs(xi_max))]


def pmap(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """Ordered map; with ``jobs > 1`` the items are spread over worker threads.

    Every item is computed by the same code path, so the result does not
    depend on ``jobs``.
    """
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))
