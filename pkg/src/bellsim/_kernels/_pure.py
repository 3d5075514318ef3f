"""Pure-Python/numpy reference implementations of the hot kernels.

Contract: every function here must produce bit-identical results to its
compiled twin in ``_fast``.  That pins down not just the formulas but the
floating-point evaluation order:

* sums accumulate sequentially left to right (no pairwise or SIMD
  reassociation), so scalar accumulations are written as Python loops over
  IEEE-754 doubles, which round exactly like a C loop compiled without
  fused multiply-adds;
* elementwise array operations (one rounding per element) may use numpy,
  since per-element semantics match a per-cell C loop;
* integer results (sample counts, strategy maxima over small integers) are
  exact in both backends by construction.
"""

from __future__ import annotations

import numpy as np


def response_product_sum(f: np.ndarray, g: np.ndarray, w: np.ndarray) -> float:
    """Return sum_i f[i]*g[i]*w[i], accumulated sequentially."""
    acc = 0.0
    for fi, gi, wi in zip(f.tolist(), g.tolist(), w.tolist()):
        acc += fi * gi * wi
    return acc


def outcome_cell_sums(weights: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Per-outcome weight totals.

    ``codes`` holds one entry in {0,1,2,3} per cell (the joint outcome
    ++, +-, -+, -- in that order); returns the four accumulated weights.
    Each bin accumulates in input order, matching bincount.
    """
    return np.bincount(codes, weights=weights, minlength=4).astype(np.float64)


def mc_outcome_counts(cum: np.ndarray, codes: np.ndarray,
                      uniforms: np.ndarray) -> np.ndarray:
    """Tally sampled outcomes by inverse-CDF lookup.

    ``cum`` is the inclusive cumulative sum of the cell weights; each
    uniform u selects the first cell with cum > u (clamped to the last
    cell against roundoff at the top).  Returns int64 counts per outcome.
    """
    idx = np.searchsorted(cum, uniforms, side="right")
    np.minimum(idx, cum.shape[0] - 1, out=idx)
    return np.bincount(codes[idx], minlength=4).astype(np.int64)


def tableau_pivot(T: np.ndarray, pr: int, pc: int) -> None:
    """One dense simplex pivot on (pr, pc), in place.

    Scales the pivot row by the pivot, eliminates the pivot column from
    every other row with a single multiply and subtract per cell, then
    writes the exact unit column.  Rows other than the pivot row are
    updated with one rounding per operation, matching the compiled loop.
    """
    T[pr, :] /= T[pr, pc]
    col = T[:, pc].copy()
    mask = np.arange(T.shape[0]) != pr
    T[mask, :] -= col[mask, None] * T[pr, :]
    T[:, pc] = 0.0
    T[pr, pc] = 1.0


def chsh_strategy_max(n: int) -> float:
    """Exhaustive CHSH maximum over deterministic strategies on n points.

    Enumerates all 2^(4n) assignments of the four response tables
    (two per side) over an n-point hidden space and all point-mass
    distributions, returning max |S|.  The arithmetic is on small
    integers, so the result is exact.
    """
    m = 1 << n
    signs = np.where(
        (np.arange(m)[:, None] >> np.arange(n)[None, :]) & 1, -1.0, 1.0)
    best = 0.0
    for ib in range(m):
        u = signs[ib][None, :] + signs          # g_b + g_b' per candidate g_b'
        v = signs[ib][None, :] - signs          # g_b - g_b'
        s = np.abs(signs[:, None, None, :] * u[None, None, :, :]
                   + signs[None, :, None, :] * v[None, None, :, :])
        best = max(best, float(s.max()))
    return best
