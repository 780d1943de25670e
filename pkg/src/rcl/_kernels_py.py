"""Pure-Python (numpy) kernels: fallback backend for the compiled extension.

torus_fill and box_scan use Dekker double-double arithmetic with the exact
same IEEE operation order as the compiled backend, so their outputs are
bit-identical.  weyl_sum uses numpy cos/sin plus math.fsum, which may differ
from the compiled libm/Neumaier path in the last ulps; both are deterministic.
"""

from __future__ import annotations

import math

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1, Dekker split constant
_TWO_PI = 6.283185307179586


# -- double-double helpers (vectorized; mirrors the compiled backend) --------

def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a, b):
    p = a * b
    ca = _SPLIT * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLIT * b
    bh = cb - (cb - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_renorm(h, l):
    s = h + l
    return s, l - (s - h)


def _dd_mul_d(xh, xl, c):
    p, e = _two_prod(xh, c)
    e = e + xl * c
    return _dd_renorm(p, e)


def _dd_add_dd(xh, xl, yh, yl):
    s, e = _two_sum(xh, yh)
    e = e + (xl + yl)
    return _dd_renorm(s, e)


def torus_fill(coefs: np.ndarray, j0: int, n: int, out: np.ndarray) -> None:
    """Fill out[i, k] = frac(A2_k*j^2 + A1_k*j + A0_k) for j = j0..j0+n-1.

    coefs is (r, 6): per coordinate the double-double pairs
    (A2hi, A2lo, A1hi, A1lo, A0hi, A0lo).
    """
    j = np.arange(j0, j0 + n, dtype=np.float64)
    r = coefs.shape[0]
    for k in range(r):
        a2h, a2l, a1h, a1l, a0h, a0l = coefs[k]
        uh, ul = _dd_mul_d(a2h, a2l, j)
        uh, ul = _dd_add_dd(uh, ul, a1h, a1l)
        uh, ul = _dd_mul_d(uh, ul, j)
        uh, ul = _dd_add_dd(uh, ul, a0h, a0l)
        fr = uh - np.floor(uh)
        s, e = _two_sum(fr, ul)
        z = s + e
        z = np.where(z >= 1.0, z - 1.0, z)
        z = np.where(z < 0.0, z + 1.0, z)
        z = np.where(z >= 1.0, 0.0, z)
        out[:, k] = z


def box_scan(z: np.ndarray, bound: float, tol: float) -> tuple[int, np.ndarray]:
    """First row of z certainly inside [0, bound)^r, with ambiguous rows.

    Returns (hit, ambiguous) where hit is the index of the first row whose
    coordinates are all certainly in (or -1), and ambiguous lists the row
    indices before hit that could not be classified within tol.
    """
    certain_in = (z >= tol) & (z < bound - tol)
    certain_out = (z > bound + tol) & (z < 1.0 - tol)
    in_all = certain_in.all(axis=1)
    out_any = certain_out.any(axis=1)
    ambiguous = ~in_all & ~out_any
    hits = np.nonzero(in_all)[0]
    hit = int(hits[0]) if hits.size else -1
    upto = hit if hit >= 0 else z.shape[0]
    amb = np.nonzero(ambiguous[:upto])[0].astype(np.int64)
    return hit, amb


def weyl_sum(z: np.ndarray, h: np.ndarray) -> tuple[float, float]:
    """Compensated sum of e(<h, z_j>) over rows; returns (re, im)."""
    phase = np.zeros(z.shape[0], dtype=np.float64)
    for k in range(z.shape[1]):
        phase += float(h[k]) * z[:, k]
    ang = _TWO_PI * phase
    return math.fsum(np.cos(ang)), math.fsum(np.sin(ang))


# -- exact discrepancy over sorted unique values ------------------------------

def disc1_star(v: np.ndarray, lt: np.ndarray, le: np.ndarray, m: int) -> float:
    """Star discrepancy from unique sorted values and their <,<= counts."""
    return float(np.max(np.maximum(v - lt / m, le / m - v)))


def disc1_extreme(v: np.ndarray, lt: np.ndarray, le: np.ndarray, m: int) -> float:
    """Extreme (all-interval) discrepancy from unique sorted values."""
    # closed intervals [v_i, v_j], i <= j: (le_j - lt_i)/m - (v_j - v_i)
    pref = np.maximum.accumulate(v - lt / m)
    d_pos = float(np.max(le / m - v + pref))
    # open intervals over values augmented with the domain edges 0 and 1
    va, alt, ale = _augment01(v, lt, le, m)
    run = np.maximum.accumulate(ale / m - va)
    d_neg = float(np.max((va - alt / m)[1:] + run[:-1]))
    return max(d_pos, d_neg, 0.0)


def _augment01(v, lt, le, m):
    va, alt, ale = v, lt, le
    if va.size == 0 or va[0] != 0.0:
        va = np.concatenate(([0.0], va))
        alt = np.concatenate(([0], alt))
        ale = np.concatenate(([0], ale))
    if va[-1] != 1.0:
        va = np.concatenate((va, [1.0]))
        alt = np.concatenate((alt, [m]))
        ale = np.concatenate((ale, [m]))
    return va, alt, ale


def disc2_extreme(xs: np.ndarray, ys: np.ndarray, m: int) -> float:
    """Extreme discrepancy in r=2 from point coordinates (unsorted ok)."""
    order = np.argsort(ys, kind="stable")
    x_byy = xs[order]
    y_byy = ys[order]
    ux = np.unique(xs)
    best = 0.0
    # positive part: closed strips [ux[ia], ux[ib]]
    for ia in range(ux.size):
        for ib in range(ia, ux.size):
            w = ux[ib] - ux[ia]
            sel = (x_byy >= ux[ia]) & (x_byy <= ux[ib])
            yv, cnt = _unique_counts(y_byy[sel])
            if yv.size == 0:
                continue
            yle = np.cumsum(cnt)
            ylt = yle - cnt
            pref = np.maximum.accumulate(w * yv - ylt / m)
            cand = float(np.max(yle / m - w * yv + pref))
            if cand > best:
                best = cand
    # negative part: open strips over x values augmented with 0 and 1
    uxa = np.unique(np.concatenate(([0.0], ux, [1.0])))
    for ia in range(uxa.size):
        for ib in range(ia + 1, uxa.size):
            w = uxa[ib] - uxa[ia]
            sel = (x_byy > uxa[ia]) & (x_byy < uxa[ib])
            yv, cnt = _unique_counts(y_byy[sel])
            if yv.size:
                yle = np.cumsum(cnt)
                ylt = yle - cnt
            else:
                yv = np.empty(0)
                ylt = yle = np.empty(0, dtype=np.int64)
            t = int(yle[-1]) if yv.size else 0
            va, alt, ale = _augment01(yv, ylt, yle, t)
            run = np.maximum.accumulate(ale / m - w * va)
            cand = float(np.max((w * va - alt / m)[1:] + run[:-1]))
            if cand > best:
                best = cand
    return best


def _unique_counts(sorted_vals: np.ndarray):
    if sorted_vals.size == 0:
        return np.empty(0), np.empty(0, dtype=np.int64)
    mask = np.empty(sorted_vals.size, dtype=bool)
    mask[0] = True
    np.not_equal(sorted_vals[1:], sorted_vals[:-1], out=mask[1:])
    idx = np.nonzero(mask)[0]
    counts = np.diff(np.concatenate((idx, [sorted_vals.size])))
    return sorted_vals[idx], counts.astype(np.int64)


# -- grid discrepancy bounds (for brackets) -----------------------------------

def grid_extreme_1d(cells: np.ndarray, m: int) -> float:
    """Max |disc| over grid-aligned boxes given per-cell counts (G cells)."""
    g = cells.shape[0]
    p = np.concatenate(([0], np.cumsum(cells))).astype(np.float64)
    edge = np.arange(g + 1, dtype=np.float64) / g
    run_pos = np.maximum.accumulate(edge - p / m)
    d_pos = float(np.max(p / m - edge + run_pos))
    run_neg = np.maximum.accumulate(p / m - edge)
    d_neg = float(np.max(edge - p / m + run_neg))
    return max(d_pos, d_neg, 0.0)


def grid_extreme_2d(cells: np.ndarray, m: int) -> float:
    """Max |disc| over grid-aligned boxes from a (G, G) cell-count matrix."""
    g = cells.shape[0]
    edge = np.arange(g + 1, dtype=np.float64) / g
    best = 0.0
    for i1 in range(g):
        col = np.zeros(g, dtype=np.int64)
        for i2 in range(i1 + 1, g + 1):
            col += cells[i2 - 1]
            w = edge[i2] - edge[i1]
            p = np.concatenate(([0], np.cumsum(col))).astype(np.float64)
            run_pos = np.maximum.accumulate(w * edge - p / m)
            d_pos = float(np.max(p / m - w * edge + run_pos))
            run_neg = np.maximum.accumulate(p / m - w * edge)
            d_neg = float(np.max(w * edge - p / m + run_neg))
            cand = max(d_pos, d_neg)
            if cand > best:
                best = cand
    return best
