"""Discrepancy, Weyl exponential sums, and the Erdős–Turán–Koksma bound.

discrepancy_exact optimizes over all critical boxes (faces at point
coordinates, open/closed limits both realized); discrepancy_bracket scales
past the exact range with a grid bound that is sound from both sides.
discrepancy_bruteforce is a deliberately naive enumeration kept as the
validation oracle for the exact mode.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .builder import ColoringSpec
from .lineseq import LineParams, TorusSequence, first_red_scan, torus_sequence

_EXACT_CAPS = {1: 2000, 2: 300}
_MAX_ETK_TERMS = 2_000_000
_GRID_BASE = {1: 256, 2: 32}
_FLOAT_GUARD = 1e-9


class DiscrepancySizeError(ValueError):
    """Exact mode refused; use discrepancy_bracket instead."""


def default_c_r(r: int) -> float:
    return 1.5**r


@dataclass(frozen=True)
class WeylSum:
    h: tuple[int, ...]
    m: int
    value: complex
    magnitude_over_m: float

    def to_json(self) -> dict:
        return {
            "h": list(self.h),
            "m": self.m,
            "value": [self.value.real, self.value.imag],
            "magnitude_over_m": self.magnitude_over_m,
        }


def weyl_sum(z: TorusSequence, h) -> WeylSum:
    """Compensated sum of e(<h, z_j>) in fixed left-to-right order."""
    hvec = np.atleast_1d(np.asarray(h, dtype=np.int64))
    if hvec.shape[0] != z.r:
        raise ValueError(f"h must have length r = {z.r}")
    re, im = kernels.weyl_sum(z.points, hvec)
    value = complex(re, im)
    return WeylSum(
        h=tuple(int(v) for v in hvec),
        m=z.m,
        value=value,
        magnitude_over_m=abs(value) / z.m,
    )


# -- exact discrepancy ---------------------------------------------------------

def _unique_counts_sorted(col: np.ndarray):
    v, counts = np.unique(col, return_counts=True)
    le = np.cumsum(counts)
    lt = le - counts
    return v, lt.astype(np.int64), le.astype(np.int64)


def discrepancy_exact(z: TorusSequence) -> tuple[float, float]:
    """(d_star, d_extreme), exact over all boxes; refuses large inputs."""
    cap = _EXACT_CAPS.get(z.r)
    if cap is None or z.m > cap:
        raise DiscrepancySizeError(
            f"exact mode supports m <= {_EXACT_CAPS.get(z.r, 0)} for r = {z.r}; "
            "use discrepancy_bracket"
        )
    if z.r == 1:
        v, lt, le = _unique_counts_sorted(z.points[:, 0])
        d_star = kernels.disc1_star(v, lt, le, z.m)
        d_ext = kernels.disc1_extreme(v, lt, le, z.m)
    else:
        d_star = _disc2_star(z.points, z.m)
        d_ext = kernels.disc2_extreme(
            np.ascontiguousarray(z.points[:, 0]),
            np.ascontiguousarray(z.points[:, 1]),
            z.m,
        )
    assert d_star <= d_ext + 1e-12
    return float(d_star), float(d_ext)


def _disc2_star(pts: np.ndarray, m: int) -> float:
    """Star discrepancy for r=2 via prefix counts over the coordinate grid."""
    ux = np.unique(pts[:, 0])
    uy = np.unique(pts[:, 1])
    ix = np.searchsorted(ux, pts[:, 0])
    iy = np.searchsorted(uy, pts[:, 1])
    hist = np.zeros((ux.size, uy.size), dtype=np.int64)
    np.add.at(hist, (ix, iy), 1)
    # padded prefix: pref[i, j] = count of points with x < ux[i], y < uy[j]
    pref = np.zeros((ux.size + 1, uy.size + 1), dtype=np.int64)
    pref[1:, 1:] = hist.cumsum(axis=0).cumsum(axis=1)
    vx = np.concatenate((ux, [1.0]))
    vy = np.concatenate((uy, [1.0]))
    area = vx[:, None] * vy[None, :]
    count_le = _pad_le(pref, ux.size, uy.size)
    count_lt = _pad_lt(pref, ux.size, uy.size)
    d_plus = float(np.max(count_le / m - area))
    d_minus = float(np.max(area - count_lt / m))
    return max(d_plus, d_minus, 0.0)


def _pad_le(pref, nx, ny):
    # count(X <= vx_i, Y <= vy_j) for vx including the sentinel 1.0
    out = np.empty((nx + 1, ny + 1), dtype=np.int64)
    out[:nx, :ny] = pref[1:, 1:]
    out[nx, :ny] = pref[nx, 1:]
    out[:nx, ny] = pref[1:, ny]
    out[nx, ny] = pref[nx, ny]
    return out


def _pad_lt(pref, nx, ny):
    # count(X < vx_i, Y < vy_j); every point has coordinates < 1.0
    out = np.empty((nx + 1, ny + 1), dtype=np.int64)
    out[:nx, :ny] = pref[:nx, :ny]
    out[nx, :ny] = pref[nx, :ny]
    out[:nx, ny] = pref[:nx, ny]
    out[nx, ny] = pref[nx, ny]
    return out


def discrepancy_bruteforce(z: TorusSequence) -> float:
    """Validation oracle: enumerate every candidate box directly.

    Closed boxes at coordinate pairs realize the positive suprema, open
    boxes (augmented with the domain edges) the negative ones.
    """
    if z.m > 60 or z.r > 2:
        raise DiscrepancySizeError("brute-force oracle is for m <= 60, r <= 2")
    m = z.m
    if z.r == 1:
        xs = z.points[:, 0]
        vals = np.unique(np.concatenate((xs, [0.0, 1.0])))
        best = 0.0
        for i in range(vals.size):
            for j in range(i, vals.size):
                a, b = vals[i], vals[j]
                closed = int(np.sum((xs >= a) & (xs <= b)))
                opened = int(np.sum((xs > a) & (xs < b)))
                best = max(best, closed / m - (b - a), (b - a) - opened / m)
        return best
    xs, ys = z.points[:, 0], z.points[:, 1]
    vx = np.unique(np.concatenate((xs, [0.0, 1.0])))
    vy = np.unique(np.concatenate((ys, [0.0, 1.0])))
    best = 0.0
    for i1, i2 in itertools.combinations_with_replacement(range(vx.size), 2):
        in_x_closed = (xs >= vx[i1]) & (xs <= vx[i2])
        in_x_open = (xs > vx[i1]) & (xs < vx[i2])
        wx = vx[i2] - vx[i1]
        for j1, j2 in itertools.combinations_with_replacement(range(vy.size), 2):
            wy = vy[j2] - vy[j1]
            closed = int(np.sum(in_x_closed & (ys >= vy[j1]) & (ys <= vy[j2])))
            opened = int(np.sum(in_x_open & (ys > vy[j1]) & (ys < vy[j2])))
            best = max(best, closed / m - wx * wy, wx * wy - opened / m)
    return best


# -- bracketed discrepancy -------------------------------------------------------

def discrepancy_bracket(z: TorusSequence, effort: int) -> tuple[float, float]:
    """[lower, upper] containing the extreme discrepancy; tightens with effort.

    Per level, a power-of-two grid G gives lower = max |disc| over
    grid-aligned boxes (each one a genuine box) and upper = lower + 2r/G
    (snapping any box's faces to the grid moves count one way and measure by
    at most 2r/G).  Levels intersect cumulatively, so brackets nest.
    """
    if effort < 1:
        raise ValueError("effort must be >= 1")
    if z.r > 2:
        raise DiscrepancySizeError("brackets implemented for r <= 2")
    lo, hi = 0.0, 1.0
    for e in range(1, effort + 1):
        g = _GRID_BASE[z.r] * 2**e
        if z.r == 1:
            idx = np.minimum((z.points[:, 0] * g).astype(np.int64), g - 1)
            cells = np.bincount(idx, minlength=g).astype(np.int64)
            level_lo = kernels.grid_extreme_1d(cells, z.m)
        else:
            ix = np.minimum((z.points[:, 0] * g).astype(np.int64), g - 1)
            iy = np.minimum((z.points[:, 1] * g).astype(np.int64), g - 1)
            cells = np.zeros((g, g), dtype=np.int64)
            np.add.at(cells, (ix, iy), 1)
            level_lo = kernels.grid_extreme_2d(cells, z.m)
        lo = max(lo, level_lo - _FLOAT_GUARD)
        hi = min(hi, level_lo + 2.0 * z.r / g + _FLOAT_GUARD)
    return lo, hi


# -- Erdős–Turán–Koksma ----------------------------------------------------------

def etk_bound(z: TorusSequence, n_freq: int, c_r: float | None = None) -> float:
    """C_r*(1/N + sum over 1 <= ||h||inf <= N of |S_h|/(c(h)*m)), h lexicographic."""
    if n_freq < 1:
        raise ValueError("N must be >= 1")
    if c_r is None:
        c_r = default_c_r(z.r)
    if c_r <= 0:
        raise ValueError("C_r must be positive")
    n_terms = (2 * n_freq + 1) ** z.r - 1
    if n_terms > _MAX_ETK_TERMS:
        raise ValueError(f"{n_terms} frequency terms exceed cap {_MAX_ETK_TERMS}")
    total = 0.0
    for h in itertools.product(range(-n_freq, n_freq + 1), repeat=z.r):
        if all(v == 0 for v in h):
            continue
        ch = 1
        for v in h:
            ch *= max(1, abs(v))
        total += weyl_sum(z, h).magnitude_over_m / ch
    return c_r * (1.0 / n_freq + total)


# -- the box-hit implication ------------------------------------------------------

@dataclass(frozen=True)
class Lemma1Report:
    m: int
    r: int
    p: int
    box_volume: float  # 1/p^r
    d_star: float | None
    d_lower: float
    d_upper: float
    d_exact_mode: bool
    etk_rhs: float
    n_freq: int
    c_r: float
    etk_route: bool
    direct_route: bool
    hypothesis_met: bool
    box_hit: bool
    first_red: int | None
    verdict: str  # confirmed | inconclusive | violated

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "r": self.r,
            "p": self.p,
            "box_volume": self.box_volume,
            "d_star": self.d_star,
            "d_lower": self.d_lower,
            "d_upper": self.d_upper,
            "d_exact_mode": self.d_exact_mode,
            "etk_rhs": self.etk_rhs,
            "N": self.n_freq,
            "C_r": self.c_r,
            "etk_route": self.etk_route,
            "direct_route": self.direct_route,
            "hypothesis_met": self.hypothesis_met,
            "box_hit": self.box_hit,
            "first_red": self.first_red,
            "verdict": self.verdict,
        }


def lemma1_check(
    spec: ColoringSpec,
    lp: LineParams,
    n_freq: int,
    c_r: float | None = None,
    effort: int = 3,
) -> Lemma1Report:
    """Check: discrepancy (or its ETK upper bound) below 1/p^r forces a box hit.

    The claim is one-sided: when neither bound gets below 1/p^r the report
    says inconclusive, never violated.
    """
    z = torus_sequence(spec, lp)
    if c_r is None:
        c_r = default_c_r(z.r)
    try:
        d_star, d_ext = discrepancy_exact(z)
        d_lower = d_upper = d_ext
        exact_mode = True
    except DiscrepancySizeError:
        d_star = None
        d_lower, d_upper = discrepancy_bracket(z, effort)
        exact_mode = False
    rhs = etk_bound(z, n_freq, c_r)
    target = 1.0 / spec.p**z.r
    res = first_red_scan(spec, lp)
    box_hit = res.index is not None
    etk_route = rhs < target
    direct_route = d_upper < target
    hypothesis = etk_route or direct_route
    if not hypothesis:
        verdict = "inconclusive"
    elif box_hit:
        verdict = "confirmed"
    else:
        verdict = "violated"
    return Lemma1Report(
        m=lp.m,
        r=z.r,
        p=spec.p,
        box_volume=target,
        d_star=d_star,
        d_lower=d_lower,
        d_upper=d_upper,
        d_exact_mode=exact_mode,
        etk_rhs=rhs,
        n_freq=n_freq,
        c_r=c_r,
        etk_route=etk_route,
        direct_route=direct_route,
        hypothesis_met=hypothesis,
        box_hit=box_hit,
        first_red=res.index,
        verdict=verdict,
    )


def lemma1_recipe(
    spec: ColoringSpec,
    beta: float | Fraction,
    gamma: float | Fraction,
    c_r: float | None = None,
    m_start: int = 1000,
    m_limit: int = 10**7,
) -> tuple[int, int, float]:
    """Constructive parameters: N > 2*C_r*p^r, then m doubled until the
    weighted Weyl tail drops below 1/(2*p^r).  Returns (N, m, tail)."""
    r = spec.r
    if c_r is None:
        c_r = default_c_r(r)
    n_freq = math.floor(2 * c_r * spec.p**r) + 1
    target = 1.0 / (2 * spec.p**r)
    m = m_start
    while m <= m_limit:
        z = torus_sequence(spec, LineParams(beta=beta, gamma=gamma, m=m))
        tail = etk_bound(z, n_freq, c_r) - c_r / n_freq
        if tail < target:
            return n_freq, m, tail
        m *= 2
    raise RuntimeError(f"Weyl tail did not reach {target} below m_limit={m_limit}")


@dataclass(frozen=True)
class DiscrepancyReport:
    m: int
    r: int
    d_star: float | None
    d_extreme: float | tuple[float, float]
    etk_rhs: float | None
    n_used: int | None
    c_r_used: float | None

    def to_json(self) -> dict:
        d_ext = (
            list(self.d_extreme)
            if isinstance(self.d_extreme, tuple)
            else self.d_extreme
        )
        return {
            "m": self.m,
            "r": self.r,
            "d_star": self.d_star,
            "d_extreme": d_ext,
            "etk_rhs": self.etk_rhs,
            "N_used": self.n_used,
            "C_r_used": self.c_r_used,
        }
