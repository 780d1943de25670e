# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: hot loops for torus generation, box scans, Weyl sums,
and discrepancy box optimization.

torus_fill/box_scan use Dekker double-double arithmetic in the exact IEEE
operation order of the _kernels_py fallback (build flags disable FMA
contraction), so results are bit-identical between backends.
"""

from libc.math cimport cos, sin, floor, fabs

import numpy as np

DEF SPLIT = 134217729.0
DEF TWO_PI = 6.283185307179586


cdef inline double _two_sum(double a, double b, double *err) nogil:
    cdef double s = a + b
    cdef double bb = s - a
    err[0] = (a - (s - bb)) + (b - bb)
    return s


cdef inline double _two_prod(double a, double b, double *err) nogil:
    cdef double p = a * b
    cdef double ca = SPLIT * a
    cdef double ah = ca - (ca - a)
    cdef double al = a - ah
    cdef double cb = SPLIT * b
    cdef double bh = cb - (cb - b)
    cdef double bl = b - bh
    err[0] = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p


cdef inline void _dd_mul_d(double xh, double xl, double c,
                           double *rh, double *rl) nogil:
    cdef double e, p, s
    p = _two_prod(xh, c, &e)
    e = e + xl * c
    s = p + e
    rh[0] = s
    rl[0] = e - (s - p)


cdef inline void _dd_add_dd(double xh, double xl, double yh, double yl,
                            double *rh, double *rl) nogil:
    cdef double e, s, t
    s = _two_sum(xh, yh, &e)
    e = e + (xl + yl)
    t = s + e
    rh[0] = t
    rl[0] = e - (t - s)


def torus_fill(double[:, ::1] coefs, long j0, long n, double[:, ::1] out):
    """Fill out[i, k] = frac(A2_k*j^2 + A1_k*j + A0_k) for j = j0..j0+n-1."""
    cdef long i, k
    cdef long r = coefs.shape[0]
    cdef double jd, uh, ul, fr, s, e, z
    for k in range(r):
        for i in range(n):
            jd = <double> (j0 + i)
            _dd_mul_d(coefs[k, 0], coefs[k, 1], jd, &uh, &ul)
            _dd_add_dd(uh, ul, coefs[k, 2], coefs[k, 3], &uh, &ul)
            _dd_mul_d(uh, ul, jd, &uh, &ul)
            _dd_add_dd(uh, ul, coefs[k, 4], coefs[k, 5], &uh, &ul)
            fr = uh - floor(uh)
            s = _two_sum(fr, ul, &e)
            z = s + e
            if z >= 1.0:
                z = z - 1.0
            if z < 0.0:
                z = z + 1.0
            if z >= 1.0:
                z = 0.0
            out[i, k] = z


def box_scan(double[:, ::1] z, double bound, double tol):
    """First row certainly inside [0, bound)^r plus ambiguous rows before it."""
    cdef long m = z.shape[0]
    cdef long r = z.shape[1]
    cdef long i, k, hit = -1
    cdef double v
    cdef bint row_in, row_out, coord_in, coord_out
    amb_list = []
    for i in range(m):
        row_in = True
        row_out = False
        for k in range(r):
            v = z[i, k]
            coord_in = (v >= tol) and (v < bound - tol)
            coord_out = (v > bound + tol) and (v < 1.0 - tol)
            if coord_out:
                row_out = True
                break
            if not coord_in:
                row_in = False
        if row_out:
            continue
        if row_in:
            hit = i
            break
        amb_list.append(i)
    return hit, np.asarray(amb_list, dtype=np.int64)


def weyl_sum(double[:, ::1] z, long[::1] h):
    """Neumaier-compensated sum of e(<h, z_j>); returns (re, im)."""
    cdef long m = z.shape[0]
    cdef long r = z.shape[1]
    cdef long i, k
    cdef double ph, ang, x, t
    cdef double sre = 0.0, cre = 0.0, sim = 0.0, cim = 0.0
    for i in range(m):
        ph = 0.0
        for k in range(r):
            ph += (<double> h[k]) * z[i, k]
        ang = TWO_PI * ph
        x = cos(ang)
        t = sre + x
        if fabs(sre) >= fabs(x):
            cre += (sre - t) + x
        else:
            cre += (x - t) + sre
        sre = t
        x = sin(ang)
        t = sim + x
        if fabs(sim) >= fabs(x):
            cim += (sim - t) + x
        else:
            cim += (x - t) + sim
        sim = t
    return sre + cre, sim + cim


def disc1_star(double[::1] v, long[::1] lt, long[::1] le, long m):
    """Star discrepancy from unique sorted values and their <,<= counts."""
    cdef long i
    cdef double md = <double> m
    cdef double best = 0.0, a, b
    for i in range(v.shape[0]):
        a = v[i] - lt[i] / md
        b = le[i] / md - v[i]
        if a > best:
            best = a
        if b > best:
            best = b
    return best


def disc1_extreme(double[::1] v, long[::1] lt, long[::1] le, long m):
    """Extreme (all-interval) discrepancy from unique sorted values."""
    cdef long n = v.shape[0]
    cdef long i
    cdef double md = <double> m
    cdef double best = 0.0, run, cand
    run = -1e300
    for i in range(n):
        cand = v[i] - lt[i] / md
        if cand > run:
            run = cand
        cand = le[i] / md - v[i] + run
        if cand > best:
            best = cand
    # open intervals over values augmented with the domain edges 0 and 1
    cdef double[::1] va
    cdef long[::1] alt, ale
    va, alt, ale = _augment01(np.asarray(v), np.asarray(lt), np.asarray(le), m)
    n = va.shape[0]
    run = -1e300
    for i in range(n):
        if i > 0:
            cand = va[i] - alt[i] / md + run
            if cand > best:
                best = cand
        cand = ale[i] / md - va[i]
        if cand > run:
            run = cand
    return best


def _augment01(v, lt, le, long m):
    if v.shape[0] == 0 or v[0] != 0.0:
        v = np.concatenate(([0.0], v))
        lt = np.concatenate(([0], lt))
        le = np.concatenate(([0], le))
    if v[v.shape[0] - 1] != 1.0:
        v = np.concatenate((v, [1.0]))
        lt = np.concatenate((lt, [m]))
        le = np.concatenate((le, [m]))
    return (np.ascontiguousarray(v, dtype=np.float64),
            np.ascontiguousarray(lt, dtype=np.int64),
            np.ascontiguousarray(le, dtype=np.int64))


def disc2_extreme(double[::1] xs, double[::1] ys, long m):
    """Extreme discrepancy in r=2 from point coordinates."""
    order = np.argsort(np.asarray(ys), kind="stable")
    cdef double[::1] x_byy = np.ascontiguousarray(np.asarray(xs)[order])
    cdef double[::1] y_byy = np.ascontiguousarray(np.asarray(ys)[order])
    cdef double[::1] ux = np.unique(np.asarray(xs))
    cdef double[::1] uxa = np.unique(np.concatenate(([0.0], np.asarray(xs), [1.0])))
    cdef long n = m
    cdef long ia, ib, i, t, u
    cdef double best = 0.0, w, lo, hi, run, cand, md = <double> m
    cdef double[::1] yv = np.empty(n, dtype=np.float64)
    cdef long[::1] ylt = np.empty(n, dtype=np.int64)
    cdef long[::1] yle = np.empty(n, dtype=np.int64)

    # positive part: closed strips [ux[ia], ux[ib]]
    for ia in range(ux.shape[0]):
        for ib in range(ia, ux.shape[0]):
            lo = ux[ia]
            hi = ux[ib]
            w = hi - lo
            u = 0
            t = 0
            for i in range(n):
                if lo <= x_byy[i] <= hi:
                    if u > 0 and y_byy[i] == yv[u - 1]:
                        t += 1
                        yle[u - 1] = t
                    else:
                        yv[u] = y_byy[i]
                        ylt[u] = t
                        t += 1
                        yle[u] = t
                        u += 1
            if u == 0:
                continue
            run = -1e300
            for i in range(u):
                cand = w * yv[i] - ylt[i] / md
                if cand > run:
                    run = cand
                cand = yle[i] / md - w * yv[i] + run
                if cand > best:
                    best = cand

    # negative part: open strips over x values augmented with 0 and 1
    cdef bint first
    for ia in range(uxa.shape[0]):
        for ib in range(ia + 1, uxa.shape[0]):
            lo = uxa[ia]
            hi = uxa[ib]
            w = hi - lo
            u = 0
            t = 0
            for i in range(n):
                if lo < x_byy[i] < hi:
                    if u > 0 and y_byy[i] == yv[u - 1]:
                        t += 1
                        yle[u - 1] = t
                    else:
                        yv[u] = y_byy[i]
                        ylt[u] = t
                        t += 1
                        yle[u] = t
                        u += 1
            # run over ale/m - w*va for endpoints seen so far; virtual start
            # at 0.0 (counts 0) applies unless a strip value sits at exactly 0
            first = True
            run = -1e300
            if u == 0 or yv[0] != 0.0:
                run = 0.0
                first = False
            for i in range(u):
                if not first:
                    cand = w * yv[i] - ylt[i] / md + run
                    if cand > best:
                        best = cand
                cand = yle[i] / md - w * yv[i]
                if first or cand > run:
                    run = cand
                first = False
            # virtual end at 1.0: all t strip points lie strictly below it
            cand = w * 1.0 - t / md + run
            if cand > best:
                best = cand
    return best


def grid_extreme_1d(long[::1] cells, long m):
    """Max |disc| over grid-aligned boxes given per-cell counts."""
    cdef long g = cells.shape[0]
    cdef long i
    cdef double md = <double> m, gd = <double> g
    cdef double best = 0.0, runp, runn, edge, pv, cand
    cdef long acc = 0
    runp = -1e300
    runn = -1e300
    for i in range(g + 1):
        edge = i / gd
        pv = acc / md
        cand = edge - pv
        if cand > runp:
            runp = cand
        cand = pv - edge + runp
        if cand > best:
            best = cand
        cand = pv - edge
        if cand > runn:
            runn = cand
        cand = edge - pv + runn
        if cand > best:
            best = cand
        if i < g:
            acc += cells[i]
    return best


def grid_extreme_2d(long[:, ::1] cells, long m):
    """Max |disc| over grid-aligned boxes from a (G, G) cell-count matrix."""
    cdef long g = cells.shape[0]
    cdef long i1, i2, j
    cdef double md = <double> m, gd = <double> g
    cdef double best = 0.0, w, runp, runn, edge, pv, cand
    cdef long[::1] col = np.zeros(g, dtype=np.int64)
    cdef long acc
    for i1 in range(g):
        for j in range(g):
            col[j] = 0
        for i2 in range(i1 + 1, g + 1):
            for j in range(g):
                col[j] += cells[i2 - 1, j]
            w = (i2 - i1) / gd
            acc = 0
            runp = -1e300
            runn = -1e300
            for j in range(g + 1):
                edge = j / gd
                pv = acc / md
                cand = w * edge - pv
                if cand > runp:
                    runp = cand
                cand = pv - w * edge + runp
                if cand > best:
                    best = cand
                cand = pv - w * edge
                if cand > runn:
                    runn = cand
                cand = w * edge - pv + runn
                if cand > best:
                    best = cand
                if j < g:
                    acc += col[j]
    return best
