"""Unit-spaced line machinery: squared norms y_j = j^2 + beta*j + gamma, the
induced torus sequence z_j = (a_1*y_j/p, ..., a_r*y_j/p) mod 1, the first
index landing in the red box [0, 1/p)^r, and the empirical search for the
largest such first index over (beta, gamma) samples.

beta and gamma arrive either as exact rationals (grid samples, enabling the
exact cross-check) or as doubles (dense random scans).  A double input is
treated as the exact rational it denotes, so boundary-ambiguous box hits are
always resolved exactly; for double inputs the sample is additionally
flagged as boundary-sensitive.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .builder import ColoringSpec
from .numfield import FieldElement

_BLOCK_FIRST = 128
_BLOCK_MAX = 8192
_COEF_PRECISION_BITS = 140


@dataclass(frozen=True)
class LineParams:
    beta: float | Fraction
    gamma: float | Fraction
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")

    def exact(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.beta), Fraction(self.gamma)

    @property
    def is_rational_input(self) -> bool:
        return isinstance(self.beta, Fraction) and isinstance(self.gamma, Fraction)


@dataclass(frozen=True)
class TorusSequence:
    r: int
    points: np.ndarray  # shape (m, r), float64 in [0, 1)
    precision_log2: int

    def __post_init__(self):
        if self.precision_log2 < 40:
            raise ValueError("certified precision worse than 2^-40")

    @property
    def m(self) -> int:
        return self.points.shape[0]


class _TorusEvaluator:
    """Double-double coefficients of j -> frac(a_k*(j^2+beta*j+gamma)/p)."""

    def __init__(self, spec: ColoringSpec, beta: Fraction, gamma: Fraction):
        self.spec = spec
        self.beta = beta
        self.gamma = gamma
        rows = []
        self._alpha_exact = []
        for ak in spec.a:
            lo, hi = ak.approx(_COEF_PRECISION_BITS)
            alpha = (lo + hi) / 2 / spec.p
            self._alpha_exact.append(alpha)
            rows.append(
                _dd_pair(alpha) + _dd_pair(alpha * beta) + _dd_pair(alpha * gamma)
            )
        self.coefs = np.array(rows, dtype=np.float64)

    def fill(self, j0: int, n: int) -> np.ndarray:
        out = np.empty((n, self.spec.r), dtype=np.float64)
        kernels.torus_fill(self.coefs, j0, n, out)
        return out

    def precision_log2(self, j_max: int) -> int:
        # error sources: double-double evaluation (~2^-104 relative over a
        # handful of ops), the final collapse to one double (2^-53), and the
        # 2^-140 rational approximation of a_k/p amplified by j_max^2.
        mag = 1.0
        for (a2h, _, a1h, _, a0h, _) in self.coefs:
            mag = max(mag, abs(a2h) * j_max * j_max + abs(a1h) * j_max + abs(a0h))
        err = mag * 2.0**-100 + 2.0**-52 + (1 + j_max * j_max) * 2.0**-138
        return min(50, int(-math.log2(err)))


def _dd_pair(x: Fraction) -> tuple[float, float]:
    hi = float(x)
    lo = float(x - Fraction(hi))
    return hi, lo


def torus_sequence(spec: ColoringSpec, lp: LineParams) -> TorusSequence:
    """The sequence z_j for j = 1..m, certified to 2^-precision_log2 per
    coordinate in the torus metric."""
    beta, gamma = lp.exact()
    ev = _TorusEvaluator(spec, beta, gamma)
    pts = ev.fill(1, lp.m)
    return TorusSequence(r=spec.r, points=pts, precision_log2=ev.precision_log2(lp.m))


def _box_hit_exact(spec: ColoringSpec, beta: Fraction, gamma: Fraction, j: int) -> bool:
    """Exact box membership of z_j: floor(a_k*y_j) = 0 mod p for all k.

    Valid for negative y_j too (the box condition, unlike the colour oracle,
    is defined for any real y).
    """
    y = Fraction(j) * j + beta * j + gamma
    for ak in spec.a:
        if (ak * y).floor() % spec.p != 0:
            return False
    return True


@dataclass
class FirstRedResult:
    index: int | None
    ambiguous_resolved: int
    boundary_flagged: bool


def first_red_index(spec: ColoringSpec, lp: LineParams) -> int | None:
    return first_red_scan(spec, lp).index


def first_red_scan(spec: ColoringSpec, lp: LineParams) -> FirstRedResult:
    """Smallest j in [1, m] with z_j in [0, 1/p)^r, or None.

    Certainly-classified points come from the double-double kernel; points
    within the certified window of a box boundary are re-decided exactly.
    """
    beta, gamma = lp.exact()
    ev = _TorusEvaluator(spec, beta, gamma)
    tol = 2.0 ** -ev.precision_log2(lp.m)
    bound = 1.0 / spec.p
    resolved = 0
    flagged = False
    j = 1
    block = _BLOCK_FIRST  # hits are usually early; grow only on misses
    while j <= lp.m:
        n = min(block, lp.m - j + 1)
        block = min(block * 4, _BLOCK_MAX)
        z = ev.fill(j, n)
        hit, amb = kernels.box_scan(z, bound, tol)
        for rel in amb.tolist():
            resolved += 1
            if not lp.is_rational_input:
                flagged = True
            if _box_hit_exact(spec, beta, gamma, j + rel):
                return FirstRedResult(j + rel, resolved, flagged)
        if hit >= 0:
            return FirstRedResult(j + hit, resolved, flagged)
        j += n
    return FirstRedResult(None, resolved, flagged)


# -- empirical m search ---------------------------------------------------------


@dataclass(frozen=True)
class SamplingPlan:
    """Grid plus random (beta, gamma) samples.

    Grid points are exact rationals (enabling exact cross-checks); random
    samples are doubles drawn per-index from the seed, so a longer random
    run extends a shorter one sample-for-sample.
    """

    grid_beta: int
    grid_gamma: int
    random_count: int
    seed: int
    beta_range: tuple[Fraction, Fraction]
    gamma_range: tuple[Fraction, Fraction]

    def samples(self):
        b0, b1 = self.beta_range
        g0, g1 = self.gamma_range
        for i in range(self.grid_beta):
            beta = b0 + (b1 - b0) * Fraction(i, max(1, self.grid_beta - 1))
            for k in range(self.grid_gamma):
                gamma = g0 + (g1 - g0) * Fraction(k, max(1, self.grid_gamma - 1))
                yield beta, gamma, "rational"
        for i in range(self.random_count):
            rng = random.Random(f"{self.seed}:{i}")
            beta = rng.uniform(float(b0), float(b1))
            gamma = rng.uniform(float(g0), float(g1))
            yield beta, gamma, "double"

    @property
    def total(self) -> int:
        return self.grid_beta * self.grid_gamma + self.random_count


def default_ranges(spec: ColoringSpec) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """[0, ceil(p/min_k a_k) + 1] per axis: covers at least one full period
    of the torus rotation gamma -> a_k*gamma/p in every coordinate."""
    amin = min(float(ak) for ak in spec.a)
    top = Fraction(math.ceil(spec.p / amin) + 1)
    return (Fraction(0), top), (Fraction(0), top)


@dataclass
class SampleRecord:
    beta: float | Fraction
    gamma: float | Fraction
    mode: str
    first_red: int | None
    boundary_flagged: bool

    def to_json(self) -> dict:
        return {
            "beta": _num_json(self.beta),
            "gamma": _num_json(self.gamma),
            "mode": self.mode,
            "first_red": self.first_red,
            "boundary_flagged": self.boundary_flagged,
        }


def _num_json(v):
    return str(v) if isinstance(v, Fraction) else v


@dataclass
class EmpiricalMReport:
    empirical_m: int | None
    argmax_beta: float | Fraction | None
    argmax_gamma: float | Fraction | None
    histogram: dict[int, int]
    censored: list[SampleRecord]
    n_samples: int
    m_cap: int
    records: list[SampleRecord] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "empirical_m": self.empirical_m,
            "argmax_beta": _num_json(self.argmax_beta),
            "argmax_gamma": _num_json(self.argmax_gamma),
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "censored": [s.to_json() for s in self.censored],
            "n_samples": self.n_samples,
            "m_cap": self.m_cap,
        }


def _scan_samples(spec: ColoringSpec, batch, m_cap: int) -> list[SampleRecord]:
    out = []
    for beta, gamma, mode in batch:
        res = first_red_scan(spec, LineParams(beta=beta, gamma=gamma, m=m_cap))
        out.append(
            SampleRecord(
                beta=beta,
                gamma=gamma,
                mode=mode,
                first_red=res.index,
                boundary_flagged=res.boundary_flagged,
            )
        )
    return out


def _scan_samples_star(args) -> list[SampleRecord]:
    return _scan_samples(*args)


def empirical_m(
    spec: ColoringSpec,
    plan: SamplingPlan,
    m_cap: int = 10**6,
    keep_records: bool = False,
    workers: int = 1,
) -> EmpiricalMReport:
    """Max first-red index over the sampling plan, with its histogram.

    Samples whose first m_cap points never certainly hit the box are
    reported as censored observations, not errors.  Samples are independent;
    the fold runs in plan order, so worker count never changes the report.
    """
    if m_cap < 1:
        raise ValueError("m_cap must be >= 1")
    samples = list(plan.samples())
    if workers > 1 and len(samples) >= 2 * workers:
        from concurrent.futures import ProcessPoolExecutor

        chunk = (len(samples) + workers - 1) // workers
        batches = [samples[i : i + chunk] for i in range(0, len(samples), chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_scan_samples_star, [(spec, b, m_cap) for b in batches])
        records = [rec for part in parts for rec in part]
    else:
        records = _scan_samples(spec, samples, m_cap)
    report = EmpiricalMReport(
        empirical_m=None,
        argmax_beta=None,
        argmax_gamma=None,
        histogram={},
        censored=[],
        n_samples=plan.total,
        m_cap=m_cap,
    )
    for rec in records:
        if keep_records:
            report.records.append(rec)
        if rec.first_red is None:
            report.censored.append(rec)
            continue
        report.histogram[rec.first_red] = report.histogram.get(rec.first_red, 0) + 1
        if report.empirical_m is None or rec.first_red > report.empirical_m:
            report.empirical_m = rec.first_red
            report.argmax_beta = rec.beta
            report.argmax_gamma = rec.gamma
    return report
