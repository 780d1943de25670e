"""Empirical no-red-copy verification in squared-norm space.

Norm tuples satisfying the recast equation sum_j sum_k q_jk a_k y_j = B' are
a superset of the squared norms of actual congruent copies, so finding zero
all-red tuples among them is a per-sample strengthening of the no-red-copy
statement.  The integer chain S = sum q*floor(a*y), |B' - S| < sum|q| < B',
S = 0 mod p is certified exactly on every sample.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .builder import ColoringSpec
from .coloring import Colour, colour_norm, floors_norm
from .numfield import FieldElement


class NotAllRedError(ValueError):
    pass


class Eq1ViolatedError(ValueError):
    pass


@dataclass(frozen=True)
class NormTuple:
    y: tuple[FieldElement, ...]

    def __post_init__(self):
        for v in self.y:
            if v.sign() < 0:
                raise ValueError("squared norms must be nonnegative")


def check_eq1(spec: ColoringSpec, t: NormTuple) -> bool:
    """Exact test of sum_j sum_k q_jk a_k y_j == B'."""
    if len(t.y) != spec.s:
        raise ValueError(f"tuple has {len(t.y)} norms; spec wants {spec.s}")
    acc = FieldElement()
    for wj, yj in zip(spec.row_weights(), t.y):
        acc = acc + wj * yj
    return acc == spec.Bprime


@dataclass(frozen=True)
class Witness:
    """The integer the mod-p contradiction hinges on, with certified facts."""

    S: int
    mod_p: int
    in_open_range: bool  # 0 < S < 2B', certified
    is_contradiction: bool  # in range and = 0 mod p (with p > 2B')

    def to_json(self) -> dict:
        return {
            "S": self.S,
            "mod_p": self.mod_p,
            "in_open_range": self.in_open_range,
            "is_contradiction": self.is_contradiction,
        }


def floor_sum(spec: ColoringSpec, t: NormTuple) -> int:
    """S = sum_j sum_k q_jk * floor(a_k * y_j)."""
    total = 0
    for row, yj in zip(spec.q, t.y):
        floors = floors_norm(spec, yj)
        total += sum(qjk * fk for qjk, fk in zip(row, floors))
    return total


def contradiction_witness(spec: ColoringSpec, t: NormTuple) -> Witness:
    """For an all-red tuple satisfying the equation, the asserted-contradictory
    pair: S = 0 mod p yet S in (0, 2B') with (0, 2B') inside (0, p).

    On a sound spec no such tuple exists, so a successful call certifies the
    caller fed tampered inputs; the distinct precondition errors separate the
    two legitimate failure modes.
    """
    if not check_eq1(spec, t):
        raise Eq1ViolatedError("tuple does not satisfy the recast equation")
    colours = [colour_norm(spec, yj) for yj in t.y]
    if any(col is not Colour.RED for col in colours):
        raise NotAllRedError("not all red")
    s_val = floor_sum(spec, t)
    in_range = s_val > 0 and (spec.Bprime * 2 - s_val).sign() > 0
    return Witness(
        S=s_val,
        mod_p=s_val % spec.p,
        in_open_range=in_range,
        is_contradiction=in_range and s_val % spec.p == 0,
    )


@dataclass
class ScanReport:
    samples: int
    accepted: int
    discarded_negative: int
    all_red_count: int
    red_count_histogram: dict[int, int]
    chain_violations: int
    seed: int
    num_bits: int
    den_bits: int
    solve_index: int

    def merge(self, other: "ScanReport") -> "ScanReport":
        hist = dict(self.red_count_histogram)
        for k, v in other.red_count_histogram.items():
            hist[k] = hist.get(k, 0) + v
        return ScanReport(
            samples=self.samples + other.samples,
            accepted=self.accepted + other.accepted,
            discarded_negative=self.discarded_negative + other.discarded_negative,
            all_red_count=self.all_red_count + other.all_red_count,
            red_count_histogram=hist,
            chain_violations=self.chain_violations + other.chain_violations,
            seed=self.seed,
            num_bits=self.num_bits,
            den_bits=self.den_bits,
            solve_index=self.solve_index,
        )

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "accepted": self.accepted,
            "discarded_negative": self.discarded_negative,
            "all_red_count": self.all_red_count,
            "red_count_histogram": {
                str(k): v for k, v in sorted(self.red_count_histogram.items())
            },
            "chain_violations": self.chain_violations,
            "seed": self.seed,
            "num_bits": self.num_bits,
            "den_bits": self.den_bits,
            "solve_index": self.solve_index,
        }


def _solve_index(spec: ColoringSpec) -> int:
    for j in range(spec.s - 1, -1, -1):
        if any(spec.q[j]):
            return j
    raise ValueError("q matrix is all zero")


def _scan_chunk(spec: ColoringSpec, seed: int, start: int, stop: int,
                num_bits: int, den_bits: int) -> ScanReport:
    solve_j = _solve_index(spec)
    weights = spec.row_weights()
    inv_w = weights[solve_j].inverse()
    report = ScanReport(
        samples=0, accepted=0, discarded_negative=0, all_red_count=0,
        red_count_histogram={}, chain_violations=0, seed=seed,
        num_bits=num_bits, den_bits=den_bits, solve_index=solve_j,
    )
    qsum = spec.abs_q_sum()
    for i in range(start, stop):
        rng = random.Random(f"{seed}:{i}")
        report.samples += 1
        ys: list[FieldElement | None] = [None] * spec.s
        acc = FieldElement()
        for j in range(spec.s):
            if j == solve_j:
                continue
            yj = FieldElement.from_rational(
                Fraction(rng.getrandbits(num_bits), rng.getrandbits(den_bits) + 1)
            )
            ys[j] = yj
            acc = acc + weights[j] * yj
        y_solve = (spec.Bprime - acc) * inv_w
        if y_solve.sign() < 0:
            report.discarded_negative += 1
            continue
        ys[solve_j] = y_solve
        report.accepted += 1
        tup = NormTuple(y=tuple(ys))
        reds = sum(1 for yj in tup.y if colour_norm(spec, yj) is Colour.RED)
        report.red_count_histogram[reds] = report.red_count_histogram.get(reds, 0) + 1
        if reds == spec.s:
            report.all_red_count += 1
        # certified inequality chain on this sample: |B' - S| < sum|q| < B'
        s_val = floor_sum(spec, tup)
        delta = spec.Bprime - s_val
        ok = (
            (delta + qsum).sign() > 0
            and (FieldElement.from_rational(qsum) - delta).sign() > 0
            and (spec.Bprime - qsum).sign() > 0
        )
        if not ok:
            report.chain_violations += 1
    return report


def scan_for_red_copies(
    spec: ColoringSpec,
    samples: int,
    seed: int,
    num_bits: int = 16,
    den_bits: int = 8,
    workers: int = 1,
) -> ScanReport:
    """Sample equation-satisfying norm tuples and count all-red ones.

    Draws s-1 bounded random rationals, back-solves the last nonzero-row
    norm exactly, discards negative solutions.  Per-index seeding makes the
    report independent of chunking, so worker count never changes results.
    """
    if samples < 0:
        raise ValueError("samples must be >= 0")
    if samples == 0 or workers <= 1:
        return _scan_chunk(spec, seed, 0, samples, num_bits, den_bits)
    chunk = (samples + workers - 1) // workers
    ranges = [(i, min(i + chunk, samples)) for i in range(0, samples, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(
            pool.map(
                _scan_chunk_star,
                [(spec, seed, a, b, num_bits, den_bits) for a, b in ranges],
            )
        )
    report = parts[0]
    for part in parts[1:]:
        report = report.merge(part)
    return report


def _scan_chunk_star(args) -> ScanReport:
    return _scan_chunk(*args)
