"""Exact arithmetic in real multiquadratic fields Q(sqrt(d1), ..., sqrt(dt)).

A FieldElement is a finite rational combination of square roots of distinct
squarefree integers, canonically keyed by the squarefree radicand (key 1 is
the rational part).  Because square roots of distinct squarefree integers are
linearly independent over Q, structural equality of the coefficient map is
exact equality of real numbers, and a nonzero surd part certifies
irrationality.  That fact is what makes certified floors terminate.
"""

from __future__ import annotations

import math
import os
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

DEFAULT_PRECISION_BITS = 64
MIN_PRECISION_BITS = 40

# Refinement guard: approx widths shrink geometrically, so needing more than
# this many bits to separate a floor means a canonicalization bug, not a
# hard input.
_MAX_REFINE_BITS = 1 << 20


class ZeroSpanError(ValueError):
    """Raised when a Q-span basis is requested for an all-zero family."""


def precision_floor() -> int:
    """Default certified-precision floor in bits (env RCL_PRECISION_BITS)."""
    raw = os.environ.get("RCL_PRECISION_BITS")
    if raw is None:
        return DEFAULT_PRECISION_BITS
    return max(MIN_PRECISION_BITS, int(raw))


def squarefree_split(n: int) -> tuple[int, int]:
    """Write n = s*s*f with f squarefree; returns (s, f).  n must be >= 1."""
    if n < 1:
        raise ValueError("radicand must be a positive integer")
    s, f, d = 1, 1, 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            s *= d ** (e // 2)
            if e % 2:
                f *= d
        d += 1 if d == 2 else 2
    return s, f * n


_SQRT_CACHE: dict[tuple[int, int], tuple[Fraction, Fraction]] = {}


def _sqrt_bounds(d: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(d) <= hi with hi - lo <= 2**-bits."""
    key = (d, bits)
    cached = _SQRT_CACHE.get(key)
    if cached is None:
        n = math.isqrt(d << (2 * bits))
        lo = Fraction(n, 1 << bits)
        hi = Fraction(n + 1, 1 << bits)
        cached = _SQRT_CACHE[key] = (lo, hi)
    return cached


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected int or Fraction, got {type(value).__name__}")


class FieldElement:
    """An exact real number c_1 + sum c_d * sqrt(d) over squarefree d >= 2."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, Fraction] | None = None):
        canon: dict[int, Fraction] = {}
        if coeffs:
            for k, v in coeffs.items():
                v = _as_fraction(v)
                if v:
                    canon[k] = canon.get(k, Fraction(0)) + v
            canon = {k: v for k, v in canon.items() if v}
        self._coeffs = canon

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rational(cls, q) -> "FieldElement":
        q = _as_fraction(q)
        return cls({1: q}) if q else cls()

    @classmethod
    def sqrt_int(cls, d: int) -> "FieldElement":
        """sqrt(d) for a positive integer d, reduced to s*sqrt(f) canonical."""
        s, f = squarefree_split(d)
        if f == 1:
            return cls.from_rational(s)
        return cls({f: Fraction(s)})

    # -- inspection --------------------------------------------------------

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._coeffs)

    def surd_keys(self) -> list[int]:
        return sorted(k for k in self._coeffs if k != 1)

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_rational(self) -> bool:
        return all(k == 1 for k in self._coeffs)

    def rational_part(self) -> Fraction:
        return self._coeffs.get(1, Fraction(0))

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.rational_part()

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "FieldElement":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._coeffs)
        for k, v in other._coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return FieldElement(out)

    __radd__ = __add__

    def __neg__(self) -> "FieldElement":
        return FieldElement({k: -v for k, v in self._coeffs.items()})

    def __sub__(self, other) -> "FieldElement":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "FieldElement":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "FieldElement":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for ka, va in self._coeffs.items():
            for kb, vb in other._coeffs.items():
                g = math.gcd(ka, kb)
                key = (ka // g) * (kb // g)
                coef = va * vb * g
                out[key] = out.get(key, Fraction(0)) + coef
        return FieldElement(out)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse via the product of Galois conjugates."""
        if not self._coeffs:
            raise ZeroDivisionError("inverse of zero field element")
        if self.is_rational():
            return FieldElement.from_rational(1 / self.rational_part())
        primes = sorted({p for k in self.surd_keys() for p in _prime_factors(k)})
        acc = FieldElement.from_rational(1)
        for mask in range(1, 1 << len(primes)):
            flip = {primes[i] for i in range(len(primes)) if mask >> i & 1}
            acc = acc * self._conjugate(flip)
        norm = (acc * self).as_fraction()
        return acc * (Fraction(1) / norm)

    def __truediv__(self, other) -> "FieldElement":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def _conjugate(self, flip_primes: set[int]) -> "FieldElement":
        out = {}
        for k, v in self._coeffs.items():
            sign = -1 if len(flip_primes & set(_prime_factors(k))) % 2 else 1
            out[k] = sign * v
        return FieldElement(out)

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(frozenset(self._coeffs.items()))

    def sign(self) -> int:
        """Certified sign: -1, 0, or +1."""
        if not self._coeffs:
            return 0
        if self.is_rational():
            q = self.rational_part()
            return -1 if q < 0 else 1
        fast = self._binomial()
        if fast is not None:
            a, b, d, _ = fast
            # a + b*sqrt(d) vs 0: compare a and -b*sqrt(d) by squaring.
            if b > 0:
                if a >= 0:
                    return 1
                return 1 if a * a < b * b * d else -1
            if a <= 0:
                return -1
            return 1 if a * a > b * b * d else -1
        bits = precision_floor()
        while bits <= _MAX_REFINE_BITS:
            lo, hi = self.approx(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2
        raise RuntimeError("sign refinement failed to converge")

    def __lt__(self, other) -> bool:
        other = _coerce(other)
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        other = _coerce(other)
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        other = _coerce(other)
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        other = _coerce(other)
        return (self - other).sign() >= 0

    # -- certified evaluation ------------------------------------------------

    def approx(self, precision_bits: int) -> tuple[Fraction, Fraction]:
        """Rational [lo, hi] containing the value, hi - lo <= 2**-precision_bits."""
        if precision_bits < 1:
            raise ValueError("precision_bits must be >= 1")
        lo = hi = self._coeffs.get(1, Fraction(0))
        surds = [(k, v) for k, v in self._coeffs.items() if k != 1]
        if not surds:
            return lo, hi
        weight = sum(abs(v) for _, v in surds)
        k = precision_bits + max(0, weight.__ceil__().bit_length()) + 2
        for d, c in surds:
            slo, shi = _sqrt_bounds(d, k)
            if c >= 0:
                lo += c * slo
                hi += c * shi
            else:
                lo += c * shi
                hi += c * slo
        return lo, hi

    def _binomial(self) -> tuple[int, int, int, int] | None:
        """Single-surd view: (A, B, d, Q) with the element == (A + B*sqrt(d))/Q.

        None when the element has more than one surd term.
        """
        keys = self.surd_keys()
        if len(keys) != 1:
            return None
        d = keys[0]
        a = self._coeffs.get(1, Fraction(0))
        b = self._coeffs[d]
        q = math.lcm(a.denominator, b.denominator)
        return (int(a * q), int(b * q), d, q)

    def floor(self) -> int:
        """Exact floor; certified by interval refinement or integer sqrt bounds."""
        if self.is_rational():
            return math.floor(self.rational_part())
        fast = self._binomial()
        if fast is not None:
            a, b, d, q = fast
            # floor((a + b*sqrt(d))/q): bracket b*sqrt(d) by isqrt, then
            # correct the remaining off-by-one exactly.
            s = math.isqrt(b * b * d)
            n = (a + (s if b > 0 else -s - 1)) // q
            # floor is the largest n with n*q <= a + b*sqrt(d):
            while _binomial_ge(a - (n + 1) * q, b, d):
                n += 1
            while not _binomial_ge(a - n * q, b, d):
                n -= 1
            return n
        bits = precision_floor()
        while bits <= _MAX_REFINE_BITS:
            lo, hi = self.approx(bits)
            flo, fhi = math.floor(lo), math.floor(hi)
            if flo == fhi:
                return flo
            bits *= 2
        raise RuntimeError("floor refinement failed to converge")

    def __float__(self) -> float:
        lo, hi = self.approx(80)
        return float((lo + hi) / 2)

    # -- formatting ----------------------------------------------------------

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for k in sorted(self._coeffs):
            c = self._coeffs[k]
            body = str(abs(c)) if k == 1 else f"{abs(c)}*sqrt({k})"
            if not parts:
                parts.append(f"-{body}" if c < 0 else body)
            else:
                parts.append(f"{'-' if c < 0 else '+'} {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"FieldElement({str(self)!r})"


def _binomial_ge(u: int, b: int, d: int) -> bool:
    """Exact test u + b*sqrt(d) >= 0 for integers u, b and squarefree d."""
    if b == 0:
        return u >= 0
    if b > 0:
        return u >= 0 or u * u <= b * b * d
    return u > 0 and u * u >= b * b * d


_PRIME_CACHE: dict[int, tuple[int, ...]] = {}


def _prime_factors(n: int) -> tuple[int, ...]:
    cached = _PRIME_CACHE.get(n)
    if cached is not None:
        return cached
    out, m, d = [], n, 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out.append(m)
    result = tuple(out)
    _PRIME_CACHE[n] = result
    return result


def _coerce(x):
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, (int, Fraction)):
        return FieldElement.from_rational(x)
    return NotImplemented


ZERO = FieldElement()
ONE = FieldElement.from_rational(1)


# -- spec-surface functions ---------------------------------------------------

def add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def is_rational(x: FieldElement) -> bool:
    return x.is_rational()


def approx(x: FieldElement, precision_bits: int) -> tuple[Fraction, Fraction]:
    return x.approx(precision_bits)


def floor_certified(x: FieldElement) -> int:
    return x.floor()


def sign_certified(x: FieldElement) -> int:
    return x.sign()


# -- Q-span basis --------------------------------------------------------------

def q_span_basis(
    elements: Sequence[FieldElement],
) -> tuple[list[FieldElement], list[list[Fraction]]]:
    """Reduced basis of the Q-span of `elements`, plus coordinates.

    Returns (basis, coords) with elements[j] == sum_k coords[j][k]*basis[k].
    The basis comes from the reduced row echelon form of the coefficient
    matrix over the sorted key set, so it is deterministic; coordinates are
    read off at the pivot columns.
    """
    if not elements:
        raise ZeroSpanError("zero span")
    keys = sorted({k for e in elements for k in e._coeffs})
    if not keys:
        raise ZeroSpanError("zero span")
    rows = [[e._coeffs.get(k, Fraction(0)) for k in keys] for e in elements]
    rref, pivots = _rref_rational([row[:] for row in rows])
    if not pivots:
        raise ZeroSpanError("zero span")
    basis = [
        FieldElement({keys[c]: row[c] for c in range(len(keys)) if row[c]})
        for row in rref[: len(pivots)]
    ]
    coords = [[row[p] for p in pivots] for row in rows]
    return basis, coords


def _rref_rational(m: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """In-place reduced row echelon form over Q; returns (matrix, pivot cols)."""
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        pr = next((i for i in range(r, n_rows) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


# -- parsing / printing ---------------------------------------------------------

_TERM_RE = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:
            (?P<coef>\d+(?:\s*/\s*\d+)?)\s*(?:\*\s*sqrt\(\s*(?P<rad1>\d+)\s*\))?
          | sqrt\(\s*(?P<rad2>\d+)\s*\)
        )\s*""",
    re.VERBOSE,
)


def parse(text: str) -> FieldElement:
    """Parse the textual form, e.g. '3/2 + 5/7*sqrt(2) - 1*sqrt(6)'."""
    s = text.strip()
    if not s:
        raise ValueError("empty field element")
    pos = 0
    out = FieldElement()
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse field element {text!r} at {s[pos:]!r}")
        sign = m.group("sign")
        if sign is None and not first:
            raise ValueError(f"missing +/- between terms in {text!r}")
        mult = -1 if sign == "-" else 1
        if m.group("rad2") is not None:
            coef, rad = Fraction(1), int(m.group("rad2"))
        else:
            coef = Fraction(m.group("coef").replace(" ", ""))
            rad = int(m.group("rad1")) if m.group("rad1") else None
        term = (
            FieldElement.from_rational(mult * coef)
            if rad is None
            else FieldElement.sqrt_int(rad) * (mult * coef)
        )
        out = out + term
        pos = m.end()
        first = False
    return out
