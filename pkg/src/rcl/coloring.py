"""The point-colouring oracle: red iff floor(a_k*|x|^2) = 0 mod p for all k.

Colour depends on the squared norm only, so one oracle covers every ambient
dimension at once.  The exact path runs entirely through certified floors;
a double-precision fast path with a safety margin serves bulk scans and
returns None inside the margin so callers can fall back to the exact test.
"""

from __future__ import annotations

import enum
from fractions import Fraction

from .builder import ColoringSpec
from .certify import squared_norm
from .numfield import FieldElement


class Colour(enum.Enum):
    RED = "red"
    BLUE = "blue"


def floors_norm(spec: ColoringSpec, y: FieldElement) -> list[int]:
    """The per-k values floor(a_k * y); the oracle reduces these mod p."""
    return [(ak * y).floor() for ak in spec.a]


def colour_norm(spec: ColoringSpec, y: FieldElement | int | Fraction) -> Colour:
    """Colour of any point whose squared norm is y (y >= 0)."""
    if not isinstance(y, FieldElement):
        y = FieldElement.from_rational(y)
    if y.sign() < 0:
        raise ValueError("squared norm must be nonnegative")
    for ak in spec.a:
        if (ak * y).floor() % spec.p != 0:
            return Colour.BLUE
    return Colour.RED


def colour_point(spec: ColoringSpec, point) -> Colour:
    return colour_norm(spec, squared_norm(point))


class FastColouring:
    """Approximate colour via double arithmetic with a certified margin.

    Red iff frac(a_k*y/p) lands in [0, 1/p) for every k; this evaluates the
    fractions in double-double and answers None whenever some coordinate is
    within `margin` of a box boundary, where the doubles cannot certify the
    answer.  Exactness contract: a non-None answer agrees with colour_norm.
    """

    def __init__(self, spec: ColoringSpec, margin: float = 2.0**-40):
        self.spec = spec
        self.margin = margin
        self.bound = 1.0 / spec.p
        self._alpha = []
        for ak in spec.a:
            lo, hi = ak.approx(130)
            mid = (lo + hi) / 2 / spec.p
            hi_part = float(mid)
            lo_part = float(mid - Fraction(hi_part))
            self._alpha.append((hi_part, lo_part))

    def colour(self, y: float) -> Colour | None:
        import math

        from ._kernels_py import _dd_mul_d, _two_sum

        for ah, al in self._alpha:
            uh, ul = _dd_mul_d(ah, al, y)
            fr = uh - math.floor(uh)
            s, e = _two_sum(fr, ul)
            z = s + e
            if z >= 1.0:
                z -= 1.0
            if z < 0.0:
                z += 1.0
            if z >= 1.0:
                z = 0.0
            if z < self.margin or abs(z - self.bound) <= self.margin or z > 1.0 - self.margin:
                return None
            if z > self.bound:
                return Colour.BLUE
        return Colour.RED

    def colour_exact_fallback(self, y: float | Fraction) -> Colour:
        """Fast path, falling back to the exact oracle on None."""
        approx = self.colour(float(y))
        if approx is not None:
            return approx
        return colour_norm(self.spec, Fraction(y))
