"""Non-sphericity certificates for finite point configurations.

A configuration X = {x_1, ..., x_s} is non-spherical iff there are weights
c_j with sum c_j = 0, sum c_j x_j = 0 and B = sum c_j |x_j|^2 nonzero; every
congruent copy of X then satisfies the same weighted squared-norm identity
with the same B.  compute_certificate solves for such weights exactly, or
reports that X is spherical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import numfield as nf
from .numfield import FieldElement


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ConfigurationX:
    """A finite point set with exact multiquadratic coordinates."""

    dimension: int
    points: tuple[tuple[FieldElement, ...], ...]

    def __post_init__(self):
        if len(self.points) < 2:
            raise ConfigError("need at least 2 points")
        for pt in self.points:
            if len(pt) != self.dimension:
                raise ConfigError(
                    f"point {tuple(str(c) for c in pt)} does not have "
                    f"dimension {self.dimension}"
                )
        if len(set(self.points)) != len(self.points):
            raise ConfigError("points must be distinct")

    @property
    def size(self) -> int:
        return len(self.points)

    @classmethod
    def from_json(cls, payload: dict) -> "ConfigurationX":
        dim = int(payload["dimension"])
        pts = tuple(
            tuple(nf.parse(c) for c in point) for point in payload["points"]
        )
        return cls(dimension=dim, points=pts)

    @classmethod
    def load(cls, path) -> "ConfigurationX":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class SphericityCertificate:
    """Weights c and value B with sum c = 0, sum c x = 0, B = sum c |x|^2 != 0."""

    c: tuple[FieldElement, ...]
    B: FieldElement

    def to_json(self) -> dict:
        return {"c": [str(v) for v in self.c], "B": str(self.B)}


def squared_norm(point: Sequence[FieldElement]) -> FieldElement:
    out = FieldElement()
    for coord in point:
        out = out + coord * coord
    return out


def compute_certificate(config: ConfigurationX) -> SphericityCertificate | None:
    """Certificate for a non-spherical configuration, or None if spherical.

    Solves sum_j c_j = 0 and sum_j c_j x_j = 0 exactly over the field, then
    scans the reduced-echelon nullspace basis (free columns ascending) for
    the first vector with B = sum_j c_j |x_j|^2 nonzero, sign-normalized so
    B > 0.  That order is deterministic but not claimed canonical.
    """
    s = config.size
    rows = [[nf.ONE for _ in range(s)]]
    for i in range(config.dimension):
        rows.append([pt[i] for pt in config.points])
    basis = _nullspace(rows, s)
    norms = [squared_norm(pt) for pt in config.points]
    for vec in basis:
        b = FieldElement()
        for cj, yj in zip(vec, norms):
            b = b + cj * yj
        if not b.is_zero():
            if b.sign() < 0:
                vec = [-cj for cj in vec]
                b = -b
            return SphericityCertificate(c=tuple(vec), B=b)
    return None


def _nullspace(rows: list[list[FieldElement]], n_cols: int) -> list[list[FieldElement]]:
    """Nullspace basis of a matrix with field entries, in RREF order."""
    m = [row[:] for row in rows]
    n_rows = len(m)
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        pr = next((i for i in range(r, n_rows) if not m[i][c].is_zero()), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [FieldElement() for _ in range(n_cols)]
        vec[fc] = nf.ONE
        for ri, pc in enumerate(pivots):
            vec[pc] = -m[ri][fc]
        basis.append(vec)
    return basis


def config_from_rationals(points: Sequence[Sequence]) -> ConfigurationX:
    """Convenience builder from int/Fraction coordinate lists."""
    pts = tuple(
        tuple(FieldElement.from_rational(Fraction(c)) for c in pt) for pt in points
    )
    return ConfigurationX(dimension=len(pts[0]), points=pts)
