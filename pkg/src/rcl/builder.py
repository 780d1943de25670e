"""Turn a non-sphericity certificate into the full colouring construction.

Pipeline: rescale the certificate so no rational number lies in the Q-span
of the weights, extract a Q-basis b_1..b_r with integer coordinates q_{j,k}
(clearing denominators), pick the least M with M*B > sum |q_{j,k}|, set
a_k = M*b_k and B' = M*B, and take the least prime p > 2B'.  Minimal M and p
are deliberate: a smaller p makes the red class larger, which is the harder
regime for the line scans.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from . import numfield as nf
from .certify import SphericityCertificate
from .numfield import FieldElement


class InvalidCertificateError(ValueError):
    pass


@dataclass(frozen=True)
class ColoringSpec:
    """Everything the colouring rule needs: a_1..a_r, q, M, B', p, mu."""

    r: int
    a: tuple[FieldElement, ...]
    q: tuple[tuple[int, ...], ...]
    M: int
    Bprime: FieldElement
    p: int
    mu: FieldElement

    @property
    def s(self) -> int:
        return len(self.q)

    def abs_q_sum(self) -> int:
        return sum(abs(v) for row in self.q for v in row)

    def row_weights(self) -> tuple[FieldElement, ...]:
        """w_j = sum_k q_{j,k} a_k, the norm coefficients of the recast equation."""
        out = []
        for row in self.q:
            acc = FieldElement()
            for qjk, ak in zip(row, self.a):
                acc = acc + ak * qjk
            out.append(acc)
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "a": [str(x) for x in self.a],
            "q": [list(row) for row in self.q],
            "M": self.M,
            "Bprime": str(self.Bprime),
            "p": self.p,
            "mu": str(self.mu),
        }

    @classmethod
    def from_json(cls, payload: dict) -> "ColoringSpec":
        return cls(
            r=int(payload["r"]),
            a=tuple(nf.parse(x) for x in payload["a"]),
            q=tuple(tuple(int(v) for v in row) for row in payload["q"]),
            M=int(payload["M"]),
            Bprime=nf.parse(payload["Bprime"]),
            p=int(payload["p"]),
            mu=nf.parse(payload["mu"]),
        )

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ColoringSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _one_in_span(elements: list[FieldElement]) -> bool:
    basis, _ = nf.q_span_basis(elements)
    basis2, _ = nf.q_span_basis(list(elements) + [nf.ONE])
    return len(basis2) == len(basis)


def _squarefree_candidates():
    d = 2
    while True:
        s, f = nf.squarefree_split(d)
        if s == 1:
            yield d
        d += 1


def rescale_if_needed(
    cert: SphericityCertificate,
) -> tuple[list[FieldElement], FieldElement, FieldElement]:
    """Multiply the certificate by the least sqrt(d) clearing 1 from the span.

    Returns (c', B'', mu); mu = 1 when the span already misses the rationals.
    """
    c = list(cert.c)
    if not _one_in_span(c):
        return c, cert.B, nf.ONE
    for d in _squarefree_candidates():
        mu = FieldElement.sqrt_int(d)
        scaled = [mu * cj for cj in c]
        if not _one_in_span(scaled):
            return scaled, mu * cert.B, mu
    raise AssertionError("unreachable: some squarefree d always works")


def integerize(
    c_prime: list[FieldElement], b_second: FieldElement
) -> tuple[list[FieldElement], list[list[int]], FieldElement]:
    """Q-basis plus integer coordinate matrix, denominators cleared.

    Returns (basis, q, B) with sum_k q[j][k]*basis[k] == L*c_prime[j] and
    B == L*b_second for the least common multiple L of all coordinate
    denominators, so the recast identity keeps holding exactly.
    """
    basis, coords = nf.q_span_basis(c_prime)
    lcm = 1
    for row in coords:
        for v in row:
            lcm = math.lcm(lcm, v.denominator)
    q = [[int(v * lcm) for v in row] for row in coords]
    return basis, q, b_second * lcm


def choose_M_and_p(
    q: list[list[int]], basis: list[FieldElement], B: FieldElement
) -> tuple[int, FieldElement, int]:
    """Least M with M*B > sum|q|, then the least prime p > 2*M*B.

    Requires B > 0; flip the sign of the whole equation first if B < 0.
    """
    sgn = B.sign()
    if sgn == 0:
        raise InvalidCertificateError("certificate has B = 0")
    if sgn < 0:
        raise InvalidCertificateError("B must be positive here; flip q and B first")
    qsum = sum(abs(v) for row in q for v in row)
    t = B.inverse() * qsum
    m_val = t.floor() + 1
    # certify strictness and minimality by exact sign checks
    assert (B * m_val - qsum).sign() > 0
    assert m_val == 1 or (B * (m_val - 1) - qsum).sign() <= 0
    bprime = B * m_val
    f = (bprime * 2).floor()
    p = f + 1
    while not _is_prime(p):
        p += 1
    assert (FieldElement.from_rational(p) - bprime * 2).sign() > 0
    prev = _prev_prime(p)
    if prev is not None:
        assert (FieldElement.from_rational(prev) - bprime * 2).sign() <= 0
    return m_val, bprime, p


def build_spec(cert: SphericityCertificate) -> ColoringSpec:
    """Compose rescale -> integerize -> choose_M_and_p into a ColoringSpec."""
    c_prime, b_second, mu = rescale_if_needed(cert)
    basis, q, b_int = integerize(c_prime, b_second)
    if b_int.sign() < 0:
        q = [[-v for v in row] for row in q]
        b_int = -b_int
    m_val, bprime, p = choose_M_and_p(q, basis, b_int)
    spec = ColoringSpec(
        r=len(basis),
        a=tuple(bk * m_val for bk in basis),
        q=tuple(tuple(row) for row in q),
        M=m_val,
        Bprime=bprime,
        p=p,
        mu=mu,
    )
    validate_spec(spec, cert)
    return spec


def validate_spec(spec: ColoringSpec, cert: SphericityCertificate | None = None) -> None:
    """Check every structural invariant of the construction; raises on failure."""
    basis, _ = nf.q_span_basis(list(spec.a))
    basis_with_one, _ = nf.q_span_basis(list(spec.a) + [nf.ONE])
    if len(basis_with_one) == len(basis):
        raise InvalidCertificateError("1 lies in the Q-span of the coefficients")
    for ak in spec.a:
        if ak.is_rational():
            raise InvalidCertificateError(f"a_k = {ak} is rational")
    qsum = spec.abs_q_sum()
    if not (spec.Bprime - qsum).sign() > 0:
        raise InvalidCertificateError("B' does not exceed sum |q_jk|")
    if not _is_prime(spec.p):
        raise InvalidCertificateError(f"p = {spec.p} is not prime")
    if not (FieldElement.from_rational(spec.p) - spec.Bprime * 2).sign() > 0:
        raise InvalidCertificateError("p <= 2*B'")
    if cert is not None:
        # sign of the integerized equation may be flipped vs the certificate
        weights = spec.row_weights()
        direct = all((wj * cert.B) == (cj * spec.Bprime)
                     for wj, cj in zip(weights, cert.c))
        flipped = all((wj * cert.B) == (-cj * spec.Bprime)
                      for wj, cj in zip(weights, cert.c))
        if not (direct or flipped):
            raise InvalidCertificateError(
                "recast equation does not match the certificate"
            )


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prev_prime(n: int) -> int | None:
    for m in range(n - 1, 1, -1):
        if _is_prime(m):
            return m
    return None
