from fractions import Fraction

import pytest

from rcl import builder, numfield as nf
from rcl.builder import (
    ColoringSpec,
    InvalidCertificateError,
    build_spec,
    choose_M_and_p,
    integerize,
    rescale_if_needed,
    validate_spec,
)
from rcl.certify import SphericityCertificate, compute_certificate, config_from_rationals
from rcl.numfield import FieldElement


def rational(x):
    return FieldElement.from_rational(Fraction(x))


SQRT2 = FieldElement.sqrt_int(2)
SQRT3 = FieldElement.sqrt_int(3)


def l3_cert():
    return compute_certificate(config_from_rationals([[0], [1], [2]]))


class TestRescale:
    def test_rational_cert_needs_sqrt2(self):
        cert = SphericityCertificate(
            c=(rational(1), rational(-2), rational(1)), B=rational(2)
        )
        c2, b2, mu = rescale_if_needed(cert)
        assert mu == SQRT2
        assert c2 == [SQRT2, SQRT2 * -2, SQRT2]
        assert b2 == SQRT2 * 2

    def test_already_irrational_span(self):
        c = (SQRT3, SQRT3 * -2, SQRT3)
        cert = SphericityCertificate(c=c, B=SQRT3 * 2)
        c2, b2, mu = rescale_if_needed(cert)
        assert mu == nf.ONE
        assert tuple(c2) == c

    def test_one_dimensional_irrational_span(self):
        # span of (1+sqrt2, -1-sqrt2) is Q*(1+sqrt2), which misses 1
        c = (rational(1) + SQRT2, -(rational(1) + SQRT2))
        cert = SphericityCertificate(c=c, B=SQRT2)
        _, _, mu = rescale_if_needed(cert)
        assert mu == nf.ONE

    def test_sqrt2_fails_sqrt3_works(self):
        # span of (1+sqrt2, -sqrt2) contains 1; multiplying by sqrt2 gives
        # span{sqrt2+2, -2} which still contains 1, so mu must move to sqrt3
        c = (rational(1) + SQRT2, -SQRT2)
        cert = SphericityCertificate(c=c, B=rational(1))
        c2, b2, mu = rescale_if_needed(cert)
        assert mu == SQRT3
        assert not builder._one_in_span(list(c2))


class TestIntegerize:
    def test_rank_one_integral(self):
        c2 = [SQRT2, SQRT2 * -2, SQRT2]
        basis, q, b = integerize(c2, SQRT2 * 2)
        assert basis == [SQRT2]
        assert q == [[1], [-2], [1]]
        assert b == SQRT2 * 2

    def test_lcm_clearing(self):
        c2 = [SQRT2 * Fraction(1, 2), SQRT2 * Fraction(1, 3)]
        basis, q, b = integerize(c2, rational(1))
        assert basis == [SQRT2]
        assert q == [[3], [2]]
        assert b == rational(6)
        # identity: sum_k q[j][k]*basis[k] == L*c2[j] for the one LCM L
        for j, row in enumerate(q):
            acc = FieldElement()
            for v, bk in zip(row, basis):
                acc = acc + bk * v
            assert acc == c2[j] * 6

    def test_independent(self):
        basis, q, b = integerize([SQRT2, SQRT3], rational(1))
        assert basis == [SQRT2, SQRT3]
        assert q == [[1, 0], [0, 1]]


class TestChooseMP:
    def test_unit_line_values(self):
        m, bprime, p = choose_M_and_p([[1], [-2], [1]], [SQRT2], SQRT2 * 2)
        assert m == 2
        assert bprime == SQRT2 * 4
        assert p == 13

    def test_single(self):
        m, bprime, p = choose_M_and_p([[1]], [SQRT2], SQRT2)
        assert m == 1
        assert bprime == SQRT2
        assert p == 3

    def test_two_basis(self):
        m, bprime, p = choose_M_and_p(
            [[1, 0], [0, 1]], [SQRT2, SQRT3], SQRT2 + SQRT3
        )
        assert m == 1
        assert bprime == SQRT2 + SQRT3
        assert p == 7

    def test_zero_b(self):
        with pytest.raises(InvalidCertificateError):
            choose_M_and_p([[1]], [SQRT2], FieldElement())


class TestBuildSpec:
    def test_unit_line_golden(self):
        spec = build_spec(l3_cert())
        assert spec.r == 1
        assert spec.a == (SQRT2 * 2,)
        assert spec.q == ((1,), (-2,), (1,))
        assert spec.M == 2
        assert spec.Bprime == SQRT2 * 4
        assert spec.p == 13
        assert spec.mu == SQRT2
        validate_spec(spec, l3_cert())

    def test_passthrough_irrational(self):
        cert = SphericityCertificate(
            c=(SQRT3, SQRT3 * -2, SQRT3), B=SQRT3 * 2
        )
        spec = build_spec(cert)
        assert spec.mu == nf.ONE
        assert spec.q == ((1,), (-2,), (1,))
        validate_spec(spec, cert)

    def test_negative_b_sign_normalization(self):
        cert = l3_cert()
        neg = SphericityCertificate(c=tuple(-cj for cj in cert.c), B=-cert.B)
        assert build_spec(neg) == build_spec(cert)

    def test_determinism(self):
        assert build_spec(l3_cert()) == build_spec(l3_cert())

    def test_minimality_certified(self):
        spec = build_spec(l3_cert())
        qsum = spec.abs_q_sum()
        # M-1 fails the inequality, and the previous prime fails p > 2B'
        assert ((spec.Bprime / spec.M) * (spec.M - 1) - qsum).sign() <= 0
        assert (rational(11) - spec.Bprime * 2).sign() <= 0

    def test_gapped_line_spec(self):
        cert = compute_certificate(config_from_rationals([[0], [1], [3]]))
        spec = build_spec(cert)
        validate_spec(spec, cert)
        # c = (2,-3,1), B = 6 -> mu = sqrt2: B'' = 6*sqrt2, sum|q| = 6
        # M = 1: 6*sqrt2 = 8.485 > 6; p: 2B' = 16.97 -> 17
        assert spec.M == 1
        assert spec.p == 17

    def test_json_roundtrip(self):
        spec = build_spec(l3_cert())
        payload = spec.to_json()
        assert payload["a"] == ["2*sqrt(2)"]
        assert payload["Bprime"] == "4*sqrt(2)"
        assert ColoringSpec.from_json(payload) == spec

    def test_eq1_holds_for_satisfying_tuples(self):
        # any rational tuple with second difference 2 satisfies the recast
        # equation exactly
        spec = build_spec(l3_cert())
        w = spec.row_weights()
        for y1, y2 in [(0, 1), (Fraction(5, 3), 7), (2, Fraction(1, 2))]:
            y3 = 2 + 2 * Fraction(y2) - Fraction(y1)
            acc = FieldElement()
            for wj, yj in zip(w, (y1, y2, y3)):
                acc = acc + wj * Fraction(yj)
            assert acc == spec.Bprime
