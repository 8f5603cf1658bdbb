from fractions import Fraction as F

import pytest

from pweikonal.numeric import Q2, format_q2, parse_q2, q2_arith, q2_compare, sign_a_b_sqrt2


def test_arithmetic_is_exact():
    x = Q2(1, 1)
    assert x * x == Q2(3, 2)
    assert (x * x) / x == x
    assert Q2(1, 1) * Q2(-1, 1) == Q2(1)
    assert Q2(F(1, 3), 0) + Q2(0, F(2, 3)) == Q2(F(1, 3), F(2, 3))
    assert -x == Q2(-1, -1)


def test_signs_near_zero():
    # convergents of sqrt2 make a + b sqrt2 tiny but nonzero
    assert sign_a_b_sqrt2(577, -408) == 1
    assert sign_a_b_sqrt2(-577, 408) == -1
    assert sign_a_b_sqrt2(99, -70) == 1
    assert sign_a_b_sqrt2(0, 0) == 0
    assert Q2(3, -2) > 0


def test_compare_paper_values():
    assert q2_compare(Q2(88, 24), Q2(120, 16)) < 0
    assert q2_compare(Q2(16), Q2(16, 2)) < 0
    assert q2_compare(Q2(4), Q2(4)) == 0


@pytest.mark.parametrize("text,val", [
    ("16+2sqrt2", Q2(16, 2)), ("88 + 24 sqrt2", Q2(88, 24)), ("-1/2", Q2(F(-1, 2))),
    ("sqrt2", Q2(0, 1)), ("3/4 - 5/8 sqrt2", Q2(F(3, 4), F(-5, 8))),
])
def test_parse(text, val):
    assert parse_q2(text) == val


@pytest.mark.parametrize("val", [Q2(0), Q2(16, 2), Q2(F(-7, 3), F(1, 5)), Q2(0, -1), Q2(F(1, 2), 0)])
def test_format_roundtrip(val):
    assert parse_q2(format_q2(val)) == val


def test_q2_arith_ops():
    assert q2_arith("add", Q2(1), Q2(0, 1)) == Q2(1, 1)
    assert q2_arith("sub", Q2(1), Q2(0, 1)) == Q2(1, -1)
    assert q2_arith("mul", Q2(0, 1), Q2(0, 1)) == Q2(2)
    assert q2_arith("div", Q2(2), Q2(0, 1)) == Q2(0, 1)
    with pytest.raises(ZeroDivisionError):
        q2_arith("div", Q2(1), Q2(0))


def test_hash_consistent_with_eq():
    assert hash(Q2(2, 0)) == hash(Q2(F(4, 2), 0))
    assert len({Q2(1, 1), Q2(1, 1), Q2(1, -1)}) == 2
