from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from saddlekit import grading
from saddlekit.errors import DomainError
from saddlekit.grading import RegularityGrade


def test_exponent_examples():
    e = grading.exponent(2, 0)
    assert (e.base, e.eta_flag, e.v) == (-1, True, 0)
    assert grading.order(3, 4) == 1
    e = grading.exponent(3, 4)
    assert (e.base, e.eta_flag) == (0, True)
    for m in range(2, 7):
        assert grading.hat_order(m, m - 2) == 0


@given(st.integers(2, 8), st.integers(0, 40))
def test_valuations(m, k):
    assert grading.exponent(m, k).v == grading.order(m, k)
    assert grading.hat_exponent(m, k).v == grading.hat_order(m, k) == k - (m - 2)


def test_grade_validation():
    with pytest.raises(DomainError):
        RegularityGrade(Fraction(1, 2), True)
    with pytest.raises(DomainError):
        RegularityGrade(Fraction(1), False)


@given(st.integers(2, 6), st.integers(0, 30), st.integers(2, 6), st.integers(0, 30))
def test_compare_is_consistent_with_v(m1, k1, m2, k2):
    g1, g2 = grading.exponent(m1, k1), grading.exponent(m2, k2)
    c = grading.compare(g1, g2)
    assert c == (g1.v > g2.v) - (g1.v < g2.v)
    assert grading.compare(g2, g1) == -c


def test_eta_modulus():
    assert grading.eta_modulus(0) == 0
    assert grading.eta_modulus(math.exp(-1)) == pytest.approx(math.exp(-1), rel=1e-15)
    assert grading.eta_modulus(1) == pytest.approx(math.exp(-1))
    xs = [i / 1000 * math.exp(-1) for i in range(1001)]
    vals = [grading.eta_modulus(x) for x in xs]
    assert all(a <= b + 1e-16 for a, b in zip(vals, vals[1:]))


def test_angle_power_examples():
    assert grading.angle_power(1, -2) == 1
    assert grading.angle_power(0.5, 0) == pytest.approx(1 + math.log(2))
    assert grading.angle_power(0.1, 0.5) == 1
    for s in (0, 1.5, -0.1):
        with pytest.raises(DomainError):
            grading.angle_power(s, 0.3)


@given(st.floats(1e-6, 1), st.floats(-3, 3), st.floats(-3, 3))
def test_angle_power_monotone(s, a, b):
    a, b = min(a, b), max(a, b)
    assert grading.angle_power(s, a) >= grading.angle_power(s, b) * (1 - 1e-12)


@given(st.floats(1e-3, 1), st.floats(-2, 2), st.integers(2, 5))
def test_angle_power_of_power(s, a, m):
    assert grading.angle_power(s ** m, a) <= m * grading.angle_power(s, a * m) * (1 + 1e-12)


def test_k_r_examples():
    assert grading.k_r(2, 1) == 2
    assert grading.k_r(3, Fraction(-1, 3)) == 1
    with pytest.raises(DomainError):
        grading.k_r(3, Fraction(-1, 2))


rationals = st.builds(Fraction, st.integers(-40, 200), st.integers(1, 30))


@given(st.integers(2, 6), rationals)
def test_expkr_identity(m, r):
    r = max(r, Fraction(-(m - 2), m))
    assert grading.max_k_below(m, r) + 1 == math.ceil(m * r + (m - 2))


@given(st.integers(2, 6), rationals)
def test_k_r_dominates_ceiling(m, r):
    r = max(r, Fraction(-(m - 2), m))
    assert math.ceil(r) + 1 <= grading.k_r(m, r)


def test_angle_power_continuous_from_below():
    for s in (0.5, 1e-3):
        assert grading.angle_power(s, -1e-100) == pytest.approx(grading.angle_power(s, 0.0), rel=1e-14)
