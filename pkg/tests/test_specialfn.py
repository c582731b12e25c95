from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from saddlekit.specialfn import (RootsOfUnity, as_integer, beta_branch, beta_like, binom_real,
                                 gamma_ext, unit_phase)
from saddlekit.verification import shift_identity_applies

def gamma_oracle(x: Fraction):
    """Gamma, or its residue at poles, at high precision."""
    with mpmath.workdps(50):
        return +_gamma_oracle(x)


def _gamma_oracle(x: Fraction):
    if x.denominator == 1 and x <= 0:
        d = mpmath.mpf("1e-30")
        return d * mpmath.gamma(int(x) + d)
    return mpmath.gamma(mpmath.mpf(x.numerator) / x.denominator)


def beta_oracle(x: Fraction, y: Fraction):
    with mpmath.workdps(50):
        return _beta_oracle(x, y)


def _beta_oracle(x: Fraction, y: Fraction):
    if (x.denominator == 1 and x <= 0) or (y.denominator == 1 and y <= 0):
        return mpmath.mpc(0)
    xf, yf = mpmath.mpf(x.numerator) / x.denominator, mpmath.mpf(y.numerator) / y.denominator
    return (mpmath.pi * mpmath.expjpi((yf - xf) / 2) * mpmath.power(2, 2 - xf - yf)
            * gamma_oracle(x + y - 1) / (gamma_oracle(x) * gamma_oracle(y)))


fractions = st.builds(Fraction, st.integers(-17, 29), st.integers(2, 6))


@pytest.mark.parametrize("x, expected", [(0, 1.0), (-1, -1.0), (-2, 0.5), (-3, -1 / 6), (3, 2.0),
                                         (0.5, math.sqrt(math.pi)), (1, 1.0)])
def test_gamma_ext_values(x, expected):
    assert gamma_ext(x) == pytest.approx(expected, rel=1e-14)


@given(st.floats(-12, 12).filter(lambda x: abs(x) > 1e-3 and abs(x - round(x)) > 1e-6))
def test_gamma_ext_recurrence(x):
    assert gamma_ext(x + 1) == pytest.approx(x * gamma_ext(x), rel=1e-12)


@given(fractions)
def test_gamma_ext_against_residue_oracle(x):
    assert gamma_ext(x) == pytest.approx(float(gamma_oracle(x)), rel=1e-13)


@pytest.mark.parametrize("x, n, expected", [(0, 3, Fraction(1, 3)), (0, 2, Fraction(-1, 2)),
                                            (5, 2, 10), (Fraction(-1, 2), 1, Fraction(-1, 2)),
                                            (Fraction(7, 3), 0, 1)])
def test_binom_real_values(x, n, expected):
    assert binom_real(x, n) == expected


@given(fractions.filter(lambda x: x != 0), st.integers(0, 8))
def test_binom_real_matches_mpmath(x, n):
    got = binom_real(x, n)
    assert isinstance(got, Fraction)
    assert float(got) == pytest.approx(float(mpmath.binomial(mpmath.mpf(x.numerator) / x.denominator, n)),
                                       rel=1e-13, abs=1e-15)


def test_binom_float_matches_exact():
    assert binom_real(2.5, 4) == pytest.approx(float(binom_real(Fraction(5, 2), 4)), rel=1e-15)


@pytest.mark.parametrize("x, y, expected", [
    (Fraction(1, 2), Fraction(1, 2), 2.0),
    (1, 1, math.pi),
    (Fraction(2, 3), Fraction(2, 3), 7.285951943662746),
    (0, 0.7, 0.0),
    (Fraction(-2), Fraction(1, 3), 0.0),
])
def test_beta_like_frozen(x, y, expected):
    assert beta_like(x, y) == pytest.approx(expected, rel=1e-14, abs=1e-300)


@pytest.mark.parametrize("a", [Fraction(1), Fraction(2, 3), Fraction(3, 4)])
def test_beta_symmetric_case_matches_line_integral(a):
    # B(a, a) = int_R (x^2 + 1)^{-a} dx = 2 int_0^{pi/2} sin(u)^{2a-2} du;
    # the u^{2a-2} endpoint part is integrated in closed form
    with mpmath.workdps(30):
        e = 2 * mpmath.mpf(a.numerator) / a.denominator - 2
        h = mpmath.pi / 2
        rest = mpmath.quad(lambda u: mpmath.sin(u) ** e - u ** e, [0, h])
        val = 2 * (rest + h ** (e + 1) / (e + 1))
    assert beta_like(a, a) == pytest.approx(float(val), rel=1e-12)


@given(fractions, fractions)
def test_beta_like_against_oracle(x, y):
    got = beta_like(x, y)
    want = complex(beta_oracle(x, y))
    assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


@given(fractions, fractions)
def test_beta_conjugation(x, y):
    b, c = beta_like(x, y), beta_like(y, x)
    scale = max(1.0, abs(b))
    assert abs(c - b.conjugate()) <= 1e-12 * scale
    assert abs(c - unit_phase(x - y) * b) <= 1e-12 * scale


@given(fractions, fractions)
def test_branch_classification_is_total(x, y):
    branch = beta_branch(x, y)
    zero = (x.denominator == 1 and x <= 0) or (y.denominator == 1 and y <= 0)
    ext = not zero and x.denominator > 1 and y.denominator > 1 and (x + y).denominator == 1 and x + y <= 1
    assert branch == ("zero" if zero else "extended" if ext else "regular")


def test_shift_identity_needs_the_documented_domain():
    # x + y = 1 with n = 2 leaves the extended branch: the identity genuinely fails there
    x, y, n = Fraction(1, 3), Fraction(2, 3), 2
    assert not shift_identity_applies(x, y, n)
    lhs = (2j) ** n * float(binom_real(-y, n)) * beta_like(x, y + n)
    mid = float(binom_real(x + y + n - 2, n)) * beta_like(x, y)
    assert abs(lhs - mid) > 0.1


@given(st.builds(Fraction, st.integers(-11, 11), st.integers(2, 6)).filter(lambda t: t.denominator > 1),
       st.integers(0, 6))
def test_x_plus_y_is_one(x, n):
    y = 1 - x
    assert abs(beta_like(x, y) - 1 - unit_phase(y - x)) <= 1e-12


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6, 7])
def test_roots_of_unity(m):
    r = RootsOfUnity(m)
    assert abs(r.theta ** m - 1) < 1e-14
    assert abs(r.theta0 ** (2 * m) - 1) < 1e-13
    assert abs(r.theta0 ** 2 - r.theta) < 1e-15
    for p in range(-3 * m, 3 * m):
        assert abs(r.theta0_pow(p) - r.theta0 ** p) < 1e-13


def test_unit_phase_exact_quarters():
    assert unit_phase(Fraction(1, 2)) == 1j
    assert unit_phase(Fraction(-1, 2)) == -1j
    assert unit_phase(Fraction(3)) == -1


def test_as_integer():
    assert as_integer(Fraction(4, 2)) == 2
    assert as_integer(Fraction(1, 3)) is None
    assert as_integer(3.0000000001) == 3
    assert as_integer(2.5) is None
