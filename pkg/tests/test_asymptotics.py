from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from saddlekit.asymptotics import (DEFAULT_GRID, decompose_phi, dnds_consistency, dnds_profile,
                                   extension_hypotheses, make_report, power_limit,
                                   sector_extension_check, singular_term, thm_c_expected,
                                   thm_c_limit, thm_c_parameters, verify_g_limit, window_derivative)
from saddlekit.distributions import script_c
from saddlekit.errors import HypothesisViolatedError, InsufficientPointsError
from saddlekit.jets import constant_jet, monomial_jet, polynomial_jet, zero_jet
from saddlekit.specialfn import beta_like

GRID = [2.0 ** -j for j in range(10, 21)]


def test_power_limit_examples():
    assert power_limit([(s, math.pi / s) for s in GRID], 1) == pytest.approx(math.pi, rel=1e-14)
    assert power_limit([(s, (1 + s ** 0.5) / s) for s in GRID], 1) == pytest.approx(1, abs=1e-6)
    assert power_limit([(s, 2.5) for s in GRID], 0) == pytest.approx(2.5)
    with pytest.raises(InsufficientPointsError):
        power_limit([(s, 1.0) for s in GRID[:3]], 0)


@given(st.floats(-5, 5), st.floats(0.2, 3), st.floats(-3, 3))
def test_power_limit_with_known_correction(lim, q, c):
    samples = [(s, (lim + c * s ** q) / s ** 0.5) for s in GRID]
    assert power_limit(samples, 0.5, [q]) == pytest.approx(lim, abs=1e-8)


def test_window_derivative_is_one_sided():
    def fun(x):
        assert x > 0
        return math.log(x) + 0j
    for order in (1, 2, 3):
        s = 1e-5
        want = (-1) ** (order - 1) * math.factorial(order - 1) / s ** order
        assert window_derivative(fun, s, order) == pytest.approx(want, rel=1e-7)


@pytest.mark.parametrize("m, j", [(2, 0), (2, 1), (3, 0), (3, 1), (3, 4), (4, 2)])
def test_singular_term_derivatives(m, j):
    for s in (0.3, -0.2):
        h = 1e-5
        num = (singular_term(m, j, s + h) - singular_term(m, j, s - h)) / (2 * h)
        assert singular_term(m, j, s, 1) == pytest.approx(num, rel=1e-7)


@pytest.mark.parametrize("m, a1, a2, expected", [(2, 2, 2, math.pi),
                                                 (3, 2, 2, 7.285951943662746)])
def test_g_limit_examples(m, a1, a2, expected):
    plus, minus = verify_g_limit(m, 0, a1, a2)
    assert plus.expected == pytest.approx(expected)
    assert plus.passed and minus.passed
    assert plus.estimate == pytest.approx(expected, rel=1e-6)


def test_g_limit_zero_rule():
    plus, minus = verify_g_limit(2, 0, 0, 3)
    assert plus.expected == 0 and minus.expected == 0
    assert abs(plus.estimate) < 1e-6 and abs(minus.estimate) < 1e-6


@pytest.mark.parametrize("m, a1, a2", [(2, 2, 2), (3, 2, 2), (3, 2, 4), (4, 3, 3)])
def test_g_limit_both_sides(m, a1, a2):
    for l in range(m):
        plus, minus = verify_g_limit(m, l, a1, a2)
        assert plus.rel_err <= 1e-3 and minus.rel_err <= 1e-3


def test_thm_c_parameters():
    assert thm_c_parameters(2, 0) == (0, 0)
    assert thm_c_parameters(3, 0) == (0, Fraction(1, 3))
    assert thm_c_parameters(3, 4) == (1, 0)


def test_thm_c_examples():
    rep = thm_c_limit(constant_jet(1.0), 2, 0, 0, 0)
    assert rep.expected == pytest.approx(-2)
    assert rep.estimate == pytest.approx(-2, rel=5e-3)
    want = -beta_like(Fraction(2, 3), Fraction(2, 3)) / 3
    assert thm_c_expected(constant_jet(1.0), 3, 0, 0, 0) == pytest.approx(want)
    assert thm_c_limit(constant_jet(1.0), 3, 0, 0, 0).estimate == pytest.approx(want, rel=1e-2)


@pytest.mark.parametrize("i, j", [(1, 0), (0, 1)])
def test_thm_c_monomials(i, j):
    for l in range(3):
        for parity in (0, 1):
            rep = thm_c_limit(monomial_jet(i, j), 3, l, parity, 1)
            assert rep.rel_err <= 1e-2


def test_thm_c_derivative_routes_agree():
    a = thm_c_limit(monomial_jet(1, 0), 3, 1, 1, 1)
    b = thm_c_limit(monomial_jet(1, 0), 3, 1, 1, 1, method="exact")
    assert a.estimate == pytest.approx(b.estimate, rel=1e-6)


def test_thm_c_vanishing_coefficient_gives_zero():
    generic = abs(thm_c_limit(constant_jet(1.0), 2, 0, 0, 0).estimate)
    rep = thm_c_limit(monomial_jet(1, 0), 2, 0, 0, 0)
    assert rep.expected == 0
    assert abs(rep.estimate) <= 1e-2 * generic


def test_report_json_and_determinism():
    a = thm_c_limit(constant_jet(1.0), 2, 0, 1, 0)
    b = thm_c_limit(constant_jet(1.0), 2, 0, 1, 0)
    assert a.estimate == b.estimate and a.values == b.values
    doc = json.loads(json.dumps(a.to_json()))
    assert set(doc) >= {"estimate", "expected", "rel_err", "grid", "pass"}
    assert doc["pass"] is True
    rep = make_report(1e-20, 0.0, [0.1], [], 1e-3)
    assert rep.rel_err == pytest.approx(1e-20 / 1e-14)


def test_decompose_examples():
    dec = decompose_phi(constant_jet(1.0), 2, 0, 0, 1)
    assert dec.coefficients[0] == pytest.approx(2, rel=1e-6)
    zero = decompose_phi(zero_jet(), 3, 1, 1, 2)
    assert all(abs(c) < 1e-12 for c in zero.coefficients)


@pytest.mark.parametrize("m", [2, 3])
def test_decompose_monomials(m):
    for d in range(4):
        for i in range(d + 1):
            for parity in (0, 1):
                dec = decompose_phi(monomial_jet(i, d - i), m, 0, parity, d + 1)
                assert dec.max_coefficient_error() <= 5e-3
                assert dec.growth_ok()


def test_decompose_generic_polynomial():
    f = polynomial_jet({(0, 0): 1.0, (1, 0): 0.5, (0, 1): -0.25j, (1, 1): 0.3, (2, 0): 0.1})
    for parity in (0, 1):
        dec = decompose_phi(f, 3, 2, parity, 3)
        assert dec.max_coefficient_error() <= 5e-3
        for j, e in enumerate(dec.expected):
            assert e == pytest.approx(script_c(f, 3, j, 4 + parity) / math.factorial(j))


def test_dnds_consistency():
    assert dnds_consistency(2, 0, 1, 1, 0) == 0
    drift = dnds_consistency(2, 0, 1, 1, 1)
    prof = dnds_profile(2, 0, 1, 1, 1)
    growth = abs(prof[-1][1]) / abs(prof[0][1])
    assert growth > 1e3  # each side blows up like 1/s
    assert drift < 1e-3 * abs(prof[-1][1])
    prof = dnds_profile(3, 1, 2, 3, 2)
    assert all(abs(d - lead) < 10 for s, d, lead in prof if s > 4e-4)
    # near the finest points only the cancellation floor remains
    assert dnds_consistency(3, 1, 2, 3, 2) < 1e-8 * abs(prof[-1][1])


def test_extension_hypotheses():
    assert extension_hypotheses(constant_jet(1.0), 2, 0, 0) == []
    bad = extension_hypotheses(constant_jet(1.0), 2, 0, 2)
    assert "C^0_0" in bad
    with pytest.raises(HypothesisViolatedError) as info:
        sector_extension_check(constant_jet(1.0), 2, 0, 2)
    assert info.value.which in bad


def test_extension_constants():
    # P = w^{m-1} wbar^{k-m+1}: F_P is smooth on closed sectors
    m, k = 3, 4
    p = monomial_jet(m - 1, k - m + 1)
    small = sector_extension_check(p, m, 1, k, probe=1e-3)
    assert math.isfinite(small) and small < 10
    c1 = sector_extension_check(constant_jet(1.0), 2, 0, 0, probe=1e-2)
    c2 = sector_extension_check(constant_jet(1.0), 2, 0, 0, probe=1e-4)
    assert 0.5 < c2 / c1 < 2


def test_converse_witness():
    bad = constant_jet(1.0)
    c1 = sector_extension_check(bad, 2, 0, 2, probe=1e-2, enforce=False)
    c2 = sector_extension_check(bad, 2, 0, 2, probe=1e-4, enforce=False)
    assert c2 >= 10 * c1
    good = monomial_jet(2, 0)
    g1 = sector_extension_check(good, 2, 0, 2, probe=1e-2)
    g2 = sector_extension_check(good, 2, 0, 2, probe=1e-4)
    assert max(g1, g2) < 2 * min(g1, g2)
