from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from saddlekit.errors import DomainError, OrderTooSmallError
from saddlekit.jets import (SaddleModel, constant_jet, jet_inverse, jet_multiply, jet_precompose,
                            jet_scale, monomial_jet, polynomial_jet, random_jet, zero_jet)
from saddlekit.distributions import (beta_weight, frak_c, frak_d, partial_coefficients,
                                     partial_dist, partial_dist_rational, recover_partial,
                                     relevant_indices, script_c, script_c_all, script_c_direct,
                                     weighted_sum)
from saddlekit.specialfn import RootsOfUnity, binom_real
from saddlekit.verification import annihilated_indices

seeds = st.integers(0, 2 ** 32 - 1)


def partial_oracle(jet, m, k, j):
    """Direct transcription of the defining sum with float binomials."""
    total = 0j
    n = 0
    while j + n * m <= k:
        num = float(binom_real(Fraction(m - 1 - j, m) - 1, n))
        den = float(binom_real(Fraction(k - j - (m - 1), m), n))
        total += math.comb(k, j + n * m) * num / den * jet[j + n * m, k - j - n * m]
        n += 1
    return total


def test_partial_examples():
    assert partial_dist(monomial_jet(1, 1), 4, 2, 1) == 2
    assert partial_dist(zero_jet(), 3, 4, 1) == 0
    for m in range(2, 6):
        for k in range(m - 1, 11):
            assert partial_dist_rational(monomial_jet(m - 1, k - m + 1), m, k, m - 1) == \
                (Fraction(math.factorial(k)), Fraction(0))


@given(seeds, st.integers(2, 5), st.integers(0, 8))
def test_partial_against_oracle(seed, m, k):
    jet = random_jet(np.random.default_rng(seed), 8)
    for j in range(min(k, m - 1) + 1):
        want = partial_oracle(jet, m, k, j)
        assert abs(partial_dist(jet, m, k, j) - want) <= 1e-12 * max(1.0, abs(want))


def test_low_degree_partial_is_plain_derivative(rng):
    jet = random_jet(rng, 6)
    m = 5
    for k in range(m - 1):
        for j in range(k + 1):
            assert partial_dist(jet, m, k, j) == pytest.approx(math.comb(k, j) * jet[j, k - j])


def test_partial_coefficients_are_exact():
    for _, c in partial_coefficients(3, 7, 1):
        assert isinstance(c, Fraction)


def test_order_and_index_errors():
    with pytest.raises(OrderTooSmallError):
        script_c(constant_jet(1.0, 2), 2, 3, 0)
    with pytest.raises(DomainError):
        partial_dist(constant_jet(1.0), 3, 1, 2)
    with pytest.raises(DomainError):
        script_c(constant_jet(1.0), 2, 0, 4)


def test_script_c_examples():
    for l in range(4):
        assert script_c(constant_jet(1.0), 2, 0, l) == pytest.approx(2)
        assert script_c_direct(constant_jet(1.0), 2, 0, l) == pytest.approx(2)
    assert script_c(constant_jet(1.0), 3, 0, 0) == pytest.approx(7.285951943662746)
    assert script_c(zero_jet(), 4, 3, 5) == 0
    assert script_c_direct(zero_jet(), 4, 3, 5) == 0


@given(seeds, st.integers(2, 5), st.integers(0, 8))
def test_dual_formula(seed, m, k):
    jet = random_jet(np.random.default_rng(seed), 8)
    a = np.array([script_c(jet, m, k, l) for l in range(2 * m)])
    b = np.array([script_c_direct(jet, m, k, l) for l in range(2 * m)])
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    assert np.abs(a - b).max() <= 1e-10 * scale


@given(seeds, st.integers(2, 5), st.integers(0, 8))
def test_parity_annihilation_recovery(seed, m, k):
    jet = random_jet(np.random.default_rng(seed), 8)
    c = script_c_all(jet, m, k)
    scale = max(max(abs(v) for v in c), 1.0)
    for l in range(m):
        assert abs(c[l + m] - (-1) ** k * c[l]) <= 1e-12 * scale
    for j in annihilated_indices(m, k):
        assert abs(weighted_sum(c, m, k, j)) <= 1e-10 * scale
    for j in relevant_indices(m, k):
        target = beta_weight(m, k, j) * partial_dist(jet, m, k, j)
        assert abs(recover_partial(c, m, k, j) - target) <= 1e-10 * scale


def test_recovery_of_zero_jet():
    assert recover_partial(script_c_all(zero_jet(), 3, 2), 3, 2, 0) == 0
    with pytest.raises(DomainError):
        recover_partial([1, 2], 3, 2, 0)


@given(seeds, st.integers(2, 5), st.integers(0, 8))
def test_rotation_covariance(seed, m, k):
    jet = random_jet(np.random.default_rng(seed), 8)
    t0 = RootsOfUnity(m).theta0
    rotated = jet_precompose(jet, 1 / t0)
    for j in range(min(k, m - 1) + 1):
        want = t0 ** (-(2 * j - k)) * partial_dist(jet, m, k, j)
        assert abs(partial_dist(rotated, m, k, j) - want) <= 1e-10 * max(1.0, abs(want))


@given(seeds, seeds, st.integers(2, 5), st.integers(0, 8), st.floats(-3, 3))
def test_linearity(s1, s2, m, k, c):
    a = random_jet(np.random.default_rng(s1), 8)
    b = random_jet(np.random.default_rng(s2), 8)
    for l in (0, 2 * m - 1):
        lhs = script_c(a + b * c, m, k, l)
        rhs = script_c(a, m, k, l) + c * script_c(b, m, k, l)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_frak_with_unit_density(rng):
    saddle = SaddleModel(3, constant_jet(1.0))
    f = random_jet(rng, 8)
    assert frak_d(f, saddle, 4, 1) == pytest.approx(partial_dist(f, 3, 4, 1))
    assert frak_c(f, saddle, 4, 5) == pytest.approx(script_c(f, 3, 4, 5))


def test_dual_test_functions():
    # chi = w^j wbar^{k-j} / (k! V) is dual to frak_d^k_j
    m = 3
    v = polynomial_jet({(0, 0): 1.0, (1, 0): 0.1, (0, 1): 0.1, (1, 1): 0.05}, order=10)
    saddle = SaddleModel(m, v)
    inv_v = jet_inverse(v)
    for k in range(7):
        for j in relevant_indices(m, k):
            chi = jet_multiply(monomial_jet(j, k - j, order=10), inv_v) * (1 / math.factorial(k))
            for k2 in range(7):
                for j2 in relevant_indices(m, k2):
                    val = frak_d(chi, saddle, k2, j2)
                    assert val == pytest.approx(1.0 if (k2, j2) == (k, j) else 0.0, abs=1e-12)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_scaling(m, rng):
    eps = 0.37
    fv = random_jet(rng, 8)
    unit = SaddleModel(m, constant_jet(1.0, 8))
    for k in range(6):
        for l in range(2 * m):
            scaled = frak_c(jet_scale(fv, eps ** (1 / m)), unit, k, l)
            assert scaled == pytest.approx(eps ** (k / m) * frak_c(fv, unit, k, l), rel=1e-12, abs=1e-12)
