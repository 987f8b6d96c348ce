from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlrr.errors import ZeroLeadingTerm
from hlrr.qseries import (
    INF,
    FactorBag,
    Series,
    SignedAtom,
    fmt_exp,
    from_grid,
    mul_trunc,
    poch,
    qbinom,
    theta,
    to_grid,
)
from oracles import jacobi_sum, naive_product, poly_mul, theta_naive

coeff = st.integers(min_value=-50, max_value=50)
coeff_lists = st.lists(coeff, min_size=1, max_size=25)


def as_dict(series):
    return {s: c for s, c in series.items_s()}


def from_ints(cs, order):
    return Series.from_list(cs, order)


# -- grid ------------------------------------------------------------------


def test_grid_round_trip():
    for s in range(-7, 8):
        assert to_grid(from_grid(s)) == s
    assert to_grid(Fraction(3, 2)) == 3
    assert fmt_exp(7) == "7/2"
    assert fmt_exp(-4) == "-2"


def test_grid_rejects_thirds():
    with pytest.raises(ValueError):
        to_grid(Fraction(1, 3))


# -- arithmetic against dict convolution -----------------------------------


@given(coeff_lists, coeff_lists)
def test_product_matches_naive_convolution(a, b):
    order = 20
    got = from_ints(a, order) * from_ints(b, order)
    want = poly_mul(dict(enumerate(a)), dict(enumerate(b)), order)
    assert {from_grid(s): c for s, c in got.items_s()} == {Fraction(e): c for e, c in want.items()}


def test_large_coefficients_stay_exact():
    big = 10**30
    a = Series.from_list([big, big], 4)
    sq = a * a
    assert sq.coeff(1) == 2 * big * big


@given(coeff_lists)
def test_mul_trunc_length(a):
    assert len(mul_trunc(a, a, 7)) == 7


@given(st.sampled_from([1, -1]), coeff_lists)
def test_inverse_of_unit(lead, rest):
    s = from_ints([lead] + rest, 15)
    assert s * s.inverse() == Series.one(15)


@given(st.lists(st.integers(1, 9), min_size=1, max_size=8))
def test_inverse_with_rational_lead(cs):
    s = from_ints(cs, 10).shift(Fraction(1, 2))
    prod = s * s.inverse()
    assert prod == Series.one(prod.order)
    assert s.inverse().floor == Fraction(-1, 2)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroLeadingTerm):
        Series.zero(5).inverse()


@given(coeff_lists, st.integers(0, 20))
def test_truncation_is_prefix(cs, k):
    s = from_ints(cs, 24)
    t = s.truncate(k)
    assert t.order == k
    for e in range(k + 1):
        assert t.coeff(e) == s.coeff(e)


def test_coefficient_beyond_order_raises():
    with pytest.raises(ValueError):
        Series.one(3).coeff(4)


def test_product_order_is_the_valid_window():
    a = Series.from_list([1, 1], 10).shift(2)
    b = Series.one(6)
    assert (a * b).order == 8


def test_half_integer_shift():
    s = Series.one(3).shift(Fraction(1, 2))
    assert not s.on_integer_grid()
    assert s.coeff(Fraction(1, 2)) == 1
    assert s.valuation() == Fraction(1, 2)


def test_first_mismatch():
    a = Series.from_list([1, 2, 3, 4], 3)
    b = Series.from_list([1, 2, 5, 4], 3)
    assert from_grid(a.first_mismatch_s(b)) == 2
    assert a.first_mismatch_s(a) is None


def test_scale_q():
    s = Series.from_list([1, -1, 1], 2).scale_q(3)
    assert s.coeffs() == {0: 1, 3: -1, 6: 1}


# -- products --------------------------------------------------------------


@pytest.mark.parametrize("e", [1, 2, 3])
def test_infinite_pochhammer_reciprocal_counts_partitions(e):
    got = poch(SignedAtom.q(e), e, INF, 30).inverse()
    want = naive_product([(1, e * k, -1) for k in range(1, 31)], 30)
    assert as_dict(got) == {2 * k: v for k, v in want.items()}


@pytest.mark.parametrize("b,a", [(1, 2), (1, 5), (2, 5), (3, 7)])
def test_theta_matches_naive_product(b, a):
    got = theta(SignedAtom.q(b), a, 40)
    want = theta_naive(b, a, 40)
    assert as_dict(got) == {2 * k: v for k, v in want.items()}


@pytest.mark.parametrize("b,a", [(1, 2), (1, 5), (2, 5), (3, 7)])
def test_theta_with_pochhammer_is_jacobi_sum(b, a):
    got = theta(SignedAtom.q(b), a, 60) * poch(SignedAtom.q(a), a, INF, 60)
    assert as_dict(got) == {2 * k: v for k, v in jacobi_sum(b, a, 60).items()}


@given(st.integers(0, 8), st.integers(0, 8))
@settings(max_examples=40)
def test_qbinomial_at_q1_is_binomial(n, m):
    from math import comb

    total = sum(qbinom(n, m, 1, n * n + 1).coeffs().values())
    assert total == (comb(n, m) if m <= n else 0)


def test_negative_length_pochhammer():
    # (a;q)_{-k} = 1/(aq^{-k};q)_k
    a = SignedAtom.q(3)
    got = poch(a, 1, -2, 12)
    want = poch(SignedAtom.q(1), 1, 2, 12).inverse()
    assert got == want


def test_factor_bag_canonical_rewrites_plus_factors():
    bag = FactorBag().add(SignedAtom.q(1, -1))
    canon = bag.canonical(10)["factors"]
    assert canon == {1: -1, 2: 1}


def test_factor_bag_expansion_agrees_with_series():
    # bases are given on the half-step grid: 4 means q^2
    bag = FactorBag().add_inf(SignedAtom.q(1), 4).add_poch(SignedAtom.q(Fraction(1, 2), -1), 2, 3, -1)
    direct = poch(SignedAtom.q(1), 2, INF, 12) / poch(SignedAtom.q(Fraction(1, 2), -1), 1, 3, 12)
    assert bag.expand(12) == direct
