import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hlrr.errors import BadParams, RepeatedVariable
from hlrr.hall_littlewood import (
    AlphabetSpec,
    GeometricSpec,
    hl_p_oracle,
    p_geometric,
    qprime_flag,
    rect_limit,
    rect_term,
    sum_side,
)
from hlrr.partitions import enumerate_partitions
from hlrr.qseries import Series, SignedAtom
from hlrr.sums import ag_multisum, q2r_multisum
from oracles import ORACLE_ALPHABETS, qprime_truncated, truncated_alphabet

ORACLE_PARTITIONS = [tuple(p) for p in enumerate_partitions(4, 4)]


def alphabet_spec(atoms, base_s):
    return AlphabetSpec(tuple(SignedAtom(sg, e) for sg, e in atoms), Fraction(base_s, 2))


def s_dict(series):
    return {s: int(c) for s, c in series.items_s()}


@pytest.mark.parametrize("atoms,base_s,counts", ORACLE_ALPHABETS)
@pytest.mark.parametrize("lam", ORACLE_PARTITIONS)
def test_flag_engine_matches_symmetrisation(lam, atoms, base_s, counts):
    letters = truncated_alphabet(atoms, base_s, counts)
    want = qprime_truncated(lam, letters, base_s, 10)
    got = qprime_flag(lam, alphabet_spec(atoms, base_s), 5)
    assert s_dict(got) == want


# -- the literal symmetrisation over Fractions -----------------------------

points = st.lists(st.integers(-9, 9).filter(bool), min_size=3, max_size=3, unique=True).map(
    lambda xs: [Fraction(x, 7) + x for x in xs]
)
small_partitions = st.sampled_from([(1,), (2,), (1, 1), (2, 1), (3,), (1, 1, 1), (2, 2), (3, 1, 1)])


def _schur(lam, x):
    n = len(x)
    parts = list(lam) + [0] * (n - len(lam))

    def alt(exps):
        total = Fraction(0)
        for perm in itertools.permutations(range(n)):
            sign = 1
            for i in range(n):
                for j in range(i + 1, n):
                    if perm[i] > perm[j]:
                        sign = -sign
            term = Fraction(sign)
            for i, e in zip(perm, exps):
                term *= x[i] ** e
            total += term
        return total

    return alt([p + n - 1 - i for i, p in enumerate(parts)]) / alt([n - 1 - i for i in range(n)])


def _monomial(lam, x):
    n = len(x)
    parts = list(lam) + [0] * (n - len(lam))
    total = Fraction(0)
    for exps in set(itertools.permutations(parts)):
        term = Fraction(1)
        for xi, e in zip(x, exps):
            term *= xi**e
        total += term
    return total


@given(small_partitions, points)
@settings(max_examples=30, deadline=None)
def test_oracle_at_t0_is_schur(lam, x):
    assert hl_p_oracle(lam, x, 0) == _schur(lam, x)


@given(small_partitions, points)
@settings(max_examples=30, deadline=None)
def test_oracle_at_t1_is_monomial(lam, x):
    assert hl_p_oracle(lam, x, 1) == _monomial(lam, x)


# t = -1 is a zero of the normalising factor v_lambda(t)
@given(small_partitions, points, st.fractions(min_value=-3, max_value=3).filter(lambda t: t != -1), st.permutations(range(3)))
@settings(max_examples=30, deadline=None)
def test_oracle_is_symmetric_and_homogeneous(lam, x, t, perm):
    value = hl_p_oracle(lam, x, t)
    assert hl_p_oracle(lam, [x[i] for i in perm], t) == value
    assert hl_p_oracle(lam, [3 * xi for xi in x], t) == 3 ** sum(lam) * value


def test_oracle_refuses_repeated_variables():
    with pytest.raises(RepeatedVariable):
        hl_p_oracle((1,), [Fraction(2), Fraction(2)], Fraction(1, 3))


def test_oracle_too_long_partition_vanishes():
    assert hl_p_oracle((1, 1, 1), [Fraction(2), Fraction(3)], Fraction(1, 2)) == 0


# -- structural properties of the flag engine ------------------------------


@pytest.mark.parametrize("lam", [(1,), (2, 1), (2, 2), (3, 1, 1)])
def test_flag_engine_homogeneity(lam):
    # scaling every variable by q^(1/2) multiplies by q^(|lam|/2)
    alpha = AlphabetSpec((SignedAtom.q(0), SignedAtom.q(Fraction(1, 2))), 2)
    shifted = AlphabetSpec(tuple(a.shift_s(1) for a in alpha.vars), 2)
    base = qprime_flag(lam, alpha, 12)
    moved = qprime_flag(lam, shifted, 12 + Fraction(sum(lam), 2))
    assert moved == base.shift(Fraction(sum(lam), 2))


@pytest.mark.parametrize("lam", [(1,), (2, 1), (2, 2)])
def test_flag_engine_symmetry(lam):
    a = AlphabetSpec((SignedAtom.q(1), SignedAtom.q(0, -1), SignedAtom.q(Fraction(1, 2))), Fraction(3, 2))
    b = AlphabetSpec((a.vars[2], a.vars[0], a.vars[1]), Fraction(3, 2))
    assert qprime_flag(lam, a, 10) == qprime_flag(lam, b, 10)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_geometric_evaluations_are_nonnegative_integers(n):
    for lam in enumerate_partitions(3, 6):
        value = p_geometric(lam, n, 15)
        assert value.is_integral() and value.is_nonnegative()


@pytest.mark.parametrize("n,delta", [(1, 0), (1, 1), (2, 0), (2, 1)])
@pytest.mark.parametrize("sigma", [0, 1])
def test_level_one_sum_side_is_a_sum_of_chain_sums(n, delta, sigma):
    order = 30
    total = Series.zero(order)
    for r in range(order + 1):
        if (sigma + 1) * r + r * r - r > order:
            break
        total = total + q2r_multisum(r, n, delta, order).shift((sigma + 1) * r).truncate(order)
    assert sum_side(1, GeometricSpec(2 * n + delta, sigma), order) == total


@pytest.mark.parametrize("r", [0, 1, 2, 3, 4])
@pytest.mark.parametrize("n,delta", [(1, 0), (1, 1), (2, 0), (2, 1), (3, 1)])
def test_two_column_evaluation_matches_chain_sum(r, n, delta):
    assert p_geometric((2,) * r, 2 * n + delta, 30) == q2r_multisum(r, n, delta, 30)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_rank_one_sum_side_is_andrews_gordon(m):
    assert sum_side(m, GeometricSpec(1, 0), 60) == ag_multisum(m, m + 1, 60)
    assert sum_side(m, GeometricSpec(1, 1), 60) == ag_multisum(m, 1, 60)


def test_general_alphabet_sum_side_agrees_with_geometric():
    assert sum_side(2, AlphabetSpec.geometric(2), 30) == sum_side(2, GeometricSpec(2, 1), 30)


def test_bad_parameters():
    with pytest.raises(BadParams):
        sum_side(-1, GeometricSpec(1, 0), 5)
    with pytest.raises(BadParams):
        AlphabetSpec(())
    with pytest.raises(BadParams):
        rect_limit(2, 1, 3)


# -- rectangular limits ----------------------------------------------------


@pytest.mark.parametrize("m,n,k", [(1, 1, 0), (2, 1, 1), (2, 2, 0), (1, 2, 1)])
def test_rect_limit_certificate(m, n, k):
    lim = rect_limit(m, n, k, order=25, certificate=True)
    later = rect_term(m, n, k, lim.r + 2, False, 25)
    assert later == lim.series
