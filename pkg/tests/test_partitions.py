import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hlrr.partitions import (
    Partition,
    b_lambda,
    conjugate,
    enumerate_flags,
    enumerate_partitions,
    subpartitions,
)
from oracles import b_lambda_dict, partitions_of

# p(n) for n = 0..15
PARTITION_NUMBERS = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176]

partitions = st.lists(st.integers(1, 6), max_size=6).map(lambda xs: Partition(sorted(xs, reverse=True)))


def test_partition_counts():
    parts = enumerate_partitions(15, 15)
    for n, expected in enumerate(PARTITION_NUMBERS):
        assert sum(1 for p in parts if p.size == n) == expected


def test_enumeration_respects_bounds():
    for p in enumerate_partitions(3, 9):
        assert p.size <= 9
        assert not p or p[0] <= 3
    assert len(enumerate_partitions(3, 9)) == len(set(enumerate_partitions(3, 9)))


def test_rejects_increasing_parts():
    with pytest.raises(ValueError):
        Partition((1, 2))


def test_zeros_are_dropped():
    assert Partition((3, 1, 0, 0)) == (3, 1)


@given(partitions)
def test_conjugation_is_an_involution(lam):
    assert conjugate(conjugate(lam)) == lam
    assert conjugate(lam).size == lam.size


@given(partitions)
def test_n_statistic_is_sum_of_conjugate_binomials(lam):
    assert lam.n() == sum(c * (c - 1) // 2 for c in conjugate(lam))


@given(partitions)
def test_subpartitions_are_exactly_the_contained_ones(lam):
    subs = set(subpartitions(lam))
    brute = {
        Partition(mu)
        for k in range(lam.size + 1)
        for mu in partitions_of(k)
        if lam.contains(Partition(mu))
    }
    assert subs == brute


def _reverse_plane_partitions(lam, n):
    cells = [(i, j) for i, row in enumerate(lam) for j in range(row)]
    count = 0
    for values in itertools.product(range(n), repeat=len(cells)):
        v = dict(zip(cells, values))
        ok = all(
            (j == 0 or v[(i, j - 1)] <= v[(i, j)]) and (i == 0 or v[(i - 1, j)] <= v[(i, j)])
            for (i, j) in cells
        )
        count += ok
    return count


@pytest.mark.parametrize("lam", [(1,), (2,), (1, 1), (2, 1), (2, 2), (3, 1)])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_flag_count_matches_plane_partitions(lam, n):
    # a flag of length n is a filling with values 0..n-1 weakly increasing along rows and columns
    flags = enumerate_flags(lam, n)
    assert len(flags) == _reverse_plane_partitions(lam, n)
    for flag in flags:
        assert flag[0] == Partition() and flag[-1] == Partition(lam)
        assert all(flag[i + 1].contains(flag[i]) for i in range(n))


@pytest.mark.parametrize("lam", [(), (1,), (2, 2, 1), (3, 3, 3), (4, 2, 2, 1, 1)])
@pytest.mark.parametrize("base", [1, 2])
def test_b_lambda(lam, base):
    got = b_lambda(lam, base, 20)
    want = b_lambda_dict(lam, 20 // base)
    assert {int(e): int(c) for e, c in got.coeffs().items()} == {base * e: c for e, c in want.items()}
