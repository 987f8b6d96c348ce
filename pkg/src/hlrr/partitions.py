"""Integer partitions, flags of nested partitions, and ``b_lambda``."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence

from .qseries import FactorBag, Series, SignedAtom, to_grid


class Partition(tuple):
    """A weakly decreasing tuple of positive integers."""

    def __new__(cls, parts: Sequence[int] = ()):
        parts = tuple(int(p) for p in parts if p != 0)
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise ValueError(f"parts must be weakly decreasing: {parts}")
        if parts and parts[-1] < 0:
            raise ValueError("parts must be positive")
        return super().__new__(cls, parts)

    def __repr__(self):
        return f"Partition({tuple(self)})"

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def part(self, i: int) -> int:
        """1-based part with the convention ``lambda_i = 0`` past the end."""
        return self[i - 1] if 1 <= i <= len(self) else 0

    def conjugate(self) -> "Partition":
        return conjugate(self)

    def doubled(self) -> "Partition":
        return Partition(2 * p for p in self)

    def multiplicity(self, i: int) -> int:
        return sum(1 for p in self if p == i)

    def multiplicities(self) -> dict:
        out: dict = {}
        for p in self:
            out[p] = out.get(p, 0) + 1
        return out

    def contains(self, other: "Partition") -> bool:
        """True when the diagram of ``other`` fits inside this one."""
        if len(other) > len(self):
            return False
        return all(b <= a for a, b in zip(self, other))

    def n(self) -> int:
        """``sum (i-1) lambda_i``."""
        return sum(i * p for i, p in enumerate(self))


def conjugate(lam: Sequence[int]) -> Partition:
    lam = tuple(lam)
    if not lam:
        return Partition()
    return Partition(sum(1 for p in lam if p >= i) for i in range(1, lam[0] + 1))


def b_lambda(lam: Sequence[int], base, order) -> Series:
    """``prod_i (q^base; q^base)_{m_i(lambda)}`` truncated at ``order``."""
    b = to_grid(base)
    bag = FactorBag()
    for m in Partition(lam).multiplicities().values():
        bag.add_poch(SignedAtom(1, b), b, m)
    return bag.expand(order)


def enumerate_partitions(max_part: int, max_size: int) -> list:
    """All partitions with largest part ``<= max_part`` and size ``<= max_size``.

    Ordered by size, then lexicographically descending within a size.
    """
    out = []
    for size in range(max_size + 1):
        out.extend(_partitions_of(size, max_part))
    return out


def _partitions_of(n: int, max_part: int) -> Iterator[Partition]:
    def rec(rest, cap, prefix):
        if rest == 0:
            yield Partition(prefix)
            return
        for p in range(min(rest, cap), 0, -1):
            yield from rec(rest - p, p, prefix + (p,))

    if max_part <= 0:
        if n == 0:
            yield Partition()
        return
    yield from rec(n, max_part, ())


def subpartitions(top: Sequence[int]) -> list:
    """All partitions contained in ``top`` (including the empty one and ``top``)."""
    top = tuple(top)
    out = []

    def rec(i, cap, prefix):
        if i == len(top):
            out.append(Partition(prefix))
            return
        for p in range(min(cap, top[i]), -1, -1):
            if p == 0:
                out.append(Partition(prefix))
                break
            rec(i + 1, p, prefix + (p,))

    rec(0, top[0] if top else 0, ())
    return sorted(set(out), key=lambda p: (p.size, tuple(-x for x in p)))


def enumerate_flags(top: Sequence[int], n: int) -> list:
    """Chains ``0 = mu(n) <= ... <= mu(1) <= mu(0) = top`` as tuples ``(mu(n), ..., mu(0))``."""
    if n < 1:
        raise ValueError("flag length n must be >= 1")
    top = Partition(top)
    flags = []

    def rec(chain):
        if len(chain) == n:
            flags.append(tuple(reversed(chain + [Partition()])))
            return
        for sub in _subpartitions_cached(chain[-1]):
            rec(chain + [sub])

    rec([top])
    return flags


@lru_cache(maxsize=None)
def _subpartitions_cached(top: Partition) -> tuple:
    return tuple(subpartitions(top))
