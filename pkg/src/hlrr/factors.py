"""Products of binomials in symbolic variables, evaluated at q-power points.

An :class:`XBag` stands for

    const * x^beta * q^t * prod (1 - sign * x^alpha * q^s)^mult

over symbolic ``x = (x_1, ..., x_n)``.  Exponents of q are kept in half-steps
of the *identity's* q; evaluation substitutes ``q -> q^base`` and each
``x_i`` by a signed q-power.

Specialisations such as ``x_i x_j = 1`` make individual factors vanish.  For
a rational function that stays finite at the point, the value is the limit
along ``x_i -> x_i * z^w_i`` with ``z -> 1``: a vanishing factor
``1 - z^b`` behaves like ``b (1 - z)``, so only the net order of vanishing and
the product of the ``b``s survive.  Factors that vanish identically (no x
dependence) are genuine zeros or poles.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import SingularPochhammer
from .qseries import FactorBag, Series, SignedAtom


def default_direction(n: int) -> tuple:
    # pairwise sums and differences of powers of two never vanish
    return tuple(2**i for i in range(n))


class XBag:
    __slots__ = ("n", "fac", "beta", "t", "const")

    def __init__(self, n: int):
        self.n = n
        self.fac: dict = {}
        self.beta = [0] * n
        self.t = 0
        self.const = Fraction(1)

    def add(self, alpha: Sequence[int], s: int, mult: int = 1, sign: int = 1) -> "XBag":
        """Multiply by ``(1 - sign * x^alpha * q^(s/2))^mult``."""
        key = (sign, tuple(alpha), s)
        m = self.fac.get(key, 0) + mult
        if m:
            self.fac[key] = m
        else:
            self.fac.pop(key, None)
        return self

    def add_poch(self, alpha, s: int, base_s: int, k: int, mult: int = 1, sign: int = 1) -> "XBag":
        """Multiply by ``(sign x^alpha q^(s/2); q^(base_s/2))_k ^ mult`` for integer ``k``."""
        if k >= 0:
            for j in range(k):
                self.add(alpha, s + j * base_s, mult, sign)
        else:
            for j in range(1, -k + 1):
                self.add(alpha, s - j * base_s, -mult, sign)
        return self

    def mono(self, beta: Sequence[int], t: int = 0, sign: int = 1) -> "XBag":
        for i, b in enumerate(beta):
            self.beta[i] += b
        self.t += t
        if sign < 0:
            self.const = -self.const
        return self

    def scale(self, c) -> "XBag":
        self.const *= Fraction(c)
        return self

    # evaluation --------------------------------------------------------------

    def _specialise(self, atoms: Sequence[SignedAtom], base_s: int, direction):
        """Map to ``(FactorBag, zero_order)`` at the point, or ``None`` if identically 0."""
        if direction is None:
            direction = default_direction(self.n)
        bag = FactorBag()
        sign = 1
        s_tot = 0
        for b, a in zip(self.beta, atoms):
            if b:
                if a.sign < 0 and b % 2:
                    sign = -sign
                s_tot += b * a.s
        s_tot += _scaled(self.t, base_s)
        const = self.const * sign
        zero_order = 0
        for (fsign, alpha, s), m in self.fac.items():
            eps = fsign
            e = _scaled(s, base_s)
            zb = 0
            for k, a in enumerate(alpha):
                if k >= len(atoms):
                    break
                if a:
                    if atoms[k].sign < 0 and a % 2:
                        eps = -eps
                    e += a * atoms[k].s
                    zb += a * direction[k]
            if eps == 1 and e == 0 and zb != 0:
                zero_order += m
                const *= Fraction(zb) ** m
            else:
                bag.add(SignedAtom(eps, e), m)
        bag.mul_const(const)
        bag.mul_monomial_s(s_tot)
        return bag, zero_order

    def evaluate(self, atoms: Sequence[SignedAtom], base_s: int, hi_s: int, direction=None) -> Series:
        """Value (or removable limit) at ``x = atoms``, ``q -> q^(base_s/2)``, valid to ``s^hi_s``."""
        bag, zero_order = self._specialise(atoms, base_s, direction)
        if zero_order > 0:
            return Series(hi_s + 1, hi_s, [])
        if zero_order < 0:
            raise SingularPochhammer("term diverges at the specialisation")
        return bag.expand_s(hi_s)

    def valuation_s(self, atoms: Sequence[SignedAtom], base_s: int, direction=None):
        """Exact lowest exponent of the specialised value, or ``None`` when it is 0."""
        bag, zero_order = self._specialise(atoms, base_s, direction)
        if zero_order > 0:
            return None
        if zero_order < 0:
            raise SingularPochhammer("term diverges at the specialisation")
        v = bag.shift
        for (eps, e), m in bag.fin.items():
            if e == 0:
                if eps == 1:
                    if m > 0:
                        return None
                    raise SingularPochhammer("zero factor (1 - 1) in a denominator")
            elif e < 0:
                v += e * m
        return v


def _scaled(s: int, base_s: int) -> int:
    # identity exponent s/2 becomes (s/2) * (base_s/2) = s*base_s/4 q-units
    num = s * base_s
    if num % 2:
        raise ValueError("specialised exponent falls off the half-integer grid")
    return num // 2
