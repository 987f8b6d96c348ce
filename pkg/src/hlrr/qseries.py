"""Truncated Laurent series in q with exact rational coefficients.

Exponents live on the half-integer grid.  Internally every exponent is an
integer count of steps of ``s = q^(1/2)``; the public API speaks q-units and
accepts ``int`` or :class:`fractions.Fraction` exponents.

A :class:`Series` stores the coefficients of ``s^lo .. s^hi`` as integer
numerators over one common positive denominator.  ``hi`` is the truncation
order: every coefficient at or below it is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

import numpy as np

from .errors import SingularPochhammer, ZeroLeadingTerm

INF = float("inf")

_INT64_LIMIT = 2**62


def to_grid(e) -> int:
    """Convert a q-exponent to s-steps, rejecting off-grid values."""
    if isinstance(e, int):
        return 2 * e
    f = Fraction(e)
    g = 2 * f
    if g.denominator != 1:
        raise ValueError(f"exponent {e} is not on the half-integer grid")
    return int(g)


def from_grid(s: int) -> Fraction:
    return Fraction(s, 2)


def fmt_exp(s: int) -> str:
    """Render an s-step exponent in q-units, e.g. ``7/2``."""
    f = from_grid(s)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


# -- raw coefficient-array helpers -------------------------------------------------


def _as_obj(a) -> np.ndarray:
    if isinstance(a, np.ndarray) and a.dtype == object:
        return a
    return np.array([int(x) for x in a], dtype=object)


def _absmax(a) -> int:
    m = 0
    for x in a:
        x = -x if x < 0 else x
        if x > m:
            m = x
    return m


def mul_trunc(a, b, n: int) -> np.ndarray:
    """First ``n`` coefficients of the product of two integer arrays.

    Uses int64 convolution when the result provably fits, Python ints
    otherwise.
    """
    if n <= 0 or len(a) == 0 or len(b) == 0:
        return np.zeros(max(n, 0), dtype=object)
    a = a[:n]
    b = b[:n]
    if len(a) * _absmax(a) * _absmax(b) < _INT64_LIMIT:
        r = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        r = r.astype(object)
    else:
        r = np.convolve(_as_obj(a), _as_obj(b))
    if len(r) < n:
        r = np.concatenate([r, np.zeros(n - len(r), dtype=object)])
    return r[:n]


def mul_binomial(arr: np.ndarray, sign: int, e: int) -> np.ndarray:
    """Multiply by ``(1 - sign*s^e)`` with ``e > 0``, keeping the length."""
    if e >= len(arr):
        return arr
    out = arr.copy()
    if sign == 1:
        out[e:] = arr[e:] - arr[:-e]
    else:
        out[e:] = arr[e:] + arr[:-e]
    return out


def div_binomial(arr: np.ndarray, sign: int, e: int) -> np.ndarray:
    """Divide by ``(1 - sign*s^e)`` with ``e > 0``, keeping the length."""
    n = len(arr)
    if e >= n:
        return arr
    out = arr.copy()
    for start in range(e, n, e):
        stop = min(start + e, n)
        if sign == 1:
            out[start:stop] += out[start - e : stop - e]
        else:
            out[start:stop] -= out[start - e : stop - e]
    return out


def _inv_unit_int(a, n: int) -> np.ndarray:
    """Newton iteration for ``1/a`` where ``a[0]`` is a unit of Z."""
    a = _as_obj(a[:n])
    b = np.array([a[0]], dtype=object)
    k = 1
    while k < n:
        k2 = min(2 * k, n)
        e = -mul_trunc(a, b, k2)
        e[0] += 2
        b = mul_trunc(b, e, k2)
        k = k2
    return b


# -- Series ---------------------------------------------------------------------


class Series:
    """Truncated Laurent series ``sum c_e q^e`` valid for all ``e <= order``."""

    __slots__ = ("lo", "hi", "num", "den")

    def __init__(self, lo: int, hi: int, num, den: int = 1, _normalised: bool = False):
        # lo/hi are s-steps; num holds coefficients of s^lo .. s^hi
        if hi < lo:
            lo = hi + 1
            num = []
        num = list(num)
        length = hi - lo + 1
        if len(num) < length:
            num.extend([0] * (length - len(num)))
        elif len(num) > length:
            num = num[:length]
        if den < 0:
            den = -den
            num = [-x for x in num]
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        self.lo = lo
        self.hi = hi
        self.num = tuple(int(x) for x in num)
        self.den = den
        if not _normalised:
            self._reduce()

    def _reduce(self):
        if self.den == 1:
            return
        g = self.den
        for x in self.num:
            if g == 1:
                return
            g = gcd(g, x)
        if g > 1:
            self.num = tuple(x // g for x in self.num)
            self.den //= g

    # construction ------------------------------------------------------------

    @classmethod
    def zero(cls, order) -> "Series":
        hi = to_grid(order)
        return cls(hi + 1, hi, [])

    @classmethod
    def one(cls, order) -> "Series":
        return cls.monomial(0, order)

    @classmethod
    def monomial(cls, exp, order, coeff=1) -> "Series":
        s = to_grid(exp)
        hi = to_grid(order)
        c = Fraction(coeff)
        if s > hi:
            return cls(s, hi, [])
        return cls(s, hi, [c.numerator], c.denominator)

    @classmethod
    def from_dict(cls, coeffs: Mapping, order, floor=None) -> "Series":
        """Build from ``{q_exponent: coefficient}``; entries above ``order`` are dropped."""
        hi = to_grid(order)
        items = {to_grid(e): Fraction(c) for e, c in coeffs.items()}
        if floor is not None:
            lo = to_grid(floor)
        else:
            lo = min(items) if items else hi + 1
        lo = min([lo] + list(items))
        den = 1
        for c in items.values():
            den = den * c.denominator // gcd(den, c.denominator)
        num = [0] * max(hi - lo + 1, 0)
        for s, c in items.items():
            if s <= hi:
                num[s - lo] = int(c * den)
        return cls(lo, hi, num, den)

    @classmethod
    def from_list(cls, coeffs: Iterable, order=None, floor=0) -> "Series":
        """Coefficients of ``q^floor, q^(floor+1), ...`` (integer q-steps)."""
        coeffs = [Fraction(c) for c in coeffs]
        if order is None:
            order = Fraction(floor) + len(coeffs) - 1
        return cls.from_dict({Fraction(floor) + i: c for i, c in enumerate(coeffs)}, order, floor)

    @classmethod
    def from_array(cls, arr, lo: int, hi: int, den: int = 1) -> "Series":
        """Wrap a raw integer array on the s-grid starting at ``lo``."""
        return cls(lo, hi, arr, den)

    # inspection --------------------------------------------------------------

    @property
    def floor(self) -> Fraction:
        return from_grid(self.lo)

    @property
    def order(self) -> Fraction:
        return from_grid(self.hi)

    def coeff(self, exp) -> Fraction:
        return self.coeff_s(to_grid(exp))

    def coeff_s(self, s: int) -> Fraction:
        if s > self.hi:
            raise ValueError(f"q^{fmt_exp(s)} is beyond the truncation order {fmt_exp(self.hi)}")
        if s < self.lo:
            return Fraction(0)
        return Fraction(self.num[s - self.lo], self.den)

    def items_s(self):
        """Nonzero ``(s_exponent, Fraction)`` pairs in increasing order."""
        for i, x in enumerate(self.num):
            if x:
                yield self.lo + i, Fraction(x, self.den)

    def coeffs(self) -> dict:
        return {from_grid(s): c for s, c in self.items_s()}

    def valuation_s(self):
        for i, x in enumerate(self.num):
            if x:
                return self.lo + i
        return None

    def valuation(self):
        v = self.valuation_s()
        return None if v is None else from_grid(v)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_integral(self) -> bool:
        return self.den == 1

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for x in self.num)

    def on_integer_grid(self) -> bool:
        """True when no half-integer exponent carries a nonzero coefficient."""
        return all(x == 0 for i, x in enumerate(self.num) if (self.lo + i) % 2)

    def integer_coeffs(self, upto=None) -> list:
        """Coefficients of ``q^0 .. q^upto`` as a list (integral series only)."""
        top = self.hi if upto is None else min(self.hi, to_grid(upto))
        out = []
        for s in range(0, top + 1, 2):
            c = self.coeff_s(s)
            out.append(int(c) if c.denominator == 1 else c)
        return out

    def __repr__(self):
        terms = []
        for s, c in list(self.items_s())[:10]:
            terms.append(f"{c}*q^{fmt_exp(s)}")
        body = " + ".join(terms) if terms else "0"
        return f"Series({body} + O(q^{fmt_exp(self.hi + 1)}))"

    # arithmetic --------------------------------------------------------------

    def _aligned(self, other: "Series"):
        lo = min(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        n = max(hi - lo + 1, 0)
        a = [0] * n
        b = [0] * n
        for i, x in enumerate(self.num):
            k = self.lo + i - lo
            if k < n:
                a[k] = x
        for i, x in enumerate(other.num):
            k = other.lo + i - lo
            if k < n:
                b[k] = x
        return lo, hi, a, b

    def __add__(self, other):
        if not isinstance(other, Series):
            other = Series.monomial(0, self.order, other)
        lo, hi, a, b = self._aligned(other)
        d1, d2 = self.den, other.den
        den = d1 * d2 // gcd(d1, d2)
        f1, f2 = den // d1, den // d2
        return Series(lo, hi, [x * f1 + y * f2 for x, y in zip(a, b)], den)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.lo, self.hi, [-x for x in self.num], self.den, _normalised=True)

    def __sub__(self, other):
        if not isinstance(other, Series):
            other = Series.monomial(0, self.order, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series):
            c = Fraction(other)
            return Series(self.lo, self.hi, [x * c.numerator for x in self.num], self.den * c.denominator)
        lo = self.lo + other.lo
        hi = min(self.hi + other.lo, other.hi + self.lo)
        n = hi - lo + 1
        if n <= 0:
            return Series(lo, hi, [])
        num = mul_trunc(self.num, other.num, n)
        return Series(lo, hi, num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "Series":
        """Multiplicative inverse of ``c q^e (1 + ...)``; the result has floor ``-e``."""
        v = self.valuation_s()
        if v is None:
            raise ZeroLeadingTerm("series vanishes to its working order")
        a = list(self.num[v - self.lo :])
        n = self.hi - v + 1
        lo = -v
        hi = lo + n - 1
        if a[0] in (1, -1):
            b = _inv_unit_int(a, n)
            return Series(lo, hi, [x * self.den for x in b])
        # general leading coefficient: exact rational recurrence
        a0 = a[0]
        b = [Fraction(1, 1) / a0]
        for k in range(1, n):
            acc = Fraction(0)
            for j in range(1, k + 1):
                if a[j]:
                    acc += a[j] * b[k - j]
            b.append(-acc / a0)
        b = [x * self.den for x in b]
        return Series.from_dict({from_grid(lo + i): c for i, c in enumerate(b)}, from_grid(hi), from_grid(lo))

    def __truediv__(self, other):
        if not isinstance(other, Series):
            c = Fraction(other)
            return self * (1 / c)
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Series.one(self.order - self.floor) if k == 0 else self
        for _ in range(k - 1):
            out = out * self
        return out

    def shift(self, exp) -> "Series":
        """Multiply by ``q^exp`` (order shifts along with the floor)."""
        s = to_grid(exp)
        return Series(self.lo + s, self.hi + s, self.num, self.den, _normalised=True)

    def truncate(self, order) -> "Series":
        hi = min(self.hi, to_grid(order))
        return Series(self.lo, hi, self.num[: max(hi - self.lo + 1, 0)], self.den)

    def scale_q(self, k: int) -> "Series":
        """Substitute ``q -> q^k`` for a positive integer ``k``."""
        if k <= 0:
            raise ValueError("scale must be positive")
        lo = self.lo * k
        hi = self.hi * k
        num = [0] * (hi - lo + 1)
        for i, x in enumerate(self.num):
            num[i * k] = x
        return Series(lo, hi, num, self.den, _normalised=True)

    # comparison --------------------------------------------------------------

    def first_mismatch_s(self, other: "Series"):
        """Smallest s-exponent in the common valid range where coefficients differ."""
        lo, hi, a, b = self._aligned(other)
        d1, d2 = self.den, other.den
        for i, (x, y) in enumerate(zip(a, b)):
            if x * d2 != y * d1:
                return lo + i
        return None

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.first_mismatch_s(other) is None

    __hash__ = None


# -- signed atoms and factor bags -------------------------------------------------


@dataclass(frozen=True, order=True)
class SignedAtom:
    """The exact value ``sign * q^exp``; ``s`` is the exponent in half-steps."""

    sign: int
    s: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def q(cls, exp=0, sign: int = 1) -> "SignedAtom":
        return cls(sign, to_grid(exp))

    @property
    def exp(self) -> Fraction:
        return from_grid(self.s)

    def __mul__(self, other: "SignedAtom") -> "SignedAtom":
        return SignedAtom(self.sign * other.sign, self.s + other.s)

    def inv(self) -> "SignedAtom":
        return SignedAtom(self.sign, -self.s)

    def shift_s(self, s: int) -> "SignedAtom":
        return SignedAtom(self.sign, self.s + s)

    def pow(self, k: int) -> "SignedAtom":
        return SignedAtom(self.sign**k if k >= 0 else self.sign ** (-k), self.s * k)

    def __repr__(self):
        return f"{'-' if self.sign < 0 else ''}q^{fmt_exp(self.s)}"


class FactorBag:
    """Formal product of ``(1 - eps q^e)^mult`` factors, monomials and constants.

    Finite factors sit in ``fin`` keyed by ``(eps, s)``; infinite Pochhammer
    families ``(eps q^e; q^b)_inf^mult`` sit in ``inf`` keyed by ``(eps, s, b)``
    and are only materialised at expansion time, once the final window is known.
    """

    __slots__ = ("fin", "inf", "const", "shift")

    def __init__(self):
        self.fin: dict = {}
        self.inf: dict = {}
        self.const = Fraction(1)
        self.shift = 0  # monomial s^shift

    def copy(self) -> "FactorBag":
        b = FactorBag()
        b.fin = dict(self.fin)
        b.inf = dict(self.inf)
        b.const = self.const
        b.shift = self.shift
        return b

    def add(self, atom: SignedAtom, mult: int = 1) -> "FactorBag":
        key = (atom.sign, atom.s)
        m = self.fin.get(key, 0) + mult
        if m:
            self.fin[key] = m
        else:
            self.fin.pop(key, None)
        return self

    def add_inf(self, atom: SignedAtom, base_s: int, mult: int = 1) -> "FactorBag":
        if base_s <= 0:
            raise ValueError("base must be positive")
        key = (atom.sign, atom.s, base_s)
        m = self.inf.get(key, 0) + mult
        if m:
            self.inf[key] = m
        else:
            self.inf.pop(key, None)
        return self

    def add_poch(self, atom: SignedAtom, base_s: int, k, mult: int = 1) -> "FactorBag":
        """Multiply by ``(atom; q^base)_k ^ mult`` for integer or infinite ``k``."""
        if k == INF:
            return self.add_inf(atom, base_s, mult)
        if k >= 0:
            for j in range(k):
                self.add(atom.shift_s(j * base_s), mult)
        else:
            for j in range(1, -k + 1):
                self.add(atom.shift_s(-j * base_s), -mult)
        return self

    def add_theta(self, atom: SignedAtom, base_s: int, mult: int = 1) -> "FactorBag":
        self.add_inf(atom, base_s, mult)
        self.add_inf(SignedAtom(atom.sign, base_s - atom.s), base_s, mult)
        return self

    def mul_const(self, c) -> "FactorBag":
        self.const *= Fraction(c)
        return self

    def mul_monomial_s(self, s: int) -> "FactorBag":
        self.shift += s
        return self

    def __mul__(self, other: "FactorBag") -> "FactorBag":
        out = self.copy()
        for (e, s), m in other.fin.items():
            out.add(SignedAtom(e, s), m)
        for (e, s, b), m in other.inf.items():
            out.add_inf(SignedAtom(e, s), b, m)
        out.const *= other.const
        out.shift += other.shift
        return out

    def inverse(self) -> "FactorBag":
        out = FactorBag()
        out.fin = {k: -m for k, m in self.fin.items()}
        out.inf = {k: -m for k, m in self.inf.items()}
        if self.const == 0:
            raise ZeroDivisionError("inverse of a zero bag")
        out.const = 1 / self.const
        out.shift = -self.shift
        return out

    def __pow__(self, k: int) -> "FactorBag":
        if k < 0:
            return self.inverse() ** (-k)
        out = FactorBag()
        for _ in range(k):
            out = out * self
        return out

    # normal form -------------------------------------------------------------

    def _finite_factors(self, top: int):
        """All finite factors, with infinite families cut at exponent ``top``.

        Factors whose exponent exceeds ``top`` are congruent to 1 and omitted.
        """
        facs = dict(self.fin)
        for (eps, s, b), m in self.inf.items():
            e = s
            while e <= top:
                key = (eps, e)
                facs[key] = facs.get(key, 0) + m
                e += b
        return {k: m for k, m in facs.items() if m}

    def normalised(self, top: int):
        """Return ``(const, shift, {(eps, e>0): mult})`` with all exponents positive.

        Raises :class:`SingularPochhammer` on an uncancelled ``1/(1-1)``; a
        surviving ``(1-1)`` in the numerator makes ``const`` zero.
        """
        const = self.const
        shift = self.shift
        # negative-exponent families contribute finitely many negative factors
        neg_shift = 0
        for (eps, s, b), m in self.inf.items():
            e = s
            while e < 0:
                neg_shift += e * m
                e += b
        for (eps, s), m in self.fin.items():
            if s < 0:
                neg_shift += s * m
        facs = self._finite_factors(top - shift - neg_shift)
        out: dict = {}
        zero = False
        for (eps, s), m in facs.items():
            if s == 0:
                if eps == 1:
                    if m > 0:
                        zero = True
                    else:
                        raise SingularPochhammer("zero factor (1 - 1) in a denominator")
                else:
                    const *= Fraction(2) ** m
                continue
            if s < 0:
                # 1 - eps q^e = -eps q^e (1 - eps q^-e)
                const *= (-eps) ** abs(m)
                shift += s * m
                s = -s
            key = (eps, s)
            out[key] = out.get(key, 0) + m
        out = {k: m for k, m in out.items() if m}
        if zero:
            const = Fraction(0)
        return const, shift, out

    def canonical(self, order) -> dict:
        """Map ``e -> mult`` such that the bag equals ``const * q^shift * prod (1-q^e)^mult``.

        Factors ``(1 + q^e)`` are rewritten as ``(1 - q^2e)/(1 - q^e)``; only
        exponents up to ``order`` (q-units) are kept.  By uniqueness of such
        product expansions, equal series have equal canonical maps.
        """
        top = to_grid(order)
        const, shift, facs = self.normalised(top)
        canon: dict = {}
        for (eps, s), m in facs.items():
            if eps == 1:
                canon[s] = canon.get(s, 0) + m
            else:
                canon[2 * s] = canon.get(2 * s, 0) + m
                canon[s] = canon.get(s, 0) - m
        return {
            "const": const,
            "shift": from_grid(shift),
            "factors": {from_grid(s): m for s, m in sorted(canon.items()) if m and s <= top},
        }

    def expand(self, order) -> Series:
        """Expand to a Series valid through ``q^order``."""
        return self.expand_s(to_grid(order))

    def expand_s(self, hi: int) -> Series:
        const, shift, facs = self.normalised(hi)
        n = hi - shift + 1
        if n <= 0 or const == 0:
            return Series(shift if n > 0 else hi + 1, hi, [])
        facs = {k: m for k, m in facs.items() if k[1] < n}
        g = 0
        for (_, s) in facs:
            g = gcd(g, s)
        g = g or n
        m_len = (n - 1) // g + 1
        arr = np.zeros(m_len, dtype=object)
        arr[0] = 1
        for (eps, s), m in sorted(facs.items(), key=lambda kv: kv[0][1]):
            e = s // g
            for _ in range(abs(m)):
                arr = mul_binomial(arr, eps, e) if m > 0 else div_binomial(arr, eps, e)
        full = [0] * n
        for i, x in enumerate(arr):
            full[i * g] = x
        return Series(shift, hi, [x * const.numerator for x in full], const.denominator)


# -- builders -------------------------------------------------------------------


def _base_s(base) -> int:
    b = to_grid(base)
    if b <= 0:
        raise ValueError("base must be positive")
    return b


def poch(a: SignedAtom, base, k, order) -> Series:
    """``(a; q^base)_k`` truncated at ``order``; ``k`` may be negative or ``INF``."""
    return FactorBag().add_poch(a, _base_s(base), k).expand(order)


def theta(a: SignedAtom, base, order) -> Series:
    """Modified theta function ``(a; p)_inf (p/a; p)_inf`` with ``p = q^base``."""
    return FactorBag().add_theta(a, _base_s(base)).expand(order)


def qbinom(n: int, m: int, base, order) -> Series:
    """Gaussian binomial ``[n choose m]`` in ``q^base``; zero outside ``0 <= m <= n``."""
    b = _base_s(base)
    if m < 0 or m > n:
        return Series.zero(order)
    bag = FactorBag()
    one = SignedAtom(1, b)
    bag.add_poch(one, b, n)
    bag.add_poch(one, b, m, -1)
    bag.add_poch(one, b, n - m, -1)
    return bag.expand(order)


def series_add(a: Series, b: Series) -> Series:
    return a + b


def series_mul(a: Series, b: Series) -> Series:
    return a * b


def series_invert_unit(a: Series) -> Series:
    return a.inverse()
