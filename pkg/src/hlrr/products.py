"""Infinite-product sides, built from one parameter table.

Each row builds a :class:`ProductForm`: eta factors ``(q^a; q^a)_inf``,
theta factors ``theta(+-q^b; q^a)``, a constant and an optional finite
prefactor.  The modulus of every row is computed here from the row's own
rule and never passed in; ``perturb`` shifts it for negative controls.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import BadParams, UnknownIdentity
from .qseries import FactorBag, Series, SignedAtom, to_grid


@dataclass
class ProductForm:
    etas: Counter = field(default_factory=Counter)
    thetas: Counter = field(default_factory=Counter)
    const: Fraction = Fraction(1)
    prefactor: FactorBag | None = None
    modulus: Fraction | None = None

    def eta(self, a, mult: int = 1) -> "ProductForm":
        """Multiply by ``(q^a; q^a)_inf ^ mult``."""
        a = Fraction(a)
        if a <= 0:
            raise BadParams(f"eta base must be positive, got {a}")
        self.etas[a] += mult
        return self

    def theta(self, b, a, mult: int = 1, sign: int = 1) -> "ProductForm":
        """Multiply by ``theta(sign q^b; q^a) ^ mult``."""
        a = Fraction(a)
        if a <= 0:
            raise BadParams(f"theta base must be positive, got {a}")
        self.thetas[(sign, Fraction(b), a)] += mult
        return self

    def bag(self) -> FactorBag:
        out = FactorBag()
        for a, m in self.etas.items():
            if m:
                out.add_inf(SignedAtom.q(a), to_grid(a), m)
        for (sign, b, a), m in self.thetas.items():
            if m:
                out.add_theta(SignedAtom.q(b, sign), to_grid(a), m)
        out.mul_const(self.const)
        if self.prefactor is not None:
            out = out * self.prefactor
        return out

    def expand(self, order) -> Series:
        return self.bag().expand(order)

    def canonical_thetas(self) -> Counter:
        """Theta factors with arguments reflected into ``0 < b <= a/2`` where possible."""
        out: Counter = Counter()
        for (sign, b, a), m in self.thetas.items():
            if m:
                out[(sign, canonical_theta_arg(b, a, sign), a)] += m
        return +out


def canonical_theta_arg(b, a, sign: int = 1) -> Fraction:
    """Reflect ``theta(q^b; q^a) = theta(q^(a-b); q^a)`` towards the smaller argument."""
    b = Fraction(b)
    a = Fraction(a)
    if 0 < b < a and a - b < b:
        return a - b
    return b


# -- rows --------------------------------------------------------------------------


def _need(cond: bool, msg: str):
    if not cond:
        raise BadParams(msg)


def _pos(params, *names):
    for name in names:
        v = params.get(name)
        if not isinstance(v, int) or v < 1:
            raise BadParams(f"{name} must be a positive integer, got {v!r}")


def _level_dual(form: ProductForm, level: int, kappa, single: Callable, pair: Callable):
    """``(q^k;q^k)^level/(q)^level * prod theta(single(i)) prod theta(j-i, pair(i,j))``."""
    form.eta(kappa, level).eta(1, -level)
    for i in range(1, level + 1):
        form.theta(single(i), kappa)
    for i in range(1, level + 1):
        for j in range(i + 1, level + 1):
            form.theta(j - i, kappa).theta(pair(i, j), kappa)
    form.modulus = Fraction(kappa)
    return form


def _rr(p, d):
    s = p["sigma"]
    _need(s in (0, 1), "sigma must be 0 or 1")
    mod = 5 + d
    form = ProductForm(modulus=Fraction(mod))
    form.prefactor = (
        FactorBag()
        .add_inf(SignedAtom.q(s + 1), to_grid(mod), -1)
        .add_inf(SignedAtom.q(mod - 1 - s), to_grid(mod), -1)
    )
    return form


def _ag(p, d):
    _pos(p, "m")
    m, i = p["m"], p["i"]
    _need(isinstance(i, int) and 1 <= i <= m + 1, "need 1 <= i <= m+1")
    kappa = 2 * m + 3 + d
    form = ProductForm(modulus=Fraction(kappa))
    return form.eta(kappa).eta(1, -1).theta(i, kappa)


def _a2n2a_n(p, d):
    _pos(p, "m", "n")
    m, n = p["m"], p["n"]
    kappa = 2 * m + 2 * n + 1 + d
    return _level_dual(ProductForm(), n, kappa, lambda i: i + m, lambda i, j: i + j - 1)


def _a2n2a_m(p, d):
    _pos(p, "m", "n")
    m, n = p["m"], p["n"]
    kappa = 2 * m + 2 * n + 1 + d
    return _level_dual(ProductForm(), m, kappa, lambda i: i + 1, lambda i, j: i + j + 1)


def _a2n2b_n(p, d):
    _pos(p, "m", "n")
    m, n = p["m"], p["n"]
    kappa = 2 * m + 2 * n + 1 + d
    return _level_dual(ProductForm(), n, kappa, lambda i: i, lambda i, j: i + j)


def _a2n2b_m(p, d):
    _pos(p, "m", "n")
    m, n = p["m"], p["n"]
    kappa = 2 * m + 2 * n + 1 + d
    return _level_dual(ProductForm(), m, kappa, lambda i: i, lambda i, j: i + j)


def _cn_n(p, d):
    _pos(p, "m", "n")
    m, n = p["m"], p["n"]
    kappa = 2 * m + 2 * n + 2 + d
    half = Fraction(kappa, 2)
    form = ProductForm(modulus=Fraction(kappa))
    form.eta(2).eta(half).eta(kappa, n - 1).eta(1, -(n + 1))
    for i in range(1, n + 1):
        form.theta(i, half)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            form.theta(j - i, kappa).theta(i + j, kappa)
    return form


def _cn_m(p, d):
    _pos(p, "m", "n")
    m, n = p["m"], p["n"]
    kappa = 2 * m + 2 * n + 2 + d
    return _level_dual(ProductForm(), m, kappa, lambda i: i + 1, lambda i, j: i + j + 1)


def _dn_n(p, d):
    _pos(p, "m", "n")
    m, n = p["m"], p["n"]
    _need(n >= 2, "dn needs n >= 2")
    kappa = 2 * m + 2 * n + d
    form = ProductForm(modulus=Fraction(kappa))
    form.eta(kappa, n).eta(2, -1).eta(1, -(n - 1))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            form.theta(j - i, kappa).theta(i + j - 1, kappa)
    return form


def _dn_m(p, d):
    _pos(p, "m", "n")
    m, n = p["m"], p["n"]
    _need(n >= 2, "dn needs n >= 2")
    kappa = 2 * m + 2 * n + d
    return _level_dual(ProductForm(), m, kappa, lambda i: i, lambda i, j: i + j)


def _mixed(p, d):
    _pos(p, "m", "n")
    m, n, s = p["m"], p["n"], p["sigma"]
    _need(s in (0, 1), "sigma must be 0 or 1")
    kappa = 2 * m + n + 2 + d
    return _level_dual(ProductForm(), m, kappa, lambda i: i - s + 1, lambda i, j: i + j - s + 1)


def _an(level, other, d):
    kappa = level + other + d
    form = ProductForm(modulus=Fraction(kappa))
    form.eta(kappa, level - 1).eta(1, -level)
    for i in range(1, level + 1):
        for j in range(i + 1, level + 1):
            form.theta(j - i, kappa)
    return form


def _an_n(p, d):
    _pos(p, "m", "n")
    return _an(p["n"], p["m"], d)


def _an_m(p, d):
    _pos(p, "m", "n")
    return _an(p["m"], p["n"], d)


def _limk(p, d):
    _pos(p, "m", "n")
    m, n, k = p["m"], p["n"], p["k"]
    _need(isinstance(k, int) and 0 <= k <= m, "need 0 <= k <= m")
    kappa = m + n + d
    form = ProductForm(modulus=Fraction(kappa))
    form.eta(n).eta(kappa, n - 1).eta(1, -n)
    for i in range(1, n):
        form.theta(i + k, kappa)
    for i in range(1, n):
        for j in range(i + 1, n):
            form.theta(j - i, kappa)
    return form


def _limk_flip(p, d):
    _pos(p, "m", "n")
    m, n, k = p["m"], p["n"], p["k"]
    _need(isinstance(k, int) and k >= m, "the flipped limit needs k >= m")
    kappa = m + n + d
    form = ProductForm(modulus=Fraction(kappa))
    form.eta(n).eta(kappa, n - 1).eta(1, -n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            form.theta(j - i, kappa)
    top = k - m + n - 1
    one = SignedAtom.q(1)
    form.prefactor = (
        FactorBag().add_poch(one, 2, top).add_poch(one, 2, n - 1, -1).add_poch(one, 2, top - n + 1, -1)
    )
    return form


def _q2r_companion(p, d):
    _pos(p, "n")
    n, s = p["n"], p["sigma"]
    _need(s in (0, 1), "sigma must be 0 or 1")
    mod = n + 4 + d
    return ProductForm(modulus=Fraction(mod)).eta(mod).eta(1, -1).theta(2 - s, mod)


def _bressoud(p, d):
    _pos(p, "n")
    n, delta = p["n"], p["delta"]
    _need(delta in (0, 1), "delta must be 0 or 1")
    mod = 2 * n + 2 + delta + d
    return ProductForm(modulus=Fraction(mod)).eta(mod).eta(1, -1).theta(1, mod)


def _lam(p, n, allow_half=False):
    lam = tuple(Fraction(x) for x in p["lam"])
    _need(len(lam) == n + 1, f"lam needs n+1 = {n + 1} entries (lam_0..lam_n)")
    for a, b in zip(lam, lam[1:]):
        _need(a >= b, "lam must be weakly decreasing")
    _need(lam[-1] >= 0, "lam entries must be nonnegative")
    whole = all(x.denominator == 1 for x in lam)
    half = all(x.denominator == 2 for x in lam)
    _need(whole or (allow_half and half), "lam must be a partition" + (" or half-partition" if allow_half else ""))
    return lam


def _kac2(p, d):
    _pos(p, "n")
    n = p["n"]
    lam = _lam(p, n)
    kappa = 2 * n + 2 * lam[0] + 2 + d
    half = kappa / 2
    form = ProductForm(modulus=Fraction(kappa))
    form.eta(2).eta(half).eta(kappa, n - 1).eta(1, -(n + 1))
    for i in range(1, n + 1):
        form.theta(lam[i] + n - i + 1, half)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            form.theta(lam[i] - lam[j] - i + j, kappa).theta(lam[i] + lam[j] + 2 * n + 2 - i - j, kappa)
    return form


def _principal(p, d):
    _pos(p, "n")
    n = p["n"]
    lam = _lam(p, n)
    kappa = 2 * n + 2 * lam[0] + 1 + d
    shift = lam[0] - lam[1]
    form = ProductForm(modulus=Fraction(kappa))
    form.eta(kappa, n).eta(1, -n)
    for i in range(1, n + 1):
        form.theta(lam[1] - lam[i] + shift + i, kappa)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            form.theta(lam[i] - lam[j] - i + j, kappa).theta(lam[i] + lam[j] - i - j + 2 * n + 1, kappa)
    return form


def _f_dn2(p, d):
    _pos(p, "n")
    n = p["n"]
    lam = _lam(p, n, allow_half=True)
    kappa = 2 * n + 2 * lam[0] + d
    form = ProductForm(modulus=Fraction(kappa))
    form.eta(kappa, n).eta(2, -1).eta(1, -(n - 1))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            form.theta(lam[i] - lam[j] - i + j, kappa).theta(lam[i] + lam[j] - i - j + 2 * n + 1, kappa)
    return form


PRODUCTS: dict = {
    "rr": (_rr, ("sigma",)),
    "ag": (_ag, ("m", "i")),
    "a2n2a-n": (_a2n2a_n, ("m", "n")),
    "a2n2a-m": (_a2n2a_m, ("m", "n")),
    "a2n2b-n": (_a2n2b_n, ("m", "n")),
    "a2n2b-m": (_a2n2b_m, ("m", "n")),
    "cn-n": (_cn_n, ("m", "n")),
    "cn-m": (_cn_m, ("m", "n")),
    "dn-n": (_dn_n, ("m", "n")),
    "dn-m": (_dn_m, ("m", "n")),
    "mixed": (_mixed, ("m", "n", "sigma")),
    "an-n": (_an_n, ("m", "n")),
    "an-m": (_an_m, ("m", "n")),
    "limk": (_limk, ("m", "n", "k")),
    "limk-flip": (_limk_flip, ("m", "n", "k")),
    "q2r-companion": (_q2r_companion, ("n", "sigma")),
    "bressoud": (_bressoud, ("n", "delta")),
    "kac2": (_kac2, ("lam", "n")),
    "principal": (_principal, ("lam", "n")),
    "f-dn2": (_f_dn2, ("lam", "n")),
}


def product_form(pid: str, params: dict, perturb: int = 0) -> ProductForm:
    try:
        builder, names = PRODUCTS[pid]
    except KeyError:
        raise UnknownIdentity(f"unknown product id {pid!r}") from None
    missing = [k for k in names if k not in params]
    if missing:
        raise BadParams(f"{pid}: missing parameter(s) {', '.join(missing)}")
    return builder(params, perturb)


def product_side(pid: str, params: dict, order, perturb: int = 0) -> Series:
    """The product of row ``pid`` expanded through ``q^order``."""
    return product_form(pid, params, perturb).expand(order)


# -- constant displays ---------------------------------------------------------------


def _c32(n):
    lhs = ProductForm().eta(2 * n, n)
    for i in range(1, n + 1):
        lhs.theta(2 * n - 2 * i + 1, 2 * n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            lhs.theta(j - i, 2 * n).theta(2 * n - i - j + 1, 2 * n)
    rhs = ProductForm().eta(1, n + 1).eta(2, -1)
    return lhs, rhs


def _c33(n):
    lhs = ProductForm().eta(2 * n - 1, n)
    for i in range(1, n + 1):
        lhs.theta(n - i, 2 * n - 1, sign=-1).theta(2 * n - 2 * i + 1, 4 * n - 2)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            lhs.theta(j - i, 2 * n - 1).theta(2 * n - i - j, 2 * n - 1)
    rhs = ProductForm(const=Fraction(2)).eta(1, n)
    return lhs, rhs


def _c34(n):
    lhs = ProductForm().eta(2 * n - 1, n)
    for i in range(1, n + 1):
        lhs.theta(2 * n - i, 2 * n - 1, sign=-1).theta(2 * n - 2 * i + 1, 4 * n - 2)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            lhs.theta(j - i, 2 * n - 1).theta(2 * n - i - j + 1, 2 * n - 1)
    rhs = ProductForm(const=Fraction(2)).eta(1, n)
    return lhs, rhs


def _c35(n):
    _need(n >= 2, "c35 needs n >= 2")
    lhs = ProductForm().eta(2 * n - 2, n - 1).eta(n - 1)
    for i in range(1, n + 1):
        lhs.theta(n - i, n - 1, sign=-1)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            lhs.theta(j - i, 2 * n - 2).theta(2 * n - i - j, 2 * n - 2)
    rhs = ProductForm(const=Fraction(4)).eta(2).eta(1, n - 1)
    return lhs, rhs


CONSTANTS = {"c32": _c32, "c33": _c33, "c34": _c34, "c35": _c35}


def constant_forms(cid: str, n: int):
    if cid not in CONSTANTS:
        raise UnknownIdentity(f"unknown constant display {cid!r}")
    if not isinstance(n, int) or n < 1:
        raise BadParams(f"n must be a positive integer, got {n!r}")
    return CONSTANTS[cid](n)


def product_constant(cid: str, n: int, order, m: int | None = None):
    """Both sides of a constant display as Series (``m`` is accepted and unused)."""
    lhs, rhs = constant_forms(cid, n)
    return lhs.expand(order), rhs.expand(order)
