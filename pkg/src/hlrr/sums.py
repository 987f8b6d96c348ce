"""Sum engines that do not go through Hall-Littlewood polynomials.

Lattice sums over ``Z^n`` are made finite by a separable quadratic lower
bound on the q-valuation of each summand::

    val(r) >= C0 + sum_i (A_i r_i^2 - K_i |r_i| - C_i)

Every factor of a summand is bounded on its own (see ``_Bound``): a
binomial ``1 - c q^(a + b r)`` has valuation ``min(0, a + b r) >=
-|a| - |b||r|``, monomials are linear, and a ratio ``(u)_r / (v)_r`` loses
at most a constant for ``r >= 0`` and ``|u - v|`` per step for ``r < 0``.
Points outside the resulting box cannot reach the order; points inside are
kept only if their exact valuation does.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import BadParams, PoleEncountered, UncertifiedSpec
from .factors import XBag
from .hall_littlewood import AlphabetSpec
from .qseries import FactorBag, Series, SignedAtom, mul_trunc, to_grid


# -- chain multisums -------------------------------------------------------------------


def inv_poch_coeffs(k: int, base: int, n: int) -> np.ndarray:
    """First ``n`` coefficients of ``1/(q^base; q^base)_k``."""
    arr = np.zeros(max(n, 1), dtype=object)
    arr[0] = 1
    for j in range(1, k + 1):
        step = base * j
        for start in range(step, n, step):
            end = min(start + step, n)
            arr[start:end] += arr[start - step : end - step]
    return arr[:n]


def _whole(order) -> int:
    """Integer-grid builders work through ``q^floor(order)``."""
    return math.floor(Fraction(order))


def _q_series(arr, order: int) -> Series:
    """Integer coefficients of ``q^0..q^order`` as a Series."""
    num = [0] * (2 * order + 1)
    for i, c in enumerate(arr[: order + 1]):
        num[2 * i] = c
    return Series(0, 2 * order, num)


def _chain_sum(levels: int, weight: Callable, last_base: int, order: int, top: int | None = None) -> np.ndarray:
    """``sum q^(sum weight(j, r_j)) / ((q)_{r_0-r_1} ... (q^b;q^b)_{r_levels})``.

    Sums over ``r_1 >= ... >= r_levels >= 0``; with ``top`` given there is an
    extra fixed ``r_0 = top`` and factor ``1/(q)_{top - r_1}``.
    Each ``weight(j, r)`` must be ``>= 0`` and increasing for ``r >= 1``.
    """
    n = order + 1

    def reach(j):
        r = 0
        while weight(j, r + 1) <= order:
            r += 1
        return r

    # g[r] = series for levels j..levels with r_j = r
    g = {}
    for r in range(reach(levels) + 1):
        w = weight(levels, r)
        arr = np.zeros(n, dtype=object)
        arr[w:] = inv_poch_coeffs(r, last_base, n - w)
        g[r] = arr
    for j in range(levels - 1, 0, -1):
        new = {}
        for r in range(reach(j) + 1):
            w = weight(j, r)
            acc = np.zeros(n - w, dtype=object)
            for s, arr in g.items():
                if s > r:
                    continue
                acc += mul_trunc(arr, inv_poch_coeffs(r - s, 1, n - w), n - w)
            out = np.zeros(n, dtype=object)
            out[w:] = acc
            new[r] = out
        g = new
    total = np.zeros(n, dtype=object)
    for r, arr in g.items():
        if top is None:
            total += arr
        elif r <= top:
            total += mul_trunc(arr, inv_poch_coeffs(top - r, 1, n), n)
    return total


def ag_multisum(m: int, i: int, order: int) -> Series:
    """``sum q^(r_1^2+...+r_m^2 + r_i+...+r_m) / ((q)_{r_1-r_2} ... (q)_{r_m})``."""
    order = _whole(order)
    if not isinstance(m, int) or m < 1:
        raise BadParams("m must be a positive integer")
    if not isinstance(i, int) or not 1 <= i <= m + 1:
        raise BadParams("need 1 <= i <= m+1")
    arr = _chain_sum(m, lambda j, r: r * r + (r if j >= i else 0), 1, order)
    return _q_series(arr, order)


def q2r_multisum(r: int, n: int, delta: int, order: int) -> Series:
    """The finite chain sum for ``P_{(2^r)}(1, q, q^2, ...; q^(2n+delta))``."""
    order = _whole(order)
    if r < 0 or n < 1 or delta not in (0, 1):
        raise BadParams("need r >= 0, n >= 1, delta in {0, 1}")
    shift = r * r - r
    if shift > order:
        return _q_series([], order)
    inner = _chain_sum(n, lambda j, s: s * s + s, 2 - delta, order - shift, top=r)
    arr = np.zeros(order + 1, dtype=object)
    arr[shift:] = inner
    return _q_series(arr, order)


def bressoud_multisum(n: int, delta: int, order: int) -> Series:
    """``sum q^(sum r_j^2 + r_j) / ((q)_{r_1-r_2} ... (q^(2-delta); q^(2-delta))_{r_n})``."""
    order = _whole(order)
    if n < 1 or delta not in (0, 1):
        raise BadParams("need n >= 1, delta in {0, 1}")
    return _q_series(_chain_sum(n, lambda j, s: s * s + s, 2 - delta, order), order)


def rr_sum(sigma: int, order: int) -> Series:
    """``sum_{r>=0} q^(r(r+sigma)) / (q)_r``."""
    if sigma not in (0, 1):
        raise BadParams("sigma must be 0 or 1")
    return ag_multisum(1, 2 - sigma, order)


def rogers_selberg_check(j: int, order: int):
    """Both sides of the Rogers-Selberg identity at ``a = q^j``.

    The ratio ``(1 - a q^(2r)) (a)_r / ((1 - a) (q)_r)`` is taken as the
    polynomial ``(1 - q^(j+2r)) (q^(j+1))_(r-1) / (q)_r`` for ``r >= 1`` and 1
    at ``r = 0``, which is its limit at ``a = q^j`` (including ``j = 0``).
    """
    if not isinstance(j, int) or j < 0:
        raise BadParams("j must be a nonnegative integer")
    order = _whole(order)
    n = order + 1
    lhs = np.zeros(n, dtype=object)
    r = 0
    while j * r + r * r <= order:
        w = j * r + r * r
        lhs[w:] += inv_poch_coeffs(r, 1, n - w)
        r += 1
    inner = np.zeros(n, dtype=object)
    inner[0] = 1
    r = 1
    while 2 * j * r + 5 * r * (r - 1) // 2 + 2 * r <= order:
        w = 2 * j * r + 5 * r * (r - 1) // 2 + 2 * r
        bag = FactorBag()
        bag.add(SignedAtom(1, 2 * (j + 2 * r)))
        bag.add_poch(SignedAtom(1, 2 * (j + 1)), 2, r - 1)
        bag.add_poch(SignedAtom(1, 2), 2, r, -1)
        term = bag.expand(order - w)
        coeffs = term.integer_coeffs()
        sign = -1 if r % 2 else 1
        for k, c in enumerate(coeffs[: n - w]):
            inner[w + k] += sign * c
        r += 1
    prefactor = FactorBag().add_inf(SignedAtom(1, 2 * (j + 1)), 2, -1).expand(order)
    rhs = prefactor * _q_series(inner, order)
    return _q_series(lhs, order), rhs


def phi_weight(r: int) -> int:
    """1 at ``r = 0`` and 2 for ``r = 1, 2, ...``."""
    if r < 0:
        raise ValueError("phi is defined for r >= 0")
    return 1 if r == 0 else 2


# -- certified lattice enumeration -------------------------------------------------------


@dataclass
class _Bound:
    """Per-coordinate certificate ``A r^2 - K |r| - C`` (s-steps) plus a global constant."""

    n: int
    A: list = field(default_factory=list)
    K: list = field(default_factory=list)
    C: list = field(default_factory=list)
    C0: Fraction = Fraction(0)

    def __post_init__(self):
        self.A = [Fraction(0)] * self.n
        self.K = [Fraction(0)] * self.n
        self.C = [Fraction(0)] * self.n

    def binomial(self, const, slopes: dict):
        """Account for a factor ``1 - c q^(const + sum slopes[i] r_i)``."""
        self.C0 -= abs(Fraction(const))
        for i, b in slopes.items():
            self.K[i] += abs(Fraction(b))

    def linear(self, i: int, slope, const=0):
        self.K[i] += abs(Fraction(slope))
        self.C0 -= abs(Fraction(const))

    def lower(self, i: int, r: int) -> Fraction:
        return self.A[i] * r * r - self.K[i] * abs(r) - self.C[i]


@dataclass
class LatticeCertificate:
    radius: tuple
    points_in_box: int
    points_used: int


def _lattice_points(bound: _Bound, hi: int, nonneg: Sequence[bool], extra: int = 0):
    n = bound.n
    for i in range(n):
        if bound.A[i] <= 0:
            raise UncertifiedSpec(f"no quadratic growth in coordinate {i + 1} (A = {bound.A[i]})")
    mins = []
    for i in range(n):
        top = int(bound.K[i] / (2 * bound.A[i])) + 2
        cand = range(0, top + 1) if nonneg[i] else range(-top, top + 1)
        mins.append(min(bound.lower(i, r) for r in cand))
    total_min = sum(mins) + bound.C0
    radius = []
    for i in range(n):
        slack = hi - (total_min - mins[i])
        r = 0
        while bound.lower(i, r + 1) <= slack or bound.lower(i, -(r + 1)) <= slack:
            r += 1
        radius.append(r + extra)
    ranges = [range(0, R + 1) if nonneg[i] else range(-R, R + 1) for i, R in enumerate(radius)]
    suffix = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + mins[i]
    points = []

    def rec(i, prefix, acc):
        if i == n:
            points.append(tuple(prefix))
            return
        for r in ranges[i]:
            v = acc + bound.lower(i, r)
            if extra == 0 and v + suffix[i + 1] > hi:
                continue
            prefix.append(r)
            rec(i + 1, prefix, v)
            prefix.pop()

    rec(0, [], bound.C0)
    points.sort(key=lambda r: (sum(x * x for x in r), r))
    return points, tuple(radius)


def _sum_terms(points, make_term: Callable, atoms, base_s: int, hi: int):
    total = Series(hi + 1, hi, [])
    used = 0
    for r in points:
        bag = make_term(r)
        if bag is None:
            continue
        v = bag.valuation_s(atoms, base_s)
        if v is None or v > hi:
            continue
        total = total + bag.evaluate(atoms, base_s, hi)
        used += 1
    return total, used


def _poch_floor(a: int, base_s: int) -> int:
    """Largest possible drop in valuation of ``(c q^(a/2); q^(base/2))_r`` over ``r >= 0``."""
    out = 0
    k = 0
    while a + k * base_s < 0:
        out += -(a + k * base_s)
        k += 1
    return out


# -- the L series ---------------------------------------------------------------------------


def _delta_c_ratio(bag: XBag, r, atoms, base_s: int, bound: _Bound | None):
    """Multiply by ``Delta_C(x q^r) / Delta_C(x)`` (exponents of q in half-steps)."""
    n = len(r)
    es = [a.s for a in atoms]
    for i in range(n):
        two_i = [0] * n
        two_i[i] = 2
        bag.add(two_i, 4 * r[i])
        bag.add(two_i, 0, -1)
        if bound is not None:
            bound.binomial(2 * es[i], {i: 2 * base_s})
    for i in range(n):
        for j in range(i + 1, n):
            # (y_i - y_j)(y_i y_j - 1) = -y_i (1 - y_j/y_i)(1 - y_i y_j)
            ratio = [0] * n
            ratio[j] += 1
            ratio[i] -= 1
            prod = [0] * n
            prod[i] += 1
            prod[j] += 1
            bag.add(ratio, 2 * (r[j] - r[i]))
            bag.add(ratio, 0, -1)
            bag.add(prod, 2 * (r[i] + r[j]))
            bag.add(prod, 0, -1)
            bag.mono([0] * n, 2 * r[i])
            if bound is not None:
                bound.binomial(es[j] - es[i], {i: base_s, j: base_s})
                bound.binomial(es[i] + es[j], {i: base_s, j: base_s})
                bound.linear(i, base_s)


def L_sum(p: int, m: int, alpha: AlphabetSpec, order, extra_shells: int = 0, certificate: bool = False):
    """The lattice series ``L^(p)_m`` at the specialised alphabet.

    Coordinates ``r_(p+1), ..., r_n`` only contribute when nonnegative
    (``1/(q)_k = 0`` for ``k < 0``); those are enumerated from 0.
    """
    atoms = alpha.vars
    n = len(atoms)
    if not 0 <= p <= n:
        raise BadParams("need 0 <= p <= n")
    if m < 0:
        raise BadParams("m must be >= 0")
    base_s = alpha.base_s
    hi = to_grid(order)
    es = [a.s for a in atoms]

    bound = _Bound(n)
    for i in range(n):
        bound.A[i] = Fraction((m + 1) * 2 + (n + p), 2) * base_s
        lin = 2 * (m + p + 1) * es[i] - Fraction(n + p, 2) * base_s
        lin += sum(es[i] - es[j] for j in range(p, n))
        bound.linear(i, lin)
        for j in range(p, n):
            bound.C[i] += _poch_floor(es[i] + es[j], base_s)
            bound.K[i] += abs(2 * es[j] - base_s)
    _delta_c_ratio(XBag(n), [0] * n, atoms, base_s, bound)
    nonneg = [i >= p for i in range(n)]

    def make_term(r):
        bag = XBag(n)
        _delta_c_ratio(bag, r, atoms, base_s, None)
        for i in range(n):
            beta = [0] * n
            beta[i] = 2 * (m + p + 1) * r[i]
            bag.mono(beta, 2 * (m + 1) * r[i] ** 2 + (n + p) * r[i] * (r[i] - 1))
            for j in range(p, n):
                ratio = [0] * n
                ratio[i] += 1
                ratio[j] -= 1
                prod = [0] * n
                prod[i] += 1
                prod[j] += 1
                mono = [0] * n
                mono[i] += r[i]
                mono[j] -= r[i]
                bag.mono(mono, 0, -1 if r[i] % 2 else 1)
                bag.add_poch(prod, 0, 2, r[i])
                bag.add_poch(ratio, 2, 2, r[i], -1)
        return bag

    points, radius = _lattice_points(bound, hi, nonneg, extra_shells)
    total, used = _sum_terms(points, make_term, atoms, base_s, hi)
    if certificate:
        return total, LatticeCertificate(radius, len(points), used)
    return total


def pair_prefactor(alpha: AlphabetSpec, order) -> Series:
    """``1 / prod_{i <= j} (q x_i x_j; q)_inf`` at the alphabet."""
    bag = FactorBag()
    atoms = alpha.vars
    for i in range(len(atoms)):
        for j in range(i, len(atoms)):
            bag.add_inf((atoms[i] * atoms[j]).shift_s(alpha.base_s), alpha.base_s, -1)
    return bag.expand(order)


def rogers_selberg_multi(m: int, alpha: AlphabetSpec, order, extra_shells: int = 0) -> Series:
    """The level-m C_n Rogers-Selberg side ``L^(0)_m(x) / prod_{i<=j} (q x_i x_j)_inf``."""
    return L_sum(0, m, alpha, order, extra_shells) * pair_prefactor(alpha, order)


# -- generic B/C/D theta sums ---------------------------------------------------------------


@dataclass(frozen=True)
class LatticeThetaSpec:
    """``sum_r Delta_T(x q^(c r)) prod x_i^(d r_i + e_i) q^(f r_i^2 + g binom(r_i,2) + h r_i) [(-1)^|r|]``.

    ``c, f, g, h`` are in units of the identity's q, which the alphabet's
    base scale then substitutes.
    """

    weyl_type: str
    alphabet: AlphabetSpec
    shift_step: Fraction = Fraction(1)
    d: Fraction = Fraction(0)
    e: tuple = ()
    f: Fraction = Fraction(0)
    g: Fraction = Fraction(0)
    h: Fraction = Fraction(0)
    sign_flag: bool = False

    def __post_init__(self):
        if self.weyl_type not in ("B", "C", "D"):
            raise BadParams("weyl_type must be B, C or D")
        n = self.alphabet.size
        e = tuple(self.e) if self.e else tuple(-i for i in range(n))
        if len(e) != n:
            raise BadParams("need one monomial offset per variable")
        object.__setattr__(self, "e", tuple(int(x) for x in e))
        for name in ("shift_step", "d", "f", "g", "h"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.d.denominator != 1:
            raise BadParams("d must be an integer")

    @property
    def rank(self) -> int:
        return self.alphabet.size


def _grid(value, base_s: int) -> int:
    """Identity exponent (Fraction, q-units) to s-steps after ``q -> q^base``."""
    s = Fraction(value) * base_s
    if s.denominator != 1:
        raise BadParams(f"exponent {value} falls off the half-integer grid at this base")
    return int(s)


def _half(value) -> int:
    """Identity exponent (Fraction, q-units) to identity half-steps."""
    s = Fraction(value) * 2
    if s.denominator != 1:
        raise BadParams(f"exponent {value} is not on the half-integer grid")
    return int(s)


def _theta_bound(spec: LatticeThetaSpec) -> _Bound:
    atoms = spec.alphabet.vars
    base_s = spec.alphabet.base_s
    n = len(atoms)
    es = [a.s for a in atoms]
    cb = _grid(spec.shift_step, base_s)
    bound = _Bound(n)
    for i in range(n):
        bound.A[i] = (spec.f + spec.g / 2) * base_s
        bound.linear(i, spec.d * es[i] + (spec.h - spec.g / 2) * base_s, spec.e[i] * es[i])
    power = {"B": 1, "C": 2, "D": 0}[spec.weyl_type]
    if power:
        for i in range(n):
            bound.binomial(power * es[i], {i: power * cb})
    for i in range(n):
        for j in range(i + 1, n):
            bound.binomial(es[j] - es[i], {i: cb, j: cb})
            bound.binomial(es[i] + es[j], {i: cb, j: cb})
            bound.linear(i, cb, es[i])
    return bound


def _theta_term(spec: LatticeThetaSpec, r) -> XBag:
    n = spec.rank
    c2 = _half(spec.shift_step)
    bag = XBag(n)
    power = {"B": 1, "C": 2, "D": 0}[spec.weyl_type]
    if power:
        for i in range(n):
            alpha = [0] * n
            alpha[i] = power
            bag.add(alpha, power * c2 * r[i])
    for i in range(n):
        for j in range(i + 1, n):
            ratio = [0] * n
            ratio[j] += 1
            ratio[i] -= 1
            prod = [0] * n
            prod[i] += 1
            prod[j] += 1
            mono = [0] * n
            mono[i] = 1
            bag.add(ratio, c2 * (r[j] - r[i]))
            bag.add(prod, c2 * (r[i] + r[j]))
            bag.mono(mono, c2 * r[i], -1)
    beta = [int(spec.d) * r[i] + spec.e[i] for i in range(n)]
    t = sum(_half(spec.f * r[i] ** 2 + spec.g * Fraction(r[i] * (r[i] - 1), 2) + spec.h * r[i]) for i in range(n))
    sign = -1 if spec.sign_flag and sum(r) % 2 else 1
    bag.mono(beta, t, sign)
    return bag


def lattice_theta_sum(spec: LatticeThetaSpec, order, extra_shells: int = 0, certificate: bool = False):
    """The certified finite part of the lattice sum described by ``spec``."""
    hi = to_grid(order)
    bound = _theta_bound(spec)
    points, radius = _lattice_points(bound, hi, [False] * spec.rank, extra_shells)
    atoms = spec.alphabet.vars
    total, used = _sum_terms(points, lambda r: _theta_term(spec, r), atoms, spec.alphabet.base_s, hi)
    if certificate:
        return total, LatticeCertificate(radius, len(points), used)
    return total


# -- finite checks at rational points -----------------------------------------------------------


@dataclass(frozen=True)
class WatsonParams:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    q: Fraction
    N: int


def _poch_value(x: Fraction, q: Fraction, k: int, name: str, denominator: bool):
    out = Fraction(1)
    for j in range(k):
        f = 1 - x * q**j
        if f == 0 and denominator:
            raise PoleEncountered(f"factor ({name}; q)_{k} vanishes at j = {j}")
        out *= f
    return out


def watson_check(p: WatsonParams):
    """Exact values of the balanced 4phi3 side and the very-well-poised 8phi7 side.

    The 8phi7 carries the well-poised partner ``(a q^(N+1))_r`` of ``q^-N``
    in its denominator.
    """
    a, b, c, d, e, q, N = (Fraction(p.a), Fraction(p.b), Fraction(p.c), Fraction(p.d), Fraction(p.e), Fraction(p.q), p.N)
    if N < 0:
        raise BadParams("N must be nonnegative")
    for name, v in (("a", a), ("b", b), ("c", c), ("d", d), ("e", e), ("q", q)):
        if v == 0:
            raise PoleEncountered(f"parameter {name} is zero")
    qN = q ** (-N)

    def poch(x, k, name, den=False):
        return _poch_value(x, q, k, name, den)

    pre_num = poch(a * q, N, "aq") * poch(a * q / (b * c), N, "aq/bc")
    pre_den = poch(a * q / b, N, "aq/b", True) * poch(a * q / c, N, "aq/c", True)
    lhs = Fraction(0)
    for r in range(N + 1):
        num = poch(b, r, "b") * poch(c, r, "c") * poch(a * q / (d * e), r, "aq/de") * poch(qN, r, "q^-N")
        den = (
            poch(q, r, "q", True)
            * poch(a * q / d, r, "aq/d", True)
            * poch(a * q / e, r, "aq/e", True)
            * poch(b * c * qN / a, r, "bcq^-N/a", True)
        )
        lhs += num / den * q**r
    lhs *= pre_num / pre_den
    if a == 1:
        raise PoleEncountered("factor 1 - a vanishes")
    z = a * a * q ** (N + 2) / (b * c * d * e)
    rhs = Fraction(0)
    for r in range(N + 1):
        num = (1 - a * q ** (2 * r)) / (1 - a)
        for x, name in ((a, "a"), (b, "b"), (c, "c"), (d, "d"), (e, "e"), (qN, "q^-N")):
            num *= poch(x, r, name)
        den = poch(q, r, "q", True)
        wp = ((a * q / b, "aq/b"), (a * q / c, "aq/c"), (a * q / d, "aq/d"), (a * q / e, "aq/e"), (a * q ** (N + 1), "aq^(N+1)"))
        for x, name in wp:
            den *= poch(x, r, name, True)
        rhs += num / den * z**r
    return lhs, rhs


def random_rational(rng: random.Random, bound: int = 16) -> Fraction:
    while True:
        num = rng.randint(-bound, bound)
        den = rng.randint(1, bound)
        if num:
            return Fraction(num, den)


def random_watson_params(rng: random.Random, N: int):
    """A pole-free parameter set and the number of resamples it took."""
    tries = 0
    while True:
        vals = [random_rational(rng) for _ in range(6)]
        p = WatsonParams(*vals, N)
        try:
            watson_check(p)
            return p, tries
        except (PoleEncountered, ZeroDivisionError):
            tries += 1


def _det(rows) -> Fraction:
    """Exact determinant by fraction-free elimination over ``Fraction``."""
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for k in range(col, n):
                    a[r][k] -= f * a[col][k]
    return det


def weyl_delta(kind: str, x: Sequence) -> Fraction:
    x = [Fraction(v) for v in x]
    n = len(x)
    out = Fraction(1)
    if kind == "B":
        for v in x:
            out *= 1 - v
    elif kind == "C":
        for v in x:
            out *= 1 - v * v
    elif kind != "D":
        raise BadParams("type must be B, C or D")
    for i in range(n):
        for j in range(i + 1, n):
            out *= (x[i] - x[j]) * (x[i] * x[j] - 1)
    return out


def weyl_denominator_check(kind: str, n: int, x: Sequence):
    """(determinant side, product side) of the B/C/D Weyl denominator formula."""
    x = [Fraction(v) for v in x]
    if len(x) != n:
        raise BadParams("need exactly n points")
    idx = range(1, n + 1)
    if kind == "B":
        det = _det([[v ** (j - 1) - v ** (2 * n - j) for j in idx] for v in x])
    elif kind == "C":
        det = _det([[v ** (j - 1) - v ** (2 * n - j + 1) for j in idx] for v in x])
    elif kind == "D":
        det = _det([[v ** (j - 1) + v ** (2 * n - j - 1) for j in idx] for v in x]) / 2
    else:
        raise BadParams("type must be B, C or D")
    return det, weyl_delta(kind, x)


def triple_product_check(x: SignedAtom, base, order):
    """``sum_r (-1)^r x^r p^binom(r,2)`` against ``(p;p)_inf theta(x;p)``, ``p = q^base``."""
    b = to_grid(base)
    if b <= 0:
        raise BadParams("base must be positive")
    hi = to_grid(order)
    e = x.s
    # exponent e r + b r(r-1)/2 >= b r^2/2 - (|e| + b/2)|r| exceeds hi outside the radius
    R = 0
    slope = abs(e) + Fraction(b, 2)
    while Fraction(b, 2) * (R + 1) ** 2 - slope * (R + 1) <= hi:
        R += 1
    coeffs: dict = {}
    for r in range(-R, R + 1):
        s = e * r + b * r * (r - 1) // 2
        if s <= hi:
            sign = (-1) ** (r % 2) * (x.sign ** (r % 2))
            coeffs[s] = coeffs.get(s, 0) + sign
    lo = min([k for k, v in coeffs.items() if v] or [hi + 1])
    lo = min(lo, hi + 1)
    num = [0] * max(hi - lo + 1, 0)
    for k, v in coeffs.items():
        if k >= lo:
            num[k - lo] += v
    lhs = Series(lo, hi, num)
    rhs = FactorBag().add_inf(SignedAtom(1, b), b).add_theta(x, b).expand_s(hi)
    return lhs, rhs
