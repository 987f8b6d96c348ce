"""Hall-Littlewood evaluations.

The workhorse is a column-by-column transfer evaluation of the flag formula
for the modified polynomial ``Q'_lambda``.  Column ``i`` of a flag is the
chain ``c_0 >= c_1 >= ... >= c_{L-1} >= c_L = 0`` with ``c_a = mu^(a)_i``;
it only interacts with column ``i+1`` through the q-binomial
``[c_{a-1} - mu^(a)_{i+1}; c_{a-1} - c_a]``.  Processing columns from the
right and levels one at a time keeps the state to a single chain.

Every weight has a known minimal q-exponent, so partial sums whose
valuation plus the best possible remainder exceeds the working order are
dropped.  Those bounds are exact minima, which is what makes the sums over
unbounded partitions terminate.
"""

from __future__ import annotations

import heapq
import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BadParams, NoStabilisation, RepeatedVariable, SingularPochhammer
from .factors import XBag
from .partitions import Partition, b_lambda, conjugate
from .qseries import Series, SignedAtom, mul_trunc, to_grid


@dataclass(frozen=True)
class AlphabetSpec:
    """Specialised variables ``x_1..x_L`` together with the substitution ``q -> q^base_scale``."""

    vars: tuple
    base_scale: Fraction = Fraction(1)

    def __post_init__(self):
        atoms = tuple(a if isinstance(a, SignedAtom) else SignedAtom.q(a) for a in self.vars)
        if not atoms:
            raise BadParams("an alphabet needs at least one variable")
        object.__setattr__(self, "vars", atoms)
        scale = Fraction(self.base_scale)
        if scale <= 0:
            raise BadParams("base_scale must be positive")
        to_grid(scale)
        object.__setattr__(self, "base_scale", scale)

    @classmethod
    def geometric(cls, n: int, base_scale=None, start=0) -> "AlphabetSpec":
        """``(q^start, q^(start+1), ..., q^(start+n-1))`` with base ``n`` by default."""
        if n < 1:
            raise BadParams("n must be >= 1")
        atoms = tuple(SignedAtom.q(start + i) for i in range(n))
        return cls(atoms, n if base_scale is None else base_scale)

    @property
    def size(self) -> int:
        return len(self.vars)

    @property
    def base_s(self) -> int:
        return to_grid(self.base_scale)

    def digest(self) -> tuple:
        return tuple((a.sign, a.s) for a in self.vars), self.base_s


@dataclass(frozen=True)
class GeometricSpec:
    """The geometric sum-side data: alphabet ``1, q, ..., q^(n-1)``, base ``n``, weight ``q^(sigma+1)``."""

    n: int
    sigma: int = 0


class HLCacheKey(NamedTuple):
    partition: tuple
    alphabet: tuple
    order: int


# -- definitional oracle ---------------------------------------------------------


def _v_lambda(lam: Partition, nvars: int, t):
    """``prod_i (t;t)_{m_i} / (1-t)^{m_i}`` as the polynomial ``prod [m_i]_t!``."""
    mult = lam.multiplicities()
    mult[0] = nvars - lam.length
    out = 1
    for m in mult.values():
        for j in range(1, m + 1):
            out *= sum(t**k for k in range(j))
    return out


def hl_p_oracle(lam: Sequence[int], x: Sequence, t):
    """``P_lambda(x_1..x_L; t)`` straight from the symmetrisation definition.

    Exact for any field elements supporting ``+ - * /`` (Fractions, Series).
    Meant as an oracle: the cost is ``L!``.
    """
    lam = Partition(lam)
    x = list(x)
    nv = len(x)
    if lam.length > nv:
        return 0 * x[0] if x else 0
    if nv > 7:
        raise BadParams("the symmetrisation oracle is limited to 7 variables")
    for i in range(nv):
        for j in range(i + 1, nv):
            if _is_zero(x[i] - x[j]):
                raise RepeatedVariable(f"x_{i + 1} = x_{j + 1}")
    parts = list(lam) + [0] * (nv - lam.length)
    total = 0
    for perm in itertools.permutations(range(nv)):
        y = [x[p] for p in perm]
        term = 1
        for i, p in enumerate(parts):
            if p:
                term = term * y[i] ** p
        num = 1
        den = 1
        for i in range(nv):
            for j in range(i + 1, nv):
                num = num * (y[i] - t * y[j])
                den = den * (y[i] - y[j])
        total = total + term * num / den
    return total / _v_lambda(lam, nv, t)


def _is_zero(v) -> bool:
    if isinstance(v, Series):
        return v.is_zero() and v.hi >= 0
    return v == 0


# -- flag transfer engine -----------------------------------------------------------


@lru_cache(maxsize=None)
def _gauss_row(n: int) -> tuple:
    """Rows of Gaussian binomials ``[n; k]_y`` as integer coefficient tuples."""
    if n == 0:
        return ((1,),)
    prev = _gauss_row(n - 1)
    row = []
    for k in range(n + 1):
        # [n;k] = [n-1;k-1] + y^k [n-1;k]
        a = prev[k - 1] if k >= 1 else ()
        b = prev[k] if k <= n - 1 else ()
        length = k * (n - k) + 1
        c = [0] * length
        for i, v in enumerate(a):
            c[i] += v
        for i, v in enumerate(b):
            c[i + k] += v
        row.append(tuple(c))
    return tuple(row)


class _FlagEngine:
    """Transfer evaluation of the flag formula on a compressed exponent grid."""

    def __init__(self, atoms: Sequence[SignedAtom], base_s: int, weight_s: int = 0):
        g = base_s
        for a in atoms:
            g = gcd(g, a.s)
        g = gcd(g, weight_s)
        self.g = g
        self.L = len(atoms)
        self.eps = [a.sign for a in atoms]
        self.e = [a.s // g for a in atoms]
        self.B = base_s // g
        self.w = weight_s // g
        self._colmin = [[0] for _ in range(self.L + 1)]
        self._heaps = [None] * (self.L + 1)
        self._qbin: dict = {}
        self._invpoch: dict = {}

    # exact minima --------------------------------------------------------------

    def colmin(self, a: int, c: int) -> int:
        """Minimal exponent of levels ``a+1..L`` when ``c_a = c``."""
        table = self._colmin[a]
        if c < len(table):
            return table[c]
        heap = self._heaps[a]
        if heap is None:
            if a >= self.L:
                raise ValueError("no levels left to absorb a nonzero height")
            heap = [(self.e[b], b, 0) for b in range(a, self.L)]
            heapq.heapify(heap)
            self._heaps[a] = heap
        while len(table) <= c:
            cost, b, t = heapq.heappop(heap)
            table.append(table[-1] + cost)
            heapq.heappush(heap, (cost + self.B, b, t + 1))
        return table[c]

    # weight polynomials ----------------------------------------------------------

    def qbin(self, n: int, k: int) -> np.ndarray:
        key = (n, k)
        arr = self._qbin.get(key)
        if arr is None:
            coeffs = _gauss_row(n)[k]
            arr = np.zeros(self.B * (len(coeffs) - 1) + 1, dtype=object)
            arr[:: self.B] = coeffs
            self._qbin[key] = arr
        return arr

    def invpoch(self, k: int, length: int) -> np.ndarray:
        """``1/(y;y)_k`` with ``y = q^B``, at least ``length`` coefficients."""
        arr = self._invpoch.get(k)
        if arr is None or len(arr) < length:
            n = max(length, 1)
            arr = np.zeros(n, dtype=object)
            arr[0] = 1
            for j in range(1, k + 1):
                step = self.B * j
                for start in range(step, n, step):
                    arr[start : start + step] += arr[start - step : min(start, n - step)]
            self._invpoch[k] = arr
        return arr[:length]

    # the sweep ---------------------------------------------------------------------

    def run(self, columns, hi: int):
        """Sweep columns right to left.

        ``columns`` is a list, rightmost first, of ``(heights, start, future)``:
        ``heights(e0)`` lists admissible ``c_0``; ``start(c0, e0)`` returns
        ``(shift, k)`` for the column's own prefactor ``q^shift / (q^B; q^B)_k``
        (``k=None`` for no Pochhammer); ``future(c0)`` bounds
        what all columns to the left can still contribute.
        Returns ``{v: coeff}`` on the compressed grid for exponents ``<= hi``.
        """
        L = self.L
        table = {(0,) * L: (0, np.array([1], dtype=object))}
        for heights, start, future in columns:
            nxt: dict = {}
            for key, (v, arr) in table.items():
                e0 = key[0]
                for c0 in heights(e0):
                    shift, k = start(c0, e0)
                    cap = hi - self.colmin(0, c0) - future(c0)
                    nv = v + shift
                    if nv > cap:
                        continue
                    n = cap - nv + 1
                    out = arr[:n] if k is None else mul_trunc(arr, self.invpoch(k, n), n)
                    _acc(nxt, (c0,) + key[1:], nv, out, cap)
            table = _trimmed(nxt)
            for a in range(1, L):
                nxt = {}
                eps = self.eps[a - 1]
                ea = self.e[a - 1]
                for key, (v, arr) in table.items():
                    cprev = key[a - 1]
                    ep = key[a]
                    fut = future(key[0])
                    for ca in range(ep, cprev + 1):
                        d = cprev - ca
                        nv = v + d * ea + self.B * d * (d - 1) // 2
                        cap = hi - self.colmin(a, ca) - fut
                        if nv > cap:
                            continue
                        out = mul_trunc(arr, self.qbin(cprev - ep, d), cap - nv + 1)
                        if eps < 0 and d % 2:
                            out = -out
                        _acc(nxt, key[:a] + (ca,) + key[a + 1 :], nv, out, cap)
                table = _trimmed(nxt)
            # last level: c_L = 0 and mu^(L)_{i+1} = 0, so the q-binomial is 1
            nxt = {}
            eps = self.eps[L - 1]
            eL = self.e[L - 1]
            for key, (v, arr) in table.items():
                d = key[L - 1]
                nv = v + d * eL + self.B * d * (d - 1) // 2
                cap = hi - future(key[0])
                if nv > cap:
                    continue
                out = arr[: cap - nv + 1]
                if eps < 0 and d % 2:
                    out = -out
                _acc(nxt, key, nv, out, cap)
            table = _trimmed(nxt)
        total: dict = {}
        for v, arr in table.values():
            for i, c in enumerate(arr):
                if c and v + i <= hi:
                    total[v + i] = total.get(v + i, 0) + c
        return total

    def to_series(self, coeffs: dict, hi_s: int) -> Series:
        """Lift a compressed-grid result back to s-steps, valid through ``hi_s``."""
        nz = {self.g * k: c for k, c in coeffs.items() if c}
        lo = min(nz) if nz else hi_s + 1
        lo = min(lo, hi_s + 1)
        num = [0] * max(hi_s - lo + 1, 0)
        for k, c in nz.items():
            if k <= hi_s:
                num[k - lo] = c
        return Series(lo, hi_s, num)


def _acc(table: dict, key, v: int, arr: np.ndarray, cap: int):
    """Add a block of coefficients starting at ``v`` into ``table[key]`` (all blocks end at ``cap``)."""
    length = cap - v + 1
    if len(arr) < length:
        arr = np.concatenate([arr, np.zeros(length - len(arr), dtype=object)])
    cur = table.get(key)
    if cur is None:
        table[key] = (v, arr)
        return
    v0, a0 = cur
    if v0 <= v:
        out = a0.copy()
        out[v - v0 :] += arr
        table[key] = (v0, out)
    else:
        out = arr.copy()
        out[v0 - v :] += a0
        table[key] = (v, out)


def _trimmed(table: dict) -> dict:
    """Drop identically vanishing entries and strip leading zeros."""
    out = {}
    for key, (v, arr) in table.items():
        nz = np.flatnonzero(arr != 0)
        if len(nz):
            i = int(nz[0])
            out[key] = (v + i, arr[i:])
    return out


# -- public evaluations ---------------------------------------------------------------

_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def _cached(key, compute):
    with _CACHE_LOCK:
        hit = _CACHE.get(key)
    if hit is not None:
        return hit
    value = compute()
    with _CACHE_LOCK:
        # identical keys give identical values, so the first writer wins harmlessly
        return _CACHE.setdefault(key, value)


def clear_cache():
    with _CACHE_LOCK:
        _CACHE.clear()


def qprime_flag(lam: Sequence[int], alpha: AlphabetSpec, order) -> Series:
    """``Q'_lambda(x; q^base)`` at the alphabet, valid through ``q^order``."""
    lam = Partition(lam)
    hi = to_grid(order)
    key = HLCacheKey(tuple(lam), alpha.digest(), hi)
    return _cached(("qprime", key), lambda: _qprime_flag(lam, alpha, hi))


def _qprime_flag(lam: Partition, alpha: AlphabetSpec, hi: int) -> Series:
    eng = _FlagEngine(alpha.vars, alpha.base_s)
    tops = conjugate(lam)
    # rest[i]: exact minimum of columns 1..i
    rest = [0]
    for h in tops:
        rest.append(rest[-1] + eng.colmin(0, h))
    columns = []
    for i in range(len(tops), 0, -1):
        h = tops[i - 1]
        columns.append((lambda e0, h=h: (h,), _no_prefactor, lambda c0, f=rest[i - 1]: f))
    coeffs = eng.run(columns, hi // eng.g)
    return eng.to_series(coeffs, hi)


def _no_prefactor(c0, e0):
    return 0, None


def p_geometric(lam: Sequence[int], n: int, order) -> Series:
    """``P_lambda(1, q, q^2, ...; q^n)`` via the finite alphabet ``1..q^(n-1)``."""
    if n < 1:
        raise BadParams("n must be >= 1")
    lam = Partition(lam)
    q_prime = qprime_flag(lam, AlphabetSpec.geometric(n), order)
    return q_prime * b_lambda(lam, n, order).inverse()


def sum_side(m: int, alpha, order) -> Series:
    """``sum_{lambda_1 <= m} q^(w|lambda|) P'_{2 lambda}(x; q^base)``.

    ``alpha`` is an :class:`AlphabetSpec` (weight ``q^base``) or a
    :class:`GeometricSpec` (alphabet ``1..q^(n-1)``, base ``n``, weight
    ``q^(sigma+1)``).

    Termination: a pair of equal columns of height ``M`` costs at least
    ``w*M + 2*colmin(M)``, and ``colmin`` grows quadratically in ``M`` for any
    alphabet, so only finitely many heights fit under the order.
    """
    if m < 0:
        raise BadParams("m must be >= 0")
    if isinstance(alpha, GeometricSpec):
        if alpha.n < 1:
            raise BadParams("n must be >= 1")
        atoms = AlphabetSpec.geometric(alpha.n)
        weight_s = 2 * (alpha.sigma + 1)
    else:
        atoms = alpha
        weight_s = alpha.base_s
    hi = to_grid(order)
    key = ("sum", m, atoms.digest(), weight_s, hi)
    return _cached(key, lambda: _sum_side(m, atoms, weight_s, hi))


def _sum_side(m: int, alpha: AlphabetSpec, weight_s: int, hi: int) -> Series:
    eng = _FlagEngine(alpha.vars, alpha.base_s, weight_s)
    hi_u = hi // eng.g
    if m == 0:
        return Series.one(Fraction(hi, 2)) if hi >= 0 else Series(hi + 1, hi, [])

    def pair_cost(M):
        return eng.w * M + 2 * eng.colmin(0, M)

    # pair_cost is convex with pair_cost(0) = 0
    M = 0
    while pair_cost(M + 1) < pair_cost(M):
        M += 1
    fmin = pair_cost(M)
    budget = hi_u - (m - 1) * fmin
    while not (pair_cost(M) > budget and pair_cost(M + 1) >= pair_cost(M)):
        M += 1
    cap_height = M - 1
    best_from = [0] * (cap_height + 2)
    best_from[cap_height + 1] = pair_cost(cap_height + 1)
    for h in range(cap_height, -1, -1):
        best_from[h] = min(pair_cost(h), best_from[h + 1])

    columns = []
    for i in range(2 * m, 0, -1):
        k = (i + 1) // 2
        if i % 2 == 0:
            columns.append(
                (
                    lambda e0: range(e0, cap_height + 1),
                    lambda c0, e0: (eng.w * c0, c0 - e0),
                    lambda c0, k=k: eng.colmin(0, c0) + (k - 1) * best_from[c0],
                )
            )
        else:
            columns.append((lambda e0: (e0,), _no_prefactor, lambda c0, k=k: (k - 1) * best_from[c0]))
    coeffs = eng.run(columns, hi_u)
    return eng.to_series(coeffs, hi)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def qprime_near_rect(m: int, r: int, k: int, alpha: AlphabetSpec, order) -> Series:
    """``Q'_{(m^r, k)}(x; q^base)`` from the double sum over compositions ``u``, ``v``.

    The summands involve ratios of Pochhammer symbols in ``q x_i / x_j`` with
    possibly negative indices; at degenerate alphabets these are evaluated as
    removable limits (see :mod:`hlrr.factors`).
    """
    if r < 0 or not 0 <= k <= m:
        raise BadParams("need r >= 0 and 0 <= k <= m")
    hi = to_grid(order)
    if r == 0 and k == 0:
        return Series.one(Fraction(hi, 2)) if hi >= 0 else Series(hi + 1, hi, [])
    lam = Partition((m,) * r + (k,))
    try:
        return _near_rect_sum(m, r, k, alpha.vars, alpha.base_s, hi)
    except SingularPochhammer:
        return _near_rect_lifted(m, r, k, lam, alpha, hi)


def _near_rect_sum(m, r, k, atoms, base, hi) -> Series:
    L = len(atoms)
    total = Series(hi + 1, hi, [])
    for u in _compositions(r + 1, L):
        for v in _compositions(r, L):
            if any(ui < vi for ui, vi in zip(u, v)):
                continue  # 1/(q)_{u_i - v_i} vanishes
            bag = XBag(L)
            beta = [k * u[i] + (m - k) * v[i] for i in range(L)]
            t = sum(k * u[i] * (u[i] - 1) + (m - k) * v[i] * (v[i] - 1) for i in range(L))
            bag.mono(beta, t)
            for i in range(L):
                for j in range(L):
                    ratio = [0] * L
                    ratio[i] += 1
                    ratio[j] -= 1
                    bag.add_poch(ratio, 2, 2, u[i] - u[j])
                    bag.add_poch(ratio, 2, 2, u[i] - v[j], -1)
                    bag.add_poch(ratio, 2, 2, v[i] - v[j])
                    bag.add_poch(ratio, 2, 2, v[i], -1)
            bag.add_poch([0] * L, 2, 2, r)
            bag.add_poch([0] * L, 2, 2, 1)
            total = total + bag.evaluate(atoms, base, hi)
    return total


def _near_rect_lifted(m, r, k, lam: Partition, alpha: AlphabetSpec, hi: int) -> Series:
    """Evaluate at ``x_i y^i`` with ``y = q^K`` and fold ``y -> 1``.

    The result is a polynomial whose monomials ``q^a y^b`` have ``a`` in a
    known window narrower than ``K`` and ``0 <= b <= bmax``, so each exponent
    ``a + K b`` decodes uniquely.
    """
    atoms = alpha.vars
    L = len(atoms)
    base = alpha.base_s
    es = [a.s for a in atoms]
    size = lam.size
    amin = size * min(es)
    amax = size * max(es) + base * lam.n()
    span = max(es) - min(es)
    K = (amax - amin) + 2 * base * (r + 2) + 2 * span + 2
    K += K % 2
    bmax = size * (L - 1)
    lifted = tuple(SignedAtom(a.sign, a.s + K * i) for i, a in enumerate(atoms))
    top = amax + K * bmax
    full = _near_rect_sum(m, r, k, lifted, base, top)
    out: dict = {}
    for i, c in enumerate(full.num):
        if c:
            e = full.lo + i
            b = (e - amin) // K
            a = e - K * b
            if a <= hi:
                out[a] = out.get(a, 0) + c
    lo = min(out, default=hi + 1)
    lo = min(lo, hi + 1)
    num = [0] * max(hi - lo + 1, 0)
    for a, c in out.items():
        num[a - lo] += c
    return Series(lo, hi, num, full.den)


def rect_shift(m: int, r: int, k: int, flipped: bool = False) -> int:
    """The normalising exponent of the rectangular limit, in q-units."""
    if flipped:
        return m * r * (r + 1) // 2
    return m * r * (r - 1) // 2 + k * r


def rect_shape(m: int, r: int, k: int, flipped: bool = False) -> Partition:
    if flipped:
        return Partition((k,) + (m,) * r)
    return Partition((m,) * r + (k,))


def rect_term(m: int, n: int, k: int, r: int, flipped: bool, order) -> Series:
    """``q^(-shift) Q_lambda(1, q, q^2, ...; q^n)`` for the shape at a fixed ``r``."""
    shift = rect_shift(m, r, k, flipped)
    lam = rect_shape(m, r, k, flipped)
    hi = to_grid(order)
    value = qprime_flag(lam, AlphabetSpec.geometric(n), Fraction(hi, 2) + shift)
    return value.shift(-shift)


class RectLimit(NamedTuple):
    series: Series
    r: int


def rect_limit(m: int, n: int, k: int, flipped: bool = False, order=40, cap=None, certificate=False):
    """Limit over ``r`` of the normalised rectangular evaluation.

    Increases ``r`` until the values at ``r`` and ``r+1`` agree through
    ``q^order``.  With ``certificate=True`` returns ``RectLimit(series, r)``.
    """
    if n < 1 or m < 0:
        raise BadParams("need n >= 1 and m >= 0")
    if flipped and k < m:
        raise BadParams("the flipped limit needs k >= m")
    if not flipped and not 0 <= k <= m:
        raise BadParams("need 0 <= k <= m")
    hi = to_grid(order)
    if cap is None:
        cap = hi // 2 + 8
    prev = rect_term(m, n, k, 0, flipped, order)
    for r in range(1, cap + 1):
        cur = rect_term(m, n, k, r, flipped, order)
        if cur.first_mismatch_s(prev) is None:
            return RectLimit(prev, r - 1) if certificate else prev
        prev = cur
    raise NoStabilisation(f"no agreement of successive terms up to r = {cap}")
