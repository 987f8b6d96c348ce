"""Independent reference computations used by the tests.

Nothing here imports the package: power series are plain dicts or integer
lists, and every routine is the slow, obvious version of its definition.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


# -- partition counting ----------------------------------------------------


def count_partitions_with_parts(allowed, n_max):
    """Coefficients of prod_{a in allowed} 1/(1-q^a) through q^n_max."""
    coeffs = [0] * (n_max + 1)
    coeffs[0] = 1
    for a in allowed:
        if a > n_max:
            continue
        for k in range(a, n_max + 1):
            coeffs[k] += coeffs[k - a]
    return coeffs


def parts_in_classes(residues, modulus, n_max):
    return count_partitions_with_parts(
        [a for a in range(1, n_max + 1) if a % modulus in residues], n_max
    )


def partitions_of(n, max_part=None):
    max_part = n if max_part is None else max_part
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions_of(n - first, first):
            yield (first,) + rest


def gordon_count(k, i, n_max):
    """Partitions with f_j + f_{j+1} <= k-1 and at most i-1 ones."""
    out = []
    for n in range(n_max + 1):
        total = 0
        for lam in partitions_of(n):
            f = [0] * (n + 2)
            for part in lam:
                f[part] += 1
            if f[1] > i - 1:
                continue
            if all(f[j] + f[j + 1] <= k - 1 for j in range(1, n + 1)):
                total += 1
        out.append(total)
    return out


# -- dict power series -----------------------------------------------------


def poly_mul(a, b, cut=None):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            if cut is not None and e > cut:
                continue
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def naive_product(factors, cut):
    """prod (1 - c q^e)^(+-1) as a dict through q^cut; factors are (c, e, power)."""
    acc = {0: 1}
    for c, e, power in factors:
        if power > 0:
            for _ in range(power):
                acc = poly_mul(acc, {0: 1, e: -c}, cut)
        else:
            geo = {e * k: c**k for k in range(0, cut // e + 1)}
            for _ in range(-power):
                acc = poly_mul(acc, geo, cut)
    return acc


def theta_naive(b, a, cut):
    """(q^b;q^a)_inf (q^{a-b};q^a)_inf as a dict, 0 < b < a."""
    factors = []
    k = 0
    while b + a * k <= cut or a - b + a * k <= cut:
        factors.append((1, b + a * k, 1))
        factors.append((1, a - b + a * k, 1))
        k += 1
    return naive_product([f for f in factors if f[1] <= cut], cut)


def jacobi_sum(b, a, cut):
    """sum_r (-1)^r q^{a r(r-1)/2 + b r}, the series side of (q^b, q^{a-b}, q^a; q^a)_inf."""
    out = {}
    r = 0
    while True:
        hit = False
        for rr in {r, -r}:
            e = a * rr * (rr - 1) // 2 + b * rr
            if e <= cut:
                out[e] = out.get(e, 0) + (-1) ** (rr % 2)
                hit = True
        if not hit and r > 0:
            break
        r += 1
    return {e: c for e, c in out.items() if c}


# -- Hall-Littlewood P by antisymmetrisation over Z[s] ---------------------
# Letters are signed monomials (sign, s-exponent) in s = q^(1/2).


def _padd(a, b, sign=1):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + sign * c
    return {e: c for e, c in out.items() if c}


def _pdiv_binomial(a, c, d):
    """Exact quotient a / (1 - c s^d) for d > 0; raises if not exact."""
    if not a:
        return {}
    top = max(a)
    bot = min(a)
    quo = {}
    for e in range(bot, top + 1):
        v = a.get(e, 0) + c * quo.get(e - d, 0)
        if v:
            quo[e] = v
    # exactness: quotient degree must stop at top - d
    for e in range(top - d + 1, top + 1):
        if quo.get(e, 0):
            raise ArithmeticError("non-exact division")
    return {e: v for e, v in quo.items() if e <= top - d}


def hl_p_letters(lam, letters, t_s=2):
    """P_lam(y_1..y_N; t=s^t_s) for distinct signed monomials y, as {s_exp: int}."""
    lam = tuple(p for p in lam if p)
    n = len(letters)
    if len(lam) > n:
        return {}
    parts = list(lam) + [0] * (n - len(lam))
    total = {}
    seen = set()
    for perm in itertools.permutations(range(n)):
        key = tuple(parts[perm.index(i)] for i in range(n))
        if key in seen:
            continue
        seen.add(key)
        y = [letters[p] for p in perm]
        sgn = _perm_sign(perm)
        term = {0: sgn}
        for i, p in enumerate(parts):
            sg, e = y[i]
            term = poly_mul(term, {e * p: sg**p})
        for i in range(n):
            for j in range(i + 1, n):
                (si, ei), (sj, ej) = y[i], y[j]
                if parts[i] > parts[j]:
                    fac = _padd({ei: si}, {ej + t_s: sj}, -1)
                else:
                    fac = _padd({ei: si}, {ej: sj}, -1)
                term = poly_mul(term, fac)
        total = _padd(total, term)
    for i in range(n):
        for j in range(i + 1, n):
            (si, ei), (sj, ej) = letters[i], letters[j]
            # y_i - y_j = si s^ei (1 - si sj s^(ej-ei)), or the mirror
            if ei == ej:
                raise ValueError("letters must have distinct exponents or equal signs")
            if ei < ej:
                lead, c, d, base_e = si, si * sj, ej - ei, ei
            else:
                lead, c, d, base_e = -sj, si * sj, ei - ej, ej
            total = {e - base_e: v * lead for e, v in total.items()}  # lead is +-1
            total = _pdiv_binomial(total, c, d)
    return total


def _perm_sign(perm):
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def b_lambda_dict(lam, cut):
    mult = {}
    for p in lam:
        if p:
            mult[p] = mult.get(p, 0) + 1
    factors = [(1, k, 1) for m in mult.values() for k in range(1, m + 1)]
    return naive_product([f for f in factors if f[1] <= cut], cut)


# (atoms as (sign, s-exponent), base in s-units, letters kept per atom)
# Every truncated alphabet has 7 distinct letters and drops nothing below q^6.
ORACLE_ALPHABETS = [
    (((1, 0),), 2, (7,)),
    (((1, 0), (1, 1)), 4, (4, 3)),
    (((-1, 0), (1, 1)), 4, (4, 3)),
    (((1, 0), (-1, 1), (1, 2)), 6, (3, 2, 2)),
    (((1, 1), (-1, 2), (1, 3)), 5, (3, 2, 2)),
]


def truncated_alphabet(atoms, base_s, counts):
    """Letters x_i t^k, k < counts[i], with t = s^base_s; atoms are (sign, s_exp)."""
    return [(sg, e + base_s * k) for (sg, e), c in zip(atoms, counts) for k in range(c)]


def qprime_truncated(lam, letters, t_s, cut_s):
    """Q'_lam(.; t) through s^cut_s from a finite truncated alphabet of letters."""
    p = hl_p_letters(lam, letters, t_s)
    b = b_lambda_dict(lam, cut_s // t_s)
    b_s = {t_s * e: c for e, c in b.items()}
    return {e: c for e, c in poly_mul(p, b_s, cut_s).items() if e <= cut_s}


# -- Fraction helpers ------------------------------------------------------


def qpoch(a, q, k):
    out = Fraction(1)
    for j in range(k):
        out *= 1 - a * q**j
    return out
