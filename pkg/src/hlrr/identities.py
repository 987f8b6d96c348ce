"""Catalogue of identities and the coefficientwise verification engine."""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import BadParams, UnknownIdentity
from .hall_littlewood import AlphabetSpec, GeometricSpec, p_geometric, rect_limit, sum_side
from .products import product_constant, product_form, product_side
from .qseries import FactorBag, Series, SignedAtom, fmt_exp, to_grid
from .sums import (
    LatticeThetaSpec,
    ag_multisum,
    bressoud_multisum,
    lattice_theta_sum,
    q2r_multisum,
    random_rational,
    random_watson_params,
    rogers_selberg_check,
    rogers_selberg_multi,
    rr_sum,
    triple_product_check,
    watson_check,
    weyl_denominator_check,
)

JOBS_ENV = "HLRR_JOBS"


# -- parameter schema --------------------------------------------------------------------


def parse_atoms(text) -> tuple:
    """``"-q^1,q^1/2,1"`` -> signed q-powers; a bare ``1`` or ``-1`` is ``q^0``."""
    if isinstance(text, (tuple, list)):
        return tuple(a if isinstance(a, SignedAtom) else SignedAtom.q(a) for a in text)
    out = []
    for item in str(text).split(","):
        item = item.strip().replace(" ", "")
        if not item:
            raise BadParams("empty alphabet entry")
        sign = 1
        if item[0] in "+-":
            sign = -1 if item[0] == "-" else 1
            item = item[1:]
        if item == "1":
            exp = Fraction(0)
        elif item == "q":
            exp = Fraction(1)
        elif item.startswith("q^"):
            body = item[2:].strip("()")
            try:
                exp = Fraction(body)
            except (ValueError, ZeroDivisionError):
                raise BadParams(f"bad exponent in alphabet entry {item!r}") from None
        else:
            raise BadParams(f"alphabet entries look like q^e, -q^e or 1, got {item!r}")
        try:
            out.append(SignedAtom.q(exp, sign))
        except ValueError as exc:
            raise BadParams(str(exc)) from None
    return tuple(out)


def format_atoms(atoms: Sequence[SignedAtom]) -> str:
    return ",".join(("-" if a.sign < 0 else "") + f"q^{fmt_exp(a.s)}" for a in atoms)


def _to_int(name, v):
    if isinstance(v, bool):
        raise BadParams(f"{name} must be an integer")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    try:
        return int(str(v).strip())
    except ValueError:
        raise BadParams(f"{name} must be an integer, got {v!r}") from None


_CONVERT = {
    "int": _to_int,
    "frac": lambda name, v: _frac(name, v),
    "atoms": lambda name, v: v if v in (None, "generic", "y") else parse_atoms(v),
    "str": lambda name, v: str(v),
}


def _frac(name, v):
    try:
        return Fraction(str(v)) if not isinstance(v, Fraction) else v
    except (ValueError, ZeroDivisionError):
        raise BadParams(f"{name} must be a rational number, got {v!r}") from None


@dataclass(frozen=True)
class Param:
    name: str
    kind: str = "int"
    default: object = None
    required: bool = True


def _p(name, kind="int", default=None):
    return Param(name, kind, default, default is None)


# -- catalogue --------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentitySpec:
    """One row: both sides as builders of ``(params, order[, perturb]) -> Series``.

    ``rhs`` maps form names to builders; with two forms, verification also
    compares the forms with each other.  Rows of kind ``"values"`` compare
    exact rationals at sample points, stored as coefficient ``k`` = value at
    sample ``k``.
    """

    id: str
    params: tuple
    description: str
    lhs: Callable
    rhs: dict
    validate: Callable = lambda p: None
    kind: str = "series"
    perturbable: bool = False

    def schema(self) -> dict:
        return {p.name: {"type": p.kind, **({} if p.required else {"default": json_value(p.default)})} for p in self.params}

    def normalise(self, params: dict) -> dict:
        params = dict(params or {})
        known = {p.name for p in self.params}
        extra = sorted(set(params) - known)
        if extra:
            raise BadParams(f"{self.id}: unknown parameter(s) {', '.join(extra)}")
        out = {}
        for p in self.params:
            if p.name in params:
                out[p.name] = _CONVERT[p.kind](p.name, params[p.name])
            elif p.required:
                raise BadParams(f"{self.id}: missing parameter {p.name}")
            else:
                out[p.name] = p.default
        self.validate(out)
        return out


CATALOGUE: dict = {}


def _row(spec: IdentitySpec):
    CATALOGUE[spec.id] = spec


def _need(cond, msg):
    if not cond:
        raise BadParams(msg)


def _positive(*names):
    def check(p):
        for k in names:
            _need(p[k] >= 1, f"{k} must be >= 1")

    return check


def _all(*checks):
    def check(p):
        for c in checks:
            c(p)

    return check


def _product(pid, keys=None):
    def build(p, order, perturb=0):
        args = {k: p[k] for k in keys} if keys else p
        return product_side(pid, args, order, perturb)

    return build


def _sum_side_row(rid, desc, geometric, forms, extra_check=None):
    def lhs(p, order):
        return sum_side(p["m"], geometric(p), order)

    checks = [_positive("m", "n")]
    if extra_check:
        checks.append(extra_check)
    _row(
        IdentitySpec(
            rid,
            (_p("m"), _p("n")),
            desc,
            lhs,
            {f: _product(f) for f in forms},
            _all(*checks),
            perturbable=True,
        )
    )


def _sigma(p):
    _need(p["sigma"] in (0, 1), "sigma must be 0 or 1")


def _delta(p):
    _need(p["delta"] in (0, 1), "delta must be 0 or 1")


def _n_at_least_2(p):
    _need(p["n"] >= 2, "n must be >= 2")


_row(
    IdentitySpec(
        "rr",
        (_p("sigma"),),
        "Rogers-Ramanujan: sum q^(r(r+sigma))/(q)_r as a modulus-5 product",
        lambda p, o: rr_sum(p["sigma"], o),
        {"rr": _product("rr")},
        _sigma,
        perturbable=True,
    )
)
_row(
    IdentitySpec(
        "ag",
        (_p("m"), _p("i")),
        "Andrews-Gordon: m-fold chain sum as a modulus-(2m+3) product",
        lambda p, o: ag_multisum(p["m"], p["i"], o),
        {"ag": _product("ag")},
        _all(_positive("m"), lambda p: _need(1 <= p["i"] <= p["m"] + 1, "need 1 <= i <= m+1")),
        perturbable=True,
    )
)
_sum_side_row(
    "a2n2-s0",
    "sum q^|lambda| P_2lambda(1,q,...;q^(2n-1)) as the kappa=2m+2n+1 products",
    lambda p: GeometricSpec(2 * p["n"] - 1, 0),
    ("a2n2a-n", "a2n2a-m"),
)
_sum_side_row(
    "a2n2-s1",
    "sum q^(2|lambda|) P_2lambda(1,q,...;q^(2n-1)) as the kappa=2m+2n+1 products",
    lambda p: GeometricSpec(2 * p["n"] - 1, 1),
    ("a2n2b-n", "a2n2b-m"),
)
_sum_side_row(
    "cn",
    "sum q^|lambda| P_2lambda(1,q,...;q^(2n)) as the kappa=2m+2n+2 products",
    lambda p: GeometricSpec(2 * p["n"], 0),
    ("cn-n", "cn-m"),
)
_sum_side_row(
    "dn",
    "sum q^(2|lambda|) P_2lambda(1,q,...;q^(2n-2)) as the kappa=2m+2n products (n >= 2)",
    lambda p: GeometricSpec(2 * p["n"] - 2, 1),
    ("dn-n", "dn-m"),
    _n_at_least_2,
)
_row(
    IdentitySpec(
        "mixed",
        (_p("m"), _p("n"), _p("sigma")),
        "sum q^((sigma+1)|lambda|) P_2lambda(1,q,...;q^n) as the kappa=2m+n+2 product",
        lambda p, o: sum_side(p["m"], GeometricSpec(p["n"], p["sigma"]), o),
        {"mixed": _product("mixed")},
        _all(_positive("m", "n"), _sigma),
        perturbable=True,
    )
)


def _rect(p, order, k, flipped, divide=False):
    res = rect_limit(p["m"], p["n"], k, flipped, order, certificate=True)
    series = res.series
    if divide:
        n = p["n"]
        series = series * FactorBag().add_inf(SignedAtom.q(n), to_grid(n), -1).expand(order)
    return Built(series, {"stabilised_at_r": res.r})


def _k_range(p):
    _need(0 <= p["k"] <= p["m"], "need 0 <= k <= m")


def _k_flip(p):
    _need(p["k"] >= p["m"], "need k >= m")


_row(
    IdentitySpec(
        "an-limit",
        (_p("m"), _p("n")),
        "r -> infinity limit of P_(m^r)(1,q,...;q^n) suitably normalised, as the kappa=m+n products",
        lambda p, o: _rect(p, o, 0, False, divide=True),
        {"an-n": _product("an-n"), "an-m": _product("an-m")},
        _positive("m", "n"),
        perturbable=True,
    )
)
_row(
    IdentitySpec(
        "limk",
        (_p("m"), _p("n"), _p("k")),
        "limit of q^(-m binom(r,2) - kr) Q_(m^r,k)(1,q,...;q^n) as a product",
        lambda p, o: _rect(p, o, p["k"], False),
        {"limk": _product("limk")},
        _all(_positive("m", "n"), _k_range),
        perturbable=True,
    )
)
_row(
    IdentitySpec(
        "limk-flip",
        (_p("m"), _p("n"), _p("k")),
        "limit of q^(-m binom(r+1,2)) Q_(k,m^r)(1,q,...;q^n) as a q-binomial times a product",
        lambda p, o: _rect(p, o, p["k"], True),
        {"limk-flip": _product("limk-flip")},
        _all(_positive("m", "n"), _k_flip),
        perturbable=True,
    )
)
_row(
    IdentitySpec(
        "q2r",
        (_p("r"), _p("n"), _p("delta")),
        "P_(2^r)(1,q,q^2,...;q^(2n+delta)) as a finite chain sum",
        lambda p, o: p_geometric((2,) * p["r"], 2 * p["n"] + p["delta"], o),
        {"chain-sum": lambda p, o, d=0: q2r_multisum(p["r"], p["n"], p["delta"], o)},
        _all(_positive("n"), _delta, lambda p: _need(p["r"] >= 0, "r must be >= 0")),
    )
)
_row(
    IdentitySpec(
        "q2r-companion",
        (_p("n"), _p("sigma")),
        "sum_r q^((sigma+1)r) P_(2^r)(1,q,...;q^n) as a product",
        lambda p, o: sum_side(1, GeometricSpec(p["n"], p["sigma"]), o),
        {"q2r-companion": _product("q2r-companion")},
        _all(_positive("n"), _sigma),
        perturbable=True,
    )
)
_row(
    IdentitySpec(
        "bressoud",
        (_p("n"), _p("delta")),
        "Bressoud's chain sum with last base q^(2-delta) as a product",
        lambda p, o: bressoud_multisum(p["n"], p["delta"], o),
        {"bressoud": _product("bressoud")},
        _all(_positive("n"), _delta),
        perturbable=True,
    )
)


def _rs_side(p, order, side):
    lhs, rhs = rogers_selberg_check(p["j"], order)
    return lhs if side == 0 else rhs


_row(
    IdentitySpec(
        "rs",
        (_p("j"),),
        "Rogers-Selberg at a = q^j: sum q^(jr+r^2)/(q)_r against the very-well-poised sum",
        lambda p, o: _rs_side(p, o, 0),
        {"vwp-sum": lambda p, o, d=0: _rs_side(p, o, 1)},
        lambda p: _need(p["j"] >= 0, "j must be >= 0"),
    )
)


# -- lattice-sum rows ------------------------------------------------------------------


_SHELLS = Param("shells", "int", 0, False)


def _shells_ok(p):
    _need(p["shells"] >= 0, "shells must be >= 0")


def _spec_alphabet(n, sigma):
    return AlphabetSpec(tuple(SignedAtom.q(Fraction(n + sigma + 1, 2) - i) for i in range(1, n + 1)), n)


def _cn_rs_alphabet(p):
    if p["x"] is None:
        return _spec_alphabet(p["n"], p["sigma"])
    return AlphabetSpec(p["x"], p["base"])


def _cn_rs_check(p):
    _positive("m")(p)
    _shells_ok(p)
    if p["x"] is None:
        _positive("n")(p)
        _sigma(p)


_row(
    IdentitySpec(
        "cn-rs",
        (
            _p("m"),
            Param("n", "int", 1, False),
            Param("sigma", "int", 0, False),
            Param("x", "atoms", None, False),
            Param("base", "frac", Fraction(1), False),
            _SHELLS,
        ),
        "level-m C_n Rogers-Selberg: sum_{lambda_1<=m} q^|lambda| P'_2lambda(x;q) as the lattice series L^(0)",
        lambda p, o: sum_side(p["m"], _cn_rs_alphabet(p), o),
        {"lattice": lambda p, o, d=0: rogers_selberg_multi(p["m"], _cn_rs_alphabet(p), o, p["shells"])},
        _cn_rs_check,
    )
)


def _theta_prefactor(alpha: AlphabetSpec, eta: Sequence[tuple], single: Callable, pairs: bool, const=1):
    """``1 / (const * prod etas * prod_i single(x_i) * prod_{i<j} theta(x_i/x_j, x_i x_j; q))``."""
    bag = FactorBag()
    B = alpha.base_s
    for scale, mult in eta:
        bag.add_inf(SignedAtom(1, int(scale * B)), int(scale * B), -mult)
    xs = alpha.vars
    for x in xs:
        for atom, base_scale in single(x):
            bag.add_theta(atom, int(base_scale * B), -1)
    if pairs:
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                bag.add_theta(xs[i] * xs[j].inv(), B, -1)
                bag.add_theta(xs[i] * xs[j], B, -1)
    bag.mul_const(Fraction(1, const))
    return bag


def _pm(hat: Sequence[Fraction]) -> tuple:
    return tuple(a for e in hat for a in (SignedAtom.q(e), SignedAtom.q(-e)))


def _cnmla0(p, order):
    m, n = p["m"], p["n"]
    kappa = 2 * m + 2 * n + 2
    xhat = AlphabetSpec(tuple(SignedAtom.q(n - i + Fraction(1, 2)) for i in range(1, n + 1)), 2 * n)
    pre = _theta_prefactor(xhat, [(1, n)], lambda x: [(x * x, 1)], True)
    spec = LatticeThetaSpec("C", xhat, 1, kappa, (), Fraction(kappa, 2), 0, -n)
    return _with_lattice(pre, spec, order, p["shells"])


def _with_lattice(pre: FactorBag, spec: LatticeThetaSpec, order, shells=0):
    total, cert = lattice_theta_sum(spec, order, shells, certificate=True)
    series = pre.expand(order + 1) * total
    return Built(series.truncate(order), {"lattice_radius": list(cert.radius), "lattice_points": cert.points_used})


def _a2n2_interm(p, order):
    m, n = p["m"], p["n"]
    kappa = 2 * m + 2 * n + 1
    xhat = AlphabetSpec(tuple(SignedAtom(-1, 2 * (n - i)) for i in range(1, n + 1)), 2 * n - 1)
    B = xhat.base_s
    pre = _theta_prefactor(
        xhat, [(1, n)], lambda x: [(x, 1), ((x * x).shift_s(B), 2)], True
    )
    spec = LatticeThetaSpec("B", xhat, 1, kappa, (), Fraction(kappa, 2), 0, -Fraction(2 * n - 1, 2))
    return _with_lattice(pre, spec, order, p["shells"])


def _a2n2b_interm(p, order):
    m, n = p["m"], p["n"]
    kappa = 2 * m + 2 * n + 1
    xhat = AlphabetSpec(tuple(SignedAtom.q(n - i + Fraction(1, 2)) for i in range(1, n + 1)), 2 * n - 1)
    B = xhat.base_s
    pre = _theta_prefactor(
        xhat, [(1, n)], lambda x: [(SignedAtom(-x.sign, x.s + B // 2), 1), (x * x, 2)], True
    )
    spec = LatticeThetaSpec("C", xhat, 1, kappa, (), Fraction(kappa, 2), 0, -n, True)
    return _with_lattice(pre, spec, order, p["shells"])


def _dn_interm(p, order):
    m, n = p["m"], p["n"]
    kappa = 2 * m + 2 * n
    xhat = AlphabetSpec(tuple(SignedAtom(-1, 2 * (n - i)) for i in range(1, n + 1)), 2 * n - 2)
    pre = _theta_prefactor(xhat, [(1, n - 1), (Fraction(1, 2), 1)], lambda x: [(x, Fraction(1, 2))], True)
    spec = LatticeThetaSpec("B", xhat, 1, kappa, (), Fraction(kappa, 2), 0, -Fraction(2 * n - 1, 2))
    return _with_lattice(pre, spec, order, p["shells"])


def _interm_row(rid, desc, alphabet, rhs, check):
    _row(
        IdentitySpec(
            rid,
            (_p("m"), _p("n"), _SHELLS),
            desc,
            lambda p, o: sum_side(p["m"], alphabet(p["n"]), o),
            {"lattice": lambda p, o, d=0: rhs(p, o)},
            _all(check, _shells_ok),
        )
    )


_interm_row(
    "cnmla0",
    "sum q^|lambda| P'_2lambda(x^+-;q) at x_i = q^(n-i+1/2), q -> q^(2n), against theta prefactor times a C_n lattice sum",
    lambda n: AlphabetSpec(_pm([n - i + Fraction(1, 2) for i in range(1, n + 1)]), 2 * n),
    _cnmla0,
    _positive("m", "n"),
)
_interm_row(
    "a2n2-interm",
    "sum q^|lambda| P'_2lambda(x^+-,1;q) at x_i = q^(n-i), q -> q^(2n-1), against theta prefactor times a B_n lattice sum",
    lambda n: AlphabetSpec(_pm([n - i for i in range(1, n)]) + (SignedAtom.q(0),), 2 * n - 1),
    _a2n2_interm,
    _positive("m", "n"),
)
_interm_row(
    "a2n2b-interm",
    "sum q^|lambda| P'_2lambda(q^1/2,x^+-;q) at x_i = q^(n-i+1/2), q -> q^(2n-1), against a signed C_n lattice sum",
    lambda n: AlphabetSpec(
        (SignedAtom.q(n - Fraction(1, 2)),) + _pm([n - i + Fraction(1, 2) for i in range(2, n + 1)]),
        2 * n - 1,
    ),
    _a2n2b_interm,
    _positive("m", "n"),
)
_interm_row(
    "dn-interm",
    "sum q^|lambda| P'_2lambda(q^1/2,x^+-,1;q) at x_i = q^(n-i), q -> q^(2n-2), against a B_n lattice sum (n >= 2)",
    lambda n: AlphabetSpec(
        (SignedAtom.q(n - 1),) + _pm([n - i for i in range(2, n)]) + (SignedAtom.q(0),),
        2 * n - 2,
    ),
    _dn_interm,
    _all(_positive("m", "n"), _n_at_least_2),
)


# Macdonald-type identities at a q-power alphabet


def _mac_alphabet(p):
    n = p["n"]
    x = p["x"]
    if x in (None, "generic"):
        # no theta factor vanishes: exponents i, i +- j stay off multiples of 7
        return AlphabetSpec(tuple(SignedAtom(-1, 2 * i) for i in range(1, n + 1)), 7)
    if x == "y":
        k = p["kappa"]
        return AlphabetSpec(tuple(SignedAtom.q(Fraction(k + 1, 2) - i) for i in range(1, n + 1)), k)
    _need(len(x) == n, "the alphabet needs exactly n entries")
    return AlphabetSpec(x, p["base"])


def _mac_product(kind, alpha: AlphabetSpec, order):
    n = alpha.size
    B = alpha.base_s
    if kind == "d2":
        bag = FactorBag().add_inf(SignedAtom(1, B // 2), B // 2).add_inf(SignedAtom(1, B), B, n - 1)
        for x in alpha.vars:
            bag.add_theta(x, B // 2)
    else:
        bag = FactorBag().add_inf(SignedAtom(1, B), B, n).mul_const(2)
        if kind == "b1v":
            for x in alpha.vars:
                bag.add_theta(x, B)
    xs = alpha.vars
    for i in range(n):
        for j in range(i + 1, n):
            bag.add_theta(xs[i] * xs[j].inv(), B)
            bag.add_theta(xs[i] * xs[j], B)
    return bag.expand(order)


def _mac_spec(kind, alpha):
    n = alpha.size
    if kind == "d2":
        return LatticeThetaSpec("B", alpha, 1, 2 * n, (), 0, 2 * n, Fraction(1, 2))
    if kind == "b1v":
        return LatticeThetaSpec("B", alpha, 1, 2 * n - 1, (), 0, 2 * n - 1, 0, True)
    return LatticeThetaSpec("D", alpha, 1, 2 * n - 2, (), 0, 2 * n - 2, 0)


def _mac_lhs(kind):
    def build(p, order):
        spec = _mac_spec(kind, _mac_alphabet(p))
        total, cert = lattice_theta_sum(spec, order, p["shells"], certificate=True)
        return Built(total, {"lattice_radius": list(cert.radius), "lattice_points": cert.points_used})

    return build


def _mac_check(p):
    _positive("n")(p)
    _shells_ok(p)
    if p["x"] == "y":
        _need(p["kappa"] >= 1, "kappa must be >= 1")


_MAC_PARAMS = (
    _p("n"),
    Param("x", "atoms", "generic", False),
    Param("base", "frac", Fraction(1), False),
    Param("kappa", "int", 7, False),
    _SHELLS,
)
for _kind, _desc in (
    ("d2", "Macdonald identity for D_(n+1)^(2): B_n lattice sum with q^(2n binom(r,2) + r/2) as theta products"),
    ("b1v", "signed B_n lattice sum with q^((2n-1) binom(r,2)) as 2(q)^n times theta products"),
    ("d1v", "D_n lattice sum with q^(2(n-1) binom(r,2)) as 2(q)^n times theta products"),
):
    _row(
        IdentitySpec(
            f"mac-{_kind}",
            _MAC_PARAMS,
            _desc,
            _mac_lhs(_kind),
            {"product": (lambda k: lambda p, o, d=0: _mac_product(k, _mac_alphabet(p), o))(_kind)},
            _mac_check,
        )
    )


# evaluations of the M lattice sums


def _eta_theta(kappa, n, ys, const, singles):
    bag = FactorBag().add_inf(SignedAtom.q(kappa), to_grid(kappa), n).mul_const(const)
    K = to_grid(kappa)
    if singles:
        for y in ys:
            bag.add_theta(SignedAtom.q(y), K)
    for i in range(n):
        for j in range(i + 1, n):
            bag.add_theta(SignedAtom.q(ys[i] - ys[j]), K)
            bag.add_theta(SignedAtom.q(ys[i] + ys[j]), K)
    return bag


def _m_data(kind, m, n):
    """``(lattice spec, product form, (geometric spec, constant bag))`` for an M evaluation."""
    one = lambda e: AlphabetSpec(e, 1)
    if kind == "cn":
        k = 2 * m + 2 * n + 2
        spec = LatticeThetaSpec("C", one(tuple(SignedAtom.q(n - i + Fraction(1, 2)) for i in range(1, n + 1))), 2 * n, k, (), n * k, 0, -2 * n * n)
        prod = FactorBag().add_inf(SignedAtom.q(Fraction(k, 2)), k, 1).add_inf(SignedAtom.q(k), 2 * k, n - 1)
        for i in range(1, n + 1):
            prod.add_theta(SignedAtom.q(i), k)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                prod.add_theta(SignedAtom.q(j - i), 2 * k).add_theta(SignedAtom.q(i + j), 2 * k)
        const = FactorBag().add_inf(SignedAtom.q(1), 2, n + 1).add_inf(SignedAtom.q(2), 4, -1)
        return spec, prod, (GeometricSpec(2 * n, 0), const)
    if kind == "a2n2":
        k = 2 * m + 2 * n + 1
        spec = LatticeThetaSpec("B", one(tuple(SignedAtom(-1, 2 * (n - i)) for i in range(1, n + 1))), 2 * n - 1, k, (), Fraction((2 * n - 1) * k, 2), 0, -Fraction((2 * n - 1) ** 2, 2))
        prod = _eta_theta(k, n, [Fraction(k + 1, 2) - i for i in range(1, n + 1)], 2, True)
        return spec, prod, (GeometricSpec(2 * n - 1, 0), FactorBag().add_inf(SignedAtom.q(1), 2, n).mul_const(2))
    if kind == "a2n2b":
        k = 2 * m + 2 * n + 1
        spec = LatticeThetaSpec("C", one(tuple(SignedAtom.q(n - i + Fraction(1, 2)) for i in range(1, n + 1))), 2 * n - 1, k, (), Fraction((2 * n - 1) * k, 2), 0, -(2 * n - 1) * n, True)
        prod = _eta_theta(k, n, [n - i + 1 for i in range(1, n + 1)], 2, True)
        return spec, prod, (GeometricSpec(2 * n - 1, 1), FactorBag().add_inf(SignedAtom.q(1), 2, n).mul_const(2))
    k = 2 * m + 2 * n
    spec = LatticeThetaSpec("B", one(tuple(SignedAtom(-1, 2 * (n - i)) for i in range(1, n + 1))), 2 * (n - 1), k, (), (n - 1) * k, 0, -(n - 1) * (2 * n - 1))
    prod = _eta_theta(k, n, [Fraction(k + 1, 2) - i for i in range(1, n + 1)], 4, False)
    const = FactorBag().add_inf(SignedAtom.q(2), 4, 1).add_inf(SignedAtom.q(1), 2, n - 1).mul_const(4)
    return spec, prod, (GeometricSpec(2 * n - 2, 1), const)


def _m_lhs(kind):
    def build(p, order):
        spec, _, _ = _m_data(kind, p["m"], p["n"])
        total, cert = lattice_theta_sum(spec, order, p["shells"], certificate=True)
        return Built(total, {"lattice_radius": list(cert.radius), "lattice_points": cert.points_used})

    return build


def _m_product(kind):
    return lambda p, o, d=0: _m_data(kind, p["m"], p["n"])[1].expand(o)


def _m_sum_side(kind):
    def build(p, o, d=0):
        _, _, (geo, const) = _m_data(kind, p["m"], p["n"])
        return sum_side(p["m"], geo, o) * const.expand(o)

    return build


for _kind, _desc, _check in (
    ("cn", "C_n lattice sum M at x_i = q^(n-i+1/2) as a theta product", _positive("m", "n")),
    ("a2n2", "B_n lattice sum M at x_i = -q^(n-i) as 2(q^k;q^k)^n times theta products", _positive("m", "n")),
    ("a2n2b", "signed C_n lattice sum M at x_i = q^(n-i+1/2) as 2(q^k;q^k)^n times theta products", _positive("m", "n")),
    ("dn", "B_n lattice sum M with step 2(n-1) as 4(q^k;q^k)^n times theta products (n >= 2)", _all(_positive("m", "n"), _n_at_least_2)),
):
    _row(
        IdentitySpec(
            f"m-{_kind}",
            (_p("m"), _p("n"), _SHELLS),
            _desc,
            _m_lhs(_kind),
            {"product": _m_product(_kind), "sum-side": _m_sum_side(_kind)},
            _all(_check, _shells_ok),
        )
    )


# constant displays, dualities and consistency rows


for _cid, _desc, _min_n in (
    ("32", "eta-theta product at base 2n equals (q)^(n+1)/(q^2;q^2)", 1),
    ("33", "eta-theta product at base 2n-1 with theta(-q^(n-i)) equals 2(q)^n", 1),
    ("34", "eta-theta product at base 2n-1 with theta(-q^(2n-i)) equals 2(q)^n", 1),
    ("35", "eta-theta product at base 2n-2 equals 4(q^2;q^2)(q)^(n-1)", 2),
):
    _row(
        IdentitySpec(
            f"const-{_cid}",
            (_p("n"),),
            _desc,
            (lambda c: lambda p, o: product_constant(f"c{c}", p["n"], o)[0])(_cid),
            {"product": (lambda c: lambda p, o, d=0: product_constant(f"c{c}", p["n"], o)[1])(_cid)},
            (lambda k: lambda p: _need(p["n"] >= k, f"n must be >= {k}"))(_min_n),
        )
    )


def canonical_multiset(pid: str, params: dict, order) -> dict:
    """Exponent multiset ``e -> mult`` of the row's product written as ``c q^s prod (1-q^e)^mult``."""
    return product_form(pid, params).bag().canonical(order)


def _duality_lhs(pid):
    def build(p, order):
        same = canonical_multiset(f"{pid}-n", p, order) == canonical_multiset(f"{pid}-m", p, order)
        return Built(product_side(f"{pid}-n", p, order), {"canonical_multisets_equal": same})

    return build


for _pid, _check in (
    ("a2n2a", _positive("m", "n")),
    ("a2n2b", _positive("m", "n")),
    ("cn", _positive("m", "n")),
    ("dn", _all(_positive("m", "n"), _n_at_least_2)),
    ("an", _positive("m", "n")),
):
    _row(
        IdentitySpec(
            f"duality-{_pid}",
            (_p("m"), _p("n")),
            f"level-rank duality: the two product forms of the {_pid} family agree",
            _duality_lhs(_pid),
            {f"{_pid}-m": _product(f"{_pid}-m")},
            _check,
        )
    )


def _lam_row(pid, other, desc, check=None):
    def lhs(p, order):
        return product_side(pid, {"lam": (p["m"],) + (0,) * p["n"], "n": p["n"]}, order)

    _row(
        IdentitySpec(
            f"{pid}-consistency",
            (_p("m"), _p("n")),
            desc,
            lhs,
            {other: _product(other)},
            _all(_positive("m", "n"), *([check] if check else [])),
        )
    )


_lam_row("kac2", "cn-n", "theta-product character formula at lambda = (m,0^n) against the C_n product")
_lam_row("principal", "a2n2a-n", "principally specialised character at lambda = (m,0^n) against the first A_2n^(2) product")
_lam_row("f-dn2", "dn-n", "D_(n+1)^(2) character product at lambda = (m,0^n) against the D_n product", _n_at_least_2)


# rows checked at exact rational points


def _values_series(values: Sequence[Fraction]) -> Series:
    """Sample ``k`` becomes the coefficient of ``q^k``."""
    num = [0] * (2 * len(values) - 1) if values else []
    den = 1
    for v in values:
        den = den * Fraction(v).denominator // _gcd(den, Fraction(v).denominator)
    for k, v in enumerate(values):
        num[2 * k] = int(Fraction(v) * den)
    return Series(0, 2 * len(values) - 2, num, den)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _watson_side(p, side):
    rng = random.Random(p["seed"])
    vals = []
    for _ in range(p["points"]):
        params, _ = random_watson_params(rng, p["N"])
        vals.append(watson_check(params)[side])
    return _values_series(vals)


def _weyl_points(p):
    rng = random.Random(p["seed"])
    out = []
    while len(out) < p["points"]:
        pts = [random_rational(rng) for _ in range(p["n"])]
        out.append(pts)
    return out


def _weyl_side(p, side):
    return _values_series([weyl_denominator_check(p["type"], p["n"], x)[side] for x in _weyl_points(p)])


_VALUE_PARAMS = (Param("seed", "int", 0, False), Param("points", "int", 20, False))
_row(
    IdentitySpec(
        "watson",
        (_p("N"),) + _VALUE_PARAMS,
        "Watson's transformation: terminating balanced 4phi3 against very-well-poised 8phi7 at random rational points",
        lambda p, o: _watson_side(p, 0),
        {"8phi7": lambda p, o, d=0: _watson_side(p, 1)},
        lambda p: (_need(p["N"] >= 0, "N must be >= 0"), _need(p["points"] >= 1, "points must be >= 1")),
        kind="values",
    )
)
_row(
    IdentitySpec(
        "weyl",
        (_p("type", "str"), _p("n")) + _VALUE_PARAMS,
        "Weyl denominator formulas for B_n, C_n, D_n: determinant against product at random rational points",
        lambda p, o: _weyl_side(p, 0),
        {"product": lambda p, o, d=0: _weyl_side(p, 1)},
        lambda p: (
            _need(p["type"] in ("B", "C", "D"), "type must be B, C or D"),
            _positive("n")(p),
            _need(p["points"] >= 1, "points must be >= 1"),
        ),
        kind="values",
    )
)


def _triple_atom(p):
    atoms = p["x"]
    _need(len(atoms) == 1, "x must be a single signed q-power")
    return atoms[0]


_row(
    IdentitySpec(
        "triple",
        (Param("x", "atoms", (SignedAtom.q(Fraction(1, 2), -1),), False), Param("base", "frac", Fraction(1), False)),
        "Jacobi triple product: sum (-1)^r x^r p^binom(r,2) = (p;p)_inf theta(x;p), p = q^base",
        lambda p, o: triple_product_check(_triple_atom(p), p["base"], o)[0],
        {"product": lambda p, o, d=0: triple_product_check(_triple_atom(p), p["base"], o)[1]},
        lambda p: (_triple_atom(p), _need(p["base"] > 0, "base must be positive")),
    )
)


# -- verification --------------------------------------------------------------------------


@dataclass
class Built:
    """A side's series plus certificate notes."""

    series: Series
    notes: dict = field(default_factory=dict)


def json_value(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    if isinstance(v, SignedAtom):
        return format_atoms((v,))
    if isinstance(v, tuple) and v and isinstance(v[0], SignedAtom):
        return format_atoms(v)
    if isinstance(v, (tuple, list)):
        return [json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: json_value(x) for k, x in v.items()}
    return v


def json_exponent(s):
    if s is None:
        return None
    v = Fraction(s, 2)
    return int(v) if v.denominator == 1 else str(v)


@dataclass
class VerificationReport:
    id: str
    params: dict
    order_q: object
    match: bool
    first_mismatch_q: object = None
    lhs_sample: list = field(default_factory=list)
    rhs_sample: list = field(default_factory=list)
    elapsed_ms_lhs: float = 0.0
    elapsed_ms_rhs: float = 0.0
    seed: int | None = None
    notes: dict = field(default_factory=dict)

    FIELDS = (
        "id",
        "params",
        "order_q",
        "match",
        "first_mismatch_q",
        "lhs_sample",
        "rhs_sample",
        "elapsed_ms_lhs",
        "elapsed_ms_rhs",
        "seed",
        "notes",
    )

    def to_dict(self, timings: bool = True) -> dict:
        out = {k: getattr(self, k) for k in self.FIELDS}
        if not timings:
            out["elapsed_ms_lhs"] = out["elapsed_ms_rhs"] = 0.0
        return out

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=False)


def _sample(series: Series, hi: int) -> list:
    """First 8 and last 4 in-range coefficients as ``[exponent, coefficient]``."""
    items = [(s, c) for s, c in series.items_s() if s <= hi and c != 0]
    picked = items if len(items) <= 12 else items[:8] + items[-4:]
    return [[json_exponent(s), json_value(Fraction(c))] for s, c in picked]


def get_identity(identity_id: str) -> IdentitySpec:
    try:
        return CATALOGUE[identity_id]
    except KeyError:
        raise UnknownIdentity(f"unknown identity id {identity_id!r}") from None


def _unwrap(value) -> Built:
    return value if isinstance(value, Built) else Built(value)


def _first_mismatch(a: Series, b: Series, hi: int):
    s = a.truncate(Fraction(hi, 2)).first_mismatch_s(b.truncate(Fraction(hi, 2)))
    return s if s is not None and s <= hi else None


def build_sides(identity_id: str, params: dict, order, perturb: int = 0):
    """``(spec, normalised params, lhs Built, {form: Built}, timings)`` without comparison."""
    spec = get_identity(identity_id)
    p = spec.normalise(params)
    if perturb and not spec.perturbable:
        raise BadParams(f"{identity_id} has no kappa to perturb")
    if spec.kind == "values":
        order = p["points"] - 1
    if Fraction(order) < 0:
        raise BadParams("order must be >= 0")
    t0 = time.perf_counter()
    lhs = _unwrap(spec.lhs(p, order))
    t1 = time.perf_counter()
    rhs = {}
    for name, builder in spec.rhs.items():
        rhs[name] = _unwrap(builder(p, order, perturb) if perturb else builder(p, order))
    t2 = time.perf_counter()
    return spec, p, lhs, rhs, order, ((t1 - t0) * 1000, (t2 - t1) * 1000)


def verify(identity_id: str, params: dict | None = None, order=40, seed: int | None = None, perturb: int = 0) -> VerificationReport:
    """Build both sides to ``order`` and compare coefficientwise.

    With two right-hand forms all three pairwise comparisons are made; the
    report's mismatch is the smallest offending exponent among them.
    """
    params = dict(params or {})
    spec = get_identity(identity_id)
    if seed is not None and any(p.name == "seed" for p in spec.params):
        params.setdefault("seed", seed)
    spec, p, lhs, rhs, order, (ms_l, ms_r) = build_sides(identity_id, params, order, perturb)
    hi = to_grid(order)
    notes = dict(lhs.notes)
    mismatches = {}
    names = list(rhs)
    for name in names:
        notes.update(rhs[name].notes)
        mismatches[f"lhs={name}"] = _first_mismatch(lhs.series, rhs[name].series, hi)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a, b = names[i], names[j]
            mismatches[f"{a}={b}"] = _first_mismatch(rhs[a].series, rhs[b].series, hi)
    bad = [s for s in mismatches.values() if s is not None]
    first = min(bad) if bad else None
    if len(mismatches) > 1:
        notes["comparisons"] = {k: (v is None) for k, v in mismatches.items()}
    if first is not None:
        notes["lhs_at_mismatch"] = json_value(lhs.series.coeff_s(first))
        notes["rhs_at_mismatch"] = {n: json_value(rhs[n].series.coeff_s(first)) for n in names}
    if perturb:
        notes["perturb"] = perturb
    if spec.kind == "values":
        notes["sample_encoding"] = "coefficient of q^k is the value at sample point k"
    first_rhs = rhs[names[0]].series
    return VerificationReport(
        id=identity_id,
        params=json_value(p),
        order_q=json_value(Fraction(order)),
        match=first is None,
        first_mismatch_q=json_exponent(first),
        lhs_sample=_sample(lhs.series, hi),
        rhs_sample=_sample(first_rhs, hi),
        elapsed_ms_lhs=round(ms_l, 3),
        elapsed_ms_rhs=round(ms_r, 3),
        seed=p.get("seed", seed),
        notes=notes,
    )


def side_series(identity_id: str, params: dict, order, side: str = "lhs") -> Series:
    """One side of a row (``"lhs"``, ``"rhs"`` or a named right-hand form)."""
    spec = get_identity(identity_id)
    p = spec.normalise(params)
    if spec.kind == "values":
        order = p["points"] - 1
    if side == "lhs":
        return _unwrap(spec.lhs(p, order)).series
    if side == "rhs":
        side = next(iter(spec.rhs))
    if side not in spec.rhs:
        raise BadParams(f"{identity_id} has no side {side!r}; choose lhs, rhs or one of {', '.join(spec.rhs)}")
    return _unwrap(spec.rhs[side](p, order)).series


# -- suites ------------------------------------------------------------------------------------


@dataclass(frozen=True)
class SuiteRow:
    id: str
    params: dict
    order: object = 40
    perturb: int = 0


def parse_suite(text: str) -> list:
    """Lines ``id key=value ... order=N``; ``#`` starts a comment."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        params = {}
        order = 40
        perturb = 0
        for tok in rest:
            if "=" not in tok:
                raise BadParams(f"line {lineno}: expected key=value, got {tok!r}")
            k, v = tok.split("=", 1)
            if k == "order":
                order = _frac("order", v)
            elif k == "perturb":
                perturb = _to_int("perturb", v)
            else:
                params[k] = v
        rows.append(SuiteRow(head, params, order, perturb))
    return rows


def _error_report(row: SuiteRow, exc: Exception) -> VerificationReport:
    return VerificationReport(
        id=row.id,
        params=json_value(dict(row.params)),
        order_q=json_value(Fraction(row.order)),
        match=False,
        notes={"error": f"{type(exc).__name__}: {exc}"},
    )


def _run_row(row: SuiteRow) -> VerificationReport:
    try:
        return verify(row.id, row.params, row.order, perturb=row.perturb)
    except Exception as exc:  # one bad row must not sink the suite
        return _error_report(row, exc)


def default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 1


def run_suite(config, jobs: int | None = None) -> list:
    """Verify every row; reports come back in input order, errors isolated per row."""
    rows = [r if isinstance(r, SuiteRow) else SuiteRow(*r) for r in config]
    if not rows:
        return []
    jobs = default_jobs() if jobs is None else max(1, jobs)
    if jobs == 1 or len(rows) == 1:
        return [_run_row(r) for r in rows]
    with ProcessPoolExecutor(max_workers=min(jobs, len(rows))) as pool:
        return list(pool.map(_run_row, rows))
