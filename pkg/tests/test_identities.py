import json
from fractions import Fraction

import pytest

from hlrr.errors import BadParams, UnknownIdentity
from hlrr.identities import (
    CATALOGUE,
    JOBS_ENV,
    SuiteRow,
    VerificationReport,
    canonical_multiset,
    default_jobs,
    format_atoms,
    parse_atoms,
    parse_suite,
    run_suite,
    side_series,
    verify,
)
from hlrr.qseries import SignedAtom
from hlrr.sums import ag_multisum

# smallest interesting parameters for every row
SMALL = {
    "rr": {"sigma": 0},
    "ag": {"m": 2, "i": 1},
    "a2n2-s0": {"m": 1, "n": 2},
    "a2n2-s1": {"m": 2, "n": 1},
    "cn": {"m": 1, "n": 2},
    "dn": {"m": 1, "n": 2},
    "mixed": {"m": 1, "n": 2, "sigma": 1},
    "an-limit": {"m": 1, "n": 2},
    "limk": {"m": 2, "n": 1, "k": 1},
    "limk-flip": {"m": 1, "n": 1, "k": 2},
    "q2r": {"r": 2, "n": 1, "delta": 1},
    "q2r-companion": {"n": 1, "sigma": 1},
    "bressoud": {"n": 2, "delta": 0},
    "rs": {"j": 1},
    "cn-rs": {"m": 1, "n": 1},
    "cnmla0": {"m": 1, "n": 1},
    "a2n2-interm": {"m": 1, "n": 1},
    "a2n2b-interm": {"m": 1, "n": 1},
    "dn-interm": {"m": 1, "n": 2},
    "mac-d2": {"n": 2},
    "mac-b1v": {"n": 1},
    "mac-d1v": {"n": 2},
    "m-cn": {"m": 1, "n": 1},
    "m-a2n2": {"m": 1, "n": 1},
    "m-a2n2b": {"m": 1, "n": 1},
    "m-dn": {"m": 1, "n": 2},
    "const-32": {"n": 2},
    "const-33": {"n": 2},
    "const-34": {"n": 2},
    "const-35": {"n": 2},
    "duality-a2n2a": {"m": 1, "n": 2},
    "duality-a2n2b": {"m": 2, "n": 1},
    "duality-cn": {"m": 2, "n": 2},
    "duality-dn": {"m": 1, "n": 2},
    "duality-an": {"m": 2, "n": 1},
    "kac2-consistency": {"m": 1, "n": 2},
    "principal-consistency": {"m": 2, "n": 1},
    "f-dn2-consistency": {"m": 1, "n": 2},
    "watson": {"N": 3, "points": 5},
    "weyl": {"type": "C", "n": 3, "points": 5},
    "triple": {},
}


def test_every_catalogue_row_has_small_parameters():
    assert set(SMALL) == set(CATALOGUE)


@pytest.mark.parametrize("rid", sorted(SMALL))
def test_row_matches_and_report_is_complete(rid):
    report = verify(rid, SMALL[rid], order=20)
    assert report.match, report.to_dict()
    d = json.loads(report.to_json())
    assert list(d) == list(VerificationReport.FIELDS)
    assert d["id"] == rid and d["first_mismatch_q"] is None
    assert len(d["lhs_sample"]) <= 12 and len(d["rhs_sample"]) <= 12
    for exp, _coeff in d["lhs_sample"]:
        assert isinstance(exp, (int, str))


def test_report_is_deterministic_without_timings():
    a = verify("cn", {"m": 2, "n": 2}, order=30).to_json(timings=False)
    b = verify("cn", {"m": 2, "n": 2}, order=30).to_json(timings=False)
    assert a == b


def test_string_parameters_are_converted():
    assert verify("ag", {"m": "2", "i": "3"}, order=10).params == {"m": 2, "i": 3}


@pytest.mark.parametrize("rid", ["rr", "cn", "mac-d2", "m-a2n2", "limk"])
def test_truncation_is_monotone(rid):
    params = SMALL[rid]
    short = side_series(rid, params, 15)
    long = side_series(rid, params, 25)
    assert long.truncate(15) == short
    assert short.order == 15


def test_half_integer_exponents_are_strings():
    # sum_r q^(r^2/2) has support on the half-integers
    report = verify("triple", {"x": "-q^1/2", "base": "1"}, order=6)
    assert report.match
    exps = [e for e, _ in report.lhs_sample]
    assert any(isinstance(e, str) and "/" in e for e in exps)


# -- negative controls -----------------------------------------------------


@pytest.mark.parametrize("rid,params", [("rr", {"sigma": 0}), ("cn", {"m": 1, "n": 1}), ("ag", {"m": 2, "i": 2})])
def test_perturbed_modulus_is_caught(rid, params):
    report = verify(rid, params, order=40, perturb=1)
    assert not report.match
    assert report.notes["perturb"] == 1
    assert "lhs_at_mismatch" in report.notes


def test_perturbing_a_row_without_a_modulus_is_refused():
    with pytest.raises(BadParams):
        verify("rs", {"j": 1}, perturb=1)


def test_bad_inputs():
    with pytest.raises(UnknownIdentity):
        verify("no-such-row", {})
    with pytest.raises(BadParams):
        verify("dn", {"m": 1, "n": 1})
    with pytest.raises(BadParams):
        verify("ag", {"m": 1})
    with pytest.raises(BadParams):
        verify("ag", {"m": 1, "i": 1, "extra": 3})
    with pytest.raises(BadParams):
        side_series("cn", {"m": 1, "n": 1}, 5, side="nope")


# -- structural checks -----------------------------------------------------


@pytest.mark.parametrize("m", [1, 2, 3])
def test_mixed_rank_one_reduces_to_andrews_gordon(m):
    assert side_series("mixed", {"m": m, "n": 1, "sigma": 0}, 60) == ag_multisum(m, m + 1, 60)
    assert side_series("mixed", {"m": m, "n": 1, "sigma": 1}, 60) == ag_multisum(m, 1, 60)


def test_two_forms_are_compared_pairwise():
    notes = verify("cn", {"m": 1, "n": 2}, order=20).notes
    assert notes["comparisons"] == {"lhs=cn-n": True, "lhs=cn-m": True, "cn-n=cn-m": True}


def test_canonical_multisets_of_dual_forms_agree():
    for fam in ("a2n2a", "cn", "an"):
        a = canonical_multiset(f"{fam}-n", {"m": 2, "n": 3}, 100)
        b = canonical_multiset(f"{fam}-m", {"m": 2, "n": 3}, 100)
        assert a == b
    report = verify("duality-cn", {"m": 2, "n": 3}, order=60)
    assert report.notes["canonical_multisets_equal"] is True


def test_rect_limit_certificate_is_recorded():
    notes = verify("an-limit", {"m": 1, "n": 1}, order=20).notes
    assert isinstance(notes["stabilised_at_r"], int)


def test_lattice_certificate_is_recorded():
    notes = verify("mac-b1v", {"n": 2}, order=20).notes
    assert notes["lattice_points"] > 0 and len(notes["lattice_radius"]) == 2


def test_values_rows_record_the_encoding_and_seed():
    report = verify("watson", {"N": 2, "points": 4}, order=3, seed=7)
    assert report.seed == 7
    assert "sample_encoding" in report.notes


def test_atoms_round_trip():
    atoms = parse_atoms("-q^1, q^1/2, 1")
    assert atoms == (SignedAtom.q(1, -1), SignedAtom.q(Fraction(1, 2)), SignedAtom.q(0))
    assert parse_atoms(format_atoms(atoms)) == atoms


# -- suites ----------------------------------------------------------------

SUITE = """
# comment line
rr sigma=1 order=30
cn m=1 n=2 order=20
dn m=1 n=1          # invalid: n >= 2
ag m=1 i=1 order=20 perturb=1
"""


def test_parse_suite():
    rows = parse_suite(SUITE)
    assert [r.id for r in rows] == ["rr", "cn", "dn", "ag"]
    assert rows[0].order == 30 and rows[2].order == 40 and rows[3].perturb == 1
    with pytest.raises(BadParams):
        parse_suite("rr sigma")


@pytest.mark.parametrize("jobs", [1, 2])
def test_suite_keeps_order_and_isolates_errors(jobs):
    reports = run_suite(parse_suite(SUITE), jobs=jobs)
    assert [r.id for r in reports] == ["rr", "cn", "dn", "ag"]
    assert [r.match for r in reports] == [True, True, False, False]
    assert "error" in reports[2].notes and "error" not in reports[3].notes


def test_suite_results_do_not_depend_on_jobs():
    rows = parse_suite(SUITE)
    one = [r.to_json(timings=False) for r in run_suite(rows, jobs=1)]
    two = [r.to_json(timings=False) for r in run_suite(rows, jobs=3)]
    assert one == two


def test_empty_suite():
    assert run_suite([]) == []
    assert run_suite(parse_suite("# nothing\n")) == []


def test_tuple_rows_are_accepted():
    (report,) = run_suite([("rr", {"sigma": 0}, 10)])
    assert report.match


def test_jobs_from_environment(monkeypatch):
    monkeypatch.setenv(JOBS_ENV, "3")
    assert default_jobs() == 3
    monkeypatch.setenv(JOBS_ENV, "junk")
    assert default_jobs() == 1
    monkeypatch.delenv(JOBS_ENV)
    assert default_jobs() == 1
    assert SuiteRow("rr", {}).order == 40
