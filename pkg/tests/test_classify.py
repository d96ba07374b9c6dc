import json
from itertools import combinations_with_replacement
from types import SimpleNamespace

import pytest
from hypothesis import given, settings, strategies as st

from altsurg import classify as C
from altsurg.alexpoly import parse_laurent, parse_polynomial
from altsurg.changemaker import build_integer_lattice, n_invariant
from altsurg.errors import EmptyStableCoefficients, SearchSpaceOverflow
from altsurg.osb_search import FOUND, NONE, search_integer

PRETZEL = [1, -1, 0, 1, -1, 1]


@pytest.fixture(scope="module")
def pretzel():
    return C.classify(parse_polynomial(PRETZEL))


def test_pretzel_interval(pretzel):
    assert pretzel.outcome == C.INTERVAL_D
    assert pretzel.N == 19 and pretzel.rho == (3, 2, 2)
    assert pretzel.slope_window == [18, 19]
    assert set(pretzel.searches) == {"20", "18", "19", "37/2"}
    half = pretzel.half_integer_certificate()
    assert half.planar_found and C.certificate(half)["determinant"] == 37


def test_census_single_slope():
    c = C.classify_rho((5, 4, 3, 2, 2))
    assert (c.outcome, c.N, c.slope_window) == (C.AT_MOST_ONE, 60, [59])
    assert "60" in c.searches and c.searches["60"].outcome.status == NONE
    text = C.report_text(c)
    assert "L_60 is excluded" in text
    assert "exhausted" in text


def test_two_slopes():
    c = C.classify_rho((12, 9, 5, 4, 2))
    assert (c.outcome, c.slope_window) == (C.AT_MOST_TWO, [271, 272])


@pytest.mark.parametrize("g", [1, 2, 3])
def test_two_stranded_form(g):
    c = C.classify_rho((2,) * g)
    N = 4 * g + 2
    assert (c.outcome, c.N, c.slope_window) == (C.INTERVAL_D, N, [N - 1, N])
    assert C.CAVEAT_TWO_STRANDED in c.caveats
    # the extra torus-knot slope shows up as a certificate, never as a flag
    assert c.searches[str(N + 1)].planar_found
    assert C.genus_slope_bound(c.rho) == N + 1


def test_obstructed():
    c = C.classify_rho((3, 2, 2, 2))
    assert c.outcome == C.OBSTRUCTED and c.slope_window == []
    assert all(r.outcome.status == NONE for r in c.searches.values())
    assert "no integer lattice" in C.report_text(c)


def test_unknot_and_no_stable():
    c = C.classify(parse_polynomial([1]))
    assert c.outcome == C.UNKNOT_FORM and c.unknot_form
    figure_eight = parse_polynomial([-1, 3])
    assert C.classify(figure_eight).outcome == C.NO_STABLE


def test_adversarial_counts_give_no_stable():
    from altsurg.alexpoly import TorsionProfile, polynomial_from_profile, torsion_coefficients
    # t = (3, 2, 1, 0): counts (0, 1, 2, 3) with g = 3; no rho produces them
    p = polynomial_from_profile(TorsionProfile((3, 2, 1, 0)))
    assert torsion_coefficients(p).t == (3, 2, 1, 0)
    assert C.classify(p).outcome == C.NO_STABLE


@pytest.mark.parametrize("rho, g, bound", [((2, 2, 2), 3, 15), ((3, 2, 2), 5, 19), ((3, 3, 3), 9, 31)])
def test_genus_slope_bound(rho, g, bound):
    assert C.genus_slope_bound(rho) == bound


def test_genus_slope_bound_examples_against_n():
    assert n_invariant((3, 2, 2)) == C.genus_slope_bound((3, 2, 2))
    assert n_invariant((3, 3, 3)) == 30 <= C.genus_slope_bound((3, 3, 3))
    with pytest.raises(EmptyStableCoefficients):
        C.genus_slope_bound(())


def all_rho(max_entry, max_len):
    return [tuple(sorted(c, reverse=True)) for k in range(1, max_len + 1)
            for c in combinations_with_replacement(range(2, max_entry + 1), k)]


def test_genus_bound_covers_every_superbase_slope():
    # N itself can exceed 3g + 4, e.g. (3, 2, 2, 2): N = 23, g = 6; the bound constrains
    # slopes whose lattice has an obtuse superbase, so those rho must have none above it
    beyond = []
    for rho in all_rho(8, 5):
        if rho[0] < 3:
            continue
        bound, N = C.genus_slope_bound(rho), n_invariant(rho)
        if N + 1 <= bound:
            continue
        beyond.append(rho)
        for n in range(max(N - 1, bound + 1), N + 2):
            assert not search_integer(build_integer_lattice(rho, n)).found, (rho, n)
    assert {(3, 2, 2, 2), (3, 2, 2, 2, 2), (3, 3, 2, 2, 2)} <= set(beyond)


def test_slope_text():
    from fractions import Fraction
    assert C.slope_text(Fraction(37, 2)) == "37/2"
    assert C.slope_text(19) == "19"


def test_presentation_invariance(pretzel):
    full = [1, -1, 0, 1, -1, 1, -1, 1, 0, -1, 1]
    negated = [-a for a in PRETZEL]
    for p in (parse_laurent(full), parse_polynomial(negated), parse_laurent(full[::-1])):
        c = C.classify(p)
        assert (c.outcome, c.N, c.slope_window) == (pretzel.outcome, pretzel.N, pretzel.slope_window)


def test_report_json(pretzel):
    data = C.report_json(pretzel)
    for key in ("input", "rho", "N", "genus", "outcome", "slope_window", "certificates", "caveats",
                "schema_version", "genus_slope_bound"):
        assert key in data
    assert data["input"] == {"alexander": PRETZEL}
    diagrams = [cert for cert in data["certificates"] if "diagram" in cert]
    assert sorted(cert["slope"] for cert in diagrams) == ["18", "19", "37/2"]
    assert any("3-manifold software" in note for note in data["caveats"])
    json.dumps(data)


def test_report_is_reproducible():
    a = json.dumps(C.report_json(C.classify_rho((5, 4, 3, 2, 2))), sort_keys=True)
    b = json.dumps(C.report_json(C.classify_rho((5, 4, 3, 2, 2))), sort_keys=True)
    assert a == b


def test_mirror_relabels_signs(pretzel):
    data = C.report_json(pretzel, mirror=True)
    assert data["slope_window"] == [-19, -18]
    assert data["outcome"] == pretzel.outcome


def test_certificate_hash_changes_with_content(pretzel):
    cert = C.certificate(pretzel.searches["18"], timings=False)
    body = {k: v for k, v in cert.items() if k != "content_hash"}
    assert cert["content_hash"] == C.content_hash(body)
    body["status"] = NONE
    assert C.content_hash(body) != cert["content_hash"]


def fake_results(found):
    """run_slope replacement: ``found`` maps slope text to a planar flag."""
    def run(L, mode, cap_vectors, cap_nodes, witness=None):
        key = C.slope_text(L.slope)
        status = FOUND if key in found else NONE
        outcome = SimpleNamespace(status=status, lattice=L, superbase=SimpleNamespace(vectors=[]), exhaustion=None, mode=mode)
        emb = object() if found.get(key) else None
        return C.SlopeResult(outcome, emb)
    return run


@pytest.mark.parametrize("found, outcome, window", [
    ({"61": True}, C.COUNTEREXAMPLE, [59, 61]),
    ({"59": True, "60": True, "119/2": True}, C.INTERVAL_D, [59, 60]),
    ({"59": True, "60": True}, C.AT_MOST_TWO, [59, 60]),
    ({"59": True}, C.AT_MOST_ONE, [59]),
    ({"60": True}, C.AT_MOST_ONE, [60]),
    ({}, C.OBSTRUCTED, []),
    ({"59": False, "60": True}, C.AT_MOST_ONE, [60]),
    ({"59": False, "60": False}, C.OBSTRUCTED, []),
    ({"61": False, "59": True}, C.AT_MOST_ONE, [59]),
])
def test_flowchart(monkeypatch, found, outcome, window):
    monkeypatch.setattr(C, "run_slope", fake_results(found))
    c = C.classify_rho((5, 4, 3, 2, 2))
    assert (c.outcome, c.slope_window) == (outcome, window)
    N = c.N
    assert all(N - 1 <= s <= N + 1 for s in c.slope_window)
    if outcome == C.COUNTEREXAMPLE:
        assert list(c.searches) == ["61"]
    if "119/2" in c.searches:
        assert found.get("59") and found.get("60")


def test_overflow_carries_partial_results():
    with pytest.raises(SearchSpaceOverflow) as info:
        C.classify_rho((5, 4, 3, 2, 2), cap_nodes=3)
    partial = info.value.partial
    assert partial["classification"].N == 60
    assert partial["slope"] in {"59", "60", "61"}


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(2, 5), min_size=1, max_size=3))
def test_window_structure(rho):
    c = C.classify_rho(rho)
    N = c.N
    assert N - 1 >= sum(x * x for x in c.rho) + 1
    assert all(N - 1 <= s <= N + 1 for s in c.slope_window)
