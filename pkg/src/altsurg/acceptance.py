"""Reproduction corpus: census rows, asymmetric L-space knots and small fixtures.

Each ``check_*`` function returns ``(ok, detail)``.  Superbases found along
the way are collected in a :class:`Collected` so the invariant sweep can
re-examine them.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .alexpoly import parse_polynomial, torsion_coefficients, torsion_counts
from .bruteforce import find_superbase
from .changemaker import (
    build_half_integer_lattice,
    build_integer_lattice,
    is_changemaker,
    lattice_from_sigma,
    n_invariant,
    stable_coefficients,
)
from .classify import INTERVAL_D, classify, classify_rho, genus_slope_bound, run_slope
from .goeritz import goeritz_determinant, spanning_tree_count
from .lattice import validate_superbase
from .osb_search import FOUND, FULL, NONE, genus_inequality_check, pre_obstructions, search_integer

# knot, stable coefficients, N; the only alternating slope is N - 1
SINGLE_SLOPE_ROWS = [
    ("t10188", (5, 4, 3, 2, 2), 60),
    ("t11556", (6, 4, 3, 2), 67),
    ("t12753", (7, 5, 3, 3), 95),
    ("o9_32132", (7, 5, 3), 86),
    ("o9_32588", (5, 5, 4, 3, 2, 2), 85),
    ("o9_37754", (6, 6, 4, 3, 2), 103),
    ("o9_39451", (7, 6, 3, 2, 2), 104),
    ("o9_40179", (8, 7, 3, 2, 2), 132),
    ("o9_43001", (8, 5, 4, 2, 2), 115),
    ("o9_43679", (7, 7, 5, 3, 3), 144),
    ("o9_43953", (9, 4, 3, 3), 118),
    ("o9_44054", (9, 5, 3, 3), 127),
]

# asymmetric L-space knot parameters (m, b1, a1, a2, a3), N, stable coefficients;
# slopes N - 1 and N are both alternating
TWO_SLOPE_ROWS = [
    ((1, 1, 1, 1, 0), 272, (12, 9, 5, 4, 2)),
    ((1, 1, 0, 1, 1), 471, (16, 12, 7, 4, 2)),
    ((1, 1, 1, 2, 0), 416, (12, 12, 9, 5, 4, 2)),
    ((1, 1, 2, 1, 0), 557, (17, 14, 5, 5, 4, 2)),
    ((1, 2, 1, 1, 0), 555, (17, 13, 7, 6, 3)),
    ((2, 1, 1, 1, 0), 588, (18, 13, 7, 6, 2, 2)),
    ((1, 1, 1, 1, 1), 1156, (26, 17, 12, 5, 4, 2)),
    ((1, 1, 0, 2, 1), 1010, (23, 19, 7, 7, 4, 2)),
    ((1, 2, 0, 1, 1), 966, (23, 17, 10, 6, 3)),
    ((1, 1, 2, 2, 0), 846, (17, 17, 14, 5, 5, 4, 2)),
    ((1, 2, 1, 2, 0), 844, (17, 17, 13, 7, 6, 3)),
    ((2, 1, 1, 2, 0), 912, (18, 18, 13, 7, 6, 2, 2)),
    ((1, 1, 0, 1, 2), 1143, (28, 12, 12, 7, 4, 2)),
    ((2, 1, 0, 1, 1), 1067, (24, 18, 11, 6, 2, 2)),
]

# stable coefficients whose lattices (with 1, 2 or 3 leading ones) carry no superbase
NO_SUPERBASE_FAMILIES = [(3, 2, 2, 2), (3, 3, 2, 2, 2), (3, 3, 3, 2, 2, 2)]

PRETZEL_RAW = [1, -1, 0, 1, -1, 1]


@dataclass
class Collected:
    found: list = field(default_factory=list)  # SlopeResult with status found

    def keep(self, result):
        if result.outcome.status == FOUND:
            self.found.append(result)
        return result


def _window(rho, collected):
    """Searches at N-1, N, N+1 and N-1/2, the last using the N-1 superbase as witness."""
    N = n_invariant(rho)
    low = collected.keep(run_slope(build_integer_lattice(rho, N - 1), FULL))
    mid = collected.keep(run_slope(build_integer_lattice(rho, N), FULL))
    high = collected.keep(run_slope(build_integer_lattice(rho, N + 1), FULL))
    witness = list(low.outcome.superbase.vectors) if low.outcome.status == FOUND else None
    half = collected.keep(run_slope(build_half_integer_lattice(rho, N), FULL, witness=witness))
    return N, low, mid, high, half


def _status(result):
    s = result.outcome.status
    return "found+planar" if result.planar_found else ("found" if s == FOUND else s)


def check_single_slope_rows(collected):
    bad = []
    for name, rho, N_expected in SINGLE_SLOPE_ROWS:
        N, low, mid, high, half = _window(rho, collected)
        got = (N, _status(low), _status(mid), _status(high), _status(half))
        want = (N_expected, "found+planar", NONE, NONE, NONE)
        if got != want:
            bad.append(f"{name}: {got}")
    return not bad, f"{len(SINGLE_SLOPE_ROWS) - len(bad)}/{len(SINGLE_SLOPE_ROWS)} rows" + (
        f"; mismatches {bad}" if bad else "")


def check_two_slope_rows(collected):
    bad = []
    for params, N_expected, rho in TWO_SLOPE_ROWS:
        N, low, mid, high, half = _window(rho, collected)
        got = (N, low.outcome.status, mid.outcome.status, high.outcome.status, half.outcome.status)
        want = (N_expected, FOUND, FOUND, NONE, NONE)
        if got != want:
            bad.append(f"{params}: {got}")
    return not bad, f"{len(TWO_SLOPE_ROWS) - len(bad)}/{len(TWO_SLOPE_ROWS)} rows" + (
        f"; mismatches {bad}" if bad else "")


def no_superbase_lattices():
    for rho in NO_SUPERBASE_FAMILIES:
        for ones in (1, 2, 3):
            yield lattice_from_sigma((1,) * ones + tuple(sorted(rho)))


def check_no_superbase_families(collected):
    got = [search_integer(L, FULL).status for L in no_superbase_lattices()]
    return all(s == NONE for s in got) and len(got) == 9, f"statuses {got}"


def check_pretzel(collected):
    p = parse_polynomial(PRETZEL_RAW)
    t = torsion_coefficients(p).t
    counts = torsion_counts(torsion_coefficients(p))
    rho = stable_coefficients(counts, p.genus_degree, counts.t0)
    c = classify(p, FULL)
    half = c.half_integer_certificate()
    det = spanning_tree_count(half.outcome.superbase.graph) if half and half.planar_found else None
    for result in c.searches.values():
        collected.keep(result)
    got = (t[:5], counts.T[1:3], rho, c.N, c.outcome, c.slope_window, det)
    want = ((2, 2, 1, 1, 1), (3, 5), (3, 2, 2), 19, INTERVAL_D, [18, 19], 37)
    return got == want, f"t={got[0]} T1,T2={got[1]} rho={got[2]} N={got[3]} {got[4]} {got[5]} det={got[6]}"


def check_sharp_family(collected):
    rows = []
    ok = True
    for n in range(1, 6):
        rho = (3,) * n + (2, 2)
        N = n_invariant(rho)
        L = build_half_integer_lattice(rho, N)
        witness_run = run_slope(build_integer_lattice(rho, N - 1), FULL)
        witness = list(witness_run.outcome.superbase.vectors) if witness_run.outcome.found else None
        half = collected.keep(run_slope(L, FULL, witness=witness))
        good = (L.slope == 9 * n + Fraction(19, 2) and half.planar_found
                and genus_slope_bound(rho) == N)
        ok &= good
        rows.append(f"n={n}:{'ok' if good else 'FAIL'}")
    return ok, " ".join(rows)


def check_five_two(collected):
    c = classify_rho((5, 2), FULL)
    for result in c.searches.values():
        collected.keep(result)
    return (c.N, c.outcome, c.slope_window) == (32, INTERVAL_D, [31, 32]), (
        f"N={c.N} {c.outcome} {c.slope_window}")


def small_changemakers(max_rank, max_norm):
    """Changemaker vectors of length 2..max_rank and norm <= max_norm."""
    out = []

    def grow(s, total, nrm):
        if len(s) >= 2:
            out.append(tuple(s))
        if len(s) == max_rank:
            return
        for x in range(s[-1], total + 2):
            if nrm + x * x <= max_norm:
                grow(s + [x], total + x, nrm + x * x)

    grow([1], 1, 1)
    return out


def check_oracle(collected, max_rank=5, max_norm=20):
    mismatches = []
    sigmas = small_changemakers(max_rank, max_norm)
    for sigma in sigmas:
        L = lattice_from_sigma(sigma)
        ours = search_integer(L, FULL).status == FOUND
        theirs = find_superbase(L) is not None
        if ours != theirs:
            mismatches.append(sigma)
    return not mismatches, f"{len(sigmas)} lattices, mismatches {mismatches}"


def random_changemaker(rng, max_rank=5, max_entry=6):
    r = rng.randint(2, max_rank)
    sigma = [1]
    while len(sigma) < r:
        hi = min(sum(sigma) + 1, max_entry)
        sigma.append(rng.randint(sigma[-1], max(hi, sigma[-1])))
    assert is_changemaker(sigma)
    return tuple(sigma)


def certificate_invariants(result):
    """Matrix-Tree count, Goeritz determinant and discriminant agree; the vectors validate."""
    L = result.lattice
    B = validate_superbase(L, result.outcome.superbase.vectors)
    return spanning_tree_count(B.graph) == goeritz_determinant(B) == L.discriminant


def check_invariants(collected, samples=500, seed=20240611):
    bad_certs = [r.lattice.to_json() for r in collected.found if not certificate_invariants(r)]
    rng = random.Random(seed)
    obstructed_found = []
    genus_violations = []
    for _ in range(samples):
        sigma = random_changemaker(rng)
        L = lattice_from_sigma(sigma)
        found = search_integer(L, FULL).status == FOUND
        if found and pre_obstructions(sigma):
            obstructed_found.append(sigma)
        if found and sigma[-1] >= 3 and not genus_inequality_check(sigma, L.n):
            genus_violations.append(sigma)
    ok = not (bad_certs or obstructed_found or genus_violations)
    return ok, (f"{len(collected.found)} certificates (bad {bad_certs}); {samples} random sigma: "
                f"obstructed-but-found {obstructed_found}, inequality violations {genus_violations}")


CRITERIA = [
    ("1 single-slope census rows", check_single_slope_rows),
    ("2 asymmetric L-space knot rows", check_two_slope_rows),
    ("3 lattices without superbases", check_no_superbase_families),
    ("4 pretzel pipeline", check_pretzel),
    ("5 sharp genus bound family", check_sharp_family),
    ("6 stable coefficients (5,2)", check_five_two),
    ("7 oracle equivalence", check_oracle),
    ("8 invariant sweeps", check_invariants),
]


def run_all():
    """Run every criterion in order; the invariant sweep sees all earlier certificates."""
    collected = Collected()
    results = []
    for name, check in CRITERIA:
        ok, detail = check(collected)
        results.append((name, ok, detail))
    return results
