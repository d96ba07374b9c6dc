"""End-to-end classification of the alternating surgery slopes of a knot."""

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .alexpoly import is_lspace_form, torsion_coefficients, torsion_counts
from .changemaker import (
    build_half_integer_lattice,
    build_integer_lattice,
    canonical_rho,
    genus,
    n_invariant,
    stable_coefficients,
)
from .errors import EmptyStableCoefficients, SearchSpaceOverflow
from .goeritz import emit_branching_set, planarity, spanning_tree_count
from .osb_search import (
    DEFAULT_CAP_NODES,
    DEFAULT_CAP_VECTORS,
    FOUND,
    FULL,
    NONE,
    column_sums_at_most_four,
    pre_obstructions,
    search_half_integer,
    search_integer,
)

SCHEMA_VERSION = 1

UNKNOT_FORM = "UnknotForm"
NO_STABLE = "NoStableCoefficients"
OBSTRUCTED = "Obstructed"
AT_MOST_ONE = "AtMostOne"
AT_MOST_TWO = "AtMostTwo"
INTERVAL_D = "CandidateIntervalD"
COUNTEREXAMPLE = "CounterexampleFlag"

CAVEAT_HOMEOMORPHISM = (
    "A planar obtuse superbase only permits a slope; realising it needs a homeomorphism "
    "check between the surgery and a double branched cover, which requires 3-manifold software.")
CAVEAT_KNOT_IN_D = (
    "The interval outcome assumes the knot arises from an unknotting crossing of the emitted "
    "alternating diagram; this is not verified here.")
CAVEAT_NON_INTEGER = (
    "Only the window [N-1, N+1] is reported; finiteness of non-integer slopes when another knot "
    "shares the Alexander polynomial is not decided.")
CAVEAT_TWO_STRANDED = (
    "Stable coefficients of two-stranded torus knot form: only T(2,2g+1) has them, and its "
    "alternating slopes fill [N-1, N+1]; a planar superbase at N+1 is expected here, not a flag.")


def genus_slope_bound(rho):
    """4g + 3 for all-twos stable coefficients, otherwise 3g + 4."""
    rho = canonical_rho(rho)
    if not rho:
        raise EmptyStableCoefficients("the bound needs nonempty stable coefficients")
    g = genus(rho)
    return 4 * g + 3 if all(x == 2 for x in rho) else 3 * g + 4


def slope_text(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def content_hash(payload):
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class SlopeResult:
    """A search outcome together with planarity data."""

    outcome: object
    embedding: object = None

    @property
    def lattice(self):
        return self.outcome.lattice

    @property
    def planar_found(self):
        return self.outcome.status == FOUND and self.embedding is not None


def run_slope(L, mode=FULL, cap_vectors=DEFAULT_CAP_VECTORS, cap_nodes=DEFAULT_CAP_NODES,
              witness=None):
    if L.flavor == "integer":
        out = search_integer(L, mode, cap_vectors=cap_vectors, cap_nodes=cap_nodes)
    else:
        use_cap = witness is not None and column_sums_at_most_four(witness)
        out = search_half_integer(L, mode, witness=witness, use_column_cap=use_cap,
                                  cap_vectors=cap_vectors, cap_nodes=cap_nodes)
    emb = planarity(out.superbase.graph) if out.status == FOUND else None
    return SlopeResult(out, emb)


def certificate(result, timings=True):
    """SuperbaseCertificate JSON for a search, with version and content hash.

    ``timings=False`` drops wall-clock fields so that reports are reproducible
    byte for byte.
    """
    out = result.outcome
    L = out.lattice
    body = {
        "slope": slope_text(L.slope),
        "lattice": L.to_json(),
        "mode": out.mode,
        "status": out.status,
        "vectors": [list(v) for v in out.superbase.vectors] if out.superbase else [],
        "planar": result.embedding is not None,
        "embedding": result.embedding.to_json() if result.embedding else None,
        "exhaustion": None,
    }
    if out.exhaustion is not None:
        record = out.exhaustion.to_json()
        if not timings:
            record.pop("seconds", None)
        body["exhaustion"] = record
    if out.superbase is not None:
        body["determinant"] = spanning_tree_count(out.superbase.graph)
    body["tool_version"] = __version__
    body["content_hash"] = content_hash(body)
    return body


@dataclass
class Classification:
    outcome: str
    input: dict
    rho: tuple = None
    N: int = None
    genus: int = None
    unknot_form: bool = False
    slope_window: list = field(default_factory=list)
    searches: dict = field(default_factory=dict)  # slope text -> SlopeResult
    reason: str = None
    pre_obstructions: dict = field(default_factory=dict)
    caveats: list = field(default_factory=list)

    def half_integer_certificate(self):
        for result in self.searches.values():
            if result.lattice.flavor != "integer":
                return result
        return None


def classify(p, mode=FULL, cap_vectors=DEFAULT_CAP_VECTORS, cap_nodes=DEFAULT_CAP_NODES):
    """Classify from a validated Alexander polynomial."""
    source = {"alexander": list(reversed(p.coeffs))}
    if p.genus_degree == 0:
        return Classification(UNKNOT_FORM, source, rho=(), genus=0, unknot_form=True,
                              reason="constant polynomial")
    profile = torsion_coefficients(p)
    if not is_lspace_form(profile):
        return Classification(NO_STABLE, source, genus=p.genus_degree,
                              reason="torsion coefficients are not of L-space form")
    counts = torsion_counts(profile)
    rho = stable_coefficients(counts, p.genus_degree, counts.t0)
    if rho is None:
        return Classification(NO_STABLE, source, genus=p.genus_degree,
                              reason="no stable coefficients reproduce the torsion counts")
    return classify_rho(rho, mode, cap_vectors, cap_nodes, source=source)


def classify_rho(rho, mode=FULL, cap_vectors=DEFAULT_CAP_VECTORS, cap_nodes=DEFAULT_CAP_NODES,
                 source=None):
    """Classify from stable coefficients directly."""
    rho = canonical_rho(rho)
    source = source or {"rho": list(rho)}
    if not rho:
        return Classification(UNKNOT_FORM, source, rho=(), genus=0, unknot_form=True,
                              reason="empty stable coefficients")
    N = n_invariant(rho)
    c = Classification(None, source, rho=rho, N=N, genus=genus(rho))
    c.caveats.append(CAVEAT_NON_INTEGER)
    two_stranded = all(x == 2 for x in rho)
    if two_stranded:
        c.caveats.append(CAVEAT_TWO_STRANDED)

    def run(L, witness=None):
        try:
            result = run_slope(L, mode, cap_vectors, cap_nodes, witness)
        except SearchSpaceOverflow as exc:
            exc.partial = {"classification": c, "slope": slope_text(L.slope), "search": exc.partial}
            raise
        c.searches[slope_text(L.slope)] = result
        return result

    for n in (N - 1, N):
        reason = pre_obstructions(build_integer_lattice(rho, n).sigma)
        if reason:
            c.pre_obstructions[str(n)] = reason

    above = run(build_integer_lattice(rho, N + 1))
    if above.planar_found and not two_stranded:
        c.outcome = COUNTEREXAMPLE
        c.slope_window = [N - 1, N + 1]
        c.reason = f"L_{N + 1} admits a planar obtuse superbase"
        return c
    low = run(build_integer_lattice(rho, N - 1))
    mid = run(build_integer_lattice(rho, N))
    if low.planar_found and mid.planar_found:
        witness = [v for v in low.outcome.superbase.vectors]
        half = run(build_half_integer_lattice(rho, N), witness=witness)
        if half.planar_found:
            c.outcome = INTERVAL_D
            c.slope_window = [N - 1, N]
            c.reason = f"L_{N - 1}, L_{N} and the half-integer lattice at {N}-1/2 admit planar superbases"
            c.caveats.insert(0, CAVEAT_KNOT_IN_D)
        else:
            c.outcome = AT_MOST_TWO
            c.slope_window = [N - 1, N]
            c.reason = f"the half-integer lattice at {N}-1/2 has no planar superbase"
        c.caveats.insert(0, CAVEAT_HOMEOMORPHISM)
    elif low.planar_found or mid.planar_found:
        c.outcome = AT_MOST_ONE
        n = N - 1 if low.planar_found else N
        c.slope_window = [n]
        c.reason = f"only L_{n} admits a planar obtuse superbase; L_{2 * N - 1 - n} is excluded"
        c.caveats.insert(0, CAVEAT_HOMEOMORPHISM)
    else:
        c.outcome = OBSTRUCTED
        c.slope_window = []
        fired = ", ".join(f"L_{k}: {v}" for k, v in c.pre_obstructions.items())
        c.reason = "no integer lattice in the window admits a planar obtuse superbase" + (
            f" (formula obstructions {fired})" if fired else "")
    return c


def report_json(c, mirror=False):
    """Classification JSON; wall-clock fields are left out so reports reproduce."""
    sign = -1 if mirror else 1
    certs = []
    for result in c.searches.values():
        cert = certificate(result, timings=False)
        if result.planar_found:
            cert["diagram"] = emit_branching_set(result.embedding, result.outcome.superbase).to_json()
        certs.append(cert)
    window = [sign * s for s in c.slope_window]
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "input": c.input,
        "mirror": mirror,
        "rho": list(c.rho) if c.rho is not None else None,
        "N": c.N,
        "genus": c.genus,
        "genus_slope_bound": genus_slope_bound(c.rho) if c.rho else None,
        "unknot_form": c.unknot_form,
        "outcome": c.outcome,
        "reason": c.reason,
        "slope_window": sorted(window),
        "pre_obstructions": c.pre_obstructions,
        "certificates": certs,
        "caveats": list(c.caveats),
    }


def report_text(c, mirror=False):
    data = report_json(c, mirror)
    lines = [f"outcome: {c.outcome}"]
    if c.rho is not None:
        lines.append(f"rho={list(c.rho)} g={c.genus} N={c.N}"
                     + (f" genus bound={data['genus_slope_bound']}" if c.rho else ""))
    if c.reason:
        lines.append(f"reason: {c.reason}")
    if c.outcome in (AT_MOST_ONE, AT_MOST_TWO, INTERVAL_D, COUNTEREXAMPLE):
        lines.append("slope window: " + ", ".join(str(s) for s in data["slope_window"]))
    for cert in data["certificates"]:
        line = f"  slope {cert['slope']}: {cert['status']}"
        if cert["status"] == FOUND:
            line += f", planar={cert['planar']}, det={cert['determinant']}"
        elif cert["status"] == NONE:
            ex = cert["exhaustion"]
            line += f" (exhausted: {ex['v_irred']} candidates, {ex['subsets_examined']} nodes)"
        lines.append(line)
    if c.outcome == AT_MOST_ONE:
        lines.append("  the other integer slope in the window has no planar obtuse superbase")
    for note in data["caveats"]:
        lines.append(f"note: {note}")
    return "\n".join(lines)
