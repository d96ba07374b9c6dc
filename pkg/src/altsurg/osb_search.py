"""Obtuse superbase search for integer and half-integer changemaker lattices.

The integer search fixes the norm-two vectors e_i - e_{i+1} inside blocks of
equal coefficients, enumerates short candidate vectors coordinate by
coordinate, discards candidates shown reducible by a pairing test, and then
looks for the remaining vectors as a clique of pairwise obtuse candidates.
The half-integer search does the same inside the inner integer lattice with
the vector -e_1 + e_0 + e_{-1} fixed.
"""

import time
from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from .changemaker import (
    HALF_INTEGER,
    INTEGER,
    all_subset_representations,
    classify_flags,
    is_tight_at,
    lattice_from_sigma,
    subset_representation,
)
from .errors import PrerequisiteMissing, PreconditionViolation, SearchSpaceOverflow
from .lattice import bareiss_det, gram_matrix, validate_superbase

ALGORITHM_VERSION = "osb-search/1"

QUICK = "quick"
FULL = "full"

FOUND = "found"
NONE = "none"
INCONCLUSIVE = "inconclusive"

SIGMA_M_TOO_SMALL = "SigmaMTooSmall"
LONG_RUN = "LongRun"

DEFAULT_CAP_VECTORS = 5_000_000
DEFAULT_CAP_NODES = 1_000_000_000


# ---------------------------------------------------------------------------
# formula-level obstructions

def pre_obstructions(sigma):
    """Cheap reasons why no obtuse superbase can exist, or None."""
    sigma = tuple(sigma)
    r = len(sigma)
    m = classify_flags(sigma).m
    if m <= r and sigma[m - 1] < m - 2:
        return SIGMA_M_TOO_SMALL
    b = 1
    while b <= r:
        e = b
        while e < r and sigma[e] == sigma[b - 1]:
            e += 1
        length = e - b + 1
        value = sigma[b - 1]
        if b > 1 and length >= 4:
            for k in range(e + 1, r + 1):
                if value < sigma[k - 1] < (length - 1) * value:
                    return LONG_RUN
        b = e + 1
    return None


def genus_inequality_check(sigma, n):
    """n <= 4 + (3/2) sum sigma_i(sigma_i - 1), for sigma with top entry >= 3."""
    sigma = tuple(sigma)
    if not sigma or sigma[-1] < 3:
        raise PreconditionViolation("the inequality needs a coefficient of at least 3")
    return 2 * n <= 8 + 3 * sum(s * (s - 1) for s in sigma)


# ---------------------------------------------------------------------------
# coordinate bounds

CAUCHY_SCHWARZ = "CauchySchwarz"
IRRED_BOUND = "IrredBound"
SIGMA_M = "SigmaM"
HALF_INT_COL_SUM = "HalfIntColSum"
QUICK_BOX = "QuickBox"


@dataclass(frozen=True)
class CoordinateBounds:
    bounds: tuple
    provenance: tuple

    def to_json(self):
        return [{"bound": b, "rule": p} for b, p in zip(self.bounds, self.provenance)]


def _irreducible_bounds(sigma, limit):
    """Static bounds on irreducible vectors of sigma-perp, starting from
    per-index limits ``limit`` (each entry a (bound, rule) pair)."""
    sigma = tuple(sigma)
    r = len(sigma)
    flags = classify_flags(sigma)
    out = []
    for k in range(1, r + 1):
        s = sigma[k - 1]
        cands = [limit[k - 1]]
        if s == 1:
            cands.append((2 if flags.tight else 1, IRRED_BOUND))
        elif is_tight_at(sigma, k):
            cands.append((5 + sum(b + 1 for b, _ in out), IRRED_BOUND))
        else:
            A = subset_representation(sigma, k - 1, s)
            cands.append((sum(out[i - 1][0] + 1 for i in A), IRRED_BOUND))
        if k == flags.m:
            cands.append((s, SIGMA_M))
        out.append(min(cands, key=lambda c: c[0]))
    return out


def coordinate_bounds(L, quick=False):
    """Per-coordinate bounds for irreducible superbase vectors of an integer lattice."""
    if L.flavor != INTEGER:
        raise PreconditionViolation("coordinate_bounds needs an integer lattice")
    limit = [(isqrt(L.n - s * s), CAUCHY_SCHWARZ) for s in L.sigma]
    out = _irreducible_bounds(L.sigma, limit)
    if quick:
        out = [(b, p) if b <= 2 else (2, QUICK_BOX) for b, p in out]
    return CoordinateBounds(tuple(b for b, _ in out), tuple(p for _, p in out))


def column_sums_at_most_four(vectors, offset=0):
    """Whether every coordinate column of ``vectors`` has absolute sum <= 4."""
    width = len(vectors[0]) - offset
    return all(sum(abs(v[offset + k]) for v in vectors) <= 4 for k in range(width))


def half_integer_bounds(L, witness=None, use_column_cap=False, quick=False):
    """Bounds on the inner-lattice coordinates of superbase vectors lying in
    the inner lattice.

    Superbase vectors have norm at most the discriminant D = 2n - 1, which
    with sigma . z = 0 gives z_k^2 ||sigma|| <= D (||sigma|| - sigma_k^2).
    """
    if L.flavor != HALF_INTEGER:
        raise PreconditionViolation("half_integer_bounds needs a half-integer lattice")
    sigma = L.sigma
    inner = L.n - 1
    D = L.discriminant
    limit = [(isqrt(D * (inner - s * s) // inner), CAUCHY_SCHWARZ) for s in sigma]
    out = _irreducible_bounds(sigma, limit)
    if use_column_cap:
        if witness is None or not column_sums_at_most_four(witness):
            raise PrerequisiteMissing(
                "the column-sum cap needs an inner-lattice superbase with column sums at most 4")
        out = [(b, p) if b <= 2 else (2, HALF_INT_COL_SUM) for b, p in out]
    if quick:
        out = [(b, p) if b <= 2 else (2, QUICK_BOX) for b, p in out]
    return CoordinateBounds(tuple(b for b, _ in out), tuple(p for _, p in out))


# ---------------------------------------------------------------------------
# candidate enumeration

@dataclass
class _Counter:
    nodes: int = 0
    cap: int = DEFAULT_CAP_NODES

    def tick(self, amount=1):
        self.nodes += amount
        if self.nodes > self.cap:
            raise SearchSpaceOverflow(f"node cap {self.cap} exceeded", partial={"nodes": self.nodes})


def _probe_vectors(sigma):
    """Short lattice vectors -e_j + sum_A e_i for every representation A,
    grouped by their largest support index (0-based)."""
    r = len(sigma)
    by_depth = [[] for _ in range(r)]
    for j in range(2, r + 1):
        reps = all_subset_representations(sigma, j - 1, sigma[j - 1])
        if is_tight_at(sigma, j):
            coeffs = {j - 1: -1, 0: 2}
            for i in range(2, j):
                coeffs[i - 1] = 1
            by_depth[j - 1].append(coeffs)
        for A in reps:
            coeffs = {j - 1: -1}
            for i in A:
                coeffs[i - 1] = 1
            by_depth[j - 1].append(coeffs)
    out = []
    for depth in by_depth:
        entries = []
        for coeffs in depth:
            idx = tuple(sorted(coeffs))
            c = tuple(coeffs[i] for i in idx)
            entries.append((idx, c, sum(x * x for x in c)))
            entries.append((idx, tuple(-x for x in c), sum(x * x for x in c)))
        out.append(entries)
    return out


def _enumerate(sigma, bounds, norm_cap, *, chain=(), dynamic=False, probes=None,
               first_range=None, counter=None, cap_vectors=DEFAULT_CAP_VECTORS):
    """All nonzero z with sigma . z = 0, |z_k| <= bounds[k], ||z|| <= norm_cap.

    ``chain`` lists 0-based indices k with z_k in {z_{k-1}, z_{k-1} + 1}.
    ``dynamic`` applies the irreducibility bounds computed from the actual
    earlier coordinates.  ``probes`` are lattice vectors w supported on a
    prefix; an irreducible z other than w has z . w < ||w||.
    """
    sigma = tuple(sigma)
    r = len(sigma)
    counter = counter or _Counter()
    chain = set(chain)
    suffix_reach = [0] * (r + 1)
    suffix_sq = [0] * (r + 1)
    for k in range(r - 1, -1, -1):
        suffix_reach[k] = suffix_reach[k + 1] + sigma[k] * bounds[k]
        suffix_sq[k] = suffix_sq[k + 1] + sigma[k] * sigma[k]
    flags = classify_flags(sigma)
    reps = []
    tight = []
    for k in range(1, r + 1):
        tight.append(is_tight_at(sigma, k))
        if sigma[k - 1] > 1 and not tight[-1] and dynamic:
            reps.append([tuple(i - 1 for i in A)
                         for A in all_subset_representations(sigma, k - 1, sigma[k - 1])])
        else:
            reps.append(None)
    probes = probes or [[] for _ in range(r)]
    out = []
    z = [0] * r

    def dynamic_bound(k):
        b = bounds[k]
        if not dynamic:
            return b
        if tight[k]:
            return min(b, 5 + sum(abs(z[i]) + 1 for i in range(k)))
        if reps[k] is not None:
            for A in reps[k]:
                b = min(b, sum(abs(z[i]) + 1 for i in A))
        return b

    def passes_probes(k):
        for idx, c, w_norm in probes[k]:
            dot = 0
            same = True
            for i, ci in zip(idx, c):
                dot += z[i] * ci
            if dot >= w_norm:
                if dot > w_norm:
                    return False
                for i in range(k + 1):
                    if z[i] != 0 and i not in idx:
                        same = False
                        break
                if same and any(z[i] != ci for i, ci in zip(idx, c)):
                    same = False
                if not same:
                    return False
        return True

    def values(k):
        b = dynamic_bound(k)
        lo, hi = -b, b
        if k == 0 and first_range is not None:
            lo, hi = max(lo, first_range[0]), min(hi, first_range[1])
        if k in chain:
            lo, hi = max(lo, z[k - 1]), min(hi, z[k - 1] + 1)
        return lo, hi

    def walk(k, s, nrm):
        counter.tick()
        if k == r - 1:
            if s % sigma[k]:
                return
            v = -s // sigma[k]
            lo, hi = values(k)
            if not lo <= v <= hi or nrm + v * v > norm_cap:
                return
            z[k] = v
            if nrm + v * v == 0 or not passes_probes(k):
                z[k] = 0
                return
            out.append(tuple(z))
            z[k] = 0
            if len(out) > cap_vectors:
                raise SearchSpaceOverflow(f"vector cap {cap_vectors} exceeded",
                                          partial={"vectors": len(out), "nodes": counter.nodes})
            return
        lo, hi = values(k)
        reach = suffix_reach[k + 1]
        q = suffix_sq[k + 1]
        for v in range(lo, hi + 1):
            s2 = s + sigma[k] * v
            if abs(s2) > reach:
                continue
            n2 = nrm + v * v
            if n2 * q + s2 * s2 > norm_cap * q:
                continue
            z[k] = v
            if probes[k] and not passes_probes(k):
                continue
            walk(k + 1, s2, n2)
        z[k] = 0

    if r == 1:
        return []
    walk(0, 0, 0)
    return out


def enumerate_v_bound(L, bounds, cap_vectors=DEFAULT_CAP_VECTORS):
    """All nonzero lattice vectors of an integer lattice within the bounds."""
    if L.flavor != INTEGER:
        raise PreconditionViolation("enumerate_v_bound works on the integer flavor")
    b = bounds.bounds if isinstance(bounds, CoordinateBounds) else tuple(bounds)
    big = sum(x * x for x in b)
    return _enumerate(L.sigma, b, big, cap_vectors=cap_vectors)


def norm_two_chain(sigma, upto=None):
    """Vectors e_i - e_{i+1} with sigma_i = sigma_{i+1} (0-based i < upto)."""
    r = len(sigma)
    out = []
    for i in range(r - 1):
        if upto is not None and i + 1 >= upto:
            break
        if sigma[i] == sigma[i + 1]:
            v = [0] * r
            v[i], v[i + 1] = 1, -1
            out.append(tuple(v))
    return out


def _reducible_mask(cands, probes):
    """Mask of candidates v with v . w >= ||w|| for some probe w != v."""
    if not cands:
        return np.zeros(0, dtype=bool)
    C = np.asarray(cands, dtype=np.int64)
    P = np.asarray(probes, dtype=np.int64)
    pnorm = (P * P).sum(axis=1)
    bad = np.zeros(len(C), dtype=bool)
    chunk = max(1, 4_000_000 // max(1, len(P)))
    for start in range(0, len(C), chunk):
        block = C[start:start + chunk]
        G = block @ P.T
        hit = G >= pnorm[None, :]
        # a vector never reduces itself
        same = (block[:, None, :] == P[None, :, :]).all(axis=2) if len(P) * len(block) <= 2_000_000 \
            else None
        if same is None:
            for i, row in enumerate(block):
                js = np.nonzero(hit[i])[0]
                bad[start + i] = any(not np.array_equal(P[j], row) for j in js)
        else:
            bad[start:start + len(block)] = (hit & ~same).any(axis=1)
    return bad


def filter_v_irred(v_bound, v2):
    """Keep vectors passing the pairwise reducibility test against v_bound
    and pairing 0 or -1 with every norm-two chain vector."""
    v2 = [tuple(v) for v in v2]
    v2set = set(v2)
    if not v_bound:
        return []
    bad = _reducible_mask(v_bound, v_bound)
    out = []
    for v, reducible in zip(v_bound, bad):
        if reducible:
            continue
        v = tuple(v)
        if v in v2set or all(sum(a * b for a, b in zip(v, w)) in (0, -1) for w in v2):
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# subset search

def _bits(mask_array):
    packed = np.packbits(mask_array.astype(np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _subset_search(L, fixed, cands, need, counter):
    """Find ``need`` candidates which with ``fixed`` and minus their total form
    an obtuse superbase of L.  Returns the vector list or None."""
    disc = L.discriminant
    nc = len(cands)
    fixed = [tuple(v) for v in fixed]
    if need == 0:
        return _close(L, fixed, disc)
    if nc < need:
        return None
    C = np.asarray(cands, dtype=np.int64)
    pc = C @ C.T
    cnorm = np.diag(pc).copy()
    F = np.asarray(fixed, dtype=np.int64).reshape(len(fixed), L.ambient_rank)
    pf = F @ C.T if fixed else np.zeros((0, nc), dtype=np.int64)
    fixed_caps = []
    for i, f in enumerate(fixed):
        cap = sum(x * x for x in f) + sum(
            sum(a * b for a, b in zip(f, g)) for j, g in enumerate(fixed) if j != i)
        fixed_caps.append(cap)
    if any(c < 0 for c in fixed_caps):
        return None
    # candidates obtuse to every fixed vector
    base = np.ones(nc, dtype=bool)
    for i in range(len(fixed)):
        base &= pf[i] >= -fixed_caps[i]
        base &= pf[i] <= 0
    start_cap = cnorm + pf.sum(axis=0)
    base &= start_cap >= 0
    base_mask = _bits(base)
    compat = [_bits(pc[i] <= 0) for i in range(nc)]
    above = [(~((1 << (i + 1)) - 1)) for i in range(nc)]
    cap_masks = {}

    def cap_mask(kind, i, t):
        key = (kind, i, t)
        m = cap_masks.get(key)
        if m is None:
            row = pf[i] if kind == "f" else pc[i]
            m = _bits(row >= -t)
            cap_masks[key] = m
        return m

    pc_list = pc.tolist()
    pf_list = pf.tolist()
    start_cap_list = start_cap.tolist()
    chosen = []
    chosen_caps = []
    fcaps = list(fixed_caps)

    def rec(mask, left):
        counter.tick()
        if left == 0:
            vs = fixed + [tuple(int(x) for x in cands[i]) for i in chosen]
            return _close(L, vs, disc)
        for t, f_cap in enumerate(fcaps):
            mask &= cap_mask("f", t, f_cap)
        for i, c_cap in zip(chosen, chosen_caps):
            mask &= cap_mask("c", i, c_cap)
        while mask:
            if bin(mask).count("1") < left:
                return None
            low = mask & -mask
            j = low.bit_length() - 1
            mask ^= low
            row = pc_list[j]
            own = start_cap_list[j] + sum(row[i] for i in chosen)
            if own < 0:
                continue
            saved_f = list(fcaps)
            saved_c = list(chosen_caps)
            for t in range(len(fcaps)):
                fcaps[t] += pf_list[t][j]
            for pos, i in enumerate(chosen):
                chosen_caps[pos] += row[i]
            chosen.append(j)
            chosen_caps.append(own)
            found = rec(mask & compat[j] & above[j], left - 1)
            chosen.pop()
            chosen_caps.pop()
            fcaps[:] = saved_f
            chosen_caps[:] = saved_c
            if found is not None:
                return found
        return None

    return rec(base_mask, need)


def _close(L, vectors, disc):
    """Append minus the total and accept if the result is a superbase."""
    last = tuple(-sum(col) for col in zip(*vectors))
    if not any(last) or sum(x * x for x in last) > disc:
        return None
    if any(sum(a * b for a, b in zip(last, v)) > 0 for v in vectors):
        return None
    if bareiss_det(gram_matrix(vectors)) != disc:
        return None
    return list(vectors) + [last]


# ---------------------------------------------------------------------------
# results

@dataclass
class ExhaustionRecord:
    bounds: CoordinateBounds
    v_bound: int
    v_irred: int
    subsets: int
    seconds: float
    version: str = ALGORITHM_VERSION
    notes: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "bounds": self.bounds.to_json(),
            "v_bound": self.v_bound,
            "v_irred": self.v_irred,
            "subsets_examined": self.subsets,
            "seconds": round(self.seconds, 3),
            "version": self.version,
            **({"notes": self.notes} if self.notes else {}),
        }


@dataclass
class SearchOutcome:
    status: str
    mode: str
    lattice: object
    superbase: object = None
    exhaustion: ExhaustionRecord = None
    stats: dict = field(default_factory=dict)

    @property
    def found(self):
        return self.status == FOUND


def _cycle_superbase(L):
    r = L.r
    vs = []
    for i in range(r):
        v = [0] * r
        v[i] = 1
        v[(i + 1) % r] -= 1
        vs.append(tuple(v))
    return vs


def _integer_pass(L, bounds, counter, cap_vectors, stats):
    sigma = L.sigma
    r = len(sigma)
    v2 = norm_two_chain(sigma)
    chain = [i + 1 for i in range(r - 1) if sigma[i] == sigma[i + 1]]
    probes = _probe_vectors(sigma)
    cands = _enumerate(sigma, bounds.bounds, L.n, chain=chain, dynamic=True, probes=probes,
                       counter=counter, cap_vectors=cap_vectors)
    stats["v_bound"] = len(cands) + len(v2)
    v2set = set(v2)
    pool = [c for c in cands if c not in v2set]
    if pool:
        bad = _reducible_mask(pool, pool + v2)
        pool = [c for c, b in zip(pool, bad) if not b]
    stats["v_irred"] = len(pool) + len(v2)
    pool.sort(key=lambda v: (sum(x * x for x in v), v))
    before = counter.nodes
    result = _subset_search(L, v2, pool, r - 1 - len(v2), counter)
    stats["subsets"] = counter.nodes - before
    return result


def search_integer(L, mode=FULL, cap_vectors=DEFAULT_CAP_VECTORS, cap_nodes=DEFAULT_CAP_NODES):
    """Decide whether an integer changemaker lattice has an obtuse superbase."""
    if L.flavor != INTEGER:
        raise PreconditionViolation("search_integer needs an integer lattice")
    t0 = time.perf_counter()
    if L.r == 1:
        raise PreconditionViolation("the lattice has rank zero")
    if L.sigma[-1] < 2:
        B = validate_superbase(L, _cycle_superbase(L))
        return SearchOutcome(FOUND, mode, L, B)
    counter = _Counter(cap=cap_nodes)
    quick_stats = {}
    found = _integer_pass(L, coordinate_bounds(L, quick=True), counter, cap_vectors, quick_stats)
    if found is not None:
        return SearchOutcome(FOUND, mode, L, validate_superbase(L, found),
                             stats={"quick": quick_stats, "seconds": time.perf_counter() - t0})
    if mode == QUICK:
        return SearchOutcome(INCONCLUSIVE, mode, L, stats={"quick": quick_stats})
    bounds = coordinate_bounds(L)
    stats = {}
    found = _integer_pass(L, bounds, counter, cap_vectors, stats)
    elapsed = time.perf_counter() - t0
    if found is not None:
        return SearchOutcome(FOUND, mode, L, validate_superbase(L, found),
                             stats={"quick": quick_stats, **stats, "seconds": elapsed})
    record = ExhaustionRecord(bounds, stats["v_bound"], stats["v_irred"], stats["subsets"], elapsed)
    return SearchOutcome(NONE, mode, L, exhaustion=record, stats={"quick": quick_stats, **stats})


def _embed(v):
    return (0, 0) + tuple(v)


def _half_pass(L, bounds, counter, cap_vectors, stats):
    sigma = L.sigma
    r = len(sigma)
    m = classify_flags(sigma).m
    forced = norm_two_chain(sigma, upto=m - 1)
    chain = [i for i in range(1, m - 1)]
    probes = _probe_vectors(sigma)
    cands = _enumerate(sigma, bounds.bounds, L.discriminant, chain=chain, dynamic=True,
                       probes=probes, first_range=(0, 2), counter=counter, cap_vectors=cap_vectors)
    stats["v_bound"] = len(cands) + len(forced)
    fset = set(forced)
    pool = [c for c in cands if c not in fset]
    if pool:
        bad = _reducible_mask(pool, pool + forced)
        pool = [c for c, b in zip(pool, bad) if not b]
    stats["v_irred"] = len(pool) + len(forced)
    pool.sort(key=lambda v: (sum(x * x for x in v), v))
    v0 = (1, 1, -1) + (0,) * (r - 1)
    fixed = [v0] + [_embed(v) for v in forced]
    before = counter.nodes
    result = _subset_search(L, fixed, [_embed(v) for v in pool], r - 1 - len(forced), counter)
    stats["subsets"] = counter.nodes - before
    return result


def search_half_integer(L, mode=FULL, witness=None, use_column_cap=False,
                        cap_vectors=DEFAULT_CAP_VECTORS, cap_nodes=DEFAULT_CAP_NODES):
    """Decide whether a half-integer changemaker lattice has an obtuse superbase.

    ``witness`` is a superbase of the inner integer lattice (as inner
    coordinates); with ``use_column_cap`` and column sums at most 4 it caps
    every candidate coordinate at 2.
    """
    if L.flavor != HALF_INTEGER:
        raise PreconditionViolation("search_half_integer needs a half-integer lattice")
    if use_column_cap and (witness is None or not column_sums_at_most_four(witness)):
        raise PrerequisiteMissing(
            "the column-sum cap needs an inner-lattice superbase with column sums at most 4")
    t0 = time.perf_counter()
    counter = _Counter(cap=cap_nodes)
    quick_stats = {}
    quick_bounds = half_integer_bounds(L, quick=True)
    found = _half_pass(L, quick_bounds, counter, cap_vectors, quick_stats)
    if found is not None:
        return SearchOutcome(FOUND, mode, L, validate_superbase(L, found),
                             stats={"quick": quick_stats, "seconds": time.perf_counter() - t0})
    if mode == QUICK:
        return SearchOutcome(INCONCLUSIVE, mode, L, stats={"quick": quick_stats})
    bounds = half_integer_bounds(L, witness=witness, use_column_cap=use_column_cap)
    stats = {}
    found = _half_pass(L, bounds, counter, cap_vectors, stats)
    elapsed = time.perf_counter() - t0
    if found is not None:
        return SearchOutcome(FOUND, mode, L, validate_superbase(L, found),
                             stats={"quick": quick_stats, **stats, "seconds": elapsed})
    notes = {"column_cap": True} if use_column_cap else {}
    record = ExhaustionRecord(bounds, stats["v_bound"], stats["v_irred"], stats["subsets"], elapsed,
                              notes=notes)
    return SearchOutcome(NONE, mode, L, exhaustion=record, stats={"quick": quick_stats, **stats})


def inner_lattice(L):
    """The integer lattice sigma-perp inside a half-integer lattice."""
    return lattice_from_sigma(L.sigma)
