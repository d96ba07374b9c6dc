"""Changemaker vectors, stable coefficients and changemaker lattices."""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .alexpoly import TorsionCounts
from .errors import (
    EmptyStableCoefficients,
    InvalidSlope,
    NotChangemaker,
    OutOfRange,
    SlopeTooSmall,
)

INTEGER = "integer"
HALF_INTEGER = "half-integer"


def is_changemaker(sigma):
    sigma = tuple(sigma)
    if not sigma or sigma[0] != 1:
        return False
    total = 1
    for prev, s in zip(sigma, sigma[1:]):
        if not prev <= s <= 1 + total:
            return False
        total += s
    return True


def subset_representation(sigma, k, T):
    """Lexicographically maximal A in {1..k} (1-based) whose entries sum to T.

    Taking the largest index that still fits, from k downwards, always
    succeeds for a changemaker prefix.
    """
    sigma = tuple(sigma)
    if not 0 <= T <= sum(sigma[:k]):
        raise OutOfRange(f"T={T} outside [0, {sum(sigma[:k])}]")
    A = []
    remaining = T
    for i in range(k, 0, -1):
        if sigma[i - 1] <= remaining:
            A.append(i)
            remaining -= sigma[i - 1]
    if remaining:
        raise NotChangemaker("greedy representation failed; sigma is not a changemaker prefix")
    return frozenset(A)


def all_subset_representations(sigma, k, T):
    """Every subset of {1..k} (1-based) whose entries sum to T."""
    sigma = tuple(sigma)
    out = []

    def walk(i, remaining, chosen):
        if remaining == 0:
            out.append(frozenset(chosen))
            return
        if i == 0:
            return
        if sum(sigma[:i]) < remaining:
            return
        if sigma[i - 1] <= remaining:
            walk(i - 1, remaining - sigma[i - 1], chosen + [i])
        walk(i - 1, remaining, chosen)

    walk(k, T, [])
    return out


# ---------------------------------------------------------------------------
# stable coefficients

def canonical_rho(rho):
    rho = tuple(int(x) for x in rho)
    if any(x < 2 for x in rho):
        raise ValueError(f"stable coefficients must all be at least 2: {rho}")
    return tuple(sorted(rho, reverse=True))


def genus(rho):
    return sum(x * (x - 1) for x in rho) // 2


def _best_pairing(weights, budget):
    """max alpha . weights over alpha >= 0 with sum alpha_i(alpha_i+1) = budget.

    ``weights`` is decreasing.  Returns None when no alpha meets the budget
    exactly (only possible for an empty weight list and nonzero budget).
    """
    weights = tuple(weights)

    @lru_cache(maxsize=None)
    def best(i, b):
        if b == 0:
            return 0
        if i == len(weights):
            return None
        result = None
        a = 0
        while a * (a + 1) <= b:
            rest = best(i + 1, b - a * (a + 1))
            if rest is not None:
                value = a * weights[i] + rest
                if result is None or value > result:
                    result = value
            a += 1
        return result

    return best(0, budget)


def max_alpha_pairing(weights, k):
    """Largest pairing over S_k for a weight tuple with no trailing ones."""
    return _best_pairing(tuple(sorted(weights, reverse=True)), 2 * k)


def _max_with_ones(rho, k):
    # every unit of budget 2 spent on a trailing one is worth exactly 1
    rho = tuple(sorted(rho, reverse=True))
    best = None
    for spent in range(0, 2 * k + 1, 2):
        v = _best_pairing(rho, spent)
        if v is not None:
            v += (2 * k - spent) // 2
            if best is None or v > best:
                best = v
    return best


def expected_counts(rho):
    """Counts T_0..T_{t_0} forced by stable coefficients rho.

    Returns (TorsionCounts, g, t0).
    """
    rho = canonical_rho(rho)
    if not rho:
        raise EmptyStableCoefficients("expected_counts needs nonempty rho")
    g = genus(rho)
    T = [0]
    k = 1
    while True:
        value = _max_with_ones(rho, k)
        if value >= g:
            T.append(g)
            break
        T.append(value)
        k += 1
    return TorsionCounts(tuple(T)), g, k


def stable_coefficients(counts, g, t0):
    """Extract stable coefficients from torsion counts, or None.

    Candidates are re-checked by regenerating the counts they force.
    """
    T = counts.T
    if len(T) != t0 + 1 or T[0] != 0 or T[-1] != g:
        return None
    if g == 0:
        return ()
    s = []
    k = 1
    # k = t0 is included: all-threes coefficients need that last step
    while k <= t0 and T[k] - T[k - 1] > 2:
        M = _best_pairing(tuple(s), 2 * k) if s else None
        if M is None:
            M = 0
        if M > T[k]:
            return None
        if M < T[k]:
            s.append(T[k] - T[k - 1])
        k += 1
    d = g - sum(x * (x - 1) for x in s) // 2
    if d < 0:
        return None
    rho = tuple(s) + (2,) * d
    if any(x < 2 for x in rho) or list(rho) != sorted(rho, reverse=True):
        return None
    regenerated, g2, t02 = expected_counts(rho)
    if regenerated.T != tuple(T) or g2 != g or t02 != t0:
        return None
    return rho


def n_invariant(rho):
    """sum rho_i^2 + max_k (rho_k - sum_{i>k} rho_i), rho decreasing."""
    rho = canonical_rho(rho)
    if not rho:
        raise EmptyStableCoefficients("N is undefined for empty stable coefficients")
    tail = 0
    best = None
    for x in reversed(rho):
        term = x - tail
        best = term if best is None else max(best, term)
        tail += x
    return sum(x * x for x in rho) + best


# ---------------------------------------------------------------------------
# lattices

@dataclass(frozen=True)
class ChangemakerLattice:
    """Orthogonal complement of a changemaker vector, or of the pair
    e_{-1} - e_0, e_0 + sigma for the half-integer flavor.

    For the half-integer flavor ``n`` is such that the slope is n - 1/2,
    the inner vector has norm n - 1, and ambient coordinates are ordered
    (e_{-1}, e_0, e_1, ..., e_r).
    """

    flavor: str
    n: int
    sigma: tuple

    @property
    def r(self):
        return len(self.sigma)

    @property
    def ambient_rank(self):
        return self.r if self.flavor == INTEGER else self.r + 2

    @property
    def rank(self):
        return self.r - 1 if self.flavor == INTEGER else self.r

    @property
    def discriminant(self):
        return self.n if self.flavor == INTEGER else 2 * self.n - 1

    @property
    def slope(self):
        return Fraction(self.n) if self.flavor == INTEGER else Fraction(2 * self.n - 1, 2)

    @property
    def defining_vectors(self):
        if self.flavor == INTEGER:
            return (tuple(self.sigma),)
        return ((1, -1) + (0,) * self.r, (0, 1) + tuple(self.sigma))

    def contains(self, coords):
        coords = tuple(coords)
        if len(coords) != self.ambient_rank:
            return False
        return all(sum(a * b for a, b in zip(d, coords)) == 0 for d in self.defining_vectors)

    def to_json(self):
        return {
            "flavor": self.flavor,
            "sigma": list(self.sigma),
            "ambient_rank": self.ambient_rank,
            "defining_vectors": [list(v) for v in self.defining_vectors],
        }


def sigma_for(rho, n):
    """Changemaker vector (1,...,1, rho reversed) of norm n."""
    rho = canonical_rho(rho)
    ones = n - sum(x * x for x in rho)
    if ones < 1:
        raise SlopeTooSmall(f"norm {n} leaves no room for a leading one")
    return (1,) * ones + tuple(reversed(rho))


def lattice_from_sigma(sigma):
    sigma = tuple(sigma)
    if not is_changemaker(sigma):
        raise NotChangemaker(f"{sigma} is not a changemaker vector")
    return ChangemakerLattice(INTEGER, sum(s * s for s in sigma), sigma)


def half_integer_from_sigma(sigma):
    """Lattice of slope ||sigma|| + 1/2 built on the inner vector sigma."""
    sigma = tuple(sigma)
    if not is_changemaker(sigma):
        raise NotChangemaker(f"{sigma} is not a changemaker vector")
    return ChangemakerLattice(HALF_INTEGER, sum(s * s for s in sigma) + 1, sigma)


def build_integer_lattice(rho, n):
    rho = canonical_rho(rho)
    if rho:
        N = n_invariant(rho)
        if n < N - 1:
            raise SlopeTooSmall(f"n={n} is below N-1={N - 1}")
    sigma = sigma_for(rho, n)
    if not is_changemaker(sigma):
        raise SlopeTooSmall(f"{sigma} is not a changemaker vector")
    return ChangemakerLattice(INTEGER, n, sigma)


def build_half_integer_lattice(rho, n):
    """Half-integer lattice for slope n - 1/2."""
    rho = canonical_rho(rho)
    if rho:
        N = n_invariant(rho)
        if n < N:
            raise SlopeTooSmall(f"slope {n} - 1/2 is below N - 1/2 = {N} - 1/2")
    sigma = sigma_for(rho, n - 1)
    if not is_changemaker(sigma):
        raise SlopeTooSmall(f"{sigma} is not a changemaker vector")
    return ChangemakerLattice(HALF_INTEGER, n, sigma)


def is_tight_at(sigma, k):
    """Whether sigma_k (1-based, k >= 2) is tight."""
    return k >= 2 and sigma[k - 1] == 1 + sum(sigma[:k - 1])


def standard_basis(sigma):
    """Vectors v^(2), ..., v^(r) as integer tuples."""
    sigma = tuple(sigma)
    r = len(sigma)
    basis = []
    for k in range(2, r + 1):
        v = [0] * r
        v[k - 1] = -1
        if is_tight_at(sigma, k):
            for i in range(2, k):
                v[i - 1] = 1
            v[0] = 2
        else:
            for i in subset_representation(sigma, k - 1, sigma[k - 1]):
                v[i - 1] = 1
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class ChangemakerFlags:
    tight: bool
    very_slack: bool
    m: int


def classify_flags(sigma):
    sigma = tuple(sigma)
    r = len(sigma)
    tight = any(is_tight_at(sigma, k) for k in range(2, r + 1))
    m = next((i + 1 for i, s in enumerate(sigma) if s >= 2), r + 1)
    slack = [sigma[k - 1] <= sum(sigma[:k - 1]) - 1 for k in range(2, r + 1) if sigma[k - 1] > 1]
    very_slack = bool(slack) and all(slack)
    return ChangemakerFlags(tight, very_slack, m)


def continued_fraction(p, q):
    """Expansion p/q = a_0 - 1/(a_1 - 1/(...)) with a_0 >= 1 and a_i >= 2."""
    if q < 1 or p <= 0:
        raise InvalidSlope(f"{p}/{q} is not a positive slope")
    out = []
    while True:
        a = -(-p // q)  # ceiling
        out.append(a)
        p, q = q, a * q - p
        if q == 0:
            return out
