"""Integral lattice core: pairings, superbase validation, graphs and
irreducibility."""

from dataclasses import dataclass, field
from itertools import combinations

from .changemaker import HALF_INTEGER, INTEGER, standard_basis
from .errors import (
    CoordinateOutOfRange,
    NonzeroSum,
    NotSpanning,
    PositivePairing,
    RankMismatch,
    VectorNotInLattice,
)


def pairing(a, b):
    if len(a) != len(b):
        raise RankMismatch(f"ranks differ: {len(a)} vs {len(b)}")
    return sum(x * y for x, y in zip(a, b))


def norm(a):
    return sum(x * x for x in a)


def gram_matrix(vectors):
    return [[pairing(u, v) for v in vectors] for u in vectors]


def bareiss_det(matrix):
    """Exact determinant of a square integer matrix."""
    M = [list(row) for row in matrix]
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def hermite_rows(vectors):
    """Row-style Hermite normal form basis of the integer span of ``vectors``."""
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return []
    ncols = len(rows[0])
    basis = []
    col = 0
    while rows and col < ncols:
        nonzero = [r for r in rows if r[col] != 0]
        if not nonzero:
            col += 1
            continue
        rows = [r for r in rows if r[col] == 0]
        # Euclid on the pivot column
        while len(nonzero) > 1:
            nonzero.sort(key=lambda r: abs(r[col]))
            pivot = nonzero[0]
            rest = []
            for r in nonzero[1:]:
                q = r[col] // pivot[col]
                reduced = [a - q * b for a, b in zip(r, pivot)]
                if reduced[col] != 0:
                    rest.append(reduced)
                elif any(reduced):
                    rows.append(reduced)
            nonzero = [pivot] + rest
        pivot = nonzero[0]
        if pivot[col] < 0:
            pivot = [-a for a in pivot]
        for b in basis:
            q = b[col] // pivot[col]
            if q:
                b[:] = [x - q * y for x, y in zip(b, pivot)]
        basis.append(pivot)
        col += 1
    return [tuple(b) for b in basis]


def rank_of(vectors):
    return len(hermite_rows(vectors))


def lattice_basis(L):
    """A Z-basis of a changemaker lattice."""
    basis = standard_basis(L.sigma)
    if L.flavor == INTEGER:
        return [tuple(v) for v in basis]
    v0 = (1, 1, -1) + (0,) * (L.r - 1)
    return [v0] + [(0, 0) + tuple(v) for v in basis]


def discriminant(L):
    """Gram determinant of the standard basis."""
    return bareiss_det(gram_matrix(lattice_basis(L)))


def spans_lattice(L, vectors):
    rows = hermite_rows(vectors)
    if len(rows) != L.rank:
        return False
    return bareiss_det(gram_matrix(rows)) == L.discriminant


# ---------------------------------------------------------------------------
# superbases and their graphs

@dataclass(frozen=True)
class SuperbaseGraph:
    multiplicity: tuple  # symmetric matrix with zero diagonal

    @property
    def vertex_count(self):
        return len(self.multiplicity)

    def degree(self, i):
        return sum(self.multiplicity[i])

    def neighbours(self, i):
        return [j for j, e in enumerate(self.multiplicity[i]) if e and j != i]

    def edges(self):
        n = self.vertex_count
        return [(i, j, self.multiplicity[i][j]) for i in range(n) for j in range(i + 1, n)
                if self.multiplicity[i][j]]

    def edge_count(self):
        return sum(m for _, _, m in self.edges())


def graph_from_vectors(vectors):
    n = len(vectors)
    mult = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            e = -pairing(vectors[i], vectors[j])
            mult[i][j] = mult[j][i] = e
    return SuperbaseGraph(tuple(tuple(row) for row in mult))


def graph_from_edges(vertex_count, edges):
    """Multigraph from (i, j, multiplicity) triples."""
    mult = [[0] * vertex_count for _ in range(vertex_count)]
    for i, j, m in edges:
        mult[i][j] += m
        mult[j][i] += m
    return SuperbaseGraph(tuple(tuple(row) for row in mult))


@dataclass(frozen=True)
class ObtuseSuperbase:
    lattice: object
    vectors: tuple
    graph: SuperbaseGraph = field(compare=False)


def validate_superbase(L, vectors):
    vectors = [tuple(int(x) for x in v) for v in vectors]
    for v in vectors:
        if not L.contains(v):
            raise VectorNotInLattice(f"{v} is not in the lattice")
    total = [sum(col) for col in zip(*vectors)]
    if any(total):
        raise NonzeroSum(f"vectors sum to {total}")
    for i, j in combinations(range(len(vectors)), 2):
        if pairing(vectors[i], vectors[j]) > 0:
            raise PositivePairing(f"v_{i} . v_{j} = {pairing(vectors[i], vectors[j])} > 0")
    if len(vectors) != L.rank + 1 or not spans_lattice(L, vectors):
        raise NotSpanning("vectors do not span the lattice")
    return ObtuseSuperbase(L, tuple(vectors), graph_from_vectors(vectors))


def _connected(graph, subset):
    subset = set(subset)
    if not subset:
        return False
    start = next(iter(subset))
    seen = {start}
    stack = [start]
    while stack:
        i = stack.pop()
        for j in graph.neighbours(i):
            if j in subset and j not in seen:
                seen.add(j)
                stack.append(j)
    return seen == subset


def is_connected(graph):
    return _connected(graph, range(graph.vertex_count))


def superbase_irreducibles(B):
    """Sums over vertex sets R where R and its complement are connected."""
    vs = B.vectors
    n = len(vs)
    out = []
    seen = set()
    for size in range(1, n):
        for R in combinations(range(n), size):
            rest = [i for i in range(n) if i not in R]
            if _connected(B.graph, R) and _connected(B.graph, rest):
                z = tuple(sum(vs[i][k] for i in R) for k in range(len(vs[0])))
                if z not in seen:
                    seen.add(z)
                    out.append(z)
    return out


def is_two_connected(graph):
    """No cut vertex, by DFS low-link."""
    n = graph.vertex_count
    if n <= 2:
        return is_connected(graph)
    if not is_connected(graph):
        return False
    disc = [-1] * n
    low = [0] * n
    counter = [0]
    cut = [False]

    def dfs(u, parent):
        disc[u] = low[u] = counter[0]
        counter[0] += 1
        children = 0
        for w in graph.neighbours(u):
            if disc[w] == -1:
                children += 1
                dfs(w, u)
                low[u] = min(low[u], low[w])
                if parent != -1 and low[w] >= disc[u]:
                    cut[0] = True
            elif w != parent:
                low[u] = min(low[u], disc[w])
        if parent == -1 and children > 1:
            cut[0] = True

    dfs(0, -1)
    return not cut[0]


def is_irreducible_pm1(z, sigma):
    """Irreducibility test for vectors with entries in {-1, 0, 1}."""
    if any(x not in (-1, 0, 1) for x in z):
        raise CoordinateOutOfRange("entries must lie in {-1, 0, 1}")
    if len(z) != len(sigma):
        raise RankMismatch("vector and sigma differ in length")
    A = [sigma[i] for i, x in enumerate(z) if x == 1]
    B = [sigma[i] for i, x in enumerate(z) if x == -1]
    if not A or not B:
        # a one-signed vector splits into orthogonal pieces once it has two entries
        return len(A) + len(B) == 1

    def proper_sums(values):
        reach = 0  # bit s set when some nonempty subset sums to s
        for v in values:
            reach |= (reach << v) | (1 << v)
        return reach & ~(1 << sum(values))

    return not (proper_sums(A) & proper_sums(B))


INDECOMPOSABLE = "Indecomposable"
UNKNOWN = "Unknown"


def indecomposable_hint(sigma):
    """Connected standard-basis pairing graph proves indecomposability."""
    basis = standard_basis(sigma)
    if len(basis) <= 1:
        return INDECOMPOSABLE
    # nonzero pairings of either sign give edges
    return INDECOMPOSABLE if is_connected(graph_from_vectors(basis)) else UNKNOWN
