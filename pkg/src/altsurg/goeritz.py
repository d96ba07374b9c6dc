"""Planarity of superbase graphs, Goeritz matrices and alternating diagram data.

Rotation systems list, for every vertex, the darts leaving it in
counterclockwise order.  A dart is a pair (edge id, source vertex).
"""

from dataclasses import dataclass

import networkx as nx

from .errors import IndexOutOfRange, NotPlanar
from .lattice import bareiss_det, gram_matrix


@dataclass(frozen=True)
class PlanarEmbedding:
    vertex_count: int
    edges: tuple  # edge id -> (u, v) with u < v, parallel edges kept distinct
    rotation: tuple  # vertex -> tuple of edge ids, counterclockwise

    def faces(self):
        return trace_faces(self)

    @property
    def face_count(self):
        return len(self.faces())

    def euler_ok(self):
        return self.vertex_count - len(self.edges) + self.face_count == 2

    def to_json(self):
        return {str(v): list(rot) for v, rot in enumerate(self.rotation)}


def _other(edges, e, v):
    a, b = edges[e]
    return b if v == a else a


def _successor(emb):
    """Map each dart (e, v) to the next dart counterclockwise at v."""
    nxt = {}
    for v, rot in enumerate(emb.rotation):
        k = len(rot)
        for i, e in enumerate(rot):
            nxt[(e, v)] = (rot[(i + 1) % k], v)
    return nxt


def trace_faces(emb):
    """Faces as lists of darts; a dart (e, v) runs from v to its other end."""
    nxt = _successor(emb)
    seen = set()
    faces = []
    for start in nxt:
        if start in seen:
            continue
        face = []
        d = start
        while d not in seen:
            seen.add(d)
            face.append(d)
            e, v = d
            w = _other(emb.edges, e, v)
            # turn at w: the dart after the reversed one
            d = nxt[(e, w)]
        faces.append(face)
    return faces


def planarity(G):
    """A planar embedding of the superbase graph, or None when none exists."""
    n = G.vertex_count
    simple = nx.Graph()
    simple.add_nodes_from(range(n))
    for i, j, _ in G.edges():
        simple.add_edge(i, j)
    planar, cert = nx.check_planarity(simple)
    if not planar:
        return None
    edges = []
    ids = {}
    for i, j, mult in G.edges():
        ids[(i, j)] = list(range(len(edges), len(edges) + mult))
        edges.extend([(i, j)] * mult)
    rotation = []
    for v in range(n):
        # networkx reports clockwise order; reverse it for counterclockwise
        order = list(cert.neighbors_cw_order(v))[::-1] if simple.degree(v) else []
        rot = []
        for w in order:
            if v < w:
                rot.extend(ids[(v, w)])
            else:
                # parallel edges nest, so the far end sees them reversed
                rot.extend(reversed(ids[(w, v)]))
        rotation.append(tuple(rot))
    emb = PlanarEmbedding(n, tuple(edges), tuple(rotation))
    if not emb.euler_ok():
        raise AssertionError("embedding failed the Euler characteristic check")
    return emb


def default_drop(B):
    degrees = [B.graph.degree(i) for i in range(B.graph.vertex_count)]
    return max(range(len(degrees)), key=lambda i: (degrees[i], -i))


def goeritz_matrix(B, drop=None):
    """Gram matrix of all superbase vectors but one (max degree by default)."""
    n = len(B.vectors)
    if drop is None:
        drop = default_drop(B)
    if not 0 <= drop < n:
        raise IndexOutOfRange(f"vertex {drop} outside 0..{n - 1}")
    kept = [v for i, v in enumerate(B.vectors) if i != drop]
    return gram_matrix(kept)


def laplacian(G):
    n = G.vertex_count
    return [[G.degree(i) if i == j else -G.multiplicity[i][j] for j in range(n)] for i in range(n)]


def spanning_tree_count(G):
    """Reduced Laplacian determinant."""
    lap = laplacian(G)
    return bareiss_det([row[1:] for row in lap[1:]])


@dataclass
class AlternatingDiagramData:
    embedding: PlanarEmbedding
    multiplicities: list
    pd_crossings: list
    determinant: int

    @property
    def crossing_count(self):
        return len(self.pd_crossings)

    def to_json(self):
        return {
            "white_graph": {
                "vertices": self.embedding.vertex_count,
                "edges": [list(e) for e in self.multiplicities],
                "rotation": self.embedding.to_json(),
            },
            "pd_crossings": [list(x) for x in self.pd_crossings],
            "crossing_count": self.crossing_count,
            "determinant": self.determinant,
        }


def medial_pd(emb):
    """Planar-diagram code of the alternating diagram with white graph ``emb``.

    Each edge becomes a crossing.  Around the crossing on the dart d (from the
    lower endpoint) and its reverse d', the four diagram arcs are the corners
    (d, next d), (prev d, d), (d', next d'), (prev d', d') at the endpoints.
    The strand through the two (prev, dart) corners passes over; every
    crossing therefore has the same incidence with the shading.
    """
    nxt = _successor(emb)
    prv = {b: a for a, b in nxt.items()}
    edges = emb.edges

    def reverse(d):
        e, v = d
        return (e, _other(edges, e, v))

    def corner(d, kind):
        # kind 1: corner (d, next d); kind 2: corner (prev d, d)
        return (d, nxt[d]) if kind == 1 else (prv[d], d)

    def move(d, kind):
        """Leave a crossing through position (d, kind); return the entry position
        at the next crossing."""
        if kind == 1:
            return nxt[d], 2
        return prv[d], 1

    labels = {}
    entry_under = {}
    counter = 0
    for e in range(len(edges)):
        for start in (((e, edges[e][0]), 1), ((e, edges[e][0]), 2)):
            if corner(*start) in labels:
                continue
            # walk a component, starting by leaving through ``start``
            pos = start
            while corner(*pos) not in labels:
                counter += 1
                labels[corner(*pos)] = counter
                d, kind = move(*pos)
                if kind == 1:
                    entry_under.setdefault(d[0], (d, kind))
                pos = (reverse(d), kind)
    pd = []
    for e, (a, b) in enumerate(edges):
        d = (e, a)
        dr = reverse(d)
        nw, sw, se, ne = corner(d, 1), corner(d, 2), corner(dr, 1), corner(dr, 2)
        entered, _ = entry_under[e]
        if entered == d:
            pd.append((labels[nw], labels[sw], labels[se], labels[ne]))
        else:
            pd.append((labels[se], labels[ne], labels[nw], labels[sw]))
    return pd


def pd_components(pd):
    """Number of link components of a PD code."""
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, c, d in pd:
        parent[find(a)] = find(c)
        parent[find(b)] = find(d)
    return len({find(x) for x in parent})


def emit_branching_set(emb, B):
    if emb is None:
        raise NotPlanar("superbase graph is not planar")
    return AlternatingDiagramData(
        embedding=emb,
        multiplicities=[list(e) for e in B.graph.edges()],
        pd_crossings=medial_pd(emb),
        determinant=spanning_tree_count(B.graph),
    )


def goeritz_determinant(B, drop=None):
    return bareiss_det(goeritz_matrix(B, drop))
