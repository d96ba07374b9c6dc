"""Definition-level superbase search used as a reference for small lattices.

Every vector of norm at most the discriminant is listed, and subsets are
grown while all pairings stay nonpositive.  Nothing beyond the definition
and the norm bound on superbase vectors is assumed.
"""

from itertools import product
from math import isqrt

import numpy as np

from .lattice import bareiss_det, gram_matrix


def short_vectors(L):
    """Nonzero lattice vectors of norm at most disc(L), shortest first."""
    disc = L.discriminant
    b = isqrt(disc)
    out = []
    for z in product(range(-b, b + 1), repeat=L.ambient_rank):
        if any(z) and sum(x * x for x in z) <= disc and L.contains(z):
            out.append(z)
    out.sort(key=lambda v: (sum(x * x for x in v), v))
    return out


def find_superbase(L):
    """An obtuse superbase of L as a vector list, or None."""
    vs = short_vectors(L)
    index = {v: i for i, v in enumerate(vs)}
    k = L.rank  # vectors chosen explicitly; the last is minus their sum
    disc = L.discriminant
    M = np.asarray(vs, dtype=np.int64).reshape(len(vs), L.ambient_rank)
    dots = (M @ M.T).tolist()

    def extend(chosen, start):
        if len(chosen) == k:
            total = [sum(vs[i][c] for i in chosen) for c in range(L.ambient_rank)]
            last = tuple(-x for x in total)
            j = index.get(last)
            # the omitted vector carries the largest index, so each superbase is seen once
            if j is None or j <= chosen[-1]:
                return None
            if any(dots[i][j] > 0 for i in chosen):
                return None
            basis = [vs[i] for i in chosen]
            if bareiss_det(gram_matrix(basis)) != disc:
                return None
            return basis + [last]
        for i in range(start, len(vs)):
            if all(dots[i][j] <= 0 for j in chosen):
                found = extend(chosen + [i], i + 1)
                if found is not None:
                    return found
        return None

    return extend([], 0)
