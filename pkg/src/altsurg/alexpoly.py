"""Symmetrized Alexander polynomials, torsion coefficients and their counts.

A polynomial a_0 + sum_i a_i (x^i + x^-i) is stored by its half-coefficient
list (a_0, ..., a_g).
"""

from dataclasses import dataclass
from numbers import Integral

from .errors import (
    AsymmetricPolynomial,
    CoefficientOverflow,
    EmptyInput,
    NormalizationError,
    NotLSpaceForm,
)

INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class AlexanderPolynomial:
    coeffs: tuple

    @property
    def genus_degree(self):
        return len(self.coeffs) - 1

    def full_coefficients(self):
        """Coefficients of x^-g, ..., x^g."""
        return tuple(reversed(self.coeffs[1:])) + self.coeffs


@dataclass(frozen=True)
class TorsionProfile:
    t: tuple  # t_0, ..., t_g with t_g = 0

    @property
    def g(self):
        return len(self.t) - 1


@dataclass(frozen=True)
class TorsionCounts:
    T: tuple  # T_0 = 0, T_1, ..., T_{t_0}

    @property
    def t0(self):
        return len(self.T) - 1


def _check_entries(raw):
    for a in raw:
        if isinstance(a, bool) or not isinstance(a, Integral):
            raise TypeError(f"coefficients must be integers, got {a!r}")
        if abs(a) > INT64_MAX:
            raise CoefficientOverflow(f"coefficient {a} exceeds the 64-bit limit")


def parse_polynomial(raw):
    """Validate coefficients written from the top degree down: [a_g, ..., a_1, a_0].

    This is how the polynomial reads off t^g - t^(g-1) + ...; leading zeros
    are dropped.  A value of -1 at x = 1 is fixed by negating; anything other
    than +-1 is rejected.
    """
    raw = list(raw)
    if not raw:
        raise EmptyInput("empty coefficient list")
    _check_entries(raw)
    return from_half_coefficients(raw[::-1])


def from_half_coefficients(coeffs):
    """Validate a half-coefficient list in ascending order (a_0, ..., a_g)."""
    coeffs = list(coeffs)
    if not coeffs:
        raise EmptyInput("empty coefficient list")
    _check_entries(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    value = coeffs[0] + 2 * sum(coeffs[1:])
    if value == -1:
        coeffs = [-a for a in coeffs]
    elif value != 1:
        raise NormalizationError(f"Delta(1) = {value}, expected 1")
    return AlexanderPolynomial(tuple(int(a) for a in coeffs))


def parse_laurent(raw):
    """Fold a full symmetric coefficient list (x^-g .. x^g) and parse it."""
    raw = list(raw)
    if not raw:
        raise EmptyInput("empty coefficient list")
    _check_entries(raw)
    if len(raw) % 2 == 0 or raw != raw[::-1]:
        raise AsymmetricPolynomial("Laurent coefficients are not symmetric")
    return from_half_coefficients(raw[len(raw) // 2:])


def torsion_coefficients(p):
    a = p.coeffs
    g = len(a) - 1
    t = []
    for i in range(g + 1):
        t.append(sum(j * a[i + j] for j in range(1, g - i + 1)))
    return TorsionProfile(tuple(t))


def is_lspace_form(profile):
    t = profile.t
    g = len(t) - 1
    if any(x < 0 for x in t):
        return False
    for i in range(g):
        if not (t[i + 1] + 1 >= t[i] >= t[i + 1]):
            return False
    if g >= 1 and t[g - 1] != 1:
        return False
    return True


def torsion_counts(profile):
    if not is_lspace_form(profile):
        raise NotLSpaceForm("torsion coefficients are not of L-space form")
    t = profile.t
    g = len(t) - 1
    t0 = t[0]
    return TorsionCounts(tuple(sum(1 for i in range(g) if 0 < t[i] <= k) for k in range(t0 + 1)))


def profile_from_counts(counts):
    """Recover t_0, ..., t_g from the counts of an L-space-form profile."""
    T = counts.T
    g = T[-1]
    t = [0] * (g + 1)
    # the T_k - T_{k-1} largest indices below g carry the value k
    i = g
    for k in range(1, len(T)):
        for _ in range(T[k] - T[k - 1]):
            i -= 1
            t[i] = k
    return TorsionProfile(tuple(t))


def polynomial_from_profile(profile):
    """Invert the torsion sum: a_i = t_{i-1} - 2 t_i + t_{i+1} for i >= 1."""
    t = list(profile.t) + [0]
    g = len(profile.t) - 1
    coeffs = [0] * (g + 1)
    for i in range(1, g + 1):
        coeffs[i] = t[i - 1] - 2 * t[i] + t[i + 1]
    coeffs[0] = 1 - 2 * sum(coeffs[1:])
    return from_half_coefficients(coeffs)
