"""Exact matrix algebra for the triangle groups G_{m,n} of signature (m, n, oo).

The group is generated by

    A = [[1, 2cos(pi/m) + 2cos(pi/n)], [0, 1]]
    B = [[2cos(pi/m), 1], [-1, 0]]
    C = [[-2cos(pi/n), 1], [-1, 0]]

with C = A B.  Matrices live in SL_2 of the ambient field L_N, N = lcm(m, n);
projective questions (the Moebius action, classification) are answered with
the sign ambiguity in mind.
"""

import re
from dataclasses import dataclass, field as dc_field
from math import gcd

from .field import (DomainError, NotASquare, build_field, contains, cos_value, sign_at,
                    sqrt_in_field, subfield_closure, two_cos)


class ClassificationError(ValueError):
    pass


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "oo"

    __str__ = __repr__


INFINITY = _Infinity()


@dataclass(frozen=True)
class TriangleGroupSpec:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 3 or self.n < 3:
            raise ValueError(f"triangle group indices must be >= 3, got ({self.m}, {self.n})")

    @property
    def gamma(self):
        return gcd(self.m, self.n)

    @property
    def N(self):
        return self.m * self.n // self.gamma

    @property
    def field(self):
        return build_field(self.N)


# -- words ----------------------------------------------------------------------

def normalize_word(word):
    out = []
    for letter, e in word:
        if e == 0:
            continue
        if out and out[-1][0] == letter:
            e += out.pop()[1]
            if e == 0:
                continue
        out.append((letter, e))
    return tuple(out)


def format_word(word):
    if not word:
        return "1"
    return " ".join(f"{g}^{e}" if e != 1 else g for g, e in word)


def parse_word(text):
    compact = "".join(text.split())
    if compact == "1":
        return ()
    if not re.fullmatch(r"(?:[ABC](?:\^-?\d+)?)*", compact):
        raise ValueError(f"malformed word {text!r}")
    word = [(g, int(e) if e else 1) for g, e in re.findall(r"([ABC])(?:\^(-?\d+))?", compact)]
    return normalize_word(word)


# -- matrices -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupElement:
    """A 2x2 matrix [[a, b], [c, d]] over L_N, optionally carrying its word in A, B, C."""

    a: object
    b: object
    c: object
    d: object
    word: tuple = dc_field(default=None)

    @property
    def field(self):
        return self.a.field

    @classmethod
    def identity(cls, field):
        return cls(field.one(), field.zero(), field.zero(), field.one(), ())

    def __matmul__(self, other):
        w = None
        if self.word is not None and other.word is not None:
            w = normalize_word(self.word + other.word)
        return GroupElement(self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
                            self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d, w)

    __mul__ = __matmul__

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def inverse(self):
        det = self.det()
        w = None if self.word is None else tuple((g, -e) for g, e in reversed(self.word))
        if det == 1:
            return GroupElement(self.d, -self.b, -self.c, self.a, w)
        return GroupElement(self.d / det, -self.b / det, -self.c / det, self.a / det, w)

    def __pow__(self, k):
        result = GroupElement.identity(self.field)
        if self.word is None:
            result = GroupElement(result.a, result.b, result.c, result.d, None)
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        return hash(self.entries())

    def projectively_equal(self, other):
        return self == other or self.entries() == tuple(-x for x in other.entries())

    def is_identity(self):
        one, zero = self.field.one(), self.field.zero()
        return self.b == zero and self.c == zero and (
            (self.a == one and self.d == one) or (self.a == -one and self.d == -one))

    def with_word(self, word):
        return GroupElement(self.a, self.b, self.c, self.d, normalize_word(word))

    def __repr__(self):
        w = f", word={format_word(self.word)!r}" if self.word is not None else ""
        return f"GroupElement([[{self.a}, {self.b}], [{self.c}, {self.d}]]{w})"


def generators(spec):
    """The generators (A, B, C) of G_{m,n}; C = A B exactly."""
    L = spec.field
    lm, ln = cos_value(L, spec.m), cos_value(L, spec.n)
    one, zero = L.one(), L.zero()
    A = GroupElement(one, lm + ln, zero, one, (("A", 1),))
    B = GroupElement(lm, one, -one, zero, (("B", 1),))
    C = GroupElement(-ln, one, -one, zero, (("C", 1),))
    return A, B, C


def evaluate_word(word, spec):
    A, B, C = generators(spec)
    gens = {"A": A, "B": B, "C": C}
    result = GroupElement.identity(spec.field)
    for g, e in normalize_word(word):
        result = result @ (gens[g] ** e)
    return result.with_word(word)


def power_closed_form(which, k, spec):
    """B^k or C^k from the Chebyshev closed form (b_k = sin(k pi/m)/sin(pi/m))."""
    L = spec.field
    if which == "B":
        lam = cos_value(L, spec.m)
        s = _sine_ratios(lam, k)
        return GroupElement(s[k + 1], s[k], -s[k], -s[k - 1], (("B", k),) if k else ())
    if which == "C":
        lam = cos_value(L, spec.n)
        s = _sine_ratios(lam, k)
        sign = -1 if k % 2 else 1
        return GroupElement(sign * s[k + 1], -sign * s[k], sign * s[k], -sign * s[k - 1],
                            (("C", k),) if k else ())
    raise ValueError(f"closed form only for B or C, not {which!r}")


def _sine_ratios(lam, k):
    """Dict j -> sin(j t)/sin(t) for j in {k-1, k, k+1}, with lam = 2cos t."""
    L = lam.field
    top = abs(k) + 1
    vals = {0: L.zero(), 1: L.one()}
    for j in range(2, top + 1):
        vals[j] = lam * vals[j - 1] - vals[j - 2]
    for j in range(1, top + 1):
        vals[-j] = -vals[j]
    return vals


# -- projective line ------------------------------------------------------------

def moebius_apply(g, p):
    """Fractional linear action z -> (a z + b)/(c z + d) on P^1(L)."""
    if p is INFINITY:
        return INFINITY if g.c.is_zero() else g.a / g.c
    den = g.c * p + g.d
    if den.is_zero():
        return INFINITY
    return (g.a * p + g.b) / den


# -- classification -------------------------------------------------------------

def classify(g):
    """One of 'identity', 'elliptic', 'parabolic', 'hyperbolic'."""
    if g.is_identity():
        return "identity"
    t = g.trace()
    disc = t * t - 4
    s = sign_at(disc)
    if s == 0:
        return "parabolic"
    return "hyperbolic" if s > 0 else "elliptic"


@dataclass(frozen=True)
class QuadraticIrrational:
    """The pair (p +- sqrt(q))/r with p, q, r in L and q not a square in L."""

    p: object
    q: object
    r: object

    def to_float(self, sign=1):
        import math
        return (self.p.to_float() + sign * math.sqrt(self.q.to_float())) / self.r.to_float()


def fixed_points(g):
    """Fixed points of a hyperbolic element on P^1.

    Returns a pair of points of P^1(L) when tr^2 - 4 is a square in L, the
    '+' root first, otherwise a :class:`QuadraticIrrational`.
    """
    if classify(g) != "hyperbolic":
        raise ClassificationError("fixed_points requires a hyperbolic element")
    a, b, c, d = g.entries()
    if c.is_zero():
        return (INFINITY, b / (d - a))
    disc = (d - a) * (d - a) + 4 * b * c
    root = sqrt_in_field(disc)
    if root is NotASquare:
        return QuadraticIrrational(a - d, disc, 2 * c)
    return ((a - d + root) / (2 * c), (a - d - root) / (2 * c))


def is_special(g, trace_field):
    """Eigenvalues of ``g`` lie in ``trace_field``: sqrt(tr^2 - 4) exists there."""
    if classify(g) != "hyperbolic":
        raise ClassificationError("is_special requires a hyperbolic element")
    t = g.trace()
    root = sqrt_in_field(t * t - 4)
    return root is not NotASquare and contains(trace_field, root) and contains(trace_field, t)


def eigenvalues(g):
    """The eigenvalues (larger first, in absolute value at root #0) when they lie in L."""
    t = g.trace()
    root = sqrt_in_field(t * t - 4)
    if root is NotASquare:
        return None
    e1, e2 = (t + root) / 2, (t - root) / 2
    return (e1, e2) if abs(e1) >= abs(e2) else (e2, e1)


# -- fields attached to the group ----------------------------------------------

def trace_field(spec):
    L = spec.field
    return subfield_closure([cos_value(L, spec.m), cos_value(L, spec.n)], "trace_field")


def invariant_trace_field(spec):
    L = spec.field
    lm, ln = cos_value(L, spec.m), cos_value(L, spec.n)
    gens = [two_cos(L, 2, spec.m), two_cos(L, 2, spec.n), lm * ln]
    return subfield_closure(gens, "invariant_trace_field")


def is_obstructed_pair(m, n):
    """Trace field differs from invariant trace field: both even and (gcd = 2 or both cofactors odd)."""
    if m % 2 or n % 2:
        return False
    g = gcd(m, n)
    return g == 2 or ((m // g) % 2 == 1 and (n // g) % 2 == 1)


def parity(word, spec=None):
    """'even' or 'odd': total |exponent| of B and C letters mod 2."""
    if spec is not None and not is_obstructed_pair(spec.m, spec.n):
        raise DomainError(f"parity is only defined for obstructed pairs, not ({spec.m}, {spec.n})")
    total = sum(abs(e) for g, e in word if g in "BC")
    return "odd" if total % 2 else "even"


def sqrt_delta(spec):
    """sqrt(delta) = 2cos(pi/n) where delta = 2(cos(2pi/n) + 1)."""
    return cos_value(spec.field, spec.n)


def entry_pattern(g, spec, invariant=None):
    """'even', 'odd' or None according to which k_{m,n} / k_{m,n} sqrt(delta) template g fits."""
    k = invariant if invariant is not None else invariant_trace_field(spec)
    s = sqrt_delta(spec)
    inv_s = s.inverse()

    def plain(x):
        return contains(k, x)

    def twisted(x):
        return contains(k, x * inv_s)

    a, b, c, d = g.entries()
    if plain(a) and plain(d) and twisted(b) and twisted(c):
        return "even"
    if twisted(a) and twisted(d) and plain(b) and plain(c):
        return "odd"
    return None
