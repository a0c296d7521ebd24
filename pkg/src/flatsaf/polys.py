"""Dense univariate polynomials over the integers and the rationals.

Polynomials are tuples of coefficients in increasing degree order,
``(a0, a1, ..., an)``, with no trailing zeros; ``()`` is the zero polynomial.
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p):
    return len(p) - 1


def add(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p, q):
    return add(p, neg(q))


def neg(p):
    return tuple(-c for c in p)


def scale(p, c):
    return trim([c * a for a in p])


def mul(p, q):
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def shift(p, k):
    """Multiply by x**k."""
    return tuple([0] * k + list(p)) if p else ()


def divmod_poly(p, q):
    """Euclidean division over the rationals."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = [Fraction(c) for c in p]
    lead = Fraction(q[-1])
    quo = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    while len(p) >= len(q) and p:
        c = p[-1] / lead
        k = len(p) - len(q)
        quo[k] = c
        for i, b in enumerate(q):
            p[k + i] -= c * b
        p = list(trim(p))
    return trim(quo), trim(p)


def exact_div_int(p, q):
    """Divide integer polynomials known to divide exactly (q monic or +-1 leading)."""
    quo, rem = divmod_poly(p, q)
    if rem:
        raise ArithmeticError("inexact polynomial division")
    return tuple(int(c) for c in quo)


def monic(p):
    lead = Fraction(p[-1])
    return tuple(Fraction(c) / lead for c in p)


def gcd_poly(p, q):
    p, q = trim(p), trim(q)
    while q:
        p, q = q, divmod_poly(p, q)[1]
    return monic(p) if p else ()


def xgcd_poly(p, q):
    """Return (g, s, t) with s*p + t*q = g monic."""
    r0, r1 = trim(Fraction(c) for c in p), trim(Fraction(c) for c in q)
    s0, s1 = (Fraction(1),), ()
    t0, t1 = (), (Fraction(1),)
    while r1:
        quo, rem = divmod_poly(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, sub(s0, mul(quo, s1))
        t0, t1 = t1, sub(t0, mul(quo, t1))
    lead = r0[-1]
    return monic(r0), scale(s0, 1 / lead), scale(t0, 1 / lead)


def derivative(p):
    return trim([i * p[i] for i in range(1, len(p))])


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def compose(p, q):
    """p(q(x))."""
    acc = ()
    for c in reversed(p):
        acc = add(mul(acc, q), (c,) if c else ())
    return acc


def squarefree_part(p):
    g = gcd_poly(p, derivative(p))
    if degree(g) <= 0:
        return monic(p)
    return monic(divmod_poly(p, g)[0])


def to_str(p, var="x"):
    if not p:
        return "0"
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    head_sign, head = terms[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def content_primitive(p):
    """Scale a rational polynomial to a primitive integer polynomial with positive lead."""
    den = 1
    for c in p:
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return tuple(ints)


def charpoly(matrix):
    """Characteristic polynomial det(xI - M) by the Faddeev-LeVerrier recursion."""
    n = len(matrix)
    M = [[Fraction(v) for v in row] for row in matrix]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk <- M*(Mk + c_{n-k+1} I)
        prev = [row[:] for row in Mk]
        for i in range(n):
            prev[i][i] += coeffs[n - k + 1]
        Mk = [[sum(M[i][t] * prev[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(Mk[i][i] for i in range(n)) / k
    return tuple(coeffs)


@lru_cache(maxsize=None)
def cyclotomic(n):
    """Integer coefficients of the n-th cyclotomic polynomial."""
    p = tuple([-1] + [0] * (n - 1) + [1])
    for d in range(1, n):
        if n % d == 0:
            p = exact_div_int(p, cyclotomic(d))
    return p


@lru_cache(maxsize=None)
def two_cos_multiple(k):
    """E_k with 2cos(k t) = E_k(2cos t); E_0 = 2, E_1 = x."""
    k = abs(k)
    if k == 0:
        return (2,)
    if k == 1:
        return (0, 1)
    return sub(shift(two_cos_multiple(k - 1), 1), two_cos_multiple(k - 2))


@lru_cache(maxsize=None)
def sine_ratio(k):
    """S_k with sin(k t)/sin(t) = S_k(2cos t); S_0 = 0, S_1 = 1, S_{-k} = -S_k."""
    if k < 0:
        return neg(sine_ratio(-k))
    if k == 0:
        return ()
    if k == 1:
        return (1,)
    return sub(shift(sine_ratio(k - 1), 1), sine_ratio(k - 2))
