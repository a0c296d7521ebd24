"""Reduction of G_{m,n} modulo prime ideals and orbits on finite projective lines.

Entries of group elements are written in the monomial basis of the chosen
generators (lambda_m, lambda_n, or lambda_N alone) and each generator is sent
to an element of F_p[x]/(g).  Only reductions whose well-definedness is
checked here are offered.
"""

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

from sympy import isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_from_int_poly, gf_irreducible_p

from . import polys
from .field import DomainError, FieldError, build_field, cos_value
from .group import GroupElement, TriangleGroupSpec, generators


class UnsupportedReductionError(FieldError):
    pass


class _Infinity:
    def __repr__(self):
        return "oo"

    def __str__(self):
        return "∞"


INF = _Infinity()


# -- polynomials over F_p ---------------------------------------------------------

def _check_prime(p):
    if not isinstance(p, int) or p < 2 or not isprime(p):
        raise DomainError(f"{p} is not a prime")


def factor_mod_p(poly, p):
    """Irreducible factors of an integer polynomial (low-to-high coefficients) mod p.

    Returns (leading coefficient, [(factor, multiplicity), ...]) with monic
    factors given low-to-high with entries in 0..p-1.
    """
    _check_prime(p)
    coeffs = [int(Fraction(c)) for c in poly]
    if any(Fraction(c).denominator != 1 for c in poly):
        raise DomainError("factor_mod_p needs integer coefficients")
    hi = gf_from_int_poly(list(reversed(coeffs)), p)
    if not hi:
        raise DomainError("polynomial vanishes mod p")
    lc, factors = gf_factor(hi, p, ZZ)
    return int(lc), [([int(c) for c in reversed(f)], k) for f, k in factors]


def _mulmod(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def expand_factors(lc, factors, p):
    """Product of a factorization, low-to-high, for checking."""
    acc = [lc % p]
    for f, k in factors:
        for _ in range(k):
            acc = _mulmod(acc, f, p)
    while len(acc) > 1 and acc[-1] == 0:
        acc.pop()
    return acc


# -- finite fields ----------------------------------------------------------------

class FiniteField:
    """F_p[x]/(g) with g monic irreducible; elements are tuples of length f."""

    def __init__(self, p, g):
        _check_prime(p)
        g = [int(c) % p for c in g]
        if g[-1] != 1:
            raise DomainError("modulus must be monic")
        if not gf_irreducible_p(list(reversed(g)), p, ZZ):
            raise DomainError(f"{g} is reducible mod {p}")
        self.p, self.g, self.f = p, tuple(g), len(g) - 1
        self.q = p ** self.f
        self._primitive = None

    def __repr__(self):
        return f"F_{self.q}"

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.g) == (other.p, other.g)

    def __hash__(self):
        return hash((self.p, self.g))

    def zero(self):
        return (0,) * self.f

    def one(self):
        return (1,) + (0,) * (self.f - 1)

    def gen(self):
        return self.reduce_poly([0, 1])

    def from_int(self, k):
        return self.reduce_poly([k])

    def reduce_poly(self, coeffs):
        """Image of an integer polynomial in x-bar."""
        p, g, f = self.p, self.g, self.f
        r = [int(c) % p for c in coeffs]
        for k in range(len(r) - 1, f - 1, -1):
            c = r[k]
            if c:
                for j in range(f + 1):
                    r[k - f + j] = (r[k - f + j] - c * g[j]) % p
        r = r[:f] + [0] * max(0, f - len(r))
        return tuple(r)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        return self.reduce_poly(_mulmod(list(a), list(b), self.p))

    def pow(self, a, k):
        result, base = self.one(), a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self.pow(a, self.q - 2)

    def elements(self):
        """All elements, ordered as 0 followed by powers of a fixed primitive element."""
        z = self.primitive()
        out, cur = [self.zero()], self.one()
        for _ in range(self.q - 1):
            out.append(cur)
            cur = self.mul(cur, z)
        return out

    def primitive(self):
        if self._primitive is None:
            order = self.q - 1
            primes = [r for r in range(2, order + 1) if order % r == 0 and isprime(r)]
            for k in range(1, self.q):
                digits, n = [], k
                for _ in range(self.f):
                    digits.append(n % self.p)
                    n //= self.p
                a = tuple(digits)
                if all(self.pow(a, order // r) != self.one() for r in primes):
                    self._primitive = a
                    break
        return self._primitive

    def format(self, a, var="λ̄"):
        terms = []
        for k in range(self.f - 1, -1, -1):
            c = a[k]
            if not c:
                continue
            mono = "" if k == 0 else var if k == 1 else f"{var}^{k}"
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms) if terms else "0"


# -- quotients of the group ring ------------------------------------------------------

@dataclass(frozen=True)
class PrimeQuotient:
    m: int
    n: int
    p: int
    g: tuple
    f: int
    case: str
    reduction_recipe: str
    field: FiniteField
    generators: tuple   # (FieldElement, degree, image) triples
    factor_index: int = 0

    @property
    def q(self):
        return self.field.q


def _power_of_two(m):
    return m >= 4 and m & (m - 1) == 0


def _minpoly_int(elem, degree):
    from .field import minimal_polynomial
    mp = minimal_polynomial(elem)
    if len(mp) - 1 != degree or any(Fraction(c).denominator != 1 for c in mp):
        raise UnsupportedReductionError("generator is not an algebraic integer of the expected degree")
    return [int(c) for c in mp]


def _discriminant(poly):
    import sympy
    x = sympy.Symbol("x")
    return int(sympy.discriminant(sum(c * x ** k for k, c in enumerate(poly)), x))


def build_quotient(m, n, p, factor_index=0):
    """The structured reductions: (i) m = 2^d, n odd, p = 2; (ii) m = n odd, p = 2; (iii) lambda_N alone."""
    _check_prime(p)
    spec = TriangleGroupSpec(m, n)
    L = spec.field
    if p == 2 and _power_of_two(m) and n % 2 == 1:
        case = "i"
        lm, ln = cos_value(L, m), cos_value(L, n)
        dm, dn = build_field(m).degree, build_field(n).degree
        target = _minpoly_int(ln, dn)
        factors = factor_mod_p(target, p)[1]
        g = _pick(factors, factor_index)
        F = FiniteField(p, g)
        gens = ((lm, dm, F.zero()), (ln, dn, F.gen()))
        recipe = (f"2cos(pi/{m}) -> 0 (its minimal polynomial is x^{dm} mod 2); "
                  f"2cos(pi/{n}) -> x-bar modulo {_fmt(g)}")
        check = [(_minpoly_int(lm, dm), F.zero()), (target, F.gen())]
    elif p == 2 and m == n and m % 2 == 1:
        case = "ii"
        lam = cos_value(L, m)
        d = L.degree
        target = _minpoly_int(lam, d)
        g = _pick(factor_mod_p(target, p)[1], factor_index)
        F = FiniteField(p, g)
        gens = ((lam, d, F.gen()),)
        recipe = f"2cos(pi/{m}) -> x-bar modulo {_fmt(g)}"
        check = [(target, F.gen())]
    else:
        case = "iii"
        lam = L.gen()
        target = _minpoly_int(lam, L.degree)
        disc = _discriminant(target)
        if disc % (p * p) == 0:
            raise UnsupportedReductionError(
                f"({m}, {n}, {p}) is not a supported reduction: {p}^2 divides disc(lambda_{L.N}) = {disc}")
        g = _pick(factor_mod_p(target, p)[1], factor_index)
        F = FiniteField(p, g)
        gens = ((lam, L.degree, F.gen()),)
        recipe = f"2cos(pi/{L.N}) -> x-bar modulo {_fmt(g)}"
        check = [(target, F.gen())]
    for poly, image in check:
        if _eval_ff(F, poly, image) != F.zero():
            raise AssertionError("reduction recipe is not a ring homomorphism")
    return PrimeQuotient(m, n, p, tuple(g), F.f, case, recipe, F, gens, factor_index)


def _pick(factors, index):
    if not 0 <= index < len(factors):
        raise DomainError(f"factor index {index} out of range (there are {len(factors)} factors)")
    return factors[index][0]


def _fmt(g):
    return polys.to_str(list(g), "x")


def _eval_ff(F, poly, a):
    acc = F.zero()
    for c in reversed(poly):
        acc = F.add(F.mul(acc, a), F.from_int(c))
    return acc


def _monomials(q):
    """Monomials in the generators (exponent tuples) and their values in the group field."""
    exps = [()]
    for _, d, _ in q.generators:
        exps = [e + (k,) for e in exps for k in range(d)]
    values = []
    for e in exps:
        v = q.generators[0][0].field.one()
        for (elem, _, _), k in zip(q.generators, e):
            v = v * elem ** k
        values.append(v)
    return exps, values


_COORD_CACHE = {}


def _coordinates(x, q):
    """Rational coordinates of x in the generator monomial basis."""
    key = (q.m, q.n, q.p, q.case, q.factor_index)
    if key not in _COORD_CACHE:
        exps, values = _monomials(q)
        d = x.field.degree
        cols = [list(v.coeffs) + [0] * (d - len(v.coeffs)) for v in values]
        _COORD_CACHE[key] = (exps, cols)
    exps, cols = _COORD_CACHE[key]
    target = list(x.coeffs) + [0] * (x.field.degree - len(x.coeffs))
    sol = _solve(cols, target)
    if sol is None:
        raise DomainError("entry is outside the subring generated by the reduction generators")
    return exps, sol


def _solve(cols, target):
    """Solve sum_j s_j cols[j] = target exactly; None if inconsistent."""
    rows, k = len(target), len(cols)
    M = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(rows)]
    piv_cols, r = [], 0
    for c in range(k):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                fac = M[i][c]
                M[i] = [a - fac * b for a, b in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    if any(M[i][k] for i in range(r, rows)):
        return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = M[i][k]
    return sol


def reduce_scalar(x, q):
    exps, coords = _coordinates(x, q)
    F = q.field
    acc = F.zero()
    for e, c in zip(exps, coords):
        if not c:
            continue
        if c.denominator != 1:
            raise DomainError(f"entry {x} is not integral for this reduction")
        term = F.from_int(int(c))
        for (_, _, image), k in zip(q.generators, e):
            term = F.mul(term, F.pow(image, k))
        acc = F.add(acc, term)
    return acc


@dataclass(frozen=True)
class FFMatrix:
    a: tuple
    b: tuple
    c: tuple
    d: tuple
    field: FiniteField

    def __matmul__(self, other):
        F = self.field
        return FFMatrix(F.add(F.mul(self.a, other.a), F.mul(self.b, other.c)),
                        F.add(F.mul(self.a, other.b), F.mul(self.b, other.d)),
                        F.add(F.mul(self.c, other.a), F.mul(self.d, other.c)),
                        F.add(F.mul(self.c, other.b), F.mul(self.d, other.d)), F)

    def det(self):
        F = self.field
        return F.sub(F.mul(self.a, self.d), F.mul(self.b, self.c))

    def inverse(self):
        F = self.field
        k = F.inv(self.det())
        return FFMatrix(F.mul(k, self.d), F.mul(k, F.neg(self.b)), F.mul(k, F.neg(self.c)), F.mul(k, self.a), F)

    def is_identity(self):
        F = self.field
        return self.a == self.d == F.one() and self.b == self.c == F.zero()

    def is_scalar(self):
        F = self.field
        return self.a == self.d and self.b == self.c == F.zero()

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def format(self):
        F = self.field
        return "[[{}, {}], [{}, {}]]".format(*(F.format(x) for x in self.entries()))

    def act(self, z):
        """Moebius action on P^1(F)."""
        F = self.field
        if z is INF:
            num, den = self.a, self.c
        else:
            num = F.add(F.mul(self.a, z), self.b)
            den = F.add(F.mul(self.c, z), self.d)
        if not any(den):
            return INF
        return F.mul(num, F.inv(den))

    def projective_key(self):
        """Canonical representative of the class modulo scalars."""
        F = self.field
        for x in self.entries():
            if any(x):
                k = F.inv(x)
                return tuple(F.mul(k, y) for y in self.entries())
        raise ValueError("zero matrix")


def reduce_element(g, q):
    if not isinstance(g, GroupElement):
        raise TypeError("reduce_element expects a GroupElement")
    entries = [reduce_scalar(x, q) for x in g.entries()]
    M = FFMatrix(*entries, q.field)
    if M.det() != q.field.one() and g.det() == 1:
        raise AssertionError("reduction does not preserve the determinant")
    return M


def reduced_generators(q):
    spec = TriangleGroupSpec(q.m, q.n)
    return tuple(reduce_element(g, q) for g in generators(spec))


# -- orbits ----------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitReport:
    orbit: tuple
    transitive: bool
    complement: tuple
    group_order_hint: Optional[int]
    field: FiniteField

    def points(self):
        return len(self.orbit) + len(self.complement)

    def format_point(self, z):
        return "∞" if z is INF else self.field.format(z)


def projective_line(F):
    return [INF] + F.elements()


def orbit_of_infinity(q, gens=None, order_limit=100_000):
    """BFS closure of infinity under the generators and their inverses."""
    F = q.field if isinstance(q, PrimeQuotient) else q
    if gens is None:
        gens = reduced_generators(q)
    moves = list(gens) + [g.inverse() for g in gens]
    seen = {INF}
    queue = deque([INF])
    while queue:
        z = queue.popleft()
        for g in moves:
            w = g.act(z)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    line = projective_line(F)
    orbit = tuple(z for z in line if z in seen)
    complement = tuple(z for z in line if z not in seen)
    return OrbitReport(orbit, not complement, complement, image_order(gens, order_limit), F)


def image_order(gens, limit=100_000):
    """Order of the image in PSL_2(F), or None if it exceeds ``limit``."""
    start = gens[0].projective_key()
    F = gens[0].field
    ident = FFMatrix(F.one(), F.zero(), F.zero(), F.one(), F)
    seen = {ident.projective_key(): ident}
    queue = deque([ident])
    while queue:
        h = queue.popleft()
        for g in gens:
            k = h @ g
            key = k.projective_key()
            if key not in seen:
                if len(seen) >= limit:
                    return None
                seen[key] = k
                queue.append(k)
    del start
    return len(seen)


# -- certificates ------------------------------------------------------------------

def _fermat_like(k):
    """k = 2^f + 1 for some f >= 1."""
    return k >= 3 and (k - 1) & (k - 2) == 0


@dataclass(frozen=True)
class Certificate:
    quotient: PrimeQuotient
    report: OrbitReport
    hypotheses: tuple   # (statement, holds)
    verdict: str

    def lines(self):
        q, r = self.quotient, self.report
        out = [f"G_{{{q.m},{q.n}}} reduced mod {q.p}: F_{q.q} = F_{q.p}[x]/({_fmt(q.g)}), residue degree {q.f}",
               f"recipe: {q.reduction_recipe}",
               f"orbit of infinity ({len(r.orbit)} of {r.points()}): " + ", ".join(r.format_point(z) for z in r.orbit)]
        if r.group_order_hint is not None:
            out.append(f"image in PSL_2: order {r.group_order_hint}")
        for text, ok in self.hypotheses:
            out.append(f"hypothesis {'holds' if ok else 'fails'}: {text}")
        if r.complement:
            out.append("non-parabolic residue classes: " + ", ".join(r.format_point(z) for z in r.complement))
        out.append(f"verdict: {self.verdict}")
        return out


def nonparabolic_certificate(m, n, p, factor_index=0):
    q = build_quotient(m, n, p, factor_index)
    report = orbit_of_infinity(q)
    hyps = []
    if q.case == "i":
        hyps.append((f"m = {m} is a power of two greater than 2", True))
        hyps.append((f"n = {n} is odd and not of the form 2^f + 1", not _fermat_like(n)))
    elif q.case == "ii":
        bad = [k for k in range(3, m + 1) if m % k == 0 and _fermat_like(k)]
        hyps.append((f"m = n = {m} is odd and has no divisor of the form 2^f + 1"
                     + (f" (divisible by {bad[0]})" if bad else ""), not bad))
    verdict = "inconclusive: the image acts transitively" if report.transitive else (
        f"not transitive: {len(report.complement)} residue classes contain no parabolic fixed point")
    return Certificate(q, report, tuple(hyps), verdict)
