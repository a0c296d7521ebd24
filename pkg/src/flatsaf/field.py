"""Exact arithmetic in the real cyclotomic fields L_N = Q(2cos(pi/N)).

Elements are stored over the power basis 1, lam, ..., lam^(d-1) of
``lam = 2cos(pi/N)`` as an integer numerator vector over one positive common
denominator.  Sign questions are answered exactly: a floating point filter
with a rigorous error bound settles the easy cases and rational interval
refinement of an isolating interval settles the rest.

    >>> L = build_field(7)
    >>> lam = L.gen()
    >>> lam * (lam**2 - lam - 2)
    -1 | N=7
    >>> minimal_polynomial(lam)
    (Fraction(1, 1), Fraction(-2, 1), Fraction(-1, 1), Fraction(1, 1))
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import polys


class FieldError(ValueError):
    """Base class for invalid field operations."""


class InvalidIndexError(FieldError):
    pass


class IncompatibleIndexError(FieldError):
    pass


class InvalidAutomorphismError(FieldError):
    pass


class DomainError(FieldError):
    pass


class _NotASquare:
    """Returned by :func:`sqrt_in_field` when no square root exists in the field."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotASquare"

    def __bool__(self):
        return False


NotASquare = _NotASquare()


def _totient(n):
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@dataclass(frozen=True)
class RealEmbedding:
    """The real place sending lam_N to 2cos(k pi/N)."""

    root_index: int
    conjugation_exponent: int


class CyclotomicRealField:
    """The field L_N = Q(lam_N), lam_N = 2cos(pi/N), with its real embeddings.

    Use :func:`build_field` rather than instantiating directly; fields are
    cached so that there is one object per index ``N``.
    """

    def __init__(self, N):
        if N < 3:
            raise InvalidIndexError(f"field index must be >= 3, got {N}")
        self.N = N
        self.degree = _totient(2 * N) // 2
        self.minpoly = _minpoly_two_cos(N)
        assert len(self.minpoly) == self.degree + 1
        exps = [k for k in range(1, N, 2) if gcd(k, 2 * N) == 1]
        self.embeddings = tuple(RealEmbedding(i, k) for i, k in enumerate(exps))
        self._float_roots = tuple(2 * math.cos(k * math.pi / N) for k in exps)
        self.isolating_intervals = self._isolate()
        # Refined root intervals, replaced (never mutated) as sign_at narrows them.
        self._refined = list(self.isolating_intervals)

    def __repr__(self):
        return f"CyclotomicRealField(N={self.N})"

    def __reduce__(self):
        return (build_field, (self.N,))

    def _isolate(self):
        roots = sorted(self._float_roots)
        gap = min((b - a for a, b in zip(roots, roots[1:])), default=1.0)
        rad = Fraction(gap / 4).limit_denominator(10**12)
        out = []
        for r in self._float_roots:
            c = Fraction(r).limit_denominator(10**15)
            lo, hi = c - rad, c + rad
            flo, fhi = polys.evaluate(self.minpoly, lo), polys.evaluate(self.minpoly, hi)
            if flo * fhi >= 0:
                raise ArithmeticError(f"failed to isolate roots of lam_{self.N}")
            out.append((lo, hi))
        return tuple(out)

    # -- element construction -------------------------------------------------

    def element(self, coeffs):
        """Element with the given rational coordinates in the power basis."""
        coeffs = [Fraction(c) for c in coeffs]
        if len(coeffs) > self.degree:
            return self.from_polynomial(coeffs)
        coeffs += [Fraction(0)] * (self.degree - len(coeffs))
        den = 1
        for c in coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        return FieldElement._make(self, [int(c * den) for c in coeffs], den)

    def from_polynomial(self, poly):
        """Evaluate a rational polynomial at lam, reducing modulo the minimal polynomial."""
        poly = [Fraction(c) for c in poly]
        _, rem = polys.divmod_poly(polys.trim(poly), self.minpoly)
        return self.element(list(rem) + [0] * (self.degree - len(rem)))

    def __call__(self, value):
        if isinstance(value, FieldElement):
            if value.field is not self:
                raise IncompatibleIndexError("element belongs to a different field")
            return value
        return self.element([value])

    def zero(self):
        return self.element([0])

    def one(self):
        return self.element([1])

    def gen(self):
        return self.from_polynomial([0, 1])

    @property
    def roots(self):
        return self._float_roots

    def root_interval(self, root_index):
        return self._refined[root_index]

    def _set_root_interval(self, root_index, interval):
        self._refined[root_index] = interval


def _minpoly_two_cos(N):
    """Minimal polynomial of 2cos(pi/N) from Phi_{2N}(z) = z^d psi(z + 1/z)."""
    phi = polys.cyclotomic(2 * N)
    d = (len(phi) - 1) // 2
    psi = (phi[d],)
    for j in range(1, d + 1):
        psi = polys.add(psi, polys.scale(polys.two_cos_multiple(j), phi[d + j]))
    return tuple(int(c) for c in psi)


@lru_cache(maxsize=None)
def build_field(N):
    """Return the (cached) field L_N = Q(2cos(pi/N))."""
    if not isinstance(N, int) or N < 3:
        raise InvalidIndexError(f"field index must be an integer >= 3, got {N!r}")
    return CyclotomicRealField(N)


class FieldElement:
    """Immutable element of a :class:`CyclotomicRealField`."""

    __slots__ = ("field", "num", "den", "_hash")

    def __init__(self, field, coeffs):
        other = field.element(coeffs)
        self.field, self.num, self.den, self._hash = field, other.num, other.den, None

    @classmethod
    def _make(cls, field, num, den):
        if den < 0:
            num, den = [-c for c in num], -den
        g = den
        for c in num:
            if g == 1:
                break
            g = gcd(g, c)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        obj = object.__new__(cls)
        obj.field, obj.num, obj.den, obj._hash = field, tuple(num), den, None
        return obj

    @property
    def coeffs(self):
        return tuple(Fraction(c, self.den) for c in self.num)

    def is_zero(self):
        return not any(self.num)

    def is_rational(self):
        return not any(self.num[1:])

    def is_integral(self):
        return self.den == 1

    def __bool__(self):
        return not self.is_zero()

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise IncompatibleIndexError(
                    f"cannot combine elements of L_{self.field.N} and L_{other.field.N}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element([other])
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        d1, d2 = self.den, other.den
        if d1 == d2:
            return FieldElement._make(self.field, [a + b for a, b in zip(self.num, other.num)], d1)
        return FieldElement._make(
            self.field, [a * d2 + b * d1 for a, b in zip(self.num, other.num)], d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement._make(self.field, [-a for a in self.num], self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return FieldElement._make(
                self.field, [a * q.numerator for a in self.num], self.den * q.denominator)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        d = self.field.degree
        a, b = self.num, other.num
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        mp = self.field.minpoly
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k]
            if c:
                base = k - d
                for i in range(d):
                    if mp[i]:
                        prod[base + i] -= c * mp[i]
        return FieldElement._make(self.field, prod[:d], self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        if self.is_rational():
            return self.field.element([1 / self.coeffs[0]])
        return _inverse_cached(self)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.field.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field is other.field and self.den == other.den and self.num == other.num

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.N, self.num, self.den)) if not self.is_rational() \
                else hash(self.coeffs[0])
        return self._hash

    # ordering uses the embedding at root #0
    def __lt__(self, other):
        return sign_at(self - other) < 0

    def __le__(self, other):
        return sign_at(self - other) <= 0

    def __gt__(self, other):
        return sign_at(self - other) > 0

    def __ge__(self, other):
        return sign_at(self - other) >= 0

    def __abs__(self):
        return -self if sign_at(self) < 0 else self

    def sign(self, embedding=0):
        return sign_at(self, embedding)

    def __float__(self):
        return self.to_float()

    def to_float(self, root_index=0):
        r = self.field.roots[root_index]
        try:
            return sum((c / self.den) * r**i for i, c in enumerate(self.num))
        except OverflowError:
            return float(self.to_mpf(root_index, 30))

    def to_mpf(self, root_index=0, dps=30):
        import mpmath

        with mpmath.workdps(dps + 10):
            k = self.field.embeddings[root_index].conjugation_exponent
            r = 2 * mpmath.cos(k * mpmath.pi / self.field.N)
            acc = mpmath.mpf(0)
            for c in reversed(self.num):
                acc = acc * r + c
            return acc / self.den

    def numeric(self, digits=12, root_index=0):
        """Decimal string truncated (toward zero) to ``digits`` places."""
        return truncated_decimal(self.to_mpf(root_index, digits + 25), digits)

    def polynomial(self):
        return polys.trim(self.coeffs)

    def __str__(self):
        return f"{format_coeffs(self.coeffs)} | N={self.field.N}"

    __repr__ = __str__


def truncated_decimal(value, digits):
    import mpmath

    with mpmath.workdps(int(mpmath.mag(value) * 0.31) + digits + 30 if value else digits + 30):
        neg = value < 0
        scaled = int(mpmath.floor(abs(value) * mpmath.mpf(10) ** digits))
    whole, frac = divmod(scaled, 10**digits)
    text = f"{whole}.{frac:0{digits}d}" if digits else str(whole)
    return ("-" + text) if neg and scaled else text


@lru_cache(maxsize=4096)
def _inverse_cached(a):
    _, s, _ = polys.xgcd_poly(a.polynomial(), a.field.minpoly)
    return a.field.from_polynomial(s)


def format_coeffs(coeffs):
    return polys.to_str(polys.trim(coeffs), "x")


_TERM = re.compile(r"([+-]?)([^+-]+)")


def parse_element(text, field=None):
    """Parse ``"c0 + c1*x + c2*x^2 | N=7"``; the ``| N=`` suffix may be omitted if ``field`` is given."""
    body, _, tail = text.partition("|")
    if tail:
        m = re.fullmatch(r"\s*N\s*=\s*(\d+)\s*", tail)
        if not m:
            raise ValueError(f"malformed field suffix in {text!r}")
        N = int(m.group(1))
        if field is not None and field.N != N:
            raise IncompatibleIndexError(f"element of L_{N} where L_{field.N} expected")
        field = build_field(N)
    if field is None:
        raise ValueError(f"no field given for {text!r}")
    body = body.replace(" ", "")
    if not body:
        raise ValueError("empty field element")
    coeffs = {}
    pos = 0
    for m in _TERM.finditer(body):
        if m.start() != pos:
            raise ValueError(f"malformed field element {text!r}")
        pos = m.end()
        sign, term = m.groups()
        tm = re.fullmatch(r"(\d+(?:/\d+)?)?(?:\*?x(?:\^(\d+))?)?", term)
        if not tm or not term:
            raise ValueError(f"malformed term {term!r} in {text!r}")
        coeff_text, exp_text = tm.groups()
        has_x = "x" in term
        if coeff_text is None and not has_x:
            raise ValueError(f"malformed term {term!r}")
        c = Fraction(coeff_text) if coeff_text else Fraction(1)
        if sign == "-":
            c = -c
        e = (int(exp_text) if exp_text else 1) if has_x else 0
        coeffs[e] = coeffs.get(e, 0) + c
    if pos != len(body):
        raise ValueError(f"malformed field element {text!r}")
    poly = [coeffs.get(i, 0) for i in range(max(coeffs) + 1)]
    return field.from_polynomial(poly)


# -- named elements -------------------------------------------------------------

def two_cos(field, num, den=1):
    """2cos(num*pi/den) as an element of ``field``; requires N*num/den to be an integer."""
    k = Fraction(num * field.N, den)
    if k.denominator != 1:
        raise IncompatibleIndexError(f"2cos({num}pi/{den}) is not in L_{field.N}")
    k = int(k) % (2 * field.N)
    return field.from_polynomial(polys.two_cos_multiple(k))


def cos_value(field, m):
    """2cos(pi/m) as an element of L_N; requires m | N."""
    if m < 1 or field.N % m:
        raise IncompatibleIndexError(f"2cos(pi/{m}) requires {m} | N={field.N}")
    value = two_cos(field, 1, m)
    lo = 2 * math.cos(math.pi / m)
    assert abs(value.to_float() - lo) < 1e-9
    return value


def sine_ratio(field, k, m):
    """sin(k pi/m)/sin(pi/m) as an integer polynomial in 2cos(pi/m); requires m | N."""
    lam = cos_value(field, m)
    acc = field.zero()
    for c in reversed(polys.sine_ratio(k)):
        acc = acc * lam + c
    return acc


def lift(a, field):
    """Image of ``a`` under the inclusion L_M -> L_N (M | N)."""
    if a.field is field:
        return a
    if field.N % a.field.N:
        raise IncompatibleIndexError(f"L_{a.field.N} does not embed in L_{field.N}")
    lam = two_cos(field, 1, a.field.N)
    acc = field.zero()
    for c in reversed(a.coeffs):
        acc = acc * lam + c
    return acc


def sin_product(field, m, n):
    """sin(pi/m) sin(pi/n), which lies in L_N whenever m and n divide N."""
    if field.N % m or field.N % n:
        raise IncompatibleIndexError(f"sin(pi/{m})sin(pi/{n}) needs {m},{n} | N")
    return (two_cos(field, n - m, m * n) - two_cos(field, n + m, m * n)) / 4


# -- signs ----------------------------------------------------------------------

_FILTER = 1e-11


def sign_at(a, embedding=0):
    """Exact sign of ``a`` at the given real embedding (root index or RealEmbedding)."""
    if isinstance(embedding, RealEmbedding):
        embedding = embedding.root_index
    if not any(a.num):
        return 0
    field = a.field
    r = field.roots[embedding]
    try:
        total, size, power = 0.0, 0.0, 1.0
        for c in a.num:
            if c:
                q = c / a.den
                if q == 0.0:
                    raise OverflowError
                term = q * power
                total += term
                size += abs(term)
            power *= r
        if abs(total) > _FILTER * size:
            return 1 if total > 0 else -1
    except OverflowError:
        pass
    return _sign_by_refinement(a, embedding)


def _interval_eval(poly, lo, hi):
    # Horner over [lo, hi] with exact rational endpoints
    rlo = rhi = Fraction(0)
    for c in reversed(poly):
        cands = (rlo * lo, rlo * hi, rhi * lo, rhi * hi)
        rlo, rhi = min(cands) + c, max(cands) + c
    return rlo, rhi


def _sign_by_refinement(a, embedding):
    field = a.field
    lo, hi = field.root_interval(embedding)
    mp = field.minpoly
    poly = a.num
    slo = polys.evaluate(mp, lo) > 0
    while True:
        vlo, vhi = _interval_eval(poly, lo, hi)
        if vlo > 0:
            field._set_root_interval(embedding, (lo, hi))
            return 1
        if vhi < 0:
            field._set_root_interval(embedding, (lo, hi))
            return -1
        mid = (lo + hi) / 2
        fm = polys.evaluate(mp, mid)
        if fm == 0:
            # rational root only when degree is one
            val = polys.evaluate(poly, mid)
            return (val > 0) - (val < 0)
        if (fm > 0) == slo:
            lo = mid
        else:
            hi = mid
        # keep interval endpoints small
        lo, hi = Fraction(lo), Fraction(hi)


# -- Galois action, minimal polynomials, norms ---------------------------------

def galois_conjugate(a, k):
    """Apply the automorphism lam_N -> 2cos(k pi/N)."""
    field = a.field
    if gcd(k, 2 * field.N) != 1:
        raise InvalidAutomorphismError(f"k={k} is not coprime to 2N={2 * field.N}")
    image = two_cos(field, k, field.N)
    acc = field.zero()
    for c in reversed(a.coeffs):
        acc = acc * image + c
    return acc


def embedding_for_exponent(field, k):
    k = k % (2 * field.N)
    if k > field.N:
        k = 2 * field.N - k
    for e in field.embeddings:
        if e.conjugation_exponent == k:
            return e
    raise InvalidAutomorphismError(f"no embedding with exponent {k} in L_{field.N}")


def multiplication_matrix(a):
    """Matrix (rows = coordinates) of x -> a*x in the power basis; column j is a*lam^j."""
    field = a.field
    d = field.degree
    lam = field.gen()
    cols, cur = [], a
    for _ in range(d):
        cols.append(cur.coeffs)
        cur = cur * lam
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def characteristic_polynomial(a):
    return polys.charpoly(multiplication_matrix(a))


def minimal_polynomial(a):
    """Monic minimal polynomial of ``a`` over Q (coefficients low to high, Fractions)."""
    if a.is_rational():
        return (-a.coeffs[0], Fraction(1))
    m = polys.squarefree_part(characteristic_polynomial(a))
    acc = a.field.zero()
    for c in reversed(m):
        acc = acc * a + c
    assert acc.is_zero()
    return m


def norm(a):
    cp = characteristic_polynomial(a)
    return cp[0] * (-1) ** a.field.degree


def is_unit(a):
    """Whether an element of Z[lam_N] is a unit (norm +-1)."""
    if not a.is_integral():
        raise DomainError(f"{a} is not in Z[lam]")
    return abs(norm(a)) == 1


# -- square roots ---------------------------------------------------------------

def sqrt_in_field(a):
    """A square root of ``a`` in its field (positive at root #0), or :data:`NotASquare`.

    Z[lam_N] is the full ring of integers of L_N, so after clearing the
    denominator any square root has integer coordinates.  The candidate is
    located through the factor of the norm polynomial N(x^2 - a) that vanishes
    at sqrt(a), pinned down embedding by embedding, and certified exactly.
    """
    field = a.field
    if a.is_zero():
        return a
    d = field.degree
    if any(sign_at(a, j) < 0 for j in range(d)):
        return NotASquare
    D = a.den
    a_int = a * (D * D)
    import mpmath
    import sympy

    x = sympy.Symbol("x")
    cp = characteristic_polynomial(a_int)
    R = sum(sympy.Integer(int(c)) * x ** (2 * i) for i, c in enumerate(cp))
    _, factors = sympy.factor_list(R, x)
    dps = 60 + 2 * max(len(str(c)) for c in a_int.num)
    with mpmath.workdps(dps):
        conj = [a_int.to_mpf(j, dps) for j in range(d)]
        roots = [mpmath.sqrt(v) for v in conj]
        polys_mp = []
        for f, _ in factors:
            coeffs = [int(c) for c in sympy.Poly(f, x).all_coeffs()]
            polys_mp.append((coeffs, lambda t, cs=coeffs: mpmath.polyval(cs, t)))
        vals = [abs(fn(roots[0])) for _, fn in polys_mp]
        best = min(range(len(vals)), key=lambda i: vals[i])
        coeffs, h = polys_mp[best]
        deg_h = len(coeffs) - 1
        if deg_h > d or d % deg_h:
            return NotASquare
        tol = mpmath.mpf(10) ** (-dps // 2)
        scale_h = max(abs(c) for c in coeffs) * (1 + max(abs(r) for r in roots)) ** deg_h
        choices = []
        for j in range(d):
            if j == 0:
                choices.append([1])
                continue
            ok = [s for s in (1, -1) if abs(h(s * roots[j])) <= tol * scale_h]
            if not ok:
                return NotASquare
            choices.append(ok)
        exps = [e.conjugation_exponent for e in field.embeddings]
        nodes = [2 * mpmath.cos(k * mpmath.pi / field.N) for k in exps]
        V = mpmath.matrix([[nodes[j] ** i for i in range(d)] for j in range(d)])
        import itertools

        for signs in itertools.product(*choices):
            y = mpmath.matrix([s * roots[j] for j, s in enumerate(signs)])
            sol = mpmath.lu_solve(V, y)
            ints = [int(mpmath.nint(sol[i])) for i in range(d)]
            if any(abs(sol[i] - ints[i]) > mpmath.mpf("1e-10") for i in range(d)):
                continue
            beta = field.element(ints)
            if beta * beta == a_int:
                beta = beta / D
                return beta if sign_at(beta) > 0 else -beta
    return NotASquare


# -- subfields ------------------------------------------------------------------

class SubfieldBasis:
    """A Q-subfield of L_N given by a basis; membership by exact linear solving."""

    def __init__(self, ambient, basis, label="custom"):
        self.ambient = ambient
        self.label = label
        self._rows = []  # reduced row echelon form: list of (pivot, row)
        self.basis = []
        for b in basis:
            if self._insert(b.coeffs):
                self.basis.append(b)

    @property
    def dimension(self):
        return len(self.basis)

    def _reduce(self, vec):
        vec = list(vec)
        for pivot, row in self._rows:
            c = vec[pivot]
            if c:
                vec = [v - c * r for v, r in zip(vec, row)]
        return vec

    def _insert(self, vec):
        vec = self._reduce(vec)
        pivot = next((i for i, v in enumerate(vec) if v), None)
        if pivot is None:
            return False
        lead = vec[pivot]
        vec = [v / lead for v in vec]
        new_rows = []
        for p, row in self._rows:
            c = row[pivot]
            if c:
                row = [r - c * v for r, v in zip(row, vec)]
            new_rows.append((p, row))
        new_rows.append((pivot, vec))
        self._rows = new_rows
        return True

    def contains(self, a):
        return not any(self._reduce(a.coeffs))

    def __repr__(self):
        return f"SubfieldBasis(L_{self.ambient.N}, dim={self.dimension}, label={self.label!r})"


def subfield_closure(gens, label="custom"):
    """Smallest Q-subalgebra (hence subfield) of L_N containing 1 and ``gens``."""
    gens = list(gens)
    if not gens:
        raise ValueError("subfield_closure needs at least one generator")
    field = gens[0].field
    sub = SubfieldBasis(field, [field.one()], label)
    frontier = [field.one()]
    while frontier:
        new = []
        for b in frontier:
            for g in gens:
                p = b * g
                if sub._insert(p.coeffs):
                    sub.basis.append(p)
                    new.append(p)
        frontier = new
    return sub


def contains(sub, a):
    return sub.contains(a)


def whole_field(field):
    return SubfieldBasis(field, [field.element([0] * i + [1]) for i in range(field.degree)], "whole")
