"""Special hyperbolic elements of G_{m,n} and their pseudo-Anosov data.

For an unobstructed pair of even indices the product B^{m/2} C^{n/2} fixes
the points -1 and 1, so its eigenvalues lie in the trace field.  Hooper's
change of coordinates D_mu(z) = csc(pi/n) z - cot(pi/n) sends the fixed
direction 1 to a direction on the semi-regular polygon surface.
"""

from dataclasses import dataclass
from math import gcd

from .field import (DomainError, NotASquare, build_field, cos_value, lift, sign_at, sin_product,
                    sqrt_in_field, two_cos)
from .group import (INFINITY, GroupElement, TriangleGroupSpec, classify, evaluate_word, fixed_points,
                    generators, is_obstructed_pair, is_special, moebius_apply, trace_field)


class ObstructionError(DomainError):
    pass


@dataclass(frozen=True)
class SpecialPACertificate:
    spec: TriangleGroupSpec
    matrix: GroupElement
    exponent: int
    dilatation: object
    fixed_points: tuple
    direction: object

    def summary(self):
        d = self.dilatation
        return {
            "m": self.spec.m,
            "n": self.spec.n,
            "word": self.matrix.word,
            "exponent": self.exponent,
            "dilatation": d,
            "dilatation_numeric": d.numeric(12),
            "fixed_points": self.fixed_points,
            "direction": self.direction,
        }


def dilatation_of(g):
    """The root > 1 of x^2 - |tr g| x + 1, when it lies in the field of g."""
    t = g.trace()
    if sign_at(t) < 0:
        t = -t
    root = sqrt_in_field(t * t - 4)
    if root is NotASquare:
        return None
    return (t + root) / 2


def closed_form_dilatation(m, n, field=None):
    """(cos cos + cos + cos + 1)/(sin sin) at pi/m, pi/n, computed in L_lcm(m,n)."""
    L = field or build_field(m * n // gcd(m, n))
    cm, cn = cos_value(L, m) / 2, cos_value(L, n) / 2
    return (cm * cn + cm + cn + 1) / sin_product(L, m, n)


def check_pair(m, n):
    if m % 2 or n % 2:
        raise DomainError(f"special_pa needs even indices, got ({m}, {n})")
    if is_obstructed_pair(m, n):
        g = gcd(m, n)
        clause = "gcd(m, n) = 2" if g == 2 else f"m/gcd = {m // g} and n/gcd = {n // g} are both odd"
        raise ObstructionError(f"pair ({m}, {n}) is obstructed: {clause}")


def special_pa(m, n):
    check_pair(m, n)
    spec = TriangleGroupSpec(m, n)
    word = (("B", m // 2), ("C", n // 2))
    base = evaluate_word(word, spec)
    e = 1 if gcd(m, n) % 4 == 0 else 2
    matrix = base ** e if e > 1 else base
    if e > 1:
        matrix = matrix.with_word(word * e)
    dil = dilatation_of(matrix)
    if dil is None:
        raise ArithmeticError(f"dilatation of {matrix} is not in the field")
    return SpecialPACertificate(spec, matrix, e, dil, fixed_points(base), hooper_direction(n))


def hooper_field(n, N=None):
    """The smallest L_M with M a multiple of N that holds csc(pi/n) and cot(pi/n)."""
    M = 2 * n
    if N is not None:
        M = M * N // gcd(M, N)
    return build_field(M)


def hooper_map(n, field=None):
    """D_mu as the matrix [[csc(pi/n), -cot(pi/n)], [0, 1]] (determinant csc(pi/n))."""
    L = field or hooper_field(n)
    two_sin = two_cos(L, n - 2, 2 * n)
    csc = 2 / two_sin
    cot = cos_value(L, n) / two_sin
    return GroupElement(csc, -cot, L.zero(), L.one())


def hooper_direction(n, field=None):
    """D_mu(1) = (1 - cos(pi/n))/sin(pi/n) = tan(pi/2n)."""
    if n < 3:
        raise DomainError(f"hooper_direction needs n >= 3, got {n}")
    L = field or hooper_field(n)
    return moebius_apply(hooper_map(n, L), L.one())


def conjugate_by(h, g):
    """h g h^-1."""
    return h @ g @ h.inverse()


def lift_element(g, field):
    return GroupElement(*(lift(x, field) for x in g.entries()), g.word)


def standard_form_conjugator(alpha):
    """The map z -> z/alpha as the diagonal matrix diag(1, alpha)."""
    if alpha.is_zero():
        raise DomainError("standard_form_conjugator needs a nonzero point")
    L = alpha.field
    return GroupElement(L.one(), L.zero(), L.zero(), alpha)


# -- the (7,7) example ----------------------------------------------------------

@dataclass(frozen=True)
class SevenSevenReport:
    matrix: GroupElement
    alpha: object
    beta: object
    fixed_points: tuple
    dilatation: object
    stated_dilatation: object
    stated_dilatation_ok: bool
    special: bool
    normalized_directions: tuple


def seven_seven_matrix():
    spec = TriangleGroupSpec(7, 7)
    A, _, C = generators(spec)
    return spec, A @ C ** 5


def normalized_direction(z, n=7):
    """(z - cos(pi/n))/sin(pi/n)^2: the D_mu image after dividing x by sin(pi/n)."""
    if z is INFINITY:
        return INFINITY
    L = z.field
    c = cos_value(L, n) / 2
    return (z - c) / (1 - c * c)


def seven_seven_example():
    """Rebuild the (7,7) special element and check every arithmetic claim about it."""
    spec, M = seven_seven_matrix()
    L = spec.field
    lam = L.gen()
    expected = (-1 - 2 * lam ** 2, -2 + 3 * lam + 2 * lam ** 2, -lam, -1 + lam ** 2)
    if M.entries() != expected:
        raise AssertionError(f"A C^5 = {M} differs from the expected matrix")
    alpha = 7 * lam ** 2 + lam - 1
    beta = (alpha + 13) / (alpha - 16)
    if beta * beta != alpha:
        raise AssertionError("beta^2 != alpha")
    t = M.trace()
    if t * t - 4 != alpha:
        raise AssertionError("discriminant of A C^5 is not alpha")
    fps = fixed_points(M)
    if not isinstance(fps, tuple):
        raise AssertionError("A C^5 has irrational fixed points")
    dil = dilatation_of(M)
    stated = -9 * lam ** 2 + 10 * lam + 16
    stated_ok = stated + 1 / stated == abs(t)
    special = is_special(M, trace_field(spec))
    if not special:
        raise AssertionError("A C^5 is not special")
    # the attracting fixed point of M is the expanding eigendirection
    attracting = _attracting(M, fps)
    return SevenSevenReport(M, alpha, beta, fps, dil, stated, stated_ok, special,
                            (normalized_direction(attracting), normalized_direction(_other(fps, attracting))))


def _attracting(g, fps):
    """Fixed point whose eigenvector (z, 1) has eigenvalue c z + d of modulus > 1."""
    for z in fps:
        mult = g.a if z is INFINITY else g.c * z + g.d
        if sign_at(mult * mult - 1) > 0:
            return z
    raise ArithmeticError("no attracting fixed point")


def _other(fps, z):
    return fps[1] if fps[0] == z else fps[0]
