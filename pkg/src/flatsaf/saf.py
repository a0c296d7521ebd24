"""Sah-Arnoux-Fathi invariants and the Kenyon-Smillie J invariant.

Values of L ^_Q L are stored as antisymmetric rational matrices over the power
basis of L; values of L^2 ^_Q L^2 use the basis lambda^i e_x (i < d) followed
by lambda^i e_y.
"""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .field import parse_element, sign_at


class _Vertical:
    def __repr__(self):
        return "VERTICAL"


VERTICAL = _Vertical()


@dataclass(frozen=True)
class WedgeValue:
    matrix: tuple
    tag: str = "field"

    @property
    def dimension(self):
        return len(self.matrix)

    @classmethod
    def zero(cls, dim, tag="field"):
        return cls(tuple((Fraction(0),) * dim for _ in range(dim)), tag)

    def is_zero(self):
        return not any(any(row) for row in self.matrix)

    def __bool__(self):
        return not self.is_zero()

    def _check(self, other):
        if self.tag != other.tag or self.dimension != other.dimension:
            raise ValueError("wedge values live in different spaces")

    def __add__(self, other):
        self._check(other)
        return WedgeValue(tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(self.matrix, other.matrix)),
                          self.tag)

    def __neg__(self):
        return WedgeValue(tuple(tuple(-x for x in r) for r in self.matrix), self.tag)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, q):
        q = Fraction(q)
        return WedgeValue(tuple(tuple(q * x for x in r) for r in self.matrix), self.tag)

    def is_antisymmetric(self):
        n = self.dimension
        return all(self.matrix[i][j] == -self.matrix[j][i] for i in range(n) for j in range(n))

    def entries(self):
        """Nonzero upper-triangular entries as {(i, j): value}."""
        n = self.dimension
        return {(i, j): self.matrix[i][j] for i in range(n) for j in range(i + 1, n) if self.matrix[i][j]}

    def format(self):
        if self.is_zero():
            return "0"
        d = self.dimension // 2 if self.tag == "planar" else self.dimension
        parts = []
        for (i, j), v in self.entries().items():
            parts.append(f"{v}*({_basis_name(i, d, self.tag)} ^ {_basis_name(j, d, self.tag)})")
        return " + ".join(parts)


def _basis_name(i, d, tag):
    if tag == "planar":
        axis = "ex" if i < d else "ey"
        k = i % d
        return axis if k == 0 else f"x^{k}*{axis}" if k > 1 else f"x*{axis}"
    return "1" if i == 0 else "x" if i == 1 else f"x^{i}"


def _outer(u, v, tag):
    n = len(u)
    return WedgeValue(tuple(tuple(u[i] * v[j] - u[j] * v[i] for j in range(n)) for i in range(n)), tag)


def wedge(a, b):
    """a ^_Q b over the power basis of the common field."""
    if a.field is not b.field:
        raise ValueError("wedge of elements from different fields")
    return _outer(a.coeffs, b.coeffs, "field")


def planar_vector(p):
    x, y = p
    return tuple(x.coeffs) + tuple(y.coeffs)


def planar_wedge(p, q):
    return _outer(planar_vector(p), planar_vector(q), "planar")


# -- interval exchanges -----------------------------------------------------------

class IntervalExchange:
    """Exchange of intervals I_1, ..., I_n of lengths l_i on [0, sum l_i).

    ``permutation[i]`` is the (one-indexed) position of I_{i+1} after the
    exchange, so the translation of I_i is
    sum_{pi(j) < pi(i)} l_j - sum_{j < i} l_j.
    """

    def __init__(self, lengths, permutation):
        lengths = list(lengths)
        permutation = [int(p) for p in permutation]
        if len(lengths) != len(permutation):
            raise ValueError("lengths and permutation differ in size")
        if sorted(permutation) != list(range(1, len(lengths) + 1)):
            raise ValueError(f"{permutation} is not a permutation of 1..{len(lengths)}")
        if not lengths:
            raise ValueError("an interval exchange needs at least one interval")
        for i, l in enumerate(lengths):
            if sign_at(l) <= 0:
                raise ValueError(f"length {i + 1} is not positive")
        self.lengths = tuple(lengths)
        self.permutation = tuple(permutation)
        self.field = lengths[0].field
        zero = self.field.zero()
        starts, acc = [], zero
        for l in self.lengths:
            starts.append(acc)
            acc = acc + l
        self.total = acc
        self.starts = tuple(starts)
        order = sorted(range(len(lengths)), key=lambda i: permutation[i])
        image_starts = [zero] * len(lengths)
        acc = zero
        for i in order:
            image_starts[i] = acc
            acc = acc + self.lengths[i]
        self.image_starts = tuple(image_starts)
        self.translations = tuple(b - a for a, b in zip(self.starts, self.image_starts))
        self._float_starts = [s.to_float() for s in self.starts]

    def __len__(self):
        return len(self.lengths)

    def __repr__(self):
        return f"IntervalExchange(n={len(self)}, permutation={self.permutation})"

    def __eq__(self, other):
        return (isinstance(other, IntervalExchange) and self.lengths == other.lengths
                and self.permutation == other.permutation)

    @classmethod
    def from_translations(cls, lengths, translations):
        """Build from lengths and translations, checking the images tile the interval."""
        lengths = list(lengths)
        starts, acc = [], lengths[0].field.zero()
        for l in lengths:
            starts.append(acc)
            acc = acc + l
        images = [s + t for s, t in zip(starts, translations)]
        order = sorted(range(len(lengths)), key=lambda i: images[i].to_float())
        order = _exact_sort(order, images)
        perm = [0] * len(lengths)
        for rank, i in enumerate(order):
            perm[i] = rank + 1
        iet = cls(lengths, perm)
        if list(iet.translations) != list(translations):
            raise ValueError("translations do not describe an exchange of these intervals")
        return iet

    def locate(self, x):
        """Index of the interval containing x (exact)."""
        if sign_at(x) < 0 or sign_at(self.total - x) <= 0:
            raise ValueError("point outside the domain")
        guess = max(bisect_right(self._float_starts, x.to_float()) - 1, 0)
        i = guess
        while i > 0 and sign_at(x - self.starts[i]) < 0:
            i -= 1
        while i + 1 < len(self) and sign_at(x - self.starts[i + 1]) >= 0:
            i += 1
        return i

    def __call__(self, x):
        return x + self.translations[self.locate(x)]

    def discontinuities(self):
        return self.starts[1:]

    def inverse(self):
        order = sorted(range(len(self)), key=lambda i: self.permutation[i])
        lengths = [self.lengths[i] for i in order]
        perm = [0] * len(self)
        for pos, i in enumerate(order):
            perm[pos] = i + 1
        return IntervalExchange(lengths, perm)

    def scaled(self, c):
        if sign_at(c) <= 0:
            raise ValueError("scale factor must be positive")
        return IntervalExchange([l * c for l in self.lengths], self.permutation)

    def split(self, i, u):
        """Cut interval i at offset u (0 < u < l_i) into two pieces that move together."""
        l = self.lengths[i]
        if sign_at(u) <= 0 or sign_at(l - u) <= 0:
            raise ValueError("split point must be interior")
        lengths = list(self.lengths[:i]) + [u, l - u] + list(self.lengths[i + 1:])
        p = self.permutation[i]
        perm = [q + (q > p) for q in self.permutation]
        perm = perm[:i] + [p, p + 1] + perm[i + 1:]
        return IntervalExchange(lengths, perm)

    def merged(self):
        """Join neighbours that stay neighbours (fake discontinuities)."""
        lengths, firsts = [self.lengths[0]], [self.permutation[0]]
        last = self.permutation[0]
        for l, p in zip(self.lengths[1:], self.permutation[1:]):
            if p == last + 1:
                lengths[-1] = lengths[-1] + l
            else:
                lengths.append(l)
                firsts.append(p)
            last = p
        ranks = {p: r + 1 for r, p in enumerate(sorted(firsts))}
        return IntervalExchange(lengths, [ranks[p] for p in firsts])

    def check_partition(self):
        """The image intervals tile [0, total) exactly."""
        order = sorted(range(len(self)), key=lambda i: self.permutation[i])
        acc = self.field.zero()
        for i in order:
            if self.image_starts[i] != acc:
                return False
            acc = acc + self.lengths[i]
        return acc == self.total

    def to_text(self):
        lines = [" ".join(str(p) for p in self.permutation)]
        lines += [str(l) for l in self.lengths]
        return "\n".join(lines) + "\n"


def _exact_sort(order, values):
    """Insertion pass fixing float-order mistakes with exact comparisons."""
    order = list(order)
    for k in range(1, len(order)):
        j = k
        while j > 0 and sign_at(values[order[j]] - values[order[j - 1]]) < 0:
            order[j], order[j - 1] = order[j - 1], order[j]
            j -= 1
    return order


def parse_iet(text, field=None):
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty interval exchange file")
    perm = [int(tok) for tok in lines[0].split()]
    lengths = [parse_element(ln, field) for ln in lines[1:]]
    if lengths and field is None:
        field = lengths[0].field
        lengths = [parse_element(ln, field) for ln in lines[1:]]
    return IntervalExchange(lengths, perm)


def load_iet(path, field=None):
    with open(path) as fh:
        return parse_iet(fh.read(), field)


# -- invariants -----------------------------------------------------------------

def saf(iet):
    """sum_i l_i ^ t_i."""
    d = iet.field.degree
    total = WedgeValue.zero(d)
    for l, t in zip(iet.lengths, iet.translations):
        total = total + wedge(l, t)
    return total


def polygon_j(vertices):
    d = vertices[0][0].field.degree
    total = WedgeValue.zero(2 * d, "planar")
    k = len(vertices)
    for i in range(k):
        total = total + planar_wedge(vertices[i], vertices[(i + 1) % k])
    return total


def j_invariant(polygons):
    """Sum over polygons of sum_i v_i ^ v_{i+1}."""
    polygons = list(polygons)
    total = None
    for poly in polygons:
        j = polygon_j(poly)
        total = j if total is None else total + j
    if total is None:
        raise ValueError("j_invariant of an empty polygon list")
    return total


def direction_vector(direction, field):
    """(w_x, w_y) for a slope, VERTICAL, or an explicit pair."""
    if direction is VERTICAL:
        return field.zero(), field.one()
    if isinstance(direction, tuple):
        return direction
    return field.one(), direction


def level_functional(direction, field):
    """phi(x, y) = w_x y - w_y x, which kills the direction w."""
    wx, wy = direction_vector(direction, field)
    return lambda p: wx * p[1] - wy * p[0]


def project_j(J, direction, field):
    """(phi ^ phi)(J) with phi the level functional of ``direction``."""
    wx, wy = direction_vector(direction, field)
    d = field.degree
    basis = [field.element([0] * i + [1]) for i in range(d)]
    # images of lambda^i e_x and lambda^i e_y under phi, as coefficient rows
    rows = [(-wy * b).coeffs for b in basis] + [(wx * b).coeffs for b in basis]
    M = J.matrix
    n = 2 * d
    # P J P^T with P the d x 2d matrix whose columns are `rows`
    tmp = [[sum(M[i][k] * rows[k][b] for k in range(n) if M[i][k]) for b in range(d)] for i in range(n)]
    out = [[sum(rows[i][a] * tmp[i][b] for i in range(n) if rows[i][a]) for b in range(d)] for a in range(d)]
    return WedgeValue(tuple(tuple(r) for r in out), "field")


def singularity_profile(permutation):
    """Cone angles (as multiples of 2pi) of a suspension of an IET with this permutation.

    Uses the cycles of j -> pi^-1(pi(j) + 1) - 1 on {0, ..., n}; the cycles
    through the two interval endpoints each carry one extra step.
    """
    n = len(permutation)
    pi = {0: 0}
    pi.update({i + 1: q for i, q in enumerate(permutation)})
    inv = {v: k for k, v in pi.items()}
    inv[n + 1] = n + 1
    step = {j: inv[pi[j] + 1] - 1 for j in range(n + 1)}
    seen, out = set(), []
    for j in range(n + 1):
        if j in seen:
            continue
        size, ends, k = 0, 0, j
        while k not in seen:
            seen.add(k)
            size += 1
            ends += k in (0, n)
            k = step[k]
        out.append(size - ends)
    return tuple(sorted(out))
