"""Translation surfaces as convex polygons glued by translations, with exact flow tracing.

Polygons are listed counterclockwise; edge i of a polygon runs from vertex i
to vertex i+1.  Every polygon vertex is treated as singular when tracing, so
marked points of angle 2pi show up as (removable) discontinuities.

Flow in direction w is followed through the level functional
phi(p) = cross(w, p), which is constant along flow lines.  Inside a convex
polygon a flow line is determined by its level, so tracing only needs exact
comparisons between levels.
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd

from .field import build_field, format_coeffs, parse_element, sign_at, sine_ratio, two_cos
from .saf import VERTICAL, IntervalExchange, direction_vector, j_invariant

DEFAULT_MAX_CROSSINGS = 100_000


class SurfaceError(ValueError):
    pass


class TraceError(ValueError):
    pass


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def vsub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def vadd(u, v):
    return (u[0] + v[0], u[1] + v[1])


def vscale(c, u):
    return (c * u[0], c * u[1])


# -- data model -----------------------------------------------------------------

@dataclass(frozen=True)
class ConePoint:
    corners: tuple
    angle: float

    @property
    def multiple(self):
        """Total angle as a multiple of 2pi."""
        return round(self.angle / (2 * math.pi))


@dataclass(frozen=True)
class ValidationReport:
    cone_points: tuple
    genus: int
    euler_characteristic: int

    def singular(self):
        return tuple(c for c in self.cone_points if c.multiple > 1)


class TranslationSurface:
    def __init__(self, polygons, identifications, name="surface"):
        self.polygons = tuple(tuple(tuple(v) for v in poly) for poly in polygons)
        self.identifications = tuple(((int(a[0]), int(a[1])), (int(b[0]), int(b[1])))
                                     for a, b in identifications)
        self.name = name
        if not self.polygons:
            raise SurfaceError("a surface needs at least one polygon")
        self.field = self.polygons[0][0][0].field
        self.glue = {}
        for a, b in self.identifications:
            for e in (a, b):
                if e in self.glue:
                    raise SurfaceError(f"edge {e[0]}.{e[1]} is identified twice")
            self.glue[a] = b
            self.glue[b] = a

    def __repr__(self):
        return f"TranslationSurface({self.name!r}, polygons={len(self.polygons)}, edges={len(self.identifications)})"

    def __eq__(self, other):
        return (isinstance(other, TranslationSurface) and self.polygons == other.polygons
                and self.identifications == other.identifications)

    def vertex(self, p, i):
        poly = self.polygons[p]
        return poly[i % len(poly)]

    def edge(self, p, i):
        poly = self.polygons[p]
        return vsub(poly[(i + 1) % len(poly)], poly[i % len(poly)])

    def edges(self):
        return [(p, i) for p, poly in enumerate(self.polygons) for i in range(len(poly))]

    def translation(self, p, i):
        """Vector carrying edge (p, i) onto its partner."""
        q, j = self.glue[(p, i)]
        return vsub(self.vertex(q, j + 1), self.vertex(p, i))

    def corner_successor(self, p, i):
        """Next corner around the vertex, crossing edge (p, i)."""
        q, j = self.glue[(p, i)]
        return (q, (j + 1) % len(self.polygons[q]))

    def vertex_classes(self):
        seen, classes = set(), []
        for p, poly in enumerate(self.polygons):
            for i in range(len(poly)):
                if (p, i) in seen:
                    continue
                cls, c = [], (p, i)
                while c not in seen:
                    seen.add(c)
                    cls.append(c)
                    c = self.corner_successor(*c)
                classes.append(tuple(cls))
        return classes

    def corner_angle(self, p, i):
        a = self.edge(p, i - 1)
        b = self.edge(p, i)
        ax, ay, bx, by = (x.to_float() for x in (*a, *b))
        turn = math.atan2(ax * by - ay * bx, ax * bx + ay * by)
        return math.pi - turn

    def area(self):
        total = self.field.zero()
        for poly in self.polygons:
            for i in range(len(poly)):
                total = total + cross(poly[i], poly[(i + 1) % len(poly)])
        return total / 2

    def j_invariant(self):
        return j_invariant(self.polygons)

    def validate(self):
        """Check gluings, convexity and cone angles; return a report."""
        for p, poly in enumerate(self.polygons):
            if len(poly) < 3:
                raise SurfaceError(f"polygon {p} has fewer than three vertices")
            for i in range(len(poly)):
                if sign_at(cross(self.edge(p, i - 1), self.edge(p, i))) <= 0:
                    raise SurfaceError(f"polygon {p} is not strictly convex and counterclockwise at vertex {i}")
        for e in self.edges():
            if e not in self.glue:
                raise SurfaceError(f"edge {e[0]}.{e[1]} is not identified")
        for a, b in self.identifications:
            if a == b:
                raise SurfaceError(f"edge {a[0]}.{a[1]} is glued to itself")
            ea, eb = self.edge(*a), self.edge(*b)
            if ea[0] != -eb[0] or ea[1] != -eb[1]:
                raise SurfaceError(f"edges {a[0]}.{a[1]} and {b[0]}.{b[1]} are not opposite translates")
        cones = []
        for cls in self.vertex_classes():
            angle = sum(self.corner_angle(p, i) for p, i in cls)
            k = angle / (2 * math.pi)
            if abs(k - round(k)) > 1e-9 or round(k) < 1:
                raise SurfaceError(f"vertex class {cls} has angle {angle}, not a multiple of 2pi")
            cones.append(ConePoint(cls, angle))
        V, E, F = len(cones), len(self.identifications), len(self.polygons)
        chi = V - E + F
        if chi % 2 or chi > 2:
            raise SurfaceError(f"Euler characteristic {chi} is not that of a closed surface")
        genus = (2 - chi) // 2
        excess = sum(c.multiple - 1 for c in cones)
        if excess != 2 * genus - 2:
            raise SurfaceError("cone angles violate Gauss-Bonnet")
        return ValidationReport(tuple(cones), genus, chi)

    # -- transformations ----------------------------------------------------

    def transformed(self, g, name=None):
        """Image under the linear map g = (a, b, c, d); no determinant check."""
        a, b, c, d = g

        def act(v):
            return (a * v[0] + b * v[1], c * v[0] + d * v[1])

        return TranslationSurface([[act(v) for v in poly] for poly in self.polygons],
                                  self.identifications, name or self.name)

    def translated_polygons(self, offsets):
        return TranslationSurface([[vadd(v, o) for v in poly] for poly, o in zip(self.polygons, offsets)],
                                  self.identifications, self.name)


def apply_matrix(surface, g):
    """g . S for g in SL_2 with entries in the surface field (a GroupElement or a 4-tuple)."""
    entries = g.entries() if hasattr(g, "entries") else tuple(g)
    a, b, c, d = entries
    if a * d - b * c != 1:
        raise SurfaceError("apply_matrix needs a determinant one matrix")
    return surface.transformed(entries)


# -- file format ------------------------------------------------------------------

@dataclass
class SurfaceData:
    """A surface file: the surface plus optional flow direction and transversal segments."""
    surface: TranslationSurface
    direction: tuple = None
    transversals: list = dc_field(default_factory=list)   # (polygon, start, end)
    meta: dict = dc_field(default_factory=dict)

    def transversal(self):
        if not self.transversals:
            raise SurfaceError("the file names no transversal")
        parts = [Transversal(self.surface, p, a, end=b) for p, a, b in self.transversals]
        return parts[0] if len(parts) == 1 else TransversalUnion(parts)


def _point_text(v):
    return f"{format_coeffs(v[0].coeffs)}, {format_coeffs(v[1].coeffs)}"


def dump_surface(surface, direction=None, transversals=(), meta=None):
    lines = [f"name {surface.name}", f"field N={surface.field.N}"]
    for key, value in (meta or {}).items():
        lines.append(f"{key} {value}")
    if direction is not None:
        lines.append(f"direction {_point_text(direction)}")
    for p, a, b in transversals:
        lines.append(f"transversal {p} : {_point_text(a)} -> {_point_text(b)}")
    for poly in surface.polygons:
        lines.append("polygon")
        for v in poly:
            lines.append(f"  {_point_text(v)}")
        lines.append("end")
    for (p, i), (q, j) in surface.identifications:
        lines.append(f"identify {p}.{i} {q}.{j}")
    return "\n".join(lines) + "\n"


def _parse_point(text, field):
    xs, ys = text.split(",")
    return (parse_element(xs, field), parse_element(ys, field))


def parse_surface(text):
    """Parse the text format into a SurfaceData."""
    field, name, polygons, idents, meta = None, "surface", [], [], {}
    direction, transversals = None, []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        try:
            if head == "field":
                key, _, val = rest.partition("=")
                if key.strip() != "N":
                    raise SurfaceError("expected 'field N=<int>'")
                field = build_field(int(val))
            elif head == "name":
                name = rest.strip()
            elif head in ("polygon", "direction", "transversal") and field is None:
                raise SurfaceError(f"'field' must precede '{head}'")
            elif head == "polygon":
                current = []
            elif head == "end":
                if current is None:
                    raise SurfaceError("'end' without 'polygon'")
                polygons.append(current)
                current = None
            elif head == "identify":
                a, b = rest.split()
                idents.append((tuple(int(t) for t in a.split(".")), tuple(int(t) for t in b.split("."))))
            elif head == "direction":
                direction = _parse_point(rest, field)
            elif head == "transversal":
                poly, _, seg = rest.partition(":")
                start, _, end = seg.partition("->")
                transversals.append((int(poly), _parse_point(start, field), _parse_point(end, field)))
            elif current is not None:
                current.append(_parse_point(line, field))
            else:
                meta[head] = rest.strip()
        except SurfaceError as exc:
            raise SurfaceError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise SurfaceError(f"line {lineno}: malformed line {raw!r} ({exc})") from None
    if current is not None:
        raise SurfaceError("unterminated polygon block")
    return SurfaceData(TranslationSurface(polygons, idents, name), direction, transversals, meta)


def load_surface(path):
    with open(path) as fh:
        return parse_surface(fh.read())


# -- constructions ----------------------------------------------------------------

def _polygon_from_edges(edges, origin):
    pts, cur = [], origin
    for e in edges:
        pts.append(cur)
        cur = vadd(cur, e)
    if cur != origin:
        raise SurfaceError("edge vectors do not close up")
    return pts


def unit_square_torus():
    L = build_field(3)  # Q itself
    z, o = L.zero(), L.one()
    return TranslationSurface([[(z, z), (o, z), (o, o), (z, o)]], [((0, 0), (0, 2)), ((0, 1), (0, 3))], "torus")


def torus(field, a=(1, 0), b=(0, 1)):
    """Parallelogram torus spanned by a and b (as field elements or rationals)."""
    a = tuple(field(x) if not hasattr(x, "field") else x for x in a)
    b = tuple(field(x) if not hasattr(x, "field") else x for x in b)
    o = (field.zero(), field.zero())
    pts = [o, a, vadd(a, b), b]
    return TranslationSurface([pts], [((0, 0), (0, 2)), ((0, 1), (0, 3))], "torus")


def double_ngon(n):
    """Two regular n-gons, the second the negative of the first, edge k glued to edge k."""
    if n < 4:
        raise SurfaceError(f"double n-gon needs n >= 4, got {n}")
    L = build_field(2 * n)
    edges = []
    for k in range(n):
        # unit edge at angle 2 pi k/n: (cos, sin) with sin t = cos(pi/2 - t)
        edges.append((two_cos(L, 2 * k, n) / 2, two_cos(L, n - 4 * k, 2 * n) / 2))
    P0 = _polygon_from_edges(edges, (L.zero(), L.zero()))
    shift = (L(3), L.zero())
    P1 = _polygon_from_edges([(-x, -y) for x, y in edges], shift)
    return TranslationSurface([P0, P1], [((0, k), (1, k)) for k in range(n)], f"double-{n}-gon")


def semiregular_field(m, n):
    if m % 2 == 0 and n % 2 == 0:
        N = m * n // gcd(m, n)
    else:
        N = 2 * m * n // gcd(m, n)
    return build_field(N)


def _hooper_edges(m, n, k, c):
    """(angle index, length index) of the nonzero edges of P(k), counterclockwise."""
    out = []
    for j in range(2 * n):
        upper = (j - (k + c if n % 2 == 0 else c)) % 2 == 0
        s = k + 1 if upper else k
        if s % m:
            out.append((j, s, upper))
    return out


def hooper_surface(m, n, c=0, quotient=False, normalized=False):
    """Hooper's semi-regular polygon surface Y_{m,n}.

    P(k), 0 <= k < m, has edges at angles j pi/n whose lengths alternate
    between sin(k pi/m) and sin((k+1) pi/m); the longer-index ('upper') edges
    of P(k) are glued to the opposite 'lower' edges of P(k+1).  ``c`` picks
    which parity of angle carries the upper edges of P(0).  ``quotient``
    keeps P(0), ..., P(m/2 - 1) (m, n even), gluing the upper edges of the
    last polygon to each other.  ``normalized`` divides x-coordinates by
    sin(pi/n), which puts the vertices in L_n when m = n.
    """
    if quotient and (m % 2 or n % 2):
        raise SurfaceError("the quotient surface needs m and n even")
    if normalized:
        if m != n:
            raise SurfaceError("normalized coordinates are implemented for m = n")
        L = build_field(n if n % 2 else 2 * n)

        def edge_vec(j, s):
            x = sine_ratio(L, s, n) * two_cos(L, j, n) / 2
            y = (two_cos(L, s - j, n) - two_cos(L, s + j, n)) / 4
            return (x, y)
    else:
        L = semiregular_field(m, n)

        def edge_vec(j, s):
            length = two_cos(L, m - 2 * s, 2 * m) / 2
            return (length * two_cos(L, j, n) / 2, length * two_cos(L, n - 2 * j, 2 * n) / 2)

    count = m // 2 if quotient else m
    polys, edge_index, x0 = [], [], Fraction(0)
    for k in range(count):
        spec = _hooper_edges(m, n, k, c)
        vecs = [edge_vec(j, s) for j, s, _ in spec]
        width = sum(abs(v[0].to_float()) for v in vecs) / 2
        xmin = 0.0
        acc = 0.0
        for v in vecs:
            acc += v[0].to_float()
            xmin = min(xmin, acc)
        origin = (L(x0 - Fraction(math.floor(xmin))), L.zero())
        polys.append(_polygon_from_edges(vecs, origin))
        edge_index.append({(j, upper): i for i, (j, _, upper) in enumerate(spec)})
        x0 += math.ceil(width) + 2
    idents = []
    for k in range(count):
        for (j, upper), i in edge_index[k].items():
            if not upper:
                continue
            jj = (j + n) % (2 * n)
            if k + 1 < count:
                idents.append(((k, i), (k + 1, edge_index[k + 1][(jj, False)])))
            elif quotient and j < jj:
                idents.append(((k, i), (k, edge_index[k][(jj, True)])))
    name = f"Y{'e' if quotient else ''}_{m},{n}{' normalized' if normalized else ''}"
    return TranslationSurface(polys, idents, name)


# -- flow tracing ---------------------------------------------------------------

@dataclass
class _PolygonData:
    levels: list           # phi at each vertex
    edge_phi_sign: list    # sign of phi(e_i)
    chain: list            # outgoing edges in increasing level order
    chain_levels: list     # levels of chain vertices, len(chain) + 1
    chain_float: list


class Tracer:
    """Exact straight-line flow in direction w on a surface."""

    def __init__(self, surface, direction):
        self.surface = surface
        L = surface.field
        self.w = direction_vector(direction, L)
        if self.w[0].is_zero() and self.w[1].is_zero():
            raise TraceError("zero direction vector")
        self.phi = lambda p: self.w[0] * p[1] - self.w[1] * p[0]
        self.data = []
        for p, poly in enumerate(surface.polygons):
            k = len(poly)
            levels = [self.phi(v) for v in poly]
            signs = [sign_at(levels[(i + 1) % k] - levels[i]) for i in range(k)]
            start = next(i for i in range(k) if signs[i] > 0 and signs[i - 1] <= 0)
            chain = []
            i = start
            while signs[i] > 0:
                chain.append(i)
                i = (i + 1) % k
            chain_levels = [levels[i] for i in chain] + [levels[(chain[-1] + 1) % k]]
            self.data.append(_PolygonData(levels, signs, chain, chain_levels,
                                          [c.to_float() for c in chain_levels]))
        self.shift = {e: self.phi(surface.translation(*e)) for e in surface.edges()}

    def reversed(self):
        return Tracer(self.surface, (-self.w[0], -self.w[1]))

    def exit(self, p, c):
        """('edge', i) or ('vertex', i) for the flow line at level c leaving polygon p."""
        d = self.data[p]
        lv = d.chain_levels
        r = len(d.chain)
        if sign_at(c - lv[0]) <= 0:
            return ("vertex", d.chain[0])
        if sign_at(c - lv[r]) >= 0:
            return ("vertex", (d.chain[-1] + 1) % len(d.levels))
        lo, hi = 0, r  # lv[lo] < c < lv[hi]
        while hi - lo > 1:
            mid = (lo + hi) // 2
            s = sign_at(c - lv[mid])
            if s == 0:
                return ("vertex", d.chain[mid])
            if s > 0:
                lo = mid
            else:
                hi = mid
        return ("edge", d.chain[lo])

    def cross_edge(self, p, i, c):
        q, _ = self.surface.glue[(p, i)]
        return q, c + self.shift[(p, i)]

    def point_at(self, p, i, c):
        """Point of edge (p, i) at level c."""
        v = self.surface.vertex(p, i)
        e = self.surface.edge(p, i)
        t = (c - self.phi(v)) / self.phi(e)
        return vadd(v, vscale(t, e))

    def separatrix_corners(self):
        """Corners (p, i) whose vertex emits a forward ray into polygon p."""
        out = []
        for p, d in enumerate(self.data):
            k = len(d.levels)
            for i in range(k):
                if d.edge_phi_sign[i] < 0 and d.edge_phi_sign[i - 1] < 0:
                    out.append((p, i))
        return out

    def parallel_edges(self):
        return [(p, i) for p, d in enumerate(self.data) for i, s in enumerate(d.edge_phi_sign) if s == 0]


@dataclass
class TraceResult:
    itinerary: list
    outcome: str            # 'vertex', 'closed', 'transversal', 'budget'
    polygon: int
    level: object
    vertex: tuple = None
    param: object = None


def _start_polygon_level(surface, tracer, polygon, point):
    return polygon, tracer.phi(point)


def trace_flow(surface, direction, polygon, point, max_crossings=DEFAULT_MAX_CROSSINGS, tracer=None):
    """Follow the flow from ``point`` in ``polygon`` until a vertex, a closed orbit, or the budget."""
    tracer = tracer or Tracer(surface, direction)
    for i, v in enumerate(surface.polygons[polygon]):
        if v == tuple(point):
            raise TraceError(f"start point is vertex {i} of polygon {polygon}")
    p, c = polygon, tracer.phi(point)
    p0, c0 = p, c
    itinerary = []
    for _ in range(max_crossings):
        kind, i = tracer.exit(p, c)
        if kind == "vertex":
            return TraceResult(itinerary, "vertex", p, c, vertex=(p, i))
        itinerary.append((p, i))
        p, c = tracer.cross_edge(p, i, c)
        if p == p0 and c == c0:
            return TraceResult(itinerary, "closed", p, c)
    return TraceResult(itinerary, "budget", p, c)


# -- transversals and first return --------------------------------------------------

@dataclass
class _Piece:
    polygon: int
    a: tuple
    b: tuple
    param0: object
    length: object
    sigma: int = 1


class Transversal:
    """A straight segment from ``start`` (in ``polygon``) along ``vector``, developed across edges.

    Parameters along the segment are measured by the level functional of the
    flow, so lengths are transverse measures.
    """

    def __init__(self, surface, polygon, start, vector=None, end=None, truncate=False):
        if (vector is None) == (end is None):
            raise TraceError("give exactly one of vector or end")
        if end is not None:
            vector = vsub(end, start)
        self.surface = surface
        self.polygon = polygon
        self.start = tuple(start)
        self.vector = tuple(vector)
        if self.vector[0].is_zero() and self.vector[1].is_zero():
            raise TraceError("transversal has zero length")
        self.truncated = False
        self._develop(truncate)

    @property
    def end(self):
        return self.segments[-1][2]

    def _overlap(self, p, x, u, t_seg):
        """Smallest t in [0, t_seg] with x + t u on an earlier segment in polygon p, or None."""
        k = 0 if not u[0].is_zero() else 1
        best = None
        for q, a, b in self.segments:
            if q != p or sign_at(cross(vsub(a, x), u)) != 0:
                continue
            sa, sb = (a[k] - x[k]) / u[k], (b[k] - x[k]) / u[k]
            lo, hi = (sa, sb) if sign_at(sb - sa) > 0 else (sb, sa)
            if sign_at(hi) < 0 or sign_at(lo - t_seg) > 0:
                continue
            first = lo if sign_at(lo) > 0 else x[0].field.zero()
            if best is None or sign_at(first - best) < 0:
                best = first
        return best

    def _develop(self, truncate):
        S = self.surface
        p, x, u = self.polygon, self.start, self.vector
        one = S.field.one()
        remaining = one  # fraction of u still to travel
        self.segments = []  # (polygon, a, b) in polygon coordinates
        for _ in range(10_000):
            poly = S.polygons[p]
            t_exit, edge = None, None
            for i in range(len(poly)):
                e = S.edge(p, i)
                den = cross(u, e)
                if sign_at(den) <= 0:
                    continue  # u does not leave through edge i
                # x + t u on the line of edge i: cross(x + t u - v_i, e) = 0
                t = cross(vsub(poly[i], x), e) / den
                if sign_at(t) > 0 and (t_exit is None or sign_at(t - t_exit) < 0):
                    t_exit, edge = t, i
            if t_exit is None:
                raise TraceError("transversal does not enter the polygon")
            last = sign_at(t_exit - remaining) >= 0
            t_seg = remaining if last else t_exit
            hit = self._overlap(p, x, u, t_seg)
            if hit is not None:
                if not truncate:
                    raise TraceError("transversal overlaps itself")
                if sign_at(hit) > 0:
                    self.segments.append((p, x, vadd(x, vscale(hit, u))))
                self._finish(one - remaining + hit)
                return
            y = vadd(x, vscale(t_seg, u))
            if y in poly:
                raise TraceError("transversal passes through a vertex")
            self.segments.append((p, x, y))
            if last:
                return
            remaining = remaining - t_exit
            q, _ = S.glue[(p, edge)]
            x = vadd(y, S.translation(p, edge))
            p = q
        raise TraceError("transversal too long")

    def _finish(self, fraction):
        if not self.segments:
            raise TraceError("transversal overlaps itself immediately")
        self.vector = vscale(fraction, self.vector)
        self.truncated = True

    @property
    def components(self):
        return [self.segments]

    def pieces(self, tracer):
        return _pieces_of(self.components, tracer)


class TransversalUnion:
    """Disjoint transversal segments, parametrized one after another."""

    def __init__(self, parts):
        self.parts = list(parts)
        if not self.parts:
            raise TraceError("empty transversal union")
        self.surface = self.parts[0].surface

    @property
    def components(self):
        return [seg for part in self.parts for seg in part.components]

    def pieces(self, tracer):
        return _pieces_of(self.components, tracer)


def _pieces_of(components, tracer):
    """Pieces with cumulative parameters, and the parameters of component ends."""
    out, acc = [], tracer.surface.field.zero()
    bounds = [acc]
    for segments in components:
        p0, a0, b0 = segments[0]
        sigma = sign_at(tracer.phi(vsub(b0, a0)))
        if sigma == 0:
            raise TraceError("transversal is parallel to the flow")
        for p, a, b in segments:
            length = sigma * (tracer.phi(b) - tracer.phi(a))
            out.append(_Piece(p, a, b, acc, length, sigma))
            acc = acc + length
        bounds.append(acc)
    return out, bounds


class _TransversalIndex:
    def __init__(self, transversal, tracer):
        self.tracer = tracer
        self.pieces, self.bounds = transversal.pieces(tracer)
        self.total = self.bounds[-1]
        self.by_polygon = defaultdict(list)
        for piece in self.pieces:
            self.by_polygon[piece.polygon].append(piece)

    def hit(self, p, c, origin=None, strict=False):
        """First transversal parameter on the chord at level c of polygon p, or None.

        ``origin`` is where the flow line starts within p (an entry point or
        a starting point); hits behind it, or on it when ``strict``, are ignored.
        """
        found = []
        for piece in self.by_polygon.get(p, ()):
            off = piece.sigma * (c - self.tracer.phi(piece.a))
            if sign_at(off) >= 0 and sign_at(piece.length - off) >= 0:
                found.append((piece, off))
        if not found:
            return None
        if len(found) == 1 and origin is None:
            piece, off = found[0]
            return piece.param0 + off
        w = self.tracer.w
        best, best_s = None, None
        for piece, off in found:
            y = vadd(piece.a, vscale(off / piece.length, vsub(piece.b, piece.a)))
            s = (y[0] - origin[0]) * w[0] + (y[1] - origin[1]) * w[1]
            sg = sign_at(s)
            if sg < 0 or (strict and sg == 0):
                continue
            if best is None or sign_at(s - best_s) < 0:
                best, best_s = piece.param0 + off, s
        return best

    def locate(self, t):
        """(polygon, level, point) of parameter t, t strictly inside some piece."""
        for piece in self.pieces:
            off = t - piece.param0
            if sign_at(off) > 0 and sign_at(piece.length - off) > 0:
                point = vadd(piece.a, vscale(off / piece.length, vsub(piece.b, piece.a)))
                return piece.polygon, self.tracer.phi(piece.a) + piece.sigma * off, point
        return None

    def is_endpoint(self, t):
        return any(t == b for b in self.bounds)

    def endpoints(self):
        """(parameter, polygon, point) for each end of each component."""
        out = []
        for piece in self.pieces:
            if any(piece.param0 == b for b in self.bounds):
                out.append((piece.param0, piece.polygon, piece.a))
            end = piece.param0 + piece.length
            if any(end == b for b in self.bounds):
                out.append((end, piece.polygon, piece.b))
        return out


@dataclass
class FirstReturnResult:
    iet: IntervalExchange
    return_words: list
    complete: bool
    discontinuities: list = dc_field(default_factory=list)
    diagnostics: list = dc_field(default_factory=list)


def _trace_to_transversal(tracer, index, p, c, max_crossings, start):
    """Follow the flow from point ``start`` of polygon p until the transversal, a vertex, or the budget."""
    itinerary = []
    t = index.hit(p, c, start, strict=True)
    if t is not None:
        return TraceResult(itinerary, "transversal", p, c, param=t)
    for _ in range(max_crossings):
        kind, i = tracer.exit(p, c)
        if kind == "vertex":
            return TraceResult(itinerary, "vertex", p, c, vertex=(p, i))
        itinerary.append((p, i))
        q, j = tracer.surface.glue[(p, i)]
        p, c = tracer.cross_edge(p, i, c)
        if p in index.by_polygon:
            t = index.hit(p, c, tracer.point_at(q, j, c) if len(index.by_polygon[p]) > 1 else None)
            if t is not None:
                return TraceResult(itinerary, "transversal", p, c, param=t)
    return TraceResult(itinerary, "budget", p, c)


def _unique_sorted(values):
    vals = sorted(values, key=lambda v: v.to_float())
    out = []
    for v in vals:
        if not out or v != out[-1]:
            out.append(v)
    # repair float ties with exact comparisons
    for k in range(1, len(out)):
        j = k
        while j > 0 and sign_at(out[j] - out[j - 1]) < 0:
            out[j], out[j - 1] = out[j - 1], out[j]
            j -= 1
    return out


def first_return(surface, direction, transversal, max_crossings=DEFAULT_MAX_CROSSINGS):
    """First return map of the flow to ``transversal`` as an interval exchange."""
    fwd = Tracer(surface, direction)
    bwd = fwd.reversed()
    fidx = _TransversalIndex(transversal, fwd)
    bidx = _TransversalIndex(transversal, bwd)
    total = fidx.total
    diagnostics = []
    cuts = []

    def record(res, what):
        if res.outcome == "transversal" and not bidx.is_endpoint(res.param):
            cuts.append(res.param)
        elif res.outcome == "budget":
            diagnostics.append(f"backward trace from {what} exceeded {max_crossings} crossings")

    for p, i in bwd.separatrix_corners():
        v = surface.vertex(p, i)
        c = bwd.phi(v)
        res = _trace_to_transversal(bwd, bidx, p, c, max_crossings, v)
        record(res, f"vertex {p}.{i}")
    for t_end, p, point in bidx.endpoints():
        if point in surface.polygons[p]:
            continue
        res = _trace_to_transversal(bwd, bidx, p, bwd.phi(point), max_crossings, point)
        record(res, f"endpoint {t_end.numeric(6)}")
    # transversal points on flow-parallel edges run straight into a vertex
    for piece in fidx.pieces:
        if fidx.is_endpoint(piece.param0):
            continue
        p, a = piece.polygon, piece.a
        for q, i in fwd.parallel_edges():
            if q != p:
                continue
            if sign_at(cross(vsub(a, surface.vertex(q, i)), surface.edge(q, i))) == 0:
                cuts.append(piece.param0)
    points = _unique_sorted([total.field.zero(), total] + cuts)
    lengths, translations, words = [], [], []
    complete = not diagnostics
    for lo, hi in zip(points, points[1:]):
        mid = (lo + hi) / 2
        loc = fidx.locate(mid)
        if loc is None:
            mid = (2 * lo + hi) / 3
            loc = fidx.locate(mid)
        p, c, x = loc
        res = _trace_to_transversal(fwd, fidx, p, c, max_crossings, x)
        if res.outcome != "transversal" or fidx.is_endpoint(res.param):
            complete = False
            diagnostics.append(f"orbit of {mid.numeric(8)} ended with {res.outcome}")
            return FirstReturnResult(None, words, False, points, diagnostics)
        lengths.append(hi - lo)
        translations.append(res.param - mid)
        words.append(res.itinerary)
    try:
        iet = IntervalExchange.from_translations(lengths, translations)
    except ValueError as exc:
        diagnostics.append(str(exc))
        return FirstReturnResult(None, words, False, points, diagnostics)
    return FirstReturnResult(iet, words, complete, points, diagnostics)


def corner_transversal(surface, direction, polygon, corner, scale=1):
    """Segment from a vertex, perpendicular to the flow, across the polygon.

    The segment leaves vertex ``corner`` of ``polygon`` in the direction
    (-w_y, w_x) or its negative (whichever points into the corner), and
    stops on the far side of the polygon (times ``scale`` <= 1).
    """
    L = surface.field
    wx, wy = direction_vector(direction, L)
    v = surface.vertex(polygon, corner)
    e_in, e_out = surface.edge(polygon, corner - 1), surface.edge(polygon, corner)
    for u in ((-wy, wx), (wy, -wx)):
        if sign_at(cross(e_out, u)) > 0 and sign_at(cross(e_in, u)) > 0:
            break
    else:
        raise TraceError("no perpendicular enters the polygon at this corner")
    poly = surface.polygons[polygon]
    best = None
    for i in range(len(poly)):
        e = surface.edge(polygon, i)
        den = cross(u, e)
        if sign_at(den) <= 0:
            continue
        t = cross(vsub(poly[i], v), e) / den
        if sign_at(t) > 0 and (best is None or sign_at(t - best) < 0):
            best = t
    scale = L(scale) if not hasattr(scale, "field") else scale
    return Transversal(surface, polygon, v, vector=vscale(best * scale, u))


# -- periodic directions ----------------------------------------------------------

@dataclass
class PeriodicResult:
    status: str              # 'periodic' or 'unknown'
    cylinders: int = 0
    saddle_connections: int = 0
    budget: int = 0
    reason: str = ""

    @property
    def periodic(self):
        return self.status == "periodic"


def detect_periodic(surface, direction, max_crossings=DEFAULT_MAX_CROSSINGS):
    """Cylinder decomposition test: every separatrix must end in a vertex within the budget."""
    tr = Tracer(surface, direction)
    singular = defaultdict(list)
    for p, d in enumerate(tr.data):
        singular[p].extend(d.levels)
    connections = len(tr.parallel_edges())
    for p, i in tr.separatrix_corners():
        c = tr.phi(surface.vertex(p, i))
        q = p
        for _ in range(max_crossings):
            singular[q].append(c)
            kind, j = tr.exit(q, c)
            if kind == "vertex":
                connections += 1
                break
            q, c = tr.cross_edge(q, j, c)
        else:
            return PeriodicResult("unknown", budget=max_crossings,
                                  reason=f"separatrix from {p}.{i} did not end within the budget")
    strips = {}
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in range(len(surface.polygons)):
        levels = _unique_sorted(singular[p])
        strips[p] = levels
        for k in range(len(levels) - 1):
            parent[(p, k)] = (p, k)
    for p, levels in strips.items():
        for k in range(len(levels) - 1):
            mid = (levels[k] + levels[k + 1]) / 2
            kind, i = tr.exit(p, mid)
            if kind != "edge":
                return PeriodicResult("unknown", reason="strip midline meets a vertex")
            q, c = tr.cross_edge(p, i, mid)
            target = _strip_of(strips[q], c)
            if target is None:
                return PeriodicResult("unknown", reason="strip does not continue into a strip")
            a, b = find((p, k)), find((q, target))
            if a != b:
                parent[a] = b
    cylinders = len({find(x) for x in parent})
    return PeriodicResult("periodic", cylinders, connections, max_crossings)


def _strip_of(levels, c):
    lo, hi = 0, len(levels) - 1
    if sign_at(c - levels[lo]) <= 0 or sign_at(c - levels[hi]) >= 0:
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        s = sign_at(c - levels[mid])
        if s == 0:
            return None
        if s > 0:
            lo = mid
        else:
            hi = mid
    return lo
