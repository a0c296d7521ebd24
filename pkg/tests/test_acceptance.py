"""Acceptance checks; each test prints a verdict line in the terminal summary."""

import random
from fractions import Fraction
from math import gcd, sqrt

import pytest

from flatsaf.cases import (EIGHT_FOUR_FILE, EIGHT_FOUR_PERMUTATION, data_path, eight_four_direction,
                           seven_seven_case, standard_transversal)
from flatsaf.congruence import INF, nonparabolic_certificate
from flatsaf.field import build_field, cos_value, is_unit, lift, minimal_polynomial, sign_at, sin_product, two_cos
from flatsaf.flux import csv_text
from flatsaf.group import (GroupElement, TriangleGroupSpec, entry_pattern, evaluate_word, generators,
                           invariant_trace_field, is_obstructed_pair, moebius_apply, parity, power_closed_form,
                           trace_field)
from flatsaf.saf import IntervalExchange, project_j, saf
from flatsaf.special import seven_seven_example, special_pa
from flatsaf.surface import (Transversal, apply_matrix, detect_periodic, double_ngon, first_return,
                             hooper_surface, load_surface, torus)

GRID = [(m, n) for m in range(3, 13) for n in range(3, 13)]
EVEN_GRID = [(m, n) for m, n in GRID if m % 2 == 0 and n % 2 == 0]


@pytest.mark.criterion(1, "minimal polynomial of 2cos(pi/7)")
def test_criterion_01_minimal_polynomial(criterion):
    assert tuple(build_field(7).minpoly) == (1, -2, -1, 1)


@pytest.mark.criterion(2, "C = AB on the 3..12 grid")
def test_criterion_02_generator_identity(criterion):
    bad = []
    for m, n in GRID:
        A, B, C = generators(TriangleGroupSpec(m, n))
        if (A @ B).entries() != C.entries():
            bad.append((m, n))
    assert not bad


@pytest.mark.criterion(3, "closed-form powers of B and C")
def test_criterion_03_closed_form_powers(criterion):
    bad = []
    for m, n in GRID:
        spec = TriangleGroupSpec(m, n)
        _, B, C = generators(spec)
        top = 2 * max(m, n)
        for which, g in (("B", B), ("C", C)):
            up = down = GroupElement.identity(spec.field)
            ginv = g.inverse()
            for k in range(top + 1):
                if power_closed_form(which, k, spec).entries() != up.entries():
                    bad.append((m, n, which, k))
                if power_closed_form(which, -k, spec).entries() != down.entries():
                    bad.append((m, n, which, -k))
                up, down = up @ g, down @ ginv
    assert not bad


@pytest.mark.criterion(4, "B^(m/2) C^(n/2) fixes -1 and 1")
def test_criterion_04_fixed_points(criterion):
    for m, n in EVEN_GRID:
        spec = TriangleGroupSpec(m, n)
        g = evaluate_word((("B", m // 2), ("C", n // 2)), spec)
        one = spec.field.one()
        assert moebius_apply(g, one) == one, (m, n)
        assert moebius_apply(g, -one) == -one, (m, n)


@pytest.mark.criterion(5, "(8,4) certificate: exponent 1, quartic dilatation")
def test_criterion_05_eight_four(criterion):
    cert = special_pa(8, 4)
    assert cert.exponent == 1
    poly = minimal_polynomial(cert.dilatation)
    assert len(poly) - 1 == 4
    expected = 3 + 2 * sqrt(2) + sqrt(20 + 14 * sqrt(2))
    criterion.note(f"dilatation {cert.dilatation.numeric(12)}")
    assert abs(cert.dilatation.to_float() - expected) < 1e-9


@pytest.mark.criterion(6, "dilatation times sin sin closed form")
def test_criterion_06_dilatation_closed_form(criterion):
    pairs = [(m, n) for m, n in EVEN_GRID if not is_obstructed_pair(m, n) and gcd(m, n) % 4 == 0]
    assert pairs
    for m, n in pairs:
        cert = special_pa(m, n)
        L = build_field(2 * m * n // gcd(m, n))
        d = lift(cert.dilatation, L)
        cm, cn = cos_value(L, m) / 2, cos_value(L, n) / 2
        assert d * sin_product(L, m, n) == cm * cn + cm + cn + 1, (m, n)
    criterion.note(f"{len(pairs)} pairs")


@pytest.mark.criterion(7, "(7,7) example: M = AC^5, beta, stated dilatation")
def test_criterion_07_seven_seven(criterion):
    e = seven_seven_example()
    lam = e.matrix.a.field.gen()
    assert e.matrix.entries() == (-1 - 2 * lam ** 2, -2 + 3 * lam + 2 * lam ** 2, -lam, -1 + lam ** 2)
    alpha = 7 * lam ** 2 + lam - 1
    beta = (alpha + 13) / (alpha - 16)
    assert beta * beta == alpha
    stated = -9 * lam ** 2 + 10 * lam + 16
    assert len(minimal_polynomial(stated)) - 1 == 3
    t = e.matrix.trace()
    criterion.note(f"|tr M| = {abs(t).numeric(9)}, stated d + 1/d = {(stated + 1 / stated).numeric(9)}")
    assert stated + 1 / stated == abs(t)


@pytest.mark.criterion(8, "(4,7) mod 2 orbit of infinity")
def test_criterion_08_congruence(criterion):
    cert = nonparabolic_certificate(4, 7, 2)
    q = cert.quotient
    F = cert.report.field
    assert q.f == 3
    x = (0, 1, 0)
    one, zero = (1, 0, 0), (0, 0, 0)
    x2 = F.mul(x, x)
    expected = {INF, zero, one, x, x2, F.add(x, one), F.add(x2, x)}
    assert len(cert.report.orbit) == 7
    assert set(cert.report.orbit) == expected
    assert F.add(F.add(x2, x), one) in cert.report.complement


@pytest.mark.criterion(9, "units among 2cos(pi/m)")
def test_criterion_09_leutbecher(criterion):
    for m in (5, 7, 9, 12, 15, 20):
        assert is_unit(two_cos(build_field(m), 1, m)), m
    for m in (4, 6, 8, 16, 18):
        assert not is_unit(two_cos(build_field(m), 1, m)), m


@pytest.mark.criterion(10, "obstruction criterion matches field dimensions")
def test_criterion_10_obstruction(criterion):
    for m, n in GRID:
        spec = TriangleGroupSpec(m, n)
        differs = trace_field(spec).dimension != invariant_trace_field(spec).dimension
        assert is_obstructed_pair(m, n) == differs, (m, n)


def _random_word(rng):
    return tuple((rng.choice("ABC"), rng.choice([-3, -2, -1, 1, 2, 3])) for _ in range(rng.randint(1, 5)))


@pytest.mark.criterion(11, "parity is a homomorphism and matches entry patterns")
def test_criterion_11_parity(criterion):
    rng = random.Random(11)
    for m, n in ((4, 6), (6, 10), (6, 6)):
        spec = TriangleGroupSpec(m, n)
        k = invariant_trace_field(spec)
        for _ in range(100):
            u, v = _random_word(rng), _random_word(rng)
            pu, pv, puv = parity(u, spec), parity(v, spec), parity(u + v, spec)
            assert (puv == "odd") == ((pu == "odd") != (pv == "odd"))
            g = evaluate_word(u + v, spec)
            assert entry_pattern(g, spec, k) == puv, (m, n, u, v)


@pytest.mark.criterion(12, "SAF: rational zero, periodic zero, rotation nonzero")
def test_criterion_12_saf(criterion):
    rng = random.Random(12)
    Q = build_field(3)
    for _ in range(50):
        size = rng.randint(1, 7)
        lengths = [Q(Fraction(rng.randint(1, 40), rng.randint(1, 9))) for _ in range(size)]
        perm = list(range(1, size + 1))
        rng.shuffle(perm)
        assert saf(IntervalExchange(lengths, perm)).is_zero()
    S = double_ngon(8)
    L = S.field
    direction = (L.zero(), L.one())
    assert detect_periodic(S, direction).periodic
    p, a, b = standard_transversal(S, direction)
    fr = first_return(S, direction, Transversal(S, p, a, end=b))
    assert fr.complete and saf(fr.iet).is_zero()
    L7 = build_field(7)
    rotation = IntervalExchange([L7.one(), L7.gen()], [2, 1])
    assert not saf(rotation).is_zero()


@pytest.mark.criterion(13, "Y^e_{8,4} first return permutation")
def test_criterion_13_surface_pipeline(criterion):
    path = data_path(EIGHT_FOUR_FILE)
    if not path.exists():
        pytest.skip("surface data file is absent")
    data = load_surface(path)
    fr = first_return(data.surface, data.direction, data.transversal())
    assert fr.iet is not None and fr.complete
    criterion.note("found " + " ".join(map(str, fr.iet.permutation)))
    assert len(fr.iet) == 11
    assert fr.iet.permutation == EIGHT_FOUR_PERMUTATION


def _j_and_saf(S, direction):
    p, a, b = standard_transversal(S, direction)
    fr = first_return(S, direction, Transversal(S, p, a, end=b))
    assert fr.complete
    return project_j(S.j_invariant(), direction, S.field).is_zero(), saf(fr.iet).is_zero()


def _random_sl2q(rng, L):
    while True:
        a, b, c = (Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(3))
        if a:
            return tuple(L(x) for x in (a, b, c, (1 + b * c) / a))


@pytest.mark.criterion(14, "J projection vanishes exactly when first-return SAF does")
def test_criterion_14_j_projection(criterion):
    L7 = build_field(7)
    T = torus(L7)
    octagon, pentagon = double_ngon(8), double_ngon(5)
    Y = hooper_surface(8, 4, quotient=True)
    cases = [
        (T, (L7.one(), L7.one() / 2)),
        (T, (L7.one(), L7.gen())),
        (octagon, (octagon.field.zero(), octagon.field.one())),
        (octagon, (octagon.field.one(), octagon.field.gen())),
        (pentagon, (pentagon.field.zero(), pentagon.field.one())),
        (Y, eight_four_direction(Y.field)),
    ]
    verdicts = []
    for S, direction in cases:
        jz, sz = _j_and_saf(S, direction)
        assert jz == sz, (S.name, direction)
        verdicts.append(jz)
    assert True in verdicts and False in verdicts
    rng = random.Random(14)
    for k in range(10):
        S, direction = cases[k % len(cases)]
        L = S.field
        a, b, c, d = _random_sl2q(rng, L)
        wx, wy = direction
        moved = (a * wx + b * wy, c * wx + d * wy)
        before = project_j(S.j_invariant(), direction, L).is_zero()
        after = project_j(apply_matrix(S, (a, b, c, d)).j_invariant(), moved, L).is_zero()
        assert before == after
    criterion.note(f"{len(cases)} pairs, {verdicts.count(True)} vanishing")


@pytest.mark.criterion(15, "(7,7) flux walk, N = 2000, x = lambda^3/8")
def test_criterion_15_flux_walk(criterion):
    case = seven_seven_case(steps=2000)
    w = case.walk
    assert w.truncated_at is None and len(w.points) == 2000
    for x in w.trail:
        assert sign_at(x) >= 0 and sign_at(1 - x) > 0
    assert csv_text(w.points) == csv_text(seven_seven_case(steps=2000).walk.points)
    criterion.note(f"max |coordinate| {w.max_abs():.3f}")
