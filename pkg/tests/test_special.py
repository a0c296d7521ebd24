import math

import pytest

from flatsaf.field import DomainError, build_field, lift, minimal_polynomial, sign_at
from flatsaf.group import TriangleGroupSpec, evaluate_word, is_obstructed_pair, moebius_apply
from flatsaf.special import (ObstructionError, closed_form_dilatation, dilatation_of, hooper_direction,
                             hooper_map, seven_seven_example, special_pa)

EVEN = [(m, n) for m in range(4, 15, 2) for n in range(4, 15, 2)]
UNOBSTRUCTED = [(m, n) for m, n in EVEN if not is_obstructed_pair(m, n)]
FOUR_DIVIDES = [(m, n) for m, n in UNOBSTRUCTED if math.gcd(m, n) % 4 == 0]


@pytest.mark.parametrize("m, n", UNOBSTRUCTED)
def test_certificate_is_consistent(m, n):
    cert = special_pa(m, n)
    d, t = cert.dilatation, cert.matrix.trace()
    assert sign_at(d - 1) > 0
    assert d + 1 / d == (t if sign_at(t) > 0 else -t)
    assert cert.exponent == (1 if math.gcd(m, n) % 4 == 0 else 2)
    for z in cert.fixed_points:
        assert moebius_apply(cert.matrix, z) == z


@pytest.mark.parametrize("m, n", FOUR_DIVIDES)
def test_closed_form_dilatation(m, n):
    cert = special_pa(m, n)
    L = build_field(2 * m * n // math.gcd(m, n))
    assert lift(cert.dilatation, L) == closed_form_dilatation(m, n, L)


def test_eight_four_numbers():
    cert = special_pa(8, 4)
    assert abs(cert.dilatation.to_float() - (3 + 2 * math.sqrt(2) + math.sqrt(20 + 14 * math.sqrt(2)))) < 1e-12
    assert len(minimal_polynomial(cert.dilatation)) == 5
    assert abs(cert.direction.to_float() - math.tan(math.pi / 8)) < 1e-12


@pytest.mark.parametrize("m, n", [(4, 6), (6, 6), (6, 10), (2, 8)])
def test_obstructed_pairs_refused(m, n):
    with pytest.raises(ObstructionError):
        special_pa(m, n)


def test_odd_index_refused():
    with pytest.raises(DomainError):
        special_pa(4, 7)


@pytest.mark.parametrize("n", [3, 4, 5, 7, 8])
def test_hooper_direction_is_tan(n):
    assert abs(hooper_direction(n).to_float() - math.tan(math.pi / (2 * n))) < 1e-12


def test_hooper_map_sends_plus_minus_one():
    D = hooper_map(4)
    L = D.field
    assert abs(moebius_apply(D, -L.one()).to_float() + 1 / math.tan(math.pi / 8)) < 1e-12


def test_dilatation_of_elliptic_is_none():
    B = evaluate_word((("B", 1),), TriangleGroupSpec(4, 7))
    assert dilatation_of(B) is None


def test_seven_seven_report():
    e = seven_seven_example()
    lam = e.matrix.field.gen()
    assert e.beta * e.beta == e.alpha
    assert e.special
    assert set(e.fixed_points) == {-lam ** 2 + 2 * lam + 1, lam ** 2 + lam - 1}
    assert e.dilatation == lam ** 2 + lam
    assert len(minimal_polynomial(e.dilatation)) == 4
    assert not e.stated_dilatation_ok


def test_seven_seven_flow_uses_attracting_point():
    e = seven_seven_example()
    g = e.matrix
    z = next(p for p in e.fixed_points if sign_at((g.c * p + g.d) ** 2 - 1) > 0)
    c = 2 * math.cos(math.pi / 7) / 2
    expected = (z.to_float() - c) / (1 - c * c)
    assert abs(e.normalized_directions[0].to_float() - expected) < 1e-12
