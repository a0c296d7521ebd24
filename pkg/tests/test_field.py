import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from flatsaf.field import (DomainError, IncompatibleIndexError, InvalidAutomorphismError, InvalidIndexError,
                           NotASquare, build_field, format_coeffs, galois_conjugate, is_unit, lift,
                           minimal_polynomial, norm, parse_element, sign_at, sin_product, sqrt_in_field,
                           subfield_closure, two_cos)

INDICES = [3, 4, 5, 7, 8, 9, 12, 16]


def totient(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


small_fraction = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def elements(draw, indices=INDICES):
    L = build_field(draw(st.sampled_from(indices)))
    return L.element(draw(st.lists(small_fraction, min_size=L.degree, max_size=L.degree)))


@st.composite
def element_pairs(draw):
    a = draw(elements())
    L = a.field
    b = L.element(draw(st.lists(small_fraction, min_size=L.degree, max_size=L.degree)))
    return a, b


def test_minpoly_of_seven():
    assert tuple(build_field(7).minpoly) == (1, -2, -1, 1)


@pytest.mark.parametrize("N", range(3, 40))
def test_degree_and_root(N):
    L = build_field(N)
    assert L.degree == totient(2 * N) // 2
    lam = 2 * math.cos(math.pi / N)
    assert abs(sum(c * lam ** i for i, c in enumerate(L.minpoly))) < 1e-8
    for lo, hi in L.isolating_intervals:
        assert lo < hi
    ivs = sorted(L.isolating_intervals)
    assert all(a[1] < b[0] for a, b in zip(ivs, ivs[1:]))


def test_small_index_rejected():
    with pytest.raises(InvalidIndexError):
        build_field(2)


def test_fields_are_cached():
    assert build_field(9) is build_field(9)


@given(element_pairs())
def test_ring_axioms(pair):
    a, b = pair
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * b == a * b + b * b
    assert a - a == a.field.zero()


@given(elements())
def test_inverse(a):
    assume(not a.is_zero())
    assert a * a.inverse() == a.field.one()


@given(elements())
def test_float_shadow_matches(a):
    lam = 2 * math.cos(math.pi / a.field.N)
    approx = sum(float(c) * lam ** i for i, c in enumerate(a.coeffs))
    assert abs(a.to_float() - approx) < 1e-6 * (1 + abs(approx))


@given(elements())
def test_sign_agrees_with_shadow(a):
    x = a.to_float()
    if abs(x) > 1e-6:
        assert sign_at(a) == (1 if x > 0 else -1)
    if a.is_zero():
        assert sign_at(a) == 0


def test_sign_of_tiny_difference():
    # 2cos(pi/5) - (1 + sqrt 5)/2 is zero; a near miss must not be
    L = build_field(5)
    lam = L.gen()
    assert sign_at(lam * lam - lam - 1) == 0
    assert sign_at(lam - Fraction(161803398875, 10**11)) == -1


@given(elements())
def test_parse_format_roundtrip(a):
    text = f"{format_coeffs(a.coeffs)} | N={a.field.N}"
    assert parse_element(text) == a


@pytest.mark.parametrize("bad", ["", "x^", "2**x", "1 + y", "3x | N=", "1/0x"])
def test_parse_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_element(bad, build_field(7))


def test_parse_field_mismatch():
    with pytest.raises(IncompatibleIndexError):
        parse_element("x | N=5", build_field(7))


@given(element_pairs(), st.integers(min_value=1, max_value=60))
def test_galois_is_a_homomorphism(pair, k):
    a, b = pair
    N = a.field.N
    assume(math.gcd(k, 2 * N) == 1)
    s = lambda z: galois_conjugate(z, k)
    assert s(a * b) == s(a) * s(b)
    assert s(a + b) == s(a) + s(b)


def test_galois_rejects_even_exponent():
    with pytest.raises(InvalidAutomorphismError):
        galois_conjugate(build_field(7).gen(), 2)


def test_galois_numeric():
    L = build_field(7)
    lam = L.gen()
    assert abs(galois_conjugate(lam, 3).to_float() - 2 * math.cos(3 * math.pi / 7)) < 1e-12


@given(elements())
@settings(max_examples=40, deadline=None)
def test_minimal_polynomial_annihilates(a):
    m = minimal_polynomial(a)
    acc = a.field.zero()
    for c in reversed(m):
        acc = acc * a + c
    assert acc.is_zero()
    assert m[-1] == 1
    assert a.field.degree % (len(m) - 1) == 0


@given(elements(indices=[5, 7, 8, 9, 12]))
@settings(max_examples=30, deadline=None)
def test_sqrt_of_square(a):
    assume(not a.is_zero())
    r = sqrt_in_field(a * a)
    assert r is not NotASquare
    assert r * r == a * a
    assert sign_at(r) > 0


def test_sqrt_non_square():
    L = build_field(7)
    assert sqrt_in_field(L.gen()) is NotASquare  # conjugate 2cos(5pi/7) is negative
    assert sqrt_in_field(L(3)) is NotASquare


def test_sqrt_two_in_l8():
    L = build_field(8)
    r = sqrt_in_field(L(2))
    assert r * r == L(2)
    assert abs(r.to_float() - math.sqrt(2)) < 1e-12


@pytest.mark.parametrize("m, unit", [(5, True), (7, True), (9, True), (12, True), (15, True), (20, True),
                                     (4, False), (6, False), (8, False), (16, False), (18, False),
                                     (10, False), (14, False)])
def test_units(m, unit):
    assert is_unit(build_field(m).gen()) is unit


def test_is_unit_needs_integral():
    with pytest.raises(DomainError):
        is_unit(build_field(7).gen() / 2)


def test_norm_is_multiplicative():
    L = build_field(9)
    a, b = L.element([1, 2, -1]), L.element([3, 0, 1])
    assert norm(a * b) == norm(a) * norm(b)


def test_lift_preserves_value():
    a = build_field(7).element([1, -1, 2])
    b = lift(a, build_field(28))
    assert abs(a.to_float() - b.to_float()) < 1e-12
    with pytest.raises(IncompatibleIndexError):
        lift(a, build_field(12))


def test_two_cos_and_sin_product():
    L = build_field(12)
    assert abs(two_cos(L, 1, 4).to_float() - math.sqrt(2)) < 1e-12
    assert abs(sin_product(L, 4, 6).to_float() - math.sin(math.pi / 4) * math.sin(math.pi / 6)) < 1e-12
    with pytest.raises(IncompatibleIndexError):
        two_cos(L, 1, 5)


def test_subfield_closure_dimensions():
    L = build_field(24)
    assert subfield_closure([two_cos(L, 1, 4)]).dimension == 2
    assert subfield_closure([two_cos(L, 1, 3)]).dimension == 1
    assert subfield_closure([L.gen()]).dimension == L.degree
    K = subfield_closure([two_cos(L, 1, 12)])
    assert K.contains(two_cos(L, 1, 6))
    assert not K.contains(L.gen())
