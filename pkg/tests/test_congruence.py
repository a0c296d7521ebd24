import pytest
from hypothesis import given, settings, strategies as st

from flatsaf.congruence import (INF, FiniteField, UnsupportedReductionError, build_quotient, expand_factors,
                                factor_mod_p, nonparabolic_certificate, orbit_of_infinity, projective_line,
                                reduce_element, reduced_generators)
from flatsaf.field import DomainError, build_field
from flatsaf.group import TriangleGroupSpec, evaluate_word

PRIMES = [2, 3, 5, 7]

FIELDS = [FiniteField(2, [1, 1, 0, 1]), FiniteField(3, [1, 0, 1]), FiniteField(5, [2, 0, 1]),
          FiniteField(2, [1, 1, 0, 0, 1])]


def field_elements(F):
    return st.tuples(*[st.integers(min_value=0, max_value=F.p - 1)] * F.f)


@given(st.lists(st.integers(min_value=-9, max_value=9), min_size=2, max_size=7), st.sampled_from(PRIMES))
def test_factorization_multiplies_back(poly, p):
    if poly[-1] % p == 0:
        poly[-1] += 1
    if poly[-1] % p == 0:
        poly[-1] += 1
    lc, factors = factor_mod_p(poly, p)
    expected = [c % p for c in poly]
    while len(expected) > 1 and expected[-1] == 0:
        expected.pop()
    assert expand_factors(lc, factors, p) == expected
    for f, _ in factors:
        assert f[-1] == 1
        FiniteField(p, f)  # irreducible, or this raises


def test_lambda_seven_mod_two():
    lc, factors = factor_mod_p(build_field(7).minpoly, 2)
    assert lc == 1 and factors == [([1, 0, 1, 1], 1)]  # x^3 + x^2 + 1


def test_composite_modulus_rejected():
    with pytest.raises(DomainError):
        factor_mod_p([1, 1], 4)


def test_reducible_modulus_rejected():
    with pytest.raises(DomainError):
        FiniteField(2, [1, 0, 1])  # (x + 1)^2


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_field_axioms(F):
    @given(field_elements(F), field_elements(F), field_elements(F))
    @settings(max_examples=40)
    def check(a, b, c):
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        if any(a):
            assert F.mul(a, F.inv(a)) == F.one()
    check()


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_primitive_element(F):
    els = F.elements()
    assert len(els) == F.q == len(set(els))
    z = F.primitive()
    assert F.pow(z, F.q - 1) == F.one()
    assert len(projective_line(F)) == F.q + 1
    assert projective_line(F)[0] is INF


def test_format():
    F = FIELDS[0]
    assert F.format((0, 1, 1)) == "λ̄^2 + λ̄"
    assert F.format(F.zero()) == "0"


letters = st.tuples(st.sampled_from("ABC"), st.integers(min_value=-3, max_value=3).filter(bool))


@given(st.lists(letters, max_size=4).map(tuple), st.lists(letters, max_size=4).map(tuple))
@settings(max_examples=30, deadline=None)
def test_reduction_is_multiplicative(u, v):
    q = build_quotient(4, 7, 2)
    spec = TriangleGroupSpec(4, 7)
    g, h = evaluate_word(u, spec), evaluate_word(v, spec)
    assert reduce_element(g @ h, q) == reduce_element(g, q) @ reduce_element(h, q)


def test_four_seven_case_one():
    q = build_quotient(4, 7, 2)
    assert q.case == "i" and q.f == 3 and q.g == (1, 0, 1, 1)
    _, B, _ = reduced_generators(q)
    F = q.field
    assert B.entries() == (F.zero(), F.one(), F.one(), F.zero())
    assert (B @ B).is_scalar()
    report = orbit_of_infinity(q)
    assert len(report.orbit) == 7 and not report.transitive
    assert report.group_order_hint == 14


def test_seven_seven_case_two():
    q = build_quotient(7, 7, 2)
    assert q.case == "ii"
    A, _, _ = reduced_generators(q)
    assert A.is_identity()
    assert orbit_of_infinity(q).group_order_hint == 7


def test_five_five_is_transitive_and_flagged():
    cert = nonparabolic_certificate(5, 5, 2)
    assert cert.quotient.f == 2
    assert cert.report.transitive
    assert [ok for _, ok in cert.hypotheses] == [False]
    assert cert.verdict.startswith("inconclusive")


def test_case_three_discriminant_guard():
    with pytest.raises(UnsupportedReductionError):
        build_quotient(4, 6, 2)


def test_case_three_odd_prime():
    q = build_quotient(5, 5, 3)
    assert q.case == "iii"
    report = orbit_of_infinity(q)
    assert len(report.orbit) + len(report.complement) == q.field.q + 1


def test_factor_index_range():
    with pytest.raises(DomainError):
        build_quotient(4, 7, 2, factor_index=3)


def test_certificate_lines_mention_complement():
    lines = nonparabolic_certificate(4, 7, 2).lines()
    assert any("λ̄^2 + λ̄ + 1" in line for line in lines)
