from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from flatsaf.field import build_field
from flatsaf.saf import (VERTICAL, IntervalExchange, direction_vector, j_invariant, parse_iet, polygon_j,
                         project_j, saf, singularity_profile, wedge)

L7 = build_field(7)
L8 = build_field(8)

positive = st.fractions(min_value=Fraction(1, 8), max_value=5, max_denominator=9)
coeff = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def l7_elements(draw):
    return L7.element(draw(st.lists(coeff, min_size=3, max_size=3)))


@st.composite
def positive_l7(draw):
    # 1 + a + b lam with small a, b stays positive at lam ~ 1.80
    a = draw(positive)
    b = draw(st.fractions(min_value=0, max_value=2, max_denominator=5))
    c = draw(st.fractions(min_value=0, max_value=Fraction(1, 2), max_denominator=4))
    return L7.element([a, b, c])


@st.composite
def iets(draw, max_size=6):
    n = draw(st.integers(min_value=1, max_value=max_size))
    lengths = [draw(positive_l7()) for _ in range(n)]
    perm = draw(st.permutations(range(1, n + 1)))
    return IntervalExchange(lengths, perm)


@given(l7_elements(), l7_elements(), l7_elements())
def test_wedge_is_bilinear_and_alternating(a, b, c):
    assert wedge(a, a).is_zero()
    assert wedge(a, b) == -wedge(b, a)
    assert wedge(a + c, b) == wedge(a, b) + wedge(c, b)
    assert wedge(a, b).is_antisymmetric()


def test_wedge_over_q_kills_rational_multiples():
    lam = L7.gen()
    assert wedge(3 * lam, lam / 2).is_zero()
    assert not wedge(L7.one(), lam).is_zero()


@given(iets())
def test_translations_tile(T):
    assert T.check_partition()
    assert sum((l for l in T.lengths), L7.zero()) == T.total


@given(iets(), st.fractions(min_value=0, max_value=1, max_denominator=50))
@settings(max_examples=50)
def test_inverse_undoes(T, frac):
    x = T.total * frac
    if frac == 1:
        x = T.total / 2
    assert T.inverse()(T(x)) == x


@given(iets())
def test_saf_of_inverse_is_negative(T):
    assert saf(T.inverse()) == -saf(T)


@given(iets(), st.fractions(min_value=Fraction(1, 10), max_value=Fraction(9, 10), max_denominator=10))
def test_split_and_merge_keep_saf(T, frac):
    i = 0
    S = T.split(i, T.lengths[i] * frac)
    assert saf(S) == saf(T)
    assert S.merged().permutation == T.merged().permutation
    assert saf(S.merged()) == saf(T)


@given(iets(), st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=6))
def test_rational_scaling(T, q):
    assert saf(T.scaled(L7(q))) == q * q * saf(T)


@given(st.lists(positive, min_size=1, max_size=8), st.randoms())
def test_rational_iets_have_zero_saf(lengths, rnd):
    Q = build_field(3)
    perm = list(range(1, len(lengths) + 1))
    rnd.shuffle(perm)
    assert saf(IntervalExchange([Q(x) for x in lengths], perm)).is_zero()


def test_rotation_saf():
    lam = L7.gen()
    alpha = lam - 1  # irrational, in (0, 1)
    T = IntervalExchange([1 - alpha, alpha], [2, 1])
    assert not saf(T).is_zero()
    R = IntervalExchange([L7(Fraction(2, 3)), L7(Fraction(1, 3))], [2, 1])
    assert saf(R).is_zero()


def test_rotation_value():
    # two-interval exchange: saf = l1 ^ l2 - l2 ^ l1 = 2 l1 ^ l2
    lam = L7.gen()
    T = IntervalExchange([L7.one(), lam], [2, 1])
    assert saf(T) == 2 * wedge(L7.one(), lam)


def test_iet_text_roundtrip():
    lam = L8.gen()
    T = IntervalExchange([lam, L8.one(), lam * lam - 1], [3, 1, 2])
    text = T.to_text()
    assert parse_iet(text, L8) == T


def test_iet_rejects_bad_input():
    with pytest.raises(ValueError):
        IntervalExchange([L7.one(), L7.one()], [1, 1])
    with pytest.raises(ValueError):
        IntervalExchange([L7.one(), -L7.one()], [2, 1])
    with pytest.raises(ValueError):
        IntervalExchange([L7.one()], [1, 2])


def test_from_translations_checks_tiling():
    one = L7.one()
    T = IntervalExchange.from_translations([one, one], [one, -one])
    assert T.permutation == (2, 1)
    with pytest.raises(ValueError):
        IntervalExchange.from_translations([one, one], [one, one])


def test_locate_is_exact():
    lam = L7.gen()
    T = IntervalExchange([lam - 1, L7.one()], [2, 1])
    assert T.locate(lam - 1) == 1
    assert T.locate(lam - 1 - L7(Fraction(1, 10**12))) == 0
    with pytest.raises(ValueError):
        T.locate(T.total)


def square(x0, y0, s):
    L = s.field
    o = (L(x0), L(y0))
    return [o, (o[0] + s, o[1]), (o[0] + s, o[1] + s), (o[0], o[1] + s)]


def test_polygon_j_of_unit_square():
    J = polygon_j(square(0, 0, L7.one()))
    d = L7.degree
    # 2 e_x ^ e_y
    assert J.matrix[0][d] == 2 and J.matrix[d][0] == -2
    assert sum(1 for (i, j), v in J.entries().items() if v) == 1


@given(st.fractions(min_value=-3, max_value=3, max_denominator=5),
       st.fractions(min_value=-3, max_value=3, max_denominator=5))
def test_polygon_j_translation_invariant(x, y):
    s = L7.gen()
    assert polygon_j(square(x, y, s)) == polygon_j(square(0, 0, s))


def test_project_j_vanishes_for_square_in_rational_directions():
    J = j_invariant([square(0, 0, L7.one())])
    assert project_j(J, L7(Fraction(2, 3)), L7).is_zero()
    assert project_j(J, VERTICAL, L7).is_zero()
    assert not project_j(J, L7.gen(), L7).is_zero()


def test_direction_vector():
    lam = L7.gen()
    assert direction_vector(VERTICAL, L7) == (L7.zero(), L7.one())
    assert direction_vector(lam, L7) == (L7.one(), lam)


@pytest.mark.parametrize("perm, profile", [
    ((2, 1), (1,)),
    ((4, 3, 2, 1), (3,)),
    ((3, 2, 1), (1, 1)),
    ((7, 5, 2, 10, 3, 1, 11, 8, 4, 6, 9), (3, 7)),
])
def test_singularity_profile(perm, profile):
    assert singularity_profile(perm) == profile


def irreducible(perm):
    return all(set(perm[:k]) != set(range(1, k + 1)) for k in range(1, len(perm)))


@given(st.integers(min_value=2, max_value=9).flatmap(lambda n: st.permutations(range(1, n + 1))))
def test_profile_angle_sum(perm):
    assume(irreducible(perm))
    # sum (k_i - 1) = 2g - 2 on the suspension
    profile = singularity_profile(tuple(perm))
    assert all(k >= 1 for k in profile)
    assert sum(k - 1 for k in profile) % 2 == 0
    # n = 2g + s - 1 intervals
    assert len(perm) == sum(profile) + 1
