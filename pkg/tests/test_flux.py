import csv
import io
from fractions import Fraction

import pytest

from flatsaf.field import build_field, galois_conjugate
from flatsaf.flux import WalkConfig, csv_text, svg_text, walk
from flatsaf.saf import IntervalExchange

L7 = build_field(7)
LAM = L7.gen()


def rotation():
    alpha = LAM - 1
    return IntervalExchange([1 - alpha, alpha], [2, 1])


def test_points_are_conjugate_displacements():
    T = rotation()
    x = L7(Fraction(1, 10))
    res = walk(WalkConfig(T, x, steps=30))
    assert len(res.points) == 30 and res.truncated_at is None
    for (j, u, v), xj in zip(res.points, res.trail):
        d = xj - x
        assert float(u) == pytest.approx(galois_conjugate(d, 3).to_float(), abs=1e-11)
        assert float(v) == pytest.approx(galois_conjugate(d, 5).to_float(), abs=1e-11)
    assert res.points[0][1:] == ("0.000000000000", "0.000000000000")


def test_orbit_follows_the_map():
    T = rotation()
    res = walk(WalkConfig(T, L7(Fraction(1, 3)), steps=20))
    for a, b in zip(res.trail, res.trail[1:]):
        assert T(a) == b


def test_stops_at_discontinuity():
    T = IntervalExchange([L7(Fraction(1, 2)), L7(Fraction(1, 4)), L7(Fraction(1, 4))], [3, 1, 2])
    res = walk(WalkConfig(T, L7(0), steps=10))
    assert res.truncated_at == 1  # T(0) = 1/2 is a cut point
    assert res.notes


@pytest.mark.parametrize("kwargs", [dict(steps=0), dict(embeddings=(3, 3))])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        walk(WalkConfig(rotation(), L7(Fraction(1, 3)), **kwargs))


def test_start_outside_interval():
    with pytest.raises(ValueError):
        walk(WalkConfig(rotation(), L7(2), steps=5))


def test_csv_and_svg():
    res = walk(WalkConfig(rotation(), L7(Fraction(1, 3)), steps=12))
    text = csv_text(res.points)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["step", "u", "v"]
    assert len(rows) == 13
    assert text == csv_text(walk(WalkConfig(rotation(), L7(Fraction(1, 3)), steps=12)).points)
    svg = svg_text(res.points)
    assert svg.startswith("<svg") and svg.count("<circle") == 12
