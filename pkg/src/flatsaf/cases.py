"""The two worked surface examples, end to end, plus the shipped surface files."""

from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .field import minimal_polynomial, sign_at
from .flux import WalkConfig, walk
from .saf import project_j, saf, singularity_profile
from .special import hooper_direction, seven_seven_example, special_pa
from .surface import (DEFAULT_MAX_CROSSINGS, TraceError, Transversal, corner_transversal, dump_surface,
                      first_return, hooper_surface, load_surface, vscale)

EIGHT_FOUR_PERMUTATION = (7, 5, 2, 10, 3, 1, 11, 8, 4, 6, 9)
EIGHT_FOUR_FILE = "Ye_8_4.surface"
SEVEN_SEVEN_FILE = "Y_7_7_normalized.surface"


def data_path(name):
    return Path(str(resources.files("flatsaf") / "data" / name))


def standard_transversal(surface, direction):
    """Perpendicular from the first admissible corner, cut at its last separatrix hit.

    Returns (polygon, start, end).
    """
    for p, i, scale in _corner_candidates(surface):
        try:
            T = corner_transversal(surface, direction, p, i, scale)
        except TraceError:
            continue
        cuts = first_return(surface, direction, T).discontinuities
        if len(cuts) > 2:
            T = Transversal(surface, p, T.start, vector=vscale(cuts[-2] / cuts[-1], T.vector))
        return p, T.start, T.end
    raise TraceError("no corner admits a perpendicular transversal")


def _corner_candidates(surface):
    # full chords first; half chords when a full one would end on a vertex
    for scale in (1, Fraction(1, 2)):
        for p, poly in enumerate(surface.polygons):
            for i in range(len(poly)):
                yield p, i, scale


def eight_four_direction(field):
    return (hooper_direction(4, field), field.one())


def seven_seven_direction(field):
    z = seven_seven_example().normalized_directions[0]
    return (z, field.one())


def build_data_files(directory):
    """Write the two surface files (used to regenerate the shipped copies)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for S, direction, name in (
            (hooper_surface(8, 4, quotient=True), None, EIGHT_FOUR_FILE),
            (hooper_surface(7, 7, normalized=True), None, SEVEN_SEVEN_FILE)):
        direction = eight_four_direction(S.field) if name == EIGHT_FOUR_FILE else seven_seven_direction(S.field)
        p, a, b = standard_transversal(S, direction)
        path = directory / name
        path.write_text(dump_surface(S, direction, [(p, a, b)]))
        out.append(path)
    return out


def _load_or_build(name):
    path = data_path(name)
    if path.exists():
        return load_surface(path), True
    return None, False


@dataclass
class EightFourReport:
    certificate: object
    dilatation_minpoly: tuple
    direction: tuple
    j_projection_zero: bool
    iet: object
    merged: object
    complete: bool
    permutation_matches: bool
    found_profile: tuple
    expected_profile: tuple
    data_file: bool


def eight_four_case(max_crossings=DEFAULT_MAX_CROSSINGS):
    cert = special_pa(8, 4)
    data, present = _load_or_build(EIGHT_FOUR_FILE)
    if not present:
        return EightFourReport(cert, minimal_polynomial(cert.dilatation), None, None, None, None,
                               False, False, (), singularity_profile(EIGHT_FOUR_PERMUTATION), False)
    S = data.surface
    direction = data.direction
    jz = project_j(S.j_invariant(), direction, S.field).is_zero()
    fr = first_return(S, direction, data.transversal(), max_crossings)
    merged = fr.iet.merged() if fr.iet else None
    matches = merged is not None and len(merged) == 11 and merged.permutation == EIGHT_FOUR_PERMUTATION
    return EightFourReport(cert, minimal_polynomial(cert.dilatation), direction, jz, fr.iet, merged,
                           fr.complete, matches,
                           singularity_profile(merged.permutation) if merged else (),
                           singularity_profile(EIGHT_FOUR_PERMUTATION), True)


@dataclass
class SevenSevenCase:
    example: object
    direction: tuple
    j_projection_zero: bool
    iet: object
    unit_iet: object
    saf_zero: bool
    walk: object
    data_file: bool


def seven_seven_iet(max_crossings=DEFAULT_MAX_CROSSINGS):
    """First-return IET of the normalized Y_{7,7} in the expanding direction, and the surface data."""
    data, present = _load_or_build(SEVEN_SEVEN_FILE)
    if not present:
        S = hooper_surface(7, 7, normalized=True)
        direction = seven_seven_direction(S.field)
        p, a, b = standard_transversal(S, direction)
        T = Transversal(S, p, a, end=b)
    else:
        S, direction, T = data.surface, data.direction, data.transversal()
    fr = first_return(S, direction, T, max_crossings)
    return S, direction, fr, present


def seven_seven_case(steps=2000, digits=12, max_crossings=DEFAULT_MAX_CROSSINGS):
    example = seven_seven_example()
    S, direction, fr, present = seven_seven_iet(max_crossings)
    jz = project_j(S.j_invariant(), direction, S.field).is_zero()
    unit = fr.iet.scaled(1 / fr.iet.total)
    L = S.field
    x = L.gen() ** 3 / 8
    assert sign_at(x) > 0
    result = walk(WalkConfig(unit, x, steps, (3, 5), digits))
    return SevenSevenCase(example, direction, jz, fr.iet, unit, saf(fr.iet).is_zero(), result, present)
