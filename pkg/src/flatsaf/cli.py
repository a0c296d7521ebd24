"""Command line entry point: flatsaf <subcommand> ..."""

import argparse
import sys
import time
from math import sqrt

from . import __version__
from .field import FieldError, build_field, format_coeffs, minimal_polynomial, parse_element, two_cos
from .group import (ClassificationError, TriangleGroupSpec, classify, evaluate_word, fixed_points, format_word,
                    generators, invariant_trace_field, is_obstructed_pair, parse_word, trace_field)
from .saf import load_iet, saf, singularity_profile
from .surface import (DEFAULT_MAX_CROSSINGS, SurfaceError, TraceError, detect_periodic, double_ngon, dump_surface,
                      first_return, hooper_surface, load_surface, unit_square_torus)

CONFIG_KEYS = {"max_crossings": int, "digits": int, "steps": int, "grid_min": int, "grid_max": int}
DOMAIN_ERRORS = (FieldError, SurfaceError, TraceError, ClassificationError, ArithmeticError, ValueError, OSError)


class UsageError(Exception):
    pass


def show(x, digits=12):
    """Exact coefficients plus a numeric shadow."""
    return f"{format_coeffs(x.coeffs)} | N={x.field.N} ({x.numeric(digits)})"


def show_point(z, digits=12):
    if hasattr(z, "coeffs"):
        return show(z, digits)
    return str(z)


def read_config(path):
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: expected one of {', '.join(CONFIG_KEYS)} as key=value")
            try:
                out[key] = CONFIG_KEYS[key](value.strip())
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad value for {key}") from None
    return out


def _setting(args, key, default):
    return args.config_values.get(key, default)


# -- subcommands ------------------------------------------------------------------

def cmd_group(args, out):
    spec = TriangleGroupSpec(args.m, args.n)
    word = parse_word(args.word) if args.word else None
    L = spec.field
    out(f"G_{{{spec.m},{spec.n}}} over L_{L.N} (degree {L.degree})")
    for g in generators(spec):
        out(f"{format_word(g.word)} = [[{show(g.a)}, {show(g.b)}], [{show(g.c)}, {show(g.d)}]]")
    out(f"trace field dimension {trace_field(spec).dimension}, "
        f"invariant trace field dimension {invariant_trace_field(spec).dimension}")
    if args.m % 2 == 0 and args.n % 2 == 0:
        out(f"pair {'obstructed' if is_obstructed_pair(args.m, args.n) else 'unobstructed'}")
    if word is not None:
        g = evaluate_word(word, spec)
        out(f"word {format_word(g.word)}:")
        for name, x in zip("abcd", g.entries()):
            out(f"  {name} = {show(x)}")
        kind = classify(g)
        out(f"  type: {kind}")
        if kind == "hyperbolic":
            out("  fixed points: " + ", ".join(show_point(z) for z in _as_tuple(fixed_points(g))))
    return 0


def _as_tuple(fp):
    return fp if isinstance(fp, tuple) else (fp,)


def cmd_special_pa(args, out):
    from .special import special_pa
    cert = special_pa(args.m, args.n)
    d = cert.dilatation
    out(f"word: {format_word(cert.matrix.word)} (exponent {cert.exponent})")
    for name, x in zip("abcd", cert.matrix.entries()):
        out(f"  {name} = {show(x)}")
    out(f"dilatation: {show(d)}")
    out("dilatation minimal polynomial: " + format_coeffs(minimal_polynomial(d)))
    out("fixed points of the base word: " + ", ".join(show_point(z) for z in _as_tuple(cert.fixed_points)))
    out(f"flow direction D_mu(1): {show(cert.direction)}")
    return 0


def cmd_saf(args, out):
    if args.iet:
        iet = load_iet(args.iet)
        out(f"{len(iet)} intervals, permutation {' '.join(map(str, iet.permutation))}")
    else:
        data = load_surface(args.surface)
        direction = _direction(args, data)
        fr = first_return(data.surface, direction, data.transversal(),
                          _setting(args, "max_crossings", args.max_crossings))
        if fr.iet is None:
            raise TraceError("; ".join(fr.diagnostics) or "first return failed")
        iet = fr.iet
        out(f"first return: {len(iet)} intervals, permutation {' '.join(map(str, iet.permutation))}"
            f"{'' if fr.complete else ' (incomplete)'}")
    value = saf(iet)
    out(f"SAF = {value.format()}")
    out(f"SAF vanishes: {'yes' if value.is_zero() else 'no'}")
    return 0


def _direction(args, data):
    if args.direction:
        L = data.surface.field
        if args.direction.strip().lower() == "vertical":
            return (L.zero(), L.one())
        if "," in args.direction:
            xs, ys = args.direction.split(",")
            return (parse_element(xs, L), parse_element(ys, L))
        return (L.one(), parse_element(args.direction, L))
    if data.direction is None:
        raise UsageError("no direction given and none in the surface file")
    return data.direction


def cmd_surface(args, out):
    action = args.action
    if action == "build":
        kind = args.kind
        if kind == "torus":
            S = unit_square_torus()
        elif kind == "double-ngon":
            S = double_ngon(args.size[0])
        elif kind == "hooper":
            if len(args.size) != 2:
                raise UsageError("hooper needs two sizes: m n")
            S = hooper_surface(args.size[0], args.size[1], c=args.parity, quotient=args.quotient,
                               normalized=args.normalized)
        else:
            raise UsageError(f"unknown surface kind {kind}")
        text = dump_surface(S)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
            out(f"wrote {args.out}")
        else:
            for line in text.splitlines():
                out(line)
        return 0
    data = load_surface(args.file)
    S = data.surface
    if action == "validate":
        report = S.validate()
        out(f"{S.name}: {len(S.polygons)} polygons, {len(S.identifications)} edge pairs, genus {report.genus}")
        for cone in report.cone_points:
            out(f"  vertex class of {len(cone.corners)} corners: angle {cone.multiple} * 2pi")
        return 0
    direction = _direction(args, data)
    budget = _setting(args, "max_crossings", args.max_crossings)
    if action == "first-return":
        fr = first_return(S, direction, data.transversal(), budget)
        if fr.iet is None:
            out("first return failed: " + "; ".join(fr.diagnostics))
            return 1
        out(f"complete: {'yes' if fr.complete else 'no'}")
        out(f"intervals: {len(fr.iet)} (merged: {len(fr.iet.merged())})")
        out("permutation: " + " ".join(map(str, fr.iet.permutation)))
        out("singularity profile: " + " ".join(map(str, singularity_profile(fr.iet.merged().permutation))))
        for k, (l, t) in enumerate(zip(fr.iet.lengths, fr.iet.translations), 1):
            out(f"  {k}: length {show(l)}, translation {show(t)}")
        out(f"SAF vanishes: {'yes' if saf(fr.iet).is_zero() else 'no'}")
        if args.iet_out:
            with open(args.iet_out, "w") as fh:
                fh.write(fr.iet.to_text())
            out(f"wrote {args.iet_out}")
        return 0
    if action == "periodic":
        res = detect_periodic(S, direction, budget)
        out(f"status: {res.status}")
        if res.periodic:
            out(f"cylinders: {res.cylinders}, saddle connections: {res.saddle_connections}")
        else:
            out(res.reason)
        return 0
    raise UsageError(f"unknown surface action {action}")


def cmd_congruence(args, out):
    from .congruence import nonparabolic_certificate
    cert = nonparabolic_certificate(args.m, args.n, args.p, args.factor_index)
    for line in cert.lines():
        out(line)
    return 0


def cmd_flux_walk(args, out):
    from .flux import WalkConfig, csv_text, emit_svg, walk
    iet = load_iet(args.iet)
    x = parse_element(args.x, iet.field)
    steps = args.steps if args.steps is not None else _setting(args, "steps", 2000)
    digits = args.digits if args.digits is not None else _setting(args, "digits", 12)
    res = walk(WalkConfig(iet, x, steps, (args.k1, args.k2), digits))
    text = csv_text(res.points)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        out(f"wrote {args.out} ({len(res.points)} points)")
    else:
        for line in text.splitlines():
            out(line)
    if args.svg:
        emit_svg(res.points, args.svg)
        out(f"wrote {args.svg}")
    if res.truncated_at is not None:
        out(f"stopped at step {res.truncated_at}: orbit reached a discontinuity")
    out(f"max |coordinate|: {res.max_abs():.6f}")
    return 0


# -- reproduction -------------------------------------------------------------------

def _check(out, label, ok):
    out(f"[{'ok' if ok else 'FAIL'}] {label}")
    return ok


def repro_8_4(args, out):
    from .cases import EIGHT_FOUR_PERMUTATION, eight_four_case
    r = eight_four_case(_setting(args, "max_crossings", DEFAULT_MAX_CROSSINGS))
    cert = r.certificate
    good = True
    out(f"special word {format_word(cert.matrix.word)}, exponent {cert.exponent}")
    out(f"dilatation {show(cert.dilatation)}")
    out("minimal polynomial " + format_coeffs(r.dilatation_minpoly))
    quartic = 3 + 2 * sqrt(2) + sqrt(20 + 14 * sqrt(2))
    good &= _check(out, "exponent is 1", cert.exponent == 1)
    good &= _check(out, f"dilatation is quartic and equals 3 + 2sqrt2 + sqrt(20 + 14sqrt2) = {quartic:.12f}",
                   len(r.dilatation_minpoly) == 5 and abs(cert.dilatation.to_float() - quartic) < 1e-9)
    if not r.data_file:
        out("[skip] surface file for Y^e_{8,4} is missing")
        return good
    out(f"flow direction {show_point(r.direction[0])} : {show_point(r.direction[1])}")
    good &= _check(out, "J invariant projects to zero in this direction", r.j_projection_zero)
    out(f"first return: {len(r.iet)} intervals, complete: {'yes' if r.complete else 'no'}")
    out("permutation found:    " + " ".join(map(str, r.merged.permutation)))
    out("permutation expected: " + " ".join(map(str, EIGHT_FOUR_PERMUTATION)))
    out(f"cone-angle profile found {r.found_profile}, expected permutation implies {r.expected_profile}")
    good &= _check(out, "first-return SAF vanishes", saf(r.iet).is_zero())
    good &= _check(out, "11-interval permutation matches", r.permutation_matches)
    return good


def repro_7_7(args, out):
    from .cases import seven_seven_case
    c = seven_seven_case(_setting(args, "steps", 2000), _setting(args, "digits", 12),
                         _setting(args, "max_crossings", DEFAULT_MAX_CROSSINGS))
    e = c.example
    good = True
    out("M = A C^5:")
    for name, x in zip("abcd", e.matrix.entries()):
        out(f"  {name} = {show(x)}")
    out(f"alpha = {show(e.alpha)}, beta = {show(e.beta)}")
    good &= _check(out, "beta^2 = alpha", e.beta * e.beta == e.alpha)
    good &= _check(out, "M is special", e.special)
    out("fixed points: " + ", ".join(show_point(z) for z in e.fixed_points))
    out(f"dilatation {show(e.dilatation)}")
    out(f"stated dilatation {show(e.stated_dilatation)}")
    good &= _check(out, "stated dilatation d satisfies d + 1/d = |tr M|", e.stated_dilatation_ok)
    good &= _check(out, "J invariant projects to zero on the normalized surface", c.j_projection_zero)
    good &= _check(out, f"first-return SAF vanishes ({len(c.iet)} intervals)", c.saf_zero)
    w = c.walk
    out(f"flux walk: {len(w.points)} steps from x = x^3/8, max |coordinate| {w.max_abs():.6f}")
    good &= _check(out, "walk completed", w.truncated_at is None)
    return good


def repro_misc(args, out):
    from .congruence import nonparabolic_certificate
    from .field import is_unit
    good = True
    L7 = build_field(7)
    good &= _check(out, "minimal polynomial of 2cos(pi/7) is x^3 - x^2 - 2x + 1",
                   tuple(L7.minpoly) == (1, -2, -1, 1))
    units = all(is_unit(two_cos(build_field(m), 1, m)) for m in (5, 7, 9, 12, 15, 20))
    nonunits = not any(is_unit(two_cos(build_field(m), 1, m)) for m in (4, 6, 8, 16, 18))
    good &= _check(out, "2cos(pi/m) is a unit exactly when m is not twice a prime power", units and nonunits)
    lo, hi = _setting(args, "grid_min", 3), _setting(args, "grid_max", 12)
    if lo < 3 or hi < lo:
        raise UsageError(f"grid bounds must satisfy 3 <= grid_min <= grid_max, got {lo}..{hi}")
    grid = [(m, n) for m in range(lo, hi + 1) for n in range(lo, hi + 1)]
    identity_ok = obstruction_ok = True
    for m, n in grid:
        spec = TriangleGroupSpec(m, n)
        A, B, C = generators(spec)
        identity_ok &= (A @ B).entries() == C.entries()
        differs = trace_field(spec).dimension != invariant_trace_field(spec).dimension
        obstruction_ok &= differs == is_obstructed_pair(m, n)
    good &= _check(out, f"C = AB on the {lo}..{hi} grid", identity_ok)
    good &= _check(out, f"obstruction criterion matches field dimensions on the {lo}..{hi} grid", obstruction_ok)
    cert = nonparabolic_certificate(4, 7, 2)
    for line in cert.lines():
        out("  " + line)
    good &= _check(out, "(4,7) mod 2: orbit of infinity has 7 of 9 points", len(cert.report.orbit) == 7)
    return good


def cmd_repro(args, out):
    cases = {"8-4": repro_8_4, "7-7": repro_7_7, "misc": repro_misc}
    chosen = list(cases) if args.case == "all" else [args.case]
    good = True
    for name in chosen:
        out(f"== case {name}")
        good &= bool(cases[name](args, out))
    return 0 if good else 1


# -- parser -----------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="flatsaf", description="Exact computations on triangle-group "
                                     "Veech surfaces, SAF invariants and congruence reductions.")
    parser.add_argument("--config", help="key=value file overriding defaults")
    parser.add_argument("--version", action="version", version=f"flatsaf {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("group", help="generators, traces and word evaluation for G_{m,n}")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--word", help='word such as "B^4 C^2"')
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("special-pa", help="special pseudo-Anosov certificate for an even pair")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_special_pa)

    p = sub.add_parser("saf", help="SAF invariant of an IET file or of a first return on a surface")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--iet")
    src.add_argument("--surface")
    p.add_argument("--direction")
    p.add_argument("--max-crossings", type=int, default=DEFAULT_MAX_CROSSINGS)
    p.set_defaults(func=cmd_saf)

    p = sub.add_parser("surface", help="build, validate and trace translation surfaces")
    p.add_argument("action", choices=["build", "validate", "first-return", "periodic"])
    p.add_argument("file", nargs="?")
    p.add_argument("--kind", choices=["torus", "double-ngon", "hooper"])
    p.add_argument("--size", type=int, nargs="+", default=[8])
    p.add_argument("--parity", type=int, choices=[0, 1], default=0)
    p.add_argument("--quotient", action="store_true")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--direction", help="slope, 'vertical', or 'x, y'")
    p.add_argument("--max-crossings", type=int, default=DEFAULT_MAX_CROSSINGS)
    p.add_argument("--out")
    p.add_argument("--iet-out")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("congruence", help="orbit of infinity on P^1 over a residue field")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--factor-index", type=int, default=0)
    p.set_defaults(func=cmd_congruence)

    p = sub.add_parser("flux-walk", help="Galois-conjugate walk of an IET orbit")
    p.add_argument("--iet", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--digits", type=int)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.add_argument("--k1", type=int, default=3)
    p.add_argument("--k2", type=int, default=5)
    p.set_defaults(func=cmd_flux_walk)

    p = sub.add_parser("repro", help="rerun the worked examples")
    p.add_argument("--case", choices=["8-4", "7-7", "misc", "all"], default="all")
    p.set_defaults(func=cmd_repro)
    return parser


def _manifest(argv, args):
    lines = [f"# flatsaf {__version__}", f"# command: {args.command}"]
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command", "config_values")}
    lines.append("# flags: " + ", ".join(f"{k}={v}" for k, v in flags.items()))
    if args.config_values:
        lines.append("# config: " + ", ".join(f"{k}={v}" for k, v in sorted(args.config_values.items())))
    return lines


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args.config_values = read_config(args.config) if args.config else {}
        if args.command == "surface" and args.action != "build" and not args.file:
            raise UsageError("surface file required")
        if args.command == "surface" and args.action == "build" and not args.kind:
            raise UsageError("--kind required for build")
    except (UsageError, OSError) as exc:
        print(f"flatsaf: {exc}", file=sys.stderr)
        return 2

    def out(line):
        print(line)

    for line in _manifest(argv, args):
        out(line)
    start = time.perf_counter()
    try:
        code = args.func(args, out)
    except UsageError as exc:
        print(f"flatsaf: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"flatsaf: error: {exc}", file=sys.stderr)
        return 1
    out(f"# wall-time: {time.perf_counter() - start:.2f}s")
    return code
