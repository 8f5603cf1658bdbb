"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 domain or validation failure, 3 problem too
large for the exhaustive oracle, 4 evaluation outside the built shells.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import (
    HypothesisHViolated,
    NotAPartition,
    NotGridAligned,
    NotRectilinear,
    OutsideBuiltShells,
    SelfIntersecting,
    TooLarge,
)
from .numeric import format_q2, parse_rational

EXIT_USAGE, EXIT_DOMAIN, EXIT_TOO_LARGE, EXIT_OUTSIDE = 1, 2, 3, 4
DOMAIN_ERRORS = (NotRectilinear, SelfIntersecting, HypothesisHViolated, NotGridAligned, NotAPartition)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def _q2_line(label, x) -> str:
    return f"{label} = {format_q2(x)} ~ {float(x):.12g}"


def load_domain(source):
    """A JSON domain file or a builtin name (see catalog.named_domain)."""
    from .catalog import named_domain
    from .geometry import domain_from_dict

    if os.path.exists(source):
        with open(source) as fh:
            return domain_from_dict(json.load(fh))
    try:
        return named_domain(source)
    except KeyError:
        raise UsageError(f"no domain file or builtin domain named {source!r}") from None


def load_solution(path):
    from .solution import PLSolution

    with open(path) as fh:
        return PLSolution.from_dict(json.load(fh))


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def cmd_distance(a):
    from .distance import distance_solution

    D = load_domain(a.domain)
    v = distance_solution(D)
    _write_json(v.to_dict(), a.output)
    print(f"{len(v.pieces)} pieces written to {a.output}")
    return 0


def cmd_validate(a):
    from .solution import PLSolution, validate

    D = load_domain(a.domain)
    with open(a.solution) as fh:
        v = PLSolution.from_dict(json.load(fh), domain=D)
    rep = validate(v)
    for c in rep.checks:
        line = f"{'PASS' if c.passed else 'FAIL'} {c.name}"
        if not c.passed:
            line += f": {c.detail} at {tuple(float(x) for x in c.witness) if c.witness else '?'}"
        print(line)
    return 0 if rep.ok else EXIT_DOMAIN


def cmd_jumps(a):
    from .solution import functional_F, jump_sets

    v = load_solution(a.solution)
    if a.region:
        region = load_domain(a.region)
        from .solution import clip_segment_length
        from .numeric import ZERO

        J1, J2 = jump_sets(v)
        l1 = sum((clip_segment_length(s, region) for s in J1.segments), ZERO)
        l2 = sum((clip_segment_length(s, region) for s in J2.segments), ZERO)
    else:
        J1, J2 = jump_sets(v)
        l1, l2 = J1.total_length, J2.total_length
    print(_q2_line("H1(J1)", l1))
    print(_q2_line("H1(J2)", l2))
    print(_q2_line("F", l1 + l2 if a.region else functional_F(v, route="pieces")))
    return 0


def cmd_minimize(a):
    from .optimizer import minimize_F, minimize_Fh

    D = load_domain(a.domain)
    if a.weight:
        from .weight import WeightH

        W = WeightH.load(a.weight)
        res = minimize_Fh(W, seed=a.seed, restarts=a.restarts, max_iters=a.max_iters, trace_path=a.trace)
        print(f"F_h enclosure {res.value.format()}")
    else:
        pitch = parse_rational(a.pitch) if a.pitch else None
        res = minimize_F(D, pitch=pitch, seed=a.seed, restarts=a.restarts, max_iters=a.max_iters,
                         trace_path=a.trace)
        print(_q2_line("F", res.value))
    print(f"parts {res.candidate.parts}, evaluations {res.evaluations}")
    if a.output:
        _write_json(res.best.to_dict(), a.output)
    return 0


def cmd_weight(a):
    from .weight import build_weight, functional_Fh, shell_solution

    D = load_domain(a.domain)
    W = build_weight(D, a.shells)
    if W.reason:
        print(f"note: {W.reason}")
    for s in W.shells:
        if s.empty:
            print(f"level {s.n}: empty")
            continue
        c = s.certificate
        print(f"level {s.n}: pitch {c.pitch}, d = {c.min_distance} in [{c.lower}, {c.upper}], "
              f"delta {format_q2(s.delta)}, alpha {format_q2(s.alpha)}"
              + (" (only fixes the last interface value)" if s.n > W.n_built else ""))
    if a.output:
        W.save(a.output)
    if W.is_empty:
        print("no shells built")
        return 0
    lazy = shell_solution(W)
    r = functional_Fh(W, lazy, a.order)
    print(f"shell solution K={lazy.K}: F_h in {r.format()}")
    print(_q2_line("unweighted F", lazy.F()))
    return 0


def cmd_oracle(a):
    from .oracle import GridSpec, enumerate_grid_solutions, min_F_grid

    D = load_domain(a.domain)
    G = GridSpec(D, parse_rational(a.pitch))
    if a.count_only:
        s = enumerate_grid_solutions(G, budget=a.budget)
        print(f"{s.count} solutions")
        return 0
    try:
        m = min_F_grid(G, budget=a.budget)
    except ValueError:
        print("0 solutions")
        return 0
    print(f"{m.count} solutions, min F = {format_q2(m.min_value)}")
    print(f"minimizers: {len(m.argmin)}, plus/minus distance: {m.is_pm_distance}")
    return 0


def cmd_examples(a):
    from .catalog import run_examples

    checks = run_examples()
    for c in checks:
        print(c.line())
    return 0 if all(c.passed for c in checks) else EXIT_DOMAIN


def cmd_render(a):
    from .render import render_svg

    v = load_solution(a.solution)
    with open(a.output, "w") as fh:
        fh.write(render_svg(v, show_jumps=a.show_jumps, show_levels=a.show_levels))
    return 0


def build_parser():
    p = _Parser(prog="pweikonal", description="Piecewise-affine solutions of the 2-D eikonal system.")
    p.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    p.add_argument("--jobs", type=int, default=1, help="worker cap (computations are sequential)")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("distance", help="l1 distance solution of a domain")
    s.add_argument("domain")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("validate", help="validate a solution on a domain")
    s.add_argument("domain")
    s.add_argument("solution")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("jumps", help="jump set measures of a solution")
    s.add_argument("solution")
    s.add_argument("--region")
    s.set_defaults(func=cmd_jumps)

    s = sub.add_parser("minimize", help="local search for small F (or F_h with --weight)")
    s.add_argument("domain")
    s.add_argument("--pitch")
    s.add_argument("--restarts", type=int, default=2)
    s.add_argument("--max-iters", type=int, default=50)
    s.add_argument("--weight")
    s.add_argument("-o", "--output")
    s.add_argument("--trace")
    s.set_defaults(func=cmd_minimize)

    s = sub.add_parser("weight", help="build shells, the weight h and the shell solution")
    s.add_argument("domain")
    s.add_argument("--shells", type=int, required=True)
    s.add_argument("--order", type=int, default=4)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_weight)

    s = sub.add_parser("oracle", help="exhaustive grid solutions")
    s.add_argument("domain")
    s.add_argument("--pitch", required=True)
    s.add_argument("--count-only", action="store_true")
    s.add_argument("--budget", type=int, default=10**8)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("examples", help="reproduce the example values")
    s.set_defaults(func=cmd_examples)

    s = sub.add_parser("render", help="SVG figure of a solution")
    s.add_argument("solution")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--show-jumps", action="store_true")
    s.add_argument("--show-levels", type=int, default=0)
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    p = build_parser()
    a = p.parse_args(argv)
    if not getattr(a, "func", None):
        p.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return a.func(a)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DOMAIN_ERRORS as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except TooLarge as exc:
        print(f"too large: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except OutsideBuiltShells as exc:
        print(f"outside built shells: {exc}", file=sys.stderr)
        return EXIT_OUTSIDE


if __name__ == "__main__":
    sys.exit(main())
