"""Named domains and the reproduction checks behind the `examples` command."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .geometry import diamond, rect, rect_boolean, unit_square, union_all
from .numeric import Q2, format_q2, q2_compare

F = Fraction


def two_diamonds():
    """Union of the l1 balls B(0, 3) and B((2, 2), 1), touching along a face."""
    A, B = diamond(3), diamond(1, (2, 2))
    return rect_boolean("union", A, B).domain, (A, B)


def four_squares():
    """Big square with an attached square carrying two small tabs."""
    C1 = rect(-12, -12, 12, 12)
    C2 = rect(12, -8, 28, 8)
    C3 = rect(12, -10, 14, -8)
    C4 = rect(12, 8, 14, 10)
    return union_all([C1, C2, C3, C4]), (C1, C2, C3, C4)


def named_domain(name: str):
    """Builtin domains: two-diamonds, four-squares, unit-square, diamond:<r>."""
    if name == "two-diamonds":
        return two_diamonds()[0]
    if name == "four-squares":
        return four_squares()[0]
    if name == "unit-square":
        return unit_square()
    if name.startswith("diamond:"):
        return diamond(F(name.split(":", 1)[1]))
    raise KeyError(name)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _eq(name, got, want):
    ok = q2_compare(got, want) == 0
    return Check(name, ok, f"{format_q2(got)} (expected {format_q2(want)}, {float(got):.12g})")


def run_examples():
    """Exact reproductions of the hand-built example values."""
    from .distance import distance_solution, partition_solution
    from .oracle import oracle_1d
    from .solution import functional_F

    out = []
    D1, (A, B) = two_diamonds()
    out.append(_eq("two-diamonds partition F(u)", functional_F(partition_solution([(A, 1), (B, -1)], D1)), Q2(16)))
    out.append(_eq("two-diamonds distance F(d)", functional_F(distance_solution(D1)), Q2(16, 2)))
    D2, (C1, C2, C3, C4) = four_squares()
    fd = functional_F(distance_solution(D2))
    fu = functional_F(partition_solution([(union_all([C1, C2]), 1), (C3, 1), (C4, 1)], D2))
    out.append(_eq("four-squares distance F(d)", fd, Q2(120, 16)))
    out.append(_eq("four-squares partition F(u)", fu, Q2(88, 24)))
    out.append(Check("four-squares comparison", q2_compare(fu, fd) < 0, f"{format_q2(fu)} < {format_q2(fd)}"))
    r = oracle_1d(1)
    ok = r.min_jumps == 1 and {s.breakpoints for s in r.solutions} == {
        ((F(-1), F(0)), (F(0), F(1)), (F(1), F(0))), ((F(-1), F(0)), (F(0), F(-1)), (F(1), F(0)))}
    out.append(Check("1-D min-jumps", ok, f"min jumps {r.min_jumps}, minimizers ±(1-|x|)"))
    rn = oracle_1d(1, nonnegative=True)
    ok = len(rn.solutions) == 1 and rn.solutions[0].breakpoints == ((F(-1), F(0)), (F(0), F(1)), (F(1), F(0)))
    out.append(Check("1-D nonnegative survivor", ok, "1-|x|"))
    return out
