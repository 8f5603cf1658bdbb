from fractions import Fraction as F

import pytest

from pweikonal import kernels
from pweikonal.errors import NotGridAligned, TooLarge
from pweikonal.geometry import diamond, rect, unit_square
from pweikonal.numeric import Q2
from pweikonal.oracle import (
    GridSpec, enumerate_grid_solutions, grid_inner_domain, min_F_grid, oracle_1d,
    relaxation_lower_bound, slice_integral_bound,
)
from pweikonal.solution import functional_F, validate


def test_single_cell_has_no_solution():
    s = enumerate_grid_solutions(GridSpec(rect(0, 0, 1, 1), 1))
    assert s.count == 0
    with pytest.raises(ValueError):
        min_F_grid(GridSpec(rect(0, 0, 1, 1), 1))


def test_diamond_counts():
    assert enumerate_grid_solutions(GridSpec(diamond(1), 1)).count == 2
    assert enumerate_grid_solutions(GridSpec(diamond(1), F(1, 2))).count == 98
    assert enumerate_grid_solutions(GridSpec(diamond(2), 1)).count == 98


def test_free_centre_model_counts():
    assert enumerate_grid_solutions(GridSpec(rect(0, 0, 1, 1), 1), free_centres=True).count == 2
    assert enumerate_grid_solutions(GridSpec(diamond(1), 1), free_centres=True).count == 18


def test_enumerated_solutions_are_valid():
    seen = []

    def visit(v, g):
        assert validate(v).ok
        assert functional_F(v, route="pieces") == g.F(v.grid[0])
        seen.append(g)

    s = enumerate_grid_solutions(GridSpec(diamond(1), F(1, 2)), visitor=visit)
    assert s.visited == s.count == len(seen) == 98
    assert s.min_F == Q2(4) and s.argmin_count == 2


def test_backends_agree_on_dp():
    G = GridSpec(diamond(1), F(1, 2))
    a = min_F_grid(G, backend="python")
    b = min_F_grid(G, backend="compiled") if kernels.BACKEND == "compiled" else a
    assert (a.min_value, a.count, len(a.argmin)) == (b.min_value, b.count, len(b.argmin))


def test_budget():
    with pytest.raises(TooLarge):
        min_F_grid(GridSpec(diamond(2), F(1, 4)), budget=1000)


def test_alignment():
    with pytest.raises(NotGridAligned):
        GridSpec(rect(0, 0, F(3, 2), 1), 1)


def test_relaxation_is_a_lower_bound():
    for G in (GridSpec(diamond(1), F(1, 2)), GridSpec(grid_inner_domain(unit_square(), F(1, 4)), F(1, 4))):
        rb = relaxation_lower_bound(G)
        assert rb.lower <= min_F_grid(G).min_value
    assert relaxation_lower_bound(GridSpec(diamond(1), F(1, 2))).lower == Q2(4)


def test_slice_integral():
    assert slice_integral_bound(F(1, 8)) == F(13, 24)
    assert slice_integral_bound(F(1, 16)) == F(481, 560)


def test_oracle_1d():
    r = oracle_1d(1)
    assert r.feasible and r.min_jumps == 1 and len(r.solutions) == 2
    assert all(m == 1 for m in r.partition_minima.values())
    rn = oracle_1d(1, nonnegative=True)
    assert len(rn.solutions) == 1 and rn.solutions[0](0) == 1 and rn.solutions[0](F(1, 2)) == F(1, 2)
    assert not oracle_1d(1, max_jumps=0).feasible
    r3 = oracle_1d(F(3, 2))
    assert sorted(s(0) for s in r3.solutions) == [F(-3, 2), F(3, 2)]
