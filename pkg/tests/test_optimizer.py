from fractions import Fraction as F

import numpy as np
import pytest

from pweikonal.catalog import four_squares, two_diamonds
from pweikonal.distance import distance_solution, partition_solution
from pweikonal.errors import EmptyCandidateSet, OutsideBuiltShells
from pweikonal.geometry import diamond, rect, unit_square
from pweikonal.numeric import Q2, q2_compare
from pweikonal.optimizer import (
    Candidate, greedy_squares, lexicographic_select, minimize_F, minimize_Fh, neighbours,
)
from pweikonal.solution import functional_F, integral, validate, validate_grid
from pweikonal.weight import build_weight, functional_Fh, shell_solution


def test_greedy_squares_cover():
    mask = np.zeros((5, 7), dtype=bool)
    mask[1:5, 0:6] = True
    mask[0, 2] = True
    sq = greedy_squares(mask)
    total = np.zeros_like(mask, dtype=int)
    for m in sq:
        total += m
    assert (total == mask).all()
    assert max(m.sum() for m in sq) == 16


def test_candidate_canonical():
    a = Candidate.make(np.array([[3, 3], [7, -1]]), {3: 1, 7: -1})
    b = Candidate.make(np.array([[0, 0], [5, -1]]), {0: 1, 5: -1})
    assert a.key == b.key and a.parts == 2


def test_neighbours_are_fresh_candidates():
    L = np.zeros((4, 6), dtype=np.int32)
    c = Candidate.make(L, [1])
    moves = list(neighbours(c, np.random.default_rng(0), 4))
    assert moves and all(nb.key != c.key for _, nb in moves)
    assert {m.split()[0] for m, _ in moves} >= {"flip", "squares"}


def test_diamond_value_and_validity():
    r = minimize_F(diamond(1), F(1, 2), restarts=1, max_iters=10)
    assert r.value == Q2(4)
    assert validate_grid(r.best).ok
    assert functional_F(r.best) == r.value


def test_two_diamonds_not_worse():
    D, _ = two_diamonds()
    r = minimize_F(D, F(1, 2), restarts=1, max_iters=20)
    assert q2_compare(r.value, Q2(16)) <= 0
    assert validate(r.best).ok


def test_four_squares_not_worse():
    D, _ = four_squares()
    r = minimize_F(D, restarts=1, max_iters=20)
    assert q2_compare(r.value, Q2(88, 24)) <= 0
    assert functional_F(r.best) == r.value
    assert validate_grid(r.best).ok


def test_determinism_and_trace(tmp_path):
    D, _ = two_diamonds()
    path = tmp_path / "trace.csv"
    a = minimize_F(D, 1, seed=3, restarts=2, max_iters=5, trace_path=path)
    b = minimize_F(D, 1, seed=3, restarts=2, max_iters=5)
    assert a.value == b.value and a.candidate.key == b.candidate.key
    assert [(t.move, t.value, t.accepted) for t in a.trace] == [(t.move, t.value, t.accepted) for t in b.trace]
    rows = path.read_text().splitlines()
    assert rows[0] == "iteration,restart,move,value,best,accepted" and len(rows) == len(a.trace) + 1
    bests = [t.best for t in a.trace]
    assert all(x >= y for x, y in zip(bests, bests[1:]))
    assert bests[-1] == pytest.approx(float(a.value))


def test_negate_symmetry():
    D = rect(0, 0, 4, 2)
    a = minimize_F(D, 1, restarts=1, max_iters=10)
    b = minimize_F(D, 1, restarts=1, max_iters=10, negate=True)
    assert a.value == b.value


def test_minimize_fh_improves_on_shells():
    W = build_weight(unit_square(), 2)
    seed_val = functional_Fh(W, shell_solution(W))
    r = minimize_Fh(W, restarts=0, max_iters=2, max_splits=2)
    assert r.value.upper <= seed_val.upper + 1e-12
    assert r.value.tail == shell_solution(W).tail


def test_minimize_fh_constant_weight():
    r = minimize_Fh(None, domain=diamond(1), restarts=1, max_iters=5)
    assert r.value == minimize_F(diamond(1), restarts=1, max_iters=5).value
    with pytest.raises(ValueError):
        minimize_Fh(None)
    with pytest.raises(OutsideBuiltShells):
        minimize_Fh(build_weight(diamond(F(1, 4)), 2))


def test_select_depth_one():
    d = distance_solution(diamond(1))
    sel = lexicographic_select([d.negated(), d], 1)
    assert integral(sel.solution, 1) == F(2, 3)
    assert not sel.multiple_survivors


def test_select_second_moment():
    D = rect(0, 0, 4, 2)
    S1, S2 = rect(0, 0, 2, 2), rect(2, 0, 4, 2)
    uA = partition_solution([(S1, 1), (S2, -1)], D)
    uB = partition_solution([(S1, -1), (S2, 1)], D)
    assert integral(uA, 1) == integral(uB, 1)
    sel = lexicographic_select([uA, uB], 2)
    assert integral(sel.solution, 2) > 0 and sel.rounds == [2, 1]
    tie = lexicographic_select([uA, uB], 1)
    assert tie.multiple_survivors


def test_select_edge_cases():
    d = distance_solution(diamond(1))
    assert lexicographic_select([d], 3).solution is d
    with pytest.raises(EmptyCandidateSet):
        lexicographic_select([], 1)
