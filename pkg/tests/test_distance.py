from fractions import Fraction as F

import pytest

from pweikonal.catalog import four_squares, two_diamonds
from pweikonal.distance import distance_solution, partition_solution
from pweikonal.errors import HypothesisHViolated, NotAPartition
from pweikonal.geometry import diamond, rect, unit_square, union_all
from pweikonal.numeric import Q2
from pweikonal.solution import functional_F, validate


def test_two_diamonds_values():
    D, (A, B) = two_diamonds()
    assert functional_F(distance_solution(D), route="pieces") == Q2(16, 2)
    u = partition_solution([(A, 1), (B, -1)], D)
    assert functional_F(u, route="pieces") == Q2(16)
    # equal signs add the contact face to both jump components
    assert functional_F(partition_solution([(A, 1), (B, 1)], D)) == Q2(16, 2)


def test_four_squares_values():
    D, (C1, C2, C3, C4) = four_squares()
    assert functional_F(distance_solution(D), route="pieces") == Q2(120, 16)
    u = partition_solution([(union_all([C1, C2]), 1), (C3, 1), (C4, 1)], D)
    assert functional_F(u, route="pieces") == Q2(88, 24)
    assert validate(u).ok


@pytest.mark.parametrize("r", [1, 2, F(5, 2)])
def test_diamond_distance_value(r):
    v = distance_solution(diamond(r))
    assert functional_F(v, route="pieces") == Q2(4 * F(r))
    assert v.evaluate((0, 0)) == F(r)


def test_rectangle_distance_has_midline():
    v = distance_solution(rect(0, 0, 4, 2))
    assert validate(v).ok
    assert v.evaluate(((F(2) + 1) / 2, (F(2) - 1) / 2)) == 1


def test_errors():
    with pytest.raises(HypothesisHViolated):
        distance_solution(unit_square())
    with pytest.raises(NotAPartition):
        partition_solution([(rect(0, 0, 2, 2), 1), (rect(1, 0, 3, 2), 1)])
    with pytest.raises(NotAPartition):
        partition_solution([(rect(0, 0, 2, 2), 1)], rect(0, 0, 4, 2))
    with pytest.raises(NotAPartition):
        partition_solution([])
