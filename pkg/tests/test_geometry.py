import warnings
from fractions import Fraction as F

import numpy as np
import pytest

from pweikonal.errors import Infeasible, NotRectilinear, SelfIntersecting
from pweikonal.geometry import (
    GeneralDomain, HDomain, boundary_distance_batch, build_hdomain, contains_batch, diamond, domain_from_dict,
    hdomain_from_mask, inner_approx, l1_distance, rect, rect_boolean, recheck_certificate, to_rotated, to_world,
    union_all, unit_square,
)
from pweikonal.numeric import Q2


def test_frames_roundtrip():
    p = (F(3, 7), F(-2, 5))
    assert to_world(to_rotated(p)) == p


def test_world_square_is_rejected():
    with pytest.raises(NotRectilinear):
        build_hdomain([[("0", "0"), ("1", "0"), ("1", "1"), ("0", "1")]], frame="world")


def test_world_diamond_is_accepted():
    D = build_hdomain([[("1", "0"), ("0", "1"), ("-1", "0"), ("0", "-1")]], frame="world")
    assert D.world_area == 2
    assert D.perimeter == Q2(0, 4)


def test_self_intersection():
    with pytest.raises(SelfIntersecting):
        build_hdomain([[(0, 0), (2, 0), (2, 2), (1, 2), (1, -1), (0, -1)]])


def test_collinear_merge_warns():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        D = build_hdomain([[(0, 0), (1, 0), (2, 0), (2, 2), (0, 2)]])
    assert len(D.vertices) == 4
    assert any("collinear" in str(x.message) for x in w)


def test_l1_distance_diamond():
    D = diamond(3)
    assert l1_distance((0, 0), D) == Q2(3)
    assert l1_distance((1, 1), D) == Q2(1)
    assert l1_distance((F(1, 2), 0), D) == Q2(F(5, 2))


def test_l1_distance_general_square():
    S = unit_square()
    assert l1_distance((F(1, 2), F(1, 2)), S) == Q2(F(1, 2))
    assert l1_distance((F(1, 4), F(1, 2)), S) == Q2(F(1, 4))


def test_batch_queries_match_scalar():
    rng = np.random.default_rng(3)
    D = union_all([rect(0, 0, 4, 2), rect(2, 2, 3, 5)])
    pts = [(F(int(a), 8), F(int(b), 8)) for a, b in rng.integers(-8, 48, size=(300, 2))]
    assert boundary_distance_batch(D, pts) == [D.boundary_distance(p) for p in pts]
    assert contains_batch(D, pts).tolist() == [D.contains(p) for p in pts]


def test_union_of_touching_rectangles():
    r = rect_boolean("union", rect(0, 0, 2, 2), rect(2, 0, 4, 2))
    assert r.domain.area == 8
    assert len(r.domain.vertices) == 4


def test_mask_roundtrip():
    m = np.zeros((4, 4), dtype=bool)
    m[0:3, 0] = True
    m[1, 0:3] = True
    D = hdomain_from_mask(m, F(0), F(0), F(1, 2))
    assert D.area == F(int(m.sum()), 4)


def test_domain_dict_roundtrip():
    D = union_all([rect(0, 0, 4, 2), rect(2, 2, 3, 5)])
    E = domain_from_dict(D.to_dict())
    assert E.area == D.area and E.perimeter == D.perimeter
    S = domain_from_dict(unit_square().to_dict())
    assert isinstance(S, GeneralDomain) and S.world_area == 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_inner_approx_certificate_diamond(n):
    D = diamond(3)
    ia = inner_approx(D, n)
    c = ia.certificate
    assert c.ok and F(2, 2 * n + 1) <= c.min_distance <= F(1, n)
    assert recheck_certificate(ia.domain, D, n) == c.min_distance


def test_inner_approx_nested_unit_square():
    prev = None
    for n in (2, 3, 4):
        ia = inner_approx(unit_square(), n, prev)
        assert ia.certificate.ok
        assert recheck_certificate(ia.domain, unit_square(), n) == ia.certificate.min_distance
        if prev is not None:
            # every vertex of the previous level lies in the closed new level
            assert all(ia.domain.contains(p) >= 0 for p in prev.domain.vertices)
        prev = ia


def test_inner_approx_infeasible():
    with pytest.raises(Infeasible):
        inner_approx(unit_square(), 1)
    with pytest.raises(Infeasible):
        inner_approx(diamond(F(1, 4)), 1)


def test_hdomain_rejects_nothing_empty():
    assert HDomain([]).is_empty
