from fractions import Fraction as F

import numpy as np
import pytest

from pweikonal.distance import distance_solution
from pweikonal.geometry import diamond, rect, union_all
from pweikonal.lattice import (
    Lattice, common_lattice, distance_values, embed_values, exterior_raster_distance, lattice_F,
    lattice_for, raster_distance, refine_values,
)
from pweikonal.numeric import Q2
from pweikonal.solution import functional_F


def _domain():
    return union_all([rect(0, 0, 4, 2), rect(2, 2, 3, 5)])


def test_lattice_pitch_is_half_gcd():
    lat = lattice_for([_domain()])
    assert lat.h == F(1, 2)


def test_raster_distance_matches_exact():
    D = _domain()
    lat = lattice_for([D])
    d = raster_distance(lat.mask(D))
    for i in range(0, d.shape[0], 3):
        for j in range(0, d.shape[1], 2):
            p = lat.raster_point(i, j)
            exact = D.boundary_distance(p) if D.contains(p) > 0 else 0
            assert d[i, j] * lat.u == exact


def test_exterior_distance_matches_exact():
    D = rect(2, 2, 4, 3)
    lat = Lattice(F(0), F(0), F(1, 2), 12, 10)
    m = lat.mask(D)
    e = exterior_raster_distance(m)
    for i in range(e.shape[0]):
        for j in range(e.shape[1]):
            p = lat.raster_point(i, j)
            want = 0 if D.contains(p) >= 0 else D.boundary_distance(p)
            assert e[i, j] * lat.u == want


@pytest.mark.parametrize("factor", [1, 2, 3])
def test_refine_preserves_F(factor):
    D = _domain()
    v = distance_solution(D)
    lat, C, M, m = v.grid
    Cf, Mf, mf = refine_values(C, M, m, factor)
    fine = Lattice(lat.s0, lat.t0, lat.h / factor, lat.A * factor, lat.B * factor)
    assert lattice_F(fine, Cf, Mf, mf) == lattice_F(lat, C, M, m)
    assert np.array_equal(distance_values(mf)[0], Cf)


def test_embed_into_padded_lattice():
    v = distance_solution(diamond(1))
    lat, C, M, m = v.grid
    T = common_lattice([lat], pad=3)
    T2 = Lattice(T.s0, T.t0, T.h / 2, 2 * T.A, 2 * T.B)
    Ct, Mt, mt = embed_values(lat, C, M, m, T2)
    assert lattice_F(T2, Ct, Mt, mt) == Q2(4)
    with pytest.raises(ValueError):
        embed_values(lat, C, M, m, Lattice(T.s0 + T.h / 3, T.t0, T.h, T.A, T.B))


def test_lattice_and_piece_routes_agree():
    for D in (diamond(2), _domain(), union_all([rect(0, 0, 3, 1), rect(0, 1, 1, 3)])):
        v = distance_solution(D)
        assert functional_F(v, route="lattice") == functional_F(v, route="pieces")
