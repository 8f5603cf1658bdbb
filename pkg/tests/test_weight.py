from fractions import Fraction as F

import numpy as np
import pytest

from pweikonal.errors import OutsideBuiltShells
from pweikonal.geometry import diamond, recheck_certificate, unit_square
from pweikonal.lattice import Lattice
from pweikonal.numeric import ONE, Q2, ZERO
from pweikonal.solution import PLSolution, validate_grid
from pweikonal.weight import (
    WeightH, build_weight, functional_Fh, h_eval, h_eval_batch, h_one_sided, sample_annulus,
    sample_interface, shell_solution,
)


@pytest.fixture(scope="module")
def square():
    return build_weight(unit_square(), 4)


@pytest.fixture(scope="module")
def diamond3():
    return build_weight(diamond(3), 3)


def test_unit_square_levels(square):
    assert square.shell(1).empty
    assert square.levels() == [2, 3, 4] and square.n_built == 4
    for n in square.levels() + [5]:
        s = square.shell(n)
        assert s.certificate.ok
        assert recheck_certificate(s.omega, unit_square(), n) == s.certificate.min_distance
        assert s.alpha >= ONE
    assert square.shell(3).delta == Q2(F(15, 2), 1)


def test_diamond_constant_core(diamond3):
    W = diamond3
    assert W.n0 == 1
    assert W.shell(1).delta == Q2(9)
    assert h_eval(W, (0, 0)) == ONE / (4 * (W.alpha(1) + W.alpha(2)))


def test_tiny_diamond_is_empty():
    W = build_weight(diamond(F(1, 4)), 2)
    assert W.is_empty and W.n_built == 0
    with pytest.raises(OutsideBuiltShells):
        h_eval(W, (0, 0))
    with pytest.raises(OutsideBuiltShells):
        shell_solution(W)


def test_n_max_check():
    with pytest.raises(ValueError):
        build_weight(diamond(3), 1)


def test_interface_value(diamond3):
    W = diamond3
    rng = np.random.default_rng(1)
    for n in W.levels()[:-1]:
        pts = sample_interface(W, n, 50, rng)
        inner, outer = h_one_sided(W, pts, n), h_one_sided(W, pts, n + 1)
        assert inner == outer == [W.a(n)] * 50


def test_bounds_and_decay(diamond3):
    W = diamond3
    rng = np.random.default_rng(2)
    sups = []
    for n in W.levels():
        hs = h_eval_batch(W, sample_annulus(W, n, 200, rng))
        assert all(ZERO < h <= W.bound(n) for h in hs)
        sups.append(max(hs))
    assert sups == sorted(sups, reverse=True)


def test_outside_shells(diamond3):
    with pytest.raises(OutsideBuiltShells):
        h_eval(diamond3, (F(299, 100), 0))


def test_shell_solution_valid_and_increasing(diamond3):
    lazy = shell_solution(diamond3)
    assert validate_grid(lazy.truncated()).ok
    Fs = [lazy.F(K) for K in range(1, lazy.K + 1)]
    assert all(a < b for a, b in zip(Fs, Fs[1:]))
    # K=1 is the distance solution of the first level
    assert lazy.F(1) == diamond3.shell(1).delta


def test_fh_enclosure_nesting(square):
    lazy = shell_solution(square)
    prev = None
    for q in (1, 2, 4, 8):
        r = functional_Fh(square, lazy, q)
        assert r.lower <= r.estimate <= r.upper
        if prev is not None:
            assert prev.lower <= r.lower and r.upper <= prev.upper
        prev = r
    assert prev.upper_with_tail < 2 * np.pi ** 2 / 3


def test_fh_of_empty_jump_set(square):
    lat = square.lattice
    z = PLSolution(square.shell(2).omega, None, grid=(lat, np.zeros((lat.A + 1, lat.B + 1), dtype=np.int64),
                                                      np.zeros((lat.A, lat.B), dtype=np.int64),
                                                      np.zeros((lat.A, lat.B), dtype=bool)))
    r = functional_Fh(square, z)
    assert (r.lower, r.upper) == (0.0, 0.0) and r.tail == 0


def test_fh_rejects_jumps_outside(diamond3):
    from pweikonal.distance import distance_solution

    with pytest.raises(OutsideBuiltShells):
        functional_Fh(diamond3, distance_solution(diamond(3)))


def test_weight_file_roundtrip(tmp_path, square):
    path = tmp_path / "w.json"
    square.save(path)
    W = WeightH.load(path)
    assert W.levels() == square.levels()
    assert [s.alpha for s in W.shells] == [s.alpha for s in square.shells]
    x = (F(1, 2), F(1, 2))
    assert h_eval(W, x) == h_eval(square, x)


def test_lattice_is_padded(square):
    lat = square.lattice
    assert isinstance(lat, Lattice)
    m = square.mask(4)
    assert not m[:2].any() and not m[-2:].any() and not m[:, :2].any()
