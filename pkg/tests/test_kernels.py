"""The compiled kernels reproduce the numpy fallback transition by transition."""

import numpy as np
import pytest

from pweikonal import _kernels_py, kernels

compiled = pytest.importorskip("pweikonal._kernels")


def _frontier(rng, n, A):
    W = 2 * A + 3
    S = np.zeros((n, W), dtype=np.int16)
    base = rng.integers(-3, 4, size=(n, 1)) * 2
    S[:, : A + 2] = base + 2 * rng.integers(-1, 2, size=(n, A + 2))
    S[:, A + 2:] = rng.integers(-1, 2, size=(n, A + 1))
    return S


def _same(x, y):
    assert len(x) == len(y)
    for a, b in zip(x, y):
        assert np.array_equal(np.asarray(a), np.asarray(b))


def _same_multiset(x, y):
    """Transitions agree up to order (the relaxation only takes minima)."""
    def rows(t):
        parent, child, dL, dE, _ = t
        return sorted(zip(parent.tolist(), map(tuple, np.asarray(child).tolist()), dL.tolist(), dE.tolist()))

    assert rows(x) == rows(y)


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("masked,boundary,flat", [(True, False, False), (True, True, False),
                                                   (False, False, False), (True, False, True)])
def test_uj_expand(seed, masked, boundary, flat):
    rng = np.random.default_rng(seed)
    A = 6
    S = _frontier(rng, 500, A)
    for a in range(A):
        _same(_kernels_py.uj_expand(S, a, masked, boundary, 6, 7, A, flat),
              compiled.uj_expand(S, a, masked, boundary, 6, 7, A, flat))


@pytest.mark.parametrize("seed", range(3))
def test_walk_expand(seed):
    rng = np.random.default_rng(seed)
    k_max = 8
    P = rng.integers(-4, 5, size=(300, k_max + 2)).astype(np.int16)
    for k in range(1, k_max):
        for flags in [(True, False, False, False, False, False), (True, False, True, False, True, True),
                      (True, False, False, True, False, True), (True, True, False, False, False, False),
                      (False, False, False, False, False, False)]:
            present, boundary, h_prev, v_edge, centre_prev, s_edge = flags
            if centre_prev and k < 2:
                continue
            for parity in (0, 1):
                _same_multiset(_kernels_py.walk_expand(P, k, present, boundary, 4, parity, h_prev, v_edge, centre_prev, s_edge),
                      compiled.walk_expand(P, k, present, boundary, 4, parity, h_prev, v_edge, centre_prev, s_edge))


def test_backend_selection():
    assert kernels.BACKEND in ("compiled", "python")
    assert kernels.get_backend("python")[0] is _kernels_py.uj_expand
    with pytest.raises(ValueError):
        kernels.get_backend("gpu")
