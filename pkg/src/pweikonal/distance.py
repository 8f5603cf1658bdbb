"""Distance solutions and signed partition solutions.

The l1 distance to the boundary of an H-domain is piecewise affine with
ridges on the candidate lines of face pairs: rotated-frame diagonals through
vertices and axis midlines between parallel faces. On the lattice of pitch
g/2 (g the gcd of the vertex offsets) every candidate line is a lattice line,
so the nearest-face assignment reduces to an exact chessboard distance
transform on the half-pitch raster. The result is converted to affine pieces.
"""

from __future__ import annotations

import numpy as np

from .errors import HypothesisHViolated, NotAPartition
from .geometry import HDomain, hdomain_from_mask, union_all
from .lattice import Lattice, check_lattice_function, distance_values, lattice_for
from .solution import PLSolution


def _require_h(D):
    if not isinstance(D, HDomain):
        raise HypothesisHViolated("domain boundary has normals outside E")
    if D.is_empty:
        raise HypothesisHViolated("empty domain")


def distance_solution(D: HDomain, lattice: Lattice | None = None) -> PLSolution:
    """d(x) = l1 distance from x to the boundary of D, as a PLSolution."""
    _require_h(D)
    lat = lattice or lattice_for([D])
    mask = lat.mask(D)
    C, M = distance_values(mask)
    return PLSolution(D, None, grid=(lat, C, M, mask))


def signed_values(parts, lat: Lattice):
    """Corner/centre values of sum_k s_k d_k chi_k on a common lattice."""
    C = np.zeros((lat.A + 1, lat.B + 1), dtype=np.int64)
    M = np.zeros((lat.A, lat.B), dtype=np.int64)
    mask = np.zeros((lat.A, lat.B), dtype=bool)
    for E, s in parts:
        m = lat.mask(E)
        if np.any(mask & m):
            raise NotAPartition("parts overlap")
        Ck, Mk = distance_values(m)
        C += s * Ck
        M += s * Mk
        mask |= m
    return C, M, mask


def partition_solution(parts, domain: HDomain | None = None) -> PLSolution:
    """Glue s_k * d(., boundary of E_k) over a partition into parts E_k."""
    if not parts:
        raise NotAPartition("no parts")
    for E, s in parts:
        _require_h(E)
        if s not in (1, -1):
            raise ValueError("signs must be +1 or -1")
    lat = lattice_for([E for E, _ in parts] + ([domain] if domain is not None else []))
    C, M, mask = signed_values(parts, lat)
    if domain is None:
        domain = union_all([E for E, _ in parts])
    dm = lat.mask(domain)
    if not np.array_equal(dm, mask):
        raise NotAPartition("parts do not cover the domain")
    check_lattice_function(C, M, mask)
    return PLSolution(domain, None, grid=(lat, C, M, mask))


def solution_from_grid(lat: Lattice, C, M, mask, domain: HDomain | None = None) -> PLSolution:
    """PLSolution of an arbitrary lattice function (used by oracle and optimizer)."""
    if domain is None:
        domain = hdomain_from_mask(mask, lat.s0, lat.t0, lat.h)
    return PLSolution(domain, None, grid=(lat, C, M, mask))
