"""Union-jack lattices carrying grid solutions.

A lattice of pitch h in the rotated frame splits every square cell into four
triangles meeting at the cell centre. A grid function stores corner values
(even, in units u = h/2) and centre values (odd) with each centre within one
unit of its four corners; it is affine on every triangle with rotated
gradient in {(±1, 0), (0, ±1)}, i.e. world gradient in {±1}^2.

The l1 distance to the boundary of a domain whose vertex coordinates are
multiples of 2h (relative to the lattice origin) is such a function: every
ridge line through a vertex is a lattice diagonal and every midline between
parallel faces is a lattice line.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .geometry import HDomain, rasterize_uniform, rational_gcd, to_world
from .numeric import Q2

F = Fraction


@dataclass(frozen=True)
class Lattice:
    s0: Fraction
    t0: Fraction
    h: Fraction
    A: int
    B: int

    @property
    def u(self) -> Fraction:
        return self.h / 2

    def corner(self, i, j):
        return (self.s0 + i * self.h, self.t0 + j * self.h)

    def raster_point(self, i, j):
        """Point (i, j) of the half-pitch raster (corners at even indices)."""
        return (self.s0 + i * self.u, self.t0 + j * self.u)

    def mask(self, D: HDomain) -> np.ndarray:
        return rasterize_uniform(D, self.s0, self.t0, self.h, self.A, self.B)


def lattice_for(domains, pitch=None, refine: int = 1) -> Lattice:
    """Coarsest lattice on which the distance functions of ``domains`` live.

    The origin is the lower-left corner of the joint bounding box; the pitch is
    half the gcd of all vertex offsets, divided by ``refine``. An explicit
    ``pitch`` must divide that value.
    """
    domains = [D for D in domains if not D.is_empty]
    s0 = min(D.bbox()[0] for D in domains)
    t0 = min(D.bbox()[1] for D in domains)
    s1 = max(D.bbox()[2] for D in domains)
    t1 = max(D.bbox()[3] for D in domains)
    vals = []
    for D in domains:
        vals += [p[0] - s0 for p in D.vertices] + [p[1] - t0 for p in D.vertices]
    g = rational_gcd(vals)
    h = g / 2 / refine
    if pitch is not None:
        pitch = F(pitch)
        if (h / pitch).denominator != 1:
            raise ValueError(f"pitch {pitch} does not divide the natural lattice pitch {h}")
        h = pitch
    A = int((s1 - s0) / h)
    B = int((t1 - t0) / h)
    return Lattice(s0, t0, h, A, B)


def interior_points(mask: np.ndarray) -> np.ndarray:
    """Raster points (half pitch) lying in the open domain of a cell mask."""
    pix = np.kron(mask.astype(bool), np.ones((2, 2), dtype=bool))
    pad = np.pad(pix, 1)
    return pad[:-1, :-1] & pad[1:, :-1] & pad[:-1, 1:] & pad[1:, 1:]


def raster_distance(mask: np.ndarray) -> np.ndarray:
    """Chebyshev distance to the boundary at every raster point, in units u.

    The boundary lies on lattice lines, so the nearest boundary point of a
    raster point can be taken on the raster and the chessboard distance
    transform is exact.
    """
    inter = interior_points(mask)
    d = ndimage.distance_transform_cdt(np.pad(inter, 1), metric="chessboard")[1:-1, 1:-1]
    return d.astype(np.int64)


def distance_values(mask: np.ndarray):
    """Corner and centre values of the distance function (units u).

    Raises ValueError when the result is not a lattice function, which means
    the lattice is too coarse for the domain.
    """
    d = raster_distance(mask)
    C = d[0::2, 0::2].copy()
    M = d[1::2, 1::2].copy()
    check_lattice_function(C, M, mask)
    return C, M


def check_lattice_function(C, M, mask) -> None:
    if np.any(C % 2):
        raise ValueError("corner values must be even")
    m = mask.astype(bool)
    if np.any((M[m] % 2) != 1):
        raise ValueError("centre values must be odd")
    for cc in (C[:-1, :-1], C[1:, :-1], C[:-1, 1:], C[1:, 1:]):
        if np.any(np.abs(M[m] - cc[m]) != 1):
            raise ValueError("centre value must differ by one from each corner")


def boundary_corners(mask: np.ndarray) -> np.ndarray:
    """Corners not interior to the domain (value forced to zero)."""
    A, B = mask.shape
    pad = np.pad(mask.astype(bool), 1)
    inner = pad[:-1, :-1] & pad[1:, :-1] & pad[:-1, 1:] & pad[1:, 1:]
    return ~inner


def lattice_counts(C, M, mask):
    """Jump measure of a lattice function as integer counts.

    Returns (L, E) with F = u * (L + 2*sqrt2*E):
      L counts half-diagonals (world-axis legs of length u) carrying a jump;
      E counts flat rotated edges whose neighbouring centres lie on the same
      side, each contributing u*sqrt2 to both jump components.
    """
    m = mask.astype(bool)
    c00, c10, c01, c11 = C[:-1, :-1], C[1:, :-1], C[:-1, 1:], C[1:, 1:]
    L = 2 * int(np.count_nonzero(m & (c00 == c11))) + 2 * int(np.count_nonzero(m & (c10 == c01)))
    E = 0
    # edges between (a, b) and (a+1, b): endpoints C[a+1, b], C[a+1, b+1]
    p, q = C[1:-1, :-1], C[1:-1, 1:]
    both = m[:-1, :] & m[1:, :]
    same = np.sign(M[:-1, :] - p) == np.sign(M[1:, :] - p)
    E += int(np.count_nonzero(both & (p == q) & same))
    # edges between (a, b) and (a, b+1): endpoints C[a, b+1], C[a+1, b+1]
    p, q = C[:-1, 1:-1], C[1:, 1:-1]
    both = m[:, :-1] & m[:, 1:]
    same = np.sign(M[:, :-1] - p) == np.sign(M[:, 1:] - p)
    E += int(np.count_nonzero(both & (p == q) & same))
    return L, E


def lattice_F(lat: Lattice, C, M, mask) -> Q2:
    L, E = lattice_counts(C, M, mask)
    return Q2(lat.u * L, 2 * lat.u * E)


def component_split(C, M, mask):
    """Split the lattice jump measure into (J1, J2) lengths in units of u."""
    m = mask.astype(bool)
    c00, c10, c01, c11 = C[:-1, :-1], C[1:, :-1], C[:-1, 1:], C[1:, 1:]
    j1 = 2 * int(np.count_nonzero(m & (c00 == c11)))
    j2 = 2 * int(np.count_nonzero(m & (c10 == c01)))
    _, E = lattice_counts(C, M, mask)
    return (j1, E), (j2, E)


# triangle order inside a cell: bottom, right, top, left (counter-clockwise)
TRI_BOTTOM, TRI_RIGHT, TRI_TOP, TRI_LEFT = range(4)


def triangle_gradients(C, M):
    """Rotated gradients (gs, gt) of the four triangles of every cell.

    Returns arrays GS, GT of shape (A, B, 4) with entries in {-1, 0, 1}.
    Values and coordinates are both measured in units of u, so the gradient
    is dimensionless.
    """
    c00, c10, c01, c11 = C[:-1, :-1], C[1:, :-1], C[:-1, 1:], C[1:, 1:]
    GS = np.zeros(M.shape + (4,), dtype=np.int64)
    GT = np.zeros(M.shape + (4,), dtype=np.int64)
    # bottom (c00, c10, M): along s the edge c00 -> c10 spans 2 units
    GS[..., 0] = (c10 - c00) // 2
    GT[..., 0] = M - (c00 + c10) // 2
    # right (c10, c11, M)
    GT[..., 1] = (c11 - c10) // 2
    GS[..., 1] = (c10 + c11) // 2 - M
    # top (c11, c01, M)
    GS[..., 2] = (c11 - c01) // 2
    GT[..., 2] = (c01 + c11) // 2 - M
    # left (c01, c00, M)
    GT[..., 3] = (c01 - c00) // 2
    GS[..., 3] = M - (c00 + c01) // 2
    return GS, GT


def world_gradient(gs, gt):
    return (gs + gt, gs - gt)


def to_pieces(lat: Lattice, C, M, mask, sign: int = 1):
    """Convex affine pieces of a lattice function.

    Cells whose four triangles share one gradient are merged greedily into
    rectangles; in the remaining cells adjacent triangles with equal gradient
    are paired into half-square triangles. Returns a list of
    (rotated vertex cycle, world gradient, world offset).
    """
    m = mask.astype(bool)
    GS, GT = triangle_gradients(C, M)
    A, B = m.shape
    u = lat.u
    s0, t0 = lat.s0, lat.t0

    def rpt(i, j):
        # raster index -> rotated point
        return (s0 + i * u, t0 + j * u)

    def offset(g1, g2, ri, rj, val):
        p = to_world(rpt(ri, rj))
        return val * u * sign - (g1 * sign * p[0] + g2 * sign * p[1])

    uniform = m & np.all(GS == GS[..., :1], axis=2) & np.all(GT == GT[..., :1], axis=2)
    label = np.where(uniform, (GS[..., 0] + 1) * 3 + (GT[..., 0] + 1), -1)
    pieces = []
    # rectangles from uniform cells: row runs then vertical stacking
    runs = {}
    for b in range(B):
        a = 0
        row = label[:, b]
        while a < A:
            if row[a] < 0:
                a += 1
                continue
            a1 = a
            while a1 + 1 < A and row[a1 + 1] == row[a]:
                a1 += 1
            runs.setdefault((a, a1, int(row[a])), []).append(b)
            a = a1 + 1
    for (a, a1, lab), bs in sorted(runs.items()):
        bs = sorted(bs)
        start = bs[0]
        prev = bs[0]
        for b in bs[1:] + [None]:
            if b is not None and b == prev + 1:
                prev = b
                continue
            gs, gt = GS[a, start, 0], GT[a, start, 0]
            g1, g2 = world_gradient(int(gs), int(gt))
            cyc = (rpt(2 * a, 2 * start), rpt(2 * a1 + 2, 2 * start), rpt(2 * a1 + 2, 2 * prev + 2), rpt(2 * a, 2 * prev + 2))
            pieces.append((cyc, (g1 * sign, g2 * sign), offset(g1, g2, 2 * a, 2 * start, int(C[a, start]))))
            if b is not None:
                start = prev = b
    # remaining cells
    for a, b in zip(*np.nonzero(m & ~uniform)):
        a, b = int(a), int(b)
        verts = {
            "c00": (2 * a, 2 * b, int(C[a, b])),
            "c10": (2 * a + 2, 2 * b, int(C[a + 1, b])),
            "c11": (2 * a + 2, 2 * b + 2, int(C[a + 1, b + 1])),
            "c01": (2 * a, 2 * b + 2, int(C[a, b + 1])),
            "m": (2 * a + 1, 2 * b + 1, int(M[a, b])),
        }
        tris = {0: ("c00", "c10", "m"), 1: ("c10", "c11", "m"), 2: ("c11", "c01", "m"), 3: ("c01", "c00", "m")}
        pair_shape = {(0, 1): ("c00", "c10", "c11"), (1, 2): ("c10", "c11", "c01"),
                      (2, 3): ("c11", "c01", "c00"), (3, 0): ("c01", "c00", "c10")}
        g = [(int(GS[a, b, k]), int(GT[a, b, k])) for k in range(4)]
        left = {0, 1, 2, 3}
        for (x, y) in ((0, 1), (2, 3), (1, 2), (3, 0)):
            if x in left and y in left and g[x] == g[y]:
                left -= {x, y}
                g1, g2 = world_gradient(*g[x])
                names = pair_shape[(x, y)]
                cyc = tuple(rpt(verts[n][0], verts[n][1]) for n in names)
                v0 = verts[names[0]]
                pieces.append((cyc, (g1 * sign, g2 * sign), offset(g1, g2, v0[0], v0[1], v0[2])))
        for x in sorted(left):
            g1, g2 = world_gradient(*g[x])
            names = tris[x]
            cyc = tuple(rpt(verts[n][0], verts[n][1]) for n in names)
            v0 = verts[names[0]]
            pieces.append((cyc, (g1 * sign, g2 * sign), offset(g1, g2, v0[0], v0[1], v0[2])))
    return pieces


def jump_segments(lat: Lattice, C, M, mask):
    """Jump segments of a lattice function in raster index coordinates.

    Returns two integer arrays (n, 4) of (i0, j0, i1, j1) for J1 and J2.
    Legs are stored as the full half-diagonal pair through the centre.
    """
    m = mask.astype(bool)
    c00, c10, c01, c11 = C[:-1, :-1], C[1:, :-1], C[:-1, 1:], C[1:, 1:]
    J1, J2 = [], []
    aa, bb = np.nonzero(m & (c00 == c11))
    # world-vertical line through the centre: raster (2a, 2b+2) -> (2a+2, 2b)
    if len(aa):
        J1.append(np.stack([2 * aa, 2 * bb + 2, 2 * aa + 2, 2 * bb], axis=1))
    aa, bb = np.nonzero(m & (c10 == c01))
    if len(aa):
        J2.append(np.stack([2 * aa, 2 * bb, 2 * aa + 2, 2 * bb + 2], axis=1))
    flat = []
    p, q = C[1:-1, :-1], C[1:-1, 1:]
    both = m[:-1, :] & m[1:, :]
    same = np.sign(M[:-1, :] - p) == np.sign(M[1:, :] - p)
    aa, bb = np.nonzero(both & (p == q) & same)
    if len(aa):
        flat.append(np.stack([2 * aa + 2, 2 * bb, 2 * aa + 2, 2 * bb + 2], axis=1))
    p, q = C[:-1, 1:-1], C[1:, 1:-1]
    both = m[:, :-1] & m[:, 1:]
    same = np.sign(M[:, :-1] - p) == np.sign(M[:, 1:] - p)
    aa, bb = np.nonzero(both & (p == q) & same)
    if len(aa):
        flat.append(np.stack([2 * aa, 2 * bb + 2, 2 * aa + 2, 2 * bb + 2], axis=1))
    empty = np.zeros((0, 4), dtype=np.int64)
    J1 = np.concatenate(J1 + flat) if (J1 or flat) else empty
    J2 = np.concatenate(J2 + flat) if (J2 or flat) else empty
    return J1, J2


def refine_values(C, M, mask, factor: int):
    """Express a lattice function on a lattice ``factor`` times finer.

    Coarse diagonals and cell edges are unions of fine ones, so the fine
    triangles subdivide the coarse ones and the resampled function is the
    same piecewise-affine function. Values are in fine units u / factor.
    """
    A, B = mask.shape
    if factor == 1:
        return C.copy(), M.copy(), mask.astype(bool).copy()
    nA, nB = A * factor, B * factor
    GS, GT = triangle_gradients(C, M)
    m = mask.astype(bool)

    def value_at(fi, fj):
        a = np.minimum(fi // (2 * factor), A - 1)
        b = np.minimum(fj // (2 * factor), B - 1)
        x = fi - (2 * a + 1) * factor
        y = fj - (2 * b + 1) * factor
        k = np.where(y <= -np.abs(x), 0, np.where(x >= np.abs(y), 1, np.where(y >= np.abs(x), 2, 3)))
        val = M[a, b] * factor + GS[a, b, k] * x + GT[a, b, k] * y
        return np.where(m[a, b], val, 0)

    I, J = np.meshgrid(np.arange(nA + 1), np.arange(nB + 1), indexing="ij")
    Cf = value_at(2 * I, 2 * J).astype(np.int64)
    I, J = np.meshgrid(np.arange(nA), np.arange(nB), indexing="ij")
    Mf = value_at(2 * I + 1, 2 * J + 1).astype(np.int64)
    mf = np.kron(m, np.ones((factor, factor), dtype=bool))
    return Cf, Mf, mf


def common_lattice(lats, pad: int = 0) -> Lattice:
    """Lattice refining every lattice in ``lats`` and covering their union."""
    vals = [lt.h for lt in lats]
    s0 = min(lt.s0 for lt in lats)
    t0 = min(lt.t0 for lt in lats)
    vals += [lt.s0 - s0 for lt in lats] + [lt.t0 - t0 for lt in lats]
    h = rational_gcd(vals)
    s1 = max(lt.s0 + lt.A * lt.h for lt in lats)
    t1 = max(lt.t0 + lt.B * lt.h for lt in lats)
    A, B = int((s1 - s0) / h), int((t1 - t0) / h)
    return Lattice(s0 - pad * h, t0 - pad * h, h, A + 2 * pad, B + 2 * pad)


def embed_values(lat: Lattice, C, M, mask, target: Lattice):
    """Express a lattice function on ``target`` (a refinement covering ``lat``).

    Values outside the source mask are zero; units become target.u.
    """
    f = lat.h / target.h
    oa, ob = (lat.s0 - target.s0) / target.h, (lat.t0 - target.t0) / target.h
    if f.denominator != 1 or oa.denominator != 1 or ob.denominator != 1:
        raise ValueError("target lattice does not refine the source lattice")
    f, oa, ob = int(f), int(oa), int(ob)
    if oa < 0 or ob < 0 or oa + lat.A * f > target.A or ob + lat.B * f > target.B:
        raise ValueError("target lattice does not cover the source lattice")
    Cf, Mf, mf = refine_values(C, M, mask, f)
    Ct = np.zeros((target.A + 1, target.B + 1), dtype=np.int64)
    Mt = np.zeros((target.A, target.B), dtype=np.int64)
    mt = np.zeros((target.A, target.B), dtype=bool)
    Ct[oa:oa + Cf.shape[0], ob:ob + Cf.shape[1]] = Cf
    Mt[oa:oa + Mf.shape[0], ob:ob + Mf.shape[1]] = Mf
    mt[oa:oa + mf.shape[0], ob:ob + mf.shape[1]] = mf
    return Ct, Mt, mt


def exterior_raster_distance(mask: np.ndarray) -> np.ndarray:
    """Chebyshev distance (units u) from every raster point to the closed cell union."""
    comp = np.pad(~mask.astype(bool), 1, constant_values=True)
    outside = interior_points(comp)[2:-2, 2:-2]
    d = ndimage.distance_transform_cdt(outside, metric="chessboard")
    return d.astype(np.int64)
