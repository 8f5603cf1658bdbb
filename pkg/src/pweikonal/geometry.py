"""Rectilinear geometry in the rotated frame.

A world polygon whose face normals all lie in E = {(±1, ±1)/sqrt2} becomes an
axis-parallel polygon under s = x1 + x2, t = x1 - x2. All such domains
(``HDomain``) are stored in the rotated frame, where the world l1 norm is the
Chebyshev norm. ``GeneralDomain`` holds arbitrary world polygons and is only
used for distance evaluation and for building inner approximations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from scipy import ndimage

from .errors import Infeasible, NotGridAligned, NotRectilinear, SelfIntersecting
from .numeric import Q2, format_rational, parse_rational

F = Fraction


class WPoint(NamedTuple):
    x1: Fraction
    x2: Fraction


class RPoint(NamedTuple):
    s: Fraction
    t: Fraction


def to_rotated(p) -> RPoint:
    x1, x2 = F(p[0]), F(p[1])
    return RPoint(x1 + x2, x1 - x2)


def to_world(p) -> WPoint:
    s, t = F(p[0]), F(p[1])
    return WPoint((s + t) / 2, (s - t) / 2)


def rotated_lengths_to_world(axis_len, diag_len=0) -> Q2:
    """World length of rotated-axis length ``axis_len`` plus world-axis length ``diag_len``.

    A rotated-axis segment of rotated length L has world length L*sqrt2/2; a
    rotated diagonal with |ds| = |dt| = L is world-axis-parallel with length L.
    """
    return Q2(F(diag_len), F(axis_len) / 2)


def segment_world_length(p, q) -> Q2:
    ds, dt = abs(F(q[0]) - F(p[0])), abs(F(q[1]) - F(p[1]))
    if ds == 0 or dt == 0:
        return Q2(0, (ds + dt) / 2)
    if ds == dt:
        return Q2(ds, 0)
    raise ValueError("segment length is not in Q(sqrt2) for this direction")


@dataclass(frozen=True)
class Segment:
    """Segment with rotated-frame endpoints."""

    p: RPoint
    q: RPoint

    @property
    def world_length(self) -> Q2:
        return segment_world_length(self.p, self.q)

    @property
    def world(self):
        return to_world(self.p), to_world(self.q)

    @property
    def direction(self):
        return (self.q[0] - self.p[0], self.q[1] - self.p[1])

    @property
    def normal(self):
        """Rotated-frame normal to the left of p -> q (not normalised)."""
        ds, dt = self.direction
        return (-dt, ds)


def _signed_area2(loop) -> Fraction:
    a = F(0)
    n = len(loop)
    for i in range(n):
        s0, t0 = loop[i]
        s1, t1 = loop[(i + 1) % n]
        a += s0 * t1 - s1 * t0
    return a


def _merge_collinear(loop):
    """Drop repeated vertices and vertices interior to straight runs."""
    pts = []
    for p in loop:
        if not pts or pts[-1] != p:
            pts.append(p)
    while len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    changed = True
    merged = False
    while changed and len(pts) >= 3:
        changed = False
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
            if cross == 0:
                del pts[i]
                changed = merged = True
                break
    return pts, merged


def _point_in_loop(p, loop) -> int:
    """+1 inside, 0 on boundary, -1 outside (any polygon, exact)."""
    s, t = p
    n = len(loop)
    inside = False
    for i in range(n):
        a = loop[i]
        b = loop[(i + 1) % n]
        # on-segment test
        cross = (b[0] - a[0]) * (t - a[1]) - (b[1] - a[1]) * (s - a[0])
        if cross == 0 and min(a[0], b[0]) <= s <= max(a[0], b[0]) and min(a[1], b[1]) <= t <= max(a[1], b[1]):
            return 0
        if (a[1] > t) != (b[1] > t):
            x = a[0] + (t - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
            if x > s:
                inside = not inside
    return 1 if inside else -1


def _cheb_to_axis_segment(p, a, b) -> Fraction:
    s, t = p
    if a[1] == b[1]:
        lo, hi = (a[0], b[0]) if a[0] <= b[0] else (b[0], a[0])
        ds = lo - s if s < lo else (s - hi if s > hi else F(0))
        return max(ds, abs(t - a[1]))
    lo, hi = (a[1], b[1]) if a[1] <= b[1] else (b[1], a[1])
    dt = lo - t if t < lo else (t - hi if t > hi else F(0))
    return max(dt, abs(s - a[0]))


def l1_point_segment(x, a, b):
    """Exact world l1 distance from x to segment [a, b] plus the nearest point."""
    d1, d2 = b[0] - a[0], b[1] - a[1]
    cands = [F(0), F(1)]
    if d1 != 0:
        lam = (x[0] - a[0]) / d1
        if 0 < lam < 1:
            cands.append(lam)
    if d2 != 0:
        lam = (x[1] - a[1]) / d2
        if 0 < lam < 1:
            cands.append(lam)
    best = None
    for lam in cands:
        y = (a[0] + lam * d1, a[1] + lam * d2)
        v = abs(x[0] - y[0]) + abs(x[1] - y[1])
        if best is None or v < best[0]:
            best = (v, y)
    return best


def segment_segment_l1(p0, p1, q0, q1) -> Fraction:
    """Exact l1 distance between two world segments.

    The objective |x(l) - y(m)|_1 is convex and piecewise linear on the unit
    square of parameters, so its minimum sits at a vertex of the arrangement
    formed by the box sides and the two lines where a coordinate difference
    vanishes.
    """
    a = (p1[0] - p0[0], p1[1] - p0[1])
    b = (q1[0] - q0[0], q1[1] - q0[1])
    c = (p0[0] - q0[0], p0[1] - q0[1])
    # difference_k(l, m) = c_k + l a_k - m b_k
    lines = [((1, 0), 0), ((1, 0), 1), ((0, 1), 0), ((0, 1), 1),
             ((a[0], -b[0]), -c[0]), ((a[1], -b[1]), -c[1])]
    best = None
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            (u1, v1), r1 = lines[i]
            (u2, v2), r2 = lines[j]
            det = F(u1) * v2 - F(v1) * u2
            if det == 0:
                continue
            lam = (F(r1) * v2 - F(v1) * r2) / det
            mu = (F(u1) * r2 - F(r1) * u2) / det
            if 0 <= lam <= 1 and 0 <= mu <= 1:
                v = abs(c[0] + lam * a[0] - mu * b[0]) + abs(c[1] + lam * a[1] - mu * b[1])
                if best is None or v < best:
                    best = v
    return best


class HDomain:
    """Bounded polygon that is axis-parallel in the rotated frame.

    ``loops`` are rotated-frame vertex cycles; outer loops counter-clockwise,
    holes clockwise. ``components`` groups loop indices, outer loop first.
    ``contacts`` carries degenerate shared segments from boolean operations.
    """

    def __init__(self, loops, components=None, contacts=(), allow_touching=False):
        self.loops = tuple(tuple(RPoint(F(s), F(t)) for s, t in lp) for lp in loops)
        if components is None:
            components = _group_components(self.loops)
        self.components = tuple(tuple(c) for c in components)
        self.contacts = tuple(contacts)
        self.allow_touching = allow_touching

    # basic measures
    @property
    def is_empty(self) -> bool:
        return not self.loops

    def edges(self):
        for lp in self.loops:
            n = len(lp)
            for i in range(n):
                yield lp[i], lp[(i + 1) % n]

    def faces(self) -> list:
        return [Segment(p, q) for p, q in self.edges()]

    @property
    def vertices(self):
        return [p for lp in self.loops for p in lp]

    @property
    def area(self) -> Fraction:
        """Rotated-frame area (world area is half of it)."""
        return sum((_signed_area2(lp) for lp in self.loops), F(0)) / 2

    @property
    def world_area(self) -> Fraction:
        return self.area / 2

    @property
    def perimeter(self) -> Q2:
        """World H1 measure of the boundary."""
        tot = F(0)
        for p, q in self.edges():
            tot += abs(q[0] - p[0]) + abs(q[1] - p[1])
        return Q2(0, tot / 2)

    def bbox(self):
        ss = [p[0] for p in self.vertices]
        ts = [p[1] for p in self.vertices]
        return min(ss), min(ts), max(ss), max(ts)

    def contains(self, p) -> int:
        """+1 strictly inside, 0 on the boundary, -1 outside (rotated point)."""
        p = (F(p[0]), F(p[1]))
        for a, b in self.edges():
            if _on_axis_segment(p, a, b):
                return 0
        crossings = 0
        for a, b in self.edges():
            if a[0] == b[0] and a[0] > p[0]:
                lo, hi = (a[1], b[1]) if a[1] < b[1] else (b[1], a[1])
                if lo <= p[1] < hi:
                    crossings += 1
        return 1 if crossings % 2 else -1

    def boundary_distance(self, p) -> Fraction:
        """Chebyshev distance (rotated frame) from p to the boundary."""
        p = (F(p[0]), F(p[1]))
        return min(_cheb_to_axis_segment(p, a, b) for a, b in self.edges())

    def component_domains(self) -> list:
        out = []
        for comp in self.components:
            lps = [self.loops[i] for i in comp]
            out.append(HDomain(lps, [tuple(range(len(lps)))], allow_touching=self.allow_touching))
        return out

    def world_segments(self):
        for a, b in self.edges():
            yield to_world(a), to_world(b)

    def coordinate_gcd(self, origin=None) -> Fraction:
        """gcd of all vertex coordinates measured from ``origin`` (a rational)."""
        if origin is None:
            s0, t0, _, _ = self.bbox()
        else:
            s0, t0 = origin
        vals = [p[0] - s0 for p in self.vertices] + [p[1] - t0 for p in self.vertices]
        return rational_gcd(vals)

    def to_dict(self) -> dict:
        loops = [[[format_rational(p[0]), format_rational(p[1])] for p in lp] for lp in _canonical_loops(self.loops)]
        return {"frame": "rotated", "loops": loops}

    def __repr__(self):
        return f"HDomain({len(self.loops)} loops, {sum(len(lp) for lp in self.loops)} vertices)"

    def translated(self, ds, dt) -> "HDomain":
        return HDomain([[(p[0] + ds, p[1] + dt) for p in lp] for lp in self.loops], self.components,
                       allow_touching=self.allow_touching)


def _on_axis_segment(p, a, b) -> bool:
    if a[1] == b[1]:
        return p[1] == a[1] and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
    return p[0] == a[0] and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def rational_gcd(vals) -> Fraction:
    vals = [F(v) for v in vals if v != 0]
    if not vals:
        return F(0)
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    g = 0
    for v in vals:
        g = math.gcd(g, abs(int(v * den)))
    return F(g, den)


def _canonical_loops(loops):
    """Rotate each loop to start at its leftmost-lowest vertex and sort loops by it."""
    out = []
    for lp in loops:
        k = min(range(len(lp)), key=lambda i: (lp[i][0], lp[i][1]))
        out.append(tuple(lp[k:]) + tuple(lp[:k]))
    return sorted(out, key=lambda lp: (lp[0][0], lp[0][1]))


def _loop_probe(lp):
    """A point strictly inside the loop near its first edge (for nesting tests)."""
    a, b = lp[0], lp[1]
    mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    return mid


def _group_components(loops):
    if not loops:
        return ()
    areas = [_signed_area2(lp) for lp in loops]
    outers = [i for i, a in enumerate(areas) if a > 0]
    holes = [i for i, a in enumerate(areas) if a < 0]
    comps = {i: [i] for i in outers}
    for h in holes:
        probe = _loop_probe(loops[h])
        owners = [o for o in outers if _point_in_loop(probe, loops[o]) >= 0]
        # the smallest containing outer loop owns the hole
        if not owners:
            raise SelfIntersecting("hole outside every outer loop")
        o = min(owners, key=lambda i: areas[i])
        comps[o].append(h)
    return tuple(tuple(comps[o]) for o in outers)


def _segments_cross(a, b, c, d) -> bool:
    """Do closed axis-parallel segments [a,b] and [c,d] intersect?"""
    def rng(u, v, k):
        return (min(u[k], v[k]), max(u[k], v[k]))
    for k in (0, 1):
        lo1, hi1 = rng(a, b, k)
        lo2, hi2 = rng(c, d, k)
        if hi1 < lo2 or hi2 < lo1:
            return False
    return True


def build_hdomain(loops, frame: str = "rotated", allow_touching: bool = False) -> HDomain:
    """Validate vertex cycles and return an ``HDomain``.

    Raises NotRectilinear if an edge is oblique in the rotated frame and
    SelfIntersecting if loops cross. Collinear consecutive edges are merged
    with a warning.
    """
    if frame not in ("world", "rotated"):
        raise ValueError("frame must be 'world' or 'rotated'")
    rl = []
    for lp in loops:
        pts = [(parse_rational(p[0]), parse_rational(p[1])) for p in lp]
        if frame == "world":
            pts = [tuple(to_rotated(p)) for p in pts]
        pts, merged = _merge_collinear(pts)
        if merged:
            warnings.warn("collinear adjacent faces merged", stacklevel=2)
        if len(pts) < 4:
            raise NotRectilinear("a loop needs at least four rectilinear vertices")
        for i in range(len(pts)):
            a, b = pts[i], pts[(i + 1) % len(pts)]
            if a[0] != b[0] and a[1] != b[1]:
                raise NotRectilinear(f"edge {to_world(a)} -> {to_world(b)} has a normal outside E")
        rl.append(pts)
    # simplicity
    segs = []
    for li, lp in enumerate(rl):
        n = len(lp)
        for i in range(n):
            segs.append((li, i, n, lp[i], lp[(i + 1) % n]))
    for x in range(len(segs)):
        for y in range(x + 1, len(segs)):
            l1, i1, n1, a, b = segs[x]
            l2, i2, n2, c, d = segs[y]
            if l1 == l2 and (abs(i1 - i2) == 1 or abs(i1 - i2) == n1 - 1):
                # adjacent edges only share their common vertex
                continue
            if _segments_cross(a, b, c, d):
                if allow_touching and _touch_only(a, b, c, d):
                    continue
                raise SelfIntersecting(f"edges {a}-{b} and {c}-{d} intersect")
    # orientation by nesting depth
    fixed = []
    for i, lp in enumerate(rl):
        probe = _interior_probe(lp)
        depth = sum(1 for j, other in enumerate(rl) if j != i and _point_in_loop(probe, other) > 0)
        area = _signed_area2(lp)
        want_ccw = depth % 2 == 0
        if (area > 0) != want_ccw:
            lp = lp[::-1]
        fixed.append(lp)
    return HDomain(fixed, allow_touching=allow_touching)


def _touch_only(a, b, c, d) -> bool:
    """True when two segments meet only at shared endpoints."""
    ends1 = {tuple(a), tuple(b)}
    ends2 = {tuple(c), tuple(d)}
    common = ends1 & ends2
    if not common:
        return False
    # collinear overlap beyond a point is a real intersection
    if (a[0] == b[0] == c[0] == d[0]) or (a[1] == b[1] == c[1] == d[1]):
        k = 1 if a[0] == b[0] else 0
        lo = max(min(a[k], b[k]), min(c[k], d[k]))
        hi = min(max(a[k], b[k]), max(c[k], d[k]))
        return lo == hi
    return True


def _interior_probe(lp):
    """A point strictly inside a simple rectilinear loop."""
    area = _signed_area2(lp)
    n = len(lp)
    for i in range(n):
        a, b = lp[i], lp[(i + 1) % n]
        mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        # inward normal for ccw orientation is the left normal
        ds, dt = b[0] - a[0], b[1] - a[1]
        norm = abs(ds) + abs(dt)
        nl = (-dt / norm, ds / norm)
        if area < 0:
            nl = (-nl[0], -nl[1])
        # step small enough to stay inside
        eps = _min_feature(lp) / 4
        q = (mid[0] + eps * nl[0], mid[1] + eps * nl[1])
        if _point_in_loop(q, lp) > 0:
            return q
    raise SelfIntersecting("degenerate loop")


def _min_feature(lp) -> Fraction:
    vals = set()
    for p in lp:
        vals.add(p[0])
    ss = sorted({p[0] for p in lp})
    ts = sorted({p[1] for p in lp})
    gaps = [b - a for a, b in zip(ss, ss[1:])] + [b - a for a, b in zip(ts, ts[1:])]
    return min(gaps)


class GeneralDomain:
    """Simple world polygon with arbitrary rational edge directions."""

    def __init__(self, loops):
        self.loops = tuple(tuple(WPoint(F(p[0]), F(p[1])) for p in lp) for lp in loops)
        self.components = ((0,),) if len(self.loops) == 1 else _group_components(self.loops)

    def edges(self):
        for lp in self.loops:
            n = len(lp)
            for i in range(n):
                yield lp[i], lp[(i + 1) % n]

    def world_segments(self):
        return list(self.edges())

    def contains_world(self, x) -> int:
        res = -1
        for lp in self.loops:
            r = _point_in_loop(x, lp)
            if r == 0:
                return 0
            if r > 0:
                res = -res if res > 0 else 1
        return res

    def boundary_distance_world(self, x) -> Fraction:
        x = (F(x[0]), F(x[1]))
        return min(l1_point_segment(x, a, b)[0] for a, b in self.edges())

    @property
    def world_area(self) -> Fraction:
        return sum((_signed_area2(lp) for lp in self.loops), F(0)) / 2

    def to_dict(self) -> dict:
        loops = [[[format_rational(p[0]), format_rational(p[1])] for p in lp] for lp in self.loops]
        return {"general": True, "frame": "world", "loops": loops}

    def rotated_bbox(self):
        pts = [to_rotated(p) for lp in self.loops for p in lp]
        return min(p[0] for p in pts), min(p[1] for p in pts), max(p[0] for p in pts), max(p[1] for p in pts)

    def __repr__(self):
        return f"GeneralDomain({len(self.loops)} loops)"


def unit_square() -> GeneralDomain:
    return GeneralDomain([[(0, 0), (1, 0), (1, 1), (0, 1)]])


def diamond(r, center=(0, 0)) -> HDomain:
    """World l1 ball of radius r: the rotated square of half-width r."""
    r = F(r)
    c = to_rotated(center)
    s, t = c
    return HDomain([[(s - r, t - r), (s + r, t - r), (s + r, t + r), (s - r, t + r)]])


def rect(s0, t0, s1, t1) -> HDomain:
    """Rotated-frame rectangle [s0, s1] x [t0, t1]."""
    s0, t0, s1, t1 = map(F, (s0, t0, s1, t1))
    return HDomain([[(s0, t0), (s1, t0), (s1, t1), (s0, t1)]])


def l1_distance(x, D) -> Q2:
    """Exact l1 distance from world point x to the boundary of D."""
    x = WPoint(F(x[0]), F(x[1]))
    if isinstance(D, HDomain):
        return Q2(D.boundary_distance(to_rotated(x)))
    return Q2(D.boundary_distance_world(x))


def hdomain_world_distance(D: HDomain, x) -> Fraction:
    return D.boundary_distance(to_rotated(x))


# ---------------------------------------------------------------------------
# cell masks on product grids


def rasterize(D: HDomain, xs: Sequence[Fraction], ys: Sequence[Fraction]) -> np.ndarray:
    """Cell mask of D on the product grid xs x ys (coordinates must include all vertices)."""
    ix = {v: i for i, v in enumerate(xs)}
    iy = {v: j for j, v in enumerate(ys)}
    T = np.zeros((len(xs) - 1, len(ys) - 1), dtype=np.int8)
    for a, b in D.edges():
        if a[1] != b[1]:
            continue
        try:
            i0, i1 = sorted((ix[a[0]], ix[b[0]]))
            j = iy[a[1]]
        except KeyError:
            raise NotGridAligned("domain vertex is not on the grid") from None
        if j < T.shape[1]:
            T[i0:i1, j] ^= 1
    return (np.cumsum(T, axis=1) % 2).astype(bool)


def uniform_axes(s0, t0, pitch, A, B):
    xs = [F(s0) + i * F(pitch) for i in range(A + 1)]
    ys = [F(t0) + j * F(pitch) for j in range(B + 1)]
    return xs, ys


def rasterize_uniform(D: HDomain, s0, t0, pitch, A, B) -> np.ndarray:
    """Mask of D on the uniform grid with origin (s0, t0).

    Vertices must lie on grid lines; otherwise NotGridAligned.
    """
    s0, t0, pitch = F(s0), F(t0), F(pitch)
    T = np.zeros((A, B), dtype=np.int8)
    for a, b in D.edges():
        for p in (a, b):
            if (p[0] - s0) % pitch or (p[1] - t0) % pitch:
                raise NotGridAligned(f"vertex {p} is not on the pitch-{pitch} grid")
        if a[1] != b[1]:
            continue
        i0, i1 = sorted((int((a[0] - s0) / pitch), int((b[0] - s0) / pitch)))
        j = int((a[1] - t0) / pitch)
        i0, i1 = max(i0, 0), min(i1, A)
        if 0 <= j < B and i0 < i1:
            T[i0:i1, j] ^= 1
    return (np.cumsum(T, axis=1) % 2).astype(bool)


_DIRS = {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}


def trace_mask(mask: np.ndarray, xs, ys, allow_touching=True) -> HDomain:
    """Boundary loops of a cell mask (interior on the left).

    At pinch vertices the sharpest left turn is taken, so diagonally touching
    cells stay on separate loops. Components are the 4-connected cell groups.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return HDomain([], [])
    lab, ncomp = ndimage.label(mask)
    loops = []
    comps = []
    for k in range(1, ncomp + 1):
        sub = lab == k
        comp_loops = _trace_component(sub)
        first = len(loops)
        ordered = sorted(comp_loops, key=lambda lp: -_signed_area2(lp))
        if _signed_area2(ordered[0]) <= 0 or any(_signed_area2(lp) > 0 for lp in ordered[1:]):
            raise SelfIntersecting("component boundary has several outer loops")
        for lp in ordered:
            loops.append([(xs[i], ys[j]) for i, j in lp])
        comps.append(tuple(range(first, len(loops))))
    # collinear runs in index space may span non-uniform grid lines but stay collinear
    return HDomain(loops, comps, allow_touching=allow_touching)


def _trace_component(sub):
    A, B = sub.shape
    pad = np.pad(sub, 1)
    inner = pad[1:-1, 1:-1]
    out = {}
    # bottom edges: cell (i,j) in, (i,j-1) out
    for i, j in zip(*np.nonzero(inner & ~pad[1:-1, :-2])):
        out.setdefault((i, j), []).append((i + 1, j))
    for i, j in zip(*np.nonzero(inner & ~pad[1:-1, 2:])):
        out.setdefault((i + 1, j + 1), []).append((i, j + 1))
    for i, j in zip(*np.nonzero(inner & ~pad[:-2, 1:-1])):
        out.setdefault((i, j + 1), []).append((i, j))
    for i, j in zip(*np.nonzero(inner & ~pad[2:, 1:-1])):
        out.setdefault((i + 1, j), []).append((i + 1, j + 1))
    def succ(u, v):
        outs = out[v]
        if len(outs) == 1:
            return outs[0]
        din = (v[0] - u[0], v[1] - u[1])

        def turn(w):
            d = (w[0] - v[0], w[1] - v[1])
            cross = din[0] * d[1] - din[1] * d[0]
            dot = din[0] * d[0] + din[1] * d[1]
            # sharpest left turn first
            return 0 if cross > 0 else (1 if dot > 0 else 2)
        return min(outs, key=turn)

    used = set()
    loops = []
    for start in sorted(out):
        for first in out[start]:
            if (start, first) in used:
                continue
            lp = []
            u, v = start, first
            while (u, v) not in used:
                used.add((u, v))
                lp.append(u)
                u, v = v, succ(u, v)
            lp = [(int(a), int(b)) for a, b in lp]
            simp, _ = _merge_collinear(lp)
            loops.append(simp)
    return loops


def hdomain_from_mask(mask, s0, t0, pitch) -> HDomain:
    A, B = mask.shape
    xs, ys = uniform_axes(s0, t0, pitch, A, B)
    return trace_mask(mask, xs, ys)


# ---------------------------------------------------------------------------
# booleans


@dataclass
class BooleanResult:
    domain: HDomain
    contacts: list = field(default_factory=list)

    @property
    def components(self):
        return self.domain.component_domains()


def _contact_segments(A: HDomain, B: HDomain):
    """Collinear overlaps of positive length between the boundaries of A and B."""
    out = []
    for a0, a1 in A.edges():
        for b0, b1 in B.edges():
            if a0[0] == a1[0] == b0[0] == b1[0]:
                k, fixed = 1, a0[0]
            elif a0[1] == a1[1] == b0[1] == b1[1]:
                k, fixed = 0, a0[1]
            else:
                continue
            lo = max(min(a0[k], a1[k]), min(b0[k], b1[k]))
            hi = min(max(a0[k], a1[k]), max(b0[k], b1[k]))
            if lo < hi:
                if k == 1:
                    out.append(Segment(RPoint(fixed, lo), RPoint(fixed, hi)))
                else:
                    out.append(Segment(RPoint(lo, fixed), RPoint(hi, fixed)))
    return out


def rect_boolean(op: str, A: HDomain, B: HDomain) -> BooleanResult:
    """Exact union / difference / intersection of two H-domains.

    Works by coordinate compression: elementary rectangles are classified by
    the two operand masks and the result is traced back into loops. Shared
    boundary pieces that vanish from the result are returned as contacts.
    """
    xs = sorted({p[0] for p in A.vertices} | {p[0] for p in B.vertices})
    ys = sorted({p[1] for p in A.vertices} | {p[1] for p in B.vertices})
    if len(xs) < 2 or len(ys) < 2:
        return BooleanResult(HDomain([], []), [])
    ma = rasterize(A, xs, ys) if not A.is_empty else np.zeros((len(xs) - 1, len(ys) - 1), bool)
    mb = rasterize(B, xs, ys) if not B.is_empty else np.zeros_like(ma)
    if op == "union":
        m = ma | mb
    elif op == "intersection":
        m = ma & mb
    elif op == "difference":
        m = ma & ~mb
    else:
        raise ValueError(f"unknown boolean op {op!r}")
    dom = trace_mask(m, xs, ys)
    contacts = _contact_segments(A, B) if not (A.is_empty or B.is_empty) else []
    dom.contacts = tuple(contacts)
    return BooleanResult(dom, contacts)


def union_all(domains) -> HDomain:
    domains = list(domains)
    xs = sorted({p[0] for D in domains for p in D.vertices})
    ys = sorted({p[1] for D in domains for p in D.vertices})
    m = np.zeros((len(xs) - 1, len(ys) - 1), bool)
    for D in domains:
        m |= rasterize(D, xs, ys)
    return trace_mask(m, xs, ys)


# ---------------------------------------------------------------------------
# vectorised float distances (screening only; decisions are re-checked exactly)


def _world_segments_float(D):
    if isinstance(D, HDomain):
        segs = [(to_world(a), to_world(b)) for a, b in D.edges()]
    else:
        segs = list(D.edges())
    return np.array([[float(a[0]), float(a[1]), float(b[0]), float(b[1])] for a, b in segs])


def l1_distance_float(D, X1, X2) -> np.ndarray:
    """Float l1 distance to the boundary for arrays of world points."""
    segs = _world_segments_float(D)
    best = np.full(X1.shape, np.inf)
    for a1, a2, b1, b2 in segs:
        d1, d2 = b1 - a1, b2 - a2
        cands = [np.zeros_like(X1), np.ones_like(X1)]
        if d1 != 0:
            cands.append(np.clip((X1 - a1) / d1, 0, 1))
        if d2 != 0:
            cands.append(np.clip((X2 - a2) / d2, 0, 1))
        for lam in cands:
            v = np.abs(X1 - a1 - lam * d1) + np.abs(X2 - a2 - lam * d2)
            np.minimum(best, v, out=best)
    return best


def contains_float(D, X1, X2) -> np.ndarray:
    """Even-odd containment of world points (float)."""
    if isinstance(D, HDomain):
        segs = [(to_world(a), to_world(b)) for a, b in D.edges()]
    else:
        segs = list(D.edges())
    inside = np.zeros(X1.shape, bool)
    for a, b in segs:
        a1, a2, b1, b2 = float(a[0]), float(a[1]), float(b[0]), float(b[1])
        if a2 == b2:
            continue
        cond = (a2 > X2) != (b2 > X2)
        xc = a1 + (X2 - a2) * (b1 - a1) / (b2 - a2)
        inside ^= cond & (xc > X1)
    return inside


def exact_distance_and_witness(D, x):
    """Exact l1 distance from world point x to boundary of D with the nearest boundary point."""
    x = (F(x[0]), F(x[1]))
    segs = [(to_world(a), to_world(b)) for a, b in D.edges()] if isinstance(D, HDomain) else list(D.edges())
    best = None
    for a, b in segs:
        v, y = l1_point_segment(x, a, b)
        if best is None or v < best[0]:
            best = (v, y)
    return best


def exact_contains(D, x) -> int:
    if isinstance(D, HDomain):
        return D.contains(to_rotated(x))
    return D.contains_world(x)


# ---------------------------------------------------------------------------
# inner approximations


@dataclass
class Certificate:
    n: int
    tau: Fraction
    pitch: Fraction
    min_distance: Fraction
    inner_point: WPoint
    boundary_point: WPoint
    lower: Fraction
    upper: Fraction

    @property
    def ok(self) -> bool:
        return self.lower <= self.min_distance <= self.upper


@dataclass
class InnerApprox:
    domain: HDomain
    certificate: Certificate
    mask: np.ndarray
    a0: int
    b0: int
    k: int

    @property
    def pitch(self) -> Fraction:
        return F(1, 2 ** self.k)


def snap_offset(n: int) -> Fraction:
    """Target offset between the two certified bounds 1/(n+1/2) and 1/n."""
    return F(1) / (n + F(3, 8))


def _grid_box(D, k):
    p = F(1, 2 ** k)
    if isinstance(D, HDomain):
        s0, t0, s1, t1 = D.bbox()
    else:
        s0, t0, s1, t1 = D.rotated_bbox()
    a0, b0 = math.floor(s0 / p), math.floor(t0 / p)
    a1, b1 = math.ceil(s1 / p), math.ceil(t1 / p)
    return a0, b0, a1 - a0, b1 - b0


def _refine_mask(prev: InnerApprox, k, a0, b0, A, B):
    f = 2 ** (k - prev.k)
    up = np.kron(prev.mask, np.ones((f, f), dtype=bool))
    out = np.zeros((A, B), bool)
    oa, ob = prev.a0 * f - a0, prev.b0 * f - b0
    out[oa:oa + up.shape[0], ob:ob + up.shape[1]] = up
    return out


def inner_approx(D, n: int, prev: InnerApprox | None = None, max_extra_levels: int = 8) -> InnerApprox:
    """Grid-snapped inner approximation Omega_n with a distance certificate.

    Cells of the rotated grid at pitch 2**-k are kept when they lie inside D
    at l1 distance at least tau = 1/(n + 3/8) from the boundary; the union
    with ``prev`` keeps the sequence increasing. The pitch starts at the
    largest power of two not exceeding 1/n - tau and is refined until the
    minimum distance also certifies the upper bound 1/n.
    """
    if n < 1:
        raise ValueError("n must be positive")
    tau = snap_offset(n)
    lower, upper = F(2, 2 * n + 1), F(1, n)
    gap = upper - tau
    k = 0
    while F(1, 2 ** k) > gap:
        k += 1
    if prev is not None:
        k = max(k, prev.k)
    for kk in range(k, k + max_extra_levels + 1):
        res = _inner_at_level(D, n, kk, tau, lower, upper, prev)
        if res is None:
            raise Infeasible(f"no point of the domain is farther than {tau} from its boundary")
        if res is not False:
            return res
    raise Infeasible(f"could not certify level {n} within {max_extra_levels} refinements")


def _inner_at_level(D, n, k, tau, lower, upper, prev):
    p = F(1, 2 ** k)
    a0, b0, A, B = _grid_box(D, k)
    ia = np.arange(A)[:, None] + a0
    ib = np.arange(B)[None, :] + b0
    S = (ia + 0.5) * float(p)
    T = (ib + 0.5) * float(p)
    S, T = np.broadcast_arrays(S, T)
    X1, X2 = (S + T) / 2, (S - T) / 2
    inside = contains_float(D, X1, X2)
    dist = l1_distance_float(D, X1, X2)
    dist = np.where(inside, dist, -np.inf)
    half = float(p) / 2
    ftau = float(tau)
    # the supremum of the boundary distance over D is at most max centre distance + p/2
    if dist.max() + half < ftau - 1e-12:
        return None
    eps = 1e-9
    sel = dist - half >= ftau + eps
    border = np.abs(dist - half - ftau) <= eps
    for i, j in zip(*np.nonzero(border)):
        c = _cell_centre(a0 + i, b0 + j, p)
        if exact_contains(D, c) > 0 and exact_distance_and_witness(D, c)[0] - p / 2 >= tau:
            sel[i, j] = True
    mask = sel
    if prev is not None:
        mask = mask | _refine_mask(prev, k, a0, b0, A, B)
    if not mask.any():
        return False
    # exact minimum of the boundary distance over the closed union of cells
    vals = np.where(mask, dist - half, np.inf)
    fmin = vals.min()
    best = None
    for i, j in zip(*np.nonzero(vals <= fmin + 1e-9)):
        c = _cell_centre(a0 + i, b0 + j, p)
        dc, y = exact_distance_and_witness(D, c)
        v = dc - p / 2
        if best is None or v < best[0]:
            best = (v, c, y, dc)
    vmin, c, y, dc = best
    if vmin > upper:
        return False
    # point of the cell (an l1 ball of radius p/2) nearest to y
    lam = (p / 2) / dc
    x = WPoint(c[0] + lam * (y[0] - c[0]), c[1] + lam * (y[1] - c[1]))
    cert = Certificate(n, tau, p, vmin, x, WPoint(*y), lower, upper)
    dom = hdomain_from_mask(mask, a0 * p, b0 * p, p)
    return InnerApprox(dom, cert, mask, a0, b0, k)


def _cell_centre(a, b, p):
    s = (a + F(1, 2)) * p
    t = (b + F(1, 2)) * p
    return to_world((s, t))


def recheck_certificate(omega: HDomain, D, n: int) -> Fraction:
    """Independent recomputation of d(Omega, boundary of D) from segment distances.

    The minimum of the boundary distance over a subset of D is attained on
    the subset's boundary, so the exact segment-to-segment l1 distance over
    all pairs of faces is enough.
    """
    dsegs = [(to_world(a), to_world(b)) for a, b in D.edges()] if isinstance(D, HDomain) else list(D.edges())
    best = None
    for a, b in omega.edges():
        wa, wb = to_world(a), to_world(b)
        for c, d in dsegs:
            v = segment_segment_l1(wa, wb, c, d)
            if best is None or v < best:
                best = v
    return best


# ---------------------------------------------------------------------------
# domain files


def domain_from_dict(obj) -> HDomain | GeneralDomain:
    frame = obj.get("frame", "rotated")
    loops = obj["loops"]
    if obj.get("general"):
        return GeneralDomain([[(parse_rational(p[0]), parse_rational(p[1])) for p in lp] for lp in loops])
    return build_hdomain(loops, frame)


# ---------------------------------------------------------------------------
# exact batched queries (integer arithmetic on a common denominator)


def _common_scale(values):
    q = 1
    for v in values:
        q = math.lcm(q, F(v).denominator)
    return q


def _batch_arrays(D: HDomain, pts):
    vals = [c for p in pts for c in p] + [c for v in D.vertices for c in v]
    q = _common_scale(vals)
    big = max(abs(F(v)) for v in vals) * q if vals else 0
    dtype = np.int64 if big < 2**60 else object
    P = np.array([[F(p[0]) * q, F(p[1]) * q] for p in pts], dtype=object)
    P = np.array([[int(x) for x in row] for row in P], dtype=dtype).reshape(-1, 2)
    E = np.array([[int(a[0] * q), int(a[1] * q), int(b[0] * q), int(b[1] * q)] for a, b in D.edges()],
                 dtype=dtype).reshape(-1, 4)
    return q, P, E


def boundary_distance_batch(D: HDomain, pts) -> list:
    """Exact Chebyshev (= world l1) distances from rotated points to the boundary."""
    if not len(pts):
        return []
    q, P, E = _batch_arrays(D, pts)
    s, t = P[:, :1], P[:, 1:]
    a0, a1, b0, b1 = E[:, 0][None], E[:, 1][None], E[:, 2][None], E[:, 3][None]
    horiz = a1 == b1
    lo_s, hi_s = np.minimum(a0, b0), np.maximum(a0, b0)
    lo_t, hi_t = np.minimum(a1, b1), np.maximum(a1, b1)
    zero = s * 0
    ds = np.maximum(np.maximum(lo_s - s, s - hi_s), zero)
    dt = np.maximum(np.maximum(lo_t - t, t - hi_t), zero)
    # horizontal edge: t fixed; vertical edge: s fixed
    dist = np.where(horiz, np.maximum(ds, np.abs(t - a1)), np.maximum(dt, np.abs(s - a0)))
    m = dist.min(axis=1)
    return [F(int(v), q) for v in m]


def contains_batch(D: HDomain, pts) -> np.ndarray:
    """Exact +1 / 0 / -1 membership for many rotated points."""
    if not len(pts):
        return np.zeros(0, dtype=np.int64)
    q, P, E = _batch_arrays(D, pts)
    s, t = P[:, :1], P[:, 1:]
    a0, a1, b0, b1 = E[:, 0][None], E[:, 1][None], E[:, 2][None], E[:, 3][None]
    lo_s, hi_s = np.minimum(a0, b0), np.maximum(a0, b0)
    lo_t, hi_t = np.minimum(a1, b1), np.maximum(a1, b1)
    horiz = a1 == b1
    on = np.where(horiz, (t == a1) & (lo_s <= s) & (s <= hi_s), (s == a0) & (lo_t <= t) & (t <= hi_t))
    cross = (~horiz) & (a0 > s) & (lo_t <= t) & (t < hi_t)
    n = cross.sum(axis=1) % 2
    out = np.where(n == 1, 1, -1)
    out[on.any(axis=1)] = 0
    return out.astype(np.int64)
