"""Piecewise-affine solutions of the eikonal system and their jump sets.

A ``PLSolution`` is a finite complex of convex polygons (rotated frame), each
carrying v(x) = g1*x1 + g2*x2 + c in world coordinates with g1, g2 = ±1.
Everything here is exact: tiling, continuity and zero trace are checked on
elementary intervals of the supporting lines of all edges, and measures are
returned in Q(sqrt2).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import NonManifoldEdge, UnsupportedBasisIndex
from .geometry import HDomain, RPoint, segment_world_length, to_rotated, to_world
from .numeric import Q2, ZERO, format_rational, parse_rational

F = Fraction


@dataclass(frozen=True)
class AffinePiece:
    cell: tuple
    grad: tuple
    offset: Fraction

    def __post_init__(self):
        cell = tuple(RPoint(F(p[0]), F(p[1])) for p in self.cell)
        object.__setattr__(self, "cell", cell)
        object.__setattr__(self, "grad", (int(self.grad[0]), int(self.grad[1])))
        object.__setattr__(self, "offset", F(self.offset))

    def value_rotated(self, p) -> Fraction:
        s, t = p
        g1, g2 = self.grad
        # x1 = (s+t)/2, x2 = (s-t)/2
        return (g1 * (s + t) + g2 * (s - t)) / 2 + self.offset

    def value_world(self, x) -> Fraction:
        return self.grad[0] * F(x[0]) + self.grad[1] * F(x[1]) + self.offset

    @property
    def rotated_gradient(self):
        g1, g2 = self.grad
        return (F(g1 + g2, 2), F(g1 - g2, 2))

    def area(self) -> Fraction:
        """Rotated-frame area."""
        c = self.cell
        a = F(0)
        for i in range(len(c)):
            a += c[i][0] * c[(i + 1) % len(c)][1] - c[(i + 1) % len(c)][0] * c[i][1]
        return a / 2

    def bbox(self):
        ss = [p[0] for p in self.cell]
        ts = [p[1] for p in self.cell]
        return min(ss), min(ts), max(ss), max(ts)

    def negated(self) -> "AffinePiece":
        return AffinePiece(self.cell, (-self.grad[0], -self.grad[1]), -self.offset)


class PLSolution:
    """Finite cell complex of affine pieces on an H-domain.

    ``grid`` optionally holds the lattice representation (lattice, corner
    values, centre values, mask) the pieces were generated from; fast
    evaluators use it, and tests cross-check them against the generic path.
    """

    def __init__(self, domain: HDomain, pieces=None, grid=None):
        self.domain = domain
        self._pieces = None
        if pieces is not None:
            self._pieces = [p if isinstance(p, AffinePiece) else AffinePiece(*p) for p in pieces]
        elif grid is None:
            raise ValueError("either pieces or a lattice representation is required")
        self.grid = grid
        self._sweep = None

    @property
    def pieces(self):
        if self._pieces is None:
            from .lattice import to_pieces

            self._pieces = [AffinePiece(*p) for p in to_pieces(*self.grid)]
        return self._pieces

    def negated(self) -> "PLSolution":
        grid = None
        if self.grid is not None:
            lat, C, M, mask = self.grid
            grid = (lat, -C, -M, mask)
        if grid is not None:
            return PLSolution(self.domain, None, grid)
        return PLSolution(self.domain, [p.negated() for p in self.pieces])

    def evaluate(self, x) -> Fraction:
        """Value at a world point inside the closed domain."""
        rp = to_rotated(x)
        for p in self.pieces:
            if _in_convex(rp, p.cell):
                return p.value_rotated(rp)
        raise ValueError(f"point {x} is not covered by any piece")

    def to_dict(self, domain_obj=None) -> dict:
        return {
            "domain": domain_obj if domain_obj is not None else self.domain.to_dict(),
            "pieces": [
                {
                    "cell": [[format_rational(p[0]), format_rational(p[1])] for p in pc.cell],
                    "grad": list(pc.grad),
                    "offset": format_rational(pc.offset),
                }
                for pc in self.pieces
            ],
        }

    @staticmethod
    def from_dict(obj, domain=None) -> "PLSolution":
        from .geometry import domain_from_dict

        if domain is None:
            domain = domain_from_dict(obj["domain"])
        pieces = []
        for pc in obj["pieces"]:
            cell = [(parse_rational(p[0]), parse_rational(p[1])) for p in pc["cell"]]
            pieces.append(AffinePiece(cell, tuple(pc["grad"]), parse_rational(pc["offset"])))
        return PLSolution(domain, pieces)

    def serialization_key(self) -> tuple:
        """Canonical ordering key, used for deterministic tie-breaking."""
        items = []
        for pc in self.pieces:
            k = min(range(len(pc.cell)), key=lambda i: (pc.cell[i][0], pc.cell[i][1]))
            cyc = pc.cell[k:] + pc.cell[:k]
            items.append((tuple((p[0], p[1]) for p in cyc), pc.grad, pc.offset))
        return tuple(sorted(items))


def _in_convex(p, cell) -> bool:
    n = len(cell)
    for i in range(n):
        a, b = cell[i], cell[(i + 1) % n]
        if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# supporting-line sweep


def _line_key(p, q):
    ds, dt = q[0] - p[0], q[1] - p[1]
    m = max(abs(ds), abs(dt))
    d = (ds / m, dt / m)
    if d[0] < 0 or (d[0] == 0 and d[1] < 0):
        d = (-d[0], -d[1])
    off = d[0] * p[1] - d[1] * p[0]
    return d, off


def _param(p, d):
    return p[0] * d[0] + p[1] * d[1]


@dataclass
class SweepResult:
    shared: list            # (piece_i_left, piece_j_right, p, q) with i on the left of p->q
    boundary: list          # (piece, p, q)
    errors: list            # (kind, point)


def _sweep(v: PLSolution) -> SweepResult:
    lines = defaultdict(list)
    for k, pc in enumerate(v.pieces):
        c = pc.cell
        for i in range(len(c)):
            p, q = c[i], c[(i + 1) % len(c)]
            if p == q:
                continue
            d, off = _line_key(p, q)
            lp, lq = _param(p, d), _param(q, d)
            orient = 1 if lq > lp else -1
            lines[(d, off)].append((min(lp, lq), max(lp, lq), orient, k))
    for p, q in v.domain.edges():
        d, off = _line_key(p, q)
        lp, lq = _param(p, d), _param(q, d)
        orient = 1 if lq > lp else -1
        lines[(d, off)].append((min(lp, lq), max(lp, lq), orient, -1))
    shared, boundary, errors = [], [], []
    for (d, off), items in lines.items():
        pts = sorted({x for it in items for x in it[:2]})
        events = defaultdict(list)
        for idx, it in enumerate(items):
            events[it[0]].append(idx)
        active = set()
        ends = defaultdict(list)
        for idx, it in enumerate(items):
            ends[it[1]].append(idx)

        def point_at(lam):
            # inverse of (param, offset): p = lam*d + off*(-d_t, d_s) / |d|^2
            n2 = d[0] * d[0] + d[1] * d[1]
            return RPoint((lam * d[0] - off * d[1]) / n2, (lam * d[1] + off * d[0]) / n2)

        for a, b in zip(pts, pts[1:]):
            for idx in ends.get(a, ()):
                active.discard(idx)
            for idx in events.get(a, ()):
                active.add(idx)
            if not active:
                continue
            fw = [items[i] for i in active if items[i][3] >= 0 and items[i][2] > 0]
            bw = [items[i] for i in active if items[i][3] >= 0 and items[i][2] < 0]
            bd = [items[i] for i in active if items[i][3] < 0]
            pa, pb = point_at(a), point_at(b)
            if not bd:
                if len(fw) == 1 and len(bw) == 1:
                    shared.append((fw[0][3], bw[0][3], pa, pb))
                elif len(fw) + len(bw) == 1:
                    errors.append(("gap", point_at((a + b) / 2)))
                else:
                    errors.append(("overlap", point_at((a + b) / 2)))
            elif len(bd) == 1:
                o = bd[0][2]
                same = fw if o > 0 else bw
                other = bw if o > 0 else fw
                if len(same) == 1 and not other:
                    k = same[0][3]
                    boundary.append((k, pa, pb) if o > 0 else (k, pb, pa))
                elif not same and not other:
                    errors.append(("uncovered boundary", point_at((a + b) / 2)))
                else:
                    errors.append(("outside domain", point_at((a + b) / 2)))
            else:
                errors.append(("boundary overlap", point_at((a + b) / 2)))
    return SweepResult(shared, boundary, errors)


def get_sweep(v: PLSolution) -> SweepResult:
    if v._sweep is None:
        v._sweep = _sweep(v)
    return v._sweep


# ---------------------------------------------------------------------------
# validation


@dataclass
class Check:
    name: str
    passed: bool
    witness: Optional[tuple] = None
    detail: str = ""
    violations: int = 0


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        out = {}
        for c in self.checks:
            e = {"pass": c.passed}
            if c.witness is not None:
                e["witness"] = [format_rational(c.witness[0]), format_rational(c.witness[1])]
            if c.detail:
                e["detail"] = c.detail
            if c.violations:
                e["violations"] = c.violations
            out[c.name] = e
        return out


def validate(v: PLSolution, ebound: bool = True) -> ValidationReport:
    """Run tiling, gradient, continuity, zero-trace and Ebound checks."""
    rep = ValidationReport()
    bad = [pc for pc in v.pieces if abs(pc.grad[0]) != 1 or abs(pc.grad[1]) != 1]
    rep.checks.append(Check("gradient_labels", not bad,
                            to_world(bad[0].cell[0]) if bad else None,
                            f"{len(bad)} pieces with invalid gradient" if bad else "", len(bad)))
    sw = get_sweep(v)
    area_ok = sum((pc.area() for pc in v.pieces), F(0)) == v.domain.area
    nonconvex = [pc for pc in v.pieces if not _is_convex_ccw(pc.cell)]
    tiling_ok = not sw.errors and area_ok and not nonconvex
    wit = None
    detail = ""
    if sw.errors:
        wit = to_world(sw.errors[0][1])
        detail = sw.errors[0][0]
    elif nonconvex:
        wit = to_world(nonconvex[0].cell[0])
        detail = "piece is not a convex counter-clockwise polygon"
    elif not area_ok:
        detail = "piece areas do not add up to the domain area"
    rep.checks.append(Check("tiling", tiling_ok, wit, detail, len(sw.errors)))
    # continuity
    cont_bad = []
    for i, j, p, q in sw.shared:
        a, b = v.pieces[i], v.pieces[j]
        if a.value_rotated(p) != b.value_rotated(p) or a.value_rotated(q) != b.value_rotated(q):
            cont_bad.append(((i, j), p if a.value_rotated(p) != b.value_rotated(p) else q))
    rep.checks.append(Check("continuity", not cont_bad, to_world(cont_bad[0][1]) if cont_bad else None,
                            f"pieces {cont_bad[0][0]} disagree" if cont_bad else "", len(cont_bad)))
    trace_bad = []
    for k, p, q in sw.boundary:
        pc = v.pieces[k]
        for x in (p, q):
            if pc.value_rotated(x) != 0:
                trace_bad.append((k, x))
                break
    rep.checks.append(Check("zero_trace", not trace_bad, to_world(trace_bad[0][1]) if trace_bad else None,
                            f"piece {trace_bad[0][0]} nonzero on boundary" if trace_bad else "", len(trace_bad)))
    if ebound:
        n_bad, wit = ebound_violations(v)
        rep.checks.append(Check("ebound", n_bad == 0, wit, f"{n_bad} overlay vertices with |v| > d" if n_bad else "", n_bad))
    return rep


def validate_grid(v: PLSolution, ebound: bool = True) -> ValidationReport:
    """Validation of a lattice-backed solution directly on its lattice.

    Same check names as validate(); tiling means the cell mask equals the
    domain mask, gradients and continuity follow from the corner/centre
    value rules, the trace is read off the boundary corners.
    """
    from .lattice import boundary_corners, check_lattice_function

    if v.grid is None:
        raise ValueError("solution has no lattice representation")
    lat, C, M, mask = v.grid
    m = mask.astype(bool)
    rep = ValidationReport()
    try:
        check_lattice_function(C, M, m)
        grad_ok, detail = True, ""
    except ValueError as exc:
        grad_ok, detail = False, str(exc)
    rep.checks.append(Check("gradient_labels", grad_ok, None, detail, 0 if grad_ok else 1))
    dm = lat.mask(v.domain)
    diff = np.argwhere(dm != m)
    wit = to_world(lat.corner(*map(int, diff[0]))) if len(diff) else None
    rep.checks.append(Check("tiling", not len(diff), wit,
                            f"{len(diff)} cells differ from the domain" if len(diff) else "", len(diff)))
    rep.checks.append(Check("continuity", grad_ok, None, "" if grad_ok else detail, 0 if grad_ok else 1))
    bc = boundary_corners(m)
    used = np.zeros(C.shape, dtype=bool)
    for di in (0, 1):
        for dj in (0, 1):
            used[di:di + m.shape[0], dj:dj + m.shape[1]] |= m
    bad = np.argwhere(bc & used & (C != 0))
    wit = to_world(lat.corner(*map(int, bad[0]))) if len(bad) else None
    rep.checks.append(Check("zero_trace", not len(bad), wit,
                            f"{len(bad)} boundary corners with nonzero value" if len(bad) else "", len(bad)))
    if ebound:
        n_bad, wit = ebound_violations(v)
        rep.checks.append(Check("ebound", n_bad == 0, wit, f"{n_bad} overlay vertices with |v| > d" if n_bad else "", n_bad))
    return rep


def _is_convex_ccw(cell) -> bool:
    n = len(cell)
    if n < 3:
        return False
    for i in range(n):
        a, b, c = cell[i], cell[(i + 1) % n], cell[(i + 2) % n]
        if (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) < 0:
            return False
    return True


def clip_convex(P, Q):
    """Intersection of two convex counter-clockwise polygons (exact)."""
    out = list(P)
    n = len(Q)
    for i in range(n):
        a, b = Q[i], Q[(i + 1) % n]
        if not out:
            break
        inp = out
        out = []

        def side(p):
            return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])

        m = len(inp)
        for k in range(m):
            cur, nxt = inp[k], inp[(k + 1) % m]
            sc, sn = side(cur), side(nxt)
            if sc >= 0:
                out.append(cur)
            if (sc > 0 and sn < 0) or (sc < 0 and sn > 0):
                lam = sc / (sc - sn)
                out.append((cur[0] + lam * (nxt[0] - cur[0]), cur[1] + lam * (nxt[1] - cur[1])))
    return out


def ebound_violations(v: PLSolution, dsol: PLSolution | None = None):
    """Count overlay vertices where |v| exceeds the distance to the boundary.

    Both v and d are affine on every cell of the overlay of their complexes,
    so checking the overlay vertices is exhaustive.
    """
    if dsol is None:
        from .distance import distance_solution

        dsol = distance_solution(v.domain)
    if v.grid is not None and dsol.grid is not None:
        res = _ebound_lattice(v.grid, dsol.grid)
        if res is not None:
            return res
    return ebound_overlay(v, dsol)


def _ebound_lattice(gv, gd):
    """Ebound on a common refinement of two lattices, or None if they do not align."""
    import numpy as np

    from .lattice import common_lattice, embed_values

    lv, Cv, Mv, mv = gv
    ld, Cd, Md, md = gd
    try:
        T = common_lattice([lv, ld])
        Cv, Mv, mv = embed_values(lv, Cv, Mv, mv, T)
        Cd, Md, md = embed_values(ld, Cd, Md, md, T)
    except ValueError:
        return None
    h = T.h
    # every fine triangle lies in one triangle of each coarse lattice, so
    # corner and centre samples are the overlay vertices up to subdivision
    badC = np.abs(Cv) > Cd
    badM = np.abs(Mv) > Md
    n_bad = int(np.count_nonzero(badC)) + int(np.count_nonzero(badM))
    wit = None
    if n_bad:
        u = h / 2
        if badC.any():
            i, j = map(int, np.argwhere(badC)[0])
            p = (T.s0 + 2 * i * u, T.t0 + 2 * j * u)
        else:
            i, j = map(int, np.argwhere(badM)[0])
            p = (T.s0 + (2 * i + 1) * u, T.t0 + (2 * j + 1) * u)
        wit = to_world(p)
    return n_bad, wit


def ebound_overlay(v: PLSolution, dsol: PLSolution):
    """Generic route: clip every piece of v against the distance pieces."""
    # bucket the distance pieces by bounding box
    buckets = defaultdict(list)
    bb = [q.bbox() for q in dsol.pieces]
    s0, t0, s1, t1 = v.domain.bbox()
    size = max(s1 - s0, t1 - t0) / max(1, int(math.sqrt(len(dsol.pieces))))
    if size == 0:
        size = F(1)

    def cells_of(box):
        a0 = math.floor((box[0] - s0) / size)
        a1 = math.floor((box[2] - s0) / size)
        b0 = math.floor((box[1] - t0) / size)
        b1 = math.floor((box[3] - t0) / size)
        for a in range(a0, a1 + 1):
            for b in range(b0, b1 + 1):
                yield a, b

    for k, box in enumerate(bb):
        for c in cells_of(box):
            buckets[c].append(k)
    n_bad = 0
    wit = None
    for pc in v.pieces:
        box = pc.bbox()
        cand = set()
        for c in cells_of(box):
            cand.update(buckets.get(c, ()))
        for k in sorted(cand):
            qb = bb[k]
            if qb[0] > box[2] or qb[2] < box[0] or qb[1] > box[3] or qb[3] < box[1]:
                continue
            poly = clip_convex(pc.cell, dsol.pieces[k].cell)
            for x in poly:
                if abs(pc.value_rotated(x)) > dsol.pieces[k].value_rotated(x):
                    n_bad += 1
                    if wit is None:
                        wit = to_world(x)
    return n_bad, wit


# ---------------------------------------------------------------------------
# jump sets


@dataclass(frozen=True)
class JumpSegment:
    p: RPoint
    q: RPoint
    normal: tuple   # world unit normal as a pair of Q2, pointing to the side where the derivative is +1

    @property
    def world_length(self) -> Q2:
        return segment_world_length(self.p, self.q)

    @property
    def world(self):
        return to_world(self.p), to_world(self.q)


@dataclass
class JumpSet:
    component: int
    segments: list
    total_length: Q2

    @property
    def magnitude(self) -> int:
        return 2


def _world_unit_normal(d, sign):
    """World unit normal of rotated direction d, rotated left, times sign."""
    ns, nt = -d[1], d[0]
    # rotated vector (ns, nt) in world: ((ns+nt)/2, (ns-nt)/2)
    w1, w2 = (ns + nt) / 2, (ns - nt) / 2
    if w1 != 0 and w2 != 0:
        # |w| = |w1| sqrt2 for diagonal world directions
        k = Q2(0, F(1, 2)) / Q2(abs(w1))
        return (Q2(w1) * k * sign, Q2(w2) * k * sign)
    norm = abs(w1) + abs(w2)
    return (Q2(w1 / norm * sign), Q2(w2 / norm * sign))


def jump_sets(v: PLSolution):
    """J1 and J2 of a validated solution, with collinear runs merged."""
    sw = get_sweep(v)
    if sw.errors:
        kinds = {e[0] for e in sw.errors}
        if kinds & {"overlap", "boundary overlap"}:
            raise NonManifoldEdge(f"edge shared by more than two pieces near {to_world(sw.errors[0][1])}")
    raw = {1: [], 2: []}
    for i, j, p, q in sw.shared:
        a, b = v.pieces[i], v.pieces[j]
        for comp in (1, 2):
            gi, gj = a.grad[comp - 1], b.grad[comp - 1]
            if gi != gj:
                # piece i is on the left of p -> q
                raw[comp].append((p, q, 1 if gi > 0 else -1))
    out = []
    for comp in (1, 2):
        segs = _merge_runs(raw[comp])
        total = sum((s.world_length for s in segs), ZERO)
        out.append(JumpSet(comp, segs, total))
    return tuple(out)


def _merge_runs(raw):
    groups = defaultdict(list)
    for p, q, side in raw:
        d, off = _line_key(p, q)
        lp, lq = _param(p, d), _param(q, d)
        # side relative to the canonical direction
        if lq < lp:
            p, q, lp, lq, side = q, p, lq, lp, -side
        groups[(d, off, side)].append((lp, lq, p, q))
    segs = []
    for (d, off, side), items in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        items.sort(key=lambda it: it[0])
        cur = None
        for lp, lq, p, q in items:
            if cur is not None and lp == cur[1]:
                cur = (cur[0], lq, cur[2], q)
            else:
                if cur is not None:
                    segs.append(JumpSegment(cur[2], cur[3], _world_unit_normal(d, side)))
                cur = (lp, lq, p, q)
        if cur is not None:
            segs.append(JumpSegment(cur[2], cur[3], _world_unit_normal(d, side)))
    return segs


def clip_segment_length(seg, region: HDomain) -> Q2:
    """World length of the part of a segment inside the open region."""
    p, q = seg.p, seg.q
    cuts = {F(0), F(1)}
    ds, dt = q[0] - p[0], q[1] - p[1]
    for a, b in region.edges():
        if a[0] == b[0] and ds != 0:
            lam = (a[0] - p[0]) / ds
            if 0 < lam < 1:
                cuts.add(lam)
        if a[1] == b[1] and dt != 0:
            lam = (a[1] - p[1]) / dt
            if 0 < lam < 1:
                cuts.add(lam)
    cuts = sorted(cuts)
    frac = F(0)
    for l0, l1 in zip(cuts, cuts[1:]):
        lm = (l0 + l1) / 2
        if region.contains((p[0] + lm * ds, p[1] + lm * dt)) > 0:
            frac += l1 - l0
    return seg.world_length * Q2(frac)


def functional_F(v: PLSolution, region: HDomain | None = None, route: str = "auto") -> Q2:
    """F(v) = H1(J1) + H1(J2), optionally restricted to an open region.

    ``route`` selects the computation: "pieces" merges jump segments of the
    affine pieces, "lattice" counts jump edges of the attached lattice
    function, "auto" uses the lattice when available and no region is given.
    """
    if route == "lattice" or (route == "auto" and region is None and v.grid is not None):
        if v.grid is None or region is not None:
            raise ValueError("lattice route needs a lattice representation and no region")
        from .lattice import lattice_F

        return lattice_F(*v.grid)
    J1, J2 = jump_sets(v)
    if region is None:
        return J1.total_length + J2.total_length
    tot = ZERO
    for J in (J1, J2):
        for s in J.segments:
            tot = tot + clip_segment_length(s, region)
    return tot


# ---------------------------------------------------------------------------
# integrals


MAX_BASIS_DEGREE = 6


def monomial_exponents(k: int):
    """Graded-lex monomial basis: 1, x1, x2, x1^2, x1 x2, x2^2, ..."""
    if k < 1:
        raise UnsupportedBasisIndex(f"basis index {k} must be positive")
    idx = 0
    for deg in range(MAX_BASIS_DEGREE + 1):
        for p in range(deg, -1, -1):
            idx += 1
            if idx == k:
                return p, deg - p
    raise UnsupportedBasisIndex(f"basis index {k} exceeds degree {MAX_BASIS_DEGREE}")


def _poly_mul(P, Q):
    out = defaultdict(F)
    for ea, ca in P.items():
        for eb, cb in Q.items():
            out[tuple(x + y for x, y in zip(ea, eb))] += ca * cb
    return out


def _tri_integral(P0, P1, P2, lin, px, py):
    """Integral over a world triangle of lin(x) * x1^px * x2^py."""
    area = abs((P1[0] - P0[0]) * (P2[1] - P0[1]) - (P2[0] - P0[0]) * (P1[1] - P0[1])) / 2
    if area == 0:
        return F(0)
    X1 = {(1, 0, 0): P0[0], (0, 1, 0): P1[0], (0, 0, 1): P2[0]}
    X2 = {(1, 0, 0): P0[1], (0, 1, 0): P1[1], (0, 0, 1): P2[1]}
    g1, g2, c = lin
    poly = {(1, 0, 0): g1 * P0[0] + g2 * P0[1] + c,
            (0, 1, 0): g1 * P1[0] + g2 * P1[1] + c,
            (0, 0, 1): g1 * P2[0] + g2 * P2[1] + c}
    for _ in range(px):
        poly = _poly_mul(poly, X1)
    for _ in range(py):
        poly = _poly_mul(poly, X2)
    tot = F(0)
    for (a, b, cc), coef in poly.items():
        if coef:
            tot += coef * F(math.factorial(a) * math.factorial(b) * math.factorial(cc), math.factorial(a + b + cc + 2))
    return 2 * area * tot


def integral(v: PLSolution, basis_index: int | None = None) -> Q2:
    """Exact integral of v * f_k over the domain (f_1 = 1 by default)."""
    px, py = monomial_exponents(basis_index or 1)
    tot = F(0)
    for pc in v.pieces:
        W = [to_world(p) for p in pc.cell]
        lin = (pc.grad[0], pc.grad[1], pc.offset)
        for i in range(1, len(W) - 1):
            tot += _tri_integral(W[0], W[i], W[i + 1], lin, px, py)
    return Q2(tot)


# ---------------------------------------------------------------------------
# slicing


def slicing_count(J: JumpSet, projection_axis: int):
    """(integral of H0 counts over slices, H1 of J) for the projection onto x_axis."""
    if projection_axis not in (1, 2):
        raise ValueError("projection_axis must be 1 or 2")
    k = projection_axis - 1
    integ = F(0)
    for s in J.segments:
        a, b = s.world
        integ += abs(b[k] - a[k])
    return Q2(integ), J.total_length
