"""Shell decomposition, the continuous weight h and the weighted functional F_h.

Levels n = 1, 2, ... carry inner approximations Omega_n with
1/(n + 1/2) <= d(Omega_n, boundary) <= 1/n. Each annulus
omega_n = Omega_n minus the closure of Omega_{n-1} gets the l1 distance
solution u_n; its jump measure delta_n, plus the perimeter of Omega_n,
gives alpha_n = max(1, delta_n + H1(boundary of Omega_n)).

Writing a_n = 1 / ((n+1)^2 (alpha_n + alpha_{n+1})), the weight is the
constant a_{n0} on the first nonempty level Omega_{n0} and, on omega_{n+1},

    h = a_n + (a_{n+1} - a_n) * d_n / (d_n + d_{n+1})

with d_m the l1 distance to the boundary of Omega_m. Both one-sided formulas
equal a_n on the interface boundary(Omega_n), so h is continuous.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import Infeasible, OutsideBuiltShells
from .geometry import (
    Certificate,
    HDomain,
    WPoint,
    boundary_distance_batch,
    contains_batch,
    domain_from_dict,
    inner_approx,
    to_rotated,
)
from .lattice import (
    Lattice,
    check_lattice_function,
    common_lattice,
    distance_values,
    embed_values,
    exterior_raster_distance,
    interior_points,
    jump_segments,
    lattice_F,
    lattice_for,
    raster_distance,
)
from .numeric import Q2, ONE, ZERO, format_q2, format_rational, parse_q2, parse_rational
from .solution import PLSolution

F = Fraction


@dataclass
class Shell:
    n: int
    omega: HDomain | None  # Omega_n, None when the level is empty
    certificate: Certificate | None
    delta: Q2
    alpha: Q2

    @property
    def empty(self) -> bool:
        return self.omega is None

    @property
    def perimeter(self) -> Q2:
        return ZERO if self.omega is None else self.omega.perimeter


class WeightH:
    """Built shells plus exact constants; immutable after construction.

    ``shells[n - 1]`` is level n. One level beyond ``n_built`` is kept so
    that a_{n_built} is defined; h is evaluable on the closure of
    Omega_{n_built}.
    """

    def __init__(self, domain, shells, n_built, reason=None):
        self.domain = domain
        self.shells = list(shells)
        self.n_built = n_built
        self.reason = reason
        self._lattice = None
        self._masks = None

    def shell(self, n) -> Shell:
        return self.shells[n - 1]

    @property
    def n0(self):
        for s in self.shells[: self.n_built]:
            if not s.empty:
                return s.n
        return None

    @property
    def is_empty(self) -> bool:
        return self.n0 is None

    def alpha(self, n) -> Q2:
        return self.shell(n).alpha

    def a(self, n) -> Q2:
        """Interface value 1 / ((n+1)^2 (alpha_n + alpha_{n+1}))."""
        return ONE / ((self.alpha(n) + self.alpha(n + 1)) * ((n + 1) ** 2))

    def bound(self, n) -> Q2:
        """Upper bound 2 / (alpha_n n^2) of h on the closed annulus omega_n."""
        return Q2(2) / (self.alpha(n) * n * n)

    def levels(self):
        return [s.n for s in self.shells[: self.n_built] if not s.empty]

    # lattice carrying every built level, padded by two cells (keeps the double-pitch cells aligned)
    @property
    def lattice(self) -> Lattice:
        if self._lattice is None:
            doms = [self.shell(n).omega for n in self.levels()]
            base = lattice_for(doms)
            self._lattice = common_lattice([base], pad=2)
        return self._lattice

    def mask(self, n) -> np.ndarray:
        if self._masks is None:
            self._masks = {}
        if n not in self._masks:
            s = self.shell(n)
            lat = self.lattice
            self._masks[n] = np.zeros((lat.A, lat.B), bool) if s.empty else lat.mask(s.omega)
        return self._masks[n]

    # serialization
    def to_dict(self) -> dict:
        shells = []
        for s in self.shells:
            rec = {"n": s.n, "empty": s.empty, "delta": format_q2(s.delta), "alpha": format_q2(s.alpha)}
            if not s.empty:
                rec["omega"] = s.omega.to_dict()
                c = s.certificate
                rec["certificate"] = {
                    "tau": format_rational(c.tau),
                    "pitch": format_rational(c.pitch),
                    "min_distance": format_rational(c.min_distance),
                    "lower": format_rational(c.lower),
                    "upper": format_rational(c.upper),
                    "inner_point": [format_rational(v) for v in c.inner_point],
                    "boundary_point": [format_rational(v) for v in c.boundary_point],
                }
            shells.append(rec)
        return {"domain": self.domain.to_dict(), "n_built": self.n_built, "reason": self.reason, "shells": shells}

    @staticmethod
    def from_dict(obj) -> "WeightH":
        D = domain_from_dict(obj["domain"])
        shells = []
        for rec in obj["shells"]:
            omega = cert = None
            if not rec["empty"]:
                omega = domain_from_dict(rec["omega"])
                c = rec["certificate"]
                cert = Certificate(
                    rec["n"], parse_rational(c["tau"]), parse_rational(c["pitch"]),
                    parse_rational(c["min_distance"]),
                    WPoint(*map(parse_rational, c["inner_point"])),
                    WPoint(*map(parse_rational, c["boundary_point"])),
                    parse_rational(c["lower"]), parse_rational(c["upper"]),
                )
            shells.append(Shell(rec["n"], omega, cert, parse_q2(rec["delta"]), parse_q2(rec["alpha"])))
        return WeightH(D, shells, obj["n_built"], obj.get("reason"))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @staticmethod
    def load(path) -> "WeightH":
        with open(path) as fh:
            return WeightH.from_dict(json.load(fh))

    def __repr__(self):
        return f"WeightH(levels={self.levels()}, n_built={self.n_built})"


def _annulus_masks(outer: HDomain, inner: HDomain | None):
    doms = [outer] + ([inner] if inner is not None else [])
    lat = lattice_for(doms)
    mo = lat.mask(outer)
    mi = lat.mask(inner) if inner is not None else np.zeros_like(mo)
    return lat, mo, mi


def _separated(mo, mi) -> bool:
    """Closure of the inner cell union lies in the open outer union."""
    if not mi.any():
        return True
    pad = np.pad(mi, 1)
    dil = np.zeros_like(mi)
    for di in (0, 1, 2):
        for dj in (0, 1, 2):
            dil |= pad[di:di + mi.shape[0], dj:dj + mi.shape[1]]
    return bool(np.all(mo[dil]))


def build_weight(D, N_max: int) -> WeightH:
    """Build levels 1 .. N_max + 1 and the constants of the weight.

    An Infeasible level before the first certified one is recorded as an
    empty level; one after it truncates the construction (the reason is kept).
    """
    if N_max < 2:
        raise ValueError("N_max must be at least 2")
    shells = []
    prev = None
    prev_omega = None
    reason = None
    for n in range(1, N_max + 2):
        try:
            ia = inner_approx(D, n, prev)
        except Infeasible as exc:
            if prev is None:
                shells.append(Shell(n, None, None, ZERO, ONE))
                reason = f"level {n} empty: {exc}"
                continue
            reason = f"truncated at level {n}: {exc}"
            break
        lat, mo, mi = _annulus_masks(ia.domain, prev_omega)
        if not _separated(mo, mi):
            reason = f"truncated at level {n}: closure of level {n - 1} touches its boundary"
            break
        ann = mo & ~mi
        C, M = distance_values(ann)
        delta = lattice_F(lat, C, M, ann)
        alpha = delta + ia.domain.perimeter
        if alpha < ONE:
            alpha = ONE
        shells.append(Shell(n, ia.domain, ia.certificate, delta, alpha))
        prev, prev_omega = ia, ia.domain
    n_built = min(N_max, len(shells) - 1)
    if prev is None:
        n_built = 0
    elif all(s.empty for s in shells[:n_built]):
        n_built = 0
    return WeightH(D, shells, max(n_built, 0), reason)


# ---------------------------------------------------------------------------
# exact evaluation


def _rot_points(pts):
    return [to_rotated((F(p[0]), F(p[1]))) for p in pts]


def shell_levels(W: WeightH, pts) -> list:
    """Smallest built level whose closure contains each world point (None if outside)."""
    rp = _rot_points(pts)
    out = [None] * len(rp)
    todo = list(range(len(rp)))
    for n in W.levels():
        if not todo:
            break
        c = contains_batch(W.shell(n).omega, [rp[i] for i in todo])
        nxt = []
        for i, ci in zip(todo, c):
            if ci >= 0:
                out[i] = n
            else:
                nxt.append(i)
        todo = nxt
    return out


def h_one_sided(W: WeightH, pts, m: int) -> list:
    """Formula of h on the closed annulus omega_m, evaluated at world points."""
    rp = _rot_points(pts)
    if m == W.n0:
        return [W.a(m)] * len(rp)
    n = m - 1
    lo, hi = W.a(n), W.a(n + 1)
    dn = boundary_distance_batch(W.shell(n).omega, rp)
    dN = boundary_distance_batch(W.shell(m).omega, rp)
    out = []
    for x, y in zip(dn, dN):
        out.append(lo + (hi - lo) * (x / (x + y)))
    return out


def h_eval_batch(W: WeightH, pts) -> list:
    """Exact h at many world points (raises OutsideBuiltShells)."""
    if W.is_empty:
        raise OutsideBuiltShells("no shells were built")
    levels = shell_levels(W, pts)
    out = [None] * len(pts)
    by = {}
    for i, lv in enumerate(levels):
        if lv is None:
            raise OutsideBuiltShells(f"point {tuple(pts[i])} lies outside the built shells")
        by.setdefault(lv, []).append(i)
    for lv, idx in by.items():
        vals = h_one_sided(W, [pts[i] for i in idx], lv)
        for i, v in zip(idx, vals):
            out[i] = v
    return out


def h_eval(W: WeightH, x) -> Q2:
    return h_eval_batch(W, [x])[0]


def sample_annulus(W: WeightH, n: int, count: int, rng, closed: bool = True):
    """Random dyadic world points of the closed annulus omega_n."""
    om = W.shell(n).omega
    inner = None
    for m in range(n - 1, 0, -1):
        if not W.shell(m).empty:
            inner = W.shell(m).omega
            break
    s0, t0, s1, t1 = om.bbox()
    den = 2 ** (W.shell(n).certificate.pitch.denominator.bit_length() + 6)
    out = []
    while len(out) < count:
        k = 4 * (count - len(out)) + 16
        S = [F(int(v), den) for v in rng.integers(int(s0 * den), int(s1 * den) + 1, size=k)]
        T = [F(int(v), den) for v in rng.integers(int(t0 * den), int(t1 * den) + 1, size=k)]
        rp = list(zip(S, T))
        ok = contains_batch(om, rp) >= 0
        if inner is not None:
            ok &= contains_batch(inner, rp) <= 0
        for p, good in zip(rp, ok):
            if good and len(out) < count:
                out.append(WPoint((p[0] + p[1]) / 2, (p[0] - p[1]) / 2))
    return out


def sample_interface(W: WeightH, n: int, count: int, rng):
    """Random dyadic world points on the boundary of Omega_n."""
    om = W.shell(n).omega
    edges = list(om.edges())
    lens = np.array([float(abs(b[0] - a[0]) + abs(b[1] - a[1])) for a, b in edges])
    pick = rng.choice(len(edges), size=count, p=lens / lens.sum())
    den = 2 ** 20
    out = []
    for e in pick:
        a, b = edges[int(e)]
        lam = F(int(rng.integers(0, den + 1)), den)
        s, t = a[0] + lam * (b[0] - a[0]), a[1] + lam * (b[1] - a[1])
        out.append(WPoint((s + t) / 2, (s - t) / 2))
    return out


# ---------------------------------------------------------------------------
# shell solution


@dataclass
class LazySolution:
    """Sum of the per-annulus distance solutions, truncated at level K."""

    weight: WeightH
    K: int
    parts: dict = field(default_factory=dict)  # level -> (C, M, annulus mask) on weight.lattice

    def _part(self, n):
        if n not in self.parts:
            W = self.weight
            mo = W.mask(n)
            prev = [m for m in W.levels() if m < n]
            mi = W.mask(prev[-1]) if prev else np.zeros_like(mo)
            ann = mo & ~mi
            C, M = distance_values(ann)
            self.parts[n] = (C, M, ann)
        return self.parts[n]

    def grid(self, K=None):
        K = self.K if K is None else K
        W = self.weight
        lat = W.lattice
        C = np.zeros((lat.A + 1, lat.B + 1), dtype=np.int64)
        M = np.zeros((lat.A, lat.B), dtype=np.int64)
        mask = np.zeros((lat.A, lat.B), dtype=bool)
        for n in W.levels():
            if n > K:
                break
            Cn, Mn, an = self._part(n)
            C += Cn
            M += Mn
            mask |= an
        return lat, C, M, mask

    def truncated(self, K=None) -> PLSolution:
        K = self.K if K is None else K
        levels = [n for n in self.weight.levels() if n <= K]
        if not levels:
            raise OutsideBuiltShells(f"no built level up to {K}")
        return PLSolution(self.weight.shell(levels[-1]).omega, None, grid=self.grid(K))

    def F(self, K=None) -> Q2:
        """Unweighted F of the truncated sum (interfaces included)."""
        K = self.K if K is None else K
        if not [n for n in self.weight.levels() if n <= K]:
            return ZERO
        return lattice_F(*self.grid(K))

    @property
    def tail(self) -> Q2:
        """Bound on the F_h contribution of all levels beyond K.

        Levels n > K contribute at most 4/n^2 each, summing to at most 4/K;
        the interface boundary(Omega_K) adds 2 H1(boundary Omega_K) a_K since
        it belongs to both jump components.
        """
        W = self.weight
        return Q2(F(4, self.K)) + W.shell(self.K).perimeter * 2 * W.a(self.K)


def shell_solution(W: WeightH, K: int | None = None) -> LazySolution:
    if W.is_empty:
        raise OutsideBuiltShells("no shells were built")
    K = W.n_built if K is None else K
    if not 1 <= K <= W.n_built:
        raise OutsideBuiltShells(f"K must lie in 1..{W.n_built}")
    return LazySolution(W, K)


# ---------------------------------------------------------------------------
# weighted functional


@dataclass
class FhResult:
    lower: float
    upper: float
    estimate: float
    tail: Q2
    steps: int

    @property
    def enclosure(self):
        return (self.lower, self.upper)

    @property
    def upper_with_tail(self) -> float:
        return self.upper + float(self.tail)

    def format(self) -> str:
        return f"[{self.lower:.12g}, {self.upper:.12g}] + tail {format_q2(self.tail)}"


def _closed_raster(mask):
    """Raster points in the closed cell union."""
    comp = np.pad(~mask, 1, constant_values=True)
    return ~interior_points(comp)[2:-2, 2:-2]


def _half_steps(J):
    """Split lattice jump segments (raster coords) into the two halves through the midpoint."""
    if not len(J):
        return np.zeros((0, 4), dtype=np.int64)
    mid = (J[:, :2] + J[:, 2:]) // 2
    return np.concatenate([np.hstack([J[:, :2], mid]), np.hstack([mid, J[:, 2:]])])


def functional_Fh(W: WeightH, v, quadrature_order: int = 4) -> FhResult:
    """Enclosure of F_h(v) = sum_i int_{J_i} h dH1.

    Every jump segment of a lattice function splits into raster steps on
    which all distances d_m are affine, so h is a Moebius function of the arc
    parameter and monotone. The enclosure sums min/max endpoint values over
    ``quadrature_order`` equal sub-steps; the estimate is Gauss-Legendre of
    the same order. Sums use fsum and are widened outward by a relative
    (10 N + 10) 2^-52 for N steps.
    """
    if W.is_empty:
        raise OutsideBuiltShells("no shells were built")
    tail = ZERO
    if isinstance(v, LazySolution):
        tail = v.tail
        v = v.truncated()
    if v.grid is None:
        raise ValueError("weighted functional needs a lattice representation")
    q = int(quadrature_order)
    if q < 1:
        raise ValueError("quadrature order must be positive")
    lat_v, Cv, Mv, mv = v.grid
    T = common_lattice([W.lattice, lat_v])
    C, M, mask = embed_values(lat_v, Cv, Mv, mv, T) if lat_v != T else (Cv, Mv, mv.astype(bool))
    J1, J2 = jump_segments(T, C, M, mask)
    steps = np.concatenate([_half_steps(J1), _half_steps(J2)])
    if not len(steps):
        return FhResult(0.0, 0.0, 0.0, tail, 0)
    u = float(T.u)
    diag = (steps[:, 0] != steps[:, 2]) & (steps[:, 1] != steps[:, 3])
    length = np.where(diag, u, u / math.sqrt(2.0))
    levels = W.levels()
    masks = {n: (W.mask(n) if T == W.lattice else T.mask(W.shell(n).omega)) for n in levels}
    # level of each step from its midpoint on the doubled raster
    mid2 = steps[:, :2] + steps[:, 2:]
    lvl = np.zeros(len(steps), dtype=np.int64)
    for n in reversed(levels):
        closed = _closed_raster(np.kron(masks[n], np.ones((2, 2), dtype=bool)))
        lvl[closed[mid2[:, 0], mid2[:, 1]]] = n
    if np.any(lvl == 0):
        i = int(np.nonzero(lvl == 0)[0][0])
        raise OutsideBuiltShells(f"jump step at raster {tuple(steps[i, :2])} lies outside the built shells")
    lo_terms, hi_terms, est_terms = [], [], []
    xg, wg = np.polynomial.legendre.leggauss(q)
    tg = (xg + 1) / 2
    tk = np.linspace(0.0, 1.0, q + 1)
    prev = None
    for n in levels:
        sel = lvl == n
        if not sel.any():
            prev = n
            continue
        L = length[sel]
        if n == W.n0:
            c = float(W.a(n))
            part = [float(x) * c for x in L]
            lo_terms += part
            hi_terms += part
            est_terms += part
            prev = n
            continue
        a_lo, a_hi = float(W.a(n - 1)), float(W.a(n))
        ext = exterior_raster_distance(masks[prev])
        ins = raster_distance(masks[n])
        ann = masks[n] & ~masks[prev]
        check_lattice_function(ext[0::2, 0::2], ext[1::2, 1::2], ann)
        check_lattice_function(ins[0::2, 0::2], ins[1::2, 1::2], ann)
        st = steps[sel]
        dn0 = ext[st[:, 0], st[:, 1]].astype(float)
        dn1 = ext[st[:, 2], st[:, 3]].astype(float)
        dN0 = ins[st[:, 0], st[:, 1]].astype(float)
        dN1 = ins[st[:, 2], st[:, 3]].astype(float)
        # Moebius is constant when the two distances stay proportional
        const = ext[st[:, 0], st[:, 1]] * ins[st[:, 2], st[:, 3]] == ext[st[:, 2], st[:, 3]] * ins[st[:, 0], st[:, 1]]

        def h_at(t):
            x = dn0[:, None] + (dn1 - dn0)[:, None] * t[None, :]
            y = dN0[:, None] + (dN1 - dN0)[:, None] * t[None, :]
            return a_lo + (a_hi - a_lo) * x / (x + y)

        H = h_at(tk)
        Hg = h_at(tg)
        sub = L / q
        lo = np.minimum(H[:, :-1], H[:, 1:]).sum(axis=1) * sub
        hi = np.maximum(H[:, :-1], H[:, 1:]).sum(axis=1) * sub
        hc = H[:, 0] * L
        lo = np.where(const, hc, lo)
        hi = np.where(const, hc, hi)
        est = (Hg * wg[None, :] / 2).sum(axis=1) * L
        lo_terms += lo.tolist()
        hi_terms += hi.tolist()
        est_terms += est.tolist()
        prev = n
    N = len(steps)
    eps = (10 * N + 10) * 2.0 ** -52
    lower = math.fsum(lo_terms) * (1 - eps)
    upper = math.fsum(hi_terms) * (1 + eps)
    return FhResult(lower, upper, math.fsum(est_terms), tail, N)
