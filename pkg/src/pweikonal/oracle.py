"""Exhaustive ground truth for grid solutions, plus a certified relaxation bound.

Grid solutions live on the union-jack lattice of pitch delta: corner values
are multiples of delta, every cell is split into four triangles at its centre
and the function is affine on each triangle with rotated gradient in
{(±1, 0), (0, ±1)}. The distance solution of a domain whose vertices sit on
the lattice at spacing 2*delta is such a function, so ±d are always among
the candidates.

The search is a broken-profile dynamic program over cells in row-major order.
A state stores the corner values of the frontier, one side bit per column for
flat horizontal edges and one for the last vertical edge, which is exactly
what the jump counts of the remaining cells depend on. Costs are integer
pairs (L, E) with F = (delta/2) (L + 2 sqrt2 E).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate, combinations

import numpy as np

from . import kernels
from .distance import solution_from_grid
from .errors import NotGridAligned, TooLarge
from .geometry import HDomain, hdomain_from_mask
from .lattice import Lattice, boundary_corners, distance_values, lattice_counts, raster_distance
from .numeric import Q2

F = Fraction
SQRT8 = 2 * math.sqrt(2.0)
DEFAULT_BUDGET = 10**8
# Costs are compared through the double L + 2 sqrt2 E. For integers below
# this bound two distinct pairs differ by more than 1e-7, far above rounding.
_EXACT_KEY_LIMIT = 10**6


@dataclass(frozen=True)
class GridSpec:
    domain: HDomain
    pitch: Fraction

    def __post_init__(self):
        object.__setattr__(self, "pitch", F(self.pitch))
        s0, t0, _, _ = self.domain.bbox()
        offs = [p[0] - s0 for p in self.domain.vertices] + [p[1] - t0 for p in self.domain.vertices]
        for o in offs:
            if (o / self.pitch).denominator != 1:
                raise NotGridAligned(f"vertex offset {o} is not a multiple of the pitch {self.pitch}")

    @property
    def lattice(self) -> Lattice:
        s0, t0, s1, t1 = self.domain.bbox()
        return Lattice(s0, t0, self.pitch, int((s1 - s0) / self.pitch), int((t1 - t0) / self.pitch))

    @property
    def mask(self) -> np.ndarray:
        return self.lattice.mask(self.domain)

    @property
    def cell_count(self) -> int:
        return int(self.mask.sum())


@dataclass
class GridSolution:
    C: np.ndarray
    M: np.ndarray
    L: int
    E: int

    def F(self, lat: Lattice) -> Q2:
        return Q2(lat.u * self.L, 2 * lat.u * self.E)


@dataclass
class EnumerationSummary:
    count: int
    nodes: int
    max_frontier: int
    min_F: Q2 | None
    argmin_count: int
    visited: int = 0
    contains_distance: bool = False


def _unique_rows(S):
    if len(S) == 0:
        return S, np.zeros(0, dtype=np.int64)
    S = np.ascontiguousarray(S)
    v = S.view(np.dtype((np.void, S.dtype.itemsize * S.shape[1]))).ravel()
    _, first, inv = np.unique(v, return_index=True, return_inverse=True)
    return S[first], inv.ravel()


def _key(L, E):
    return L.astype(np.float64) + SQRT8 * E.astype(np.float64)


@dataclass
class _Layer:
    parent: np.ndarray
    child: np.ndarray
    c11: np.ndarray
    M: np.ndarray
    opt: np.ndarray   # transition lies on an optimal prefix


class _GridDP:
    """Forward profile DP keeping every transition for path reconstruction."""

    def __init__(self, G: GridSpec, budget=DEFAULT_BUDGET, backend=None, free_centres=False):
        self.G = G
        self.free_centres = free_centres
        self.lat = G.lattice
        self.mask = G.mask
        self.budget = budget
        uj = kernels.uj_expand if backend is None else kernels.get_backend(backend)[0]
        self._expand = uj
        self._run()

    def _run(self):
        mask = self.mask
        A, B = mask.shape
        d = raster_distance(mask)
        bnd = boundary_corners(mask)
        W = 2 * A + 3
        S = np.zeros((1, W), dtype=np.int16)
        L = np.zeros(1, dtype=np.int64)
        E = np.zeros(1, dtype=np.int64)
        cnt = np.array([1], dtype=object)
        ocnt = np.array([1], dtype=object)
        self.layers = []
        nodes = 0
        self.max_frontier = 1
        for b in range(B):
            # new row: the left corner of the upper row is a boundary corner
            S = np.concatenate([np.zeros((len(S), 1), dtype=np.int16), S[:, : A + 1], S[:, A + 2:]], axis=1)
            S[:, 2 * A + 2] = 0
            for a in range(A):
                masked = bool(mask[a, b])
                corner_b = bool(bnd[a + 1, b + 1])
                Dc = int(d[2 * a + 2, 2 * b + 2])
                DM = int(d[2 * a + 1, 2 * b + 1])
                par, ch, dL, dE, Mv = self._expand(S, a, masked, corner_b, Dc, DM, A, self.free_centres)
                nodes += len(par)
                if nodes > self.budget:
                    raise TooLarge(f"search exceeded the node budget of {self.budget}")
                U, inv = _unique_rows(ch)
                nL = L[par] + dL
                nE = E[par] + dE
                if len(nL) and max(int(nL.max()), int(nE.max())) > _EXACT_KEY_LIMIT:
                    raise TooLarge("cost counters left the exact comparison range")
                key = _key(nL, nE)
                best = np.full(len(U), np.inf)
                np.minimum.at(best, inv, key)
                # optimal prefixes reach each child only through minimal transitions
                opt = key == best[inv]
                bestL = np.zeros(len(U), dtype=np.int64)
                bestE = np.zeros(len(U), dtype=np.int64)
                bestL[inv[opt]] = nL[opt]
                bestE[inv[opt]] = nE[opt]
                newcnt = np.zeros(len(U), dtype=object)
                newocnt = np.zeros(len(U), dtype=object)
                _accumulate(newcnt, inv, cnt[par])
                _accumulate(newocnt, inv[opt], ocnt[par[opt]])
                c11 = ch[:, a + 1].astype(np.int16)
                self.layers.append(_Layer(par.astype(np.int64), inv.astype(np.int64), c11, Mv.astype(np.int16), opt))
                S, L, E, cnt, ocnt = U, bestL, bestE, newcnt, newocnt
                self.max_frontier = max(self.max_frontier, len(S))
        self.nodes = nodes
        self.final_L, self.final_E = L, E
        self.final_count, self.final_ocnt = cnt, ocnt
        if len(S):
            key = _key(L, E)
            kmin = key.min()
            self.final_opt = key == kmin
            i = int(np.argmin(key))
            self.min_LE = (int(L[i]), int(E[i]))
        else:
            self.final_opt = np.zeros(0, dtype=bool)
            self.min_LE = None

    @property
    def count(self) -> int:
        return int(sum(self.final_count)) if len(self.final_count) else 0

    @property
    def argmin_count(self) -> int:
        return int(sum(self.final_ocnt[self.final_opt])) if len(self.final_ocnt) else 0

    def min_F(self):
        if self.min_LE is None:
            return None
        L, E = self.min_LE
        return Q2(self.lat.u * L, 2 * self.lat.u * E)

    def paths(self, optimal_only=False, limit=None):
        """Yield (C, M) arrays for every complete path (or every optimal one)."""
        A, B = self.mask.shape
        finals = np.nonzero(self.final_opt)[0] if optimal_only else np.arange(len(self.final_count))
        nl = len(self.layers)
        # index transitions by child for every layer
        by_child = []
        for ly in self.layers:
            sel = np.nonzero(ly.opt)[0] if optimal_only else np.arange(len(ly.child))
            order = sel[np.argsort(ly.child[sel], kind="stable")]
            by_child.append((order, ly.child[order]))
        C = np.zeros((A + 1, B + 1), dtype=np.int64)
        M = np.zeros((A, B), dtype=np.int64)
        produced = 0

        def rec(layer, state):
            nonlocal produced
            if limit is not None and produced >= limit:
                return
            if layer < 0:
                produced += 1
                yield C.copy(), M.copy()
                return
            order, keys = by_child[layer]
            lo = np.searchsorted(keys, state, side="left")
            hi = np.searchsorted(keys, state, side="right")
            ly = self.layers[layer]
            b, a = divmod(layer, A)
            for t in order[lo:hi]:
                C[a + 1, b + 1] = ly.c11[t]
                M[a, b] = ly.M[t] if self.mask[a, b] else 0
                yield from rec(layer - 1, int(ly.parent[t]))

        for f in finals:
            yield from rec(nl - 1, int(f))


def _accumulate(target, idx, vals):
    # exact integer sums (object dtype keeps arbitrary precision)
    if len(idx) == 0:
        return
    order = np.argsort(idx, kind="stable")
    idx_s = idx[order]
    vals_s = vals[order]
    starts = np.flatnonzero(np.r_[True, idx_s[1:] != idx_s[:-1]])
    sums = np.add.reduceat(vals_s, starts)
    target[idx_s[starts]] += sums


def _sys_recursion(depth):
    import sys

    if sys.getrecursionlimit() < depth + 100:
        sys.setrecursionlimit(depth + 100)


def enumerate_grid_solutions(G: GridSpec, visitor=None, budget: int = DEFAULT_BUDGET, limit=None,
                             backend=None, free_centres: bool = False) -> EnumerationSummary:
    """Count all grid solutions and feed each one (as a PLSolution) to ``visitor``.

    The visitor receives ``(PLSolution, GridSolution)``. With ``free_centres``
    the class is widened to cells whose four corners agree (the centre is then
    a free ±pitch/2 bump, not determined by vertex values).
    """
    dp = _GridDP(G, budget, backend, free_centres)
    visited = 0
    if visitor is not None:
        _sys_recursion(len(dp.layers))
        for C, M in dp.paths(limit=limit):
            L, E = lattice_counts(C, M, dp.mask)
            visitor(solution_from_grid(dp.lat, C, M, dp.mask, G.domain), GridSolution(C, M, L, E))
            visited += 1
    return EnumerationSummary(dp.count, dp.nodes, dp.max_frontier, dp.min_F(), dp.argmin_count,
                              visited, _has_distance(dp))


def _has_distance(dp) -> bool:
    try:
        distance_values(dp.mask)
    except ValueError:
        return False
    return True


@dataclass
class GridMinimum:
    min_value: Q2
    argmin: list                # GridSolution list
    solutions: list             # matching PLSolution list
    count: int                  # number of grid solutions overall
    nodes: int
    is_pm_distance: bool        # argmin is exactly {+d, -d}


def min_F_grid(G: GridSpec, budget: int = DEFAULT_BUDGET, backend=None,
               free_centres: bool = False) -> GridMinimum:
    """Exact minimum of F over grid solutions together with every minimizer."""
    dp = _GridDP(G, budget, backend, free_centres)
    if dp.min_LE is None:
        raise ValueError("the grid admits no solution")
    _sys_recursion(len(dp.layers))
    arg, sols = [], []
    for C, M in dp.paths(optimal_only=True):
        L, E = lattice_counts(C, M, dp.mask)
        arg.append(GridSolution(C, M, L, E))
        sols.append(solution_from_grid(dp.lat, C, M, dp.mask, G.domain))
    pm = False
    try:
        Cd, Md = distance_values(dp.mask)
        if len(arg) == 2:
            got = {(g.C.tobytes(), g.M.tobytes()) for g in arg}
            want = {(Cd.tobytes(), Md.tobytes()), ((-Cd).tobytes(), (-Md).tobytes())}
            pm = got == want
    except ValueError:
        pass
    return GridMinimum(dp.min_F(), arg, sols, dp.count, dp.nodes, pm)


# ---------------------------------------------------------------------------
# relaxation lower bound


@dataclass
class RelaxationBound:
    j1: Q2
    j2: Q2
    nodes: int

    @property
    def lower(self) -> Q2:
        return self.j1 + self.j2


def _world_lattice(mask):
    """World-lattice description of a union-jack mask.

    Raster point (i, j) (corners even-even, centres odd-odd) maps to world
    index (I, J) = ((i + j)/2, (i - j)/2); world neighbours are corner/centre
    pairs joined by a half-diagonal of a cell.
    """
    A, B = mask.shape
    d = raster_distance(mask)
    bnd = boundary_corners(mask)
    pts = {}
    for a, b in zip(*np.nonzero(mask)):
        a, b = int(a), int(b)
        pts[(2 * a + 1, 2 * b + 1)] = ("c", int(d[2 * a + 1, 2 * b + 1]))
        for da in (0, 1):
            for db in (0, 1):
                i, j = 2 * (a + da), 2 * (b + db)
                pts[(i, j)] = ("v", 0 if bnd[a + da, b + db] else int(d[i, j]), bool(bnd[a + da, b + db]))
    world = {}
    for (i, j), info in pts.items():
        I, J = (i + j) // 2, (i - j) // 2
        if info[0] == "c":
            world[(I, J)] = (True, False, info[1])
        else:
            world[(I, J)] = (False, info[2], info[1])
    return world


def _jump1_relaxation(world, budget, walk):
    """Minimum over relaxed row walks of the jump-1 measure, in units u (L, E)."""
    Is = sorted({I for I, _ in world})
    Js = sorted({J for _, J in world})
    I0 = Is[0]
    Wd = Is[-1] - I0 + 1
    P = np.zeros((1, Wd + 1), dtype=np.int16)
    L = np.zeros(1, dtype=np.int64)
    E = np.zeros(1, dtype=np.int64)
    nodes = 0
    prev_row = set()
    for J in range(Js[0], Js[-1] + 1):
        P = np.concatenate([np.zeros((len(P), 1), dtype=np.int16), P[:, :Wd]], axis=1)
        row = {I for (I, JJ) in world if JJ == J}
        for k in range(Wd):
            I = I0 + k
            present = I in row
            info = world.get((I, J))
            centre, boundary, D = (info if info else (False, False, 0))
            h_prev = present and (I - 1) in row
            v_edge = present and I in prev_row
            centre_prev = present and (I - 1) in row and world[(I - 1, J)][0]
            s_edge = h_prev and I in prev_row and (I - 1) in prev_row
            parity = (I + J) % 2
            par, ch, dL, dE, _ = walk(P, k, present, boundary, D, parity, h_prev, v_edge, centre_prev, s_edge)
            nodes += len(par)
            if nodes > budget:
                raise TooLarge(f"relaxation exceeded the node budget of {budget}")
            U, inv = _unique_rows(ch)
            nL, nE = L[par] + dL, E[par] + dE
            key = nL.astype(np.float64) + math.sqrt(2.0) * nE
            best = np.full(len(U), np.inf)
            np.minimum.at(best, inv, key)
            opt = key == best[inv]
            bL = np.zeros(len(U), dtype=np.int64)
            bE = np.zeros(len(U), dtype=np.int64)
            bL[inv[opt]] = nL[opt]
            bE[inv[opt]] = nE[opt]
            P, L, E = U, bL, bE
        prev_row = row
    key = L.astype(np.float64) + math.sqrt(2.0) * E
    i = int(np.argmin(key))
    return int(L[i]), int(E[i]), nodes


def relaxation_lower_bound(G: GridSpec, budget: int = DEFAULT_BUDGET, backend=None) -> RelaxationBound:
    """Certified lower bound on min F over the grid solutions of G.

    Each jump component is minimized separately over a relaxation that only
    keeps the constraints seen along world rows (respectively columns): unit
    steps along lattice edges, zero boundary values and |v| <= d. Every grid
    solution is feasible for both relaxations, so the sum of the two minima
    bounds min F from below.
    """
    walk = kernels.walk_expand if backend is None else kernels.get_backend(backend)[1]
    world = _world_lattice(G.mask)
    u = G.pitch / 2
    L1, E1, n1 = _jump1_relaxation(world, budget, walk)
    swapped = {(J, I): v for (I, J), v in world.items()}
    if swapped == world:
        L2, E2, n2 = L1, E1, 0
    else:
        L2, E2, n2 = _jump1_relaxation(swapped, budget, walk)
    return RelaxationBound(Q2(u * L1, u * E1), Q2(u * L2, u * E2), n1 + n2)


def grid_inner_domain(D, pitch) -> HDomain:
    """Union of the rotated grid cells of a given pitch lying inside D."""
    pitch = F(pitch)
    if isinstance(D, HDomain):
        s0, t0, s1, t1 = D.bbox()
    else:
        s0, t0, s1, t1 = D.rotated_bbox()
    a0, b0 = math.floor(s0 / pitch), math.floor(t0 / pitch)
    a1, b1 = math.ceil(s1 / pitch), math.ceil(t1 / pitch)
    A, B = a1 - a0, b1 - b0
    mask = np.zeros((A, B), dtype=bool)
    from .geometry import to_world

    for a in range(A):
        for b in range(B):
            corners = [((a0 + a + da) * pitch, (b0 + b + db) * pitch) for da in (0, 1) for db in (0, 1)]
            if isinstance(D, HDomain):
                cx = ((a0 + a + F(1, 2)) * pitch, (b0 + b + F(1, 2)) * pitch)
                mask[a, b] = D.contains(cx) > 0
            else:
                mask[a, b] = all(D.contains_world(to_world(c)) >= 0 for c in corners)
    return hdomain_from_mask(mask, a0 * pitch, b0 * pitch, pitch)


def slice_integral_bound(eps) -> Fraction:
    """Exact value of the integral of floor(1/(2t)) over [eps, 1/2]."""
    eps = F(eps)
    tot = F(0)
    k = 1
    while True:
        hi = F(1, 2 * k)
        lo = max(F(1, 2 * (k + 1)), eps)
        if hi <= eps:
            break
        tot += k * (hi - lo)
        k += 1
    return tot


# ---------------------------------------------------------------------------
# one-dimensional problem


@dataclass
class OneDSolution:
    """Piecewise-linear u on [-L, L] given by its breakpoints (x, u(x))."""
    breakpoints: tuple

    @property
    def jumps(self) -> int:
        return len(self.breakpoints) - 2

    def __call__(self, x) -> Fraction:
        x = F(x)
        bp = self.breakpoints
        for (x0, y0), (x1, y1) in zip(bp, bp[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        raise ValueError("x outside the interval")

    @property
    def nonnegative(self) -> bool:
        return all(y >= 0 for _, y in self.breakpoints)


@dataclass
class OneDResult:
    feasible: bool
    min_jumps: int | None
    solutions: list
    partition_minima: dict = field(default_factory=dict)


def _solution_from_signs(L, signs):
    m = len(signs)
    h = 2 * L / m
    pts = [(-L, F(0))]
    y = F(0)
    for k, s in enumerate(signs):
        y += s * h
        x = -L + (k + 1) * h
        if k + 1 < m and signs[k + 1] == s:
            continue
        pts.append((x, y))
    return OneDSolution(tuple(pts)) if y == 0 else None


def oracle_1d(L, max_jumps: int = 8, nonnegative: bool = False, max_cells: int = 16) -> OneDResult:
    """Minimal number of derivative jumps for |u'| = 1 on (-L, L), u(±L) = 0.

    Two routes: exhaustive sign sequences on uniform partitions with 2..max_cells
    cells, and the symbolic solution for k switch points. With k switches the
    run lengths l_0..l_k are positive, add up to 2L and have zero alternating
    sum; k = 0 is impossible and k = 1 forces l_0 = l_1 = L.
    """
    L = F(L)
    if L <= 0:
        raise ValueError("L must be positive")
    minima = {}
    found = {}
    m = 2
    while m <= max_cells:
        best = None
        sols = []
        # balanced sign sequences only: u(L) = 0 needs as many +1 as -1 runs
        for ups in combinations(range(m), m // 2):
            signs = [-1] * m
            for k in ups:
                signs[k] = 1
            j = sum(1 for x, y in zip(signs, signs[1:]) if x != y)
            if j > max_jumps or (best is not None and j > best):
                continue
            if nonnegative and min(accumulate(signs)) < 0:
                continue
            s = _solution_from_signs(L, signs)
            if s is None:
                continue
            if best is None or j < best:
                best, sols = j, [s]
            elif j == best:
                sols.append(s)
        minima[m] = best
        found[m] = sols
        m *= 2
    # symbolic minimal count
    if max_jumps < 1:
        return OneDResult(False, None, [], minima)
    sym = []
    for first in (1, -1):
        u = OneDSolution(((-L, F(0)), (F(0), first * L), (L, F(0))))
        if nonnegative and not u.nonnegative:
            continue
        sym.append(u)
    grid_best = [v for v in minima.values() if v is not None]
    if grid_best and min(grid_best) != 1:
        raise RuntimeError("partition route disagrees with the symbolic minimum")
    for sols in found.values():
        if sols and {s.breakpoints for s in sols} != {s.breakpoints for s in sym}:
            raise RuntimeError("partition route found different minimizers")
    return OneDResult(True, 1, sym, minima)
