"""Local search over signed grid partitions, and the moment-based selector.

A candidate labels every cell of a pitch-delta grid with a part and gives
each part a sign; its value is the glued function sum_k s_k d(., boundary E_k),
which is a solution by construction. Values live on the union-jack
lattice of pitch delta/2, where every part's distance function is exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .distance import _require_h, solution_from_grid
from .errors import EmptyCandidateSet, OutsideBuiltShells
from .geometry import HDomain, rational_gcd
from .lattice import Lattice, distance_values, lattice_counts
from .numeric import Q2
from .oracle import GridSpec
from .solution import PLSolution, integral

F = Fraction


# ---------------------------------------------------------------------------
# candidates


@dataclass(frozen=True)
class Candidate:
    labels: np.ndarray  # (A, B) int, -1 outside the domain, parts 0..p-1
    signs: tuple

    @staticmethod
    def make(labels, signs):
        """Canonical form: parts numbered by first cell in row-major order."""
        flat = labels.ravel()
        inside = flat >= 0
        order = []
        seen = set()
        for v in flat[inside]:
            v = int(v)
            if v not in seen:
                seen.add(v)
                order.append(v)
        remap = np.full(max(order) + 2 if order else 1, -1, dtype=np.int32)
        for i, v in enumerate(order):
            remap[v] = i
        out = np.where(labels >= 0, remap[np.maximum(labels, 0)], -1).astype(np.int32)
        out.setflags(write=False)
        return Candidate(out, tuple(int(signs[v]) for v in order))

    @property
    def parts(self) -> int:
        return len(self.signs)

    @property
    def key(self) -> bytes:
        return self.labels.tobytes() + bytes(1 if s > 0 else 0 for s in self.signs)

    def part_mask(self, k):
        return self.labels == k


def _components(mask):
    lab, n = ndimage.label(mask)
    return [lab == i for i in range(1, n + 1)]


def greedy_squares(mask):
    """Cover a cell set by repeatedly removing its largest square (row-major first)."""
    rem = mask.copy()
    out = []
    while rem.any():
        A, B = rem.shape
        S = np.zeros((A + 1, B + 1), dtype=np.int64)
        for i in range(A - 1, -1, -1):
            row = rem[i]
            for j in range(B - 1, -1, -1):
                if row[j]:
                    S[i, j] = 1 + min(S[i + 1, j], S[i, j + 1], S[i + 1, j + 1])
        k = int(S.max())
        i, j = map(int, np.argwhere(S == k)[0])
        sq = np.zeros_like(rem)
        sq[i:i + k, j:j + k] = True
        out.append(sq)
        rem &= ~sq
    return out


# ---------------------------------------------------------------------------
# objectives


class _Evaluator:
    """Glues part distance functions on the half-pitch lattice (with a cache)."""

    def __init__(self, D: HDomain, pitch):
        self.grid = GridSpec(D, pitch)
        self.domain = D
        self.cells = self.grid.mask
        g = self.grid.lattice
        self.lattice = Lattice(g.s0, g.t0, g.h / 2, 2 * g.A, 2 * g.B)
        self.fine_mask = np.kron(self.cells, np.ones((2, 2), dtype=bool))
        self._cache = {}
        self.evaluations = 0

    def part_values(self, cells):
        key = cells.tobytes()
        if key not in self._cache:
            fm = np.kron(cells, np.ones((2, 2), dtype=bool))
            self._cache[key] = distance_values(fm)
        return self._cache[key]

    def values(self, cand: Candidate):
        C = np.zeros((self.lattice.A + 1, self.lattice.B + 1), dtype=np.int64)
        M = np.zeros((self.lattice.A, self.lattice.B), dtype=np.int64)
        for k, s in enumerate(cand.signs):
            Ck, Mk = self.part_values(cand.part_mask(k))
            C += s * Ck
            M += s * Mk
        return C, M

    def solution(self, cand: Candidate) -> PLSolution:
        C, M = self.values(cand)
        return solution_from_grid(self.lattice, C, M, self.fine_mask.copy(), self.domain)


class _FObjective:
    name = "F"

    def __init__(self, ev: _Evaluator):
        self.ev = ev

    def __call__(self, cand):
        C, M = self.ev.values(cand)
        L, E = lattice_counts(C, M, self.ev.fine_mask)
        u = self.ev.lattice.u
        return Q2(u * L, 2 * u * E)


class _FhObjective:
    name = "Fh_upper"

    def __init__(self, ev: _Evaluator, W, tail):
        self.ev, self.W, self.tail = ev, W, tail

    def __call__(self, cand):
        from .weight import functional_Fh

        C, M = self.ev.values(cand)
        v = PLSolution(self.ev.domain, None, grid=(self.ev.lattice, C, M, self.ev.fine_mask))
        r = functional_Fh(self.W, v)
        return r.upper + float(self.tail)


# ---------------------------------------------------------------------------
# moves


def _adjacent_pairs(labels):
    pairs = set()
    for a, b in ((labels[:-1, :], labels[1:, :]), (labels[:, :-1], labels[:, 1:])):
        sel = (a >= 0) & (b >= 0) & (a != b)
        for x, y in zip(a[sel].tolist(), b[sel].tolist()):
            pairs.add((min(x, y), max(x, y)))
    return sorted(pairs)


def _relabel(labels, signs, k, pieces, piece_signs):
    """Replace part k by the given cell sets (split into connected components)."""
    L = labels.copy()
    S = list(signs)
    first = True
    for cells, s in zip(pieces, piece_signs):
        for comp in _components(cells):
            if first:
                L[comp] = k
                S[k] = s
                first = False
            else:
                L[comp] = len(S)
                S.append(s)
    return Candidate.make(L, S)


def neighbours(cand: Candidate, rng, max_splits: int = 24):
    """Moves: flip, merge, square decomposition, and a sample of grid-line splits."""
    labels, signs = cand.labels, cand.signs
    out = []
    for k in range(cand.parts):
        S = list(signs)
        S[k] = -S[k]
        out.append((f"flip {k}", Candidate.make(labels, S)))
    for a, b in _adjacent_pairs(labels):
        for s in sorted({signs[a], signs[b]}, reverse=True):
            L = np.where(labels == b, a, labels)
            S = list(signs)
            S[a] = s
            out.append((f"merge {a} {b} {'+' if s > 0 else '-'}", Candidate.make(L, S)))
    for k in range(cand.parts):
        m = labels == k
        sq = greedy_squares(m)
        if len(sq) > 1:
            out.append((f"squares {k}", _relabel(labels, signs, k, sq, [signs[k]] * len(sq))))
    splits = []
    for k in range(cand.parts):
        m = labels == k
        ii, jj = np.nonzero(m)
        for axis, coords in ((0, ii), (1, jj)):
            for line in range(int(coords.min()) + 1, int(coords.max()) + 1):
                splits.append((k, axis, line))
    if len(splits) > max_splits:
        pick = sorted(rng.choice(len(splits), size=max_splits, replace=False).tolist())
        splits = [splits[i] for i in pick]
    for k, axis, line in splits:
        m = labels == k
        idx = np.indices(m.shape)[axis]
        lo, hi = m & (idx < line), m & (idx >= line)
        for s2 in (signs[k], -signs[k]):
            c = _relabel(labels, signs, k, [lo, hi], [signs[k], s2])
            out.append((f"split {k} {'st'[axis]}={line} {'same' if s2 == signs[k] else 'opposite'}", c))
    return out


# ---------------------------------------------------------------------------
# search


@dataclass
class TraceRow:
    iteration: int
    restart: int
    move: str
    value: float
    best: float
    accepted: bool


@dataclass
class SearchResult:
    best: PLSolution
    value: object  # Q2 for F, FhResult for F_h
    trace: list = field(default_factory=list)
    candidate: Candidate | None = None
    evaluations: int = 0

    def write_trace(self, path):
        write_trace(self.trace, path)


def write_trace(trace, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "restart", "move", "value", "best", "accepted"])
        for r in trace:
            w.writerow([r.iteration, r.restart, r.move, f"{r.value:.12g}", f"{r.best:.12g}", int(r.accepted)])


def _natural_pitch(D: HDomain):
    s0, t0, _, _ = D.bbox()
    return rational_gcd([p[0] - s0 for p in D.vertices] + [p[1] - t0 for p in D.vertices])


def _negated(c: Candidate) -> Candidate:
    return Candidate.make(c.labels, [-s for s in c.signs])


def _seeds(ev: _Evaluator, extra=(), negate=False):
    cells = ev.cells
    whole = np.where(cells, 0, -1)
    out = [("seed whole +", Candidate.make(whole, [1])), ("seed whole -", Candidate.make(whole, [-1]))]
    sq = greedy_squares(cells)
    L = np.full(cells.shape, -1, dtype=np.int32)
    for i, m in enumerate(sq):
        L[m] = i
    out.append(("seed squares +", Candidate.make(L, [1] * len(sq))))
    out += list(extra)
    if negate:
        out = [(name + " negated", _negated(c)) for name, c in out]
    return out, sq


def _random_start(ev, sq, rng, negate=False):
    L = np.full(ev.cells.shape, -1, dtype=np.int32)
    for i, m in enumerate(sq):
        L[m] = i
    signs = rng.choice([-1, 1], size=len(sq)).tolist()
    if negate:
        signs = [-s for s in signs]
    return Candidate.make(L, signs)


def _search(ev, objective, seed, restarts, max_iters, max_splits, extra_seeds=(), negate=False):
    rng = np.random.default_rng(seed)
    seeds, sq = _seeds(ev, extra_seeds, negate)
    trace = []
    memo = {}
    it = 0
    best = None  # (sort key, candidate, value)

    def score(c):
        if c.key not in memo:
            memo[c.key] = objective(c)
            ev.evaluations += 1
        v = memo[c.key]
        return (v, c.parts, c.key), v

    starts = [(0, name, c) for name, c in seeds]
    starts += [(r, f"restart {r}", None) for r in range(1, restarts + 1)]
    for r, name, c in starts:
        if c is None:
            c = _random_start(ev, sq, rng, negate)
        k, v = score(c)
        if best is None or k < best[0]:
            best = (k, c, v)
        trace.append(TraceRow(it, r, name, float(v), float(best[2]), True))
        cur, ck = c, k
        for _ in range(max_iters):
            it += 1
            step = None
            for move, nb in neighbours(cur, rng, max_splits):
                nk, nv = score(nb)
                if nk < best[0]:
                    best = (nk, nb, nv)
                trace.append(TraceRow(it, r, move, float(nv), float(best[2]), False))
                if nk < ck and (step is None or nk < step[0]):
                    step = (nk, nb, nv, len(trace) - 1)
            if step is None:
                break
            ck, cur = step[0], step[1]
            trace[step[3]].accepted = True
    return best[1], best[2], trace


def minimize_F(D: HDomain, pitch=None, seed: int = 0, restarts: int = 2, max_iters: int = 50,
               max_splits: int = 24, trace_path=None, negate: bool = False) -> SearchResult:
    """Greedy local search for a small F over signed grid partitions of pitch ``pitch``.

    Always starts from +d, -d and the greedy square decomposition, then from
    ``restarts`` decompositions with random signs. Ties are broken by
    (F, number of parts, serialization), so a fixed seed gives a fixed result.
    ``negate`` flips the sign of every starting candidate.
    """
    _require_h(D)
    pitch = F(pitch) if pitch is not None else _natural_pitch(D)
    ev = _Evaluator(D, pitch)
    cand, val, trace = _search(ev, _FObjective(ev), seed, restarts, max_iters, max_splits, negate=negate)
    res = SearchResult(ev.solution(cand), val, trace, cand, ev.evaluations)
    if trace_path:
        res.write_trace(trace_path)
    return res


def minimize_Fh(W, domain: HDomain | None = None, seed: int = 0, restarts: int = 1, max_iters: int = 8,
                max_splits: int = 12, trace_path=None) -> SearchResult:
    """Search driven by the upper end of the F_h enclosure plus the shell tail.

    ``W`` is a built weight (candidates live on its largest built level and
    the shell solution is an extra seed) or None for the constant weight 1 on
    ``domain``, which reduces to minimize_F.
    """
    if W is None:
        if domain is None:
            raise ValueError("the constant weight needs a domain")
        res = minimize_F(domain, seed=seed, restarts=restarts, max_iters=max_iters,
                         max_splits=max_splits, trace_path=trace_path)
        return res
    from .weight import functional_Fh, shell_solution

    if W.is_empty:
        raise OutsideBuiltShells("no shells were built")
    lazy = shell_solution(W)
    K = W.levels()[-1]
    D = W.shell(K).omega
    pitch = 2 * W.lattice.h
    ev = _Evaluator(D, pitch)
    # the shell solution as a partition into annuli
    labels = np.full(ev.cells.shape, -1, dtype=np.int32)
    g = ev.grid.lattice
    inner = np.zeros_like(ev.cells)
    for i, n in enumerate(W.levels()):
        mn = g.mask(W.shell(n).omega)
        labels[mn & ~inner] = i
        inner = mn
    shell_cand = Candidate.make(labels, [1] * len(W.levels()))
    obj = _FhObjective(ev, W, lazy.tail)
    cand, val, trace = _search(ev, obj, seed, restarts, max_iters, max_splits,
                               extra_seeds=[("seed shells", shell_cand)])
    best = ev.solution(cand)
    enc = functional_Fh(W, best)
    enc.tail = lazy.tail
    res = SearchResult(best, enc, trace, cand, ev.evaluations)
    if trace_path:
        res.write_trace(trace_path)
    return res


# ---------------------------------------------------------------------------
# lexicographic selection


@dataclass
class Selection:
    solution: PLSolution
    multiple_survivors: bool
    rounds: list  # surviving count after each round


def lexicographic_select(candidates, depth: int) -> Selection:
    """Keep the argmax of the exact moment integral of v * f_k for k = 1..depth.

    f_k is the k-th graded-lex monomial (1, x1, x2, x1^2, ...). Several
    survivors after all rounds are reported with the lowest serialization
    key and ``multiple_survivors`` set.
    """
    cands = list(candidates)
    if not cands:
        raise EmptyCandidateSet("no candidates to select from")
    rounds = []
    for k in range(1, depth + 1):
        if len(cands) == 1:
            break
        vals = [integral(v, k) for v in cands]
        top = max(vals)
        cands = [v for v, x in zip(cands, vals) if x == top]
        rounds.append(len(cands))
    cands.sort(key=lambda v: v.serialization_key())
    return Selection(cands[0], len(cands) > 1, rounds)
