"""Vectorized numpy versions of the profile-DP expansion steps.

Both kernels take a frontier ``S`` (one state per row, int16) and return
``(parent, child, dL, dE, aux)``: for every generated transition the index of
its parent row, the child state, the cost increments and one auxiliary value
(the centre value for union-jack steps, unused otherwise).
"""

from __future__ import annotations

import numpy as np


def uj_expand(S, a, masked, boundary, D, DM, A, allow_flat=False):
    """Choose corner c11 (and the centre) of union-jack cell ``a`` of the current row.

    State layout: S[:, 0:A+2] profile of corner values (S[a] = c01, S[a+1] = c00,
    S[a+2] = c10), S[:, A+2:2A+2] top-edge side bits, S[:, 2A+2] left bit.
    Values are in units u = pitch / 2; ``D`` and ``DM`` bound |c11| and |M|.
    Cells with four equal corners carry a free centre and are skipped unless
    ``allow_flat`` is set.
    """
    n = S.shape[0]
    TB = A + 2 + a
    LB = 2 * A + 2
    if not masked:
        C = S.copy()
        C[:, a + 1] = 0
        C[:, TB] = 0
        C[:, LB] = 0
        z = np.zeros(n, dtype=np.int64)
        return np.arange(n, dtype=np.int64), C, z, z, z.astype(np.int16)
    c01 = S[:, a].astype(np.int64)
    c00 = S[:, a + 1].astype(np.int64)
    c10 = S[:, a + 2].astype(np.int64)
    tb = S[:, TB].astype(np.int64)
    lb = S[:, LB].astype(np.int64)
    out = []
    for delta in ((0,) if boundary else (-2, 0, 2)):
        c11 = np.zeros(n, dtype=np.int64) if boundary else c00 + delta
        lo = np.minimum(np.minimum(c00, c01), np.minimum(c10, c11))
        hi = np.maximum(np.maximum(c00, c01), np.maximum(c10, c11))
        spread = hi - lo
        base = (np.abs(c11) <= D) & (((spread == 0) & allow_flat) | (spread == 2))
        for mo in (1, -1):
            Mv = lo + mo
            ok = base & (np.abs(Mv) <= DM)
            if mo == -1:
                ok &= spread == 0
            idx = np.nonzero(ok)[0]
            if len(idx) == 0:
                continue
            m = Mv[idx]
            x00, x01, x10, x11 = c00[idx], c01[idx], c10[idx], c11[idx]
            dL = 2 * (x00 == x11) + 2 * (x10 == x01)
            side0 = np.sign(m - x00)
            e_b = (x00 == x10) & (tb[idx] != 0) & (tb[idx] == side0)
            e_l = (x00 == x01) & (lb[idx] != 0) & (lb[idx] == side0)
            dE = e_b.astype(np.int64) + e_l.astype(np.int64)
            C = S[idx].copy()
            C[:, a + 1] = x11
            C[:, TB] = np.where(x01 == x11, np.sign(m - x01), 0)
            C[:, LB] = np.where(x10 == x11, np.sign(m - x10), 0)
            out.append((idx, C, dL.astype(np.int64), dE, m.astype(np.int16)))
    if not out:
        e = np.zeros(0, dtype=np.int64)
        return e, S[:0].copy(), e, e, e.astype(np.int16)
    return tuple(np.concatenate([o[k] for o in out]) for k in range(5))


def walk_expand(P, k, present, boundary, D, parity, h_prev, v_edge, centre_prev, s_edge):
    """Place the value of vertex ``k`` of the next world row (jump-1 relaxation).

    Layout: P[:, x] = new row value for x < k, P[:, x+1] = old row value for
    x >= k - 1. ``h_prev``: horizontal edge (k-1, k) present in the new row;
    ``v_edge``: vertical edge to the old row at k present; ``centre_prev``:
    vertex k-1 of the new row is a centre (cost 2 if its neighbours agree);
    ``s_edge``: edge (k-1, k) present in both rows (cost 1 sqrt-unit if the
    slopes differ). Transition order is unspecified (callers only take minima).
    """
    n = P.shape[0]
    if not present:
        C = P.copy()
        C[:, k] = 0
        z = np.zeros(n, dtype=np.int64)
        return np.arange(n, dtype=np.int64), C, z, z, z.astype(np.int16)
    prev_new = P[:, k - 1].astype(np.int64) if k > 0 else None
    old_k = P[:, k + 1].astype(np.int64)
    out = []
    if boundary:
        cands = [0]
    elif h_prev or v_edge:
        cands = None
    else:
        cands = [v for v in range(-D, D + 1) if (v - parity) % 2 == 0]
    if cands is None:
        ref = prev_new if h_prev else old_k
        lists = [ref - 1, ref + 1]
    else:
        lists = [np.full(n, v, dtype=np.int64) for v in cands]
    for val in lists:
        ok = (np.abs(val) <= D) & ((val - parity) % 2 == 0)
        if h_prev:
            ok &= np.abs(val - prev_new) == 1
        if v_edge:
            ok &= np.abs(val - old_k) == 1
        idx = np.nonzero(ok)[0]
        if len(idx) == 0:
            continue
        v = val[idx]
        dL = np.zeros(len(idx), dtype=np.int64)
        if centre_prev:
            dL += 2 * (P[idx, k - 2].astype(np.int64) == v)
        dE = np.zeros(len(idx), dtype=np.int64)
        if s_edge:
            old_slope = P[idx, k + 1].astype(np.int64) - P[idx, k].astype(np.int64)
            dE += (v - prev_new[idx]) != old_slope
        C = P[idx].copy()
        C[:, k] = v
        out.append((idx, C, dL, dE, np.zeros(len(idx), dtype=np.int16)))
    if not out:
        e = np.zeros(0, dtype=np.int64)
        return e, P[:0].copy(), e, e, e.astype(np.int16)
    return tuple(np.concatenate([o[j] for o in out]) for j in range(5))
