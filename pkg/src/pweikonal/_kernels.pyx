# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled profile-DP expansion steps (same contract as _kernels_py)."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline long _sgn(long x) nogil:
    return (x > 0) - (x < 0)


def uj_expand(cnp.int16_t[:, :] S, int a, bint masked, bint boundary, long D, long DM, int A,
              bint allow_flat=False):
    cdef Py_ssize_t n = S.shape[0], W = S.shape[1]
    cdef int TB = A + 2 + a, LB = 2 * A + 2
    cdef Py_ssize_t cap = n * 6 if masked else n
    parent_np = np.empty(cap, dtype=np.int64)
    child_np = np.empty((cap, W), dtype=np.int16)
    dL_np = np.zeros(cap, dtype=np.int64)
    dE_np = np.zeros(cap, dtype=np.int64)
    aux_np = np.zeros(cap, dtype=np.int16)
    cdef cnp.int64_t[:] parent = parent_np
    cdef cnp.int16_t[:, :] child = child_np
    cdef cnp.int64_t[:] dL = dL_np
    cdef cnp.int64_t[:] dE = dE_np
    cdef cnp.int16_t[:] aux = aux_np
    cdef Py_ssize_t i, j, m = 0
    cdef long c00, c01, c10, c11, lo, hi, M, tb, lb, s0
    cdef int di, mo, nd
    cdef long deltas[3]
    if not masked:
        for i in range(n):
            for j in range(W):
                child[i, j] = S[i, j]
            child[i, a + 1] = 0
            child[i, TB] = 0
            child[i, LB] = 0
            parent[i] = i
        return parent_np, child_np, dL_np, dE_np, aux_np
    if boundary:
        nd = 1
        deltas[0] = 0
    else:
        nd = 3
        deltas[0] = -2
        deltas[1] = 0
        deltas[2] = 2
    with nogil:
        for di in range(nd):
            for mo in range(2):
                for i in range(n):
                    c01 = S[i, a]
                    c00 = S[i, a + 1]
                    c10 = S[i, a + 2]
                    if boundary:
                        c11 = 0
                    else:
                        c11 = c00 + deltas[di]
                    if c11 > D or -c11 > D:
                        continue
                    lo = c00
                    hi = c00
                    if c01 < lo: lo = c01
                    if c10 < lo: lo = c10
                    if c11 < lo: lo = c11
                    if c01 > hi: hi = c01
                    if c10 > hi: hi = c10
                    if c11 > hi: hi = c11
                    if hi - lo != 2 and not (allow_flat and hi == lo):
                        continue
                    if mo == 0:
                        M = lo + 1
                    else:
                        if hi != lo:
                            continue
                        M = lo - 1
                    if M > DM or -M > DM:
                        continue
                    tb = S[i, TB]
                    lb = S[i, LB]
                    s0 = _sgn(M - c00)
                    for j in range(W):
                        child[m, j] = S[i, j]
                    child[m, a + 1] = <cnp.int16_t>c11
                    child[m, TB] = <cnp.int16_t>(_sgn(M - c01) if c01 == c11 else 0)
                    child[m, LB] = <cnp.int16_t>(_sgn(M - c10) if c10 == c11 else 0)
                    dL[m] = 2 * (c00 == c11) + 2 * (c10 == c01)
                    dE[m] = (c00 == c10 and tb != 0 and tb == s0) + (c00 == c01 and lb != 0 and lb == s0)
                    aux[m] = <cnp.int16_t>M
                    parent[m] = i
                    m += 1
    return parent_np[:m], child_np[:m], dL_np[:m], dE_np[:m], aux_np[:m]


def walk_expand(cnp.int16_t[:, :] P, int k, bint present, bint boundary, long D, int parity,
                bint h_prev, bint v_edge, bint centre_prev, bint s_edge):
    cdef Py_ssize_t n = P.shape[0], W = P.shape[1]
    cdef long span = 2 * D + 1
    cdef Py_ssize_t per = 1 if boundary else (2 if (h_prev or v_edge) else span)
    cdef Py_ssize_t cap = n * per if present else n
    parent_np = np.empty(cap, dtype=np.int64)
    child_np = np.empty((cap, W), dtype=np.int16)
    dL_np = np.zeros(cap, dtype=np.int64)
    dE_np = np.zeros(cap, dtype=np.int64)
    aux_np = np.zeros(cap, dtype=np.int16)
    cdef cnp.int64_t[:] parent = parent_np
    cdef cnp.int16_t[:, :] child = child_np
    cdef cnp.int64_t[:] dL = dL_np
    cdef cnp.int64_t[:] dE = dE_np
    cdef Py_ssize_t i, j, m = 0
    cdef long v, pn = 0, ok_, c, ref, lo_v, hi_v
    cdef int t, nt
    if not present:
        for i in range(n):
            for j in range(W):
                child[i, j] = P[i, j]
            child[i, k] = 0
            parent[i] = i
        return parent_np, child_np, dL_np, dE_np, aux_np
    with nogil:
        for i in range(n):
            ok_ = k > 0
            if ok_:
                pn = P[i, k - 1]
            if boundary:
                lo_v = 0
                hi_v = 0
            elif h_prev or v_edge:
                ref = pn if h_prev else P[i, k + 1]
                lo_v = ref - 1
                hi_v = ref + 1
            else:
                lo_v = -D
                hi_v = D
            v = lo_v
            while v <= hi_v:
                if (v - parity) % 2 != 0 or v > D or -v > D:
                    v += 1
                    continue
                if h_prev and (v - pn != 1 and pn - v != 1):
                    v += 1
                    continue
                if v_edge and (v - P[i, k + 1] != 1 and P[i, k + 1] - v != 1):
                    v += 1
                    continue
                for j in range(W):
                    child[m, j] = P[i, j]
                child[m, k] = <cnp.int16_t>v
                c = 0
                if centre_prev and P[i, k - 2] == v:
                    c = 2
                dL[m] = c
                if s_edge and (v - pn) != (P[i, k + 1] - P[i, k]):
                    dE[m] = 1
                parent[m] = i
                m += 1
                v += 1
    return parent_np[:m], child_np[:m], dL_np[:m], dE_np[:m], aux_np[:m]
