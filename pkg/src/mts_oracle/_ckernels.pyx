# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of ``_kernels_py``; same signatures, same tie-breaking."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, pow

cnp.import_array()

DEF NO_EVICTION = -1


def furthest_schedule(requests, keys, Py_ssize_t k):
    req_arr = np.ascontiguousarray(requests, dtype=np.int64)
    cdef cnp.int64_t[:] req = req_arr
    cdef double[:] key = np.ascontiguousarray(keys, dtype=np.float64)
    cdef Py_ssize_t T = req.shape[0]
    cdef Py_ssize_t n_pages = (int(req_arr.max()) + 1) if T else 0
    cdef cnp.int64_t[:] slot_of = np.full(n_pages, -1, dtype=np.int64)
    cdef double[:] page_key = np.zeros(n_pages, dtype=np.float64)
    cdef cnp.int64_t[:] slots = np.empty(k, dtype=np.int64)
    ev_arr = np.full(T, NO_EVICTION, dtype=np.int64)
    cdef cnp.int64_t[:] ev = ev_arr
    cdef Py_ssize_t used = 0, t, i, best_i
    cdef long faults = 0
    cdef cnp.int64_t r, p, best_p
    cdef double best_k
    for t in range(T):
        r = req[t]
        if slot_of[r] < 0:
            faults += 1
            if used < k:
                slots[used] = r
                slot_of[r] = used
                used += 1
            else:
                best_i = 0
                best_p = slots[0]
                best_k = page_key[best_p]
                for i in range(1, k):
                    p = slots[i]
                    if page_key[p] > best_k or (page_key[p] == best_k and p < best_p):
                        best_i = i
                        best_p = p
                        best_k = page_key[p]
                ev[t] = best_p
                slot_of[best_p] = -1
                slots[best_i] = r
                slot_of[r] = best_i
        page_key[r] = key[t]
    return ev_arr.tolist(), faults


def lru_schedule(requests, Py_ssize_t k):
    req_arr = np.ascontiguousarray(requests, dtype=np.int64)
    cdef cnp.int64_t[:] req = req_arr
    cdef Py_ssize_t T = req.shape[0]
    cdef Py_ssize_t n_pages = (int(req_arr.max()) + 1) if T else 0
    cdef cnp.int64_t[:] slot_of = np.full(n_pages, -1, dtype=np.int64)
    cdef cnp.int64_t[:] last = np.zeros(n_pages, dtype=np.int64)
    cdef cnp.int64_t[:] slots = np.empty(k, dtype=np.int64)
    ev_arr = np.full(T, NO_EVICTION, dtype=np.int64)
    cdef cnp.int64_t[:] ev = ev_arr
    cdef Py_ssize_t used = 0, t, i, best_i
    cdef long faults = 0
    cdef cnp.int64_t r, p, best_p
    for t in range(T):
        r = req[t]
        if slot_of[r] < 0:
            faults += 1
            if used < k:
                slots[used] = r
                slot_of[r] = used
                used += 1
            else:
                best_i = 0
                best_p = slots[0]
                for i in range(1, k):
                    p = slots[i]
                    if last[p] < last[best_p]:
                        best_i = i
                        best_p = p
                ev[t] = best_p
                slot_of[best_p] = -1
                slots[best_i] = r
                slot_of[r] = best_i
        last[r] = t
    return ev_arr.tolist(), faults


def pleco_predictions(requests, int lag_offset=0):
    req_arr = np.ascontiguousarray(requests, dtype=np.int64)
    cdef cnp.int64_t[:] req = req_arr
    cdef Py_ssize_t T = req.shape[0]
    cdef Py_ssize_t n_pages = (int(req_arr.max()) + 1) if T else 0
    cdef double[:] w = np.empty(T + 1, dtype=np.float64)
    cdef cnp.int64_t[:] prev = np.full(T, -1, dtype=np.int64)
    cdef cnp.int64_t[:] last = np.full(n_pages, -1, dtype=np.int64)
    out_arr = np.empty(T, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef Py_ssize_t t, s
    cdef double x, num, denom = 0.0
    for t in range(T + 1):
        x = t + lag_offset
        w[t] = pow(x + 10.0, -1.8) * exp(-x / 670.0)
    for t in range(T):
        denom += w[t]
        prev[t] = last[req[t]]
        last[req[t]] = t
        num = 0.0
        s = t
        while s >= 0:
            num += w[t - s]
            s = prev[s]
        out[t] = (t + 1) + denom / num
    return out_arr


def belady_faults_batch(seqs, Py_ssize_t k):
    """Furthest-in-future fault counts for each row of a 2-D array of dense requests."""
    cdef cnp.int64_t[:, :] S = np.ascontiguousarray(seqs, dtype=np.int64)
    cdef Py_ssize_t N = S.shape[0], T = S.shape[1]
    cdef Py_ssize_t n_pages = (int(np.max(seqs)) + 1) if N and T else 0
    cdef cnp.int64_t[:] nxt = np.empty(T, dtype=np.int64)
    cdef cnp.int64_t[:] last = np.empty(n_pages, dtype=np.int64)
    cdef cnp.int64_t[:] slot_of = np.empty(n_pages, dtype=np.int64)
    cdef double[:] page_key = np.empty(n_pages, dtype=np.float64)
    cdef cnp.int64_t[:] slots = np.empty(k, dtype=np.int64)
    out_arr = np.empty(N, dtype=np.int64)
    cdef cnp.int64_t[:] out = out_arr
    cdef Py_ssize_t row, t, i, best_i, used
    cdef long faults
    cdef cnp.int64_t r, p, best_p
    cdef double best_k
    for row in range(N):
        for i in range(n_pages):
            last[i] = T
            slot_of[i] = -1
        for t in range(T - 1, -1, -1):
            r = S[row, t]
            nxt[t] = last[r] + 1
            last[r] = t
        used = 0
        faults = 0
        for t in range(T):
            r = S[row, t]
            if slot_of[r] < 0:
                faults += 1
                if used < k:
                    slots[used] = r
                    slot_of[r] = used
                    used += 1
                else:
                    best_i = 0
                    best_p = slots[0]
                    best_k = page_key[best_p]
                    for i in range(1, k):
                        p = slots[i]
                        if page_key[p] > best_k or (page_key[p] == best_k and p < best_p):
                            best_i = i
                            best_p = p
                            best_k = page_key[p]
                    slot_of[best_p] = -1
                    slots[best_i] = r
                    slot_of[r] = best_i
            page_key[r] = nxt[t]
        out[row] = faults
    return out_arr
