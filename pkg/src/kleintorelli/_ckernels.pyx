# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the spectrum enumeration and the stabilizer scan.

Residues live in ``[0, p)`` with ``p < 2**32`` so that every product of two
residues fits in 64 bits.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int16_t, int64_t, uint8_t, uint64_t

cnp.import_array()

cdef enum:
    MAX_VARS = 256
    MAX_DIGITS = 4096


def _next_hits(qindex, int max_sum):
    """``nxt[s]`` is the smallest target sum ``>= s``, or a sentinel beyond ``max_sum``."""
    q = np.asarray(qindex)
    nxt = np.full(max_sum + 2, 2 * max_sum + 2, dtype=np.int64)
    cdef Py_ssize_t s
    cdef int64_t following = 2 * max_sum + 2
    for s in range(max_sum, -1, -1):
        if s < q.shape[0] and q[s] >= 0:
            following = s
        nxt[s] = following
    return nxt


cdef inline void _mark(uint64_t r, int q, uint8_t* owner, uint8_t* count,
                       int64_t* zero_hits, list extras):
    cdef uint8_t c, o
    if r == 0:
        zero_hits[0] += 1
    c = count[r]
    if c < 255:
        count[r] = c + 1
    o = owner[r]
    if o == 0:
        owner[r] = <uint8_t>(q + 1)
    elif o != q + 1:
        extras.append((int(r), q))


def mark_cube(const int64_t[::1] weights, uint64_t p, int max_digit,
              const int16_t[::1] qindex, int lo, int hi,
              uint8_t[::1] owner, uint8_t[::1] count):
    """Walk every exponent tuple with leading digit in ``[lo, hi)``.

    Returns ``(zero_hits, extras)``; extras are ``(residue, q)`` hits on a
    residue already owned by another q.
    """
    cdef int k = weights.shape[0]
    cdef uint64_t w[MAX_VARS]
    cdef uint64_t back[MAX_VARS]
    cdef int digits[MAX_VARS]
    cdef uint64_t wmul[MAX_DIGITS]
    cdef int j, t, b0, s, ss
    cdef uint64_t r, rr, wl
    cdef int64_t zero_hits = 0
    cdef list extras = []
    cdef uint8_t* own = &owner[0]
    cdef uint8_t* cnt = &count[0]
    if k < 2 or k > MAX_VARS or max_digit >= MAX_DIGITS:
        raise ValueError("unsupported number of variables or digit bound")
    if <uint64_t>owner.shape[0] < p or <uint64_t>count.shape[0] < p:
        raise ValueError("owner and count need length p")
    for j in range(k):
        w[j] = <uint64_t>(weights[j] % <int64_t>p)
        back[j] = (p - (<uint64_t>max_digit * w[j]) % p) % p
    wl = w[k - 1]
    nxt_arr = _next_hits(qindex, k * max_digit)
    cdef const int64_t[::1] nxt = nxt_arr
    for t in range(max_digit + 1):
        wmul[t] = (<uint64_t>t * wl) % p
    for b0 in range(lo, hi):
        for j in range(k):
            digits[j] = 0
        r = (<uint64_t>b0 * w[0]) % p
        s = b0
        while True:
            # jump straight to the target sums reachable with the last digit
            ss = nxt[s]
            while ss <= s + max_digit:
                rr = r + wmul[ss - s]
                if rr >= p:
                    rr -= p
                _mark(rr, qindex[ss], own, cnt, &zero_hits, extras)
                ss = nxt[ss + 1]
            j = k - 2
            while j >= 1:
                if digits[j] < max_digit:
                    digits[j] += 1
                    r += w[j]
                    if r >= p:
                        r -= p
                    s += 1
                    break
                digits[j] = 0
                r += back[j]
                if r >= p:
                    r -= p
                s -= max_digit
                j -= 1
            if j < 1:
                break
    return int(zero_hits), extras


def collect_cube(const int64_t[::1] weights, uint64_t p, int max_digit,
                 const int16_t[::1] qindex, int lo, int hi, Py_ssize_t total):
    """Like :func:`mark_cube` but return the ``(residue, q)`` hits as arrays of length ``total``."""
    cdef int k = weights.shape[0]
    cdef uint64_t w[MAX_VARS]
    cdef uint64_t back[MAX_VARS]
    cdef int digits[MAX_VARS]
    cdef uint64_t wmul[MAX_DIGITS]
    cdef int j, t, b0, s, ss
    cdef uint64_t r, rr, wl
    cdef Py_ssize_t pos = 0
    res_arr = np.empty(total, dtype=np.uint64)
    q_arr = np.empty(total, dtype=np.uint8)
    cdef uint64_t[::1] res = res_arr
    cdef uint8_t[::1] qs = q_arr
    if k < 2 or k > MAX_VARS or max_digit >= MAX_DIGITS:
        raise ValueError("unsupported number of variables or digit bound")
    for j in range(k):
        w[j] = <uint64_t>(weights[j] % <int64_t>p)
        back[j] = (p - (<uint64_t>max_digit * w[j]) % p) % p
    wl = w[k - 1]
    nxt_arr = _next_hits(qindex, k * max_digit)
    cdef const int64_t[::1] nxt = nxt_arr
    for t in range(max_digit + 1):
        wmul[t] = (<uint64_t>t * wl) % p
    for b0 in range(lo, hi):
        for j in range(k):
            digits[j] = 0
        r = (<uint64_t>b0 * w[0]) % p
        s = b0
        while True:
            ss = nxt[s]
            while ss <= s + max_digit:
                if pos >= total:
                    raise ValueError("more hits than announced")
                rr = r + wmul[ss - s]
                if rr >= p:
                    rr -= p
                res[pos] = rr
                qs[pos] = <uint8_t>qindex[ss]
                pos += 1
                ss = nxt[ss + 1]
            j = k - 2
            while j >= 1:
                if digits[j] < max_digit:
                    digits[j] += 1
                    r += w[j]
                    if r >= p:
                        r -= p
                    s += 1
                    break
                digits[j] = 0
                r += back[j]
                if r >= p:
                    r -= p
                s -= max_digit
                j -= 1
            if j < 1:
                break
    if pos != total:
        raise ValueError("fewer hits than announced")
    return res_arr, q_arr


def mark_pairs(const uint64_t[::1] residues, const uint8_t[::1] qs,
               uint8_t[::1] owner, uint8_t[::1] count):
    cdef Py_ssize_t i
    cdef int64_t zero_hits = 0
    cdef list extras = []
    cdef uint8_t* own = &owner[0]
    cdef uint8_t* cnt = &count[0]
    for i in range(residues.shape[0]):
        _mark(residues[i], qs[i], own, cnt, &zero_hits, extras)
    return int(zero_hits), extras


def stabilizes(uint64_t m, const uint64_t[::1] residues, const uint8_t[::1] owner, uint64_t p):
    """True iff ``m * r`` lies in the same set as ``r`` for every listed residue."""
    cdef Py_ssize_t i
    cdef uint64_t r
    for i in range(residues.shape[0]):
        r = residues[i]
        if owner[(m * r) % p] != owner[r]:
            return False
    return True
