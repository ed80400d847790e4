"""Fallback kernels in Python + numpy, mirroring ``_ckernels`` call for call.

The cube walk is vectorized over a block of trailing coordinates whose
tuples are pre-sorted by digit sum, so each prefix contributes a handful
of contiguous slices.
"""

from __future__ import annotations

import itertools

import numpy as np

_BLOCK_LIMIT = 1 << 18
_CHUNK = 1 << 20


def _block(weights, p, max_digit, ncoords):
    """Residues and digit sums of every tuple over the last ``ncoords`` coordinates, sorted by sum."""
    res = np.zeros(1, dtype=np.uint64)
    sums = np.zeros(1, dtype=np.int64)
    digits = np.arange(max_digit + 1, dtype=np.uint64)
    for w in weights[len(weights) - ncoords:]:
        step = (digits * np.uint64(int(w) % p)) % np.uint64(p)
        res = ((res[:, None] + step[None, :]) % np.uint64(p)).ravel()
        sums = (sums[:, None] + np.arange(max_digit + 1)[None, :]).ravel()
    order = np.argsort(sums, kind="stable")
    res, sums = res[order], sums[order]
    bounds = np.searchsorted(sums, np.arange(max_digit * ncoords + 2))
    return res, bounds


def _walk(weights, p, max_digit, qindex, lo, hi):
    """Yield ``(residues, q)`` batches for every tuple with leading digit in ``[lo, hi)``."""
    k = len(weights)
    weights = [int(w) % p for w in weights]
    qindex = np.asarray(qindex)
    tail = 0
    while tail < k - 1 and (max_digit + 1) ** (tail + 1) <= _BLOCK_LIMIT:
        tail += 1
    tail = max(tail, 1) if k > 1 else 0
    block_res, bounds = _block(weights, p, max_digit, tail)
    tail_max = max_digit * tail
    middle = range(1, k - tail)
    targets = [int(s) for s in np.nonzero(qindex >= 0)[0]]
    up = np.uint64(p)
    for b0 in range(lo, hi):
        for mid in itertools.product(range(max_digit + 1), repeat=len(middle)):
            r0 = (b0 * weights[0] + sum(a * weights[j] for a, j in zip(mid, middle))) % p
            s0 = b0 + sum(mid)
            for s in targets:
                ts = s - s0
                if 0 <= ts <= tail_max:
                    seg = block_res[bounds[ts]:bounds[ts + 1]]
                    if seg.size:
                        yield (seg + np.uint64(r0)) % up, int(qindex[s])


def mark_pairs(residues, qs, owner, count):
    residues = np.asarray(residues, dtype=np.uint64)
    qs = np.asarray(qs, dtype=np.uint8)
    if residues.size == 0:
        return 0, []
    zero_hits = int(np.count_nonzero(residues == 0))
    uniq, mult = np.unique(residues, return_counts=True)
    count[uniq] = np.minimum(count[uniq].astype(np.int64) + mult, 255).astype(np.uint8)
    tag = (qs.astype(np.int64) + 1).astype(np.uint8)
    free = owner[residues] == 0
    owner[residues[free]] = tag[free]
    lost = owner[residues] != tag
    extras = [(int(r), int(q)) for r, q in zip(residues[lost], qs[lost])]
    return zero_hits, extras


def mark_cube(weights, p, max_digit, qindex, lo, hi, owner, count):
    zero_hits = 0
    extras = []
    pending_r, pending_q, size = [], [], 0
    flush_at = max(_CHUNK, p // 4)

    def flush():
        nonlocal zero_hits, size
        if not pending_r:
            return
        z, e = mark_pairs(np.concatenate(pending_r), np.concatenate(pending_q), owner, count)
        zero_hits += z
        extras.extend(e)
        pending_r.clear()
        pending_q.clear()
        size = 0

    for res, q in _walk(weights, p, max_digit, qindex, lo, hi):
        pending_r.append(res)
        pending_q.append(np.full(res.size, q, dtype=np.uint8))
        size += res.size
        if size >= flush_at:
            flush()
    flush()
    return zero_hits, extras


def collect_cube(weights, p, max_digit, qindex, lo, hi, total):
    rs, qs = [], []
    for res, q in _walk(weights, p, max_digit, qindex, lo, hi):
        rs.append(res)
        qs.append(np.full(res.size, q, dtype=np.uint8))
    if rs:
        out_r, out_q = np.concatenate(rs), np.concatenate(qs)
    else:
        out_r, out_q = np.empty(0, dtype=np.uint64), np.empty(0, dtype=np.uint8)
    if out_r.size != total:
        raise ValueError("hit count differs from the announced total")
    return out_r, out_q


def stabilizes(m, residues, owner, p):
    um, up = np.uint64(m), np.uint64(p)
    # small chunks first so most candidates are rejected cheaply
    start, size = 0, 64
    while start < residues.size:
        chunk = residues[start:start + size]
        if np.any(owner[(chunk * um) % up] != owner[chunk]):
            return False
        start += size
        size = min(size * 4, _CHUNK)
    return True
