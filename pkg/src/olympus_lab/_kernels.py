"""Numba kernels for bit-sliced radius-3 CA evaluation.

Layout: a batch of ICs is stored cell-major as ``uint64[N, W]``; bit ``j`` of
word ``w`` in row ``i`` is cell ``i`` of the IC held in lane ``64*w + j``.
The working buffers are flattened and padded with three wraparound rows on
each side so the neighbourhood of cell ``i`` is rows ``i .. i+6``.

The 128-entry rule table enters as a tuple of 128 all-zero / all-one masks so
LLVM can keep it loop invariant and vectorise across words.
"""
import numpy as np
from numba import njit

ALL = np.uint64(0xFFFFFFFFFFFFFFFF)
ONE = np.uint64(1)

UNRESOLVED = 0
ALL_ZEROS = 1
ALL_ONES = 2


def rule_masks(bits):
    """Expand 128 rule bits into the mask tuple consumed by the kernels."""
    return tuple(np.where(np.asarray(bits) != 0, ALL, np.uint64(0)).astype(np.uint64))


@njit(inline="always")
def _sel(s, a, b):
    return (a & ~s) | (b & s)


@njit(inline="always")
def _leaf(K, h, m0, m1, m2, m3, m4, m5, m6, m7):
    # 3-variable sub-function over (x4, x5, x6) for high index h = x0x1x2x3
    b = h * 8
    return ((K[b] & m0) | (K[b + 1] & m1) | (K[b + 2] & m2) | (K[b + 3] & m3)
            | (K[b + 4] & m4) | (K[b + 5] & m5) | (K[b + 6] & m6) | (K[b + 7] & m7))


@njit(boundscheck=False, cache=True)
def step_padded(K, src, dst, n_cells, n_words):
    """One synchronous update of every row; src and dst are padded flat buffers."""
    W = n_words
    for p in range(n_cells * W):
        x0 = src[p]
        x1 = src[p + W]
        x2 = src[p + 2 * W]
        x3 = src[p + 3 * W]
        x4 = src[p + 4 * W]
        x5 = src[p + 5 * W]
        x6 = src[p + 6 * W]
        n4 = ~x4
        n5 = ~x5
        n6 = ~x6
        a00 = n4 & n5
        a01 = n4 & x5
        a10 = x4 & n5
        a11 = x4 & x5
        m0 = a00 & n6
        m1 = a00 & x6
        m2 = a01 & n6
        m3 = a01 & x6
        m4 = a10 & n6
        m5 = a10 & x6
        m6 = a11 & n6
        m7 = a11 & x6
        g0 = _leaf(K, 0, m0, m1, m2, m3, m4, m5, m6, m7)
        g1 = _leaf(K, 1, m0, m1, m2, m3, m4, m5, m6, m7)
        g2 = _leaf(K, 2, m0, m1, m2, m3, m4, m5, m6, m7)
        g3 = _leaf(K, 3, m0, m1, m2, m3, m4, m5, m6, m7)
        g4 = _leaf(K, 4, m0, m1, m2, m3, m4, m5, m6, m7)
        g5 = _leaf(K, 5, m0, m1, m2, m3, m4, m5, m6, m7)
        g6 = _leaf(K, 6, m0, m1, m2, m3, m4, m5, m6, m7)
        g7 = _leaf(K, 7, m0, m1, m2, m3, m4, m5, m6, m7)
        g8 = _leaf(K, 8, m0, m1, m2, m3, m4, m5, m6, m7)
        g9 = _leaf(K, 9, m0, m1, m2, m3, m4, m5, m6, m7)
        g10 = _leaf(K, 10, m0, m1, m2, m3, m4, m5, m6, m7)
        g11 = _leaf(K, 11, m0, m1, m2, m3, m4, m5, m6, m7)
        g12 = _leaf(K, 12, m0, m1, m2, m3, m4, m5, m6, m7)
        g13 = _leaf(K, 13, m0, m1, m2, m3, m4, m5, m6, m7)
        g14 = _leaf(K, 14, m0, m1, m2, m3, m4, m5, m6, m7)
        g15 = _leaf(K, 15, m0, m1, m2, m3, m4, m5, m6, m7)
        t0 = _sel(x3, g0, g1)
        t1 = _sel(x3, g2, g3)
        t2 = _sel(x3, g4, g5)
        t3 = _sel(x3, g6, g7)
        t4 = _sel(x3, g8, g9)
        t5 = _sel(x3, g10, g11)
        t6 = _sel(x3, g12, g13)
        t7 = _sel(x3, g14, g15)
        u0 = _sel(x2, t0, t1)
        u1 = _sel(x2, t2, t3)
        u2 = _sel(x2, t4, t5)
        u3 = _sel(x2, t6, t7)
        v0 = _sel(x1, u0, u1)
        v1 = _sel(x1, u2, u3)
        dst[p + 3 * W] = _sel(x0, v0, v1)


@njit(boundscheck=False, cache=True)
def _fill_pads(buf, n_cells, W):
    for w in range(W):
        for d in range(3):
            buf[d * W + w] = buf[(n_cells + d) * W + w]
            buf[(n_cells + 3 + d) * W + w] = buf[(3 + d) * W + w]


@njit(boundscheck=False, cache=True)
def _pad(cells, n_cells, W):
    buf = np.empty((n_cells + 6) * W, np.uint64)
    for i in range(n_cells):
        for w in range(W):
            buf[(i + 3) * W + w] = cells[i, w]
    _fill_pads(buf, n_cells, W)
    return buf


@njit(boundscheck=False, cache=True)
def step_words(K, cells, n_steps):
    """Advance a bit-sliced batch ``uint64[N, W]`` by ``n_steps`` updates."""
    n_cells, W = cells.shape
    a = _pad(cells, n_cells, W)
    b = np.empty_like(a)
    for _ in range(n_steps):
        step_padded(K, a, b, n_cells, W)
        _fill_pads(b, n_cells, W)
        a, b = b, a
    out = np.empty((n_cells, W), np.uint64)
    for i in range(n_cells):
        for w in range(W):
            out[i, w] = a[(i + 3) * W + w]
    return out


@njit(boundscheck=False, cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - ONE
        c += 1
    return c


@njit(boundscheck=False, cache=True)
def _load_lane(buf, sample, q, w, j, n_cells, W):
    # copy IC q from the sample into lane j of word w; returns its count of ones
    sw = q >> 6
    sb = np.uint64(q & 63)
    lb = np.uint64(j)
    clear = ~(ONE << lb)
    ones = 0
    for i in range(n_cells):
        bit = (sample[i, sw] >> sb) & ONE
        ones += bit
        p = (i + 3) * W + w
        buf[p] = (buf[p] & clear) | (bit << lb)
    return ones


@njit(boundscheck=False, cache=True)
def _ic_ones(sample, q, n_cells):
    sw = q >> 6
    sb = np.uint64(q & 63)
    ones = 0
    for i in range(n_cells):
        ones += (sample[i, sw] >> sb) & ONE
    return ones


@njit(boundscheck=False, nogil=True, cache=True)
def classify_sample(K, sample, n_ics, max_steps, n_active):
    """Classify every IC of a bit-sliced sample.

    ICs stream through ``n_active`` words of 64 lockstep lanes; a lane whose
    IC resolves is refilled from the pending queue, so long transients in one
    lane do not stall the others.

    Returns ``(outcome int8[n], ones int64[n], steps int32[n])`` where outcome
    is UNRESOLVED / ALL_ZEROS / ALL_ONES and steps is the step at which the
    IC was resolved (or gave up).
    """
    n_cells = sample.shape[0]
    outcome = np.zeros(n_ics, np.int8)
    ones = np.zeros(n_ics, np.int64)
    steps = np.zeros(n_ics, np.int32)

    # ICs uniform from the start are resolved at step 0
    pending = np.empty(n_ics, np.int64)
    n_pending = 0
    for q in range(n_ics):
        c = _ic_ones(sample, q, n_cells)
        ones[q] = c
        if c == 0:
            outcome[q] = ALL_ZEROS
        elif c == n_cells:
            outcome[q] = ALL_ONES
        else:
            pending[n_pending] = q
            n_pending += 1
    if n_pending == 0:
        return outcome, ones, steps

    W = min(n_active, (n_pending + 63) // 64)
    a = np.zeros((n_cells + 6) * W, np.uint64)
    b = np.zeros((n_cells + 6) * W, np.uint64)
    lane_ic = np.full((W, 64), -1, np.int64)
    lane_t0 = np.zeros((W, 64), np.int64)
    live = np.zeros(W, np.uint64)
    # earliest start among a word's live lanes
    oldest = np.zeros(W, np.int64)
    head = 0
    for w in range(W):
        for j in range(64):
            if head < n_pending:
                q = pending[head]
                head += 1
                _load_lane(a, sample, q, w, j, n_cells, W)
                lane_ic[w, j] = q
                live[w] |= ONE << np.uint64(j)
    _fill_pads(a, n_cells, W)

    t = 0
    n_live_words = W
    while n_live_words > 0:
        t += 1
        step_padded(K, a, b, n_cells, W)
        for w in range(W):
            lw = live[w]
            if lw == 0:
                continue
            conj = ALL
            disj = np.uint64(0)
            diff = np.uint64(0)
            for i in range(3, n_cells + 3):
                v = b[i * W + w]
                conj &= v
                disj |= v
                diff |= v ^ a[i * W + w]
            uni1 = conj & lw
            uni0 = ~disj & lw
            frozen = ~diff & lw & ~uni1 & ~uni0
            finished = uni1 | uni0 | frozen
            # lanes that exhausted their step budget
            if t - oldest[w] >= max_steps:
                for j in range(64):
                    bit = ONE << np.uint64(j)
                    if (lw & bit) and not (finished & bit) and t - lane_t0[w, j] >= max_steps:
                        finished |= bit
            if finished == 0:
                continue
            for j in range(64):
                bit = ONE << np.uint64(j)
                if not (finished & bit):
                    continue
                q = lane_ic[w, j]
                if uni1 & bit:
                    outcome[q] = ALL_ONES
                elif uni0 & bit:
                    outcome[q] = ALL_ZEROS
                steps[q] = t - lane_t0[w, j]
                if head < n_pending:
                    nq = pending[head]
                    head += 1
                    _load_lane(b, sample, nq, w, j, n_cells, W)
                    lane_ic[w, j] = nq
                    lane_t0[w, j] = t
                else:
                    lane_ic[w, j] = -1
                    lw &= ~bit
            live[w] = lw
            if lw == 0:
                n_live_words -= 1
            else:
                m = t
                for j in range(64):
                    if (lw >> np.uint64(j)) & ONE and lane_t0[w, j] < m:
                        m = lane_t0[w, j]
                oldest[w] = m
        _fill_pads(b, n_cells, W)
        a, b = b, a
        if head >= n_pending and 2 * n_live_words <= W and n_live_words > 0:
            # queue drained: drop idle words to shrink the working set
            keep = np.empty(n_live_words, np.int64)
            c = 0
            for w in range(W):
                if live[w] != 0:
                    keep[c] = w
                    c += 1
            nW = n_live_words
            na = np.zeros((n_cells + 6) * nW, np.uint64)
            for i in range(n_cells + 6):
                for c in range(nW):
                    na[i * nW + c] = a[i * W + keep[c]]
            lane_ic = lane_ic[keep].copy()
            lane_t0 = lane_t0[keep].copy()
            live = live[keep].copy()
            oldest = oldest[keep].copy()
            a = na
            b = np.zeros_like(na)
            W = nW
    return outcome, ones, steps
