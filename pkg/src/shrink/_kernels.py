"""Numba-compiled hot loops: the cone extraction scan and the range coder.

Everything in here is integer/float array work with no Python objects, so
the public modules wrap these kernels with validation and dataclasses.
All kernels are deterministic; the coder's output is bit-reproducible
across platforms (pure integer arithmetic).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

RC_TOP = 1 << 24
RC_MASK32 = 0xFFFFFFFF
RC_INCREMENT = 32
RC_MAX_TOTAL = 1 << 16
RC_MAX_ALPHABET = 1 << 23


# ---------------------------------------------------------------------------
# shrinking-cone extraction
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def extract_cones(values, eps_hat_per_point):
    """Greedy left-to-right shrinking-cone scan.

    Returns (starts, lengths, origins, span_lo, span_hi, eps_used, q).
    Arrays are preallocated at length n and valid up to q.  A cone keeps the
    threshold of the interval its origin fell in; single-point cones store a
    degenerate [0, 0] span.
    """
    n = values.shape[0]
    starts = np.empty(n, np.int64)
    lengths = np.empty(n, np.int64)
    origins = np.empty(n, np.float64)
    span_lo = np.empty(n, np.float64)
    span_hi = np.empty(n, np.float64)
    eps_used = np.empty(n, np.float64)
    q = 0

    s = 0
    eps = eps_hat_per_point[0]
    k0 = math.floor(values[0] / eps)
    origin = k0 * eps
    if origin > values[0]:
        origin = (k0 - 1) * eps
    lo = -np.inf
    hi = np.inf

    for t in range(1, n):
        dt = float(t - s)
        v = values[t]
        cand_lo = (v - eps - origin) / dt
        cand_hi = (v + eps - origin) / dt
        new_lo = lo if lo > cand_lo else cand_lo
        new_hi = hi if hi < cand_hi else cand_hi
        if new_lo > new_hi:
            # close the running cone, open a fresh one at t
            starts[q] = s
            lengths[q] = t - s
            origins[q] = origin
            if t - s == 1:
                span_lo[q] = 0.0
                span_hi[q] = 0.0
            else:
                span_lo[q] = lo
                span_hi[q] = hi
            eps_used[q] = eps
            q += 1
            s = t
            eps = eps_hat_per_point[t]
            k0 = math.floor(v / eps)
            origin = k0 * eps
            if origin > v:
                origin = (k0 - 1) * eps
            lo = -np.inf
            hi = np.inf
        else:
            lo = new_lo
            hi = new_hi

    starts[q] = s
    lengths[q] = n - s
    origins[q] = origin
    if n - s == 1:
        span_lo[q] = 0.0
        span_hi[q] = 0.0
    else:
        span_lo[q] = lo
        span_hi[q] = hi
    eps_used[q] = eps
    q += 1

    return starts, lengths, origins, span_lo, span_hi, eps_used, q


@njit(cache=True, nogil=True)
def candidate_line_residuals(values, starts, lens, origins, slopes):
    """values minus the per-run candidate-line prediction, in one pass."""
    out = np.empty(values.shape[0], np.float64)
    for i in range(starts.shape[0]):
        s = starts[i]
        origin = origins[i]
        slope = slopes[i]
        for t in range(lens[i]):
            out[s + t] = values[s + t] - (origin + slope * t)
    return out


@njit(cache=True, nogil=True)
def floor_quantize(r, r_min, eps_r):
    """symbol_i = floor((r_i - r_min) / eps_r), one pass, no temporaries."""
    out = np.empty(r.shape[0], np.int64)
    for i in range(r.shape[0]):
        out[i] = np.int64(math.floor((r[i] - r_min) / eps_r))
    return out


@njit(cache=True, nogil=True)
def reconstruct_from_runs(n, starts, lens, origins, slopes):
    """Candidate-line value at every index, in one pass."""
    out = np.empty(n, np.float64)
    for i in range(starts.shape[0]):
        s = starts[i]
        origin = origins[i]
        slope = slopes[i]
        for t in range(lens[i]):
            out[s + t] = origin + slope * t
    return out


# ---------------------------------------------------------------------------
# adaptive order-0 range coder
# ---------------------------------------------------------------------------
#
# Model: per-symbol counts starting at 1, +32 after each coded symbol,
# halved (rounding up, so counts stay >= 1) once the total exceeds
# max(2^16, 2*alphabet).  Cumulative counts live in a Fenwick tree.
#
# Coder: 32-bit range with byte-wise renormalization; carries are resolved
# through a cache byte plus a pending-0xFF counter, so `low` needs at most
# 33 bits.  The decoder preloads 4 bytes and renormalizes in lockstep with
# the encoder, reading exactly as many bytes as were written.

@njit(cache=True, nogil=True)
def _fenwick_build(freq):
    n = freq.shape[0]
    tree = np.zeros(n + 1, np.int64)
    for i in range(n):
        j = i + 1
        tree[j] += freq[i]
        parent = j + (j & (-j))
        if parent <= n:
            tree[parent] += tree[j]
    return tree

@njit(cache=True, nogil=True)
def _fenwick_add(tree, i, delta):
    i += 1
    n = tree.shape[0]
    while i < n:
        tree[i] += delta
        i += i & (-i)

@njit(cache=True, nogil=True)
def _fenwick_prefix(tree, i):
    s = 0
    while i > 0:
        s += tree[i]
        i -= i & (-i)
    return s

@njit(cache=True, nogil=True)
def _fenwick_locate(tree, target, top_bit):
    """Largest symbol whose cumulative count is <= target; also that count."""
    idx = 0
    acc = 0
    bit = top_bit
    n = tree.shape[0]
    while bit > 0:
        nxt = idx + bit
        if nxt < n and acc + tree[nxt] <= target:
            idx = nxt
            acc += tree[nxt]
        bit >>= 1
    return idx, acc

@njit(cache=True, nogil=True)
def _model_halve(freq, tree, alphabet):
    total = 0
    for i in range(alphabet):
        freq[i] = (freq[i] + 1) // 2
        total += freq[i]
    tree[:] = 0
    for i in range(alphabet):
        j = i + 1
        tree[j] += freq[i]
        parent = j + (j & (-j))
        if parent <= alphabet:
            tree[parent] += tree[j]
    return total

@njit(cache=True, nogil=True)
def rc_encode(symbols, alphabet):
    """Range-code `symbols` (all in [0, alphabet)); returns the payload bytes."""
    n = symbols.shape[0]
    out = np.empty(3 * n + 64, np.uint8)
    pos = 0

    freq = np.ones(alphabet, np.int64)
    tree = _fenwick_build(freq)
    top_bit = 1
    while top_bit * 2 <= alphabet:
        top_bit *= 2
    total = alphabet
    max_total = RC_MAX_TOTAL if RC_MAX_TOTAL > 2 * alphabet else 2 * alphabet

    low = np.int64(0)
    rng = np.int64(RC_MASK32)
    cache = np.int64(0)
    pending = 0
    first = True

    for k in range(n):
        s = symbols[k]
        cum = _fenwick_prefix(tree, s)
        r = rng // total
        low += r * cum
        rng = r * freq[s]
        while rng < RC_TOP:
            if (low & RC_MASK32) < 0xFF000000 or (low >> 32) != 0:
                carry = low >> 32
                if not first:
                    out[pos] = (cache + carry) & 0xFF
                    pos += 1
                while pending > 0:
                    out[pos] = (0xFF + carry) & 0xFF
                    pos += 1
                    pending -= 1
                cache = (low >> 24) & 0xFF
                first = False
            else:
                pending += 1
            low = (low << 8) & RC_MASK32
            rng <<= 8
        freq[s] += RC_INCREMENT
        _fenwick_add(tree, s, RC_INCREMENT)
        total += RC_INCREMENT
        if total > max_total:
            total = _model_halve(freq, tree, alphabet)

    for _ in range(5):
        if (low & RC_MASK32) < 0xFF000000 or (low >> 32) != 0:
            carry = low >> 32
            if not first:
                out[pos] = (cache + carry) & 0xFF
                pos += 1
            while pending > 0:
                out[pos] = (0xFF + carry) & 0xFF
                pos += 1
                pending -= 1
            cache = (low >> 24) & 0xFF
            first = False
        else:
            pending += 1
        low = (low << 8) & RC_MASK32

    return out[:pos].copy()

@njit(cache=True, nogil=True)
def rc_decode(data, count, alphabet):
    """Inverse of rc_encode.  Returns (symbols, bytes_read_past_end)."""
    res = np.empty(count, np.int64)

    freq = np.ones(alphabet, np.int64)
    tree = _fenwick_build(freq)
    top_bit = 1
    while top_bit * 2 <= alphabet:
        top_bit *= 2
    total = alphabet
    max_total = RC_MAX_TOTAL if RC_MAX_TOTAL > 2 * alphabet else 2 * alphabet

    size = data.shape[0]
    pos = 0
    overrun = 0
    code = np.int64(0)
    rng = np.int64(RC_MASK32)
    for _ in range(4):
        b = 0
        if pos < size:
            b = data[pos]
        else:
            overrun += 1
        pos += 1
        code = ((code << 8) | b) & RC_MASK32

    for k in range(count):
        r = rng // total
        v = code // r
        if v >= total:
            v = total - 1
        s, cum = _fenwick_locate(tree, v, top_bit)
        code -= r * cum
        rng = r * freq[s]
        while rng < RC_TOP:
            b = 0
            if pos < size:
                b = data[pos]
            else:
                overrun += 1
            pos += 1
            code = ((code << 8) | b) & RC_MASK32
            rng <<= 8
        res[k] = s
        freq[s] += RC_INCREMENT
        _fenwick_add(tree, s, RC_INCREMENT)
        total += RC_INCREMENT
        if total > max_total:
            total = _model_halve(freq, tree, alphabet)

    return res, overrun
