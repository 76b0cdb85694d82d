"""Compiled inner loops for parsing and token coding.

The trie is an open-addressing hash table keyed by ``(node, symbol)``, so
memory is proportional to the number of phrases whatever the alphabet size.
"""

import numba
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)

# decode status codes
OK = 0
TRUNCATED = 1
BAD_PHRASE_ID = 2
OVERRUN = 3
BAD_SYMBOL = 4


@numba.njit(cache=True)
def _table_bits(n):
    bits = 4
    while (1 << bits) < 2 * (n + 1):
        bits += 1
    return bits


@numba.njit(cache=True)
def parse(sym, asize):
    """LZ78 parse of an int64 symbol array over ``asize`` symbols.

    Returns (parents, symbols, ends, tail_id): per complete phrase ``t`` (index
    0 is the root) its prefix phrase, new symbol and end offset; ``tail_id`` is
    the phrase repeated by an incomplete final segment, or 0 if there is none.
    """
    n = sym.shape[0]
    bits = _table_bits(n)
    mask = (1 << bits) - 1
    shift = np.uint64(64 - bits)
    keys = np.full(mask + 1, -1, np.int64)
    vals = np.zeros(mask + 1, np.int64)
    parents = np.zeros(n + 1, np.int64)
    syms = np.full(n + 1, -1, np.int64)
    ends = np.zeros(n + 1, np.int64)
    count = 1
    node = 0
    for i in range(n):
        s = sym[i]
        key = node * asize + s
        slot = np.int64((np.uint64(key) * _GOLDEN) >> shift)
        while True:
            k = keys[slot]
            if k == key:
                node = vals[slot]
                break
            if k == -1:
                keys[slot] = key
                vals[slot] = count
                parents[count] = node
                syms[count] = s
                ends[count] = i + 1
                count += 1
                node = 0
                break
            slot = (slot + 1) & mask
    return parents[:count], syms[:count], ends[:count], node


@numba.njit(cache=True)
def phrase_counts(rows, asize):
    """Phrase count ``c`` of every row of a 2-D symbol array."""
    out = np.empty(rows.shape[0], np.int64)
    for i in range(rows.shape[0]):
        parents, _, _, tail = parse(rows[i], asize)
        out[i] = parents.shape[0] - 1 + (1 if tail else 0)
    return out


@numba.njit(cache=True)
def _ceil_log2(k):
    w = 0
    while (1 << w) < k:
        w += 1
    return w


@numba.njit(cache=True)
def encode(parents, syms, tail_id, sym_bits):
    complete = parents.shape[0] - 1
    nbits = 0
    for t in range(1, complete + 1):
        nbits += _ceil_log2(t) + sym_bits
    if tail_id:
        nbits += _ceil_log2(complete + 1)
    out = np.zeros((nbits + 7) // 8, np.uint8)
    acc = np.uint64(0)
    held = 0
    pos = 0
    for t in range(1, complete + 2):
        if t <= complete:
            width = _ceil_log2(t) + sym_bits
            value = (parents[t] << sym_bits) | syms[t]
        elif tail_id:
            width = _ceil_log2(complete + 1)
            value = tail_id
        else:
            break
        # widths stay below 56 bits, so the accumulator never overflows
        acc = (acc << np.uint64(width)) | np.uint64(value)
        held += width
        while held >= 8:
            held -= 8
            out[pos] = np.uint8((acc >> np.uint64(held)) & np.uint64(0xFF))
            pos += 1
        acc &= (np.uint64(1) << np.uint64(held)) - np.uint64(1)
    if held:
        out[pos] = np.uint8((acc << np.uint64(8 - held)) & np.uint64(0xFF))
    return out, nbits


@numba.njit(cache=True)
def _read(payload, pos, width):
    value = 0
    for j in range(pos, pos + width):
        value = (value << 1) | ((payload[j >> 3] >> (7 - (j & 7))) & 1)
    return value


@numba.njit(cache=True)
def decode(payload, n, asize):
    """Walk tokens until ``n`` symbols are produced.

    Returns (symbols, bits consumed, status, token index of a failure).
    """
    avail = payload.shape[0] * 8
    sym_bits = _ceil_log2(asize)
    out = np.zeros(n, np.int64)
    starts = np.zeros(n + 1, np.int64)
    lengths = np.zeros(n + 1, np.int64)
    filled = 0
    pos = 0
    t = 1
    while filled < n:
        width = _ceil_log2(t)
        if pos + width > avail:
            return out, pos, TRUNCATED, t
        idx = _read(payload, pos, width)
        pos += width
        if idx >= t:
            return out, pos, BAD_PHRASE_ID, t
        plen = lengths[idx]
        remaining = n - filled
        if idx and plen == remaining:
            src = starts[idx]
            for j in range(plen):
                out[filled + j] = out[src + j]
            filled += plen
            break
        if plen >= remaining:
            return out, pos, OVERRUN, t
        if pos + sym_bits > avail:
            return out, pos, TRUNCATED, t
        s = _read(payload, pos, sym_bits)
        pos += sym_bits
        if s >= asize:
            return out, pos, BAD_SYMBOL, t
        src = starts[idx]
        for j in range(plen):
            out[filled + j] = out[src + j]
        out[filled + plen] = s
        starts[t] = filled
        lengths[t] = plen + 1
        filled += plen + 1
        t += 1
    return out, pos, OK, t
