"""Bit-exact LZ78 coding and one-time-pad encryption of the coded stream.

Token ``t`` (``t = 1, 2, ...`` over complete phrases) is the prefix phrase id
in ``ceil(log2 t)`` bits followed by the new symbol in ``ceil(log2 |A|)``
bits.  An incomplete final phrase is sent as its phrase id alone, in
``ceil(log2 c)`` bits; the decoder recognises it because the phrase exactly
fills the symbols still owed according to ``n`` in the header.

File layout::

    b"LZ78" | version (1 byte) | n (4 bytes BE) | alphabet size (2 bytes BE) | payload

The payload is packed most-significant-bit first and zero-padded to a byte.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    AlphabetMismatchError,
    DecodeError,
    InputError,
    KeyExhaustedError,
    PhraseIdError,
    TrailingDataError,
    TruncatedPayloadError,
)
from . import _kernels
from .parsing import ParseResult, incremental_parse
from .sequence import Alphabet, Sequence

MAGIC = b"LZ78"
FORMAT_VERSION = 1
_HEADER = struct.Struct(">4sBIH")


def ceil_log2(k: int) -> int:
    return (k - 1).bit_length() if k > 1 else 0


@dataclass(frozen=True)
class BitStream:
    """Header fields plus a packed payload.

    ``nbits`` is the exact payload bit length; it is ``None`` for streams
    read from bytes, where only the token walk can tell it.
    """

    n: int
    alphabet_size: int
    payload: bytes = b""
    nbits: int | None = None
    version: int = FORMAT_VERSION

    def to_bytes(self) -> bytes:
        return _HEADER.pack(MAGIC, self.version, self.n, self.alphabet_size) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> BitStream:
        if len(data) < _HEADER.size:
            raise TruncatedPayloadError("stream shorter than the header")
        magic, version, n, asize = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise DecodeError(f"bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise DecodeError(f"unsupported format version {version}")
        if asize < 1:
            raise DecodeError("alphabet size 0 in header")
        return cls(n, asize, bytes(data[_HEADER.size:]), None, version)


def _unpack(payload: bytes) -> str:
    if not payload:
        return ""
    return format(int.from_bytes(payload, "big"), f"0{8 * len(payload)}b")


def _lengths_from_parse(parse: ParseResult, alphabet_size: int) -> int:
    sb = ceil_log2(alphabet_size)
    complete = parse.complete_count
    # sum of ceil(log2 t) over t = 1..complete; t in (2^(w-1), 2^w] costs w bits
    total = complete * sb
    w = 1
    while (1 << (w - 1)) < complete:
        total += w * (min(1 << w, complete) - (1 << (w - 1)))
        w += 1
    if parse.last_incomplete:
        total += ceil_log2(parse.c)
    return total


def code_length(x: Sequence) -> int:
    """Payload bits that :func:`lz78_encode` emits for ``x``."""
    return _lengths_from_parse(incremental_parse(x), x.alphabet.size)


def lz78_encode(x: Sequence) -> BitStream:
    asize = x.alphabet.size
    if asize > 0xFFFF:
        raise InputError("alphabet too large for the 2-byte header field")
    parse = incremental_parse(x)
    payload, nbits = _kernels.encode(
        parse.node_parents, parse.node_symbols, parse.tail_id, ceil_log2(asize)
    )
    return BitStream(len(x), asize, payload.tobytes(), int(nbits))


_DECODE_ERRORS = {
    _kernels.TRUNCATED: (TruncatedPayloadError, "payload ends inside token {}"),
    _kernels.BAD_PHRASE_ID: (PhraseIdError, "phrase id out of range at token {}"),
    _kernels.OVERRUN: (DecodeError, "phrase at token {} overruns the declared length"),
    _kernels.BAD_SYMBOL: (DecodeError, "symbol outside the alphabet at token {}"),
}


def _walk(b: BitStream, payload: bytes | None = None) -> tuple[np.ndarray, int]:
    """Decode tokens from ``payload`` (default ``b.payload``); return symbols and bits used."""
    raw = np.frombuffer(b.payload if payload is None else payload, np.uint8)
    out, pos, status, token = _kernels.decode(raw, b.n, b.alphabet_size)
    if status != _kernels.OK:
        exc, msg = _DECODE_ERRORS[status]
        raise exc(msg.format(token))
    return out, int(pos)


def _check_padding(payload: bytes, nbits: int) -> None:
    if len(payload) != (nbits + 7) // 8:
        raise TrailingDataError(f"{len(payload)} payload bytes for {nbits} bits")
    pad = 8 * len(payload) - nbits
    if pad and payload[-1] & ((1 << pad) - 1):
        raise TrailingDataError("nonzero padding bits")


def lz78_decode(b: BitStream, alphabet: Alphabet) -> Sequence:
    if alphabet.size != b.alphabet_size:
        raise AlphabetMismatchError(
            f"stream alphabet size {b.alphabet_size}, given {alphabet.size}"
        )
    symbols, nbits = _walk(b)
    _check_padding(b.payload, nbits)
    return Sequence(alphabet, tuple(symbols.tolist()))


class KeyStream:
    """A supply of key bits, finite (from bytes) or unbounded (seeded generator)."""

    def __init__(self, data: bytes | None = None, *, seed: int | None = None):
        if (data is None) == (seed is None):
            raise InputError("give exactly one of key bytes or a seed")
        self._buffer = _unpack(data) if data is not None else ""
        self._rng = random.Random(seed) if seed is not None else None
        self._offset = 0
        self.consumed = 0

    @classmethod
    def from_seed(cls, seed: int) -> KeyStream:
        return cls(seed=seed)

    @classmethod
    def zeros(cls, nbits: int) -> KeyStream:
        return cls(bytes(-(-nbits // 8)))

    def _ensure(self, k: int) -> None:
        short = self._offset + k - len(self._buffer)
        if short <= 0:
            return
        if self._rng is None:
            raise KeyExhaustedError(
                f"key needs {k} more bits, {len(self._buffer) - self._offset} left"
            )
        chunk = max(short, 1 << 16)
        self._buffer = self._buffer[self._offset:] + format(
            self._rng.getrandbits(chunk), f"0{chunk}b"
        )
        self._offset = 0

    def peek(self, k: int) -> str:
        """Up to ``k`` upcoming key bits, without consuming them."""
        if self._rng is not None:
            self._ensure(k)
        return self._buffer[self._offset:self._offset + k]

    def take(self, k: int) -> str:
        """Next ``k`` key bits as a ``'0'``/``'1'`` string."""
        self._ensure(k)
        out = self._buffer[self._offset:self._offset + k]
        self._offset += k
        self.consumed += k
        return out


def _payload_bits(b: BitStream) -> int:
    if b.nbits is not None:
        return b.nbits
    _, nbits = _walk(b)
    _check_padding(b.payload, nbits)
    return nbits


def _xor(payload: bytes, key_bits: str) -> bytes:
    if not key_bits:
        return payload
    pad = 8 * len(payload) - len(key_bits)
    mask = int(key_bits, 2) << pad
    return (int.from_bytes(payload, "big") ^ mask).to_bytes(len(payload), "big")


def otp_apply(b: BitStream, key: KeyStream) -> BitStream:
    """XOR the payload bits with the next key bits; the header is untouched.

    Applying twice with the same key material restores ``b``.  A stream read
    from bytes (``nbits`` unknown) is taken to be plaintext and its length is
    recovered by a token walk; use :func:`otp_decrypt` for ciphertext.
    """
    nbits = _payload_bits(b)
    return replace(b, payload=_xor(b.payload, key.take(nbits)), nbits=nbits)


def otp_decrypt(cipher: BitStream, key: KeyStream) -> BitStream:
    """Decrypt a ciphertext read from bytes, whose bit length is not stored.

    The whole padded payload is unmasked with peeked key bits, the token walk
    finds the true length, and only that many key bits are consumed.
    """
    if cipher.nbits is not None:
        return otp_apply(cipher, key)
    peek = key.peek(8 * len(cipher.payload))
    try:
        _, nbits = _walk(cipher, _xor(cipher.payload, peek))
    except DecodeError:
        if len(peek) < 8 * len(cipher.payload):
            raise KeyExhaustedError("key ran out before the ciphertext did") from None
        raise
    if nbits > len(peek):
        raise KeyExhaustedError(f"ciphertext needs {nbits} key bits, {len(peek)} left")
    _check_padding(cipher.payload, nbits)
    return replace(cipher, payload=_xor(cipher.payload, key.take(nbits)), nbits=nbits)
