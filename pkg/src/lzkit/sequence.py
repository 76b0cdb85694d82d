"""Finite alphabets and symbol sequences, the input object of every algorithm."""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

import numpy as np

from .errors import AlphabetMismatchError, InputError

MAX_LENGTH = 2**32 - 1
MAX_ALPHABET = 2**31


@dataclass(frozen=True)
class Alphabet:
    """Symbols are the integers ``0 .. size-1``.

    ``byte_map[i]`` is the byte that symbol ``i`` is read from and written to
    when sequences cross a file boundary.
    """

    size: int
    byte_map: bytes | None = None

    def __post_init__(self):
        if not 1 <= self.size <= MAX_ALPHABET:
            raise InputError(f"alphabet size must be in [1, 2**31], got {self.size}")
        if self.byte_map is not None:
            if len(self.byte_map) != self.size or len(set(self.byte_map)) != self.size:
                raise InputError("byte_map must be injective and cover exactly `size` bytes")

    @classmethod
    def binary(cls) -> Alphabet:
        return cls(2, b"01")

    @classmethod
    def raw_bytes(cls) -> Alphabet:
        return cls(256, bytes(range(256)))

    @classmethod
    def from_symbols(cls, symbols: str | bytes) -> Alphabet:
        if isinstance(symbols, str):
            symbols = symbols.encode("latin-1")
        return cls(len(symbols), bytes(symbols))

    @classmethod
    def infer(cls, *data: bytes) -> Alphabet:
        """Alphabet of the bytes present in ``data``, in ascending byte order."""
        present = sorted(set().union(*(set(d) for d in data)))
        if not present:
            present = [0]
        return cls(len(present), bytes(present))

    def encoder(self) -> dict[int, int]:
        if self.byte_map is None:
            raise InputError("alphabet has no byte mapping")
        return {b: i for i, b in enumerate(self.byte_map)}

    def is_compatible(self, other: Alphabet) -> bool:
        return self.size == other.size


@dataclass(frozen=True)
class Sequence:
    alphabet: Alphabet
    symbols: tuple[int, ...] = field(default=())
    _array: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        syms = self.symbols
        if not isinstance(syms, tuple):
            syms = tuple(int(s) for s in syms)
            object.__setattr__(self, "symbols", syms)
        if len(syms) > MAX_LENGTH:
            raise InputError(f"sequence longer than {MAX_LENGTH} symbols")
        if syms and (min(syms) < 0 or max(syms) >= self.alphabet.size):
            raise InputError(f"symbol outside alphabet of size {self.alphabet.size}")

    @classmethod
    def from_bytes(cls, data: bytes, alphabet: Alphabet | None = None) -> Sequence:
        if alphabet is None:
            alphabet = Alphabet.infer(data)
        enc = alphabet.encoder()
        try:
            symbols = tuple(enc[b] for b in data)
        except KeyError as exc:
            raise InputError(f"byte {exc.args[0]!r} is not in the alphabet") from None
        return cls(alphabet, symbols)

    @classmethod
    def from_text(cls, text: str, alphabet: Alphabet | str | None = None) -> Sequence:
        if isinstance(alphabet, str):
            alphabet = Alphabet.from_symbols(alphabet)
        return cls.from_bytes(text.encode("latin-1"), alphabet)

    @classmethod
    def binary(cls, bits: str | Iterable[int]) -> Sequence:
        if isinstance(bits, str):
            return cls.from_text(bits, Alphabet.binary())
        return cls(Alphabet.binary(), tuple(bits))

    @property
    def array(self) -> np.ndarray:
        """The symbols as a read-only int64 array (built once)."""
        if self._array is None:
            arr = np.fromiter(self.symbols, np.int64, len(self.symbols))
            arr.flags.writeable = False
            object.__setattr__(self, "_array", arr)
        return self._array

    def to_bytes(self) -> bytes:
        if self.alphabet.byte_map is None:
            raise InputError("alphabet has no byte mapping")
        return bytes(self.alphabet.byte_map[s] for s in self.symbols)

    def to_text(self) -> str:
        return self.to_bytes().decode("latin-1")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[int]:
        return iter(self.symbols)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Sequence(self.alphabet, self.symbols[item])
        return self.symbols[item]


def require_same_alphabet(x: Sequence, y: Sequence) -> None:
    if not x.alphabet.is_compatible(y.alphabet):
        raise AlphabetMismatchError(
            f"alphabet sizes differ: {x.alphabet.size} vs {y.alphabet.size}"
        )
