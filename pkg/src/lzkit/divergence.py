"""LZ divergence between individual sequences and nearest-divergence classification."""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field

from .errors import EmptySequenceError, InputError
from .parsing import (
    SubstringIndex,
    clog2c,
    cross_parse,
    incremental_parse,
)
from .sequence import Sequence, require_same_alphabet


def _divergence(x: Sequence, y: Sequence, index: SubstringIndex | None) -> float:
    n = len(x)
    if n == 0 or len(y) == 0:
        raise EmptySequenceError("divergence needs nonempty sequences")
    cross = cross_parse(x, y, index).count
    c = incremental_parse(x).c
    return (cross * math.log2(n) - clog2c(c)) / n


def lz_divergence(x: Sequence, y: Sequence) -> float:
    """``(c(x <- y) log n - c(x) log c(x)) / n`` with ``n = len(x)``.

    Not clamped and not symmetric; small or negative values mean ``x`` is
    cheaply described by substrings of ``y``.
    """
    require_same_alphabet(x, y)
    return _divergence(x, y, None)


@dataclass
class LabeledCorpus:
    """Training sequences by label; suffix indexes are built on first use."""

    classes: list[tuple[str, Sequence]]
    _indexes: list[SubstringIndex] | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        labels = [label for label, _ in self.classes]
        if len(set(labels)) != len(labels):
            raise InputError("corpus labels must be unique")
        for label, seq in self.classes:
            if len(seq) == 0:
                raise EmptySequenceError(f"training sequence for {label!r} is empty")
        for _, seq in self.classes[1:]:
            require_same_alphabet(self.classes[0][1], seq)

    @classmethod
    def from_segments(cls, classes: Iterable[tuple[str, Iterable[Sequence]]]) -> LabeledCorpus:
        """Concatenate several training sequences per label, with no separator."""
        merged = []
        for label, parts in classes:
            parts = list(parts)
            if not parts:
                raise EmptySequenceError(f"no training data for {label!r}")
            symbols: tuple[int, ...] = ()
            for part in parts:
                require_same_alphabet(parts[0], part)
                symbols += part.symbols
            merged.append((label, Sequence(parts[0].alphabet, symbols)))
        return cls(merged)

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.classes]

    def indexes(self) -> list[SubstringIndex]:
        if self._indexes is None:
            self._indexes = [SubstringIndex(seq.symbols) for _, seq in self.classes]
        return self._indexes

    def __len__(self) -> int:
        return len(self.classes)


def classify(x: Sequence, corpus: LabeledCorpus) -> tuple[str, dict[str, float]]:
    """Label whose training sequence minimises ``Δ(x || training)``.

    Ties go to the earlier class in corpus order.  All scores are returned.
    """
    if len(corpus) == 0:
        raise InputError("corpus is empty")
    scores: dict[str, float] = {}
    best = None
    for (label, train), index in zip(corpus.classes, corpus.indexes()):
        require_same_alphabet(x, train)
        score = _divergence(x, train, index)
        scores[label] = score
        if best is None or score < scores[best]:
            best = label
    return best, scores
