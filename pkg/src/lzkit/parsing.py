"""Incremental (LZ78) parsing, cross-parsing and joint parsing.

Every quantity here is built from phrase counts: the self-parse count ``c``
behind the LZ complexity, the cross-parse count ``c(x <- y)`` behind the LZ
divergence, and the y-phrase multiplicities behind the conditional metric
used by the universal channel decoder.  Logarithms are base 2 throughout.
"""

from __future__ import annotations

import math
from collections.abc import Sequence as _Seq
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import EmptySequenceError, LengthMismatchError
from .sequence import Alphabet, Sequence, require_same_alphabet

__all__ = [
    "ParseTrie",
    "ParseResult",
    "CrossParseResult",
    "JointParseResult",
    "SubstringIndex",
    "incremental_parse",
    "lz_complexity",
    "complexity_from_count",
    "cross_parse",
    "joint_parse",
    "conditional_metric",
]


def clog2c(c: int) -> float:
    """``c * log2(c)`` with the convention ``0 log 0 = 0``."""
    return c * math.log2(c) if c > 1 else 0.0


@dataclass(frozen=True)
class ParseTrie:
    """Phrase trie rebuilt from a parse.

    Node ``i`` spells phrase ``i`` (the root, 0, spells the empty string).
    ``visits[i]`` counts how many times the parser stepped into node ``i``.
    """

    children: tuple[dict[int, int], ...]
    parents: tuple[int, ...]
    symbols: tuple[int, ...]
    visits: tuple[int, ...]

    def spell(self, node: int) -> tuple[int, ...]:
        out = []
        while node:
            out.append(self.symbols[node])
            node = self.parents[node]
        return tuple(reversed(out))

    def __len__(self) -> int:
        return len(self.parents)


@dataclass(frozen=True, eq=False)
class ParseResult:
    """The LZ78 phrase decomposition of a sequence.

    Complete phrase ``t`` (``t >= 1``, in creation order) is phrase
    ``node_parents[t]`` extended by ``node_symbols[t]`` and ends at offset
    ``node_ends[t]``; index 0 is the empty root phrase.  A nonzero
    ``tail_id`` means the input ran out inside the trie and the final
    segment repeats phrase ``tail_id``.
    """

    n: int
    node_parents: np.ndarray
    node_symbols: np.ndarray
    node_ends: np.ndarray
    tail_id: int = 0

    @property
    def last_incomplete(self) -> bool:
        return self.tail_id != 0

    @property
    def complete_count(self) -> int:
        return len(self.node_parents) - 1

    @property
    def c(self) -> int:
        return self.complete_count + (self.tail_id != 0)

    @property
    def phrase_ids(self) -> tuple[int, ...]:
        ids = tuple(range(1, self.complete_count + 1))
        return ids + (self.tail_id,) if self.tail_id else ids

    @property
    def boundaries(self) -> tuple[tuple[int, int], ...]:
        ends = self.node_ends[1:].tolist()
        if self.tail_id:
            ends.append(self.n)
        return tuple(zip([0] + ends[:-1], ends))

    @property
    def prefix_links(self) -> tuple[int, ...]:
        return tuple(int(self.node_parents[p]) for p in self.phrase_ids)

    @property
    def new_symbols(self) -> tuple[int, ...]:
        return tuple(int(self.node_symbols[p]) for p in self.phrase_ids)

    def phrases(self, x: Sequence | _Seq[int]) -> list[tuple[int, ...]]:
        symbols = x.symbols if isinstance(x, Sequence) else x
        return [tuple(symbols[a:b]) for a, b in self.boundaries]

    def rebuild(self) -> tuple[int, ...]:
        """Reconstruct the parsed sequence from the (prefix, symbol) records alone."""
        spelled: list[tuple[int, ...]] = [()]
        for parent, sym in zip(self.node_parents[1:].tolist(), self.node_symbols[1:].tolist()):
            spelled.append(spelled[parent] + (sym,))
        out: list[int] = []
        for p in self.phrase_ids:
            out.extend(spelled[p])
        return tuple(out)

    def trie(self) -> ParseTrie:
        parents = tuple(self.node_parents.tolist())
        symbols = tuple(self.node_symbols.tolist())
        size = len(parents)
        children: list[dict[int, int]] = [{} for _ in range(size)]
        for node in range(1, size):
            children[parents[node]][symbols[node]] = node
        # each complete phrase enters every node on its root path once
        visits = [1] * size
        visits[0] = 0
        for node in range(size - 1, 0, -1):
            if parents[node]:
                visits[parents[node]] += visits[node]
        node = self.tail_id
        while node:
            visits[node] += 1
            node = parents[node]
        return ParseTrie(tuple(children), parents, symbols, tuple(visits))


def _parse_array(symbols: np.ndarray, alphabet_size: int) -> ParseResult:
    parents, syms, ends, tail = _kernels.parse(symbols, alphabet_size)
    return ParseResult(len(symbols), parents, syms, ends, int(tail))


def incremental_parse(x: Sequence) -> ParseResult:
    """Parse ``x`` into the shortest phrases not seen before as phrases.

    The final phrase may repeat an earlier one when the input runs out; it
    is still counted in ``c``.
    """
    return _parse_array(x.array, x.alphabet.size)


def complexity_from_count(c: int, n: int) -> float:
    if n < 1:
        raise EmptySequenceError("LZ complexity needs a nonempty sequence")
    return clog2c(c) / n


def lz_complexity(x: Sequence) -> float:
    """``c log2 c / n`` in bits per symbol."""
    if len(x) == 0:
        raise EmptySequenceError("LZ complexity needs a nonempty sequence")
    return complexity_from_count(incremental_parse(x).c, len(x))


class SubstringIndex:
    """Suffix automaton of a reference sequence.

    Accepts exactly the contiguous substrings of the reference, so the
    longest prefix of a query that occurs anywhere in the reference is found
    by walking transitions until one is missing.
    """

    def __init__(self, reference: _Seq[int]):
        nexts: list[dict[int, int]] = [{}]
        link = [-1]
        length = [0]
        last = 0
        for s in reference:
            cur = len(length)
            nexts.append({})
            link.append(0)
            length.append(length[last] + 1)
            p = last
            while p != -1 and s not in nexts[p]:
                nexts[p][s] = cur
                p = link[p]
            if p != -1:
                q = nexts[p][s]
                if length[q] == length[p] + 1:
                    link[cur] = q
                else:
                    clone = len(length)
                    nexts.append(dict(nexts[q]))
                    link.append(link[q])
                    length.append(length[p] + 1)
                    while p != -1 and nexts[p].get(s) == q:
                        nexts[p][s] = clone
                        p = link[p]
                    link[q] = clone
                    link[cur] = clone
            last = cur
        self._next = nexts
        self.reference_length = length[last]

    def match_length(self, query: _Seq[int], start: int = 0) -> int:
        """Length of the longest prefix of ``query[start:]`` occurring in the reference."""
        nexts = self._next
        state = 0
        j = start
        n = len(query)
        while j < n:
            state = nexts[state].get(query[j], -1)
            if state < 0:
                break
            j += 1
        return j - start

    def __contains__(self, query) -> bool:
        return self.match_length(query) == len(query)


@dataclass(frozen=True)
class CrossParseResult:
    boundaries: tuple[tuple[int, int], ...]

    @property
    def count(self) -> int:
        return len(self.boundaries)

    def phrases(self, x: Sequence | _Seq[int]) -> list[tuple[int, ...]]:
        symbols = x.symbols if isinstance(x, Sequence) else x
        return [tuple(symbols[a:b]) for a, b in self.boundaries]


def cross_parse(
    x: Sequence, y: Sequence, index: SubstringIndex | None = None
) -> CrossParseResult:
    """Greedily strip from ``x`` the longest prefix that occurs anywhere in ``y``.

    A symbol of ``x`` that never occurs in ``y`` becomes a one-symbol phrase.
    Pass a prebuilt ``index`` of ``y`` to reuse it across many queries.
    """
    require_same_alphabet(x, y)
    if len(y) == 0:
        raise EmptySequenceError("cross-parse reference y is empty")
    if index is None:
        index = SubstringIndex(y.symbols)
    xs = x.symbols
    n = len(xs)
    bounds = []
    start = 0
    while start < n:
        step = index.match_length(xs, start) or 1
        bounds.append((start, start + step))
        start += step
    return CrossParseResult(tuple(bounds))


@dataclass(frozen=True)
class JointParseResult:
    joint_boundaries: tuple[tuple[int, int], ...]
    distinct_y_phrases: tuple[tuple[int, ...], ...]
    c_l: tuple[int, ...]

    @property
    def c_y(self) -> int:
        return len(self.distinct_y_phrases)

    @property
    def c_joint(self) -> int:
        return len(self.joint_boundaries)


def _joint_core(xs: _Seq[int], ys: _Seq[int], ysize: int):
    """Parse the pair sequence; return boundaries and a y-string id per phrase.

    A second trie over the y-sides assigns one id per distinct y-string, so
    phrases are grouped without materialising them.
    """
    children: list[dict[int, int]] = [{}]
    ychildren: list[dict[int, int]] = [{}]
    bounds: list[tuple[int, int]] = []
    yids: list[int] = []
    node = ynode = 0
    start = 0
    for i in range(len(xs)):
        yv = ys[i]
        ykids = ychildren[ynode]
        ynext = ykids.get(yv)
        if ynext is None:
            ynext = len(ychildren)
            ykids[yv] = ynext
            ychildren.append({})
        ynode = ynext
        key = xs[i] * ysize + yv
        kids = children[node]
        nxt = kids.get(key)
        if nxt is None:
            kids[key] = len(children)
            children.append({})
            bounds.append((start, i + 1))
            yids.append(ynode)
            start = i + 1
            node = ynode = 0
        else:
            node = nxt
    if start < len(xs):
        bounds.append((start, len(xs)))
        yids.append(ynode)
    return bounds, yids


def _check_pair(x: Sequence, y: Sequence) -> None:
    if len(x) != len(y):
        raise LengthMismatchError(f"lengths differ: {len(x)} vs {len(y)}")
    if len(x) == 0:
        raise EmptySequenceError("joint parsing needs nonempty sequences")


def joint_parse(x: Sequence, y: Sequence) -> JointParseResult:
    """Incrementally parse the aligned pairs ``(x_i, y_i)`` over the product alphabet.

    Distinct y-side phrases are listed in order of first appearance, with
    ``c_l[l]`` the number of joint phrases whose y-side is the ``l``-th one.
    """
    _check_pair(x, y)
    bounds, yids = _joint_core(x.symbols, y.symbols, y.alphabet.size)
    counts: dict[int, int] = {}
    first: dict[int, tuple[int, int]] = {}
    for b, yid in zip(bounds, yids):
        counts[yid] = counts.get(yid, 0) + 1
        first.setdefault(yid, b)
    ys = y.symbols
    distinct = tuple(tuple(ys[a:b]) for a, b in first.values())
    return JointParseResult(tuple(bounds), distinct, tuple(counts.values()))


def _metric_raw(xs: _Seq[int], ys: _Seq[int], ysize: int) -> float:
    _, yids = _joint_core(xs, ys, ysize)
    counts: dict[int, int] = {}
    for yid in yids:
        counts[yid] = counts.get(yid, 0) + 1
    return math.fsum(clog2c(c) for c in counts.values())


def conditional_metric(x: Sequence, y: Sequence) -> float:
    """``u(x|y) = sum_l c_l log2 c_l`` over the y-phrase multiplicities of the joint parse."""
    _check_pair(x, y)
    return _metric_raw(x.symbols, y.symbols, y.alphabet.size)


def pair_sequence(x: Sequence, y: Sequence) -> Sequence:
    """The aligned pair sequence over the product alphabet, pair ``(a, b)`` -> ``a*|B| + b``."""
    _check_pair(x, y)
    ysize = y.alphabet.size
    return Sequence(
        Alphabet(x.alphabet.size * ysize),
        tuple(a * ysize + b for a, b in zip(x.symbols, y.symbols)),
    )
