"""Unifilar finite-state channels, random codebooks and two decoders.

The channel state moves deterministically, ``z' = q(x, y, z)``, while the
output is drawn from ``P(y | x, z)``.  Maximum likelihood decoding needs the
channel law; the universal decoder only needs the codebook and the received
word, and picks the codeword with the smallest conditional LZ metric.

Channel file format (TOML)::

    states = 2              # number of states s
    initial_state = 0
    input_alphabet = 2      # |X|
    output_alphabet = 2     # |Y|

    [[state]]               # one table per state, in state order
    emission = [[0.9, 0.1], [0.1, 0.9]]   # emission[x][y] = P(y | x, z)
    next_state = [[0, 1], [0, 1]]         # next_state[x][y] = q(x, y, z)

    [[state]]
    emission = [[1.0, 0.0], [0.0, 1.0]]
    next_state = [[0, 1], [0, 1]]

Rows of ``emission`` must sum to 1 within 1e-9 and are then renormalised.
"""

from __future__ import annotations

import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import limits
from .errors import AlphabetMismatchError, GuardrailError, InputError, LengthMismatchError
from .parsing import _metric_raw
from .sequence import Alphabet, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ROW_TOLERANCE = 1e-9


def _alphabet(size: int) -> Alphabet:
    return Alphabet.binary() if size == 2 else Alphabet(size)


@dataclass(frozen=True, eq=False)
class FsChannel:
    emission: np.ndarray  # (s, |X|, |Y|)
    next_state: np.ndarray  # (s, |X|, |Y|)
    initial_state: int = 0

    def __post_init__(self):
        emission = np.array(self.emission, dtype=np.float64)
        nxt = np.array(self.next_state, dtype=np.int64)
        if emission.ndim != 3 or nxt.shape != emission.shape:
            raise InputError(
                f"emission {emission.shape} and next_state {nxt.shape} must both be (s, |X|, |Y|)"
            )
        s = emission.shape[0]
        if not 0 <= self.initial_state < s:
            raise InputError(f"initial state {self.initial_state} outside 0..{s - 1}")
        if nxt.min() < 0 or nxt.max() >= s:
            raise InputError("next_state entries must be valid state indices")
        if emission.min() < 0:
            raise InputError("emission probabilities must be nonnegative")
        sums = emission.sum(axis=2)
        if np.abs(sums - 1.0).max() > ROW_TOLERANCE:
            raise InputError("every emission row must sum to 1 within 1e-9")
        emission = emission / sums[:, :, None]
        emission.flags.writeable = False
        nxt.flags.writeable = False
        object.__setattr__(self, "emission", emission)
        object.__setattr__(self, "next_state", nxt)

    @property
    def num_states(self) -> int:
        return self.emission.shape[0]

    @property
    def input_size(self) -> int:
        return self.emission.shape[1]

    @property
    def output_size(self) -> int:
        return self.emission.shape[2]

    @classmethod
    def bsc(cls, p: float) -> FsChannel:
        """Binary symmetric channel with crossover ``p`` as a one-state channel."""
        return cls([[[1 - p, p], [p, 1 - p]]], np.zeros((1, 2, 2), np.int64))

    @classmethod
    def noiseless(cls, size: int = 2) -> FsChannel:
        return cls(np.eye(size)[None], np.zeros((1, size, size), np.int64))

    @classmethod
    def from_dict(cls, spec: dict) -> FsChannel:
        try:
            states = spec["state"]
            s = int(spec.get("states", len(states)))
            if len(states) != s:
                raise InputError(f"'states' = {s} but {len(states)} [[state]] tables given")
            emission = [st["emission"] for st in states]
            nxt = [st["next_state"] for st in states]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed channel spec: {exc}") from None
        ch = cls(emission, nxt, int(spec.get("initial_state", 0)))
        for key, size in (("input_alphabet", ch.input_size), ("output_alphabet", ch.output_size)):
            if key in spec and int(spec[key]) != size:
                raise InputError(f"{key} = {spec[key]} disagrees with table shape {size}")
        return ch

    @classmethod
    def from_toml(cls, path: str | os.PathLike) -> FsChannel:
        with open(path, "rb") as fh:
            try:
                spec = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise InputError(f"{path}: {exc}") from None
        return cls.from_dict(spec)

    def to_dict(self) -> dict:
        return {
            "states": self.num_states,
            "initial_state": self.initial_state,
            "input_alphabet": self.input_size,
            "output_alphabet": self.output_size,
            "state": [
                {"emission": self.emission[z].tolist(), "next_state": self.next_state[z].tolist()}
                for z in range(self.num_states)
            ],
        }


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _transmit_array(ch: FsChannel, xs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(len(xs))
    cum = np.cumsum(ch.emission, axis=2)
    last = ch.output_size - 1
    if ch.num_states == 1:
        rows = cum[0, xs]
        ys = (u[:, None] >= rows).sum(axis=1)
        return np.minimum(ys, last)
    ys = np.empty(len(xs), np.int64)
    z = ch.initial_state
    for i, (x, ui) in enumerate(zip(xs.tolist(), u.tolist())):
        y = min(int(np.searchsorted(cum[z, x], ui, side="right")), last)
        ys[i] = y
        z = ch.next_state[z, x, y]
    return ys


def transmit(ch: FsChannel, x: Sequence, seed=None) -> Sequence:
    """Send ``x`` through the channel; the same seed gives the same output."""
    if x.alphabet.size != ch.input_size:
        raise AlphabetMismatchError(
            f"channel input alphabet {ch.input_size}, sequence alphabet {x.alphabet.size}"
        )
    ys = _transmit_array(ch, x.array, _rng(seed))
    return Sequence(_alphabet(ch.output_size), tuple(ys.tolist()))


def _loglik_rows(ch: FsChannel, words: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Log-likelihood of ``ys`` under each row of ``words``.

    Occurrences are tallied per distinct probability value and combined in a
    fixed order, so codewords with the same tallies tie exactly.
    """
    m, n = words.shape
    s, nx, ny = ch.emission.shape
    counts = np.zeros((m, s * nx * ny), np.int64)
    rows = np.arange(m)
    z = np.full(m, ch.initial_state, np.int64)
    for i in range(n):
        xi = words[:, i]
        counts[rows, (z * nx + xi) * ny + ys[i]] += 1
        z = ch.next_state[z, xi, ys[i]]
    values, group = np.unique(ch.emission.ravel(), return_inverse=True)
    onehot = np.zeros((len(group), len(values)), np.int64)
    onehot[np.arange(len(group)), group] = 1
    tallies = counts @ onehot
    ll = np.zeros(m)
    for v, value in enumerate(values.tolist()):
        if value > 0:
            ll += tallies[:, v] * math.log2(value)
        else:
            ll[tallies[:, v] > 0] = -np.inf
    return ll


def log_likelihood(ch: FsChannel, x: Sequence, y: Sequence) -> float:
    """``sum_i log2 P(y_i | x_i, z_i)``; ``-inf`` for an impossible pair."""
    if len(x) != len(y):
        raise LengthMismatchError(f"lengths differ: {len(x)} vs {len(y)}")
    return float(_loglik_rows(ch, x.array[None, :], y.array)[0])


@dataclass(frozen=True, eq=False)
class Codebook:
    words: np.ndarray  # (M, n)
    input_size: int = 2
    seed: int | None = None

    def __post_init__(self):
        words = np.asarray(self.words, dtype=np.int64)
        if words.ndim != 2 or words.shape[0] < 2:
            raise InputError("a codebook needs at least two codewords of equal length")
        object.__setattr__(self, "words", words)

    @classmethod
    def random(cls, m: int, n: int, input_size: int = 2, seed=None) -> Codebook:
        """I.i.d. uniform codewords."""
        rng = _rng(seed)
        return cls(rng.integers(0, input_size, (m, n)), input_size,
                   seed if isinstance(seed, int) else None)

    @property
    def size(self) -> int:
        return self.words.shape[0]

    @property
    def length(self) -> int:
        return self.words.shape[1]

    def codeword(self, j: int) -> Sequence:
        return Sequence(_alphabet(self.input_size), tuple(self.words[j].tolist()))


def _check_received(book: Codebook, y: Sequence) -> None:
    if len(y) != book.length:
        raise LengthMismatchError(f"received {len(y)} symbols, codewords have {book.length}")


def ml_decode(ch: FsChannel, book: Codebook, y: Sequence) -> int:
    """Index of the most likely codeword; ties go to the lowest index."""
    _check_received(book, y)
    return int(np.argmax(_loglik_rows(ch, book.words, y.array)))


def ziv_metrics(book: Codebook, y: Sequence) -> list[float]:
    ys = y.symbols
    ysize = y.alphabet.size
    return [_metric_raw(w, ys, ysize) for w in book.words.tolist()]


def ziv_decode(book: Codebook, y: Sequence) -> int:
    """Index of the codeword with the smallest conditional LZ metric ``u(x|y)``.

    Uses no channel knowledge.  Ties go to the lowest index.
    """
    _check_received(book, y)
    metrics = ziv_metrics(book, y)
    return metrics.index(min(metrics))


@dataclass
class ExperimentReport:
    trials: int
    ml_errors: int
    ziv_errors: int
    master_seed: int
    n: int
    m: int
    channel: dict
    records: list[tuple[int, int, int]] = field(default_factory=list, repr=False)

    @property
    def ml_error_rate(self) -> float:
        return self.ml_errors / self.trials

    @property
    def ziv_error_rate(self) -> float:
        return self.ziv_errors / self.trials

    def _radius(self, rate: float) -> float:
        return 1.96 * math.sqrt(rate * (1 - rate) / self.trials)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "master_seed": self.master_seed,
            "n": self.n,
            "M": self.m,
            "channel": self.channel,
            "ml": {
                "errors": self.ml_errors,
                "error_rate": self.ml_error_rate,
                "ci95_radius": self._radius(self.ml_error_rate),
            },
            "ziv": {
                "errors": self.ziv_errors,
                "error_rate": self.ziv_error_rate,
                "ci95_radius": self._radius(self.ziv_error_rate),
            },
        }


def trial_instance(ch: FsChannel, n: int, m: int, master_seed: int, trial: int):
    """Codebook, sent index and received word of one trial, rebuilt from its seed."""
    rng = np.random.default_rng([master_seed, trial])
    book = Codebook.random(m, n, ch.input_size, rng)
    message = int(rng.integers(m))
    ys = _transmit_array(ch, book.words[message], rng)
    return book, message, Sequence(_alphabet(ch.output_size), tuple(ys.tolist()))


def _run_trials(args) -> list[tuple[int, int, int]]:
    ch, n, m, master_seed, trial_ids = args
    out = []
    for t in trial_ids:
        book, message, y = trial_instance(ch, n, m, master_seed, t)
        out.append((message, ml_decode(ch, book, y), ziv_decode(book, y)))
    return out


def run_experiment(
    ch: FsChannel,
    n: int,
    m: int,
    trials: int,
    master_seed: int,
    workers: int = 1,
    budget: int | None = None,
) -> ExperimentReport:
    """Monte-Carlo comparison of ML and universal decoding.

    Each trial draws a fresh uniform codebook and message from a seed derived
    from ``(master_seed, trial)``, so the report does not depend on how trials
    are split across ``workers``.
    """
    if m < 2 or trials < 1 or n < 1:
        raise InputError("need M >= 2, trials >= 1 and n >= 1")
    limit = limits.budget(limits.CODEBOOK_SYMBOLS) if budget is None else budget
    if m * n > limit:
        raise GuardrailError("codebook size M*n exceeds the memory budget", limit, m * n)
    ids = list(range(trials))
    if workers <= 1:
        records = _run_trials((ch, n, m, master_seed, ids))
    else:
        chunks = [ids[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_trials, [(ch, n, m, master_seed, c) for c in chunks]))
        records = [None] * trials
        for chunk, part in zip(chunks, parts):
            for t, rec in zip(chunk, part):
                records[t] = rec
    ml_errors = sum(ml != msg for msg, ml, _ in records)
    ziv_errors = sum(zv != msg for msg, _, zv in records)
    return ExperimentReport(trials, ml_errors, ziv_errors, master_seed, n, m, ch.to_dict(), records)
