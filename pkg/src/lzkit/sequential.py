"""Sequential prediction and even-odds gambling driven by the LZ78 phrase trie.

The estimator sits at a node of the growing phrase trie and uses the counts
of symbols seen after that node.  After each symbol it descends, and when
the symbol opens a new phrase the node is created and the walk restarts at
the root.  With smoothing 1 the probability assigned to each completed
phrase telescopes to ``1 / (j + 1)`` for the ``j``-th phrase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import InputError
from .sequence import Sequence


class PredictorState:
    """Mutable walk over the binary phrase trie."""

    def __init__(self, alpha: float = 1.0):
        if alpha <= 0:
            raise InputError(f"smoothing must be positive, got {alpha}")
        self.alpha = alpha
        self.children: list[list[int]] = [[0, 0]]
        self.counts: list[list[int]] = [[0, 0]]
        self.cursor = 0

    def prob_one(self) -> float:
        c0, c1 = self.counts[self.cursor]
        return (c1 + self.alpha) / (c0 + c1 + 2 * self.alpha)

    def update(self, symbol: int) -> None:
        node = self.cursor
        self.counts[node][symbol] += 1
        nxt = self.children[node][symbol]
        if nxt:
            self.cursor = nxt
        else:
            self.children[node][symbol] = len(self.counts)
            self.children.append([0, 0])
            self.counts.append([0, 0])
            self.cursor = 0


@dataclass
class PredictionReport:
    probabilities: np.ndarray  # P(next = 1) before each symbol
    predictions: np.ndarray
    errors: int

    @property
    def n(self) -> int:
        return len(self.predictions)

    @property
    def error_rate(self) -> float:
        return self.errors / self.n if self.n else 0.0

    def to_dict(self) -> dict:
        return {"n": self.n, "errors": self.errors, "error_rate": self.error_rate}


def _require_binary(x: Sequence) -> None:
    if x.alphabet.size != 2:
        raise InputError("sequential prediction and gambling need a binary alphabet")


def causal_probabilities(x: Sequence, alpha: float = 1.0) -> np.ndarray:
    """``p_i = P(x_i = 1 | x_1 .. x_{i-1})`` from the trie estimator."""
    _require_binary(x)
    state = PredictorState(alpha)
    probs = np.empty(len(x))
    for i, s in enumerate(x.symbols):
        probs[i] = state.prob_one()
        state.update(s)
    return probs


def predict_sequence(
    x: Sequence,
    alpha: float = 1.0,
    mode: Literal["deterministic", "randomized"] = "deterministic",
    seed=None,
) -> PredictionReport:
    """Predict each symbol from its past.

    Deterministic mode guesses 1 iff the estimate exceeds 1/2; randomized
    mode guesses 1 with probability equal to the estimate.
    """
    probs = causal_probabilities(x, alpha)
    if mode == "deterministic":
        preds = (probs > 0.5).astype(np.int64)
    elif mode == "randomized":
        u = np.random.default_rng(seed).random(len(probs))
        preds = (u < probs).astype(np.int64)
    else:
        raise InputError(f"unknown prediction mode {mode!r}")
    errors = int(np.count_nonzero(preds != x.array))
    return PredictionReport(probs, preds, errors)


def _outcome_probabilities(x: Sequence, alpha: float) -> np.ndarray:
    probs = causal_probabilities(x, alpha)
    return np.where(x.array == 1, probs, 1.0 - probs)


def sequential_code_length(x: Sequence, alpha: float = 1.0) -> float:
    """``-sum_i log2 p(x_i | past)`` in bits."""
    return -math.fsum(np.log2(_outcome_probabilities(x, alpha)).tolist())


def capital_trajectory(x: Sequence, alpha: float = 1.0) -> np.ndarray:
    """log2 capital after each round when betting proportionally at even odds."""
    return np.cumsum(1.0 + np.log2(_outcome_probabilities(x, alpha)))


def gamble_sequence(x: Sequence, alpha: float = 1.0) -> float:
    """Average log2 capital growth per symbol.

    A fraction ``p(a)`` of the capital is staked on each outcome ``a``; even
    odds pay back twice the stake on the realised outcome.
    """
    _require_binary(x)
    if len(x) == 0:
        raise InputError("gambling needs a nonempty sequence")
    state = PredictorState(alpha)
    log_factors = []
    for s in x.symbols:
        p1 = state.prob_one()
        stake = p1 if s == 1 else 1.0 - p1
        log_factors.append(math.log2(2.0 * stake))
        state.update(s)
    return math.fsum(log_factors) / len(x)
