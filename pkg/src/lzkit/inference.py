"""Empirical entropies and LZ-based hypothesis tests.

Both tests compare the LZ complexity against a simpler model's code rate:
the fair-coin test against 1 bit/symbol, the memoryless test against the
zeroth-order empirical entropy.  The Markov order estimator applies the
same comparison at increasing context depth and keeps the first depth
whose gap falls below the threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InputError
from .parsing import lz_complexity
from .sequence import Sequence

DEFAULT_LAMBDA = 0.1

Hypothesis = Literal["H0", "H1"]


@dataclass(frozen=True)
class EmpiricalModel:
    """Order-``k`` context counts ``n(a, z)`` over positions ``k+1 .. n``."""

    order: int
    counts: dict[tuple[int, ...], dict[int, int]]
    total_positions: int

    @classmethod
    def fit(cls, x: Sequence, k: int) -> EmpiricalModel:
        _check_order(x, k)
        counts: dict[tuple[int, ...], dict[int, int]] = {}
        syms = x.symbols
        for i in range(k, len(syms)):
            row = counts.setdefault(tuple(syms[i - k:i]), {})
            row[syms[i]] = row.get(syms[i], 0) + 1
        return cls(k, counts, len(syms) - k)

    def entropy(self) -> float:
        acc = 0.0
        for row in self.counts.values():
            nz = sum(row.values())
            acc += _nlogn(nz) - sum(_nlogn(v) for v in row.values())
        return acc / self.total_positions


@dataclass(frozen=True)
class TestVerdict:
    __test__ = False  # not a pytest class

    decision: Hypothesis
    statistic: float
    threshold: float

    def to_dict(self) -> dict:
        return {"decision": self.decision, "statistic": self.statistic, "lambda": self.threshold}


def _nlogn(v: float) -> float:
    return v * math.log2(v) if v > 0 else 0.0


def _check_order(x: Sequence, k: int) -> None:
    if k < 0:
        raise InputError(f"order must be >= 0, got {k}")
    if k >= len(x):
        raise InputError(f"order {k} needs a sequence longer than {len(x)}")


def _check_lambda(lam: float) -> None:
    if not 0.0 < lam < 1.0:
        raise InputError(f"lambda must lie in (0, 1), got {lam}")


def _sum_nlogn(counts: np.ndarray) -> float:
    counts = counts[counts > 0].astype(np.float64)
    return float(np.sum(counts * np.log2(counts)))


def empirical_entropy(x: Sequence, k: int) -> float:
    """Plug-in conditional entropy (bits/symbol) under order-``k`` Markov modeling.

    Positions ``k+1 .. n`` are counted with context ``x_{i-k} .. x_{i-1}``;
    the first ``k`` symbols only serve as context.
    """
    _check_order(x, k)
    arr = x.array
    total = len(arr) - k
    windows = sliding_window_view(arr, k + 1)
    size = x.alphabet.size
    if (k + 1) * math.log2(max(size, 2)) < 62:
        weights = size ** np.arange(k, -1, -1, dtype=np.int64)
        codes = windows @ weights
        ctx = codes // size
        _, joint = np.unique(codes, return_counts=True)
        _, marg = np.unique(ctx, return_counts=True)
    else:
        _, joint = np.unique(windows, axis=0, return_counts=True)
        _, marg = np.unique(windows[:, :k], axis=0, return_counts=True)
    h = (_sum_nlogn(marg) - _sum_nlogn(joint)) / total
    return max(h, 0.0)


def test_fair_coin(x: Sequence, lam: float = DEFAULT_LAMBDA) -> TestVerdict:
    """Decide H0 (fair coin tosses) iff the LZ complexity is at least ``1 - lam``."""
    if x.alphabet.size != 2:
        raise InputError("the fair-coin test needs a binary alphabet")
    _check_lambda(lam)
    if len(x) < 2:
        raise InputError("the fair-coin test needs n >= 2")
    rho = lz_complexity(x)
    return TestVerdict("H0" if rho >= 1.0 - lam else "H1", rho, lam)


def test_memoryless(x: Sequence, lam: float = DEFAULT_LAMBDA) -> TestVerdict:
    """Decide H0 (some memoryless source) iff ``H_0 - rho_LZ <= lam``."""
    _check_lambda(lam)
    if len(x) < 2:
        raise InputError("the memoryless test needs n >= 2")
    gap = empirical_entropy(x, 0) - lz_complexity(x)
    return TestVerdict("H0" if gap <= lam else "H1", gap, lam)


def order_gaps(x: Sequence, k_max: int) -> list[float]:
    """``H_k - rho_LZ`` for ``k = 0 .. k_max``."""
    _check_order(x, k_max)
    rho = lz_complexity(x)
    return [empirical_entropy(x, k) - rho for k in range(k_max + 1)]


def estimate_markov_order(x: Sequence, lam: float, k_max: int) -> int | None:
    """Smallest ``k <= k_max`` with ``H_k - rho_LZ <= lam``; ``None`` if there is none."""
    _check_lambda(lam)
    _check_order(x, k_max)
    rho = lz_complexity(x)
    for k in range(k_max + 1):
        if empirical_entropy(x, k) - rho <= lam:
            return k
    return None


# keep pytest from collecting the decision rules when tests import them
test_fair_coin.__test__ = False
test_memoryless.__test__ = False
