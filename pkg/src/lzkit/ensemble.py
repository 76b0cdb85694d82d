"""Exhaustive universal rate-distortion ensemble at tiny block lengths.

Every length-``n`` sequence gets weight ``2^(-c log2 c)``; normalising gives
the universal distribution.  The rate of a source sequence at distortion
``D`` is the normalised negative log-probability of its distortion ball.
Everything is enumerated, so this is an exact reference, not a coder.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import _kernels, limits
from .errors import AlphabetMismatchError, GuardrailError, InputError, LengthMismatchError
from .parsing import clog2c
from .sequence import Alphabet, Sequence

def hamming(x: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Number of mismatching positions between ``x`` and each candidate row."""
    return np.count_nonzero(candidates != x, axis=1)


DISTORTIONS: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "hamming": hamming,
}


@dataclass(frozen=True, eq=False)
class UniversalDistribution:
    n: int
    alphabet: Alphabet
    candidates: np.ndarray  # (|A|^n, n), lexicographic order
    phrase_counts: np.ndarray
    log_weights: np.ndarray  # -c log2 c
    weights: np.ndarray
    z: float

    @property
    def probabilities(self) -> np.ndarray:
        return self.weights / self.z

    @property
    def log2_z(self) -> float:
        return math.log2(self.z)

    def index_of(self, x: Sequence) -> int:
        size = self.alphabet.size
        idx = 0
        for s in x.symbols:
            idx = idx * size + s
        return idx

    def probability(self, x: Sequence) -> float:
        return float(self.weights[self.index_of(x)] / self.z)


def build_universal(
    n: int, alphabet: Alphabet, limit: int | None = None
) -> UniversalDistribution:
    """Enumerate all ``|A|^n`` sequences with their LZ78 weights."""
    if limit is None:
        limit = limits.budget(limits.ENUMERATION_CANDIDATES)
    if n < 1:
        raise InputError("block length must be >= 1")
    total = alphabet.size**n
    if total > limit:
        raise GuardrailError("enumeration of |A|^n candidates exceeds the limit", limit, total)
    # row i spells i in base |A|, most significant symbol first
    powers = alphabet.size ** np.arange(n - 1, -1, -1, dtype=np.int64)
    cands = (np.arange(total, dtype=np.int64)[:, None] // powers) % alphabet.size
    counts = _kernels.phrase_counts(np.ascontiguousarray(cands), alphabet.size)
    log_w = -np.array([clog2c(int(c)) for c in counts])
    weights = np.exp2(log_w)
    # compensated sum keeps Z independent of summation order
    z = math.fsum(weights.tolist())
    return UniversalDistribution(n, alphabet, cands, counts, log_w, weights, z)


@dataclass(frozen=True)
class DistortionBall:
    """Reproductions within per-symbol distortion ``radius`` of ``center``."""

    center: Sequence
    radius: float
    measure: str = "hamming"

    def mask(self, dist: UniversalDistribution) -> np.ndarray:
        try:
            fn = DISTORTIONS[self.measure]
        except KeyError:
            raise InputError(f"unknown distortion {self.measure!r}") from None
        # tolerance keeps grid points such as D = k/n from rounding out of the ball
        return fn(self.center.array, dist.candidates) <= dist.n * self.radius + 1e-9


def _check(x: Sequence, d: float, dist: UniversalDistribution) -> None:
    if len(x) != dist.n:
        raise LengthMismatchError(f"sequence length {len(x)}, ensemble built for {dist.n}")
    if x.alphabet.size != dist.alphabet.size:
        raise AlphabetMismatchError("sequence alphabet differs from the ensemble's")
    if d < 0:
        raise InputError("distortion level must be nonnegative")


def rd_point(
    x: Sequence, d: float, dist: UniversalDistribution, distortion: str = "hamming"
) -> float:
    """``-log2 P_univ(B(x, D)) / n`` by summing over the enumerated ball."""
    _check(x, d, dist)
    mask = DistortionBall(x, d, distortion).mask(dist)
    if mask.all():
        return 0.0
    mass = math.fsum(dist.weights[mask].tolist())
    return (dist.log2_z - math.log2(mass)) / dist.n


def single_best_rate(
    x: Sequence, d: float, dist: UniversalDistribution, distortion: str = "hamming"
) -> float:
    """Rate of the single most probable reproduction inside the ball."""
    _check(x, d, dist)
    mask = DistortionBall(x, d, distortion).mask(dist)
    return (float(-dist.log_weights[mask].max()) + dist.log2_z) / dist.n
