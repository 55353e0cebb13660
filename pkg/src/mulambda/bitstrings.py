"""Bitstrings, chromosomes, seeded random streams, and bitwise mutation.

Bitstrings are plain numpy arrays of dtype uint8 holding 0/1 values; they are
treated as immutable values (operators always return fresh arrays).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Substream indices used to derive independent generators from one run seed.
STREAM_INSTANCE = 0
STREAM_ALGORITHM = 1

# Above this per-bit flip probability the draw-count-then-place-positions
# shortcut stops paying off and mutation uses one Bernoulli draw per bit.
BERNOULLI_THRESHOLD = 1.0 / 32.0


class RngStream:
    """Seeded random stream with order-insensitive substream derivation.

    Built on the counter-based Philox generator: an identical seed and key
    always reproduce the identical draw sequence, and substreams derived for
    distinct keys are statistically independent regardless of the order in
    which they are created or consumed.  A stream is single-owner: concurrent
    tasks must each derive their own substream.
    """

    def __init__(self, seed: int, key: Sequence[int] = ()) -> None:
        self._seed = int(seed)
        self._key = tuple(int(v) for v in key)
        ss = np.random.SeedSequence(self._seed, spawn_key=self._key)
        self.generator = np.random.Generator(np.random.Philox(ss))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def key(self) -> tuple[int, ...]:
        return self._key

    def substream(self, *key: int) -> "RngStream":
        """Derive an independent stream for ``key``, appended to this key."""
        return RngStream(self._seed, self._key + key)

    # Draw surface used by mutation and the algorithms.  Test stubs mimic
    # these methods, so keep the signatures minimal.

    def uniform(self, size=None):
        return self.generator.random(size)

    def binomial(self, n: int, p: float) -> int:
        return int(self.generator.binomial(n, p))

    def sample_positions(self, n: int, m: int) -> np.ndarray:
        """m distinct indices drawn uniformly from range(n).

        Small draws use sequential sampling (keep drawing, discard repeats):
        each accepted index is uniform over the remainder, so the resulting
        set is a uniform m-subset, at O(m) expected cost.
        """
        if m > 32 or m * 8 > n:
            return self.generator.choice(n, size=m, replace=False)
        picks = self.generator.integers(0, n, size=m)
        seen = set(picks.tolist())
        if len(seen) == m:
            return picks
        while len(seen) < m:
            seen.add(int(self.generator.integers(0, n)))
        return np.fromiter(seen, dtype=np.int64, count=m)

    def integers(self, low: int, high: int, size=None):
        return self.generator.integers(low, high, size=size)

    def random_bits(self, shape) -> np.ndarray:
        return self.generator.integers(0, 2, size=shape, dtype=np.uint8)


@dataclass(frozen=True)
class Chromosome:
    """A bitstring paired with its mutation parameter chi.

    chi is the expected number of flipped bits per mutation; chi / n is the
    per-bit flip probability.  The adaptation step keeps chi inside
    [epsilon * n, n / 2].
    """

    x: np.ndarray
    chi: float

    @property
    def rate(self) -> float:
        return self.chi / self.x.shape[0]


def bits(source: str | Iterable[int]) -> np.ndarray:
    """Build a bitstring from a '0'/'1' string or an iterable of 0/1 ints."""
    if isinstance(source, str):
        values = [int(c) for c in source]
    else:
        values = [int(v) for v in source]
    arr = np.asarray(values, dtype=np.uint8)
    validate_bitstring(arr)
    return arr


def validate_bitstring(x: np.ndarray, n: int | None = None) -> None:
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValueError("bitstring must be a non-empty 1-d array")
    if n is not None and x.shape[0] != n:
        raise ValueError(f"bitstring has length {x.shape[0]}, expected {n}")
    if not np.isin(x, (0, 1)).all():
        raise ValueError("bitstring entries must be 0 or 1")


def random_bitstring(n: int, rng: RngStream) -> np.ndarray:
    """Uniform random bitstring of length n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.random_bits(n)


def hamming(x: np.ndarray, y: np.ndarray) -> int:
    """Number of positions where x and y differ."""
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return int(np.count_nonzero(x != y))


def mutate(x: np.ndarray, chi: float, rng, method: str | None = None) -> np.ndarray:
    """Flip each bit of x independently with probability chi / n.

    The input is never modified.  Two sampling strategies produce the same
    flip distribution: "binomial" draws the flip count from Binomial(n,
    chi/n) and then places that many flips at uniformly chosen distinct
    positions (expected cost proportional to the flip count), while
    "bernoulli" draws one uniform per bit.  By default the binomial shortcut
    is used when chi / n <= 1/32.
    """
    n = x.shape[0]
    if not 0.0 < chi <= n / 2:
        raise ValueError(f"chi must be in (0, n/2] = (0, {n / 2}], got {chi}")
    rate = chi / n
    if method is None:
        method = "binomial" if rate <= BERNOULLI_THRESHOLD else "bernoulli"
    if method == "bernoulli":
        flips = rng.uniform(size=n) < rate
        return x ^ np.asarray(flips, dtype=np.uint8)
    if method == "binomial":
        out = x.copy()
        count = rng.binomial(n, rate)
        if count:
            out[rng.sample_positions(n, count)] ^= 1
        return out
    raise ValueError(f"unknown mutation method {method!r}")
