"""Benchmark fitness functions with a hidden structure parameter k.

Every function is exposed behind one immutable FitnessFunction value whose
evaluator reveals nothing but the fitness: algorithm code never sees k or the
hidden subset, only the value of a candidate and the optimum at which a run
may stop.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bitstrings import STREAM_INSTANCE, RngStream

KIND_TOKENS = (
    "leadingones_k",
    "onemax_k",
    "substring_k",
    "jump_k",
    "leadingones",
    "onemax",
)

# Kinds whose structure depends on k; the plain variants fix k = n.
K_PARAMETERIZED = ("leadingones_k", "onemax_k", "substring_k", "jump_k")


def leading_ones_k(x: np.ndarray, k: int) -> int:
    """Length of the all-ones prefix of x, capped at k."""
    _check_k(k, x.shape[0])
    return int(_leading_ones_k_batch(x[None, :], k)[0])


def onemax_subset(x: np.ndarray, subset) -> int:
    """Number of one-bits among the positions in subset (0-based)."""
    idx = np.asarray(sorted(subset), dtype=np.intp)
    if idx.size and (idx[0] < 0 or idx[-1] >= x.shape[0]):
        raise ValueError("subset index out of range")
    return int(x[idx].sum())


def substring_k(x: np.ndarray, k: int) -> int:
    """Largest end position (1-based) of an all-ones window of length k.

    For end positions below k the window is the whole prefix, so when no
    full-length window exists the value equals the number of leading ones.
    Any string ending in k ones attains the optimum n.
    """
    _check_k(k, x.shape[0])
    return int(_substring_k_batch(x[None, :], k)[0])


def jump_k(x: np.ndarray, k: int) -> int:
    """OneMax shifted by +k below the gap, -k inside it, n+1 at all-ones."""
    n = x.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"jump_k needs 1 <= k < n, got k={k}, n={n}")
    return int(_jump_k_batch(x[None, :], k)[0])


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, n] = [1, {n}], got {k}")


def _leading_ones_k_batch(X: np.ndarray, k: int) -> np.ndarray:
    zeros = X[:, :k] == 0
    return np.where(zeros.any(axis=1), zeros.argmax(axis=1), k).astype(np.int64)


def _substring_k_batch(X: np.ndarray, k: int) -> np.ndarray:
    n = X.shape[1]
    positions = np.arange(n)
    # Run length of consecutive ones ending at each position.
    last_zero = np.where(X == 0, positions, -1)
    last_zero = np.maximum.accumulate(last_zero, axis=1)
    run = positions + 1 - (last_zero + 1)
    window = np.minimum(positions + 1, k)
    value = np.where(run >= window, positions + 1, 0)
    return value.max(axis=1).astype(np.int64)


def _jump_k_batch(X: np.ndarray, k: int) -> np.ndarray:
    n = X.shape[1]
    om = X.sum(axis=1, dtype=np.int64)
    return np.where(om == n, n + 1, np.where(om < n - k, om + k, om - k))


@dataclass(frozen=True)
class FitnessFunction:
    """Immutable instance of one benchmark function.

    hidden_subset holds the 0-based positions that contribute to fitness and
    is populated for onemax_k only; it exists for instance construction and
    inspection in tests, never for algorithm code.
    """

    kind: str
    n: int
    k: int
    optimum: int
    hidden_subset: tuple[int, ...] | None = None
    _subset_array: np.ndarray | None = field(default=None, repr=False, compare=False)

    def value(self, x: np.ndarray) -> int:
        # Scalar fast paths for the evaluations dominating (1+1)-style loops.
        if self.kind in ("leadingones_k", "leadingones"):
            zeros = np.flatnonzero(x[: self.k] == 0)
            return int(zeros[0]) if zeros.size else self.k
        if self.kind == "onemax":
            return int(x.sum())
        if self.kind == "onemax_k":
            return int(x[self._subset_array].sum())
        if self.kind == "jump_k":
            om = int(x.sum())
            if om == self.n:
                return self.n + 1
            return om + self.k if om < self.n - self.k else om - self.k
        return int(self.value_batch(x[None, :])[0])

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        """Fitness of each row of X, as an int64 array."""
        if X.shape[1] != self.n:
            raise ValueError(f"expected rows of length {self.n}, got {X.shape[1]}")
        if self.kind in ("leadingones_k", "leadingones"):
            return _leading_ones_k_batch(X, self.k)
        if self.kind == "onemax":
            return X.sum(axis=1, dtype=np.int64)
        if self.kind == "onemax_k":
            return X[:, self._subset_array].sum(axis=1, dtype=np.int64)
        if self.kind == "substring_k":
            return _substring_k_batch(X, self.k)
        if self.kind == "jump_k":
            return _jump_k_batch(X, self.k)
        raise AssertionError(f"unreachable kind {self.kind!r}")


def make_instance(kind: str, n: int, k: int | None = None, seed: int = 0) -> FitnessFunction:
    """Build a deterministic fitness instance.

    For onemax_k the hidden k-subset is drawn uniformly from the seed (a
    seeded partial shuffle); re-creation with the same seed yields the same
    subset.  The plain leadingones/onemax kinds take no k.
    """
    if kind not in KIND_TOKENS:
        raise ValueError(f"unknown function kind {kind!r}; expected one of {KIND_TOKENS}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind in ("leadingones", "onemax"):
        if k is not None and k != n:
            raise ValueError(f"{kind} takes no structure parameter (got k={k})")
        k = n
    else:
        if k is None:
            raise ValueError(f"{kind} requires k")
        if kind == "jump_k":
            if not 1 <= k < n:
                raise ValueError(f"jump_k needs 1 <= k < n, got k={k}, n={n}")
        else:
            _check_k(k, n)

    subset: tuple[int, ...] | None = None
    subset_array: np.ndarray | None = None
    if kind == "onemax_k":
        rng = RngStream(seed, key=(STREAM_INSTANCE,))
        subset_array = np.sort(rng.sample_positions(n, k))
        subset = tuple(int(i) for i in subset_array)

    optimum = {
        "leadingones_k": k,
        "onemax_k": k,
        "substring_k": n,
        "jump_k": n + 1,
        "leadingones": n,
        "onemax": n,
    }[kind]
    return FitnessFunction(kind=kind, n=n, k=k, optimum=optimum,
                           hidden_subset=subset, _subset_array=subset_array)


class CountingEvaluator:
    """Run-local evaluation counter around a fitness instance.

    Owned by a single run; every individual evaluated through it increments
    the counter by exactly one.  This is the surface algorithm code sees:
    the fitness value, the problem size, and the stopping optimum, but never
    the structure parameter or a hidden subset.
    """

    def __init__(self, fn) -> None:
        self._fn = fn
        self.n = fn.n
        self.optimum = fn.optimum
        self.count = 0

    def value(self, x: np.ndarray) -> int:
        self.count += 1
        return self._fn.value(x)

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        self.count += X.shape[0]
        return self._fn.value_batch(X)
