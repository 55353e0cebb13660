"""Shared test utilities: stub streams, independent oracles, probes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mulambda.algorithms import Population, SelfAdaptiveConfig, rank, step_self_adaptive
from mulambda.bitstrings import RngStream
from mulambda.fitness import CountingEvaluator
from mulambda.theory import TheoryParams, depth, theta1, theta2


class ConstantUniformStream:
    """Stub stream whose uniform draws all return one fixed value."""

    def __init__(self, value: float):
        self.value = value

    def uniform(self, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def binomial(self, n, p):
        raise AssertionError("binomial path not expected with this stub")

    def sample_positions(self, n, m):
        raise AssertionError("position sampling not expected with this stub")


class ScriptedStream:
    """Stub stream that replays queued results per method."""

    def __init__(self, uniforms=(), binomials=(), positions=(), integers=()):
        self._uniforms = list(uniforms)
        self._binomials = list(binomials)
        self._positions = list(positions)
        self._integers = list(integers)

    def uniform(self, size=None):
        value = self._uniforms.pop(0)
        if size is None:
            return value
        return np.broadcast_to(np.asarray(value, dtype=float), size).copy()

    def binomial(self, n, p):
        return self._binomials.pop(0)

    def sample_positions(self, n, m):
        return np.asarray(self._positions.pop(0), dtype=np.intp)

    def integers(self, low, high, size=None):
        value = self._integers.pop(0)
        if size is None:
            return value
        return np.broadcast_to(np.asarray(value), size).copy()


@dataclass
class StubFitness:
    """Duck-typed fitness with an arbitrary per-candidate rule."""

    n: int
    optimum: int
    rule: callable

    def value(self, x):
        return int(self.rule(x))

    def value_batch(self, X):
        return np.array([self.rule(row) for row in X], dtype=np.int64)


def constant_fitness(n: int, value: int = 0, optimum: int = 1) -> StubFitness:
    return StubFitness(n=n, optimum=optimum, rule=lambda x: value)


class ImprovingFitness:
    """Fitness that strictly increases on every single evaluation."""

    def __init__(self, n: int, optimum: int = 10 ** 9):
        self.n = n
        self.optimum = optimum
        self.calls = 0

    def value(self, x):
        self.calls += 1
        return self.calls

    def value_batch(self, X):
        out = np.arange(self.calls + 1, self.calls + 1 + X.shape[0], dtype=np.int64)
        self.calls += X.shape[0]
        return out


class DecreasingFitness:
    """Fitness that strictly decreases on every single evaluation."""

    def __init__(self, n: int, optimum: int = 10 ** 9):
        self.n = n
        self.optimum = optimum
        self.calls = 0

    def value(self, x):
        self.calls += 1
        return -self.calls

    def value_batch(self, X):
        out = -np.arange(self.calls + 1, self.calls + 1 + X.shape[0], dtype=np.int64)
        self.calls += X.shape[0]
        return out


# ---------------------------------------------------------------------------
# Independent fitness oracles

def lo_k_product_sum(x: np.ndarray, k: int) -> int:
    """Leading-ones count capped at k, via the sum-of-prefix-products form."""
    total = 0
    prod = 1
    for i in range(k):
        prod *= int(x[i])
        total += prod
    return total


def substring_scanner(x: np.ndarray, k: int) -> int:
    """Sliding-window scan: best end position of a window of min(i, k) ones."""
    n = len(x)
    best = 0
    for i in range(1, n + 1):
        lo = max(i - k + 1, 1)
        if all(int(x[p - 1]) == 1 for p in range(lo, i + 1)):
            best = i
    return best


def onemax_naive(x: np.ndarray) -> int:
    return sum(int(v) for v in x)


def jump_naive(x: np.ndarray, k: int) -> int:
    om = onemax_naive(x)
    n = len(x)
    if om == n:
        return n + 1
    if om < n - k:
        return om + k
    return om - k


def all_bitstrings(n: int):
    for value in range(2 ** n):
        yield np.array([(value >> i) & 1 for i in range(n)], dtype=np.uint8)


# ---------------------------------------------------------------------------
# Independent level-membership oracle

@dataclass
class LevelSet:
    """Explicit description of one band as (fitness predicate, rate interval).

    Intervals are (lo, hi, lo_closed, hi_closed); fitness predicates are
    ('eq', u) for the band's own fitness or ('between', u, k) for the
    demoted tail of an edge band (fitness above u but below the optimum).
    """

    fitness: int
    band: int
    pieces: list


def build_level_sets(params: TheoryParams) -> list[LevelSet]:
    """Construct every band of the partition as explicit interval sets.

    Built directly from the band definitions, independently of classify():
    low bands tile [epsilon, theta1) in factor-A steps (the topmost low band
    absorbs the remainder below theta1); the edge band covers [theta1,
    min(1/2, theta2)] for its own fitness plus, for every higher non-optimal
    fitness, the slice (min(1/2, theta2(j+1)), min(1/2, theta2(j))]; the
    optimum fitness level k forms a single band over every admissible rate,
    so it is excluded from the demoted tails.
    """
    k, eps, A = params.k, params.epsilon, params.A
    sets: list[LevelSet] = []
    for j in range(k):
        d = depth(params, j)
        t1 = theta1(params, j)
        t2 = theta2(params, j)
        for band in range(1, d):
            lo = eps * A ** (band - 1)
            hi = t1 if band == d - 1 else eps * A ** band
            sets.append(LevelSet(j, band, [(("eq", j), (lo, hi, True, False))]))
        edge_lo = t1 if d > 1 else eps
        pieces = [(("eq", j), (edge_lo, min(0.5, t2), True, True))]
        pieces.append((("between", j, k),
                       (min(0.5, theta2(params, j + 1)), min(0.5, t2), False, True)))
        sets.append(LevelSet(j, d, pieces))
    sets.append(LevelSet(k, 1, [(("eq", k), (eps, 0.5, True, True))]))
    return sets


def _fitness_matches(predicate, fitness: int) -> bool:
    if predicate[0] == "eq":
        return fitness == predicate[1]
    if predicate[0] == "between":
        return predicate[1] < fitness < predicate[2]
    raise AssertionError(predicate)


def piece_contains(piece, fitness: int, rate: float) -> bool:
    predicate, (lo, hi, lo_closed, hi_closed) = piece
    if not _fitness_matches(predicate, fitness):
        return False
    above = rate >= lo if lo_closed else rate > lo
    below = rate <= hi if hi_closed else rate < hi
    return above and below


def memberships(sets: list[LevelSet], fitness: int, rate: float) -> list[tuple[int, int]]:
    """Every (fitness, band) whose set contains the point; should be one."""
    found = []
    for level in sets:
        if any(piece_contains(p, fitness, rate) for p in level.pieces):
            found.append((level.fitness, level.band))
    return found


def membership_masks(sets: list[LevelSet], fitness: int, rates: np.ndarray) -> np.ndarray:
    """Stacked membership mask per level over a rate grid at one fitness."""
    masks = []
    for level in sets:
        mask = np.zeros(rates.shape, dtype=bool)
        for predicate, (lo, hi, lo_closed, hi_closed) in level.pieces:
            if not _fitness_matches(predicate, fitness):
                continue
            above = rates >= lo if lo_closed else rates > lo
            below = rates <= hi if hi_closed else rates < hi
            mask |= above & below
        masks.append(mask)
    return np.stack(masks)


# ---------------------------------------------------------------------------
# Statistics oracles

def quantile_naive(values, p: float):
    """Lower-interpolation quantile, written independently of the library."""
    ordered = sorted(values)
    position = math.ceil(p * len(ordered))
    return ordered[position - 1] if position >= 1 else ordered[0]


# ---------------------------------------------------------------------------
# Dynamics probes

def run_generations(fitness_fn, config: SelfAdaptiveConfig, seed: int,
                    generations: int, observe=None):
    """Drive the self-adaptive generation loop for a fixed generation count.

    Ignores the optimum (the process is well defined past it), calling
    observe(generation, ranked_population) on every evaluated generation.
    """
    evaluator = CountingEvaluator(fitness_fn)
    cfg = config.resolved(evaluator.n)
    rng = RngStream(seed, key=(1,))
    bits = rng.random_bits((cfg.lam, evaluator.n))
    pop = Population(bits, np.full(cfg.lam, float(cfg.chi_init)),
                     evaluator.value_batch(bits))
    for generation in range(generations):
        ranked = rank(pop)
        if observe is not None:
            observe(generation, ranked)
        pop, _ = step_self_adaptive(ranked, evaluator, cfg, rng)
    return pop
