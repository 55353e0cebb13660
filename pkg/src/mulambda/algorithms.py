"""The self-adaptive (mu, lambda) EA and the three comparison algorithms.

All run loops share the same accounting contract: the initial individuals are
evaluated and counted, every later generation adds exactly lambda (population
algorithms) or one ((1+1) variants) evaluations, and a run stops successfully
the moment the evaluated population contains an individual at the optimum,
or unsuccessfully once another generation would exceed the budget.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bitstrings import STREAM_ALGORITHM, RngStream, mutate, random_bitstring
from .fitness import CountingEvaluator, FitnessFunction


@dataclass(frozen=True)
class SelfAdaptiveConfig:
    """Parameters of the self-adaptive (mu, lambda) EA.

    epsilon is the lower bound on the mutation rate chi/n; None selects the
    default 1/(2n) once the problem size is known.  chi_init is the mutation
    parameter every initial individual carries.
    """

    lam: int
    mu: int
    A: float
    b: float
    p_inc: float
    epsilon: float | None = None
    chi_init: float = 1.0

    def __post_init__(self) -> None:
        if not 1 <= self.mu <= self.lam:
            raise ValueError(f"need 1 <= mu <= lambda, got mu={self.mu}, lambda={self.lam}")
        if not self.A > 1.0:
            raise ValueError(f"A must exceed 1, got {self.A}")
        if not 0.0 < self.b < 1.0:
            raise ValueError(f"b must lie in (0, 1), got {self.b}")
        if not 0.0 < self.p_inc < 1.0:
            raise ValueError(f"p_inc must lie in (0, 1), got {self.p_inc}")

    def resolved(self, n: int) -> "SelfAdaptiveConfig":
        """Concrete config for problem size n, with defaults filled in."""
        eps = self.epsilon if self.epsilon is not None else 1.0 / (2 * n)
        if not 0.0 < eps * n < 1.0:
            raise ValueError(f"need 0 < epsilon*n < 1, got epsilon*n = {eps * n}")
        if not 1.0 <= self.chi_init <= n / 2:
            raise ValueError(f"need 1 <= chi_init <= n/2, got {self.chi_init}")
        return replace(self, epsilon=eps)


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one run: total evaluations, success flag, cap, seed."""

    evaluations: int
    success: bool
    budget: int
    seed: int


@dataclass(frozen=True)
class TraceRecord:
    """Per-generation telemetry for the top-ranked individual."""

    generation: int
    best_fitness: int
    best_rate: float


@dataclass
class Population:
    """Offspring population: bit rows, mutation parameters, fitness values."""

    bits: np.ndarray      # (lam, n) uint8
    chi: np.ndarray       # (lam,) float64
    fitness: np.ndarray   # (lam,) int64

    @property
    def size(self) -> int:
        return self.bits.shape[0]


def rank(population: Population) -> Population:
    """Sort by fitness descending, then chi descending, then original index.

    The index tie-break makes the otherwise arbitrary full-tie order
    deterministic and reproducible.
    """
    order = np.lexsort((-population.chi, -population.fitness))
    return Population(population.bits[order], population.chi[order],
                      population.fitness[order])


def adapt_chi(chi: float, config: SelfAdaptiveConfig, n: int, rng) -> float:
    """One adaptation step: multiply by A (probability p_inc) or by b, clamped."""
    if config.epsilon is None:
        raise ValueError("config.epsilon unresolved; call config.resolved(n) first")
    if rng.uniform() < config.p_inc:
        return min(config.A * chi, n / 2)
    return max(config.b * chi, config.epsilon * n)


def _adapt_chi_batch(chi: np.ndarray, config: SelfAdaptiveConfig, n: int,
                     rng: RngStream) -> np.ndarray:
    increase = rng.uniform(size=chi.shape[0]) < config.p_inc
    return np.where(increase,
                    np.minimum(config.A * chi, n / 2),
                    np.maximum(config.b * chi, config.epsilon * n))


def _step_ranked(ranked: Population, evaluator, config: SelfAdaptiveConfig,
                 rng: RngStream) -> tuple[Population, np.ndarray]:
    """Create the next generation from an already ranked population."""
    lam = config.lam
    n = ranked.bits.shape[1]
    parents = rng.integers(0, config.mu, size=lam)
    chi = _adapt_chi_batch(ranked.chi[parents], config, n, rng)
    flips = rng.uniform(size=(lam, n)) < (chi / n)[:, None]
    bits = ranked.bits[parents] ^ np.asarray(flips, dtype=np.uint8)
    return Population(bits, chi, evaluator.value_batch(bits)), parents


def step_self_adaptive(population: Population, evaluator,
                       config: SelfAdaptiveConfig, rng: RngStream
                       ) -> tuple[Population, np.ndarray]:
    """One generation: rank, then select/adapt/mutate lambda offspring.

    Each offspring takes a uniform parent among the top mu, adapts its chi,
    and is mutated at the adapted rate; exactly lambda evaluations happen.
    Returns the new population and the chosen parent positions in the ranked
    order (instrumentation for selection tests).
    """
    return _step_ranked(rank(population), evaluator, config, rng)


def _initial_population(evaluator, lam: int, n: int, chi_init: float,
                        rng: RngStream) -> Population:
    bits = rng.random_bits((lam, n))
    chi = np.full(lam, float(chi_init))
    return Population(bits, chi, evaluator.value_batch(bits))


def run_self_adaptive(fitness_fn: FitnessFunction, config: SelfAdaptiveConfig,
                      seed: int, budget: int, trace: bool = False
                      ) -> tuple[RunRecord, list[TraceRecord] | None]:
    """Run the self-adaptive (mu, lambda) EA until optimum or budget.

    The initial population is uniform random with chi = chi_init everywhere
    and its lambda evaluations count toward the total.  When trace is set,
    one TraceRecord per evaluated generation reports the top-ranked
    individual.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    evaluator = CountingEvaluator(fitness_fn)
    n = evaluator.n
    cfg = config.resolved(n)
    rng = RngStream(seed, key=(STREAM_ALGORITHM,))
    population = _initial_population(evaluator, cfg.lam, n, cfg.chi_init, rng)
    records: list[TraceRecord] | None = [] if trace else None
    generation = 0
    while True:
        ranked = rank(population)
        if trace:
            records.append(TraceRecord(generation, int(ranked.fitness[0]),
                                       float(ranked.chi[0] / n)))
        if ranked.fitness[0] >= evaluator.optimum:
            return RunRecord(evaluator.count, True, budget, seed), records
        if evaluator.count + cfg.lam > budget:
            return RunRecord(evaluator.count, False, budget, seed), records
        population, _ = _step_ranked(ranked, evaluator, cfg, rng)
        generation += 1


def run_one_plus_one(fitness_fn: FitnessFunction, rate: float, seed: int,
                     budget: int) -> RunRecord:
    """Elitist (1+1) EA with a static mutation rate.

    The offspring replaces the parent whenever its fitness is at least as
    good.  One evaluation per generation plus the initial one.
    """
    if not 0.0 < rate <= 0.5:
        raise ValueError(f"rate must lie in (0, 1/2], got {rate}")
    if budget <= 0:
        raise ValueError("budget must be positive")
    evaluator = CountingEvaluator(fitness_fn)
    n = evaluator.n
    rng = RngStream(seed, key=(STREAM_ALGORITHM,))
    x = random_bitstring(n, rng)
    f = evaluator.value(x)
    chi = rate * n
    while f < evaluator.optimum:
        if evaluator.count >= budget:
            return RunRecord(evaluator.count, False, budget, seed)
        y = mutate(x, chi, rng)
        fy = evaluator.value(y)
        if fy >= f:
            x, f = y, fy
    return RunRecord(evaluator.count, True, budget, seed)


def run_one_plus_one_alpha(fitness_fn: FitnessFunction, A: float, b: float,
                           seed: int, budget: int, epsilon: float | None = None,
                           chi_init: float = 1.0, trace: bool = False
                           ) -> tuple[RunRecord, list[TraceRecord] | None]:
    """Elitist (1+1) EA with step-wise rate control.

    Acceptance is by >=; after every offspring the mutation parameter is
    multiplied by A when the offspring was accepted (not worse than the
    parent) and by b otherwise, clamped to [epsilon*n, n/2].  chi starts
    at 1.  Treating acceptance as the success signal is what lets the rate
    settle near the fitness-dependent sweet spot on prefix problems; a
    strict-improvement signal is too rare to sustain any rate and decays
    to the floor.
    """
    if not A > 1.0:
        raise ValueError(f"A must exceed 1, got {A}")
    if not 0.0 < b < 1.0:
        raise ValueError(f"b must lie in (0, 1), got {b}")
    if budget <= 0:
        raise ValueError("budget must be positive")
    evaluator = CountingEvaluator(fitness_fn)
    n = evaluator.n
    eps = epsilon if epsilon is not None else 1.0 / (2 * n)
    rng = RngStream(seed, key=(STREAM_ALGORITHM,))
    x = random_bitstring(n, rng)
    f = evaluator.value(x)
    chi = float(chi_init)
    records: list[TraceRecord] | None = [] if trace else None
    generation = 0
    if trace:
        records.append(TraceRecord(generation, int(f), chi / n))
    while f < evaluator.optimum:
        if evaluator.count >= budget:
            return RunRecord(evaluator.count, False, budget, seed), records
        y = mutate(x, chi, rng)
        fy = evaluator.value(y)
        accepted = fy >= f
        if accepted:
            x, f = y, fy
        chi = min(A * chi, n / 2) if accepted else max(b * chi, eps * n)
        generation += 1
        if trace:
            records.append(TraceRecord(generation, int(f), chi / n))
    return RunRecord(evaluator.count, True, budget, seed), records


def run_mu_lambda_static(fitness_fn: FitnessFunction, lam: int, mu: int,
                         rate: float, seed: int, budget: int) -> RunRecord:
    """Non-elitist (mu, lambda) EA with a fixed mutation rate.

    Same generation loop as the self-adaptive EA but with constant chi =
    rate*n and ranking by fitness alone (ties by original index).
    """
    if not 1 <= mu <= lam:
        raise ValueError(f"need 1 <= mu <= lambda, got mu={mu}, lambda={lam}")
    if not 0.0 < rate <= 0.5:
        raise ValueError(f"rate must lie in (0, 1/2], got {rate}")
    if budget <= 0:
        raise ValueError("budget must be positive")
    evaluator = CountingEvaluator(fitness_fn)
    n = evaluator.n
    chi = rate * n
    rng = RngStream(seed, key=(STREAM_ALGORITHM,))
    bits = rng.random_bits((lam, n))
    fitness = evaluator.value_batch(bits)
    while True:
        order = np.argsort(-fitness, kind="stable")
        if fitness[order[0]] >= evaluator.optimum:
            return RunRecord(evaluator.count, True, budget, seed)
        if evaluator.count + lam > budget:
            return RunRecord(evaluator.count, False, budget, seed)
        parents = order[rng.integers(0, mu, size=lam)]
        flips = rng.uniform(size=(lam, n)) < rate
        bits = bits[parents] ^ np.asarray(flips, dtype=np.uint8)
        fitness = evaluator.value_batch(bits)
