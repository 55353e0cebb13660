"""Analytical machinery for the self-adaptive EA, as executable code.

Provides the derived constants and rate thresholds that govern when a
mutation rate is too low, ideal, or too high for a given fitness level, the
partition of (fitness, rate) space into bands, membership in the
unsustainable high-rate region, and the population-level runtime bound.

All thresholds shrink like 1/j, so at large fitness levels the quantities
q**(1/j) and similar approach 1; everything is evaluated through expm1/log1p
to keep full double precision there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_DELTA = 0.05


class LevelIndex(NamedTuple):
    """Identifies one band of the (fitness, rate) partition.

    fitness is the fitness level; band runs from 1 (lowest rate band) to
    depth(fitness), the edge band.  The optimum fitness has the single band 1.
    """

    fitness: int
    band: int


@dataclass(frozen=True)
class TheoryParams:
    """Validated parameter bundle with its derived constants.

    alpha0 is the reproductive rate lambda/mu.  r0, zeta and q are derived:
    r0 = (1+delta) / (alpha0*(1-p_inc)), zeta = 1 - alpha0 * r0**(1+sqrt(r0)),
    q = (1-zeta) / alpha0; validity guarantees 0 < q < r0 < 1.
    """

    n: int
    k: int
    alpha0: float
    A: float
    b: float
    p_inc: float
    delta: float
    epsilon: float
    r0: float
    q: float
    zeta: float


def derive_constants(alpha0: float, p_inc: float, delta: float) -> tuple[float, float, float]:
    """(r0, zeta, q) from the reproductive rate, increase probability, delta."""
    r0 = (1.0 + delta) / (alpha0 * (1.0 - p_inc))
    zeta = 1.0 - alpha0 * r0 ** (1.0 + math.sqrt(r0))
    q = (1.0 - zeta) / alpha0
    return r0, zeta, q


def feasible_delta_upper(alpha0: float, b: float, p_inc: float) -> float:
    """Largest delta compatible with the validity constraints.

    delta must satisfy 0 < delta < 1/10, delta < alpha0*p_inc - 1 (so that
    p_inc > (1+delta)/alpha0), and delta <= alpha0*(1-p_inc)*(1/b - 1)**2 - 1
    (so that b <= 1/(1+sqrt(r0))).  A result <= 0 means no delta works.
    """
    return min(
        0.1,
        alpha0 * p_inc - 1.0,
        alpha0 * (1.0 - p_inc) * (1.0 / b - 1.0) ** 2 - 1.0,
    )


def make_params(n: int, alpha0: float, A: float, b: float, p_inc: float,
                delta: float = DEFAULT_DELTA, epsilon: float | None = None,
                k: int | None = None) -> TheoryParams:
    """Unchecked constructor: computes derived constants without validation.

    Useful for evaluating the threshold formulas outside the valid region;
    use validate_params for anything that relies on the guarantees.
    """
    if epsilon is None:
        epsilon = 1.0 / (2 * n)
    if k is None:
        k = n
    r0, zeta, q = derive_constants(alpha0, p_inc, delta)
    return TheoryParams(n=n, k=k, alpha0=alpha0, A=A, b=b, p_inc=p_inc,
                        delta=delta, epsilon=epsilon, r0=r0, q=q, zeta=zeta)


def validate_params(n: int, lam: int, mu: int, A: float, b: float, p_inc: float,
                    delta: float = DEFAULT_DELTA, epsilon: float | None = None,
                    k: int | None = None) -> TheoryParams | list[str]:
    """Check every validity constraint; return params or the violations.

    Violations are returned as a list of human-readable strings, one per
    failed constraint (they are data, not exceptions).  The delta constraint
    messages include the feasible delta interval for the other parameters.
    """
    violations: list[str] = []
    if n < 1:
        violations.append(f"n >= 1 fails (n = {n})")
    if not 1 <= mu <= lam:
        violations.append(f"1 <= mu <= lambda fails (mu = {mu}, lambda = {lam})")
        return violations
    alpha0 = lam / mu
    if epsilon is None:
        epsilon = 1.0 / (2 * n) if n >= 1 else 0.0
    if k is None:
        k = n

    if alpha0 < 4.0:
        violations.append(f"alpha0 >= 4 fails (alpha0 = lambda/mu = {alpha0:g})")
    if not A > 1.0:
        violations.append(f"A > 1 fails (A = {A:g})")
    if not 0.0 < delta < 0.1:
        violations.append(f"delta in (0, 1/10) fails (delta = {delta:g})")
    if not (1.0 + delta) / alpha0 < p_inc < 0.4:
        violations.append(
            f"(1+delta)/alpha0 < p_inc < 2/5 fails "
            f"(p_inc = {p_inc:g}, (1+delta)/alpha0 = {(1.0 + delta) / alpha0:g})"
        )
    r0, zeta, q = derive_constants(alpha0, p_inc, delta)
    b_limit = 1.0 / (1.0 + math.sqrt(r0)) if r0 > 0 else float("nan")
    if not 0.0 < b <= b_limit:
        feasible = feasible_delta_upper(alpha0, b, p_inc)
        violations.append(
            f"0 < b <= 1/(1+sqrt(r0)) fails (b = {b:g}, limit = {b_limit:.6g}; "
            f"feasible delta interval for this b is (0, {feasible:.6g}])"
        )
    if not 0.0 < epsilon * n < 1.0:
        violations.append(f"0 < epsilon*n < 1 fails (epsilon*n = {epsilon * n:g})")
    if k < 1 or k > n:
        violations.append(f"1 <= k <= n fails (k = {k})")
    if not violations and not 0.0 < q < r0 < 1.0:
        violations.append(f"derived constants out of range (q = {q:g}, r0 = {r0:g})")
    if violations:
        return violations
    return TheoryParams(n=n, k=k, alpha0=alpha0, A=A, b=b, p_inc=p_inc,
                        delta=delta, epsilon=epsilon, r0=r0, q=q, zeta=zeta)


def survival_prob(j, chi, n: int):
    """Probability that mutation at parameter chi keeps j specific bits.

    Equals (1 - chi/n)**j; j = 0 gives 1 for any rate.  Accepts scalars or
    numpy arrays for j and chi.
    """
    j_arr = np.asarray(j, dtype=np.float64)
    chi_arr = np.asarray(chi, dtype=np.float64)
    if np.any(j_arr < 0) or np.any(j_arr > n):
        raise ValueError("j must lie in [0, n]")
    if np.any(chi_arr < 0) or np.any(chi_arr > n):
        raise ValueError("chi must lie in [0, n]")
    rate = chi_arr / n
    with np.errstate(divide="ignore", invalid="ignore"):
        log_keep = np.log1p(-rate)
        out = np.where(j_arr == 0, 1.0, np.exp(j_arr * log_keep))
    if np.isscalar(j) and np.isscalar(chi):
        return float(out)
    return out


def _one_minus_pow(base: float, j):
    """1 - base**(1/j) for j >= 1, at full double precision."""
    j_arr = np.asarray(j, dtype=np.float64)
    return -np.expm1(math.log(base) / j_arr)


def eta(params: TheoryParams, j):
    """Rate below which an increase step is still safe at fitness level j.

    For j >= 1 this is (1/(2A)) * (1 - ((1+delta)/(alpha0*p_inc))**(1/j));
    j = 0 is defined as eta(1) / A.
    """
    ratio = (1.0 + params.delta) / (params.alpha0 * params.p_inc)
    j_arr = np.asarray(j)
    if np.any(j_arr < 0):
        raise ValueError("j must be >= 0")
    pos = np.maximum(j_arr, 1)
    vals = _one_minus_pow(ratio, pos) / (2.0 * params.A)
    eta1 = -math.expm1(math.log(ratio)) / (2.0 * params.A)
    vals = np.where(j_arr == 0, eta1 / params.A, vals)
    return float(vals) if np.isscalar(j) else vals


def theta1(params: TheoryParams, j):
    """Lower edge of the ideal rate band for fitness level j: b * eta(j)."""
    return params.b * eta(params, j)


def theta2(params: TheoryParams, j):
    """Upper edge of the ideal rate band for fitness level j.

    For j >= 1 this is 1 - q**(1/j), the rate above which the expected
    number of offspring that keep j leading ones falls below (1-zeta)
    per top-ranked parent; j = 0 is defined as theta2(1) / b and exceeds 1/2.
    """
    j_arr = np.asarray(j)
    if np.any(j_arr < 0):
        raise ValueError("j must be >= 0")
    pos = np.maximum(j_arr, 1)
    vals = _one_minus_pow(params.q, pos)
    t2_1 = -math.expm1(math.log(params.q))
    vals = np.where(j_arr == 0, t2_1 / params.b, vals)
    return float(vals) if np.isscalar(j) else vals


def _depth_from_theta1(t1: float, eps: float, A: float) -> int:
    ratio = t1 / eps
    if ratio <= 1.0:
        return 1
    d = max(1, math.ceil(math.log(ratio) / math.log(A)))
    # Settle float boundary cases against the same powers used elsewhere.
    while eps * A ** d < t1:
        d += 1
    while d > 1 and eps * A ** (d - 1) >= t1:
        d -= 1
    return d


def depth(params: TheoryParams, j: int) -> int:
    """Number of rate bands at fitness level j.

    The smallest positive integer d with epsilon * A**d >= theta1(j): how
    many multiplicative increases by A climb from epsilon to the ideal band.
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    return _depth_from_theta1(theta1(params, j), params.epsilon, params.A)


@lru_cache(maxsize=16)
def _level_tables(params: TheoryParams):
    """Per-fitness threshold and depth tables for j = 0..k, plus A-powers."""
    levels = np.arange(params.k + 1)
    t1 = np.atleast_1d(theta1(params, levels))
    t2 = np.atleast_1d(theta2(params, levels))
    depths = np.array([_depth_from_theta1(float(v), params.epsilon, params.A)
                       for v in t1], dtype=np.int64)
    powers = params.epsilon * params.A ** np.arange(int(depths.max()) + 1)
    return t1, t2, depths, powers


def classify(params: TheoryParams, j: int, rate: float) -> LevelIndex:
    """Unique band of the partition containing fitness j at the given rate.

    Rates below theta1(j) fall in a low band of level j (the topmost low
    band absorbs everything up to theta1(j)); rates in [theta1(j),
    min(1/2, theta2(j))] fall in the edge band (j, depth(j)); rates above
    that are unsustainable at fitness j and belong to the edge band of the
    largest fitness level that can still support them.
    """
    k = params.k
    if not 0 <= j <= k:
        raise ValueError(f"fitness level must be in [0, k] = [0, {k}], got {j}")
    eps = params.epsilon
    if rate < eps or rate > 0.5:
        raise ValueError(f"rate must lie in [{eps}, 0.5], got {rate}")
    if j == k:
        return LevelIndex(k, 1)
    t1, t2, depths, powers = _level_tables(params)

    if rate > min(0.5, t2[j]):
        # Largest j' < j whose edge band still contains this rate; theta2
        # decreases in j and theta2(0) > 1/2, so the search cannot fail.
        lo, hi = 0, j - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if rate <= min(0.5, t2[mid]):
                lo = mid
            else:
                hi = mid - 1
        return LevelIndex(lo, int(depths[lo]))

    d = int(depths[j])
    if rate >= t1[j] or d == 1:
        return LevelIndex(j, d)

    band = int(math.floor(math.log(rate / eps) / math.log(params.A))) + 1
    band = max(1, min(band, d - 1))
    while band > 1 and rate < powers[band - 1]:
        band -= 1
    while band < d - 1 and rate >= powers[band]:
        band += 1
    return LevelIndex(j, band)


def classify_chromosome(params: TheoryParams, chromosome, j: int) -> LevelIndex:
    """classify() for a Chromosome value (rate taken as chi / n)."""
    return classify(params, j, chromosome.chi / params.n)


def in_bad_region(params: TheoryParams, j: int, rate: float) -> bool:
    """True when the rate is too high to sustain fitness level j.

    Membership is rate > theta2(j); equivalently the survival probability
    (1 - rate)**j is below (1-zeta)/alpha0 = q (see in_bad_region_by_survival).
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    if rate < params.epsilon or rate > 0.5:
        raise ValueError(f"rate must lie in [{params.epsilon}, 0.5], got {rate}")
    return rate > theta2(params, j)


def in_bad_region_by_survival(params: TheoryParams, j: int, chi: float) -> bool:
    """Survival-probability form of the high-rate region membership test."""
    return bool(survival_prob(j, chi, params.n) < params.q)


def bad_region_counts(params: TheoryParams, fitness: np.ndarray, rates: np.ndarray) -> int:
    """Number of (fitness, rate) pairs inside the unsustainable region."""
    _, t2, _, _ = _level_tables(params)
    return int(np.count_nonzero(rates > t2[fitness]))


def error_threshold(alpha0: float, j):
    """Rate where the top parent expects one fitness-preserving offspring.

    1 - alpha0**(-1/j) for j >= 1; at fitness 0 every offspring preserves
    fitness, so the threshold is 1.
    """
    if alpha0 <= 1.0:
        raise ValueError("alpha0 must exceed 1")
    j_arr = np.asarray(j)
    if np.any(j_arr < 0):
        raise ValueError("j must be >= 0")
    pos = np.maximum(j_arr, 1)
    vals = -np.expm1(-math.log(alpha0) / np.asarray(pos, dtype=np.float64))
    vals = np.where(j_arr == 0, 1.0, vals)
    return float(vals) if np.isscalar(j) else vals


def level_based_bound(m: int, z: Sequence[float], delta: float, gamma0: float,
                      lam: int) -> tuple[float, float]:
    """Expected-runtime upper bound and minimum workable population size.

    Given m levels with per-level upgrade probability lower bounds z (one per
    transition, so len(z) == m - 1), returns

      bound  = (8/delta**2) * sum_j (lam*ln(6*delta*lam/(4+z_j*delta*lam)) + 1/z_j)
      lam_min = (4/(gamma0*delta**2)) * ln(128*m / (min(z)*delta**2))
    """
    z_arr = np.asarray(z, dtype=np.float64)
    if z_arr.size == 0:
        raise ValueError("z must contain at least one level bound")
    if m != z_arr.size + 1:
        raise ValueError(f"m must equal len(z) + 1, got m={m}, len(z)={z_arr.size}")
    if np.any(z_arr <= 0.0) or np.any(z_arr > 1.0):
        raise ValueError("every z_j must lie in (0, 1]")
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    if not 0.0 < gamma0 < 1.0:
        raise ValueError("gamma0 must lie in (0, 1)")
    if lam < 1:
        raise ValueError("lam must be >= 1")
    terms = lam * np.log(6.0 * delta * lam / (4.0 + z_arr * delta * lam)) + 1.0 / z_arr
    bound = float((8.0 / delta ** 2) * terms.sum())
    z_star = float(z_arr.min())
    lam_min = (4.0 / (gamma0 * delta ** 2)) * math.log(128.0 * m / (z_star * delta ** 2))
    return bound, lam_min


def log_power_bound_holds(c: float, j: float) -> bool:
    """Check 1 - c**(1/j) <= ln(1/c) / j, which holds for all c > 0, j > 0.

    This is the direction supported by ln(x) <= x - 1 applied to x =
    c**(1/j), with equality exactly at c = 1; the reversed inequality fails
    (for instance c = 1/4, j = 2 gives 0.5 on the left and ln(4)/2 = 0.693
    on the right).
    """
    if c <= 0 or j <= 0:
        raise ValueError("c and j must be positive")
    lhs = -math.expm1(math.log(c) / j)
    rhs = math.log(1.0 / c) / j
    return lhs <= rhs + 1e-15 * abs(rhs)


def level_count(params: TheoryParams) -> int:
    """Total number of bands in the partition: sum of depths plus the optimum."""
    return sum(depth(params, j) for j in range(params.k)) + 1
