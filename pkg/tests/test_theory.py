import math

import mpmath as mp
import numpy as np
import pytest

from mulambda.bitstrings import Chromosome, bits
from mulambda.theory import (LevelIndex, classify, classify_chromosome, depth,
                             error_threshold, eta, feasible_delta_upper,
                             in_bad_region, in_bad_region_by_survival,
                             level_based_bound, level_count,
                             log_power_bound_holds, make_params, survival_prob,
                             theta1, theta2, validate_params)

mp.mp.dps = 40


def mp_constants(alpha0, p_inc, delta):
    alpha0, p_inc, delta = map(mp.mpf, (str(alpha0), str(p_inc), str(delta)))
    r0 = (1 + delta) / (alpha0 * (1 - p_inc))
    zeta = 1 - alpha0 * r0 ** (1 + mp.sqrt(r0))
    q = (1 - zeta) / alpha0
    return r0, zeta, q


# ---------------------------------------------------------------------------
# validate_params

def test_validate_comparison_setup():
    # alpha0 = 15, p_inc = 0.25: 1/16 < 1/15 < 1/4 < 2/5 and b = 0.7 is
    # below the b-limit (~0.766 at delta = 0.05).
    params = validate_params(1000, 150, 10, A=1.2, b=0.7, p_inc=0.25, delta=0.05)
    assert not isinstance(params, list)
    assert params.alpha0 == 15
    assert 0.7 <= 1 / (1 + math.sqrt(params.r0))


def test_validate_derived_r0_exact():
    params = validate_params(1000, 96, 12, A=1.2, b=0.7, p_inc=0.25, delta=0.05)
    assert not isinstance(params, list)
    assert params.alpha0 == 8
    assert params.r0 == pytest.approx(1.05 / 6, abs=1e-15)


def test_validate_low_alpha0_violation():
    result = validate_params(100, 12, 4, A=1.5, b=0.7, p_inc=0.3, delta=0.05)
    assert isinstance(result, list)
    assert any("alpha0 >= 4" in v for v in result)


def test_validate_collects_each_violation():
    result = validate_params(100, 12, 4, A=0.9, b=0.99, p_inc=0.6, delta=0.5)
    assert isinstance(result, list)
    text = " / ".join(result)
    assert "A > 1" in text and "p_inc" in text and "delta" in text and "b" in text


def test_validate_reports_feasible_delta_for_b():
    result = validate_params(100, 20, 5, A=1.5, b=0.78, p_inc=0.25, delta=0.05)
    assert isinstance(result, list)
    assert any("feasible delta" in v for v in result)
    upper = feasible_delta_upper(4.0, 0.78, 0.25)
    assert upper < 0.05


def test_validate_mu_bounds():
    result = validate_params(100, 10, 12, A=1.5, b=0.7, p_inc=0.25)
    assert isinstance(result, list)


def test_derived_constants_in_range_on_valid_sets():
    for lam, mu, p_inc, delta in ((99, 12, 0.25, 0.05), (50, 3, 0.25, 0.09),
                                  (60, 4, 0.39, 0.01)):
        params = validate_params(500, lam, mu, A=1.2, b=0.7, p_inc=p_inc,
                                 delta=delta)
        assert not isinstance(params, list), params
        assert 0 < params.q < params.r0 < 1


# ---------------------------------------------------------------------------
# survival probability

def test_survival_empty_product():
    assert survival_prob(0, 3.0, 10) == 1.0
    assert survival_prob(0, 0.0, 10) == 1.0


def test_survival_direct_arithmetic():
    assert survival_prob(2, 25.0, 100) == pytest.approx(9 / 16, rel=1e-12)


def test_survival_high_precision_point():
    # (0.99)^100, frozen from a 40-digit evaluation.
    assert survival_prob(100, 1.0, 100) == pytest.approx(0.36603234127323, rel=1e-11)


def test_survival_vectorized_and_bounds():
    vals = survival_prob(np.array([0, 1, 5]), np.array([0.0, 50.0, 50.0]), 100)
    assert vals.shape == (3,)
    assert np.all((0 <= vals) & (vals <= 1))
    with pytest.raises(ValueError):
        survival_prob(-1, 1.0, 10)
    with pytest.raises(ValueError):
        survival_prob(1, 11.0, 10)


# ---------------------------------------------------------------------------
# thresholds

def test_threshold_constants_frozen_point():
    # alpha0=4, p_inc=0.25, delta=0.05, frozen from 40-digit evaluation:
    # zeta = 0.2476930860..., q = 0.1880767284..., theta2(1) = 0.8119232715...
    params = make_params(n=100, alpha0=4.0, A=1.5, b=0.7, p_inc=0.25, delta=0.05)
    assert params.zeta == pytest.approx(0.247693086047, abs=1e-11)
    assert params.q == pytest.approx(0.188076728488, abs=1e-11)
    assert theta2(params, 1) == pytest.approx(0.811923271512, abs=1e-11)


def test_theta1_is_b_times_eta():
    params = make_params(n=500, alpha0=8.25, A=1.2, b=0.7, p_inc=0.25)
    for j in (0, 1, 2, 17, 400):
        assert theta1(params, j) == pytest.approx(params.b * eta(params, j), rel=1e-15)


def test_theta2_zero_level_identity():
    params = make_params(n=500, alpha0=8.25, A=1.2, b=0.7, p_inc=0.25)
    assert theta2(params, 0) == pytest.approx(theta2(params, 1) / params.b, rel=1e-14)


def test_eta_zero_level_identity():
    params = make_params(n=500, alpha0=8.25, A=1.2, b=0.7, p_inc=0.25)
    assert eta(params, 0) == pytest.approx(eta(params, 1) / params.A, rel=1e-14)


def test_thresholds_match_arbitrary_precision_at_large_j():
    # The expm1 evaluation must agree with a 40-digit oracle to 12 digits
    # even at j = 1e5 where q**(1/j) is within 2e-5 of 1.
    params = make_params(n=500, alpha0=8.25, A=1.2, b=0.7, p_inc=0.25, delta=0.05)
    _, _, q = mp_constants(8.25, 0.25, 0.05)
    ratio = (1 + mp.mpf("0.05")) / (mp.mpf("8.25") * mp.mpf("0.25"))
    for j in (10, 1000, 10 ** 5):
        exact_t2 = 1 - q ** (mp.mpf(1) / j)
        assert abs(theta2(params, j) - float(exact_t2)) <= 1e-12 * float(exact_t2)
        exact_eta = (1 - ratio ** (mp.mpf(1) / j)) / (2 * mp.mpf("1.2"))
        assert abs(eta(params, j) - float(exact_eta)) <= 1e-12 * float(exact_eta)


def test_thresholds_reject_negative_level():
    params = make_params(n=100, alpha0=8.0, A=1.2, b=0.7, p_inc=0.25)
    with pytest.raises(ValueError):
        eta(params, -1)
    with pytest.raises(ValueError):
        theta2(params, -1)


# ---------------------------------------------------------------------------
# depth

def test_depth_floor_is_one():
    # With theta1(j) <= epsilon*A the minimum positive integer 1 is returned.
    params = make_params(n=500, alpha0=8.25, A=1.2, b=0.7, p_inc=0.25,
                         epsilon=0.4)
    assert depth(params, 5) == 1


def test_depth_matches_linear_scan():
    params = make_params(n=500, alpha0=15.0, A=1.5, b=0.7, p_inc=0.25,
                         delta=0.05)
    for j in (0, 1, 2, 5, 10, 50, 200, 499):
        t1 = theta1(params, j)
        ell = 1
        while params.epsilon * params.A ** ell < t1:
            ell += 1
        assert depth(params, j) == ell


def test_depth_non_increasing_in_level():
    params = make_params(n=500, alpha0=15.0, A=1.5, b=0.7, p_inc=0.25)
    depths = [depth(params, j) for j in range(1, 400)]
    assert all(a >= b for a, b in zip(depths, depths[1:]))


# ---------------------------------------------------------------------------
# classify / bad region

@pytest.fixture(scope="module")
def params_k20():
    params = validate_params(500, 99, 12, A=1.2, b=0.7, p_inc=0.25, delta=0.05,
                             k=20)
    assert not isinstance(params, list)
    return params


def test_classify_optimum_level(params_k20):
    for rate in (params_k20.epsilon, 0.01, 0.5):
        assert classify(params_k20, 20, rate) == LevelIndex(20, 1)


def test_classify_minimum_rate_is_lowest_band(params_k20):
    assert classify(params_k20, 5, params_k20.epsilon) == LevelIndex(5, 1)


def test_classify_edge_band_inclusive_boundaries(params_k20):
    j = 5
    lo = theta1(params_k20, j)
    hi = min(0.5, theta2(params_k20, j))
    d = depth(params_k20, j)
    assert classify(params_k20, j, lo) == LevelIndex(j, d)
    assert classify(params_k20, j, hi) == LevelIndex(j, d)


def test_classify_demotes_high_rate_to_supporting_level(params_k20):
    # Above theta2(j) the point belongs to the edge band of the largest
    # level whose band still contains the rate.
    j = 15
    rate = min(0.5, theta2(params_k20, j)) * 1.05
    assert rate <= 0.5
    level = classify(params_k20, j, rate)
    assert level.fitness < j
    assert level.band == depth(params_k20, level.fitness)
    assert rate <= min(0.5, theta2(params_k20, level.fitness))
    assert rate > min(0.5, theta2(params_k20, level.fitness + 1))


def test_classify_rate_domain_errors(params_k20):
    with pytest.raises(ValueError):
        classify(params_k20, 3, params_k20.epsilon / 2)
    with pytest.raises(ValueError):
        classify(params_k20, 3, 0.51)
    with pytest.raises(ValueError):
        classify(params_k20, 21, 0.1)


def test_classify_chromosome_uses_rate(params_k20):
    chrom = Chromosome(bits("1" * 500), chi=500 * params_k20.epsilon)
    assert classify_chromosome(params_k20, chrom, 5) == LevelIndex(5, 1)


def test_bad_region_never_at_level_zero(params_k20):
    # theta2(0) > 1/2, so no admissible rate is too high for fitness 0.
    assert theta2(params_k20, 0) > 0.5
    for rate in (params_k20.epsilon, 0.25, 0.5):
        assert not in_bad_region(params_k20, 0, rate)


def test_bad_region_definition_boundary(params_k20):
    j = 18
    t2 = theta2(params_k20, j)
    assert t2 < 0.5
    assert not in_bad_region(params_k20, j, t2)
    assert in_bad_region(params_k20, j, 0.5)


def test_bad_region_two_characterizations_agree(params_k20):
    # Rate form and survival-probability form on 1e5 random samples.
    rng = np.random.default_rng(99)
    n = params_k20.n
    rates = rng.uniform(params_k20.epsilon, 0.5, size=100_000)
    levels = rng.integers(0, params_k20.k + 1, size=100_000)
    for j, rate in zip(levels[:2000], rates[:2000]):
        a = in_bad_region(params_k20, int(j), float(rate))
        b = in_bad_region_by_survival(params_k20, int(j), float(rate) * n)
        assert a == b
    # Vectorized cross-check over the full sample.
    t2 = theta2(params_k20, np.arange(params_k20.k + 1))
    rate_form = rates > t2[levels]
    survival_form = survival_prob(levels, rates * n, n) < params_k20.q
    assert np.array_equal(rate_form, survival_form)


def test_level_count_matches_depth_sum(params_k20):
    assert level_count(params_k20) == sum(
        depth(params_k20, j) for j in range(20)) + 1


# ---------------------------------------------------------------------------
# runtime bound

def test_level_bound_frozen_example():
    # m=2, delta=0.5, lam=10, z=[0.1]: 32*(10*ln(30/4.5) + 10), frozen from
    # a 40-digit evaluation.
    bound, lam_min = level_based_bound(2, [0.1], 0.5, 0.25, 10)
    assert bound == pytest.approx(927.078395163, abs=1e-6)


def test_level_bound_minimum_lambda_formula():
    _, lam_min = level_based_bound(3, [0.5, 0.1], 0.5, 0.2, 10)
    expected = (4 / (0.2 * 0.25)) * math.log(128 * 3 / (0.1 * 0.25))
    assert lam_min == pytest.approx(expected, rel=1e-12)


def test_level_bound_uses_min_z():
    b1, m1 = level_based_bound(4, [0.5, 0.1, 0.3], 0.5, 0.25, 10)
    b2, m2 = level_based_bound(4, [0.1, 0.1, 0.1], 0.5, 0.25, 10)
    assert m1 == m2  # z* = 0.1 in both


def test_level_bound_monotone_in_z():
    z = [0.2, 0.05, 0.4]
    lo, _ = level_based_bound(4, z, 0.5, 0.25, 20)
    hi, _ = level_based_bound(4, [min(1.0, 2 * v) for v in z], 0.5, 0.25, 20)
    assert hi <= lo


def test_level_bound_parameter_errors():
    with pytest.raises(ValueError):
        level_based_bound(1, [], 0.5, 0.25, 10)
    with pytest.raises(ValueError):
        level_based_bound(2, [1.5], 0.5, 0.25, 10)
    with pytest.raises(ValueError):
        level_based_bound(2, [0.1], 0.0, 0.25, 10)
    with pytest.raises(ValueError):
        level_based_bound(2, [0.1], 0.5, 1.0, 10)
    with pytest.raises(ValueError):
        level_based_bound(2, [0.1], 0.5, 0.25, 0)
    with pytest.raises(ValueError):
        level_based_bound(3, [0.1], 0.5, 0.25, 10)


# ---------------------------------------------------------------------------
# the power-log inequality

def test_power_log_bound_equality_at_one():
    assert log_power_bound_holds(1.0, 3)


def test_power_log_bound_fixture_quarter():
    # c=0.25, j=2: 1 - c^(1/j) = 0.5 while ln(1/c)/j = 0.693...; the "<="
    # direction holds and the reversed ">=" reading fails.
    assert log_power_bound_holds(0.25, 2)
    lhs = 1 - 0.25 ** 0.5
    rhs = math.log(4) / 2
    assert not lhs >= rhs


def test_power_log_bound_fixture_inverse_e():
    assert log_power_bound_holds(math.exp(-1), 1)
    assert not (1 - math.exp(-1)) >= 1.0


def test_power_log_bound_random_grid():
    rng = np.random.default_rng(5)
    for _ in range(2000):
        c = float(rng.uniform(0.001, 3.0))
        j = float(rng.uniform(0.01, 1e5))
        assert log_power_bound_holds(c, j)


# ---------------------------------------------------------------------------
# error threshold

def test_error_threshold_values():
    # 1 - alpha0^(-1/j); frozen point for alpha0 = 50/3 at j = 100.
    assert error_threshold(50 / 3, 100) == pytest.approx(0.0277420287, abs=1e-9)
    assert error_threshold(50 / 3, 0) == 1.0


def test_error_threshold_decreasing():
    vals = error_threshold(8.25, np.arange(1, 500))
    assert np.all(np.diff(vals) < 0)


def test_error_threshold_requires_pressure():
    with pytest.raises(ValueError):
        error_threshold(1.0, 5)
