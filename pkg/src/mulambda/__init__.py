"""Self-adaptive (mu, lambda) EA, analysis toolbox, and benchmark harness."""

from .algorithms import (Population, RunRecord, SelfAdaptiveConfig, TraceRecord,
                         adapt_chi, rank, run_mu_lambda_static, run_one_plus_one,
                         run_one_plus_one_alpha, run_self_adaptive,
                         step_self_adaptive)
from .bitstrings import (Chromosome, RngStream, bits, hamming, mutate,
                         random_bitstring)
from .fitness import (CountingEvaluator, FitnessFunction, jump_k,
                      leading_ones_k, make_instance, onemax_subset, substring_k)
from .theory import (LevelIndex, TheoryParams, classify, classify_chromosome,
                     depth, error_threshold, eta, in_bad_region,
                     in_bad_region_by_survival, level_based_bound,
                     log_power_bound_holds, survival_prob, theta1, theta2,
                     validate_params)

__all__ = [
    "Chromosome", "CountingEvaluator", "FitnessFunction", "LevelIndex",
    "Population", "RngStream", "RunRecord", "SelfAdaptiveConfig",
    "TheoryParams", "TraceRecord", "adapt_chi", "bits", "classify",
    "classify_chromosome", "depth", "error_threshold", "eta", "hamming",
    "in_bad_region", "in_bad_region_by_survival", "jump_k", "leading_ones_k",
    "level_based_bound", "log_power_bound_holds", "make_instance", "mutate",
    "onemax_subset", "rank", "random_bitstring", "run_mu_lambda_static",
    "run_one_plus_one", "run_one_plus_one_alpha", "run_self_adaptive",
    "step_self_adaptive", "substring_k", "survival_prob", "theta1", "theta2",
    "validate_params",
]
