import math

import pytest

from mulambda.algorithms import SelfAdaptiveConfig
from mulambda.harness import round_to_int
from mulambda.theory import validate_params


def first_set_sizes(n: int) -> tuple[int, int]:
    lam = round_to_int(8 * math.log(n))
    return lam, max(1, round_to_int(lam / 15))


def second_set_sizes(n: int) -> tuple[int, int]:
    lam = round_to_int(16 * math.log(n))
    return lam, max(1, round_to_int(lam / 8))


def first_set_config(n: int) -> SelfAdaptiveConfig:
    lam, mu = first_set_sizes(n)
    return SelfAdaptiveConfig(lam=lam, mu=mu, A=1.5, b=0.7, p_inc=0.25)


def second_set_config(n: int) -> SelfAdaptiveConfig:
    lam, mu = second_set_sizes(n)
    return SelfAdaptiveConfig(lam=lam, mu=mu, A=1.2, b=0.7, p_inc=0.25)


@pytest.fixture(scope="session")
def second_set_params_n500():
    """Validated analysis parameters for the n=500 comparison setup."""
    lam, mu = second_set_sizes(500)
    params = validate_params(500, lam, mu, A=1.2, b=0.7, p_inc=0.25, delta=0.05)
    assert not isinstance(params, list), params
    return params
