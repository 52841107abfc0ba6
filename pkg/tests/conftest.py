import numpy as np
import pytest

from esdsim.channels import NoiseRates
from esdsim.sampling import GINIBRE_MIXED, SamplerConfig, StateSampler


def make_sampler(seed, subspace=None, ensemble=GINIBRE_MIXED):
    return StateSampler(SamplerConfig(seed=seed, ensemble=ensemble, subspace=subspace))


def random_rates(sampler, lo=0.0, hi=2.0):
    return NoiseRates(
        sampler.uniform(lo, hi),
        sampler.uniform(lo, hi),
        sampler.uniform(lo, hi),
        sampler.uniform(lo, hi),
    )


def random_hermitian(rng, n=4, scale=1.0):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (g + g.conj().T) / 2.0


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240817)
