import pytest

from lemps.dataset import MonthKey, split_train_validation
from lemps.synth import SynthSpec, generate

#: 22 synthetic years, 1996..2017, matching the reference cardinality.
BASE_SPEC = SynthSpec(seed=11, n_years=22, start_year=1996,
                      base_prevalence=0.3, seasonal_amplitude=0.1,
                      trend_per_year=-0.005, noise_sd=0.02, mean_screened=400)

BOUNDARY = MonthKey(2014, 12)


@pytest.fixture(scope="session")
def synth_dataset():
    return generate(BASE_SPEC)


@pytest.fixture(scope="session")
def train_valid(synth_dataset):
    return split_train_validation(synth_dataset, BOUNDARY)
