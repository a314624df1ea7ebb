import hashlib
import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from skycast.config import load_config
from skycast.schema.network import NetworkConfig
from skycast.schema.site import GOLDEN
from skycast.schema.synth import SynthConfig
from skycast.synth import generate

RUN_SLOW = os.getenv("SKYCAST_RUN_SLOW", "0") == "1"
NREL_CSV = os.getenv("SKYCAST_NREL_CSV")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale statistical runs (SKYCAST_RUN_SLOW=1)")
    config.addinivalue_line("markers", "fulldata: NREL SRRL full-data checks (SKYCAST_NREL_CSV=<export>)")


def pytest_collection_modifyitems(config, items):
    skip_slow = pytest.mark.skip(reason="set SKYCAST_RUN_SLOW=1 to run")
    skip_full = pytest.mark.skip(reason="set SKYCAST_NREL_CSV to an NREL SRRL export to run")
    for item in items:
        if "slow" in item.keywords and not RUN_SLOW:
            item.add_marker(skip_slow)
        if "fulldata" in item.keywords and not (NREL_CSV and os.path.exists(NREL_CSV)):
            item.add_marker(skip_full)


@pytest.fixture
def golden():
    return GOLDEN


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def clear_month():
    """Thirty cloud-free days: CSI is 1 at every step."""
    config = SynthConfig(n_days=30, seed=3, p_clear_to_cloudy=0.0, p_cloudy_to_clear=0.0)
    return generate(config)


@pytest.fixture(scope="session")
def small_synth():
    """Six days of Markov sky, enough for two short split steps."""
    return generate(SynthConfig(n_days=6, seed=7, start="2021-06-01"))


@pytest.fixture
def tiny_net_config():
    return NetworkConfig(input_features=3, seq_len=2, noise_width=2, dropout_rate=0.0,
                         conv_filters=4, conv_kernel=3, lstm_hidden=4, dense_hidden=4, output_len=3)


FAST_OVERRIDES = [
    "splits.initial_train_days=3",
    "splits.validate_days=1",
    "splits.n_steps=2",
    "training.max_epochs=2",
    "training.fast_epochs=2",
    "training.batch_size=64",
    "network.conv_filters=8",
    "network.lstm_hidden=8",
    "network.dense_hidden=16",
    "network.noise_width=4",
    "workers=1",
]


@pytest.fixture
def fast_config():
    """Shipped defaults shrunk for the six-day synthetic table."""
    return load_config(None, FAST_OVERRIDES)


def param_digest(net) -> str:
    """sha256 over the network parameters, in name order."""
    digest = hashlib.sha256()
    for name in sorted(net.params):
        digest.update(name.encode())
        digest.update(np.ascontiguousarray(net.params[name]).tobytes())
    return digest.hexdigest()
