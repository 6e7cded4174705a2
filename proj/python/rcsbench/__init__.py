"""Random circuit sampling benchmarks: simulation, fidelity estimators and fits."""

import json

from . import _core
from ._core import (
    ConfigError,
    __version__,
    decay_bound,
    expected_overlap_sq,
    haar_limit,
    uxeb_full,
    uxeb_samples,
    xeb_full,
)

__all__ = [
    "ConfigError",
    "__version__",
    "config_hash",
    "decay_bound",
    "expected_overlap_sq",
    "haar_limit",
    "ideal_probabilities",
    "run_benchmark",
    "sample_circuit",
    "uxeb_full",
    "uxeb_samples",
    "xeb_full",
]


def run_benchmark(config):
    """Run a benchmark described by a config dict and return the report dict."""
    return json.loads(_core.run_benchmark(json.dumps(config)))


def config_hash(config):
    return _core.config_hash(json.dumps(config))


def sample_circuit(n, d, gate_set="haar2q", boundary="ring", seed=0):
    return json.loads(_core.sample_circuit(n, d, gate_set, boundary, seed))


def ideal_probabilities(circuit):
    """Output distribution of a circuit dict (qubit 0 is the most significant bit)."""
    return _core.ideal_probabilities(json.dumps(circuit))
