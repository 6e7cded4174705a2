import math

import pytest

import rcsbench


def test_spin_anchor_and_limit():
    assert rcsbench.expected_overlap_sq(8, 1, "XIIIIIII") == pytest.approx(0.2, abs=1e-12)
    assert rcsbench.expected_overlap_sq(8, 200, "XIIIIIII") == pytest.approx(1 / 257, abs=1e-9)
    assert rcsbench.haar_limit(8) == pytest.approx(1 / 257)


def test_circuit_probabilities_and_estimators():
    c = rcsbench.sample_circuit(4, 6, seed=3)
    assert c["n"] == 4 and c["depth"] == 6
    p = rcsbench.ideal_probabilities(c)
    assert len(p) == 16
    assert math.fsum(p) == pytest.approx(1.0, abs=1e-12)
    assert rcsbench.uxeb_full(p, p) == pytest.approx(1.0, abs=1e-12)
    assert rcsbench.uxeb_full([1 / 16] * 16, p) == pytest.approx(0.0, abs=1e-12)


def test_benchmark_round_trip():
    config = {"n": 4, "depths": "2:6", "circuits": 4, "noise": {"preset": "pauli_x", "lambda": 0.1}, "seed": 9}
    a = rcsbench.run_benchmark(config)
    b = rcsbench.run_benchmark(dict(reversed(list(config.items()))))
    assert a == b
    assert a["lambda_true"] == pytest.approx(0.1)
    assert rcsbench.config_hash(config) == rcsbench.config_hash(dict(reversed(list(config.items()))))


def test_config_errors_raise():
    with pytest.raises(rcsbench.ConfigError):
        rcsbench.run_benchmark({"n": 4, "depths": [1, 2], "unknown": 1})
    with pytest.raises(ValueError):
        rcsbench.run_benchmark({"n": 5, "depths": [1, 2]})
