import json
import math

import numpy as np
import pytest

from ipvt.stats import (SCHEMA_VERSION, TestReport, Timer, ks_critical,
                        ks_statistic, ks_two_sample, mean_with_se,
                        poisson_zscore, rng_stream)


def test_rng_stream_reproducible():
    a = rng_stream(42, 0).uniform(size=10)
    b = rng_stream(42, 0).uniform(size=10)
    assert np.array_equal(a, b)
    c = rng_stream(42, 1).uniform(size=10)
    assert not np.array_equal(a, c)
    d = rng_stream(43, 0).uniform(size=10)
    assert not np.array_equal(a, d)


def test_rng_stream_uniform_marginal():
    u = np.sort(rng_stream(1, 0).uniform(size=100000))
    d, p = ks_statistic(u, lambda v: v)
    assert p > 0.01


def test_rng_streams_uncorrelated():
    n = 10**6
    a = rng_stream(2, 0).uniform(size=n)
    b = rng_stream(2, 1).uniform(size=n)
    corr = float(np.corrcoef(a, b)[0, 1])
    assert abs(corr) <= 3.0 / math.sqrt(n)


def test_ks_statistic_validation():
    with pytest.raises(ValueError):
        ks_statistic(np.linspace(0, 1, 19), lambda v: v)
    with pytest.raises(ValueError):
        ks_statistic(np.array([0.5, 0.2] + [0.9] * 30), lambda v: v)


def test_ks_statistic_degenerate_samples():
    # all mass at one point vs a continuous CDF: distance at least 1/2
    d, p = ks_statistic(np.full(50, 0.5), lambda v: np.asarray(v, float))
    assert d >= 0.5
    assert p < 1e-6


def test_ks_calibration():
    # samples drawn from the reference stay below the 1% critical value
    # in about 99% of trials
    crit = ks_critical(200, 0.01)
    assert crit == pytest.approx(1.6276 / math.sqrt(200), rel=1e-3)
    exceed = 0
    for k in range(1000):
        u = np.sort(rng_stream(3, k).uniform(size=200))
        d, _ = ks_statistic(u, lambda v: v)
        exceed += d > crit
    assert exceed <= 30     # nominal 10, generous Monte Carlo slack


def test_ks_two_sample():
    a = rng_stream(4, 0).normal(size=5000)
    b = rng_stream(4, 1).normal(size=5000)
    d, p = ks_two_sample(a, b)
    assert p > 0.01
    d, p = ks_two_sample(a, b + 1.0)
    assert p < 1e-6


def test_poisson_zscore():
    assert poisson_zscore(110.0, 100.0) == pytest.approx(1.0)
    assert poisson_zscore(5.0, 0.0) == 0.0


def test_mean_with_se():
    m, se = mean_with_se(np.array([1.0, 2.0, 3.0]))
    assert m == pytest.approx(2.0)
    assert se == pytest.approx(1.0 / math.sqrt(3.0))


def test_report_serialization(tmp_path):
    rep = TestReport("demo", 7, True)
    rep.add_estimate("p", 0.5, 0.01, 1000)
    rep.statistics["z"] = np.float64(1.5)
    rep.statistics["arr"] = np.array([1.0, 2.0])
    text = rep.to_json(tmp_path / "r.json")
    data = json.loads(text)
    assert data["schema_version"] == SCHEMA_VERSION
    assert data["estimates"]["p"] == {"value": 0.5, "stderr": 0.01, "n": 1000}
    assert data["statistics"]["arr"] == [1.0, 2.0]
    # deterministic: serializing twice gives identical bytes
    assert rep.to_json() == text


def test_timer():
    with Timer() as t:
        sum(range(1000))
    assert t.elapsed >= 0.0
