"""Seeded RNG streams, goodness-of-fit utilities and test reports."""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy import stats as sps

SCHEMA_VERSION = 1

# Generator identity is pinned for reproducibility: Philox4x64 keyed by
# (seed, stream_id).  Philox is counter-based, so distinct keys give
# independent streams without jump-ahead bookkeeping.


def rng_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent reproducible stream: same (seed, stream_id) -> same
    sequence; distinct stream_ids -> statistically independent sequences."""
    key = ((int(seed) & 0xFFFFFFFFFFFFFFFF) << 64) | (int(stream_id) & 0xFFFFFFFFFFFFFFFF)
    return np.random.Generator(np.random.Philox(key=key))


def ks_statistic(samples: np.ndarray, cdf) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov statistic against a callable CDF.

    Input must be sorted and of size >= 20.  The p-value uses the asymptotic
    Kolmogorov distribution with the Stephens small-sample correction
    sqrt(n) + 0.12 + 0.11/sqrt(n).
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size < 20:
        raise ValueError("ks_statistic: need at least 20 samples")
    if np.any(np.diff(samples) < 0):
        raise ValueError("ks_statistic: samples must be sorted")
    n = samples.size
    f = np.asarray(cdf(samples), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    d = float(max(d_plus, d_minus))
    sn = np.sqrt(n)
    pvalue = float(special.kolmogorov(d * (sn + 0.12 + 0.11 / sn)))
    return d, pvalue


def ks_critical(n: int, level: float = 0.01) -> float:
    """Asymptotic critical KS distance at the given level (1.63/sqrt(n) at 1%)."""
    return special.kolmogi(level) / np.sqrt(n)


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    res = sps.ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


def poisson_zscore(total_count: float, expected_total: float) -> float:
    """Normal-approximation z-score of a Poisson total against its mean."""
    if expected_total <= 0:
        return 0.0
    return float((total_count - expected_total) / np.sqrt(expected_total))


def mean_with_se(x: np.ndarray) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    return float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size))


@dataclass
class TestReport:
    """Statistics of one experiment run; serializes to versioned JSON.

    Every estimate entry is a dict carrying at least value, stderr and n.
    """

    __test__ = False        # not a pytest test class despite the name

    experiment: str
    seed: int
    passed: bool
    statistics: dict = field(default_factory=dict)
    estimates: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    wall_time: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def add_estimate(self, name: str, value: float, stderr: float, n: int) -> None:
        self.estimates[name] = {"value": float(value), "stderr": float(stderr),
                                "n": int(n)}

    def to_json(self, path=None) -> str:
        def default(o):
            if isinstance(o, np.ndarray):
                return o.tolist()
            if isinstance(o, (np.floating, np.integer)):
                return o.item()
            if isinstance(o, (np.bool_,)):
                return bool(o)
            raise TypeError(f"not serializable: {type(o)}")

        payload = dataclasses.asdict(self)
        text = json.dumps(payload, indent=2, sort_keys=True, default=default)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
