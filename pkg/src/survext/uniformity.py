"""Goodness-of-fit testing for U(0, b): the T_n statistic, five competitors,
Monte Carlo critical values and a power-study harness.

T_n is computed on raw data.  The competitors (KS, AD, CM, TB, TU) assume data
on [0, 1].  All statistics reject for large values except TB, an entropy
estimate that is maximal under uniformity and rejects for small values.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from survext import kernels
from survext.distributions import DistributionSpec, make_model, sample_batch
from survext.errors import DomainError, MissingCriticalValue, WindowError, ZeroMean
from survext.replication import replicate

STATISTICS = ("Tn", "KS", "AD", "CM", "TB", "TU")
LEFT_TAILED = frozenset({"TB"})
WINDOWED = frozenset({"TB", "TU"})
CM_NOTE = "Cramer-von Mises uses squared deviations (X_(i) - (2i-1)/(2n))^2"

_NULL, _ALT = 0, 1


def tail(statistic: str) -> str:
    return "left" if statistic in LEFT_TAILED else "right"


def default_window(n: int) -> int:
    """round(sqrt(n) + 0.5) with halves rounded up, capped so that m < n/2."""
    m = int(math.floor(math.sqrt(n) + 1.0))
    m = min(m, (n - 1) // 2)
    if m < 1:
        raise WindowError(f"no admissible window size for n={n}")
    return m


def _window(n: int, m: int | None) -> int:
    if m is None:
        return default_window(n)
    if not (1 <= m and 2 * m < n):
        raise WindowError(f"window size must satisfy 1 <= m < n/2, got m={m}, n={n}")
    return int(m)


def _unit(sample) -> np.ndarray:
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    if x.size == 0:
        raise DomainError("empty sample")
    if x[0] < 0 or x[-1] > 1 or not np.all(np.isfinite(x)):
        raise DomainError("competitor statistics need data in [0, 1]")
    return x


def t_n(sample) -> float:
    """sum(x^2) / (8 n mean) - mean / 6."""
    x = np.asarray(sample, dtype=float).ravel()
    mean = x.sum() / x.size
    if mean == 0:
        raise ZeroMean("T_n is undefined for a sample with zero mean")
    return float(kernels.statistic_batch("Tn", np.ascontiguousarray(x[None, :]))[0])


def _one(name, sample, m=0):
    x = _unit(sample)
    return float(kernels.statistic_batch(name, x[None, :].copy(), m)[0])


def ks(sample) -> float:
    return _one("KS", sample)


def ad(sample) -> float:
    return _one("AD", sample)


def cm(sample) -> float:
    return _one("CM", sample)


def tb(sample, m: int | None = None) -> float:
    x = _unit(sample)
    return _one("TB", x, _window(x.size, m))


def tu(sample, m: int | None = None) -> float:
    x = _unit(sample)
    return _one("TU", x, _window(x.size, m))


def compute_statistic(name: str, sample, m: int | None = None) -> float:
    if name == "Tn":
        return t_n(sample)
    if name in WINDOWED:
        return {"TB": tb, "TU": tu}[name](sample, m)
    if name in ("KS", "AD", "CM"):
        return _one(name, sample)
    raise ValueError(f"unknown statistic {name!r}")


def rescale_unit(sample) -> np.ndarray:
    """Divide by the estimated upper bound 2 * mean and clip to [0, 1]."""
    x = np.asarray(sample, dtype=float)
    b = 2.0 * x.mean()
    if b <= 0:
        raise ZeroMean("cannot rescale a sample with zero mean")
    return np.clip(x / b, 0.0, 1.0)


# --- results and tables -----------------------------------------------------------------

@dataclass(frozen=True)
class TestResult:
    statistic_name: str
    value: float
    n: int
    alpha: float
    critical_value: float
    reject: bool
    tail: str = "right"

    __test__ = False  # not a pytest class


@dataclass
class CriticalValueTable:
    statistic_name: str
    entries: dict = field(default_factory=dict)  # (n, alpha) -> quantile
    replications: int = 0
    seed: int = 0
    tail: str = "right"
    windows: dict = field(default_factory=dict)  # n -> m for TB/TU

    def lookup(self, n: int, alpha: float) -> float:
        for (nn, a), v in self.entries.items():
            if nn == n and math.isclose(a, alpha, rel_tol=1e-12):
                return v
        raise MissingCriticalValue(f"no {self.statistic_name} critical value for n={n}, alpha={alpha}")

    def rows(self):
        for (n, a), v in sorted(self.entries.items()):
            yield {"statistic": self.statistic_name, "n": n, "alpha": a, "value": v,
                   "replications": self.replications, "seed": self.seed}

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic_name, "tail": self.tail, "replications": self.replications,
            "seed": self.seed, "windows": {str(k): v for k, v in sorted(self.windows.items())},
            "entries": [{"n": n, "alpha": a, "value": v} for (n, a), v in sorted(self.entries.items())],
        }

    @classmethod
    def from_dict(cls, d: dict) -> CriticalValueTable:
        return cls(
            statistic_name=d["statistic"],
            entries={(int(e["n"]), float(e["alpha"])): float(e["value"]) for e in d["entries"]},
            replications=int(d["replications"]), seed=int(d["seed"]), tail=d.get("tail", "right"),
            windows={int(k): int(v) for k, v in d.get("windows", {}).items()},
        )

    @classmethod
    def load(cls, path) -> list[CriticalValueTable]:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        items = data["tables"] if isinstance(data, dict) and "tables" in data else data
        if isinstance(items, dict):
            items = [items]
        return [cls.from_dict(d) for d in items]


def _quantile(values: np.ndarray, statistic: str, alpha: float) -> float:
    p = alpha if statistic in LEFT_TAILED else 1.0 - alpha
    return float(np.quantile(values, p, method="linear"))


def _stat_columns(X: np.ndarray, statistics, m: int) -> np.ndarray:
    X = np.ascontiguousarray(X)
    return np.column_stack([kernels.statistic_batch(s, X, m) for s in statistics])


def null_statistics(statistics, n: int, replications: int, seed: int, *, window_m: int | None = None,
                    threads: int | None = None) -> np.ndarray:
    """Statistics of ``replications`` U(0,1) samples of size n, one column per statistic."""
    statistics = tuple(statistics)
    needs_sort = any(s != "Tn" for s in statistics)
    m = _window(n, window_m) if WINDOWED & set(statistics) else 0

    def task(rng, count):
        X = rng.random((count, n))
        if needs_sort:
            X.sort(axis=1)
        return _stat_columns(X, statistics, m)

    return replicate(task, replications, seed, _NULL, n, threads=threads, width=len(statistics))


def critical_value_tables(statistics, sample_sizes, alphas, replications: int, seed: int, *,
                          window_m: int | None = None, threads: int | None = None) -> dict:
    """Critical values for several statistics computed on shared null samples."""
    statistics = tuple(statistics)
    tables = {
        s: CriticalValueTable(s, replications=replications, seed=seed, tail=tail(s)) for s in statistics
    }
    for n in sample_sizes:
        vals = null_statistics(statistics, n, replications, seed, window_m=window_m, threads=threads)
        for k, s in enumerate(statistics):
            col = vals[:, k]
            for a in alphas:
                tables[s].entries[(int(n), float(a))] = _quantile(col, s, a)
            if s in WINDOWED:
                tables[s].windows[int(n)] = _window(n, window_m)
    return tables


def critical_values(statistic: str, n: int, alphas, replications: int, seed: int, *,
                    window_m: int | None = None, threads: int | None = None) -> CriticalValueTable:
    if statistic not in STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}")
    return critical_value_tables([statistic], [n], alphas, replications, seed,
                                 window_m=window_m, threads=threads)[statistic]


def run_test(sample, statistic: str, alpha: float, table: CriticalValueTable, *,
             rescale: bool = False, window_m: int | None = None) -> TestResult:
    x = np.asarray(sample, dtype=float).ravel()
    n = x.size
    cv = table.lookup(n, alpha)
    if statistic != "Tn" and rescale:
        x = rescale_unit(x)
    m = table.windows.get(n, window_m) if statistic in WINDOWED else None
    value = compute_statistic(statistic, x, m)
    reject = value <= cv if statistic in LEFT_TAILED else value >= cv
    return TestResult(statistic, value, n, float(alpha), cv, bool(reject), tail(statistic))


# --- power study ----------------------------------------------------------------------------

@dataclass
class PowerStudyConfig:
    alternatives: list
    sample_sizes: list
    alphas: list
    replications: int = 10_000
    seed: int = 0
    statistics: tuple = ("Tn",)
    window_m: int | None = None
    critical_replications: int = 100_000

    def __post_init__(self):
        self.alternatives = [a if isinstance(a, DistributionSpec) else DistributionSpec.parse(a)
                             for a in self.alternatives]
        for s in self.statistics:
            if s not in STATISTICS:
                raise ValueError(f"unknown statistic {s!r}")


@dataclass(frozen=True)
class PowerEstimate:
    statistic: str
    alternative: str
    n: int
    alpha: float
    power: float
    replications: int
    seed: int

    @property
    def std_error(self) -> float:
        return math.sqrt(self.power * (1.0 - self.power) / self.replications)


def _alt_key(spec: DistributionSpec) -> int:
    return zlib.crc32(str(spec).encode())


def power_study(config: PowerStudyConfig, tables: dict | None = None, *,
                threads: int | None = None) -> list[PowerEstimate]:
    """Rejection frequencies for every (alternative, n, alpha, statistic)."""
    stats = tuple(config.statistics)
    if tables is None:
        tables = critical_value_tables(stats, config.sample_sizes, config.alphas,
                                       config.critical_replications, config.seed,
                                       window_m=config.window_m, threads=threads)
    competitors = [s for s in stats if s != "Tn"]
    out = []
    for spec in config.alternatives:
        model = make_model(spec)
        if competitors and not (model.support_hint is not None and model.support_hint <= 1.0):
            raise DomainError(f"alternative {spec} is not supported on [0, 1]; "
                              f"competitor statistics {competitors} need unit-interval data")
        for n in config.sample_sizes:
            m = _window(n, config.window_m) if WINDOWED & set(stats) else 0

            def task(rng, count, n=n, m=m):
                X = sample_batch(model, count, n, rng, sort=bool(competitors))
                return _stat_columns(X, stats, m)

            vals = replicate(task, config.replications, config.seed, _ALT, _alt_key(spec), n,
                             threads=threads, width=len(stats))
            for k, s in enumerate(stats):
                for a in config.alphas:
                    cv = tables[s].lookup(n, a)
                    col = vals[:, k]
                    rej = col <= cv if s in LEFT_TAILED else col >= cv
                    out.append(PowerEstimate(s, str(spec), int(n), float(a), float(np.mean(rej)),
                                             config.replications, config.seed))
    return out
