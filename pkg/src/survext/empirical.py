"""Plug-in estimators built from empirical survival functions and spacings.

Two survival conventions are used, each matching one estimator family:

* ``STRICT``    S_n(x) = #{X_i >  x} / n   (divergence estimators)
* ``INCLUSIVE`` S_n(x) = #{X_i >= x} / n   (inaccuracy ratio)

Tied observations are kept; they simply contribute zero-width spacings.
"""

from __future__ import annotations

import enum
import math
import zlib
from dataclasses import dataclass

import numpy as np

from survext import kernels
from survext.distributions import make_model, sample_batch
from survext.errors import DataError, DegenerateDenominator, FileError, InvalidParameter, ZeroSurvivalAtT
from survext.replication import replicate


class SurvivalConvention(str, enum.Enum):
    STRICT = "strict"
    INCLUSIVE = "inclusive"


TIE_POLICY = "retain ties; equal order statistics contribute zero spacing"


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    """Sorted batch of finite, non-negative observations (n >= 2)."""

    values: np.ndarray
    tie_policy: str = TIE_POLICY

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size < 2:
            raise DataError(f"an empirical sample needs at least 2 values, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise DataError("sample contains non-finite values")
        if np.any(v < 0):
            raise DataError("sample contains negative values")
        v.sort()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    def scaled(self, c: float) -> EmpiricalSample:
        return EmpiricalSample(self.values * c)


def as_sample(x) -> EmpiricalSample:
    return x if isinstance(x, EmpiricalSample) else EmpiricalSample(x)


def _inclusive(c) -> bool:
    return SurvivalConvention(c) is SurvivalConvention.INCLUSIVE


def empirical_survival(s, x: float, c: SurvivalConvention = SurvivalConvention.STRICT) -> float:
    v = as_sample(s).values
    side = "left" if _inclusive(c) else "right"
    return (v.size - int(np.searchsorted(v, x, side=side))) / v.size


def _check_t(x: np.ndarray, y: np.ndarray, t: float, inclusive: bool):
    for name, v in (("first", x), ("second", y)):
        alive = np.count_nonzero(v >= t) if inclusive else np.count_nonzero(v > t)
        if alive == 0:
            raise ZeroSurvivalAtT(f"empirical survival of the {name} sample is zero at t={t}")


def estimate_sed(x, y) -> float:
    """Plug-in SJ(F|G), evaluated on the order statistics of ``x`` (strict)."""
    return float(kernels.dsed_estimate(as_sample(x).values, as_sample(y).values, -math.inf))


def estimate_dsed(x, y, t: float) -> float:
    """Plug-in dynamic divergence over order statistics ``x_(i) >= t`` (strict)."""
    xv, yv = as_sample(x).values, as_sample(y).values
    _check_t(xv, yv, t, inclusive=False)
    return float(kernels.dsed_estimate(xv, yv, float(t)))


def estimate_symmetric_sed(x, y) -> float:
    return (estimate_sed(x, y) + estimate_sed(y, x)) / 8.0


def estimate_symmetric_dsed(x, y, t: float) -> float:
    return (estimate_dsed(x, y, t) + estimate_dsed(y, x, t)) / 8.0


def estimate_sei(x, y, c: SurvivalConvention = SurvivalConvention.STRICT) -> float:
    return estimate_dynamic_sei(x, y, -math.inf, c)


def estimate_dynamic_sei(x, y, t: float, c: SurvivalConvention = SurvivalConvention.STRICT) -> float:
    xv, yv = as_sample(x).values, as_sample(y).values
    inc = _inclusive(c)
    if math.isfinite(t):
        _check_t(xv, yv, t, inc)
    return -0.5 * float(kernels.cross_sum(xv, yv, float(t), inc))


def estimate_survival_extropy(x, c: SurvivalConvention = SurvivalConvention.INCLUSIVE) -> float:
    """-1/2 * sum S_n(x_(i))^2 * spacing_i."""
    return estimate_dynamic_survival_extropy(x, -math.inf, c)


def estimate_dynamic_survival_extropy(x, t: float, c: SurvivalConvention = SurvivalConvention.STRICT) -> float:
    xv = as_sample(x).values
    inc = _inclusive(c)
    if math.isfinite(t):
        _check_t(xv, xv, t, inc)
    return -0.5 * float(kernels.self_sum(xv, float(t), inc))


def estimate_inaccuracy_ratio(x, y) -> float:
    """Ratio of the cross sum to the self sum of ``x`` (inclusive convention)."""
    xv, yv = as_sample(x).values, as_sample(y).values
    den = kernels.self_sum(xv, -math.inf, True)
    if den == 0:
        raise DegenerateDenominator("all spacings of the reference sample are zero")
    return float(kernels.cross_sum(xv, yv, -math.inf, True)) / den


# --- simulation -------------------------------------------------------------------

# measure -> (convention, needs t, uses second sample)
ESTIMATORS = {
    "Js": (SurvivalConvention.INCLUSIVE, False, False),
    "Js_t": (SurvivalConvention.STRICT, True, False),
    "SEI": (SurvivalConvention.STRICT, False, True),
    "DSEI": (SurvivalConvention.STRICT, True, True),
    "Ixi": (SurvivalConvention.INCLUSIVE, False, True),
    "SED": (SurvivalConvention.STRICT, False, True),
    "DSED": (SurvivalConvention.STRICT, True, True),
    "SSJ": (SurvivalConvention.STRICT, False, True),
    "SSJ_t": (SurvivalConvention.STRICT, True, True),
}

_SIM = 2


def estimate(name: str, x, y=None, t: float | None = None) -> float:
    """Dispatch to the plug-in estimator registered under ``name``."""
    if name not in ESTIMATORS:
        raise InvalidParameter(f"no estimator for {name!r}; choose from {', '.join(ESTIMATORS)}")
    _, needs_t, two = ESTIMATORS[name]
    if needs_t and t is None:
        raise InvalidParameter(f"{name} needs t")
    if two and y is None:
        raise InvalidParameter(f"{name} needs two samples")
    fn = {
        "Js": lambda: estimate_survival_extropy(x),
        "Js_t": lambda: estimate_dynamic_survival_extropy(x, t),
        "SEI": lambda: estimate_sei(x, y),
        "DSEI": lambda: estimate_dynamic_sei(x, y, t),
        "Ixi": lambda: estimate_inaccuracy_ratio(x, y),
        "SED": lambda: estimate_sed(x, y),
        "DSED": lambda: estimate_dsed(x, y, t),
        "SSJ": lambda: estimate_symmetric_sed(x, y),
        "SSJ_t": lambda: estimate_symmetric_dsed(x, y, t),
    }[name]
    return fn()


def _row_estimate(name, x, y, t):
    try:
        return estimate(name, x, y, t)
    except (ZeroSurvivalAtT, DegenerateDenominator):
        return math.nan


def simulate(name: str, f, g, n: int, replications: int, seed: int, t: float | None = None, *,
             threads: int | None = None) -> np.ndarray:
    """Estimates from ``replications`` seeded sample pairs of size ``n``.

    Replications where the estimator is undefined (no observation beyond
    ``t``) are NaN.
    """
    if name not in ESTIMATORS:
        raise InvalidParameter(f"no estimator for {name!r}")
    if n < 2:
        raise InvalidParameter("n must be >= 2")
    F = make_model(f)
    G = make_model(g) if g is not None else F
    key = zlib.crc32(f"{name}|{f}|{g}|{t!r}".encode())
    tt = -math.inf if t is None else float(t)

    def task(rng, count):
        X = sample_batch(F, count, n, rng)
        Y = sample_batch(G, count, n, rng)
        if name in ("SED", "DSED"):
            return kernels.dsed_estimate_batch(X, Y, tt)
        if name in ("SSJ", "SSJ_t"):
            return (kernels.dsed_estimate_batch(X, Y, tt) + kernels.dsed_estimate_batch(Y, X, tt)) / 8.0
        return np.array([_row_estimate(name, x, y, t) for x, y in zip(X, Y)])

    # block size depends on n only, so results do not depend on the thread count
    block = int(max(16, min(8192, 2**21 // n)))
    return replicate(task, replications, seed, _SIM, key, n, threads=threads, block_size=block)


def summarize(values, truth: float | None = None) -> dict:
    """Mean, Monte Carlo standard error and, given the truth, bias and MSE over defined replications."""
    v = np.asarray(values, dtype=float)
    ok = v[np.isfinite(v)]
    out = {"replications": int(v.size), "undefined": int(v.size - ok.size)}
    if ok.size == 0:
        return out | {"mean": math.nan, "std_error": math.nan}
    out["mean"] = float(ok.mean())
    out["std_error"] = float(ok.std(ddof=1) / math.sqrt(ok.size)) if ok.size > 1 else math.nan
    if truth is not None:
        out["truth"] = float(truth)
        out["bias"] = out["mean"] - truth
        out["mse"] = float(np.mean((ok - truth) ** 2))
    return out


# --- ingestion ---------------------------------------------------------------------

def read_sample(path) -> EmpiricalSample:
    """Read a single-column CSV (optional header) or whitespace-separated text file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc}") from exc
    tokens = text.replace(",", " ").split()
    values = []
    for k, tok in enumerate(tokens):
        try:
            v = float(tok)
        except ValueError:
            if k == 0:
                continue  # header
            raise DataError(f"{path}: non-numeric value {tok!r}") from None
        if not math.isfinite(v) or v < 0:
            raise DataError(f"{path}: values must be finite and non-negative, got {tok!r}")
        values.append(v)
    return EmpiricalSample(np.array(values))
