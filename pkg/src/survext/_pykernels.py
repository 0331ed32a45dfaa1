"""NumPy implementations of the hot loops, used when the extension is not built.

Function names and signatures match ``survext._ckernels``.
"""

import numpy as np


def _surv(ref, points, inclusive):
    side = "left" if inclusive else "right"
    return (len(ref) - np.searchsorted(ref, points, side=side)) / len(ref)


def cross_sum(x, y, t, inclusive):
    ft = _surv(x, t, inclusive)
    gt = _surv(y, t, inclusive)
    if ft == 0 or gt == 0:
        return np.nan
    head = x[:-1]
    keep = head >= t
    fx = _surv(x, head[keep], inclusive)
    gy = _surv(y, head[keep], inclusive)
    return float(np.sum((fx / ft) * (gy / gt) * np.diff(x)[keep]))


def self_sum(x, t, inclusive):
    ft = _surv(x, t, inclusive)
    if ft == 0:
        return np.nan
    head = x[:-1]
    keep = head >= t
    fx = _surv(x, head[keep], inclusive)
    return float(np.sum((fx / ft) * (fx / ft) * np.diff(x)[keep]))


def dsed_estimate(x, y, t):
    ft = _surv(x, t, False)
    gt = _surv(y, t, False)
    if ft == 0 or gt == 0:
        return np.nan
    head = x[:-1]
    keep = head >= t
    a = _surv(x, head[keep], False) / ft
    b = _surv(y, head[keep], False) / gt
    return 0.5 * float(np.sum((a - b) * a * np.diff(x)[keep]))


def dsed_estimate_batch(X, Y, t):
    return np.array([dsed_estimate(x, y, t) for x, y in zip(X, Y)], dtype=float)


def ratio_matrix(A, C):
    out = np.empty((A.shape[0], C.shape[0]))
    for i, a in enumerate(A):
        den = self_sum(a, -np.inf, True)
        d = np.diff(a)
        pa = _surv(a, a[:-1], True)
        for j, c in enumerate(C):
            out[i, j] = float(np.sum(pa * _surv(c, a[:-1], True) * d)) / den
    return out


def _clamped(n, m):
    i = np.arange(n)
    return np.minimum(i + m, n - 1), np.maximum(i - m, 0)


def _tn(X, m):
    n = X.shape[1]
    mean = X.sum(axis=1) / n
    return (X * X).sum(axis=1) / (8.0 * n * mean) - mean / 6.0


def _ks(X, m):
    n = X.shape[1]
    i = np.arange(n)
    return np.maximum(((i + 1.0) / n - X).max(axis=1), (X - i / n).max(axis=1))


def _ad(X, m):
    n = X.shape[1]
    i = np.arange(n)
    with np.errstate(divide="ignore"):
        terms = (i + 0.5) * np.log(X) + (n - i - 0.5) * np.log1p(-X)
    return -2.0 / n * terms.sum(axis=1) - n


def _cm(X, m):
    n = X.shape[1]
    d = X - (2.0 * np.arange(n) + 1.0) / (2.0 * n)
    return (d * d).sum(axis=1) + 1.0 / (12.0 * n)


def _tb(X, m):
    n = X.shape[1]
    prev = np.concatenate([X[:, :1], X[:, :-1]], axis=1)
    nxt = np.concatenate([X[:, 1:], X[:, -1:]], axis=1)
    den = nxt - prev
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(den > 0, (X - prev) / den, 0.0)
    F = (np.arange(1, n + 1) + frac) / (n + 2.0)
    up, lo = _clamped(n, m)
    dF = F[:, up] - F[:, lo]
    dx = X[:, up] - X[:, lo]
    with np.errstate(divide="ignore"):
        return (np.log(dx / dF) * (dF / dF.sum(axis=1, keepdims=True))).sum(axis=1)


def _tu(X, m):
    n = X.shape[1]
    i = np.arange(1, n + 1)
    c = np.where(i <= m, 1.0 + (i - 1.0) / m, np.where(i >= n - m + 1, 1.0 + (n - i) / m, 2.0))
    up, lo = _clamped(n, m)
    with np.errstate(divide="ignore"):
        return (c * m / n / (X[:, up] - X[:, lo])).sum(axis=1) / (2.0 * n)


_STATS = {"Tn": _tn, "KS": _ks, "AD": _ad, "CM": _cm, "TB": _tb, "TU": _tu}


def statistic_batch(name, X, m=0):
    try:
        fn = _STATS[name]
    except KeyError:
        raise ValueError(f"unknown statistic {name!r}") from None
    return np.asarray(fn(np.asarray(X, dtype=float), m), dtype=float)
