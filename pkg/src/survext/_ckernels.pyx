# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Mirrors survext._pykernels function for function.

All row kernels release the GIL so replication blocks can run on threads.
Inputs are C-contiguous float64 arrays; sample rows must be sorted ascending.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, log1p, fabs, INFINITY, NAN

cnp.import_array()


# ---------------------------------------------------------------- estimators

cdef inline double _cross(const double[::1] x, const double[::1] y, double t,
                          bint inclusive, bint same) noexcept nogil:
    """sum_{i<n, x_i>=t} (S_x(x_i)/S_x(t)) * (S_y(x_i)/S_y(t)) * (x_{i+1}-x_i)."""
    cdef Py_ssize_t n = x.shape[0], m = y.shape[0]
    cdef Py_ssize_t i, jx = 0, jy = 0, cx = 0, cy = 0
    cdef double fx, gy, ft, gt, acc = 0.0, xi
    # survival counts at t
    for i in range(n):
        if (x[i] > t) or (inclusive and x[i] == t):
            cx += 1
    for i in range(m):
        if (y[i] > t) or (inclusive and y[i] == t):
            cy += 1
    if cx == 0 or cy == 0:
        return NAN
    ft = <double>cx / n
    gt = <double>cy / m
    for i in range(n - 1):
        xi = x[i]
        if inclusive:
            while jx < n and x[jx] < xi:
                jx += 1
            while jy < m and y[jy] < xi:
                jy += 1
        else:
            while jx < n and x[jx] <= xi:
                jx += 1
            while jy < m and y[jy] <= xi:
                jy += 1
        if xi < t:
            continue
        fx = <double>(n - jx) / n
        gy = <double>(m - jy) / m
        if same:
            acc += (fx / ft) * (fx / ft) * (x[i + 1] - xi)
        else:
            acc += (fx / ft) * (gy / gt) * (x[i + 1] - xi)
    return acc


cdef inline double _dsed(const double[::1] x, const double[::1] y, double t) noexcept nogil:
    """1/2 sum_{i<n, x_i>=t} (a_i - b_i) a_i dx_i with strict survival."""
    cdef Py_ssize_t n = x.shape[0], m = y.shape[0]
    cdef Py_ssize_t i, jx = 0, jy = 0, cx = 0, cy = 0
    cdef double a, b, ft, gt, acc = 0.0, xi
    for i in range(n):
        if x[i] > t:
            cx += 1
    for i in range(m):
        if y[i] > t:
            cy += 1
    if cx == 0 or cy == 0:
        return NAN
    ft = <double>cx / n
    gt = <double>cy / m
    for i in range(n - 1):
        xi = x[i]
        while jx < n and x[jx] <= xi:
            jx += 1
        while jy < m and y[jy] <= xi:
            jy += 1
        if xi < t:
            continue
        a = (<double>(n - jx) / n) / ft
        b = (<double>(m - jy) / m) / gt
        acc += (a - b) * a * (x[i + 1] - xi)
    return 0.5 * acc


def cross_sum(const double[::1] x, const double[::1] y, double t, bint inclusive):
    with nogil:
        r = _cross(x, y, t, inclusive, False)
    return r


def self_sum(const double[::1] x, double t, bint inclusive):
    with nogil:
        r = _cross(x, x, t, inclusive, True)
    return r


def dsed_estimate(const double[::1] x, const double[::1] y, double t):
    with nogil:
        r = _dsed(x, y, t)
    return r


def dsed_estimate_batch(const double[:, ::1] X, const double[:, ::1] Y, double t):
    cdef Py_ssize_t r, R = X.shape[0]
    out = np.empty(R)
    cdef double[::1] o = out
    with nogil:
        for r in range(R):
            o[r] = _dsed(X[r], Y[r], t)
    return out


def ratio_matrix(const double[:, ::1] A, const double[:, ::1] C):
    """Inclusive-convention inaccuracy ratio of every anchor row against every candidate row."""
    cdef Py_ssize_t i, j, nA = A.shape[0], nC = C.shape[0]
    out = np.empty((nA, nC))
    cdef double[:, ::1] o = out
    cdef double den
    with nogil:
        for i in range(nA):
            den = _cross(A[i], A[i], -INFINITY, True, True)
            for j in range(nC):
                o[i, j] = _cross(A[i], C[j], -INFINITY, True, False) / den
    return out


# ---------------------------------------------------------------- uniformity statistics

cdef inline double _tn(const double[::1] x) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double s = 0.0, s2 = 0.0, mean
    for i in range(n):
        s += x[i]
        s2 += x[i] * x[i]
    mean = s / n
    return s2 / (8.0 * n * mean) - mean / 6.0


cdef inline double _ks(const double[::1] x) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double d = -INFINITY, v
    for i in range(n):
        v = (i + 1.0) / n - x[i]
        if v > d:
            d = v
        v = x[i] - (<double>i) / n
        if v > d:
            d = v
    return d


cdef inline double _ad(const double[::1] x) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += (i + 0.5) * log(x[i]) + (n - i - 0.5) * log1p(-x[i])
    return -2.0 / n * acc - n


cdef inline double _cm(const double[::1] x) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double acc = 0.0, d
    for i in range(n):
        d = x[i] - (2.0 * i + 1.0) / (2.0 * n)
        acc += d * d
    return acc + 1.0 / (12.0 * n)


cdef inline Py_ssize_t _clamp(Py_ssize_t i, Py_ssize_t n) noexcept nogil:
    if i < 0:
        return 0
    if i >= n:
        return n - 1
    return i


cdef inline double _tb(const double[::1] x, Py_ssize_t m, double[::1] F) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0], up, lo
    cdef double den, frac, tot = 0.0, acc = 0.0, dF, dx
    for i in range(n):
        lo = _clamp(i - 1, n)
        up = _clamp(i + 1, n)
        den = x[up] - x[lo]
        frac = (x[i] - x[lo]) / den if den > 0 else 0.0
        F[i] = (i + 1.0 + frac) / (n + 2.0)
    for i in range(n):
        tot += F[_clamp(i + m, n)] - F[_clamp(i - m, n)]
    for i in range(n):
        up = _clamp(i + m, n)
        lo = _clamp(i - m, n)
        dF = F[up] - F[lo]
        dx = x[up] - x[lo]
        acc += log(dx / dF) * (dF / tot)
    return acc


cdef inline double _tu(const double[::1] x, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double c, acc = 0.0
    for i in range(1, n + 1):
        if i <= m:
            c = 1.0 + (i - 1.0) / m
        elif i >= n - m + 1:
            c = 1.0 + (<double>(n - i)) / m
        else:
            c = 2.0
        acc += c * m / n / (x[_clamp(i - 1 + m, n)] - x[_clamp(i - 1 - m, n)])
    return acc / (2.0 * n)


def statistic_batch(str name, const double[:, ::1] X, Py_ssize_t m=0):
    """Evaluate one uniformity statistic on each row of X."""
    cdef Py_ssize_t r, R = X.shape[0], n = X.shape[1]
    cdef int code
    out = np.empty(R)
    cdef double[::1] o = out
    work = np.empty(max(n, 1))
    cdef double[::1] w = work
    if name == "Tn":
        code = 0
    elif name == "KS":
        code = 1
    elif name == "AD":
        code = 2
    elif name == "CM":
        code = 3
    elif name == "TB":
        code = 4
    elif name == "TU":
        code = 5
    else:
        raise ValueError(f"unknown statistic {name!r}")
    with nogil:
        for r in range(R):
            if code == 0:
                o[r] = _tn(X[r])
            elif code == 1:
                o[r] = _ks(X[r])
            elif code == 2:
                o[r] = _ad(X[r])
            elif code == 3:
                o[r] = _cm(X[r])
            elif code == 4:
                o[r] = _tb(X[r], m, w)
            else:
                o[r] = _tu(X[r], m)
    return out
