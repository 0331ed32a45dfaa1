import math

import numpy as np
import pytest

from survext import kernels
from survext.kernels import backends

IMPLS = backends()
needs_both = pytest.mark.skipif(len(IMPLS) < 2, reason="compiled backend not built")


def _sorted(rng, shape, scale=1.0):
    return np.ascontiguousarray(np.sort(rng.exponential(scale, shape), axis=-1))


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    assert "python" in IMPLS


@needs_both
@pytest.mark.parametrize("inclusive", [False, True])
@pytest.mark.parametrize("t", [-math.inf, 0.0, 0.3, 1.2])
def test_sums_agree(rng, inclusive, t):
    c, p = IMPLS["cython"], IMPLS["python"]
    for _ in range(20):
        x = _sorted(rng, rng.integers(2, 60))
        y = _sorted(rng, rng.integers(2, 60), 0.5)
        a, b = c.cross_sum(x, y, t, inclusive), p.cross_sum(x, y, t, inclusive)
        assert (math.isnan(a) and math.isnan(b)) or a == pytest.approx(b, rel=1e-12, abs=1e-15)
        a, b = c.self_sum(x, t, inclusive), p.self_sum(x, t, inclusive)
        assert (math.isnan(a) and math.isnan(b)) or a == pytest.approx(b, rel=1e-12, abs=1e-15)


@needs_both
def test_sums_agree_with_ties(rng):
    c, p = IMPLS["cython"], IMPLS["python"]
    for _ in range(30):
        x = np.sort(rng.integers(0, 5, rng.integers(2, 30)).astype(float))
        y = np.sort(rng.integers(0, 5, rng.integers(2, 30)).astype(float))
        for inc in (False, True):
            assert c.cross_sum(x, y, -math.inf, inc) == pytest.approx(p.cross_sum(x, y, -math.inf, inc), abs=1e-14)
        assert c.dsed_estimate(x, y, 1.0) == pytest.approx(p.dsed_estimate(x, y, 1.0), abs=1e-14, nan_ok=True)


@needs_both
def test_dsed_batch_agrees(rng):
    X, Y = _sorted(rng, (50, 30)), _sorted(rng, (50, 30), 0.3)
    for t in (-math.inf, 0.5, 2.0):
        a = IMPLS["cython"].dsed_estimate_batch(X, Y, t)
        b = IMPLS["python"].dsed_estimate_batch(X, Y, t)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)
        assert np.array_equal(np.isnan(a), np.isnan(b))


@needs_both
def test_ratio_matrix_agrees(rng):
    A, C = np.sort(rng.random((4, 100)), axis=1), np.sort(rng.random((6, 100)), axis=1)
    np.testing.assert_allclose(IMPLS["cython"].ratio_matrix(A, C), IMPLS["python"].ratio_matrix(A, C), rtol=1e-12)


@needs_both
@pytest.mark.parametrize("name", ["Tn", "KS", "AD", "CM", "TB", "TU"])
@pytest.mark.parametrize("n", [3, 10, 41])
def test_statistics_agree(rng, name, n):
    X = np.sort(rng.random((200, n)), axis=1)
    m = max(1, min(int(math.floor(math.sqrt(n) + 1)), (n - 1) // 2))
    a = IMPLS["cython"].statistic_batch(name, X, m)
    b = IMPLS["python"].statistic_batch(name, X, m)
    np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-13)


@pytest.mark.parametrize("impl", list(IMPLS))
def test_unknown_statistic(impl):
    with pytest.raises(ValueError):
        IMPLS[impl].statistic_batch("XX", np.zeros((1, 3)), 0)


@pytest.mark.parametrize("impl", list(IMPLS))
def test_sed_hand_value(impl):
    k = IMPLS[impl]
    assert k.dsed_estimate(np.array([1.0, 2.0]), np.array([2.0, 3.0]), -math.inf) == pytest.approx(-1 / 8)
    assert math.isnan(k.dsed_estimate(np.array([1.0, 2.0]), np.array([2.0, 3.0]), 2.5))
