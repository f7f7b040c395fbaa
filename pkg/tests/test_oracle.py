import math

import numpy as np
import pytest

from quasiprob import oracle, specialfn
from quasiprob.errors import DivergenceError, QuadratureError


def test_gaussian_integral():
    res = oracle.integrate_1d(lambda x: np.exp(-x * x), -8, 8)
    assert abs(res.value - math.sqrt(math.pi)) < 1e-10
    assert res.error <= 1e-10


def test_complex_exponential():
    res = oracle.integrate_1d(lambda x: np.exp(1j * x), 0, math.pi)
    assert abs(res.value - 2j) < 1e-12


def test_hermite_function_normalisation():
    res = oracle.integrate_1d(lambda x: specialfn.hermite_functions(2, x)[2] ** 2, -10, 10)
    assert abs(res.value - 1) < 1e-9


def test_error_estimate_bounds_true_error():
    cases = [
        (lambda x: np.exp(-x * x), -8, 8, math.sqrt(math.pi)),
        (lambda x: np.exp(1j * x), 0, math.pi, 2j),
        (lambda x: np.cos(3 * x) ** 2, 0, 2 * math.pi, math.pi),
    ]
    for f, a, b, exact in cases:
        res = oracle.integrate_1d(f, a, b, tol=1e-11)
        assert abs(res.value - exact) <= max(res.error, 1e-15)


def test_vector_valued_integrand():
    res = oracle.integrate_1d(lambda x: np.stack([x**2, x**3], axis=-1), 0, 1)
    np.testing.assert_allclose(res.value, [1 / 3, 1 / 4], atol=1e-13)


def test_2d_gaussian():
    res = oracle.integrate_2d(lambda x, y: np.exp(-(x**2 + y**2)), (-8, 8, -8, 8))
    assert abs(res.value - math.pi) < 1e-9


def test_2d_unit_square():
    res = oracle.integrate_2d(lambda x, y: np.ones(np.broadcast(x, y).shape), (0, 1, 0, 1))
    assert abs(res.value - 1) < 1e-14


def test_deterministic():
    f = lambda x: np.sin(5 * x) * np.exp(-x * x)
    a = oracle.integrate_1d(f, -3, 4)
    b = oracle.integrate_1d(f, -3, 4)
    assert a.value == b.value and a.evaluations == b.evaluations


def test_nonconvergence_reports():
    with pytest.raises(QuadratureError, match="doublings"):
        oracle.integrate_1d(lambda x: np.sign(x - 0.123456), -1, 1, tol=1e-13, max_doublings=3)


def test_series_geometric():
    assert abs(oracle.series_sum(lambda k: 2.0**-k) - 2) < 1e-12


def test_series_exponential():
    assert abs(oracle.series_sum(lambda k: 0.3**k / math.factorial(k)) - 1.3498588076) < 1e-10


def test_series_hermite_generating_terms():
    term = lambda k: specialfn.hermite(k, 1.0) * 0.3**k / math.factorial(k)
    total = oracle.series_sum(term, max_terms=150)
    assert abs(total - math.exp(0.51)) < 1e-10
    assert abs(total - specialfn.generating_partial(0.3, 1.0, 40)) < 1e-10


def test_series_divergence():
    with pytest.raises(DivergenceError):
        oracle.series_sum(lambda k: 1.0, max_terms=50)


def test_tolerance_floor():
    with pytest.raises(ValueError):
        oracle.integrate_1d(lambda x: x, 0, 1, tol=1e-15)
