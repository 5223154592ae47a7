import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lgfkit.quadrature import (NODES, QuadratureError, W_GAUSS, W_KRONROD, contour_derivatives,
                               contour_integral, integrate_1d, integrate_box3, integrate_periodic)
from lgfkit.stencils import get_stencil, split_symbol


def test_rule_tables():
    assert math.fsum(W_KRONROD) == pytest.approx(2, abs=1e-15)
    assert math.fsum(W_GAUSS) == pytest.approx(2, abs=1e-15)
    # Kronrod rule integrates x^22 exactly on [-1, 1]
    assert math.fsum(W_KRONROD * NODES**22) == pytest.approx(2 / 23, rel=1e-13)


def test_integrate_1d_examples():
    assert integrate_1d(np.sin, 0, np.pi).value == pytest.approx(2, abs=1e-14)
    assert abs(integrate_1d(lambda k: np.cos(3 * k), -np.pi, np.pi).value) < 1e-14
    r = integrate_1d(lambda k: np.exp(-k * k), 0, 1)
    assert r.value == pytest.approx(0.746824132812427, abs=1e-13)
    assert r.error_estimate >= 0 and r.evaluations > 0


def test_error_estimate_is_honest():
    r = integrate_1d(lambda x: np.sqrt(x), 0, 1, 1e-10, 1e-10)
    assert abs(r.value - 2 / 3) <= 10 * max(r.error_estimate, 1e-16)


def test_non_convergence_carries_result():
    with pytest.raises(QuadratureError) as exc:
        integrate_1d(lambda x: np.sin(1 / x), 1e-6, 1, 1e-15, 0, max_subdivisions=20)
    assert np.isfinite(exc.value.result.value)


def test_determinism():
    f = lambda x: np.exp(np.sin(7 * x))  # noqa: E731
    assert integrate_1d(f, 0, 3).value == integrate_1d(f, 0, 3).value


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 4))
def test_polynomial_integrals(a, w):
    b = a + w
    val = integrate_1d(lambda x: 3 * x**2 - x + 1, a, b).value
    exact = (b**3 - a**3) - (b**2 - a**2) / 2 + (b - a)
    assert val == pytest.approx(exact, rel=1e-13, abs=1e-13)


def test_periodic_examples():
    assert integrate_periodic(lambda k: np.full_like(k, 2.5), 2 * np.pi).value == 2.5 * 2 * np.pi
    assert integrate_periodic(lambda k: np.cos(k) ** 2, 2 * np.pi).value / (2 * np.pi) == \
        pytest.approx(0.5, abs=1e-15)
    st2 = get_stencil("lgf2")
    v = integrate_periodic(lambda k: np.exp(-0.0 * split_symbol(st2, k)), 2 * np.pi).value
    assert v / (2 * np.pi) == pytest.approx(1, abs=1e-15)
    with pytest.raises(QuadratureError):
        integrate_periodic(lambda k: np.abs(np.sin(k)), 2 * np.pi, eps=1e-16, max_points=64)


def test_box3():
    one = integrate_box3(lambda x, y, z: np.ones(np.broadcast(x, y, z).shape), [(0, 1)] * 3)
    assert one.value == pytest.approx(1, abs=1e-12)
    cube = integrate_box3(lambda x, y, z: x * y * z, [(0, 1)] * 3)
    assert cube.value == pytest.approx(1 / 8, abs=1e-12)


def test_contour_examples():
    assert contour_integral(lambda z: 1 / z, 0, 1) == pytest.approx(1, abs=1e-14)
    assert abs(contour_integral(lambda z: (z - 0.5) ** -2, 0.5, 0.7)) < 1e-14
    d = contour_derivatives(np.exp, 0.3, 1.0, 5)
    for j, v in enumerate(d):
        assert v == pytest.approx(math.exp(0.3) / math.factorial(j), abs=1e-14)
    with pytest.raises(QuadratureError):
        contour_integral(lambda z: 1 / (z - (1 + 1e-13)), 0, 1, points=4)
