import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scoremech.errors import DomainError, NoRoot, NonMonotone
from scoremech.numerics import (Tabulated, TabulatedMonotone, cheb_grid,
                                find_root, integrate, minimize_scalar_bounded,
                                quasi_shape)


def test_cheb_grid_endpoints_and_clustering():
    g = cheb_grid(33, 0.0, 1.0)
    assert g[0] == 0.0 and g[-1] == 1.0
    assert np.all(np.diff(g) > 0)
    # Chebyshev-Lobatto points cluster at both ends
    assert g[1] - g[0] < (g[17] - g[16]) / 5


@pytest.mark.parametrize("vals,kind", [
    ([1, 2, 3, 4], "increasing"),
    ([4, 3, 2, 1], "decreasing"),
    ([3, 1, 0, 2, 5], "quasiconvex"),
    ([0, 2, 5, 2, 0], "quasiconcave"),
    ([1, 1, 1], "constant"),
    ([0, 2, 0, 2, 0], "neither"),
])
def test_quasi_shape_patterns(vals, kind):
    assert quasi_shape(np.asarray(vals, dtype=float)).kind == kind


@given(st.floats(0.1, 3.0), st.floats(-1.0, 1.0),
       st.integers(min_value=5, max_value=40))
@settings(max_examples=30, deadline=None)
def test_quasi_shape_detects_parabolas(a, c, m):
    x = np.linspace(-1.0, 1.0, m)
    up = quasi_shape(a * (x - c) ** 2)
    assert up.kind in ("quasiconvex", "increasing", "decreasing")
    down = quasi_shape(-a * (x - c) ** 2)
    assert down.kind in ("quasiconcave", "increasing", "decreasing")


@given(st.lists(st.floats(-5.0, 5.0), min_size=3, max_size=12, unique=True))
@settings(max_examples=40, deadline=None)
def test_tabulated_monotone_round_trip(ys):
    ys = sorted(ys)
    xs = np.linspace(0.0, 1.0, len(ys))
    tab = TabulatedMonotone(xs, np.asarray(ys))
    for y in np.linspace(ys[0], ys[-1], 7):
        x = tab.invert(float(y))
        assert abs(float(tab(x)) - y) < 1e-8


def test_tabulated_monotone_rejects_wiggles():
    with pytest.raises(NonMonotone):
        TabulatedMonotone([0.0, 0.5, 1.0], [0.0, 1.0, 0.5])


def test_tabulated_domain_guard():
    tab = Tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 4.0])
    with pytest.raises(DomainError):
        tab(2.5)


def test_integrate_and_find_root():
    assert integrate(lambda x: 3 * x ** 2, 0.0, 1.0) == pytest.approx(1.0)
    assert find_root(lambda x: x ** 2 - 2.0, 0.0, 2.0) == pytest.approx(
        np.sqrt(2.0))
    with pytest.raises(NoRoot):
        find_root(lambda x: x ** 2 + 1.0, -1.0, 1.0)


def test_minimize_checks_endpoints():
    # the minimum of a decreasing function sits at the right endpoint
    x, v = minimize_scalar_bounded(lambda x: -x, 0.0, 3.0)
    assert x == pytest.approx(3.0) and v == pytest.approx(-3.0)
