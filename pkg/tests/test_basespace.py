import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from levyjacobi.basespace import DimensionError, Grid, pointwise_product, standard_grid


def test_examples():
    g = standard_grid()
    f = np.array([1.0, -1.0])
    assert g.integrate(f) == 0.0
    assert g.inner(f, f) == 1.0
    assert pointwise_product(f, f).tolist() == [1.0, 1.0]
    assert g.integrate(pointwise_product(f, f)) == 1.0


def test_dimension_errors():
    g = standard_grid()
    with pytest.raises(DimensionError, match="dimension error"):
        g.integrate([1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        pointwise_product([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        Grid(np.array([0.5, 0.0]))


def test_scaled():
    assert Grid(np.array([0.2, 0.3])).scaled(2).weights.tolist() == [0.4, 0.6]


vec = arrays(float, 4, elements=st.floats(-10, 10))
weights = arrays(float, 4, elements=st.floats(0.01, 5))


@given(weights, vec, vec, vec, st.floats(-3, 3))
def test_inner_properties(w, f, g, h, c):
    G = Grid(w)
    assert G.inner(f, g) == G.inner(g, f)
    assert G.inner(f, f) >= 0
    lhs = G.inner(c * f + h, g)
    rhs = c * G.inner(f, g) + G.inner(h, g)
    assert abs(lhs - rhs) <= 1e-9 * (1 + np.sum(w * (abs(c * f) + abs(h)) * abs(g)))
    assert G.integrate(pointwise_product(f, g)) == G.inner(f, g)
    assert G.moment(f, g) == pytest.approx(G.inner(f, g), rel=1e-12, abs=1e-12)
