import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import monotone_system
from mfix.core import MonotoneSignature, PartiallyMonotoneSystem, ProductPoint, point, product_leq
from mfix.errors import StructuralError, ValidationError
from mfix.sigma import (
    MixedMonotoneOperator,
    Selector,
    build_mixed_operator,
    preceq,
    preceq_via_sigma,
    projection,
    s_compose,
    s_power,
    sigma_apply,
)

EXAMPLE = MonotoneSignature.from_strings(["++-", "-++", "---"])


def _labelled():
    x = point([1.0], [2.0], [3.0])
    y = point([-1.0], [-2.0], [-3.0])
    return x, y


def test_selector_examples():
    x, y = _labelled()
    assert sigma_apply(EXAMPLE, 0, x, y) == point([1.0], [2.0], [-3.0])
    assert sigma_apply(EXAMPLE, 1, x, y) == point([-1.0], [2.0], [3.0])
    assert sigma_apply(EXAMPLE, 2, x, y) == y


def test_induced_order_example():
    # row 0: <= in components 0 and 1, >= in component 2
    assert preceq(EXAMPLE, 0, point([0], [0], [5]), point([1], [1], [4]))
    assert not preceq(EXAMPLE, 0, point([0], [0], [3]), point([1], [1], [4]))
    x, _ = _labelled()
    assert all(preceq(EXAMPLE, i, x, x) for i in range(3))


def test_mixed_operator_example():
    ops = tuple((lambda p, k=k: np.array([100.0 * k + p[0][0] + 10 * p[1][0] + 0.1 * p[2][0]])) for k in range(3))
    system = PartiallyMonotoneSystem(EXAMPLE, ops, (1, 1, 1))
    A = build_mixed_operator(system)
    x, y = _labelled()
    expected = [system.evaluate(0, point(x[0], x[1], y[2])),
                system.evaluate(1, point(y[0], x[1], x[2])),
                system.evaluate(2, y)]
    assert A(x, y) == ProductPoint(expected)


def test_all_increasing_ignores_second_argument():
    rng = np.random.default_rng(3)
    system = monotone_system(rng, MonotoneSignature.all_increasing(3), (2, 1, 3))
    A = build_mixed_operator(system)
    x = ProductPoint(rng.normal(size=m) for m in system.dims)
    y = ProductPoint(rng.normal(size=m) for m in system.dims)
    assert A(x, y) == system.apply(x)


def test_build_rejects_inconsistent_system():
    # T_0 grows with x_0 but is declared decreasing in it
    system = PartiallyMonotoneSystem(MonotoneSignature.from_strings(["-+", "++"]),
                                     (lambda p: p[0] + p[1], lambda p: p[1]), (1, 1),
                                     box=((-1.0, 1.0), (-1.0, 1.0)))
    with pytest.raises(ValidationError):
        build_mixed_operator(system)
    build_mixed_operator(system, validate=False)


def test_powers_and_identities():
    x, y = _labelled()
    assert s_power(Selector(EXAMPLE, 0), 0)(x, y) == x
    assert s_power(Selector(EXAMPLE, 0), 2)(x, y) == x
    sel = Selector(EXAMPLE, 1)
    assert s_power(sel, 1)(x, y) == sel(x, y)
    assert s_compose(projection, sel)(x, y) == sel(x, y)
    assert s_compose(sel, projection)(x, y) == sel(x, y)
    with pytest.raises(ValueError):
        s_power(sel, -1)


def test_s_power_matches_nested_composition():
    rng = np.random.default_rng(8)
    system = monotone_system(rng, EXAMPLE, (1, 2, 1))
    A = MixedMonotoneOperator(system)
    x = ProductPoint(rng.normal(size=m) for m in system.dims)
    y = ProductPoint(rng.normal(size=m) for m in system.dims)
    nested = projection
    for k in range(1, 5):
        nested = s_compose(A, nested)
        assert s_power(A, k)(x, y) == nested(x, y)


def test_selector_index_and_profile_errors():
    x, y = _labelled()
    with pytest.raises(StructuralError):
        sigma_apply(EXAMPLE, 3, x, y)
    with pytest.raises(StructuralError):
        sigma_apply(EXAMPLE, 0, x, point([1.0], [2.0]))


# --- properties on hypothesis-generated inputs --------------------------------------------------

values = st.sampled_from([-1.0, 0.0, 1.0, 2.5])


@st.composite
def setting(draw):
    n = draw(st.integers(2, 6))
    rows = [draw(st.text("+-", min_size=n, max_size=n)) for _ in range(n)]
    dims = draw(st.lists(st.integers(1, 3), min_size=n, max_size=n))
    pts = [ProductPoint([draw(st.lists(values, min_size=m, max_size=m)) for m in dims]) for _ in range(4)]
    return MonotoneSignature.from_strings(rows), draw(st.integers(0, n - 1)), pts


@settings(max_examples=300)
@given(setting())
def test_selector_algebra_properties(data):
    sig, i, (x, y, u, v) = data
    sg = lambda a, b: sigma_apply(sig, i, a, b)
    assert sg(sg(x, y), sg(u, v)) == sg(x, v)
    assert sg(sg(x, y), sg(y, x)) == x
    assert preceq(sig, i, sg(x, y), sg(u, v)) == product_leq(sg(x, v), sg(u, y))
    assert preceq(sig, i, sg(x, y), sg(y, x)) == product_leq(x, y)
    assert preceq(sig, i, x, y) == preceq_via_sigma(sig, i, x, y)
    if product_leq(x, u) and product_leq(y, v):
        assert product_leq(sg(x, y), sg(u, v))
    if product_leq(x, u) and product_leq(v, y):
        assert preceq(sig, i, sg(x, y), sg(u, v))


@settings(max_examples=100, deadline=None)
@given(setting(), st.integers(0, 2 ** 31))
def test_composed_mixed_maps_stay_mixed_monotone(data, seed):
    sig, _, (x, y, u, v) = data
    rng = np.random.default_rng(seed)
    dims = x.dims
    A = MixedMonotoneOperator(monotone_system(rng, sig, dims))
    B = MixedMonotoneOperator(monotone_system(rng, sig, dims))
    BA = s_compose(B, A)
    lo_x, hi_x = ProductPoint(np.minimum(a, b) for a, b in zip(x, u)), ProductPoint(np.maximum(a, b) for a, b in zip(x, u))
    lo_y, hi_y = ProductPoint(np.minimum(a, b) for a, b in zip(y, v)), ProductPoint(np.maximum(a, b) for a, b in zip(y, v))
    assert product_leq(A(lo_x, hi_y), A(hi_x, lo_y))
    assert product_leq(BA(lo_x, hi_y), BA(hi_x, lo_y))
