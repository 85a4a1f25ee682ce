import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfix.core import (
    ComparisonFunction,
    Direction,
    MetricProfile,
    MonotoneSignature,
    PartiallyMonotoneSystem,
    ProductPoint,
    phi_iterate,
    point,
    product_leq,
    product_metric,
)
from mfix.errors import NumericalError, StructuralError, ValidationError

finite = st.floats(-1e6, 1e6, allow_nan=False)


@st.composite
def point_pairs(draw, count=2):
    dims = draw(st.lists(st.integers(1, 3), min_size=1, max_size=5))
    return [ProductPoint([draw(st.lists(finite, min_size=m, max_size=m)) for m in dims]) for _ in range(count)]


# --- signature -------------------------------------------------------------------------------


def test_signature_from_strings_round_trip():
    sig = MonotoneSignature.from_strings(["++-", "-++", "---"])
    assert sig.n == 3
    assert sig[0, 2] is Direction.DECREASING
    assert sig.to_strings() == ["++-", "-++", "---"]
    assert str(sig) == "++-/-++/---"
    assert MonotoneSignature.from_matrix(sig.as_matrix()) == sig


def test_direction_parse_accepts_symbols():
    assert Direction.parse("↗") is Direction.INCREASING
    assert Direction.parse("↘") is Direction.DECREASING
    assert Direction.parse(-1) is Direction.DECREASING
    with pytest.raises(StructuralError):
        Direction.parse("?")


def test_signature_must_be_square():
    with pytest.raises(StructuralError):
        MonotoneSignature.from_strings(["++", "+"])


# --- order ------------------------------------------------------------------------------------


def test_product_leq_examples():
    assert product_leq(point([0], [0]), point([0], [0]))
    assert not product_leq(point([0], [1]), point([1], [0]))
    assert product_leq(point([1, 2], [3]), point([1, 3], [4]))


def test_product_leq_profile_mismatch():
    with pytest.raises(StructuralError):
        product_leq(point([1, 2]), point([1]))


@given(point_pairs(3))
def test_product_order_is_reflexive_and_transitive(pts):
    x, y, z = pts
    assert product_leq(x, x)
    if product_leq(x, y) and product_leq(y, z):
        assert product_leq(x, z)
    if product_leq(x, y) and product_leq(y, x):
        assert x == y


# --- metric -----------------------------------------------------------------------------------


def test_metric_examples():
    x = point([0], [0])
    assert product_metric(x, x) == 0
    assert product_metric(x, point([3], [1])) == 3
    assert product_metric(point([1, 5], [2]), point([1, 1], [2])) == 4


def test_euclidean_component_metric():
    m = MetricProfile(("euclidean", "sup"))
    assert m.distance(point([0, 0], [0]), point([3, 4], [1])) == pytest.approx(5.0)


@settings(max_examples=200)
@given(point_pairs(3))
def test_metric_axioms(pts):
    x, y, z = pts
    d = product_metric
    assert d(x, x) == 0
    assert d(x, y) == d(y, x)
    assert d(x, y) >= 0
    assert d(x, z) <= d(x, y) + d(y, z) + 1e-9 * (1 + d(x, y) + d(y, z))


# --- comparison functions --------------------------------------------------------------------


def test_phi_examples():
    assert phi_iterate(ComparisonFunction.linear(0.5), 8.0, 3) == 1.0
    assert phi_iterate(ComparisonFunction.rational(), 1.0, 3) == pytest.approx(0.25, rel=1e-15)
    for phi in (ComparisonFunction.linear(0.3), ComparisonFunction.log(), ComparisonFunction.rational()):
        assert phi_iterate(phi, 0.0, 10) == 0.0


def test_phi_log_iterates_by_hand():
    t = 2.0
    for _ in range(4):
        t = math.log(1 + t)
    assert phi_iterate(ComparisonFunction.log(), 2.0, 4) == pytest.approx(t, rel=1e-14)


def test_phi_rejects_negative_argument():
    with pytest.raises(ValueError):
        phi_iterate(ComparisonFunction.log(), -1.0, 2)


def test_linear_alpha_range():
    with pytest.raises(ValidationError):
        ComparisonFunction.linear(1.0)


@pytest.mark.parametrize("phi", [ComparisonFunction.linear(0.9), ComparisonFunction.log(),
                                 ComparisonFunction.rational()])
def test_builtin_phi_monotone_on_many_pairs(phi):
    rng = np.random.default_rng(11)
    s, t = 10.0 ** rng.uniform(-8, 4, size=(2, 1000))
    lo, hi = np.minimum(s, t), np.maximum(s, t)
    assert all(phi(a) <= phi(b) for a, b in zip(lo, hi))
    assert phi.decays_on(hi[:50], iterations=20000, eps=1e-3)


def test_custom_phi_accepted_and_rejected():
    phi = ComparisonFunction.custom(lambda t: t / (2 + t))
    assert phi(2.0) == 0.5
    with pytest.raises(ValidationError):
        ComparisonFunction.custom(lambda t: t)           # never decays
    with pytest.raises(ValidationError):
        ComparisonFunction.custom(lambda t: 0.5 * math.sin(t) ** 2)   # not monotone


# --- systems ----------------------------------------------------------------------------------


def _two_by_two(factor=0.5, box=((-1, 1), (-1, 1))):
    sig = MonotoneSignature.from_strings(["+-", "++"])
    ops = (lambda p: factor * p[0] - factor * p[1], lambda p: factor * (p[0] + p[1]))
    return PartiallyMonotoneSystem(sig, ops, (1, 1), box=box)


def test_system_apply_and_profile_check():
    system = _two_by_two()
    assert system.apply(point([1.0], [0.5])) == point([0.25], [0.75])
    with pytest.raises(StructuralError):
        system.apply(point([1.0, 2.0], [0.5]))


def test_system_wrong_operator_count():
    with pytest.raises(StructuralError):
        PartiallyMonotoneSystem(MonotoneSignature.all_increasing(2), (lambda p: p[0],), (1, 1))


def test_non_finite_output_names_component():
    sig = MonotoneSignature.all_increasing(2)
    system = PartiallyMonotoneSystem(sig, (lambda p: p[0], lambda p: p[1] * np.inf), (1, 1))
    with pytest.raises(NumericalError) as info:
        system.apply(point([1.0], [1.0]))
    assert info.value.component == 1


def test_validate_detects_wrong_declaration():
    system = _two_by_two()
    system.validate()
    flipped = PartiallyMonotoneSystem(MonotoneSignature.from_strings(["++", "++"]), system.operators,
                                      (1, 1), box=system.box)
    assert flipped.monotonicity_violations() == [(0, 1)]
    with pytest.raises(ValidationError):
        flipped.validate()


def test_point_is_read_only():
    x = point([1.0, 2.0])
    with pytest.raises(ValueError):
        x[0][0] = 5.0
    assert hash(x) == hash(point([1.0, 2.0]))
