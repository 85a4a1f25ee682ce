"""Selector operators, the induced orders, s-composition and the mixed monotone companion.

For each operator ``T_i`` the selector ``sigma_i(x, y)`` takes component j from
``x`` where ``T_i`` increases in variable j and from ``y`` where it decreases.
Composing, ``A_i = T_i o sigma_i`` is nondecreasing in its first argument,
nonincreasing in its second, and ``A(x, x) = T(x)``.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .core import (
    Direction,
    MonotoneSignature,
    PartiallyMonotoneSystem,
    ProductPoint,
    check_same_profile,
    product_leq,
)
from .errors import StructuralError

Bivariate = Callable[[ProductPoint, ProductPoint], ProductPoint]


def _signature_of(obj) -> MonotoneSignature:
    if isinstance(obj, MonotoneSignature):
        return obj
    if isinstance(obj, PartiallyMonotoneSystem):
        return obj.signature
    sig = getattr(obj, "signature", None)
    if isinstance(sig, MonotoneSignature):
        return sig
    raise TypeError(f"cannot read a signature from {type(obj).__name__}")


def selection_table(signature: MonotoneSignature) -> tuple[tuple[bool, ...], ...]:
    """``table[i][j]`` is True when sigma_i takes component j from its first argument."""
    return tuple(tuple(e is Direction.INCREASING for e in row) for row in signature.entries)


def _check_index(sig: MonotoneSignature, i: int) -> None:
    if not 0 <= i < sig.n:
        raise StructuralError(f"operator index {i} out of range for order {sig.n}")


def _select(take_first: tuple[bool, ...], x: ProductPoint, y: ProductPoint) -> ProductPoint:
    if len(x) != len(take_first):
        raise StructuralError(f"point has {len(x)} components, signature has {len(take_first)}")
    return ProductPoint(a if first else b for first, a, b in zip(take_first, x.components, y.components))


def sigma_apply(system, i: int, x: ProductPoint, y: ProductPoint) -> ProductPoint:
    """``sigma_i(x, y)`` for a system or a bare signature."""
    sig = _signature_of(system)
    _check_index(sig, i)
    check_same_profile(x, y)
    return _select(tuple(e is Direction.INCREASING for e in sig.entries[i]), x, y)


def preceq(system, i: int, x: ProductPoint, y: ProductPoint) -> bool:
    """The order induced by row i: ``<=`` on increasing variables, ``>=`` on decreasing ones."""
    sig = _signature_of(system)
    _check_index(sig, i)
    check_same_profile(x, y)
    if len(x) != sig.n:
        raise StructuralError(f"point has {len(x)} components, signature has {sig.n}")
    for e, a, b in zip(sig.entries[i], x.components, y.components):
        if e is Direction.INCREASING:
            if not np.all(a <= b):
                return False
        elif not np.all(a >= b):
            return False
    return True


def preceq_via_sigma(system, i: int, x: ProductPoint, y: ProductPoint) -> bool:
    """Same relation written as ``sigma_i(x, y) <= sigma_i(y, x)``."""
    return product_leq(sigma_apply(system, i, x, y), sigma_apply(system, i, y, x))


def projection(x: ProductPoint, y: ProductPoint) -> ProductPoint:
    """``P(x, y) = x``; the two-sided identity of s-composition."""
    return x


def s_compose(outer: Bivariate, inner: Bivariate) -> Bivariate:
    """``(outer * inner)(x, y) = outer(inner(x, y), inner(y, x))``."""

    def composed(x, y):
        return outer(inner(x, y), inner(y, x))

    return composed


def s_power(op: Bivariate, n: int) -> Bivariate:
    """n-fold s-composition of a bivariate self-map; ``n = 0`` is the projection.

    The pair ``(A^k(x, y), A^k(y, x))`` is advanced together, so evaluation
    costs 2n calls of ``op`` rather than growing exponentially.
    """
    if n < 0:
        raise ValueError(f"power must be nonnegative, got {n}")
    if n == 0:
        return projection

    def powered(x, y):
        p, q = x, y
        for _ in range(n):
            p, q = op(p, q), op(q, p)
        return p

    return powered


class Selector:
    """``sigma_i`` as a bivariate self-map, usable with :func:`s_compose`."""

    def __init__(self, system, i: int):
        self.signature = _signature_of(system)
        _check_index(self.signature, i)
        self.index = i
        self._take_first = selection_table(self.signature)[i]

    def __call__(self, x: ProductPoint, y: ProductPoint) -> ProductPoint:
        check_same_profile(x, y)
        return _select(self._take_first, x, y)


class MixedMonotoneOperator:
    """The companion ``A : X^2 -> X`` with ``A_i(x, y) = T_i(sigma_i(x, y))``."""

    def __init__(self, system: PartiallyMonotoneSystem):
        self.system = system
        self._table = selection_table(system.signature)

    @property
    def n(self) -> int:
        return self.system.n

    def selector(self, i: int) -> Selector:
        return Selector(self.system, i)

    def component(self, i: int, x: ProductPoint, y: ProductPoint) -> np.ndarray:
        return self.system.evaluate(i, _select(self._table[i], x, y))

    def component_map(self, i: int) -> Callable[[ProductPoint, ProductPoint], np.ndarray]:
        return lambda x, y: self.component(i, x, y)

    def __call__(self, x: ProductPoint, y: ProductPoint) -> ProductPoint:
        self.system.check_point(x)
        self.system.check_point(y)
        return ProductPoint(self.component(i, x, y) for i in range(self.n))


def build_mixed_operator(system: PartiallyMonotoneSystem, *, validate: bool = True,
                         samples: int = 200, seed: int = 0) -> MixedMonotoneOperator:
    """Construct ``A`` after a sampled check of the declared signature."""
    if validate:
        system.validate(samples=samples, seed=seed)
    return MixedMonotoneOperator(system)
