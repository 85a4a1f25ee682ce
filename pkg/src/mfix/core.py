"""Domain types: monotonicity signatures, product points, metrics and comparison functions.

Component spaces are finite-dimensional real vectors under the entrywise
order.  A point of the product space ``X = X_1 x ... x X_N`` is a
:class:`ProductPoint`; a system of coordinate-wise monotone operators is a
:class:`PartiallyMonotoneSystem`.  Indices are 0-based throughout.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NumericalError, StructuralError, ValidationError

# Allowance for round-off when comparing two operator evaluations, in units of
# machine epsilon times the magnitude of the values compared.
ROUNDOFF_ULPS = 64.0


class Direction(enum.IntEnum):
    """Declared direction of ``T_i`` in one variable."""

    INCREASING = 1
    DECREASING = -1

    @classmethod
    def parse(cls, token) -> "Direction":
        if isinstance(token, Direction):
            return token
        if token in ("+", "↗", "inc", "increasing", 1):
            return cls.INCREASING
        if token in ("-", "↘", "dec", "decreasing", -1):
            return cls.DECREASING
        raise StructuralError(f"unknown direction token {token!r}")

    @property
    def symbol(self) -> str:
        return "+" if self is Direction.INCREASING else "-"


@dataclass(frozen=True)
class MonotoneSignature:
    """N x N table of directions; ``entries[i][j]`` is the direction of T_i in variable j."""

    entries: tuple[tuple[Direction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Direction.parse(e) for e in row) for row in self.entries)
        n = len(rows)
        if n < 2:
            raise StructuralError(f"system order must be at least 2, got {n}")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise StructuralError(f"signature row {i} has {len(row)} entries, expected {n}")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "MonotoneSignature":
        """Build from rows such as ``["++-", "-++", "---"]``."""
        return cls(tuple(tuple(Direction.parse(c) for c in row) for row in rows))

    @classmethod
    def from_matrix(cls, matrix) -> "MonotoneSignature":
        """Build from a +1/-1 matrix."""
        m = np.asarray(matrix)
        return cls(tuple(tuple(Direction.parse(int(v)) for v in row) for row in m))

    @classmethod
    def all_increasing(cls, n: int) -> "MonotoneSignature":
        return cls(((Direction.INCREASING,) * n,) * n)

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij) -> Direction:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Direction, ...]:
        if not 0 <= i < self.n:
            raise StructuralError(f"operator index {i} out of range for order {self.n}")
        return self.entries[i]

    def as_matrix(self) -> np.ndarray:
        return np.array([[int(e) for e in row] for row in self.entries], dtype=int)

    def to_strings(self) -> list[str]:
        return ["".join(e.symbol for e in row) for row in self.entries]

    def __str__(self) -> str:
        return "/".join(self.to_strings())


class ProductPoint:
    """An element of ``X_1 x ... x X_N``; each component is a read-only float vector.

    Equality is exact, entry by entry.
    """

    __slots__ = ("components",)

    def __init__(self, components: Iterable):
        comps = []
        for c in components:
            a = np.array(c, dtype=float).reshape(-1)
            if a.size == 0:
                raise StructuralError("point components must be non-empty")
            a.flags.writeable = False
            comps.append(a)
        if not comps:
            raise StructuralError("a point needs at least one component")
        self.components = tuple(comps)

    @classmethod
    def from_flat(cls, flat, dims: Sequence[int]) -> "ProductPoint":
        flat = np.asarray(flat, dtype=float).reshape(-1)
        if flat.size != sum(dims):
            raise StructuralError(f"flat vector of size {flat.size} does not match profile {tuple(dims)}")
        return cls(np.split(flat, np.cumsum(dims)[:-1]))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.size for c in self.components)

    def flat(self) -> np.ndarray:
        return np.concatenate(self.components)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(c)) for c in self.components)

    def replace(self, j: int, value) -> "ProductPoint":
        comps = list(self.components)
        comps[j] = value
        return ProductPoint(comps)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, j: int) -> np.ndarray:
        return self.components[j]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProductPoint):
            return NotImplemented
        return self.dims == other.dims and all(
            np.array_equal(a, b) for a, b in zip(self.components, other.components)
        )

    def __hash__(self):
        return hash(tuple(c.tobytes() for c in self.components))

    def __repr__(self) -> str:
        inner = ", ".join(np.array2string(c, precision=6) for c in self.components)
        return f"ProductPoint({inner})"


def point(*components) -> ProductPoint:
    """Shorthand: ``point(1.0, [2, 3])``."""
    return ProductPoint(components)


def check_same_profile(x: ProductPoint, y: ProductPoint) -> None:
    if x.dims != y.dims:
        raise StructuralError(f"dimension profiles differ: {x.dims} vs {y.dims}")


def product_leq(x: ProductPoint, y: ProductPoint) -> bool:
    """Entrywise product order: every component of x is <= that of y (exact)."""
    check_same_profile(x, y)
    return all(bool(np.all(a <= b)) for a, b in zip(x.components, y.components))


METRIC_KINDS = ("sup", "euclidean")


@dataclass(frozen=True)
class MetricProfile:
    """Per-component metrics combined by the maximum."""

    kinds: tuple[str, ...]

    def __post_init__(self):
        for k in self.kinds:
            if k not in METRIC_KINDS:
                raise StructuralError(f"unknown metric kind {k!r}; expected one of {METRIC_KINDS}")

    @classmethod
    def uniform(cls, n: int, kind: str = "sup") -> "MetricProfile":
        return cls((kind,) * n)

    def component_distance(self, j: int, a, b) -> float:
        diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        if self.kinds[j] == "sup":
            return float(np.max(np.abs(diff)))
        return float(np.sqrt(np.dot(diff, diff)))

    def distance(self, x: ProductPoint, y: ProductPoint) -> float:
        check_same_profile(x, y)
        if len(x) != len(self.kinds):
            raise StructuralError(f"metric profile has {len(self.kinds)} components, point has {len(x)}")
        return max(self.component_distance(j, a, b) for j, (a, b) in enumerate(zip(x, y)))


def product_metric(x: ProductPoint, y: ProductPoint, metric: MetricProfile | None = None) -> float:
    """``max_j d_j(x_j, y_j)``; sup metric on every component unless ``metric`` says otherwise."""
    if metric is None:
        metric = MetricProfile.uniform(len(x))
    return metric.distance(x, y)


@dataclass(frozen=True)
class ComparisonFunction:
    """A nondecreasing map of [0, inf) whose iterates tend to zero.

    Use the factories :meth:`linear`, :meth:`log`, :meth:`rational` and
    :meth:`custom`; the last one is checked on samples before it is accepted.
    """

    kind: str
    alpha: float | None = None
    func: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == "linear":
            if self.alpha is None or not 0.0 <= self.alpha < 1.0:
                raise ValidationError(f"linear comparison function needs 0 <= alpha < 1, got {self.alpha}")
        elif self.kind == "custom":
            if self.func is None:
                raise ValidationError("custom comparison function needs a callable")
        elif self.kind not in ("log", "rational"):
            raise ValidationError(f"unknown comparison function kind {self.kind!r}")

    @classmethod
    def linear(cls, alpha: float) -> "ComparisonFunction":
        return cls("linear", float(alpha))

    @classmethod
    def log(cls) -> "ComparisonFunction":
        return cls("log")

    @classmethod
    def rational(cls) -> "ComparisonFunction":
        return cls("rational")

    @classmethod
    def custom(cls, func, *, iterations=2000, eps=1e-3, probes=None, seed=0) -> "ComparisonFunction":
        """Wrap an arbitrary scalar map, rejecting it unless it passes the sampled checks."""
        phi = cls("custom", func=func)
        t = _probe_points(seed) if probes is None else np.asarray(probes, dtype=float)
        if not phi.is_monotone_on(t):
            raise ValidationError("custom comparison function is not nondecreasing on the probes")
        if not phi.decays_on(t, iterations, eps):
            raise ValidationError(f"custom comparison function iterates do not drop below {eps} "
                                  f"within {iterations} steps")
        return phi

    @property
    def is_builtin(self) -> bool:
        return self.kind != "custom"

    def __call__(self, t: float) -> float:
        if self.kind == "linear":
            return self.alpha * t
        if self.kind == "log":
            return math.log1p(t)
        if self.kind == "rational":
            return t / (t + 1.0)
        return float(self.func(t))

    def iterate(self, t: float, n: int) -> float:
        return phi_iterate(self, t, n)

    def is_monotone_on(self, probes) -> bool:
        t = np.sort(np.asarray(probes, dtype=float))
        vals = [self(float(s)) for s in t]
        return all(v >= 0.0 for v in vals) and all(a <= b for a, b in zip(vals, vals[1:]))

    def decays_on(self, probes, iterations: int, eps: float) -> bool:
        """Whether ``phi^iterations(t) < eps`` for every probe t > 0.

        Built-ins belong to the class by construction; for them this still
        evaluates the iterates, it just cannot fail for reasonable budgets.
        """
        return all(phi_iterate(self, float(t), iterations) < eps for t in probes if t > 0)

    def describe(self) -> str:
        if self.kind == "linear":
            return f"linear(alpha={self.alpha!r})"
        return self.kind


def _probe_points(seed: int, count: int = 64) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.concatenate([[0.0, 1e-9, 1.0], 10.0 ** rng.uniform(-6, 3, size=count)])


def phi_iterate(phi: ComparisonFunction, t: float, n: int) -> float:
    """``phi`` applied ``n`` times to ``t``; ``n = 0`` returns ``t``."""
    if t < 0:
        raise ValueError(f"comparison functions act on [0, inf), got t={t}")
    if n < 0:
        raise ValueError(f"iteration count must be nonnegative, got {n}")
    if phi.kind == "linear":
        return t * phi.alpha ** n
    if phi.kind == "rational":
        # t/(t+1) iterated n times is t/(1 + n t)
        return t / (1.0 + n * t)
    for _ in range(n):
        t = phi(t)
    return t


Operator = Callable[[ProductPoint], np.ndarray]


@dataclass(frozen=True)
class PartiallyMonotoneSystem:
    """The operators ``T_i : X -> X_i`` together with their declared signature.

    ``box`` optionally gives a ``(low, high)`` interval per component; it is
    the region used for sampled validation and contraction checks.
    """

    signature: MonotoneSignature
    operators: tuple[Operator, ...]
    dims: tuple[int, ...]
    metric: MetricProfile | None = None
    box: tuple[tuple[float, float], ...] | None = None
    name: str = "system"

    def __post_init__(self):
        n = self.signature.n
        object.__setattr__(self, "operators", tuple(self.operators))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if len(self.operators) != n:
            raise StructuralError(f"{len(self.operators)} operators for a signature of order {n}")
        if len(self.dims) != n or any(d < 1 for d in self.dims):
            raise StructuralError(f"dimension profile {self.dims} does not fit order {n}")
        if self.metric is None:
            object.__setattr__(self, "metric", MetricProfile.uniform(n))
        elif len(self.metric.kinds) != n:
            raise StructuralError("metric profile length differs from the system order")
        if self.box is not None:
            box = tuple((float(lo), float(hi)) for lo, hi in self.box)
            if len(box) != n:
                raise StructuralError("sampling box needs one interval per component")
            object.__setattr__(self, "box", box)

    @property
    def n(self) -> int:
        return self.signature.n

    def check_point(self, x: ProductPoint) -> None:
        if x.dims != self.dims:
            raise StructuralError(f"point profile {x.dims} does not match system profile {self.dims}")

    def evaluate(self, i: int, x: ProductPoint) -> np.ndarray:
        """``T_i(x)`` as a float vector of length ``dims[i]``."""
        out = np.asarray(self.operators[i](x), dtype=float).reshape(-1)
        if out.size != self.dims[i]:
            raise NumericalError(f"operator {i} returned {out.size} values, expected {self.dims[i]}", i)
        if not np.all(np.isfinite(out)):
            raise NumericalError(f"operator {i} returned a non-finite value", i)
        return out

    def apply(self, x: ProductPoint) -> ProductPoint:
        """``T(x) = (T_1(x), ..., T_N(x))``."""
        self.check_point(x)
        return ProductPoint(self.evaluate(i, x) for i in range(self.n))

    def distance(self, x: ProductPoint, y: ProductPoint) -> float:
        return self.metric.distance(x, y)

    def component_distance(self, j: int, a, b) -> float:
        return self.metric.component_distance(j, a, b)

    def sample_point(self, rng: np.random.Generator) -> ProductPoint:
        if self.box is None:
            raise ValidationError("no sampling box declared for this system")
        return ProductPoint(rng.uniform(lo, hi, size=m) for (lo, hi), m in zip(self.box, self.dims))

    def monotonicity_violations(self, samples: int = 200, seed: int = 0) -> list[tuple[int, int]]:
        """Sampled check of the declared signature.

        Draws x in the box, raises a single component j within the box to get y, and checks
        that each ``T_i`` moves in its declared direction.  Returns the
        offending ``(i, j)`` pairs.  Comparisons allow a few ulps of round-off.
        """
        rng = np.random.default_rng(seed)
        bad: set[tuple[int, int]] = set()
        for _ in range(samples):
            x = self.sample_point(rng)
            j = int(rng.integers(self.n))
            lo, hi = self.box[j]
            a, b = rng.uniform(lo, hi, size=(2, self.dims[j]))
            x = x.replace(j, np.minimum(a, b))
            y = x.replace(j, np.maximum(a, b))
            for i in range(self.n):
                tx, ty = self.evaluate(i, x), self.evaluate(i, y)
                slack = roundoff_allowance(tx, ty)
                if self.signature[i, j] is Direction.INCREASING:
                    ok = np.all(tx <= ty + slack)
                else:
                    ok = np.all(tx >= ty - slack)
                if not ok:
                    bad.add((i, j))
        return sorted(bad)

    def validate(self, samples: int = 200, seed: int = 0) -> None:
        """Raise :class:`ValidationError` unless the signature survives sampling.

        Systems without a box cannot be sampled and pass structurally.
        """
        if self.box is None:
            return
        bad = self.monotonicity_violations(samples, seed)
        if bad:
            pairs = ", ".join(f"T_{i}/x_{j}" for i, j in bad)
            raise ValidationError(f"declared monotonicity fails on samples for {pairs}")


def roundoff_allowance(*values) -> float:
    scale = max([1.0] + [float(np.max(np.abs(v))) for v in values])
    return ROUNDOFF_ULPS * np.finfo(float).eps * scale
