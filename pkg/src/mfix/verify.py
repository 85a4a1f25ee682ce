"""Numerical checks of the hypotheses behind the coupled iteration.

* :func:`verify_contraction` samples pairs ``x``, ``y`` comparable in the
  order induced by row i and tests ``d_i(T_i x, T_i y) <= phi(max_j d_j(x_j, y_j))``.
  This is Monte-Carlo evidence, never a proof.
* :func:`verify_coupled_bounds` checks that a start pair brackets the iteration.
* :func:`classify_reducibility` decides whether reversing some component orders
  turns the system into one where every operator is nondecreasing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ComparisonFunction,
    Direction,
    MonotoneSignature,
    PartiallyMonotoneSystem,
    ProductPoint,
    check_same_profile,
    roundoff_allowance,
)
from .errors import ConfigError, StructuralError
from .sigma import MixedMonotoneOperator

MIN_PERTURBATION = 1e-6
SOUNDNESS_CAVEAT = "sampled check only; absence of violations is not a proof"


@dataclass(frozen=True)
class Violation:
    operator: int
    sample: int
    x: ProductPoint
    y: ProductPoint
    lhs: float
    rhs: float


@dataclass
class ContractionReport:
    samples: int
    seed: int
    phi: str
    violations: list[Violation] = field(default_factory=list)
    max_ratio: float = 0.0
    caveat: str = SOUNDNESS_CAVEAT

    @property
    def certified(self) -> bool:
        return not self.violations


def comparable_pair(system: PartiallyMonotoneSystem, i: int, rng: np.random.Generator,
                    box=None) -> tuple[ProductPoint, ProductPoint]:
    """Draw ``x``, ``y`` in the box with ``x`` below ``y`` in the order induced by row i.

    Each entry moves by a log-uniform amount in [1e-6, component width], up on
    increasing variables and down on decreasing ones; both points stay inside
    the box.
    """
    box = box if box is not None else system.box
    xs, ys = [], []
    for j, ((lo, hi), m) in enumerate(zip(box, system.dims)):
        mag = np.exp(rng.uniform(math.log(MIN_PERTURBATION), math.log(hi - lo), size=m))
        low_end = lo + (hi - lo - mag) * rng.uniform(size=m)
        high_end = low_end + mag
        if system.signature[i, j] is Direction.INCREASING:
            xs.append(low_end)
            ys.append(high_end)
        else:
            xs.append(high_end)
            ys.append(low_end)
    return ProductPoint(xs), ProductPoint(ys)


def contraction_terms(system: PartiallyMonotoneSystem, phi: ComparisonFunction, i: int,
                      x: ProductPoint, y: ProductPoint) -> tuple[float, float, float]:
    """``(lhs, rhs, distance)`` of the contraction inequality for ``T_i`` at the pair."""
    tx, ty = system.evaluate(i, x), system.evaluate(i, y)
    lhs = system.component_distance(i, tx, ty)
    dist = system.distance(x, y)
    return lhs, phi(dist), dist


def check_pair(system, phi, i, x, y) -> tuple[bool, float, float, float]:
    lhs, rhs, dist = contraction_terms(system, phi, i, x, y)
    slack = roundoff_allowance(system.evaluate(i, x), system.evaluate(i, y))
    return lhs <= rhs + slack, lhs, rhs, dist


def _checked_box(system: PartiallyMonotoneSystem, box):
    box = box if box is not None else system.box
    if box is None:
        raise ConfigError("a sampling box is required for contraction checks", "verify.box")
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    if len(box) != system.n:
        raise ConfigError(f"expected {system.n} intervals, got {len(box)}", "verify.box")
    for j, (lo, hi) in enumerate(box):
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi - lo <= MIN_PERTURBATION:
            raise ConfigError(f"interval {j} = [{lo}, {hi}] is degenerate", "verify.box")
    return box


def verify_contraction(system: PartiallyMonotoneSystem, phi: ComparisonFunction,
                       sample_count: int = 1000, seed: int = 0, box=None) -> ContractionReport:
    """Sampled check of the phi-contraction condition for every operator."""
    if sample_count < 1:
        raise ConfigError(f"must be >= 1, got {sample_count}", "verify.samples")
    box = _checked_box(system, box)
    rng = np.random.default_rng(seed)
    report = ContractionReport(samples=sample_count, seed=seed, phi=phi.describe())
    for s in range(sample_count):
        for i in range(system.n):
            x, y = comparable_pair(system, i, rng, box)
            ok, lhs, rhs, dist = check_pair(system, phi, i, x, y)
            if dist > 0:
                report.max_ratio = max(report.max_ratio, lhs / dist)
            if not ok:
                report.violations.append(Violation(i, s, x, y, lhs, rhs))
    report.violations.sort(key=lambda v: (v.operator, v.sample))
    return report


@dataclass
class BoundsReport:
    holds: bool
    first_failure: tuple[str, int] | None
    lower_ok: list[bool]
    upper_ok: list[bool]


def verify_coupled_bounds(A, x0: ProductPoint, y0: ProductPoint, slack: float = 0.0) -> BoundsReport:
    """Check ``x0_i <= A_i(x0, y0)`` and ``y0_i >= A_i(y0, x0)`` for every i.

    ``A`` may be a system or its mixed monotone operator.  Failures are
    reported as ``("lower", i)`` or ``("upper", i)``, lower family first.
    """
    if isinstance(A, PartiallyMonotoneSystem):
        A = MixedMonotoneOperator(A)
    check_same_profile(x0, y0)
    A.system.check_point(x0)
    lower_ok, upper_ok = [], []
    for i in range(A.n):
        lower_ok.append(bool(np.all(x0[i] <= A.component(i, x0, y0) + slack)))
        upper_ok.append(bool(np.all(y0[i] >= A.component(i, y0, x0) - slack)))
    failure = None
    for family, flags in (("lower", lower_ok), ("upper", upper_ok)):
        bad = [i for i, ok in enumerate(flags) if not ok]
        if bad:
            failure = (family, bad[0])
            break
    return BoundsReport(failure is None, failure, lower_ok, upper_ok)


@dataclass(frozen=True)
class ReducibilityVerdict:
    reducible: bool
    witness: tuple[int, ...] | None = None


def classify_reducibility(signature: MonotoneSignature) -> ReducibilityVerdict:
    """Find signs ``eps`` with ``S_ij = eps_i * eps_j`` for the +1/-1 matrix S.

    Fix ``eps_0 = +1``, read the rest off row 0 and confirm every entry.
    """
    S = signature.as_matrix()
    eps = S[0].copy()
    eps[0] = 1
    if np.array_equal(S, np.outer(eps, eps)):
        return ReducibilityVerdict(True, tuple(int(e) for e in eps))
    return ReducibilityVerdict(False, None)


MAX_ENUMERATION_ORDER = 5
_CHUNK = 1 << 18


def _signature_block(n: int, start: int, stop: int) -> np.ndarray:
    """Sign matrices for enumeration indices [start, stop); bit b set means entry b is decreasing."""
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n * n, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(np.int8).reshape(-1, n, n)


def iter_signatures(n: int):
    """Every n x n signature, in enumeration order."""
    for k in range(1 << (n * n)):
        bits = [(k >> b) & 1 for b in range(n * n)]
        yield MonotoneSignature.from_matrix(np.array([1 - 2 * b for b in bits]).reshape(n, n))


def _reducible_mask(S: np.ndarray) -> np.ndarray:
    eps = S[:, 0, :].copy()
    eps[:, 0] = 1
    return np.all(S == eps[:, :, None] * eps[:, None, :], axis=(1, 2))


def _blocks(n: int):
    if not 2 <= n <= MAX_ENUMERATION_ORDER:
        raise StructuralError(f"enumeration supports orders 2..{MAX_ENUMERATION_ORDER}, got {n}")
    total = 1 << (n * n)
    for start in range(0, total, _CHUNK):
        yield _signature_block(n, start, min(total, start + _CHUNK))


def count_reducible(n: int) -> tuple[int, int]:
    """``(total, reducible)`` over all ``2^(n^2)`` signatures of order n."""
    reducible = sum(int(np.count_nonzero(_reducible_mask(S))) for S in _blocks(n))
    return 1 << (n * n), reducible


def reducible_signatures(n: int):
    """Yield ``(signature, verdict)`` for every reducible signature of order n.

    The enumeration is filtered in bulk; each survivor is then classified
    individually so the verdict carries its witness.
    """
    for S in _blocks(n):
        for matrix in S[_reducible_mask(S)]:
            sig = MonotoneSignature.from_matrix(matrix)
            yield sig, classify_reducibility(sig)
