"""Shared generators for random signatures, points and exactly monotone systems."""
from __future__ import annotations

import numpy as np
import pytest

from mfix.core import Direction, MonotoneSignature, PartiallyMonotoneSystem, ProductPoint

ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """``record(number, ok, detail)`` prints one PASS/FAIL line and keeps it for the summary."""
    lines = request.config.stash[ACCEPTANCE_KEY]

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        print(line)
        lines.append(line)

    return record


def random_signature(rng: np.random.Generator, n: int) -> MonotoneSignature:
    return MonotoneSignature.from_matrix(rng.choice([1, -1], size=(n, n)))


def random_dims(rng: np.random.Generator, n: int, max_dim: int = 3) -> tuple[int, ...]:
    return tuple(int(d) for d in rng.integers(1, max_dim + 1, size=n))


def random_point(rng: np.random.Generator, dims, grid: bool = False) -> ProductPoint:
    """Continuous normal entries, or small integers so that ties and comparable pairs are common."""
    if grid:
        return ProductPoint(rng.integers(-1, 2, size=m).astype(float) for m in dims)
    return ProductPoint(rng.normal(size=m) for m in dims)


def nonnegative_shift(rng: np.random.Generator, dims) -> ProductPoint:
    """Entrywise nonnegative offsets, zero about a third of the time."""
    return ProductPoint(np.where(rng.random(m) < 0.3, 0.0, rng.exponential(size=m)) for m in dims)


def shifted(x: ProductPoint, d: ProductPoint, sign: float = 1.0) -> ProductPoint:
    return ProductPoint(a + sign * b for a, b in zip(x.components, d.components))


def monotone_system(rng: np.random.Generator, signature: MonotoneSignature, dims,
                    contraction: float = 0.8, box: float = 5.0) -> PartiallyMonotoneSystem:
    """A system that respects ``signature`` exactly, even after rounding.

    ``T_i(x) = c_i + sum_j s_ij a_ij h_ij(x_j)`` with ``h`` one of sum, max or
    min of the entries.  Every step is a monotone floating-point operation,
    so the declared directions hold without any slack.  The weights keep the
    sup-metric Lipschitz constant of each ``T_i`` at or below ``contraction``.
    """
    n = signature.n
    aggregates = (np.sum, np.max, np.min)
    total = sum(dims)
    weights = rng.uniform(0.1, 1.0, size=(n, n))
    weights *= contraction / (weights * np.asarray(dims)[None, :]).sum(axis=1, keepdims=True)
    kinds = rng.integers(0, 3, size=(n, n))
    offsets = [rng.normal(size=m) for m in dims]

    def make(i):
        def op(p):
            out = offsets[i].copy()
            for j in range(n):
                term = weights[i, j] * aggregates[kinds[i, j]](p[j])
                if signature[i, j] is Direction.INCREASING:
                    out = out + term
                else:
                    out = out - term
            return out
        return op

    assert total > 0
    return PartiallyMonotoneSystem(signature, tuple(make(i) for i in range(n)), dims,
                                   box=((-box, box),) * n, name="random")


@pytest.fixture
def configs_dir():
    from pathlib import Path
    return Path(__file__).resolve().parent.parent / "configs"
