"""Tripled fixed-point problems and the periodic boundary value system.

A tripled problem ``x = F(x,y,z), y = F(y,x,z), z = F(z,y,x)`` with F
nondecreasing in its first and last arguments and nonincreasing in the middle
one is an order-3 partially monotone system.  The periodic system

    x' = f(t, x, y, z),  y' = f(t, y, x, z),  z' = f(t, z, y, x),   x(0) = x(T), ...

becomes a tripled problem through the periodic Green's function ``G_lam``:
``F(x,y,z)(t) = int_0^T G_lam(t,s) (f(s, x(s), y(s), z(s)) + lam x(s)) ds``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (
    ComparisonFunction,
    MetricProfile,
    MonotoneSignature,
    PartiallyMonotoneSystem,
    ProductPoint,
    roundoff_allowance,
)
from .errors import ConfigError, StructuralError, ValidationError
from .solver import FixedPointResult, SolveConfig, solve
from .verify import ContractionReport, MIN_PERTURBATION, Violation

TRIPLED_SIGNATURE = MonotoneSignature.from_strings(["+-+", "-++", "+-+"])


@dataclass(frozen=True)
class TripledProblem:
    """``F : X^3 -> X`` on vectors of length ``dim``, increasing in args 1 and 3, decreasing in arg 2."""

    F: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    dim: int = 1
    metric: str = "sup"
    phi: ComparisonFunction | None = None
    box: tuple[float, float] | None = None
    name: str = "tripled"


def tripled_to_system(problem: TripledProblem) -> PartiallyMonotoneSystem:
    """The order-3 system ``T_1 = F(x,y,z)``, ``T_2 = F(y,x,z)``, ``T_3 = F(z,y,x)``."""
    F = problem.F
    ops = (
        lambda p: F(p[0], p[1], p[2]),
        lambda p: F(p[1], p[0], p[2]),
        lambda p: F(p[2], p[1], p[0]),
    )
    return PartiallyMonotoneSystem(
        signature=TRIPLED_SIGNATURE,
        operators=ops,
        dims=(problem.dim,) * 3,
        metric=MetricProfile.uniform(3, problem.metric),
        box=None if problem.box is None else (problem.box,) * 3,
        name=problem.name,
    )


@dataclass(frozen=True)
class TripledSample:
    """One sextuple with ``x <= u``, ``y >= v``, ``z <= w``."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray


def sample_tripled(problem: TripledProblem, count: int, seed: int = 0) -> list[TripledSample]:
    """Sextuples drawn from the problem box, ordered as the contraction condition on F requires."""
    if problem.box is None:
        raise ConfigError("a sampling box is required", "verify.box")
    lo, hi = problem.box
    if hi - lo <= MIN_PERTURBATION:
        raise ConfigError(f"interval [{lo}, {hi}] is degenerate", "verify.box")
    rng = np.random.default_rng(seed)
    m = problem.dim
    out = []
    for _ in range(count):
        pairs = []
        for _ in range(3):
            mag = np.exp(rng.uniform(math.log(MIN_PERTURBATION), math.log(hi - lo), size=m))
            a = lo + (hi - lo - mag) * rng.uniform(size=m)
            pairs.append((a, a + mag))
        (x, u), (v, y), (z, w) = pairs
        out.append(TripledSample(x, y, z, u, v, w))
    return out


def _dist(problem: TripledProblem, a, b) -> float:
    return MetricProfile((problem.metric,)).component_distance(0, a, b)


def check_tripled_contraction(problem: TripledProblem, phi: ComparisonFunction,
                              samples: list[TripledSample]) -> ContractionReport:
    """``d(F(x,y,z), F(u,v,w)) <= phi(max{d(x,u), d(y,v), d(z,w)})`` on the given samples."""
    report = ContractionReport(samples=len(samples), seed=-1, phi=phi.describe())
    for k, s in enumerate(samples):
        fa, fb = problem.F(s.x, s.y, s.z), problem.F(s.u, s.v, s.w)
        lhs = _dist(problem, fa, fb)
        dist = max(_dist(problem, s.x, s.u), _dist(problem, s.y, s.v), _dist(problem, s.z, s.w))
        rhs = phi(dist)
        if dist > 0:
            report.max_ratio = max(report.max_ratio, lhs / dist)
        if lhs > rhs + roundoff_allowance(fa, fb):
            report.violations.append(Violation(0, k, ProductPoint((s.x, s.y, s.z)),
                                               ProductPoint((s.u, s.v, s.w)), lhs, rhs))
    return report


def transferred_pairs(sample: TripledSample) -> list[tuple[ProductPoint, ProductPoint]]:
    """The pair for each ``T_i`` that evaluates F at exactly the sample's two triples.

    The pairs are comparable in the respective induced orders and have the
    same product distance as the sample.
    """
    s = sample
    return [
        (ProductPoint((s.x, s.y, s.z)), ProductPoint((s.u, s.v, s.w))),
        (ProductPoint((s.y, s.x, s.z)), ProductPoint((s.v, s.u, s.w))),
        (ProductPoint((s.z, s.y, s.x)), ProductPoint((s.w, s.v, s.u))),
    ]


def verify_tripled_bounds(problem: TripledProblem, x0, y0, z0, u0, v0, w0, slack: float = 0.0) -> dict:
    """The six admissibility inequalities for a tripled problem, as stated for F.

    ``x0 <= F(x0,v0,z0)``, ``y0 >= F(y0,u0,z0)``, ``z0 <= F(z0,v0,x0)``,
    ``u0 >= F(u0,y0,w0)``, ``v0 <= F(v0,x0,w0)``, ``w0 >= F(w0,y0,u0)``.
    Returns ``{label: bool}`` in that order.
    """
    F = problem.F
    checks = {
        "x": x0 <= F(x0, v0, z0) + slack,
        "y": y0 >= F(y0, u0, z0) - slack,
        "z": z0 <= F(z0, v0, x0) + slack,
        "u": u0 >= F(u0, y0, w0) - slack,
        "v": v0 <= F(v0, x0, w0) + slack,
        "w": w0 >= F(w0, y0, u0) - slack,
    }
    return {k: bool(np.all(v)) for k, v in checks.items()}


# --- periodic boundary value system ---------------------------------------------------------


def green_kernel(lam: float, period: float, t: float, s: float) -> float:
    """Periodic Green's function ``G_lam(t, s)``; on the diagonal the ``s < t`` branch is used."""
    if lam == 0:
        raise ValueError("the periodic Green's function needs lam != 0")
    denom = math.expm1(lam * period)
    if s <= t:
        return math.exp(lam * (period + s - t)) / denom
    return math.exp(lam * (s - t)) / denom


def time_grid(period: float, grid_size: int) -> np.ndarray:
    return np.linspace(0.0, period, grid_size)


def trapezoid_kernel_weights(lam: float, period: float, grid_size: int, normalize: bool = True) -> np.ndarray:
    """Quadrature matrix W with ``(W g)_k ~ int_0^T G_lam(t_k, s) g(s) ds``.

    Each row is a composite trapezoid rule split at ``s = t_k``, using the
    one-sided limits of the kernel on either side of its jump.  With
    ``normalize`` the rows are rescaled to sum to exactly ``1/lam``, so
    constants are integrated without error and the discrete operator keeps the
    contraction constant of the continuous one.
    """
    if lam == 0:
        raise ValueError("the periodic Green's function needs lam != 0")
    if grid_size < 3:
        raise ConfigError(f"needs at least 3 nodes, got {grid_size}", "pbvs.grid_size")
    t = time_grid(period, grid_size)
    h = period / (grid_size - 1)
    denom = math.expm1(lam * period)
    W = np.zeros((grid_size, grid_size))
    for k in range(grid_size):
        if k > 0:
            left = np.exp(lam * (period + t[: k + 1] - t[k])) / denom
            wts = np.full(k + 1, h)
            wts[[0, -1]] = h / 2
            W[k, : k + 1] += wts * left
        if k < grid_size - 1:
            right = np.exp(lam * (t[k:] - t[k])) / denom
            wts = np.full(grid_size - k, h)
            wts[[0, -1]] = h / 2
            W[k, k:] += wts * right
    if normalize:
        W *= (1.0 / lam) / W.sum(axis=1, keepdims=True)
    return W


ForcingFunction = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PBVSProblem:
    """Right-hand side ``f(t, x, y, z)`` (vectorized over the grid) and discretization data."""

    f: ForcingFunction
    lam: float
    period: float = 1.0
    phi: ComparisonFunction | None = None
    grid_size: int = 129
    box: tuple[float, float] | None = None
    name: str = "pbvs"

    def __post_init__(self):
        if not (isinstance(self.lam, (int, float)) and self.lam > 0):
            raise ConfigError(f"must be positive, got {self.lam!r}", "pbvs.lambda")
        if not (isinstance(self.period, (int, float)) and self.period > 0):
            raise ConfigError(f"must be positive, got {self.period!r}", "pbvs.period")
        if not isinstance(self.grid_size, int) or self.grid_size < 3:
            raise ConfigError(f"must be an integer >= 3, got {self.grid_size!r}", "pbvs.grid_size")

    @property
    def grid(self) -> np.ndarray:
        return time_grid(self.period, self.grid_size)

    @property
    def step(self) -> float:
        return self.period / (self.grid_size - 1)


def pbvs_operator(problem: PBVSProblem, weights: np.ndarray | None = None) -> TripledProblem:
    """The discretized integral operator F acting on grid functions."""
    W = trapezoid_kernel_weights(problem.lam, problem.period, problem.grid_size) if weights is None else weights
    t = problem.grid
    lam, f = problem.lam, problem.f

    def F(x, y, z):
        return W @ (f(t, x, y, z) + lam * x)

    return TripledProblem(F=F, dim=problem.grid_size, metric="sup", phi=problem.phi,
                          box=problem.box, name=problem.name)


def pbvs_system(problem: PBVSProblem) -> PartiallyMonotoneSystem:
    return tripled_to_system(pbvs_operator(problem))


@dataclass(frozen=True)
class CoupledLowerUpperSolution:
    """Grid functions ``(x, y, z)`` over ``(u, v, w)``."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def constant(cls, grid_size: int, x, y, z, u, v, w) -> "CoupledLowerUpperSolution":
        return cls(*(np.full(grid_size, float(c)) for c in (x, y, z, u, v, w)))

    @classmethod
    def from_solution(cls, x, y, z) -> "CoupledLowerUpperSolution":
        return cls(x, y, z, x, y, z)

    def arrays(self) -> tuple[np.ndarray, ...]:
        return tuple(np.asarray(a, dtype=float) for a in (self.x, self.y, self.z, self.u, self.v, self.w))


@dataclass
class LowerUpperReport:
    holds: bool
    first_violation: tuple[str, int] | None
    checks: dict[str, bool] = field(default_factory=dict)


def verify_lower_upper(problem: PBVSProblem, candidate: CoupledLowerUpperSolution,
                       slack: float = 1e-10, operator: TripledProblem | None = None) -> LowerUpperReport:
    """Integral form of the coupled lower/upper inequalities at every grid node.

    Reports the first failing inequality (in the order x, y, z, u, v, w) and
    the node where it fails.
    """
    arrays = candidate.arrays()
    for a in arrays:
        if a.shape != (problem.grid_size,):
            raise StructuralError(f"candidate grid functions must have {problem.grid_size} nodes, got {a.shape}")
    x, y, z, u, v, w = arrays
    F = (operator or pbvs_operator(problem)).F
    margins = {
        "x": F(x, v, z) - x,
        "y": y - F(y, u, z),
        "z": F(z, v, x) - z,
        "u": u - F(u, y, w),
        "v": F(v, x, w) - v,
        "w": w - F(w, y, u),
    }
    checks = {k: bool(np.all(m >= -slack)) for k, m in margins.items()}
    first = None
    for k, m in margins.items():
        bad = np.flatnonzero(m < -slack)
        if bad.size:
            first = (k, int(bad[0]))
            break
    return LowerUpperReport(first is None, first, checks)


@dataclass
class PBVSSolution:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    result: FixedPointResult
    defect: float
    periodicity: float


def periodic_derivative(values: np.ndarray, step: float) -> np.ndarray:
    """Central differences on a closed grid whose last node repeats the first."""
    core = np.asarray(values, dtype=float)[:-1]
    d = (np.roll(core, -1) - np.roll(core, 1)) / (2 * step)
    return np.append(d, d[0])


def pbvs_defect(problem: PBVSProblem, x, y, z) -> float:
    """``max_t |x' - f(t,x,y,z)|`` over the three equations, derivatives by finite differences."""
    t, h, f = problem.grid, problem.step, problem.f
    return float(max(
        np.max(np.abs(periodic_derivative(x, h) - f(t, x, y, z))),
        np.max(np.abs(periodic_derivative(y, h) - f(t, y, x, z))),
        np.max(np.abs(periodic_derivative(z, h) - f(t, z, y, x))),
    ))


def solve_pbvs(problem: PBVSProblem, candidate_bounds: CoupledLowerUpperSolution | None = None,
               config: SolveConfig | None = None) -> PBVSSolution:
    """Solve the discretized periodic system by the coupled iteration.

    With bounds, they must pass :func:`verify_lower_upper`; the iteration then
    starts from ``(x, y, z)`` and ``(u, v, w)``.  Without bounds it starts
    from zero.
    """
    tripled = pbvs_operator(problem)
    system = tripled_to_system(tripled)
    n = problem.grid_size
    if candidate_bounds is not None:
        report = verify_lower_upper(problem, candidate_bounds, operator=tripled)
        if not report.holds:
            kind, node = report.first_violation
            raise ValidationError(f"coupled lower/upper solution fails for {kind} at node {node}")
        x0, y0, z0, u0, v0, w0 = candidate_bounds.arrays()
        start_u, start_v = ProductPoint((x0, y0, z0)), ProductPoint((u0, v0, w0))
    else:
        start_u = start_v = ProductPoint((np.zeros(n),) * 3)
    config = config or SolveConfig(phi=problem.phi)
    result = solve(system, start_u, start_v, config)
    x, y, z = (np.array(c) for c in result.solution)
    return PBVSSolution(
        t=problem.grid, x=x, y=y, z=z, result=result,
        defect=pbvs_defect(problem, x, y, z),
        periodicity=float(max(abs(c[0] - c[-1]) for c in (x, y, z))),
    )
