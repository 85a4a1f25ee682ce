"""Coupled fixed-point iteration.

Starting from any pair ``(u0, v0)`` the iteration

    u^{n+1} = A(u^n, v^n),   v^{n+1} = A(v^n, u^n)

converges to the unique solution of ``x = T(x)`` when every ``T_i`` is a
phi-contraction on pairs comparable in its induced order.  The loop stops once
both step residuals and the gap ``d(u^n, v^n)`` are below the tolerance.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .core import ComparisonFunction, PartiallyMonotoneSystem, ProductPoint, product_leq
from .errors import ConfigError
from .sigma import MixedMonotoneOperator, build_mixed_operator

log = logging.getLogger(__name__)

DIVERGENCE_WINDOW = 50
DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class SolveConfig:
    tolerance: float = 1e-10
    max_iterations: int = 10_000
    phi: ComparisonFunction | None = None
    track_bracket: bool = True

    def __post_init__(self):
        if not (isinstance(self.tolerance, (int, float)) and self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise ConfigError(f"must be a positive finite number, got {self.tolerance!r}", "solve.tolerance")
        if not isinstance(self.max_iterations, int) or self.max_iterations < 1:
            raise ConfigError(f"must be an integer >= 1, got {self.max_iterations!r}", "solve.max_iterations")


@dataclass(frozen=True)
class CoupledIterationState:
    u: ProductPoint
    v: ProductPoint
    iteration: int = 0
    residual: float = math.inf
    gap: float = 0.0
    bracket_valid: bool = True


class TraceRecord(NamedTuple):
    iteration: int
    residual: float
    gap: float
    bracket_valid: bool


@dataclass
class FixedPointResult:
    solution: ProductPoint
    iterations: int
    residual: float
    gap: float
    converged: bool
    status: str
    history: list[TraceRecord] = field(default_factory=list)
    bracket_valid: bool = False
    defect: float = math.nan
    a_priori_iterations: int | None = None


def initial_state(system: PartiallyMonotoneSystem, u0: ProductPoint, v0: ProductPoint) -> CoupledIterationState:
    system.check_point(u0)
    system.check_point(v0)
    return CoupledIterationState(u0, v0, 0, math.inf, system.distance(u0, v0), product_leq(u0, v0))


def coupled_step(A: MixedMonotoneOperator, state: CoupledIterationState,
                 track_bracket: bool = True) -> CoupledIterationState:
    """One sweep ``(u, v) -> (A(u, v), A(v, u))`` with residual, gap and bracket bookkeeping.

    The bracket flag stays true only while ``u`` never decreases, ``v`` never
    increases and ``u <= v``, all entrywise and exact.
    """
    u, v = state.u, state.v
    u_next = A(u, v)
    v_next = A(v, u)
    system = A.system
    residual = max(system.distance(u_next, u), system.distance(v_next, v))
    gap = system.distance(u_next, v_next)
    bracket = state.bracket_valid
    if track_bracket and bracket:
        bracket = product_leq(u, u_next) and product_leq(v_next, v) and product_leq(u_next, v_next)
    return CoupledIterationState(u_next, v_next, state.iteration + 1, residual, gap, bracket and track_bracket)


def _record(state: CoupledIterationState) -> TraceRecord:
    return TraceRecord(state.iteration, state.residual, state.gap, state.bracket_valid)


def a_priori_iterations(phi: ComparisonFunction | None, first_residual: float, tolerance: float) -> int | None:
    """Iterations after which a linear phi guarantees the step residual is below tolerance."""
    if phi is None or phi.kind != "linear" or not 0.0 < phi.alpha < 1.0:
        return None
    if first_residual <= tolerance:
        return 0
    return math.ceil(math.log(tolerance / first_residual) / math.log(phi.alpha))


def solve(system: PartiallyMonotoneSystem, start_u: ProductPoint, start_v: ProductPoint,
          config: SolveConfig | None = None, *,
          operator: MixedMonotoneOperator | None = None,
          callback: Callable[[CoupledIterationState], None] | None = None) -> FixedPointResult:
    """Run the coupled iteration from ``(start_u, start_v)``.

    The returned solution is ``u^n`` for the first n with
    ``d(u^{n+1}, u^n), d(v^{n+1}, v^n) <= tol`` and ``d(u^n, v^n) <= tol``.
    ``callback`` sees every state, starting with the initial one.
    """
    config = config or SolveConfig()
    A = operator if operator is not None else build_mixed_operator(system)
    tol = config.tolerance
    state = initial_state(system, start_u, start_v)
    if not config.track_bracket:
        state = CoupledIterationState(state.u, state.v, 0, state.residual, state.gap, False)
    history = [_record(state)]
    if callback:
        callback(state)
    status = "max_iterations"
    first_residual = None

    while state.iteration <= config.max_iterations:
        nxt = coupled_step(A, state, config.track_bracket)
        history.append(_record(nxt))
        if callback:
            callback(nxt)
        if first_residual is None:
            first_residual = nxt.residual
        log.debug("iteration %d residual %.3e gap %.3e", nxt.iteration, nxt.residual, nxt.gap)
        if nxt.residual <= tol and state.gap <= tol:
            status = "converged"
            break
        if nxt.iteration > DIVERGENCE_WINDOW:
            earlier = history[nxt.iteration - DIVERGENCE_WINDOW].residual
            if math.isfinite(earlier) and nxt.residual > DIVERGENCE_FACTOR * earlier:
                status = "diverged"
                state = nxt
                break
        if nxt.iteration > config.max_iterations:
            break
        state = nxt

    x_star = state.u
    defect = system.distance(system.apply(x_star), x_star)
    converged = status == "converged"
    if converged and defect > 2 * tol:
        status = "a_posteriori_failed"
        converged = False
    final = history[-1]
    result = FixedPointResult(
        solution=x_star,
        iterations=state.iteration,
        residual=final.residual,
        gap=state.gap,
        converged=converged,
        status=status,
        history=history,
        bracket_valid=final.bracket_valid,
        defect=defect,
        a_priori_iterations=a_priori_iterations(config.phi, first_residual or 0.0, tol),
    )
    log.debug("solve %s after %d iterations (residual %.3e, gap %.3e)", status, result.iterations,
             result.residual, result.gap)
    return result


def solve_from_single_start(system: PartiallyMonotoneSystem, start: ProductPoint,
                            config: SolveConfig | None = None, **kwargs) -> FixedPointResult:
    """Coupled iteration with ``u0 = v0``; both sequences are then the Picard iterates of T."""
    return solve(system, start, start, config, **kwargs)
