"""Operators and PBVS right-hand sides that configuration files can refer to by name.

Nothing here evaluates user code: a config either names a registry entry or
supplies an affine / separable-polynomial coefficient table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import ComparisonFunction
from .errors import ConfigError


def affine_operators(matrix, offset, dims):
    """``T(x) = M x + c`` on the flattened point, split back into components."""
    M = np.asarray(matrix, dtype=float)
    c = np.asarray(offset, dtype=float).reshape(-1)
    total = sum(dims)
    if M.shape != (total, total):
        raise ConfigError(f"matrix must be {total}x{total}, got {M.shape}", "system.affine.matrix")
    if c.shape != (total,):
        raise ConfigError(f"offset must have {total} entries, got {c.size}", "system.affine.offset")
    bounds = np.concatenate([[0], np.cumsum(dims)])

    def make(i):
        rows = slice(bounds[i], bounds[i + 1])
        Mi, ci = M[rows], c[rows]
        return lambda p: Mi @ p.flat() + ci

    return tuple(make(i) for i in range(len(dims)))


def polynomial_operators(constant, coefficients, dims):
    """``T_i(x) = c_i + sum_j sum_k a_ijk x_j^k`` (powers from 1), entrywise on equal-length components."""
    n = len(dims)
    if len(set(dims)) != 1:
        raise ConfigError("polynomial tables need all components of equal length", "system.dims")
    const = np.asarray(constant, dtype=float).reshape(-1)
    if const.size != n:
        raise ConfigError(f"expected {n} constants, got {const.size}", "system.polynomial.constant")
    if len(coefficients) != n or any(len(row) != n for row in coefficients):
        raise ConfigError(f"expected an {n}x{n} table of coefficient lists", "system.polynomial.coefficients")
    table = [[np.asarray(c, dtype=float).reshape(-1) for c in row] for row in coefficients]

    def make(i):
        def op(p):
            out = np.full(dims[i], const[i])
            for j in range(n):
                for k, a in enumerate(table[i][j], start=1):
                    out = out + a * p[j] ** k
            return out
        return op

    return tuple(make(i) for i in range(n))


def _example3(dims, params):
    # T_1: + + -, T_2: - + +, T_3: - - -
    def t1(p):
        return 0.2 * np.tanh(p[0]) + 0.2 * p[1] - 0.2 * p[2] + 1.0

    def t2(p):
        return -0.3 * p[0] + 0.2 * p[1] + 0.2 * np.arctan(p[2])

    def t3(p):
        return -0.25 * (p[0] + p[1] + p[2]) + 0.5

    return (t1, t2, t3)


def _tripled_affine(dims, params):
    shift = float(params.get("shift", 0.0))

    def F(x, y, z):
        return (x - y + z) / 4.0 + shift

    return (lambda p: F(p[0], p[1], p[2]), lambda p: F(p[1], p[0], p[2]), lambda p: F(p[2], p[1], p[0]))


def _doubling(dims, params):
    factor = float(params.get("factor", 2.0))
    ops = [lambda p: factor * p[0]]
    ops += [lambda p, j=j: 0.5 * p[j] for j in range(1, len(dims))]
    return tuple(ops)


@dataclass(frozen=True)
class OperatorEntry:
    build: Callable
    signature: tuple[str, ...] | None
    description: str


OPERATORS: dict[str, OperatorEntry] = {
    "example3": OperatorEntry(_example3, ("++-", "-++", "---"),
                              "order-3 scalar system with a non-reducible mixed signature"),
    "tripled_affine": OperatorEntry(_tripled_affine, ("+-+", "-++", "+-+"),
                                    "tripled problem with F(x,y,z) = (x - y + z)/4 + shift"),
    "doubling": OperatorEntry(_doubling, None, "T_1 = factor * x_1, others halve their own variable"),
}


def registry_operators(name: str, dims, params) -> tuple:
    try:
        entry = OPERATORS[name]
    except KeyError:
        raise ConfigError(f"unknown operator {name!r}; known: {', '.join(sorted(OPERATORS))}",
                          "system.operator") from None
    return entry.build(tuple(dims), dict(params))


# --- PBVS right-hand sides ---------------------------------------------------------------


@dataclass(frozen=True)
class ForcingEntry:
    build: Callable[[dict, float, float], Callable]
    phi: Callable[[dict, float], ComparisonFunction]
    description: str


def _relaxation(params, lam, period):
    c = float(params.get("c", 0.0))
    return lambda t, x, y, z: -lam * x + lam * c


def _forced_arctan(params, lam, period):
    eps = float(params.get("eps", 0.1))
    kappa = float(params.get("kappa", 0.1))
    beta = float(params.get("beta", 0.5))
    omega = 2.0 * math.pi / period

    def f(t, x, y, z):
        return (-lam * x + kappa * np.arctan(x - y + z) + eps * np.sin(np.arctan(z) - np.arctan(y))
                + beta * np.sin(omega * t))

    return f


def _forced_arctan_phi(params, lam):
    # the arctan term moves by at most 3 kappa m and the sine term by 2 eps m
    eps = abs(float(params.get("eps", 0.1)))
    kappa = abs(float(params.get("kappa", 0.1)))
    return ComparisonFunction.linear(min((3.0 * kappa + 2.0 * eps) / lam, 0.999))


FORCINGS: dict[str, ForcingEntry] = {
    "relaxation": ForcingEntry(_relaxation, lambda params, lam: ComparisonFunction.linear(0.0),
                               "f = -lam x + lam c; the solution is constant c"),
    "forced_arctan": ForcingEntry(_forced_arctan, _forced_arctan_phi,
                                  "f = -lam x + kappa atan(x - y + z) + eps sin(atan z - atan y)"
                                  " + beta sin(2 pi t / T)"),
}


def registry_forcing(name: str, params, lam: float, period: float):
    try:
        entry = FORCINGS[name]
    except KeyError:
        raise ConfigError(f"unknown forcing {name!r}; known: {', '.join(sorted(FORCINGS))}", "pbvs.f") from None
    return entry.build(dict(params), lam, period), entry.phi(dict(params), lam)


def forced_arctan(eps: float = 0.1, kappa: float = 0.1, beta: float = 0.5, lam: float = 1.0,
                  period: float = 1.0):
    """The nonlinear right-hand side registered as ``forced_arctan``, with its comparison function."""
    params = {"eps": eps, "kappa": kappa, "beta": beta}
    return _forced_arctan(params, lam, period), _forced_arctan_phi(params, lam)

