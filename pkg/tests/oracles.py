"""Independent reference computations used to freeze expected values.

None of these route through the code path they check.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import fsolve


def brute_force_reducible(S) -> bool:
    """Try every sign vector eps in {+1,-1}^n against S_ij = eps_i eps_j."""
    S = np.asarray(S)
    n = S.shape[0]
    return any(
        all(S[i, j] * e[i] * e[j] == 1 for i in range(n) for j in range(n))
        for e in itertools.product((1, -1), repeat=n)
    )


def affine_fixed_point(M, c) -> np.ndarray:
    """(I - M)^{-1} c by a dense solve."""
    M = np.asarray(M, dtype=float)
    return np.linalg.solve(np.eye(M.shape[0]) - M, np.asarray(c, dtype=float))


def affine_coupled_update(M, c, u, v):
    """One coupled step for T(x) = Mx + c written with the sign split M = M+ + M-."""
    M = np.asarray(M, dtype=float)
    Mp, Mm = np.where(M > 0, M, 0.0), np.where(M < 0, M, 0.0)
    return Mp @ u + Mm @ v + c, Mp @ v + Mm @ u + c


def picard(T, x0, steps):
    """Plain successive approximation x_{k+1} = T(x_k); returns all iterates."""
    out = [x0]
    for _ in range(steps):
        out.append(T(out[-1]))
    return out


def damped_root(F3, guess, damping=0.5, tol=1e-13, max_iter=10_000):
    """Tripled fixed point as a root of R(x,y,z) = (x,y,z) - (F(x,y,z), F(y,x,z), F(z,y,x)).

    Newton steps with a finite-difference Jacobian, halved until the residual drops.
    """
    def residual(w):
        x, y, z = np.split(w, 3)
        return w - np.concatenate([F3(x, y, z), F3(y, x, z), F3(z, y, x)])

    w = np.asarray(guess, dtype=float)
    for _ in range(max_iter):
        r = residual(w)
        if np.max(np.abs(r)) < tol:
            return w
        J = np.empty((w.size, w.size))
        h = 1e-7
        for k in range(w.size):
            e = np.zeros(w.size)
            e[k] = h
            J[:, k] = (residual(w + e) - residual(w - e)) / (2 * h)
        step = np.linalg.solve(J, -r)
        lam = 1.0
        while np.max(np.abs(residual(w + lam * step))) > (1 - 1e-4 * lam) * np.max(np.abs(r)) and lam > 1e-8:
            lam *= damping
        w = w + lam * step
    raise RuntimeError("damped Newton did not converge")


def periodic_shooting(f, period, t_eval, guess=(0.0, 0.0, 0.0)):
    """Periodic solution of the 3-equation system by shooting on the initial value.

    Integrates with a tight-tolerance Runge-Kutta scheme and solves
    state(T) - state(0) = 0 for the initial state.
    """
    def rhs(t, s):
        x, y, z = s
        return [f(t, x, y, z), f(t, y, x, z), f(t, z, y, x)]

    def flow(s0, t_eval=None):
        return solve_ivp(rhs, (0.0, period), s0, method="DOP853", rtol=1e-12, atol=1e-14, t_eval=t_eval)

    s0 = fsolve(lambda s: flow(s).y[:, -1] - s, np.asarray(guess, dtype=float), xtol=1e-13)
    sol = flow(s0, t_eval)
    return sol.y
