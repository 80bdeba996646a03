"""Damped Newton iteration for small square nonlinear systems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import NoConvergenceError


@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    residual: float
    iterations: int


def finite_difference_jacobian(fun: Callable, x: np.ndarray, f0: np.ndarray, step: float) -> np.ndarray:
    """Forward-difference Jacobian with steps scaled to the magnitude of x."""
    n = x.size
    jac = np.empty((f0.size, n))
    for j in range(n):
        h = step * max(1.0, abs(x[j]))
        xp = x.copy()
        xp[j] += h
        jac[:, j] = (np.asarray(fun(xp), dtype=float) - f0) / h
    return jac


def damped_newton(
    fun: Callable[[np.ndarray], np.ndarray],
    x0,
    jac: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    tol: float = 1e-12,
    max_iter: int = 50,
    fd_step: float = 1e-7,
    max_halvings: int = 30,
    floor: Optional[float] = None,
) -> NewtonResult:
    """Solve fun(x) = 0 by Newton steps halved until the squared residual decreases.

    The linear solve uses least squares so a rank-deficient Jacobian near a
    coordinate singularity still yields a usable step.  Raises
    NoConvergenceError when the residual (max norm) is still above ``tol``
    after ``max_iter`` steps or when no halving decreases it.  With ``floor``
    set, a stalled line search is accepted once the residual is below it: the
    rounding level of the residual itself can sit above ``tol``.
    """
    x = np.array(x0, dtype=float)
    f = np.asarray(fun(x), dtype=float)
    norm = float(np.abs(f).max())
    merit = float(f @ f)
    for it in range(max_iter + 1):
        if not np.isfinite(norm):
            raise NoConvergenceError(f"non-finite residual at x = {x}")
        if norm <= tol:
            return NewtonResult(x, norm, it)
        if it == max_iter:
            break
        J = jac(x) if jac is not None else finite_difference_jacobian(fun, x, f, fd_step)
        step = np.linalg.lstsq(J, -f, rcond=None)[0]
        lam = 1.0
        for _ in range(max_halvings):
            x_new = x + lam * step
            f_new = np.asarray(fun(x_new), dtype=float)
            merit_new = float(f_new @ f_new)
            if np.isfinite(merit_new) and merit_new < merit:
                break
            lam *= 0.5
        else:
            if floor is not None and norm <= floor:
                return NewtonResult(x, norm, it)
            raise NoConvergenceError(f"line search stalled at residual {norm:.3e}")
        x, f, merit = x_new, f_new, merit_new
        norm = float(np.abs(f).max())
    raise NoConvergenceError(f"no convergence after {max_iter} iterations (residual {norm:.3e})")
