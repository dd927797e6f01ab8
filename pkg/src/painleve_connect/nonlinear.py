"""Sparse nonlinear solvers shared by the 2D problems.

Unknown vectors live in the frozen grid ordering.  Boundary rows of the
residual are ``u - g`` and of the Jacobian are identity rows, so every
Newton step keeps the Dirichlet data in place.
"""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NewtonDiverged, SolverError
from .grids import SolverConfig

log = logging.getLogger(__name__)

Residual = Callable[[np.ndarray], np.ndarray]


def preconditioned_descent(u0: np.ndarray, residual: Residual, energy: Callable[[np.ndarray], float],
                           precond: sp.spmatrix, interior: np.ndarray, *, tol: float,
                           max_iters: int, cell: float = 1.0, clamp: float | None = None,
                           history: list | None = None) -> np.ndarray:
    """Armijo-backtracked descent along P^{-1} r until sup |r| on interior nodes < tol.

    ``residual`` must equal minus the energy gradient divided by ``cell`` on
    interior nodes.  ``precond`` is SPD on interior nodes and the
    identity on boundary rows.  Returns the last iterate even if ``max_iters``
    is exhausted; callers follow up with Newton.
    """
    solve = spla.factorized(precond.tocsc())
    u = u0.copy()
    e = energy(u)
    tau = 1.0
    for it in range(max_iters):
        r = np.where(interior, residual(u), 0.0)
        rsup = float(np.max(np.abs(r)))
        if history is not None:
            history.append({"iter": it, "residual_sup": rsup, "energy": e, "step": tau})
        if rsup < tol:
            return u
        d = solve(r)
        slope = float(r @ d)  # directional decrease rate, > 0 for SPD precond
        tau = min(1.0, 2.0 * tau)
        while True:
            trial = u + tau * d
            if clamp is not None:
                np.clip(trial, -clamp, clamp, out=trial)
            et = energy(trial)
            if et <= e - 1e-4 * tau * slope * cell:
                break
            tau /= 2.0
            if tau < 1e-8:
                log.debug("descent stalled at iter %d (residual %.3e)", it, rsup)
                return u
        u, e = trial, et
    log.debug("descent hit max_iters=%d", max_iters)
    return u


def damped_newton(u0: np.ndarray, residual: Residual, jacobian: Callable[[np.ndarray], sp.spmatrix],
                  config: SolverConfig,
                  history: list | None = None) -> np.ndarray:
    """Newton with step halving on the residual 2-norm; stops when sup |r| <= abs_tol."""
    u = u0.copy()
    r = residual(u)
    for it in range(config.max_newton_iters + 1):
        rsup = float(np.max(np.abs(r)))
        if it == 0 and history is not None:
            history.append({"iter": 0, "residual_sup": rsup, "damping": 0.0})
        if rsup <= config.abs_tol:
            return u
        if it == config.max_newton_iters:
            break
        J = jacobian(u).tocsc()
        step = spla.spsolve(J, -r)
        lin_res = np.linalg.norm(J @ step + r) / max(np.linalg.norm(r), 1e-300)
        if not lin_res <= config.linsolve_tol:
            raise SolverError(f"linear solve relative residual {lin_res:.2e} above linsolve_tol")
        rnorm = np.linalg.norm(r)
        lam = 1.0
        while True:
            trial = u + lam * step
            rt = residual(trial)
            if np.linalg.norm(rt) < rnorm:
                break
            lam /= 2.0
            if lam < config.damping_min:
                raise NewtonDiverged(f"no residual decrease at damping {config.damping_min} (iter {it})")
        u, r = trial, rt
        if history is not None:
            history.append({"iter": it + 1, "residual_sup": float(np.max(np.abs(r))), "damping": lam})
        log.debug("newton iter %d residual %.3e damping %g", it + 1, np.max(np.abs(r)), lam)
    raise NewtonDiverged(f"residual {np.max(np.abs(r)):.3e} above tolerance after "
                         f"{config.max_newton_iters} iterations")
