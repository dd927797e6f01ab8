"""Hastings-McLeod solution of y'' = x y + 2 y^3 on a truncated interval.

The boundary-value solve uses damped Newton on the 3-point discretisation with
an analytic tridiagonal Jacobian.  ``shoot_hm_oracle`` integrates the ODE
backward from Airy data and serves as an independent cross-check.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import BlowUp, NewtonDiverged, NonPhysical
from .grids import Field1D, Grid1D, SolverConfig
from .special import airy_ai, airy_ai_prime

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HMProblem:
    grid: Grid1D
    left_bc: float
    right_bc: float
    config: SolverConfig = SolverConfig()

    def __post_init__(self):
        if not self.left_bc > 0:
            raise ValueError("left_bc must be positive")
        if not self.right_bc > 0:
            raise ValueError("right_bc must be positive")

    @classmethod
    def on(cls, grid: Grid1D, config: SolverConfig | None = None) -> "HMProblem":
        """Leading-order asymptotic Dirichlet data at both ends of ``grid``."""
        if grid.a >= 0 or grid.b <= 0:
            raise ValueError("the interval must straddle 0")
        return cls(grid, math.sqrt(-grid.a / 2.0), float(airy_ai(grid.b)),
                   config if config is not None else SolverConfig())

    @classmethod
    def default(cls, a: float = -12.0, b: float = 8.0, n: int = 2001,
                config: SolverConfig | None = None) -> "HMProblem":
        return cls.on(Grid1D(a, b, n), config)


def residual_hm(y: Field1D, prob: HMProblem) -> Field1D:
    if y.grid != prob.grid:
        raise ValueError("field grid does not match problem grid")
    x, v, h = prob.grid.x, y.values, prob.grid.h
    r = np.empty_like(v)
    r[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / h ** 2 - x[1:-1] * v[1:-1] - 2 * v[1:-1] ** 3
    r[0] = v[0] - prob.left_bc
    r[-1] = v[-1] - prob.right_bc
    return Field1D(prob.grid, r)


def thomas_solve(lower, diag, upper, rhs) -> np.ndarray:
    """Solve a tridiagonal system; ``lower[0]`` and ``upper[-1]`` are ignored."""
    n = len(diag)
    c = np.empty(n)
    d = np.empty(n)
    c[0] = upper[0] / diag[0]
    d[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - lower[i] * c[i - 1]
        c[i] = upper[i] / m if i < n - 1 else 0.0
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m
    x = np.empty(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def _jacobian_bands(v: np.ndarray, x: np.ndarray, h: float):
    n = len(v)
    lower = np.full(n, 1.0 / h ** 2)
    upper = np.full(n, 1.0 / h ** 2)
    diag = -2.0 / h ** 2 - x - 6.0 * v ** 2
    lower[0] = upper[0] = 0.0
    lower[-1] = upper[-1] = 0.0
    diag[0] = diag[-1] = 1.0
    return lower, diag, upper


def default_initial_guess(prob: HMProblem) -> Field1D:
    """Splice of the two asymptotic branches, smoothed by a 5-point moving average."""
    x = prob.grid.x
    splice = np.maximum(np.sqrt(np.maximum(-x, 0.0) / 2.0), airy_ai(x))
    smooth = splice.copy()
    smooth[2:-2] = np.convolve(splice, np.ones(5) / 5.0, mode="valid")
    smooth[0], smooth[-1] = prob.left_bc, prob.right_bc
    return Field1D(prob.grid, smooth)


def newton_solve_1d(prob: HMProblem, init: Field1D, history: list | None = None) -> Field1D:
    cfg = prob.config
    x, h = prob.grid.x, prob.grid.h
    v = init.values.copy()
    r = residual_hm(Field1D(prob.grid, v), prob).values
    for it in range(cfg.max_newton_iters + 1):
        rsup = float(np.max(np.abs(r)))
        if it == 0 and history is not None:
            history.append({"iter": 0, "residual_sup": rsup, "damping": 0.0})
        if rsup <= cfg.abs_tol:
            return Field1D(prob.grid, v)
        if it == cfg.max_newton_iters:
            break
        step = thomas_solve(*_jacobian_bands(v, x, h), -r)
        rnorm = np.linalg.norm(r)
        lam = 1.0
        while True:
            trial = v + lam * step
            rt = residual_hm(Field1D(prob.grid, trial), prob).values
            if np.linalg.norm(rt) < rnorm:
                break
            lam /= 2.0
            if lam < cfg.damping_min:
                raise NewtonDiverged(f"no residual decrease at damping {cfg.damping_min} (iter {it})")
        v, r = trial, rt
        if history is not None:
            history.append({"iter": it + 1, "residual_sup": float(np.max(np.abs(r))), "damping": lam})
        log.debug("hm newton iter %d residual %.3e damping %g", it + 1, np.max(np.abs(r)), lam)
    raise NewtonDiverged(f"residual {np.max(np.abs(r)):.3e} above tolerance after "
                         f"{cfg.max_newton_iters} iterations")


def solve_hastings_mcleod(prob: HMProblem, init: Field1D | None = None,
                          history: list | None = None) -> Field1D:
    """Converged Hastings-McLeod profile; positivity and strict decrease are checked."""
    if init is None:
        init = default_initial_guess(prob)
    sol = newton_solve_1d(prob, init, history)
    v = sol.values
    if np.any(v <= 0):
        raise NonPhysical("converged profile is not positive")
    if np.any(np.diff(v) >= 0):
        raise NonPhysical("converged profile is not strictly decreasing")
    return sol


def _rhs(x: float, y: float, yp: float) -> tuple[float, float]:
    return yp, x * y + 2.0 * y ** 3


def shoot_hm_oracle(k: float, x_start: float = 8.0, x_end: float = -6.0,
                    step: float = 1e-3, blowup: float = 1e6) -> Field1D:
    """Integrate backward from y = k Ai, y' = k Ai' at ``x_start`` with classical RK4.

    Returns the trajectory on a uniform grid from ``x_end`` to ``x_start``.
    Raises :class:`BlowUp` if |y| exceeds ``blowup`` on the way.
    """
    if x_start < 5:
        raise ValueError("x_start must be >= 5 so that Airy data is a valid seed")
    if not x_end < x_start:
        raise ValueError("x_end must lie left of x_start")
    nsteps = max(1, int(math.ceil((x_start - x_end) / step)))
    dt = -(x_start - x_end) / nsteps
    ys = np.empty(nsteps + 1)
    y, yp = k * float(airy_ai(x_start)), k * float(airy_ai_prime(x_start))
    ys[0] = y
    for i in range(nsteps):
        xi = x_start + i * dt
        k1 = _rhs(xi, y, yp)
        k2 = _rhs(xi + dt / 2, y + dt / 2 * k1[0], yp + dt / 2 * k1[1])
        k3 = _rhs(xi + dt / 2, y + dt / 2 * k2[0], yp + dt / 2 * k2[1])
        k4 = _rhs(xi + dt, y + dt * k3[0], yp + dt * k3[1])
        y += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        yp += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if not abs(y) <= blowup:
            raise BlowUp(x_start + (i + 1) * dt, k)
        ys[i + 1] = y
    return Field1D(Grid1D(x_end, x_start, nsteps + 1), ys[::-1])


def bracket_hm(k_low: float = 0.9, k_high: float = 1.1, iters: int = 40,
               x_start: float = 8.0, x_end: float = -10.0, step: float = 1e-2) -> tuple[float, float]:
    """Bisect the Airy multiplier between oscillating (below) and blow-up (above) trajectories."""
    for _ in range(iters):
        mid = 0.5 * (k_low + k_high)
        try:
            traj = shoot_hm_oracle(mid, x_start, x_end, step)
        except BlowUp:
            k_high = mid
            continue
        # survivors are classified by which side of the minima branch they end on
        if np.min(traj.values) < 0 or traj.values[0] < math.sqrt(-x_end / 2.0):
            k_low = mid
        else:
            k_high = mid
    return k_low, k_high
