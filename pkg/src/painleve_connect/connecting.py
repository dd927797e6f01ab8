"""Odd connecting solution of  Lap y - x1 y - 2 y^3 = 0  on a truncated upper half-plane.

Oddness in x2 is structural: the unknowns live on x2 >= 0 and the axis row is
pinned to zero.  Dirichlet data on the other three edges comes from the
Hastings-McLeod profile (top), Airy smallness (right) and the rescaled
Allen-Cahn kink (left); see :func:`assemble_bc`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NonPhysical
from .grids import Field1D, Field2D, Grid1D, Grid2D, SolverConfig, laplacian_matrix, sample_many
from .hastings_mcleod import HMProblem, solve_hastings_mcleod
from .nonlinear import damped_newton, preconditioned_descent
from .special import airy_ai, heteroclinic

DEFAULT_GRID = Grid2D(-12.0, 6.0, 0.0, 16.0, 361, 321)
MONOTONE_TOL = 1e-10


@dataclass(frozen=True)
class ConnectProblem:
    grid: Grid2D
    h_ref: Field1D
    config: SolverConfig = SolverConfig(abs_tol=1e-10)

    def __post_init__(self):
        if self.grid.x2min != 0.0:
            raise ValueError("connecting problem needs x2min = 0 (odd reflection axis)")
        hg = self.h_ref.grid
        if self.grid.x1min < hg.a or self.grid.x1max > hg.b:
            raise ValueError("x1 range must lie inside the Hastings-McLeod reference grid")

    @property
    def h_on_x1(self) -> np.ndarray:
        return self.h_ref(self.grid.x1)


@dataclass(frozen=True)
class RescaledProfile:
    x1_level: float
    x2_offset: float
    t2_samples: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.t2_samples) != len(self.values):
            raise ValueError("t2_samples and values differ in length")

    def tanh_error(self) -> float:
        return float(np.max(np.abs(self.values - heteroclinic(self.t2_samples))))


def matching_hm_reference(grid: Grid2D, b: float = 8.0, config: SolverConfig | None = None) -> Field1D:
    """Hastings-McLeod profile solved on nodes that coincide with the grid's x1 nodes.

    The interval is extended to the right up to at least ``b`` with the same spacing.
    """
    h = grid.h1
    n_extra = max(0, int(math.ceil((b - grid.x1max) / h - 1e-9)))
    hm_grid = Grid1D(grid.x1min, grid.x1max + n_extra * h, grid.n1 + n_extra)
    return solve_hastings_mcleod(HMProblem.on(hm_grid, config))


def make_problem(grid: Grid2D = DEFAULT_GRID, config: SolverConfig | None = None) -> ConnectProblem:
    if grid.x2max <= grid.x2min:
        raise ValueError("degenerate x2 range")
    cfg = config if config is not None else SolverConfig(abs_tol=1e-10)
    return ConnectProblem(grid, matching_hm_reference(grid), cfg)


def left_edge_profile(x1: float, x2, cap: float) -> np.ndarray:
    """Rescaled kink  sqrt(-x1/2) tanh(x2 sqrt(-x1/2)), capped above by ``cap``."""
    a = math.sqrt(-x1 / 2.0)
    return np.minimum(a * np.tanh(np.asarray(x2) * a), cap)


def assemble_bc(prob: ConnectProblem) -> Field2D:
    """Dirichlet data on the boundary nodes (interior entries are zero)."""
    g = prob.grid
    x2 = g.x2
    h1d = prob.h_on_x1
    bc = np.zeros(g.shape)
    if g.x1min < 0:
        bc[0, :] = left_edge_profile(g.x1min, x2, h1d[0])
    else:
        bc[0, :] = h1d[0] * heteroclinic(x2)
    bc[-1, :] = 0.0
    bc[:, -1] = h1d
    bc[:, 0] = 0.0
    return Field2D(g, bc)


def _x1_column(grid: Grid2D) -> np.ndarray:
    return np.repeat(grid.x1, grid.n2)


def residual_p2(y: Field2D, prob: ConnectProblem, bc: Field2D | None = None) -> Field2D:
    if y.grid != prob.grid:
        raise ValueError("field grid does not match problem grid")
    bc = assemble_bc(prob) if bc is None else bc
    return Field2D(prob.grid, _residual_vec(y.values, prob.grid, laplacian_matrix(prob.grid), bc.values))


def _residual_vec(v, grid, L, g) -> np.ndarray:
    interior = ~grid.boundary_mask().reshape(-1)
    x1 = _x1_column(grid)
    r = L @ v - x1 * v - 2.0 * v ** 3
    return np.where(interior, r, v - g)


def pii_energy(y: Field2D) -> float:
    """Discrete E_PII on the half-domain: edge-midpoint gradient, nodal potential on interior nodes."""
    g = y.grid
    u = y.as_array()
    cell = g.h1 * g.h2
    grad = (np.sum(np.diff(u, axis=0) ** 2) / g.h1 ** 2 + np.sum(np.diff(u, axis=1) ** 2) / g.h2 ** 2)
    X1, _ = g.mesh()
    pot = 0.5 * X1 * u ** 2 + 0.5 * u ** 4
    return float(cell * (0.5 * grad + np.sum(pot[1:-1, 1:-1])))


def default_initial_guess(prob: ConnectProblem) -> Field2D:
    """h(x1) tanh(x2 / sqrt 2) with the Dirichlet rows overwritten by the boundary data."""
    g = prob.grid
    y0 = np.outer(prob.h_on_x1, heteroclinic(g.x2))
    bc = assemble_bc(prob).as_array()
    mask = g.boundary_mask()
    y0[mask] = bc[mask]
    return Field2D(g, y0)


def solve_connecting(prob: ConnectProblem, init: Field2D | None = None, *,
                     descent_tol: float = 1e-2, max_descent_iters: int = 400,
                     history: list | None = None, descent_history: list | None = None) -> Field2D:
    """Energy descent in the odd class followed by damped Newton; physical post-checks applied."""
    g = prob.grid
    if init is None:
        init = default_initial_guess(prob)
    elif init.grid != g:
        raise ValueError("initial field grid does not match problem grid")
    bc = assemble_bc(prob)
    L = laplacian_matrix(g)
    mask = g.boundary_mask().reshape(-1)
    interior = ~mask
    x1 = _x1_column(g)
    cell = g.h1 * g.h2

    def residual(v):
        return _residual_vec(v, g, L, bc.values)

    def energy(v):
        return pii_energy(Field2D(g, v))

    def jacobian(v):
        diag = np.where(interior, -x1 - 6.0 * v ** 2, 1.0)
        return L + sp.diags(diag)

    v = init.values.copy()
    v[mask] = bc.values[mask]
    c = max(0.0, float(np.max(-g.x1)))
    precond = -L + sp.diags(np.where(interior, c, 1.0))
    v = preconditioned_descent(v, residual, energy, precond, interior, tol=descent_tol,
                               max_iters=max_descent_iters, cell=cell, history=descent_history)
    v = damped_newton(v, residual, jacobian, prob.config, history)
    v[mask] = bc.values[mask]  # drop round-off left on the Dirichlet rows
    y = Field2D(g, v)
    check_connecting(y, prob)
    return y


def check_connecting(y: Field2D, prob: ConnectProblem) -> None:
    tol = 5.0 * prob.config.abs_tol
    u = y.as_array()
    hb = prob.h_on_x1[:, None]
    if np.any(u < -tol):
        raise NonPhysical("connecting solution takes negative values in the upper half-plane")
    if np.any(u > hb + tol):
        raise NonPhysical("connecting solution exceeds the Hastings-McLeod profile")
    n1_bad, n2_bad = monotonicity_violations(y)
    if n1_bad or n2_bad:
        raise NonPhysical(f"monotonicity violated at {n1_bad} (x1) / {n2_bad} (x2) interior nodes")


def monotonicity_violations(y: Field2D, tol: float = MONOTONE_TOL) -> tuple[int, int]:
    """Interior nodes whose forward difference has the wrong sign: (d/dx1 >= tol, d/dx2 <= -tol)."""
    u = y.as_array()
    g = y.grid
    d1 = (u[2:, 1:-1] - u[1:-1, 1:-1]) / g.h1
    d2 = (u[1:-1, 2:] - u[1:-1, 1:-1]) / g.h2
    return int(np.count_nonzero(d1 >= tol)), int(np.count_nonzero(d2 <= -tol))


def odd_sample(y: Field2D, x1, x2) -> np.ndarray:
    """Bilinear sample of the odd extension y(x1, -x2) = -y(x1, x2)."""
    x2 = np.asarray(x2, dtype=float)
    return np.sign(x2) * sample_many(y, np.broadcast_to(x1, x2.shape), np.abs(x2))


def rescale_to_allen_cahn(y: Field2D, x1_level: float, x2_offset: float, t2_window: float,
                          m: int = 161) -> RescaledProfile:
    """Sample  sqrt(2/|x1|) y(x1, x2_offset + t2 / sqrt|x1|)  for t2 in [-t2_window, t2_window]."""
    if not x1_level < 0:
        raise ValueError("x1_level must be negative")
    s = math.sqrt(-x1_level)
    t2 = np.linspace(-t2_window, t2_window, m)
    vals = math.sqrt(2.0) / s * odd_sample(y, x1_level, x2_offset + t2 / s)
    return RescaledProfile(x1_level, x2_offset, t2, vals)


def decay_ratio_max(y: Field2D) -> tuple[float, float]:
    """Max of |y| exp(2/3 x1^1.5) over nodes with x1 >= 1, and the x1 where it is attained."""
    g = y.grid
    if g.x1max < 4:
        raise ValueError("decay check needs the grid to reach x1 >= 4")
    x1 = g.x1
    sel = x1 >= 1.0
    weight = np.exp(2.0 / 3.0 * x1[sel] ** 1.5)
    ratio = np.abs(y.as_array()[sel, :]) * weight[:, None]
    i1 = np.unravel_index(np.argmax(ratio), ratio.shape)[0]
    return float(ratio.max()), float(x1[sel][i1])


def check_decay(y: Field2D) -> tuple[float, bool]:
    """(M, pass): pass when the maximum sits in the slab 1 <= x1 <= 2 (or y vanishes there)."""
    M, at = decay_ratio_max(y)
    return M, bool(M == 0.0 or at <= 2.0)


def airy_ratio(y: Field2D, lo: float = 3.0, margin: float = 1.0) -> tuple[float, float]:
    """Max of y / Ai(x1) over x1 in [lo, x1max - margin] and the x2 where it is attained."""
    g = y.grid
    x1 = g.x1
    sel = (x1 >= lo) & (x1 <= g.x1max - margin)
    ratio = y.as_array()[sel, :] / np.asarray(airy_ai(x1[sel]))[:, None]
    idx = np.unravel_index(np.argmax(ratio), ratio.shape)
    return float(ratio[idx]), float(g.x2[idx[1]])


def top_edge_gap(y: Field2D, prob: ConnectProblem, margin: float = 1.0) -> float:
    """max |y(x1, x2max - h2) - h(x1)| away from the left/right truncation edges."""
    g = y.grid
    sel = (g.x1 >= g.x1min + margin) & (g.x1 <= g.x1max - margin)
    return float(np.max(np.abs(y.as_array()[sel, -2] - prob.h_on_x1[sel])))


def odd_extension_jump(y: Field2D) -> float:
    """Mismatch of one-sided x2-derivatives at the axis after odd reflection.

    Both sides use second-order one-sided differences of the reflected field.
    """
    u = y.as_array()
    h = y.grid.h2
    above = (-3.0 * u[:, 0] + 4.0 * u[:, 1] - u[:, 2]) / (2.0 * h)
    below_vals = -u[:, 1], -u[:, 2]  # reflected field at x2 = -h, -2h
    below = (3.0 * u[:, 0] - 4.0 * below_vals[0] + below_vals[1]) / (2.0 * h)
    return float(np.max(np.abs(above - below)))


def smallest_odd_hessian_eigenvalue(y: Field2D) -> float:
    """Lowest eigenvalue of  -Lap + x1 + 6 y^2  on interior nodes (odd class, Dirichlet)."""
    g = y.grid
    L = laplacian_matrix(g)
    interior = ~g.boundary_mask().reshape(-1)
    idx = np.flatnonzero(interior)
    H = (-L + sp.diags(_x1_column(g) + 6.0 * y.values ** 2))[idx][:, idx]
    vals = spla.eigsh(H.tocsc(), k=1, sigma=-20.0, which="LM", return_eigenvectors=False)
    return float(vals[0])


def self_convergence_order(solutions: list[Field2D]) -> float:
    """Observed order from three solves on successively halved grids (common coarse nodes)."""
    if len(solutions) != 3:
        raise ValueError("need exactly three solutions")
    coarse, mid, fine = (s.as_array() for s in solutions)
    e1 = np.max(np.abs(coarse - mid[::2, ::2]))
    e2 = np.max(np.abs(mid[::2, ::2] - fine[::4, ::4]))
    return float(math.log2(e1 / e2))
