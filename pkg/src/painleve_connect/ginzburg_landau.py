"""Odd-in-x2 minimizers of the Ginzburg-Landau energy

    E(u) = int  eps/2 |grad u|^2 - mu u^2 / (2 eps) + u^4 / (4 eps),   mu = exp(-|x|^2) - chi,

and the blow-up rescaling at (rho, 0) that zooms into the transition layer.

Fields live on the upper half [-L, L] x [0, L]; the lower half is the odd
reflection, so energies are doubled.  Dirichlet zero on the axis and on the
outer edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import NonPhysical
from .grids import Field2D, Grid2D, SolverConfig, laplacian_matrix, sample_many
from .nonlinear import damped_newton, preconditioned_descent
from .special import GLParams, mu


@dataclass(frozen=True)
class GLProblem:
    params: GLParams
    grid: Grid2D
    config: SolverConfig

    def __post_init__(self):
        g = self.grid
        if g.x2min != 0.0:
            raise ValueError("GL grid must start at the reflection axis x2 = 0")
        if not min(-g.x1min, g.x1max, g.x2max) > self.params.rho + 1.0:
            raise ValueError("domain must contain the circle |x| = rho with margin 1")


@dataclass(frozen=True)
class BlowupWindow:
    s1min: float = -3.0
    s1max: float = 3.0
    s2min: float = -3.0
    s2max: float = 3.0
    m1: int = 121
    m2: int = 121

    def grid(self) -> Grid2D:
        return Grid2D(self.s1min, self.s1max, self.s2min, self.s2max, self.m1, self.m2)


def layer_width(params: GLParams) -> float:
    """Physical width of one blow-up unit: eps^(2/3) / (-mu1)^(1/3)."""
    return params.epsilon ** (2.0 / 3.0) / (-params.mu1) ** (1.0 / 3.0)


def make_gl_problem(params: GLParams, L: float = 2.5, nodes_per_unit: int = 8,
                    config: SolverConfig | None = None) -> GLProblem:
    """Square half-domain resolved with ``nodes_per_unit`` nodes per blow-up unit."""
    h = layer_width(params) / nodes_per_unit
    n2 = int(math.ceil(L / h)) + 1
    grid = Grid2D(-L, L, 0.0, L, 2 * n2 - 1, n2)  # odd n1 keeps x1 = 0 a node
    if config is None:
        config = SolverConfig(abs_tol=1e-10, clamp_bound=2.0 * math.sqrt(1.0 - params.chi) + 1.0)
    return GLProblem(params, grid, config)


def _mu_vec(prob: GLProblem) -> np.ndarray:
    X1, X2 = prob.grid.mesh()
    return mu(prob.params, X1, X2).reshape(-1)


def _trap(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def gl_energy(u: Field2D, prob: GLProblem) -> float:
    """Energy of the odd extension (twice the upper-half integral).

    Gradient term: squared differences on cell edges; potential term: nodal
    trapezoid rule.  Critical points of this discrete energy are exactly the
    solutions of the 5-point discretisation of  eps^2 Lap u + mu u - u^3 = 0.
    """
    g = prob.grid
    eps = prob.params.epsilon
    U = u.as_array()
    w1, w2 = _trap(g.n1), _trap(g.n2)
    e1 = np.sum((np.diff(U, axis=0) / g.h1) ** 2 * w2[None, :])
    e2 = np.sum((np.diff(U, axis=1) / g.h2) ** 2 * w1[:, None])
    m = _mu_vec(prob).reshape(g.shape)
    pot = (-m * U ** 2 / (2.0 * eps) + U ** 4 / (4.0 * eps)) * np.outer(w1, w2)
    return float(2.0 * g.h1 * g.h2 * (0.5 * eps * (e1 + e2) + np.sum(pot)))


def quartic_energy(u: Field2D, prob: GLProblem) -> float:
    """-int u^4 / (4 eps) over the plane; equals the energy at any critical point."""
    g = prob.grid
    w = np.outer(_trap(g.n1), _trap(g.n2))
    return float(-2.0 * g.h1 * g.h2 * np.sum(w * u.as_array() ** 4) / (4.0 * prob.params.epsilon))


def energy_identity_gap(u: Field2D, prob: GLProblem) -> float:
    """Relative gap |E(u) + int u^4/(4 eps)| / |E(u)|."""
    e = gl_energy(u, prob)
    return abs(e - quartic_energy(u, prob)) / abs(e)


def gl_residual(u: Field2D, prob: GLProblem) -> Field2D:
    """eps^2 Lap u + mu u - u^3 on interior nodes, u on boundary nodes."""
    return Field2D(prob.grid, _residual_vec(u.values, prob, laplacian_matrix(prob.grid), _mu_vec(prob)))


def _residual_vec(v, prob, L, m) -> np.ndarray:
    interior = ~prob.grid.boundary_mask().reshape(-1)
    eps2 = prob.params.epsilon ** 2
    return np.where(interior, eps2 * (L @ v) + m * v - v ** 3, v)


def default_initial_guess(prob: GLProblem) -> Field2D:
    """Thomas-Fermi profile times an odd tanh layer, clamped, zero on the boundary."""
    g = prob.grid
    X1, X2 = g.mesh()
    m = mu(prob.params, X1, X2)
    u0 = np.sqrt(np.maximum(m, 0.0)) * np.tanh(X2 / prob.params.epsilon)
    u0 = np.clip(u0, -prob.config.clamp_bound, prob.config.clamp_bound)
    u0[g.boundary_mask()] = 0.0
    return Field2D(g, u0)


def transfer(u: Field2D, grid: Grid2D) -> Field2D:
    """Bilinear transfer of a field onto another grid covering the same rectangle."""
    X1, X2 = grid.mesh()
    vals = sample_many(u, X1.reshape(-1), X2.reshape(-1))
    out = vals.reshape(grid.shape)
    out[grid.boundary_mask()] = 0.0
    return Field2D(grid, out)


def minimize_odd(prob: GLProblem, init: Field2D | None = None, *, descent_tol: float = 1e-2,
                 max_descent_iters: int = 400, history: list | None = None,
                 descent_history: list | None = None) -> Field2D:
    g = prob.grid
    eps = prob.params.epsilon
    if init is None:
        init = default_initial_guess(prob)
    elif init.grid != g:
        init = transfer(init, g)
    L = laplacian_matrix(g)
    m = _mu_vec(prob)
    mask = g.boundary_mask().reshape(-1)
    interior = ~mask

    def residual(v):
        return _residual_vec(v, prob, L, m)

    def energy(v):
        return gl_energy(Field2D(g, v), prob)

    def jacobian(v):
        return eps ** 2 * L + sp.diags(np.where(interior, m - 3.0 * v ** 2, 1.0))

    v = init.values.copy()
    v[mask] = 0.0
    precond = -eps ** 2 * L + sp.identity(g.size)
    v = preconditioned_descent(v, residual, energy, precond, interior, tol=descent_tol,
                               max_iters=max_descent_iters, cell=2.0 * g.h1 * g.h2 / eps,
                               clamp=prob.config.clamp_bound, history=descent_history)
    v = damped_newton(v, residual, jacobian, prob.config, history)
    v[mask] = 0.0
    u = Field2D(g, v)
    check_minimizer(u, prob)
    return u


def check_minimizer(u: Field2D, prob: GLProblem) -> None:
    tol = 5.0 * prob.config.abs_tol
    U = u.as_array()
    if np.any(U[1:-1, 1:-1] < -tol):
        raise NonPhysical("odd minimizer changes sign in the upper half-plane")
    if symmetry_defect(u) > tol:
        raise NonPhysical("odd minimizer is not even in x1")
    if np.max(np.abs(U)) >= prob.config.clamp_bound / 2.0:
        raise NonPhysical("minimizer reaches the safeguard clamp")


def symmetry_defect(u: Field2D) -> float:
    U = u.as_array()
    return float(np.max(np.abs(U - U[::-1, :])))


def continuation(epsilons, chi: float = 0.5, L: float = 2.5, nodes_per_unit: int = 8,
                 histories: dict | None = None,
                 config: SolverConfig | None = None) -> list[tuple[GLProblem, Field2D]]:
    """Solve along a strictly decreasing epsilon list, seeding each solve with the previous one."""
    eps = list(epsilons)
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilon list must be strictly decreasing")
    out = []
    prev = None
    for e in eps:
        prob = make_gl_problem(GLParams(e, chi), L, nodes_per_unit, config)
        hist = [] if histories is not None else None
        u = minimize_odd(prob, None if prev is None else transfer(prev, prob.grid), history=hist)
        if histories is not None:
            histories[e] = hist
        out.append((prob, u))
        prev = u
    return out


def blowup_rescale(u: Field2D, prob: GLProblem, win: BlowupWindow = BlowupWindow()) -> Field2D:
    """w(s) = 2^{-1/2} (-mu1 eps)^{-1/3} u(xi + eps^{2/3} s / (-mu1)^{1/3}) at xi = (rho, 0)."""
    p = prob.params
    wg = win.grid()
    S1, S2 = wg.mesh()
    c = layer_width(p)
    x1 = p.rho + c * S1.reshape(-1)
    x2 = c * S2.reshape(-1)
    if not (prob.grid.contains(x1.min(), 0.0) and prob.grid.contains(x1.max(), 0.0)
            and prob.grid.contains(0.0, np.abs(x2).max())):
        raise ValueError("blow-up window escapes the GL grid")
    vals = np.sign(x2) * sample_many(u, x1, np.abs(x2))
    scale = 2.0 ** -0.5 * (-p.mu1 * p.epsilon) ** (-1.0 / 3.0)
    return Field2D(wg, scale * vals)


def thomas_fermi_gap(u: Field2D, prob: GLProblem, with_location: bool = False,
                     margin: float = 1.0):
    """max ||u| - sqrt(mu)| over |x| <= rho - delta, x2 >= delta, delta = margin * eps^(2/3)."""
    p = prob.params
    delta = margin * p.epsilon ** (2.0 / 3.0)
    X1, X2 = prob.grid.mesh()
    sel = (np.hypot(X1, X2) <= p.rho - delta) & (X2 >= delta)
    if not np.any(sel):
        raise ValueError("Thomas-Fermi region is empty at this epsilon")
    gap = np.abs(np.abs(u.as_array()) - np.sqrt(np.maximum(mu(p, X1, X2), 0.0)))
    gap = np.where(sel, gap, -1.0)
    idx = np.unravel_index(np.argmax(gap), gap.shape)
    if with_location:
        return float(gap[idx]), (float(X1[idx]), float(X2[idx]))
    return float(gap[idx])


def min_bound_constant(u: Field2D, prob: GLProblem) -> float:
    """Smallest K with |u| <= K (sqrt(mu+) + eps^(1/3)) at every node."""
    p = prob.params
    X1, X2 = prob.grid.mesh()
    env = np.sqrt(np.maximum(mu(p, X1, X2), 0.0)) + p.epsilon ** (1.0 / 3.0)
    return float(np.max(np.abs(u.as_array()) / env))


def summary(u: Field2D, prob: GLProblem) -> dict:
    return {
        "epsilon": prob.params.epsilon,
        "chi": prob.params.chi,
        "energy": gl_energy(u, prob),
        "energy_identity_gap": energy_identity_gap(u, prob),
        "tf_gap": thomas_fermi_gap(u, prob),
        "min_K_bound": min_bound_constant(u, prob),
    }
