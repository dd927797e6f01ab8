import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from painleve_connect import connecting as pde
from painleve_connect import ginzburg_landau as gl
from painleve_connect.grids import Field2D, Grid2D, SolverConfig
from painleve_connect.special import GLParams, mu


def bump(params: GLParams, c0=(0.0, 0.35), r0=0.3, amp=0.6):
    """Smooth bump inside the disc, away from the axis; returns (value, gradient) callables."""
    def f(x1, x2):
        s = ((x1 - c0[0]) ** 2 + (x2 - c0[1]) ** 2) / r0 ** 2
        return np.where(s < 1, amp * (1 - s) ** 3, 0.0)

    def grad_sq(x1, x2):
        s = ((x1 - c0[0]) ** 2 + (x2 - c0[1]) ** 2) / r0 ** 2
        g = -6 * amp * (1 - s) ** 2 / r0 ** 2
        return np.where(s < 1, g * g * ((x1 - c0[0]) ** 2 + (x2 - c0[1]) ** 2), 0.0)

    return f, grad_sq


def test_problem_validation():
    p = GLParams(0.1)
    with pytest.raises(ValueError):
        gl.GLProblem(p, Grid2D(-2.5, 2.5, -2.5, 2.5, 11, 11), SolverConfig())
    with pytest.raises(ValueError):
        gl.GLProblem(p, Grid2D(-1.5, 1.5, 0, 1.5, 11, 11), SolverConfig())
    with pytest.raises(ValueError):
        gl.continuation([0.05, 0.1])


def test_grid_resolves_layer():
    prob = gl.make_gl_problem(GLParams(0.05))
    assert prob.grid.h1 <= gl.layer_width(prob.params) / 8 + 1e-15
    assert prob.grid.x1[(prob.grid.n1 - 1) // 2] == 0.0
    assert prob.config.clamp_bound == pytest.approx(2 * math.sqrt(0.5) + 1)


def test_energy_of_zero():
    prob = gl.make_gl_problem(GLParams(0.1))
    assert gl.gl_energy(Field2D(prob.grid, np.zeros(prob.grid.size)), prob) == 0.0


def test_bump_below_well_has_negative_energy():
    p = GLParams(0.025)
    prob = gl.make_gl_problem(p)
    f, _ = bump(p)
    X1, X2 = prob.grid.mesh()
    v, m = f(X1, X2), mu(p, X1, X2)
    assert np.all(v[v > 0] ** 2 < 2 * m[v > 0])
    assert gl.gl_energy(Field2D.from_function(prob.grid, f), prob) < 0


def test_energy_matches_quadrature_second_order():
    p = GLParams(0.1)
    f, grad_sq = bump(p)
    eps = p.epsilon

    def integrand(x2, x1):
        v = f(x1, x2)
        return 0.5 * eps * grad_sq(x1, x2) - mu(p, x1, x2) * v * v / (2 * eps) + v ** 4 / (4 * eps)

    exact, _ = dblquad(integrand, -0.3, 0.3, 0.05, 0.65, epsabs=1e-12, epsrel=1e-12)
    exact *= 2.0  # odd reflection
    errs = []
    for n2 in (41, 81, 161):
        g = Grid2D(-2.0, 2.0, 0.0, 2.0, 2 * n2 - 1, n2)
        prob = gl.GLProblem(p, g, SolverConfig())
        errs.append(abs(gl.gl_energy(Field2D.from_function(g, f), prob) - exact))
    assert errs[0] / errs[1] >= 3.5 and errs[1] / errs[2] >= 3.5


def test_transfer_keeps_bilinear_functions():
    src = Grid2D(-2.5, 2.5, 0, 2.5, 21, 11)
    dst = Grid2D(-2.5, 2.5, 0, 2.5, 41, 21)
    f = Field2D.from_function(src, lambda a, b: a * b)
    out = gl.transfer(f, dst).as_array()
    X1, X2 = dst.mesh()
    inner = ~dst.boundary_mask()
    np.testing.assert_allclose(out[inner], (X1 * X2)[inner], atol=1e-13)


def test_converged_minimizer(gl_chain):
    prob, u = gl_chain[0]
    assert prob.params.epsilon == 0.1
    U = u.as_array()
    assert np.max(np.abs(gl.gl_residual(u, prob).values)) <= prob.config.abs_tol
    assert gl.gl_energy(u, prob) < 0
    assert gl.energy_identity_gap(u, prob) <= 1e-3
    assert U[1:-1, 1:-1].min() > 0
    assert gl.symmetry_defect(u) <= 5 * prob.config.abs_tol
    assert np.max(np.abs(U)) < prob.config.clamp_bound / 2
    assert gl.min_bound_constant(u, prob) <= 2.0


@pytest.mark.parametrize("i", [0, 1, 2])
def test_chain_members_are_critical_points(gl_chain, i):
    prob, u = gl_chain[i]
    assert np.max(np.abs(gl.gl_residual(u, prob).values)) <= prob.config.abs_tol
    assert gl.energy_identity_gap(u, prob) <= 1e-3
    assert gl.gl_energy(u, prob) < 0


def test_bound_holds_with_k_two(gl_chain):
    for prob, u in gl_chain:
        p = prob.params
        X1, X2 = prob.grid.mesh()
        env = np.sqrt(np.maximum(mu(p, X1, X2), 0.0)) + p.epsilon ** (1 / 3)
        assert np.all(np.abs(u.as_array()) <= 2.0 * env)


def test_thomas_fermi_gap(gl_chain):
    gaps = [gl.thomas_fermi_gap(u, prob) for prob, u in gl_chain]
    assert gaps[0] > gaps[1] > gaps[2]
    prob, u = gl_chain[0]
    X1, X2 = prob.grid.mesh()
    tf = Field2D(prob.grid, np.sqrt(np.maximum(mu(prob.params, X1, X2), 0.0)))
    assert gl.thomas_fermi_gap(tf, prob) == 0.0
    gap, (x1_at, x2_at) = gl.thomas_fermi_gap(u, prob, with_location=True)
    delta = prob.params.epsilon ** (2 / 3)
    assert gap == gaps[0]
    assert x2_at <= 2 * delta  # worst point sits in the layer along the axis


def test_blowup_window(gl_chain):
    prob, u = gl_chain[1]
    w = gl.blowup_rescale(u, prob)
    W = w.as_array()
    mid = (w.grid.n2 - 1) // 2
    assert np.all(W[:, mid] == 0.0)
    np.testing.assert_allclose(W, -W[:, ::-1], atol=1e-15)
    with pytest.raises(ValueError):
        gl.blowup_rescale(u, prob, gl.BlowupWindow(-200, 3, -3, 3, 11, 11))


def test_blowup_approaches_connecting_solution(gl_chain, connect):
    _, y = connect
    sups = []
    for prob, u in gl_chain:
        w = gl.blowup_rescale(u, prob)
        S1, S2 = w.grid.mesh()
        sups.append(np.max(np.abs(w.values - pde.odd_sample(y, S1.reshape(-1), S2.reshape(-1)))))
    assert sups[0] > sups[1] > sups[2]


def test_summary_keys(gl_chain):
    prob, u = gl_chain[0]
    s = gl.summary(u, prob)
    assert set(s) == {"epsilon", "chi", "energy", "energy_identity_gap", "tf_gap", "min_K_bound"}
