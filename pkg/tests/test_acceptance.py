"""Acceptance suite: ten criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` (the lines are printed even
without ``-s``).
"""

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from painleve_connect import connecting as pde
from painleve_connect import ginzburg_landau as gl
from painleve_connect.errors import BlowUp
from painleve_connect.grids import (
    Field1D, Field2D, Grid1D, Grid2D, laplacian_2d, sample_many, second_derivative_1d, sup_norm,
)
from painleve_connect.hastings_mcleod import HMProblem, shoot_hm_oracle, solve_hastings_mcleod
from painleve_connect.special import (
    X_SWITCH, GLParams, _asymptotic_positive, _maclaurin, airy_ai, heteroclinic, mu,
)

EPSILONS = (0.1, 0.05, 0.025)


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nCRITERION {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


@pytest.fixture(scope="module")
def hm_run():
    return timed(lambda: solve_hastings_mcleod(HMProblem.default()))


@pytest.fixture(scope="module")
def connect_run():
    def run():
        prob = pde.make_problem()
        return prob, pde.solve_connecting(prob)
    return timed(run)


@pytest.fixture(scope="module")
def gl_run():
    return timed(gl.continuation, EPSILONS)


def test_criterion_01_hm_asymptotics(hm_run, report):
    h, secs = hm_run
    x = h.grid.x
    right = (x >= 4.0) & (x <= 5.5)
    left = (x >= -10.0) & (x <= -8.0)
    e_right = float(np.max(np.abs(h.values[right] / airy_ai(x[right]) - 1.0)))
    e_left = float(np.max(np.abs(h.values[left] / np.sqrt(-x[left] / 2.0) - 1.0)))
    ok = e_right <= 1e-2 and e_left <= 1e-2 and secs < 5.0
    report(1, ok, f"|h/Ai-1| = {e_right:.2e}, |h/sqrt(|x|/2)-1| = {e_left:.2e}, {secs:.2f} s")
    assert ok


def test_criterion_02_shooting_oracle(hm_run, report):
    h, _ = hm_run
    t0 = time.perf_counter()
    shot = shoot_hm_oracle(1.0, 8.0, -6.0)
    xs = shot.grid.x
    sel = xs <= 0.0
    diff = float(np.max(np.abs(shot.values[sel] - h(xs[sel]))))
    try:
        shoot_hm_oracle(1.1, 8.0, -6.0)
        blow_x = None
    except BlowUp as exc:
        blow_x = exc.x
    low = shoot_hm_oracle(0.9, 8.0, -6.0)
    # departure: leaves the positive, bounded Hastings-McLeod corridor before -6
    departs = bool(np.min(low.values) < 0.0 or np.max(np.abs(low.values - h(low.grid.x))) > 0.5)
    secs = time.perf_counter() - t0
    ok = diff <= 1e-4 and blow_x is not None and blow_x > -6.0 and departs and secs < 10.0
    report(2, ok, f"sup|BVP-shoot| on [-6,0] = {diff:.2e}, k=1.1 blow-up at x = {blow_x:.3f}, "
                  f"k=0.9 min = {np.min(low.values):.3f}, {secs:.2f} s")
    assert ok


def test_criterion_03_residual_and_self_convergence(connect_run, report):
    (prob, y), secs = connect_run
    res = sup_norm(pde.residual_p2(y, prob))
    t0 = time.perf_counter()
    coarse = pde.solve_connecting(pde.make_problem(Grid2D(-12, 6, 0, 16, 181, 161)))
    fine = pde.solve_connecting(pde.make_problem(prob.grid.refined()))
    secs += time.perf_counter() - t0
    order = pde.self_convergence_order([coarse, y, fine])
    ok = res <= 1e-8 and order >= 1.9 and secs < 600.0
    report(3, ok, f"residual = {res:.2e}, self-convergence order = {order:.3f}, {secs:.1f} s")
    assert ok


def test_criterion_04_allen_cahn_profile(connect_run, report):
    (_, y), _ = connect_run
    prof = pde.rescale_to_allen_cahn(y, -11.0, 0.0, 4.0)
    off = pde.rescale_to_allen_cahn(y, -11.0, 2.0, 4.0)
    err = prof.tanh_error()
    lo = float(off.values.min())
    ok = err <= 5e-2 and lo > 0.9
    report(4, ok, f"sup|ytilde - tanh(t2/sqrt2)| = {err:.2e}, min profile at offset 2 = {lo:.4f}")
    assert ok


def test_criterion_05_monotonicity_and_top_edge(connect_run, report):
    (prob, y), _ = connect_run
    bad1, bad2 = pde.monotonicity_violations(y, 1e-10)
    n_int = (y.grid.n1 - 2) * (y.grid.n2 - 2)
    gap = pde.top_edge_gap(y, prob)
    ok = bad1 == 0 and bad2 == 0 and gap <= 5e-2
    report(5, ok, f"wrong-sign nodes x1: {bad1}/{n_int}, x2: {bad2}/{n_int}, top-edge gap = {gap:.2e}")
    assert ok


def test_criterion_06_ordering_and_decay(connect_run, report):
    (prob, y), _ = connect_run
    excess = float(np.max(y.as_array() - prob.h_on_x1[:, None]))
    M, at = pde.decay_ratio_max(y)
    ok = excess <= 5 * prob.config.abs_tol and 1.0 <= at <= 2.0
    report(6, ok, f"max(y - h) = {excess:.2e}, decay max M = {M:.4f} at x1 = {at:.2f}")
    assert ok


def test_criterion_07_energy_identity(gl_run, report):
    chain, _ = gl_run
    prob, u = chain[0]
    gap = gl.energy_identity_gap(u, prob)
    e = gl.gl_energy(u, prob)
    ok = prob.params.epsilon == 0.1 and gap <= 1e-3 and e < 0
    report(7, ok, f"eps = 0.1: relative gap = {gap:.2e}, E(u) = {e:.5f}")
    assert ok


def test_criterion_08_uniform_bound_constant(gl_run, report):
    chain, _ = gl_run
    ks = [gl.min_bound_constant(u, prob) for prob, u in chain]
    spread = (max(ks) - min(ks)) / min(ks)
    ok = spread <= 0.2
    listing = ", ".join(f"K({e:g}) = {k:.4f}" for e, k in zip(EPSILONS, ks))
    report(8, ok, f"{listing}; variation = {100 * spread:.1f}% (limit 20%)")
    assert ok


def test_criterion_09_blowup_convergence(gl_run, connect_run, report):
    chain, secs = gl_run
    (_, y), _ = connect_run
    sups = []
    for prob, u in chain:
        w = gl.blowup_rescale(u, prob)
        S1, S2 = w.grid.mesh()
        sups.append(float(np.max(np.abs(w.values - pde.odd_sample(y, S1.reshape(-1), S2.reshape(-1))))))
    ok = all(b < a for a, b in zip(sups, sups[1:])) and secs < 1800.0
    listing = ", ".join(f"{e:g}: {s:.4f}" for e, s in zip(EPSILONS, sups))
    report(9, ok, f"sup_[-3,3]^2 |w_eps - y| = {listing}; chain {secs:.1f} s")
    assert ok


def _operator_invariants() -> dict[str, float]:
    """Worst violation (measured - tolerance, <= 0 passes) for each operator invariant."""
    out = {}
    g = Grid2D(-1.0, 2.0, 0.5, 2.0, 31, 21)
    X1, X2 = g.mesh()
    lap_c = laplacian_2d(Field2D(g, np.full(g.size, 3.7))).values
    out["laplacian kills constants"] = float(np.max(np.abs(lap_c)))
    lap_q = laplacian_2d(Field2D(g, X1 ** 2 + X2 ** 2)).as_array()[1:-1, 1:-1]
    out["laplacian exact on quadratics (rel 1e-12)"] = float(np.max(np.abs(lap_q - 4.0)) / 4.0 - 1e-12)
    g1 = Grid1D(-2.0, 3.0, 51)
    d2c = second_derivative_1d(Field1D(g1, np.full(51, -1.25))).values
    out["3-point stencil kills constants"] = float(np.max(np.abs(d2c)))
    d2q = second_derivative_1d(Field1D(g1, g1.x ** 2)).values[1:-1]
    out["3-point stencil exact on quadratics (rel 1e-12)"] = float(np.max(np.abs(d2q - 2.0)) / 2.0 - 1e-12)

    errs = []
    for n in (21, 41):
        gg = Grid2D(-1.0, 1.0, 0.0, 2.0, n, n)
        A, B = gg.mesh()
        f = Field2D(gg, np.sin(2 * A) * np.exp(B / 2))
        exact = -3.75 * np.sin(2 * A) * np.exp(B / 2)
        errs.append(np.max(np.abs(laplacian_2d(f).as_array()[1:-1, 1:-1] - exact[1:-1, 1:-1])))
    out["laplacian Richardson slope >= 1.9"] = 1.9 - math.log2(errs[0] / errs[1])

    v = np.random.default_rng(3).standard_normal(g.size)
    out["sample reproduces nodes"] = float(np.max(np.abs(
        sample_many(Field2D(g, v), X1.reshape(-1), X2.reshape(-1)) - v)) - 1e-12)

    h = 1e-3
    pts = [-10.0, -5.0, 0.0, 2.0, 5.0]

    def d2(f, x):
        return (f(x + h) - 2.0 * f(x) + f(x - h)) / h ** 2

    out["Airy ODE residual <= 1e-8"] = max(abs(d2(airy_ai, x) - x * airy_ai(x)) for x in pts) - 1e-8
    out["heteroclinic ODE residual <= 1e-8"] = max(
        abs(d2(heteroclinic, x) - (heteroclinic(x) ** 3 - heteroclinic(x))) for x in pts) - 1e-8
    win = X_SWITCH + np.linspace(-0.05, 0.05, 11)
    out["Airy branches agree near switch (1e-9)"] = max(
        abs(_maclaurin(x)[0] - _asymptotic_positive(x)[0]) / abs(_maclaurin(x)[0]) for x in win) - 1e-9

    p = GLParams(0.1, 0.5)
    rng = np.random.default_rng(4)
    pts2 = rng.uniform(-3, 3, (64, 2))
    th = rng.uniform(0, 2 * np.pi, 64)
    rot = np.stack([np.cos(th) * pts2[:, 0] - np.sin(th) * pts2[:, 1],
                    np.sin(th) * pts2[:, 0] + np.cos(th) * pts2[:, 1]], axis=1)
    out["mu is radial"] = float(np.max(np.abs(mu(p, *pts2.T) - mu(p, *rot.T)))) - 1e-14
    return out


@settings(max_examples=20, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def _quadratic_property(a, b):
    g = Grid2D(0.0, 1.0, 0.0, 1.0, 11, 11)
    X1, X2 = g.mesh()
    lap = laplacian_2d(Field2D(g, a * X1 ** 2 + b * X2 ** 2)).as_array()[1:-1, 1:-1]
    # relative to the stencil's own rounding scale max|f| / h^2
    assert np.max(np.abs(lap - 2 * (a + b))) <= 1e-12 * max(1.0, abs(a) + abs(b)) / g.h1 ** 2


def test_criterion_10_operator_suite(report):
    t0 = time.perf_counter()
    worst = _operator_invariants()
    _quadratic_property()
    secs = time.perf_counter() - t0
    failed = {k: v for k, v in worst.items() if v > 0}
    ok = not failed and secs < 5.0
    detail = "; ".join(f"{k} exceeds by {v:.2e}" for k, v in failed.items()) or "all invariants hold"
    report(10, ok, f"{len(worst) - len(failed)}/{len(worst)} invariants hold, {secs:.2f} s; {detail}")
    assert ok
