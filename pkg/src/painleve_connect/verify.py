"""Cross-module verification report for the connecting solution and the GL blow-up.

Every check is a record ``measured <= tolerance``; its ``paper_anchor`` names
the property it probes (see :data:`ANCHORS`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import connecting as pde
from . import ginzburg_landau as gl
from .config import VerifyConfig
from .grids import Field1D, Field2D, read_field_csv, sup_norm
from .hastings_mcleod import HMProblem, shoot_hm_oracle, solve_hastings_mcleod
from .special import GLParams, airy_ai

ANCHORS = {
    "odd-symmetry": "y is odd in x2 and positive for x2 > 0",
    "half-plane-bounds": "y is bounded by the Hastings-McLeod profile on every right half-plane",
    "odd-minimality": "second variation is non-negative for odd perturbations",
    "airy-ratio": "y / Ai(x1) stays O(1) as x1 grows",
    "allen-cahn-limit": "deep-left rescaling tends to tanh(t2/sqrt2) on the axis and to 1 above it",
    "monotone-x1": "y decreases in x1 for x2 > 0",
    "monotone-x2": "y increases in x2 and tends to h(x1) at the top",
    "hm-asymptotics": "h ~ Ai at +infinity and h ~ sqrt(|x|/2) at -infinity",
    "exponential-decay": "|y| exp(2/3 x1^1.5) is bounded for x1 >= 1",
    "pde-residual": "discrete residual of the generalized Painleve equation",
    "energy-identity": "E(u) = -int u^4/(4 eps) at critical points, and E(u) < 0",
    "uniform-bound": "|u| <= K (sqrt(mu+) + eps^(1/3))",
    "thomas-fermi": "|u| approaches sqrt(mu+) inside the disc as eps decreases",
    "blowup-limit": "rescaled GL minimizer approaches the connecting solution as eps decreases",
}


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    paper_anchor: str
    passed: bool = field(init=False)

    def __post_init__(self):
        if self.paper_anchor not in ANCHORS:
            raise ValueError(f"unknown anchor {self.paper_anchor!r}")
        self.measured = float(self.measured)
        self.tolerance = float(self.tolerance)
        self.passed = bool(self.measured <= self.tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name, "measured": self.measured, "tolerance": self.tolerance,
                "pass": self.passed, "paper_anchor": self.paper_anchor}


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, measured: float, tolerance: float, anchor: str) -> Check:
        c = Check(name, measured, tolerance, anchor)
        self.checks.append(c)
        return c

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks) and not self.missing_anchors()

    def missing_anchors(self) -> set[str]:
        return set(ANCHORS) - {c.paper_anchor for c in self.checks}

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> str:
        return json.dumps({"checks": [c.to_dict() for c in self.checks]}, indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        data = json.loads(text)
        rep = cls()
        for d in data["checks"]:
            c = rep.add(d["name"], d["measured"], d["tolerance"], d["paper_anchor"])
            if c.passed != d["pass"]:
                raise ValueError(f"check {d['name']}: stored pass flag disagrees with measured/tolerance")
        return rep


@dataclass
class Artifacts:
    h: Field1D
    hm_problem: HMProblem
    connect: pde.ConnectProblem
    y: Field2D
    gl_chain: list[tuple[gl.GLProblem, Field2D]]


def compute_artifacts(cfg: VerifyConfig) -> Artifacts:
    hm_prob = HMProblem.on(cfg.hm.grid(), cfg.hm.solver_config())
    h = solve_hastings_mcleod(hm_prob)
    cc = cfg.connect
    cprob = pde.make_problem(cc.grid(), cc.solver_config())
    y = pde.solve_connecting(cprob, descent_tol=cc.descent_tol, max_descent_iters=cc.max_descent_iters)
    chain = gl.continuation(cfg.gl.epsilons, cfg.gl.chi, cfg.gl.L, cfg.gl.nodes_per_unit,
                            config=cfg.gl.solver_config(gl_clamp(cfg.gl.chi)))
    return Artifacts(h, hm_prob, cprob, y, chain)


class MissingArtifact(FileNotFoundError):
    pass


def load_artifacts(cfg: VerifyConfig, directory: str | Path) -> Artifacts:
    d = Path(directory)

    def need(name: str) -> Path:
        p = d / name
        if not p.is_file():
            raise MissingArtifact(f"missing artifact {p}")
        return p

    h = read_field_csv(need("h.csv"))
    hm_prob = HMProblem.on(h.grid, cfg.hm.solver_config())
    h_ref = read_field_csv(need("h_ref.csv"))
    y = read_field_csv(need("y.csv"))
    cprob = pde.ConnectProblem(y.grid, h_ref, cfg.connect.solver_config())
    summary = json.loads(need("gl_summary.json").read_text())
    chain = []
    for run in summary["runs"]:
        u = read_field_csv(need(gl_field_name(run["epsilon"])))
        prob = gl.GLProblem(GLParams(run["epsilon"], run["chi"]), u.grid,
                            cfg.gl.solver_config(gl_clamp(run["chi"])))
        chain.append((prob, u))
    return Artifacts(h, hm_prob, cprob, y, chain)


def gl_clamp(chi: float) -> float:
    return 2.0 * math.sqrt(1.0 - chi) + 1.0


def gl_field_name(eps: float) -> str:
    return f"u_eps{eps:g}.csv"


def hm_checks(rep: VerificationReport, h: Field1D) -> None:
    x = h.grid.x
    right = (x >= 4.0) & (x <= 5.5)
    left = (x >= -10.0) & (x <= -8.0)
    rep.add("hm_airy_ratio_dev", np.max(np.abs(h.values[right] / airy_ai(x[right]) - 1.0)), 1e-2,
            "hm-asymptotics")
    rep.add("hm_branch_ratio_dev", np.max(np.abs(h.values[left] / np.sqrt(-x[left] / 2.0) - 1.0)), 1e-2,
            "hm-asymptotics")
    shot = shoot_hm_oracle(1.0, 8.0, -6.0)
    xs = shot.grid.x
    sel = xs <= 0.0
    rep.add("hm_shooting_agreement", np.max(np.abs(shot.values[sel] - h(xs[sel]))), 1e-4, "hm-asymptotics")


def connect_checks(rep: VerificationReport, y: Field2D, prob: pde.ConnectProblem, cfg: VerifyConfig) -> None:
    tol = prob.config.abs_tol
    U = y.as_array()
    hb = prob.h_on_x1[:, None]
    rep.add("pde_residual_sup", sup_norm(pde.residual_p2(y, prob)), 1e-8, "pde-residual")
    rep.add("axis_values_sup", np.max(np.abs(U[:, 0])), 0.0, "odd-symmetry")
    rep.add("odd_extension_jump", pde.odd_extension_jump(y), 1e-3, "odd-symmetry")
    rep.add("upper_half_negativity", max(0.0, -float(U.min())), 5 * tol, "odd-symmetry")
    rep.add("excess_over_h", max(0.0, float(np.max(U - hb))), 5 * tol, "half-plane-bounds")
    rep.add("odd_hessian_min_eig_neg", -pde.smallest_odd_hessian_eigenvalue(y), 0.0, "odd-minimality")
    ratio, x2_at = pde.airy_ratio(y)
    rep.add("airy_ratio_max", ratio, 10.0, "airy-ratio")
    rep.add("airy_ratio_argmax_below_top", y.grid.x2max - x2_at, 0.0, "airy-ratio")
    rc = cfg.rescale
    prof = pde.rescale_to_allen_cahn(y, rc.x1_level, 0.0, rc.t2_window, rc.samples)
    rep.add("tanh_profile_error", prof.tanh_error(), 5e-2, "allen-cahn-limit")
    prof2 = pde.rescale_to_allen_cahn(y, rc.x1_level, 2.0, rc.t2_window, rc.samples)
    rep.add("offset_profile_deficit", 1.0 - float(prof2.values.min()), 0.1, "allen-cahn-limit")
    n1_bad, n2_bad = pde.monotonicity_violations(y)
    rep.add("monotone_x1_violations", n1_bad, 0, "monotone-x1")
    rep.add("monotone_x2_violations", n2_bad, 0, "monotone-x2")
    rep.add("top_edge_gap", pde.top_edge_gap(y, prob), 5e-2, "monotone-x2")
    M, argmax_x1 = pde.decay_ratio_max(y)
    rep.add("decay_argmax_x1", argmax_x1, 2.0, "exponential-decay")
    rep.add("decay_constant", M, 10.0, "exponential-decay")


def gl_checks(rep: VerificationReport, chain, y: Field2D) -> None:
    ks, gaps, blow = [], [], []
    for prob, u in chain:
        e = prob.params.epsilon
        rep.add(f"gl_energy_eps{e:g}", gl.gl_energy(u, prob), 0.0, "energy-identity")
        rep.add(f"gl_energy_identity_gap_eps{e:g}", gl.energy_identity_gap(u, prob), 1e-3, "energy-identity")
        k = gl.min_bound_constant(u, prob)
        ks.append(k)
        rep.add(f"gl_min_K_eps{e:g}", k, 2.0, "uniform-bound")
        gaps.append(gl.thomas_fermi_gap(u, prob))
        w = gl.blowup_rescale(u, prob)
        S1, S2 = w.grid.mesh()
        ref = pde.odd_sample(y, S1.reshape(-1), S2.reshape(-1))
        blow.append(float(np.max(np.abs(w.values - ref))))
    if len(ks) > 1:
        rep.add("gl_min_K_variation", (max(ks) - min(ks)) / min(ks), 0.2, "uniform-bound")
    for (prob, _), prev, cur in zip(chain[1:], gaps, gaps[1:]):
        rep.add(f"tf_gap_eps{prob.params.epsilon:g}", cur, prev, "thomas-fermi")
    for (prob, _), prev, cur in zip(chain[1:], blow, blow[1:]):
        rep.add(f"blowup_sup_eps{prob.params.epsilon:g}", cur, prev, "blowup-limit")
    if len(chain) == 1:
        prob, _ = chain[0]
        rep.add(f"tf_gap_eps{prob.params.epsilon:g}", gaps[0], 1.0, "thomas-fermi")
        rep.add(f"blowup_sup_eps{prob.params.epsilon:g}", blow[0], 1.0, "blowup-limit")


def run_verify(cfg: VerifyConfig, artifacts: Artifacts | None = None) -> VerificationReport:
    if artifacts is None:
        artifacts = load_artifacts(cfg, cfg.artifacts) if cfg.artifacts else compute_artifacts(cfg)
    rep = VerificationReport()
    hm_checks(rep, artifacts.h)
    connect_checks(rep, artifacts.y, artifacts.connect, cfg)
    gl_checks(rep, artifacts.gl_chain, artifacts.y)
    return rep


def corrupted(y: Field2D, amplitude: float = 0.1, seed: int = 0) -> Field2D:
    """y + amplitude * uniform noise; used to show the checks catch corruption."""
    rng = np.random.default_rng(seed)
    return Field2D(y.grid, y.values + amplitude * rng.random(y.values.shape))
