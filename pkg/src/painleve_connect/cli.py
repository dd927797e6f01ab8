"""painleve-connect command line.

Exit codes: 0 success, 2 solver failure or missing artifacts, 3 physical
post-check failure (or a failed verification check), 4 configuration or I/O
error.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import connecting as pde
from . import ginzburg_landau as gl
from .config import COMMANDS, ConfigError, load_config
from .errors import NonPhysical, SolverError
from .grids import read_field_csv, sup_norm, write_field_csv
from .hastings_mcleod import HMProblem, residual_hm, solve_hastings_mcleod
from .verify import MissingArtifact, gl_clamp, gl_field_name, run_verify

EXIT_OK, EXIT_SOLVER, EXIT_PHYSICAL, EXIT_CONFIG = 0, 2, 3, 4

log = logging.getLogger("painleve_connect")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _dump_jsonl(rows, path: Path) -> None:
    with open(path, "w") as fh:
        for r in rows:
            fh.write(json.dumps(r, sort_keys=True) + "\n")


def _config_dict(cfg) -> dict:
    return json.loads(json.dumps(dataclasses.asdict(cfg)))


def run_hm(cfg, out: Path) -> int:
    prob = HMProblem.on(cfg.grid(), cfg.solver_config())
    started = _now()
    hist: list = []
    h = solve_hastings_mcleod(prob, history=hist)
    write_field_csv(h, out / "h.csv")
    _dump_jsonl(hist, out / "hm_convergence.jsonl")
    _dump_json({
        "started_at": started,
        "config": _config_dict(cfg),
        "newton_iters": hist[-1]["iter"],
        "residual_sup": sup_norm(residual_hm(h, prob)),
        "h_at_0": float(h(0.0)),
    }, out / "hm_summary.json")
    log.info("hm: %d Newton steps, h(0) = %.10f", hist[-1]["iter"], h(0.0))
    return EXIT_OK


def _solve_connect(cfg):
    prob = pde.make_problem(cfg.grid(), cfg.solver_config())
    hist: list = []
    descent: list = []
    y = pde.solve_connecting(prob, descent_tol=cfg.descent_tol, max_descent_iters=cfg.max_descent_iters,
                             history=hist, descent_history=descent)
    return prob, y, hist, descent


def run_connect(cfg, out: Path) -> int:
    started = _now()
    prob, y, hist, descent = _solve_connect(cfg)
    write_field_csv(y, out / "y.csv")
    write_field_csv(prob.h_ref, out / "h_ref.csv")
    _dump_jsonl(hist, out / "connect_convergence.jsonl")
    _dump_jsonl(descent, out / "connect_descent.jsonl")
    n1_bad, n2_bad = pde.monotonicity_violations(y)
    ratio, _ = pde.airy_ratio(y)
    _dump_json({
        "started_at": started,
        "config": _config_dict(cfg),
        "descent_iters": len(descent),
        "newton_iters": hist[-1]["iter"],
        "residual_sup": sup_norm(pde.residual_p2(y, prob)),
        "monotone_x1_violations": n1_bad,
        "monotone_x2_violations": n2_bad,
        "airy_ratio_max": ratio,
        "top_edge_gap": pde.top_edge_gap(y, prob),
        "decay_constant": pde.check_decay(y)[0],
    }, out / "connect_summary.json")
    log.info("connect: %d descent + %d Newton steps", len(descent), hist[-1]["iter"])
    return EXIT_OK


def run_gl(cfg, out: Path) -> int:
    started = _now()
    hists: dict = {}
    chain = gl.continuation(cfg.epsilons, cfg.chi, cfg.L, cfg.nodes_per_unit, histories=hists,
                            config=cfg.solver_config(gl_clamp(cfg.chi)))
    runs = []
    for prob, u in chain:
        e = prob.params.epsilon
        write_field_csv(u, out / gl_field_name(e))
        _dump_jsonl(hists[e], out / f"gl_convergence_eps{e:g}.jsonl")
        runs.append(gl.summary(u, prob))
        log.info("gl: eps = %g energy = %.6g", e, runs[-1]["energy"])
    _dump_json({"started_at": started, "config": _config_dict(cfg), "runs": runs}, out / "gl_summary.json")
    return EXIT_OK


def run_rescale(cfg, out: Path) -> int:
    if cfg.y_csv is not None:
        y = read_field_csv(cfg.y_csv)
    else:
        _, y, _, _ = _solve_connect(cfg.connect)
    prof = pde.rescale_to_allen_cahn(y, cfg.x1_level, cfg.x2_offset, cfg.t2_window, cfg.samples)
    ref = np.tanh(prof.t2_samples / np.sqrt(2.0))
    with open(out / "profile.csv", "w") as fh:
        fh.write("t2,ytilde,tanh_ref\n")
        for t, v, r in zip(prof.t2_samples, prof.values, ref):
            fh.write(f"{t:.17g},{v:.17g},{r:.17g}\n")
    log.info("rescale: sup |ytilde - tanh| = %.3e", prof.tanh_error())
    return EXIT_OK


def run_verify_cmd(cfg, out: Path) -> int:
    rep = run_verify(cfg)
    (out / "report.json").write_text(rep.to_json() + "\n")
    for c in rep.checks:
        log.info("%-4s %-36s %.4g <= %.4g", "ok" if c.passed else "FAIL", c.name, c.measured, c.tolerance)
    missing = rep.missing_anchors()
    if missing:
        log.error("anchors without checks: %s", ", ".join(sorted(missing)))
    return EXIT_OK if rep.all_passed else EXIT_PHYSICAL


DRIVERS = {
    "hm": run_hm,
    "connect": run_connect,
    "gl": run_gl,
    "rescale": run_rescale,
    "verify": run_verify_cmd,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="painleve-connect",
                description="Hastings-McLeod, connecting-solution and Ginzburg-Landau solvers")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", type=Path, default=None, help="JSON config file")
        s.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        s.add_argument("--quiet", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr, force=True)
    try:
        cfg = load_config(args.command, args.config)
        args.out.mkdir(parents=True, exist_ok=True)
        return DRIVERS[args.command](cfg, args.out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except MissingArtifact as exc:
        log.error("%s", exc)
        return EXIT_SOLVER
    except NonPhysical as exc:
        log.error("post-check failed: %s", exc)
        return EXIT_PHYSICAL
    except SolverError as exc:
        log.error("solver failed: %s", exc)
        return EXIT_SOLVER
    except (OSError, ValueError) as exc:
        log.error("I/O error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
