"""Batch command-line interface.

Subcommands: ``resonance`` (tabulate the window/response functions and the
torus map), ``zeros`` (locate and classify torus zeros), ``contraction``
(cone search and norm-bound sampling for a matrix), ``invariance``
(invariant-set construction and verification at a chosen zero), ``orbit``
(section-map iteration traces), ``scenario`` (the three end-to-end
demonstrations).  Outputs are CSV tables and a ``report.json`` per run;
identical configuration and seed give byte-identical files.

Exit codes: 0 success, 2 precondition violation, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._kernel import backend_name
from .config import RunConfig, load_config
from .dynamics import (
    PolarState,
    choose_invariant_set,
    iterate_orbit,
    verify_invariance,
)
from .errors import NumericalError, PreconditionError
from .oscillator import TWO_PI, torus_wrap
from .resonance import (
    ResonanceEval,
    alpha,
    find_zeros,
    resolubility_check,
)
from .scenarios import SCENARIOS
from .spectral import DpmClass, classify_dpm, find_cone_params, verify_contraction

_FMT = "{:.16e}"  # 17 significant digits


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _header_lines(command: str, cfg: RunConfig, seed: int) -> list[str]:
    return [
        f"# asymosc {__version__}",
        f"# command = {command}",
        f"# seed = {seed}",
        f"# config = {_canonical(cfg.resolved)}",
    ]


def _write_csv(path: Path, header: list[str], columns: list[str], rows) -> None:
    lines = list(header)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_FMT.format(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_report(path: Path, command: str, cfg: RunConfig, seed: int, results: dict) -> None:
    doc = {
        "tool": {"name": "asymosc", "version": __version__, "kernel": backend_name()},
        "command": command,
        "seed": seed,
        "config": cfg.resolved,
        "results": results,
    }
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _zero_rows(zeros):
    rows = []
    for idx, z in enumerate(zeros):
        rows.append(
            (
                idx,
                float(z.omega[0]),
                float(z.omega[1]),
                float(z.residual_norm),
                z.classification.value,
                float(z.jacobian[0, 0]),
                float(z.jacobian[0, 1]),
                float(z.jacobian[1, 0]),
                float(z.jacobian[1, 1]),
            )
        )
    return rows


def cmd_resonance(cfg: RunConfig, out: Path, seed: int, grid: int | None) -> int:
    n_grid = grid or int(cfg.resonance.get("grid", 256))
    torus_grid = int(cfg.resonance.get("torus_grid", 48))
    ev = ResonanceEval(cfg.system)
    ts = np.arange(n_grid) * (TWO_PI / n_grid)
    lam1 = np.asarray(ev.lam(0, ts))
    lam2 = np.asarray(ev.lam(1, ts))
    sig1 = np.asarray(ev.sigma(0, ts))
    sig2 = np.asarray(ev.sigma(1, ts))
    phi1 = np.asarray(ev.phi(0, ts))
    phi2 = np.asarray(ev.phi(1, ts))
    header = _header_lines("resonance", cfg, seed)
    _write_csv(
        out / "resonance_functions.csv",
        header,
        ["t", "lambda1", "lambda2", "sigma1", "sigma2", "phi1", "phi2"],
        zip(ts.tolist(), lam1, lam2, sig1, sig2, phi1, phi2),
    )
    axis = np.arange(torus_grid) * (TWO_PI / torus_grid)
    L1, L2 = ev.L_grid(axis, axis)
    rows = []
    for i, t1 in enumerate(axis):
        for j, t2 in enumerate(axis):
            rows.append((float(t1), float(t2), float(L1[i, j]), float(L2[i, j])))
    _write_csv(out / "torus_map.csv", header, ["theta1", "theta2", "L1", "L2"], rows)
    rep12 = resolubility_check(cfg.system.pair1, cfg.system.pair2)
    rep21 = resolubility_check(cfg.system.pair2, cfg.system.pair1)
    results = {
        "alpha1": alpha(cfg.system.pair1),
        "alpha2": alpha(cfg.system.pair2),
        "resolubility_1_vs_2": {
            "inside": rep12.inside,
            "lambda_at_pi": rep12.lambda_at_pi,
            "alpha": rep12.alpha_value,
            "lambda_at_zero": rep12.lambda_at_zero,
        },
        "resolubility_2_vs_1": {
            "inside": rep21.inside,
            "lambda_at_pi": rep21.lambda_at_pi,
            "alpha": rep21.alpha_value,
            "lambda_at_zero": rep21.lambda_at_zero,
        },
        "grid": n_grid,
        "torus_grid": torus_grid,
    }
    _write_report(out / "report.json", "resonance", cfg, seed, results)
    return 0


def cmd_zeros(cfg: RunConfig, out: Path, seed: int, grid: int | None, tol: float | None) -> int:
    n_grid = grid or int(cfg.zeros.get("grid", 32))
    newton_tol = tol or float(cfg.zeros.get("tol", 1e-11))
    ev = ResonanceEval(cfg.system)
    zeros = find_zeros(ev, n_grid, newton_tol)
    header = _header_lines("zeros", cfg, seed)
    _write_csv(
        out / "zeros.csv",
        header,
        ["index", "theta1", "theta2", "residual", "class", "j11", "j12", "j21", "j22"],
        _zero_rows(zeros),
    )
    results = {
        "count": len(zeros),
        "grid": n_grid,
        "newton_tol": newton_tol,
        "zeros": [
            {
                "omega": [float(v) for v in z.omega],
                "classification": z.classification.value,
                "residual_norm": float(z.residual_norm),
            }
            for z in zeros
        ],
    }
    _write_report(out / "report.json", "zeros", cfg, seed, results)
    return 0


def cmd_contraction(cfg: RunConfig, out: Path, seed: int, samples: int | None) -> int:
    matrix = cfg.contraction.get("matrix")
    if matrix is None:
        raise PreconditionError("config needs [contraction] matrix = [[..],[..]]")
    A = np.asarray(matrix, dtype=float)
    n_samples = samples or int(cfg.contraction.get("samples", 10000))
    safety = float(cfg.contraction.get("safety", 0.5))
    cls = classify_dpm(A)
    if cls is DpmClass.NEITHER:
        raise PreconditionError("matrix has no usable diagonal sign structure")
    work = A if cls is DpmClass.DPLUS else -A
    cone = find_cone_params(work, safety)
    rep = verify_contraction(work, cone, n_samples, seed=seed)
    results = {
        "classification": cls.value,
        "analyzed_matrix": work.tolist(),
        "negated": bool(cls is DpmClass.DMINUS),
        "a0": cone.a0,
        "eps0": cone.eps0,
        "eta": cone.eta,
        "samples": rep.samples,
        "violations": rep.violations,
        "worst_margin": rep.worst_margin,
    }
    _write_report(out / "report.json", "contraction", cfg, seed, results)
    return 0


def cmd_invariance(
    cfg: RunConfig, out: Path, seed: int, samples: int | None, direction: str | None
) -> int:
    ev = ResonanceEval(cfg.system)
    n_grid = int(cfg.invariance.get("grid", 32))
    newton_tol = float(cfg.invariance.get("tol", 1e-11))
    zeros = find_zeros(ev, n_grid, newton_tol)
    idx = int(cfg.invariance.get("zero_index", 0))
    if not 0 <= idx < len(zeros):
        raise PreconditionError(f"zero_index {idx} out of range ({len(zeros)} zeros found)")
    zero = zeros[idx]
    mode = direction or str(cfg.invariance.get("direction", "auto"))
    if mode == "auto":
        if zero.classification is DpmClass.DPLUS:
            mode = "forward"
        elif zero.classification is DpmClass.DMINUS:
            mode = "backward"
        else:
            raise PreconditionError("selected zero has no usable sign structure")
    n_samples = samples or int(cfg.invariance.get("samples", 500))
    params = choose_invariant_set(cfg.system, zero, cfg.integrator, direction=mode, ev=ev)
    ver = verify_invariance(cfg.system, params, n_samples, cfg.integrator, seed=seed)
    results = {
        "zero_index": idx,
        "zero": {
            "omega": [float(v) for v in zero.omega],
            "classification": zero.classification.value,
        },
        "direction": mode,
        "direction_note": (
            "backward mode: the expanding class is certified through the inverse map"
            if mode == "backward"
            else "forward mode"
        ),
        "params": {
            "R": params.R,
            "Theta": params.Theta,
            "lambda": params.lam,
            "eta": params.eta,
            "growth_margins": list(params.growth_margins),
        },
        "samples": ver.samples,
        "violations": ver.violations,
        "worst_growth_slack": ver.worst_growth_slack,
        "worst_ratio_slack": ver.worst_ratio_slack,
        "worst_angle_slack": ver.worst_angle_slack,
    }
    _write_report(out / "report.json", "invariance", cfg, seed, results)
    return 0


def _trace_rows(trace):
    rows = []
    flags = trace.in_set if trace.in_set is not None else [True] * len(trace.states)
    for k, (s, flag) in enumerate(zip(trace.states, flags)):
        rows.append((k, s.theta1, s.theta2, s.r1, s.r2, int(flag)))
    return rows


def cmd_orbit(
    cfg: RunConfig, out: Path, seed: int, samples: int | None, direction: str | None
) -> int:
    theta = cfg.orbit.get("theta", [0.0, 0.0])
    radii = cfg.orbit.get("r")
    if radii is None:
        raise PreconditionError("config needs [orbit] r = [r1, r2]")
    iterates = samples or int(cfg.orbit.get("iterates", 100))
    if iterates < 1:
        raise PreconditionError("orbit needs at least one iterate")
    mode = direction or str(cfg.orbit.get("direction", "forward"))
    s0 = PolarState(float(theta[0]), float(theta[1]), float(radii[0]), float(radii[1]))
    trace = iterate_orbit(cfg.system, s0, iterates, mode, cfg.integrator)
    header = _header_lines("orbit", cfg, seed)
    _write_csv(
        out / "orbit.csv",
        header,
        ["k", "theta1", "theta2", "r1", "r2", "in_set"],
        _trace_rows(trace),
    )
    radii_arr = trace.radii
    results = {
        "iterates": iterates,
        "direction": mode,
        "initial_radii": radii_arr[0].tolist(),
        "final_radii": radii_arr[-1].tolist(),
        "min_radius": float(np.min(radii_arr)),
        "max_radius": float(np.max(radii_arr)),
    }
    _write_report(out / "report.json", "orbit", cfg, seed, results)
    return 0


def cmd_scenario(cfg: RunConfig, out: Path, seed: int, name: str) -> int:
    if name not in SCENARIOS:
        raise PreconditionError(
            f"unknown scenario {name!r}; available: {', '.join(sorted(SCENARIOS))}"
        )
    overrides = dict(cfg.scenario.get(name, {}))
    report = SCENARIOS[name](seed=seed, **overrides)
    doc = report.to_dict()
    doc["overrides"] = overrides
    header = _header_lines(f"scenario {name}", cfg, seed)
    for trace, orbit in zip(report.traces, report.orbits):
        fname = f"orbit_{orbit['direction']}.csv"
        _write_csv(
            out / fname,
            header,
            ["k", "theta1", "theta2", "r1", "r2", "in_set"],
            _trace_rows(trace),
        )
    _write_report(out / "report.json", f"scenario {name}", cfg, seed, doc)
    return 0 if report.passed else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymosc",
        description="Resonance analysis and unbounded-orbit construction "
        "for coupled asymmetric oscillators.",
    )
    parser.add_argument("--version", action="version", version=f"asymosc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_direction=False):
        p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument("--samples", type=int, default=None,
                       help="sample count (contraction/invariance), iterate count (orbit)")
        p.add_argument("--grid", type=int, default=None, help="grid resolution override")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        if needs_direction:
            p.add_argument("--direction", choices=("forward", "backward"), default=None)

    common(sub.add_parser("resonance", help="tabulate window/response functions and the torus map"))
    common(sub.add_parser("zeros", help="locate and classify torus-map zeros"))
    common(sub.add_parser("contraction", help="cone search and norm-bound sampling"))
    common(sub.add_parser("invariance", help="construct and verify an invariant set"), True)
    common(sub.add_parser("orbit", help="iterate the section map"), True)
    p_sc = sub.add_parser("scenario", help="run an end-to-end demonstration")
    p_sc.add_argument("name", help="small-coupling | phi1-null | linear-symmetric")
    common(p_sc)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = args.seed
    if args.command == "resonance":
        return cmd_resonance(cfg, out, seed, args.grid)
    if args.command == "zeros":
        return cmd_zeros(cfg, out, seed, args.grid, args.tol)
    if args.command == "contraction":
        return cmd_contraction(cfg, out, seed, args.samples)
    if args.command == "invariance":
        return cmd_invariance(cfg, out, seed, args.samples, args.direction)
    if args.command == "orbit":
        return cmd_orbit(cfg, out, seed, args.samples, args.direction)
    if args.command == "scenario":
        return cmd_scenario(cfg, out, seed, args.name)
    raise AssertionError("unreachable")


def main(argv=None) -> int:
    try:
        return run(argv)
    except PreconditionError as exc:
        print(f"asymosc: precondition violation: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"asymosc: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"asymosc: i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
