"""spinshape levels|spectrum|verify|wavefunction

Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import checks
from .analytic import NotABoundState, bound_state_count, continuum_threshold, decay_margin, level_table
from .config import ConfigError, RunConfig, load_config
from .fields import FlowError, flowed_params
from .ladder import DegeneracyCollapse, build_excited_state
from .numerics.eigen import EigenSolverError, FactorizationBreakdown, count_below
from .numerics.operators import discretize_direct, discretize_factorized
from .numerics.spectrum import bound_spectrum
from .symmetry import degeneracy_report
from .zeromode import DegenerateKernelError, zero_mode_pair

EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFY = 4

SOLVER_ERRORS = (EigenSolverError, FactorizationBreakdown, DegenerateKernelError, DegeneracyCollapse, FlowError)

# CLI flag -> config key
OVERRIDES = {
    "gamma": "gamma",
    "beta": "beta",
    "lambda": "lambda",
    "grid.half_width": "grid.half_width",
    "grid.points": "grid.points",
    "solver.scheme": "solver.scheme",
    "solver.k_levels": "solver.k_levels",
    "solver.tol": "solver.tol",
    "zeromode.spacing": "zeromode.spacing",
    "out": "outputs.directory",
    "format": "outputs.format",
}


def fmt(x) -> str:
    return f"{x:.17g}"


def write_table(columns, rows, meta: dict, form: str, stream) -> None:
    if form == "json":
        json.dump({"meta": meta, "columns": columns, "rows": rows}, stream, indent=2)
        stream.write("\n")
        return
    for k, v in meta.items():
        stream.write(f"# {k}: {v}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in row])


def emit(name: str, columns, rows, meta, cfg: RunConfig, to_file: bool) -> Path | None:
    form = cfg.outputs.format
    if not to_file:
        write_table(columns, rows, meta, form, sys.stdout)
        return None
    out = Path(cfg.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.{form}"
    with path.open("w") as fh:
        write_table(columns, rows, meta, form, fh)
    return path


def _param_meta(cfg: RunConfig) -> dict:
    return {"gamma": fmt(cfg.gamma), "beta": fmt(cfg.beta), "lambda": fmt(cfg.lam)}


def cmd_levels(cfg: RunConfig, args) -> int:
    table = level_table(cfg.gamma, cfg.beta)
    meta = {**_param_meta(cfg), "continuum_threshold": fmt(table.threshold), "bound_levels": len(table.levels)}
    if table.broken:
        meta["note"] = "broken SUSY: no normalizable zero mode, empty spectrum"
    rows = [[lv.n, float(lv.energy), lv.degeneracy, float(decay_margin(cfg.gamma, cfg.beta, lv.n)), "true"] for lv in table.levels]
    emit("levels", ["n", "energy", "degeneracy", "decay_margin", "admissible"], rows, meta, cfg, args.out is not None)
    return 0


def _operator(cfg, which):
    grid = cfg.make_grid()
    if cfg.solver.scheme == "direct":
        return discretize_direct(cfg.params, grid, which)
    return discretize_factorized(cfg.params, grid, which)


def cmd_spectrum(cfg: RunConfig, args) -> int:
    thr = continuum_threshold(cfg.gamma, cfg.beta)
    table = level_table(cfg.gamma, cfg.beta)
    analytic = np.repeat(table.energies(), 2)
    rows = []
    meta = {**_param_meta(cfg), "half_width": fmt(cfg.grid.half_width), "points": cfg.grid.points,
            "scheme": cfg.solver.scheme, "continuum_threshold": fmt(thr)}
    sectors = ["minus", "plus"] if args.plus else ["minus"]
    for which in sectors:
        op = _operator(cfg, which)
        extra = max(0, cfg.solver.k_levels - count_below(op, thr))
        bs = bound_spectrum(op, thr, cfg.solver.tol, extra=extra)
        bound_idx = 0
        for i, (e, wall) in enumerate(zip(bs.values, bs.wall_mode)):
            bound = bool(e < thr and not wall)
            ref = err = ""
            if bound and which == "minus" and bound_idx < len(analytic):
                ref = float(analytic[bound_idx])
                err = float(e - ref)
            elif bound and which == "plus" and bound_idx + 2 < len(analytic):
                ref = float(analytic[bound_idx + 2])
                err = float(e - ref)
            bound_idx += bound
            rows.append([which, i, float(e), "true" if bound else "false", "true" if wall else "false", ref, err])
        clusters = degeneracy_report(bs.bound_values, thr, checks.SPLIT_TOL)
        meta[f"clusters_{which}"] = " ".join(f"{c.center:.10g}x{c.multiplicity}" for c in clusters) or "none"
    emit("spectrum", ["sector", "index", "eigenvalue", "bound", "wall_mode", "analytic", "error"], rows, meta, cfg,
         args.out is not None)
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    results = checks.run_all(cfg, sabotage=args.sabotage_printed_potential)
    passed = all(r.passed for r in results)
    for r in results:
        print(r.line(), file=sys.stderr)
    verdict = {
        "passed": passed,
        "config": cfg.to_flat(),
        "sabotage_printed_potential": bool(args.sabotage_printed_potential),
        "checks": [r.to_dict() for r in results],
    }
    text = json.dumps(verdict, indent=2, default=float)
    print(text)
    if args.out is not None:
        out = Path(cfg.outputs.directory)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verdict.json").write_text(text + "\n")
    return 0 if passed else EXIT_VERIFY


GNUPLOT = """set title "{title}"
set xlabel "z"
set key top right
set datafile commentschars "#"
set datafile separator ","
plot "{data}" using 1:2 with lines title "Re psi1", \\
     "{data}" using 1:3 with lines title "Im psi1", \\
     "{data}" using 1:4 with lines title "Re psi2", \\
     "{data}" using 1:5 with lines title "Im psi2"
"""


def cmd_wavefunction(cfg: RunConfig, args) -> int:
    n = args.n
    if n < 0 or n >= bound_state_count(cfg.gamma, cfg.beta):
        raise NotABoundState(f"level n={n} is not bound for gamma={cfg.gamma}, beta={cfg.beta}")
    grid = checks.zero_mode_grid(cfg.grid.half_width, cfg.zeromode.spacing)
    if n == 0:
        pair = tuple(zero_mode_pair(grid, flowed_params(cfg.params, 0)))
        energy = 0.0
    else:
        energy, pair = build_excited_state(grid, cfg.params, n)
    members = [1, 2] if args.member == "both" else [int(args.member)]
    out = Path(cfg.outputs.directory)
    out.mkdir(parents=True, exist_ok=True)
    for m in members:
        psi = pair[m - 1]
        v = psi.values
        rows = [[float(z), float(a.real), float(a.imag), float(b.real), float(b.imag)] for z, a, b in zip(psi.z, v[:, 0], v[:, 1])]
        meta = {**_param_meta(cfg), "level": n, "member": m, "energy": fmt(energy), "norm": fmt(psi.norm()),
                "spacing": fmt(grid.spacing), "points": grid.points}
        name = f"wavefunction_n{n}_m{m}"
        path = out / f"{name}.{cfg.outputs.format}"
        with path.open("w") as fh:
            write_table(["z", "re_psi1", "im_psi1", "re_psi2", "im_psi2"], rows, meta, cfg.outputs.format, fh)
        print(path)
        if args.gnuplot and cfg.outputs.format == "csv":
            gp = out / f"{name}.gp"
            gp.write_text(GNUPLOT.format(title=f"level {n}, member {m}, E = {energy:.6g}", data=path.name))
            print(gp)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with flat dotted keys")
    common.add_argument("--gamma", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--lambda", dest="lambda", type=float, help="amplitude of g(z) = lambda / cosh z")
    common.add_argument("--grid.half-width", dest="grid.half_width", type=float)
    common.add_argument("--grid.points", dest="grid.points", type=int)
    common.add_argument("--solver.scheme", dest="solver.scheme", choices=["factorized", "direct"])
    common.add_argument("--solver.k-levels", dest="solver.k_levels", type=int)
    common.add_argument("--solver.tol", dest="solver.tol", type=float)
    common.add_argument("--zeromode.spacing", dest="zeromode.spacing", type=float)
    common.add_argument("--out", help="output directory (files are written only when given)")
    common.add_argument("--format", choices=["csv", "json"])

    parser = argparse.ArgumentParser(prog="spinshape", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("levels", parents=[common], help="closed-form levels and continuum threshold")
    sp = sub.add_parser("spectrum", parents=[common], help="numerical spectrum of the partner Hamiltonians")
    sp.add_argument("--plus", action="store_true", help="also compute the H+ sector")
    vp = sub.add_parser("verify", parents=[common], help="run the verification suite")
    vp.add_argument("--sabotage-printed-potential", action="store_true",
                    help="use the misprinted scalar constant gamma^2 + beta^2 (should fail)")
    wp = sub.add_parser("wavefunction", parents=[common], help="export a level's degenerate pair")
    wp.add_argument("--n", type=int, default=0)
    wp.add_argument("--member", choices=["1", "2", "both"], default="both")
    wp.add_argument("--gnuplot", action="store_true", help="write a gnuplot script next to each CSV")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    updates = {OVERRIDES[k]: v for k, v in vars(args).items() if k in OVERRIDES and v is not None}
    return cfg.with_updates(updates) if updates else cfg


COMMANDS = {"levels": cmd_levels, "spectrum": cmd_spectrum, "verify": cmd_verify, "wavefunction": cmd_wavefunction}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg, args)
    except NotABoundState as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
