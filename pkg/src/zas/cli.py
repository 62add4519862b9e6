"""Command-line front end.

Exit codes: 0 success, 1 computation error, 2 invalid input, 3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import experiments, report, verify
from .errors import InvalidSpec, ParseError, ValidationError, ZasError
from .geometry import adm_mass, classify_zas, omae_radius, slice_report
from .models import build, load_profile, parse_model
from .numeric import QUAD_RTOL

EXIT_OK, EXIT_COMPUTE, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2, 3
FORMATS = ("csv", "json", "svg")


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: Optional[str]
    profile: Optional[Path]
    output_dir: Optional[Path]
    formats: tuple
    tol: float
    seed: int
    steps: Optional[int]


def _formats(text: str) -> tuple:
    fs = tuple(f.strip() for f in text.split(",") if f.strip())
    bad = [f for f in fs if f not in FORMATS]
    if bad:
        raise InputError(f"unknown format(s) {bad}; choose from {FORMATS}")
    return fs


def make_config(ns) -> RunConfig:
    if not (1e-12 <= ns.tol <= 1e-3):
        raise InputError(f"--tol must lie in [1e-12, 1e-3], got {ns.tol}")
    out = Path(ns.out) if ns.out else None
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise InputError(f"cannot create output directory {out}: {exc.strerror}") from exc
    return RunConfig(ns.command, ns.model, Path(ns.profile) if ns.profile else None, out,
                     _formats(ns.format), ns.tol, ns.seed, ns.steps)


def _profile(cfg: RunConfig):
    if cfg.profile is not None:
        return load_profile(cfg.profile), None
    if not cfg.model:
        raise InputError("give --model or --profile")
    model = build(parse_model(cfg.model))
    return model.profile, model


def _emit(cfg: RunConfig, stem: str, header, rows, payload, svg: Optional[str] = None):
    if cfg.output_dir is None:
        return []
    written = []
    if "csv" in cfg.formats and header is not None:
        written.append(report.write_text(cfg.output_dir / f"{stem}.csv", report.csv_text(header, rows)))
    if "json" in cfg.formats:
        written.append(report.write_text(cfg.output_dir / f"{stem}.json", report.json_text(payload)))
    if "svg" in cfg.formats and svg is not None:
        written.append(report.write_text(cfg.output_dir / f"{stem}.svg", svg))
    return written


def _yn(flag):
    return "yes" if flag else "no"


# ---------------------------------------------------------------------------
# commands


def cmd_classify(cfg: RunConfig, out) -> int:
    p, _ = _profile(cfg)
    rep = classify_zas(p, cfg.tol)
    print(f"profile: {p.name}", file=out)
    print(f"capacity: {rep.capacity_sign} ({rep.capacity:.10g})", file=out)
    print(f"mass: {rep.mass}", file=out)
    kind = "declared" if rep.exponent_declared else "estimated"
    print(f"origin exponent: {rep.origin_exponent:.10g} ({kind})", file=out)
    print(f"leading area coefficient: {rep.leading_coefficient:.10g}", file=out)
    print(f"regular: {_yn(rep.regular)}", file=out)
    slope = "n/a" if rep.log_slope is None else f"{rep.log_slope:.3e}"
    print(f"harmonically regular: {_yn(rep.harmonically_regular)} (log slope {slope})", file=out)
    print(f"removable: {_yn(rep.removable)}", file=out)
    header = ("capacity_sign", "capacity", "mass", "regular", "harmonically_regular", "removable",
              "origin_exponent", "log_slope")
    row = (rep.capacity_sign, rep.capacity, rep.mass, rep.regular, rep.harmonically_regular,
           rep.removable, rep.origin_exponent, rep.log_slope)
    _emit(cfg, "classify", header, [row], {"profile": p.name, "report": rep})
    return EXIT_OK


def cmd_report(cfg: RunConfig, out) -> int:
    p, _ = _profile(cfg)
    steps = cfg.steps or 20
    rhos = [float(r) for r in np.geomspace(1e-3, 10.0, steps)]
    rows = []
    for rho in rhos:
        s = slice_report(p, rho, cfg.tol)
        rows.append((s.rho, s.area, s.mean_curvature, s.hawking_mass, s.slice_capacity, s.slice_reg_mass))
    header = ("rho", "area", "mean_curvature", "hawking_mass", "capacity", "reg_mass")
    summary = {"profile": p.name, "adm_mass": adm_mass(p), "omae_radius": omae_radius(p)}
    if p.is_zas:
        summary["zas"] = classify_zas(p, cfg.tol)
    print(report.csv_text(header, rows), end="", file=out)
    print(f"adm mass: {summary['adm_mass']:.10g}", file=out)
    print(f"outermost minimizing sphere at arclength {summary['omae_radius']:.10g}", file=out)
    if p.is_zas:
        print(f"ZAS mass: {summary['zas'].mass}", file=out)
    summary["slices"] = [dict(zip(header, r)) for r in rows]
    _emit(cfg, "report", header, rows, summary)
    return EXIT_OK


def cmd_table2(cfg: RunConfig, out) -> int:
    rows = []
    for alpha in experiments.TABLE2_ALPHAS:
        try:
            rows.append(experiments.table2_row(alpha, cfg.tol))
        except ZasError as exc:
            raise ZasError(f"power-law row alpha={alpha:.6g}: {exc}") from exc
    cells = [r.cells() for r in rows]
    print(report.csv_text(experiments.TABLE2_HEADER, cells), end="", file=out)
    _emit(cfg, "table2", experiments.TABLE2_HEADER, cells,
          {"rows": [dict(zip(experiments.TABLE2_HEADER, c)) for c in cells]})
    return EXIT_OK if all(r.matches for r in rows) else EXIT_VERIFY


def cmd_cylinder_sweep(cfg: RunConfig, out, mbar: float, L_max: float) -> int:
    steps = cfg.steps or 41
    if steps < 2:
        raise InputError("--steps must be at least 2")
    if not (mbar > 0 and L_max > 0):
        raise InputError("--mbar and --L-max must be positive")
    rows = experiments.cylinder_sweep(mbar, L_max, steps)
    print(report.csv_text(experiments.CYLINDER_HEADER, rows), end="", file=out)
    Ls = [r[0] for r in rows]
    svg = report.svg_line_chart(
        {"ADM mass m": (Ls, [r[1] for r in rows]), "ZAS mass": (Ls, [r[2] for r in rows])},
        f"ADM and ZAS mass, mbar = {mbar:g}", "cylinder length L", "mass")
    _emit(cfg, "cylinder_sweep", experiments.CYLINDER_HEADER, rows,
          {"mbar": mbar, "rows": [dict(zip(experiments.CYLINDER_HEADER, r)) for r in rows]}, svg)
    return EXIT_OK if all(r[3] for r in rows) else EXIT_VERIFY


def cmd_counterexample(cfg: RunConfig, out, eps_list) -> int:
    if any(not e > 0 for e in eps_list):
        raise InputError("eps values must be positive")
    rows = experiments.counterexample(eps_list)
    print(report.csv_text(experiments.COUNTER_HEADER, rows), end="", file=out)
    _emit(cfg, "counterexample", experiments.COUNTER_HEADER, rows,
          {"rows": [dict(zip(experiments.COUNTER_HEADER, r)) for r in rows]})
    return EXIT_OK if all(r[3] == r[4] for r in rows) else EXIT_VERIFY


def cmd_verify(cfg: RunConfig, out, scope: str) -> int:
    if scope != "all" and scope not in verify.MODULES:
        raise InputError(f"unknown scope {scope!r}")
    summary = verify.run(scope, cfg.tol, cfg.seed)
    text = report.json_text(summary)
    print(text, end="", file=out)
    if cfg.output_dir is not None:
        report.write_text(cfg.output_dir / "verify.json", text)
    return EXIT_OK if summary["passed"] else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="e.g. schwarzschild:m=-2, power_law_zas:alpha=4/3")
    common.add_argument("--profile", help="JSON profile file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", default="csv,json,svg", help="comma list from csv,json,svg")
    common.add_argument("--tol", type=float, default=QUAD_RTOL, help="quadrature tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--steps", type=int)

    parser = argparse.ArgumentParser(prog="zas", description="Zero area singularity calculator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="classify the inner boundary")
    sub.add_parser("report", parents=[common], help="slice quantities and masses")
    sub.add_parser("table2", parents=[common], help="power-law table")
    sw = sub.add_parser("cylinder-sweep", parents=[common], help="masses against cylinder length")
    sw.add_argument("--mbar", type=float, default=1.0)
    sw.add_argument("--L-max", dest="L_max", type=float, default=10.0)
    ce = sub.add_parser("counterexample", parents=[common], help="minimal-boundary conformal factor")
    ce.add_argument("--eps", default="0.1,0.5,0.8,0.9,1.0")
    ve = sub.add_parser("verify", parents=[common], help="run invariant suites")
    ve.add_argument("--scope", default="all")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        cfg = make_config(ns)
        if cfg.command == "classify":
            return cmd_classify(cfg, out)
        if cfg.command == "report":
            return cmd_report(cfg, out)
        if cfg.command == "table2":
            return cmd_table2(cfg, out)
        if cfg.command == "cylinder-sweep":
            return cmd_cylinder_sweep(cfg, out, ns.mbar, ns.L_max)
        if cfg.command == "counterexample":
            try:
                eps = [float(x) for x in ns.eps.split(",") if x.strip()]
            except ValueError as exc:
                raise InputError(f"bad --eps list {ns.eps!r}") from exc
            return cmd_counterexample(cfg, out, eps)
        return cmd_verify(cfg, out, ns.scope)
    except ValidationError as exc:
        print(f"error: invalid profile, violated invariant {exc.invariant}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, InvalidSpec, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ZasError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
