"""Command-line front end.

Subcommands: ``curvature`` (pointwise dashboard), ``sweep`` (a quantity
along a t grid), ``verify`` (registered identity checks) and
``lambda-star`` (the Ricci-flat Hopf parameter).

Exit codes: 0 success, 1 failed checks, 2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from . import gauduchon as gd
from . import models
from .chern import package_from_jet
from .errors import ConfigError, ConsistencyFailure, HermcurvError
from .jets import evaluate_jet
from .metric_dsl import expression_field, parse_metric_file
from .report import FORMATS, SweepTable, emit_report, exit_code, _plain
from .suites import SUITES, SuiteConfig, run_verification_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
QUANTITIES = ("ric1_norm", "scal", "scal_tilde", "hsc_min", "hsc_max", "torsion_norm")
MAX_GRID = 10_000
HSC_DIRECTIONS = 32


# -- argument parsing helpers -------------------------------------------------------


def parse_point(text: str) -> np.ndarray:
    """``"1+2j,0.5"`` -> complex array; ``i`` is accepted for the imaginary unit."""
    try:
        parts = [s.strip().replace(" ", "") for s in text.split(",")]
        vals = [complex(p.replace("i", "j")) for p in parts if p]
    except ValueError:
        raise ConfigError(f"cannot parse point {text!r}; expected z1,...,zn with complex entries like 1+2j") from None
    if not vals or len(vals) != len(parts):
        raise ConfigError(f"cannot parse point {text!r}")
    return np.array(vals)


def parse_t(text: str) -> float:
    if text in gd.PRESETS:
        return gd.PRESETS[text]
    try:
        if "/" in text:
            a, b = text.split("/")
            t = float(a) / float(b)
        else:
            t = float(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot parse t = {text!r}; give a number, a fraction or one of {sorted(gd.PRESETS)}") from None
    if not np.isfinite(t):
        raise ConfigError("t must be finite")
    return t


def parse_range(text: str) -> list:
    """``a:b:step`` inclusive of ``b`` up to rounding."""
    try:
        a, b, step = (parse_t(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"t range must look like a:b:step, got {text!r}") from None
    if step <= 0:
        raise ConfigError("t range step must be positive")
    if b < a:
        raise ConfigError("t range end is below its start")
    count = int(np.floor((b - a) / step + 1e-9)) + 1
    if count > MAX_GRID:
        raise ConfigError(f"t range has {count} values; the limit is {MAX_GRID}")
    # round away accumulated binary noise so 1/3-style grids print cleanly
    return [float(np.round(a + k * step, 12)) for k in range(count)]


def _spec(args) -> models.ModelSpec:
    n = args.n
    if args.model == "iwasawa" and n is None:
        n = 3
    spec = models.ModelSpec(
        args.model,
        n=2 if n is None else n,
        lam=args.lam,
        degree=args.degree,
        amplitude=args.amplitude,
        seed=args.model_seed,
    )
    try:
        return models.validate_spec(spec)
    except HermcurvError as exc:
        raise ConfigError(str(exc)) from None


def _field(args):
    if getattr(args, "metric_file", None):
        try:
            expr = parse_metric_file(args.metric_file)
        except OSError as exc:
            raise ConfigError(f"cannot read metric file: {exc}") from None
        return expression_field(expr, name=str(args.metric_file)), None
    if args.model is None:
        raise ConfigError("give --model or --metric-file")
    spec = _spec(args)
    return models.builtin(spec), spec


# -- curvature dashboard --------------------------------------------------------------


def curvature_dashboard(field_, point, t: float, order: int = 2, directions: int = HSC_DIRECTIONS, seed: int = 0) -> dict:
    """Pointwise summary of the t-Gauduchon curvature at ``point``."""
    if order not in (2, 3):
        raise ConfigError("--order must be 2 or 3")
    if len(point) != field_.n:
        raise ConfigError(f"point has {len(point)} coordinates but the metric has n = {field_.n}")
    pkg = package_from_jet(evaluate_jet(field_, point, order))
    ric = gd.gauduchon_ricci(t, pkg, tol=None)
    scal, scal_tilde = gd.gauduchon_scalars(t, pkg, tol=None)
    ext = gd.hsc_extrema(t, field_, [point], directions=directions, seed=seed)
    chern = gd.hsc_extrema(1.0, field_, [point], directions=directions, seed=seed)
    return {
        "schema_version": "1.0",
        "kind": "curvature",
        "tool_version": __version__,
        "metric": field_.name,
        "n": field_.n,
        "point": _plain(list(point)),
        "t": t,
        "metric_matrix": _plain(pkg.g),
        "kaehler": bool(pkg.normT2 <= 1e-20),
        "torsion_norm2": pkg.normT2,
        "tau_norm2": pkg.normTau2,
        "connection_torsion_norm2": gd.torsion_norm(t, pkg.jet),
        "ricci": {f"ric{k + 1}": _plain(r) for k, r in enumerate(ric.riccis)},
        "ricci_route_residual": ric.worst_residual,
        "scal": scal,
        "scal_tilde": scal_tilde,
        "chern_scal": float(pkg.scal),
        "chern_scal_tilde": float(pkg.scal_tilde),
        "hsc_min_estimate": ext.minimum,
        "hsc_max_estimate": ext.maximum,
        "chern_hsc_min_estimate": chern.minimum,
        "chern_hsc_max_estimate": chern.maximum,
    }


def _dashboard_text(d: dict) -> str:
    lines = [f"{d['metric']} at z = {', '.join(f'{complex(*p):.6g}' for p in d['point'])}, t = {d['t']:.6g}"]
    lines.append(f"  Kaehler at this point: {'yes' if d['kaehler'] else 'no'}")
    for key in ("torsion_norm2", "tau_norm2", "connection_torsion_norm2", "scal", "scal_tilde",
                "hsc_min_estimate", "hsc_max_estimate", "ricci_route_residual"):
        lines.append(f"  {key:26s} {d[key]:.12g}")
    for name, m in d["ricci"].items():
        lines.append(f"  {name}:")
        for row in m:
            lines.append("    " + "  ".join(f"{complex(*x):+.6e}" for x in row))
    return "\n".join(lines) + "\n"


# -- sweep ---------------------------------------------------------------------------------------


def _point_value(quantity: str, t: float, pkg, field_, point, seed: int) -> float:
    if quantity == "ric1_norm":
        return float(np.linalg.norm(gd.gauduchon_ricci(t, pkg, tol=None).ricci1))
    if quantity == "scal":
        return gd.gauduchon_scalars(t, pkg, tol=None)[0]
    if quantity == "scal_tilde":
        return gd.gauduchon_scalars(t, pkg, tol=None)[1]
    if quantity == "torsion_norm":
        return gd.torsion_norm(t, pkg.jet)
    ext = gd.hsc_extrema(t, field_, [point], directions=HSC_DIRECTIONS, seed=seed)
    return ext.minimum if quantity == "hsc_min" else ext.maximum


def sweep(field_, quantity: str, ts, points, seed: int = 0, model: str | None = None) -> SweepTable:
    """Evaluate ``quantity`` at every t of ``ts`` and every point.

    The per-t value is the minimum over points for ``hsc_min``, the maximum
    for ``hsc_max`` and the mean otherwise.
    """
    if quantity not in QUANTITIES:
        raise ConfigError(f"unknown quantity {quantity!r}; choose from {', '.join(QUANTITIES)}")
    ts = [float(t) for t in ts]
    pkgs = [package_from_jet(evaluate_jet(field_, p, 2)) for p in points]
    per_point = [[_point_value(quantity, t, pkg, field_, p, seed) for pkg, p in zip(pkgs, points)] for t in ts]
    reduce = {"hsc_min": min, "hsc_max": max}.get(quantity, lambda xs: float(np.mean(xs)))
    values = [reduce(row) for row in per_point]
    return SweepTable(model or field_.name, quantity, ts, values, per_point)


def _sweep_points(field_, spec, args) -> list:
    if args.point:
        return [parse_point(p) for p in args.point]
    if spec is None:
        raise ConfigError("--metric-file sweeps need explicit --point values")
    return models.sample_points(spec, args.points, args.seed)


# -- subcommands -----------------------------------------------------------------------------


def cmd_curvature(args) -> int:
    field_, _ = _field(args)
    point = parse_point(args.point)
    d = curvature_dashboard(field_, point, parse_t(args.t), args.order, seed=args.seed)
    text = json.dumps(d, indent=2, allow_nan=False) + "\n" if args.format == "json" else _dashboard_text(d)
    _write(text, args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    field_, spec = _field(args)
    if args.points < 1:
        raise ConfigError("--points must be at least 1")
    ts = parse_range(args.t_range)
    label = args.model if spec is not None else field_.name
    table = sweep(field_, args.quantity, ts, _sweep_points(field_, spec, args), args.seed, label)
    emit_report(table, args.format, args.output, stable=True)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = SuiteConfig(seed=args.seed, tol_scale=args.tol, points=args.points, workers=args.workers)
    names = "all" if args.suite == ["all"] else args.suite
    report = run_verification_suite(names, cfg)
    emit_report(report, args.format, args.output, stable=args.stable_output)
    return exit_code(report)


def cmd_lambda_star(args) -> int:
    t = parse_t(args.t)
    lam = models.hopf_ricci_flat_lambda(t, args.n)
    if args.format == "json":
        _write(json.dumps({"t": t, "n": args.n, "lambda_star": lam}) + "\n", None)
    else:
        _write(f"{lam!r}\n", None)
    return EXIT_OK


def _write(text: str, destination) -> None:
    if destination is None or destination == "-":
        sys.stdout.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {destination}: {exc}") from None


def _model_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=models.MODEL_NAMES)
    p.add_argument("--metric-file", help="metric-language file used instead of --model")
    p.add_argument("--n", type=int, help="complex dimension (default 2, iwasawa 3)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0, help="hopf_lambda parameter")
    p.add_argument("--degree", type=int, default=2, help="random_poly degree")
    p.add_argument("--amplitude", type=float, default=0.3, help="random_poly perturbation size")
    p.add_argument("--model-seed", type=int, default=0, help="random_poly coefficient seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hermcurv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curvature", help="curvature dashboard at one point")
    _model_options(p)
    p.add_argument("--point", required=True, help="z1,...,zn (complex entries like 1+2j)")
    p.add_argument("--t", required=True, help="Gauduchon parameter: number, fraction or preset name")
    p.add_argument("--order", type=int, default=2, help="jet order (2 or 3)")
    p.add_argument("--seed", type=int, default=0, help="seed for the HSC direction sampling")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--output", help="file to write instead of stdout")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("sweep", help="one quantity along a t grid")
    _model_options(p)
    p.add_argument("--quantity", required=True, choices=QUANTITIES)
    p.add_argument("--t-range", required=True, help="a:b:step")
    p.add_argument("--points", type=int, default=5, help="number of sampled chart points")
    p.add_argument("--point", action="append", help="explicit point (repeatable); overrides sampling")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", nargs="+", default=["all"], choices=["all", *SUITES], metavar="NAME",
                   help=f"'all' or any of: {', '.join(SUITES)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1.0, help="scale factor applied to every residual tolerance")
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--stable-output", action="store_true", help="omit timestamps and timings")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lambda-star", help="lambda with ^tRic1 = 0 on the Hopf family")
    p.add_argument("--t", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_lambda_star)
    return parser


_VALUE_OPTIONS = ("--t", "--t-range", "--point", "--lambda")


def _attach_values(argv: list) -> list:
    """Rewrite ``--t -1`` as ``--t=-1`` so negative values are not read as flags."""
    out, k = [], 0
    while k < len(argv):
        if argv[k] in _VALUE_OPTIONS and k + 1 < len(argv):
            out.append(f"{argv[k]}={argv[k + 1]}")
            k += 2
        else:
            out.append(argv[k])
            k += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_attach_values(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except ConsistencyFailure as exc:
        print(f"hermcurv: consistency failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except HermcurvError as exc:
        print(f"hermcurv: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
