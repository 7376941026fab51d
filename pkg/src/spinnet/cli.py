"""Command-line interface.

Subcommands::

    spinnet topology --unit node --config chain --n-units 4 [--dot F] [--json F]
    spinnet simulate --config cfg.json --out series.csv
    spinnet fit --in series.csv [--side upper] [--branch +] --out fit.json
    spinnet sweep --config sweep.json --out table.csv
    spinnet scaling --in table.csv --out powerlaw.json

File arguments accept "-" for stdout.  All file writes are atomic
(write to a temporary file, then rename).  Exit codes: 0 success,
2 config error, 3 numerical failure (non-convergence), 4 I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import tempfile

from .fitting import fit_envelope, fit_power_law
from .runner import (AveragedSeries, ExperimentConfig, envelope_from_series,
                     read_sweep_csv, run_experiment, run_sweep, sweep_to_csv)
from .topology import build_graph, export_dot

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class ConfigError(Exception):
    pass


class NumericalError(Exception):
    pass


def _write_atomic(path: str, text: str) -> None:
    """Write-then-rename, or stdout for '-'."""
    if path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".spinnet-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path: str) -> dict:
    with open(path) as f:
        text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _experiment_config(d: dict, source: str) -> ExperimentConfig:
    try:
        return ExperimentConfig.from_json_dict(d)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def _cmd_topology(args) -> int:
    try:
        graph = build_graph(args.unit, args.config, args.n_units,
                            args.triangle_rule, args.link_rule)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    wrote = False
    if args.dot:
        _write_atomic(args.dot, export_dot(graph))
        wrote = True
    if args.json:
        _write_atomic(args.json, graph.to_json() + "\n")
        wrote = True
    if not wrote:
        sys.stdout.write(graph.to_json() + "\n")
    return 0


def _cmd_simulate(args) -> int:
    cfg = _experiment_config(_load_json(args.config), args.config)
    series = run_experiment(cfg, workers=args.workers)
    buf = io.StringIO()
    series.to_csv(buf)
    _write_atomic(args.out, buf.getvalue())
    return 0


def _cmd_fit(args) -> int:
    try:
        with open(args.infile) as f:
            series = AveragedSeries.from_csv(f)
    except ValueError as exc:
        raise ConfigError(f"{args.infile}: {exc}") from exc
    try:
        points = envelope_from_series(series, side=args.side,
                                      observable=args.observable)
        fit = fit_envelope(points, branch=args.branch)
    except ValueError as exc:
        raise NumericalError(str(exc)) from exc
    _write_atomic(args.out, json.dumps(fit.to_json_dict(), indent=2) + "\n")
    if not fit.converged:
        print(f"fit did not converge (P_inf={fit.p_inf:.6g}, T2={fit.t2:.6g}); "
              f"parameters written to {args.out}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


def _cmd_sweep(args) -> int:
    spec = _load_json(args.config)
    extra = sorted(set(spec) - {"template", "axes"})
    if extra:
        raise ConfigError(f"{args.config}: unknown keys: {', '.join(extra)}")
    if "template" not in spec or "axes" not in spec:
        raise ConfigError(f"{args.config}: sweep config needs 'template' and 'axes'")
    template = _experiment_config(spec["template"], args.config)
    try:
        rows = run_sweep(template, spec["axes"], workers=args.workers)
    except ValueError as exc:
        raise ConfigError(f"{args.config}: {exc}") from exc
    for row in rows:
        if not row.completed:
            print(f"skipped L={row.L} sigma={row.sigma:g}: {row.reason}",
                  file=sys.stderr)
    buf = io.StringIO()
    sweep_to_csv(rows, buf)
    _write_atomic(args.out, buf.getvalue())
    return 0


def _cmd_scaling(args) -> int:
    try:
        with open(args.infile) as f:
            rows = read_sweep_csv(f)
    except ValueError as exc:
        raise ConfigError(f"{args.infile}: {exc}") from exc
    groups: dict[tuple, list] = {}
    for r in rows:
        key = (r["unit"], r["config"], r["sigma"], r["alpha_noise"])
        groups.setdefault(key, []).append((r["L"], r["T2"]))
    fits = []
    for (unit, config, sigma, alpha), pts in groups.items():
        try:
            fit = fit_power_law(pts)
        except ValueError as exc:
            raise ConfigError(
                f"{args.infile}: group unit={unit} config={config}: {exc}") from exc
        entry = {"unit": unit, "config": config, "sigma": sigma,
                 "alpha_noise": alpha}
        entry.update(fit.to_json_dict())
        fits.append(entry)
    _write_atomic(args.out, json.dumps({"fits": fits}, indent=2) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinnet",
        description="Decoherence of exchange-coupled spin-qubit networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("topology", help="build a qubit graph and export it")
    p.add_argument("--unit", required=True, choices=["node", "stick", "triangle"])
    p.add_argument("--config", required=True, choices=["chain", "ring", "tree"])
    p.add_argument("--n-units", required=True, type=int, dest="n_units")
    p.add_argument("--triangle-rule", default="linked", choices=["linked", "shared"],
                   dest="triangle_rule")
    p.add_argument("--link-rule", default="consecutive",
                   choices=["consecutive", "spine"], dest="link_rule")
    p.add_argument("--dot", help="write DOT text here ('-' for stdout)")
    p.add_argument("--json", help="write graph JSON here ('-' for stdout)")
    p.set_defaults(func=_cmd_topology)

    p = sub.add_parser("simulate", help="run a Monte-Carlo experiment")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", required=True, help="output series CSV")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="fit the decay envelope of a series CSV")
    p.add_argument("--in", required=True, dest="infile", help="series CSV")
    p.add_argument("--side", default="upper", choices=["upper", "lower"])
    p.add_argument("--branch", default="+", choices=["+", "-"])
    p.add_argument("--observable", default="P", choices=["P", "S"])
    p.add_argument("--out", required=True, help="output fit JSON")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("sweep", help="run a parameter sweep with envelope fits")
    p.add_argument("--config", required=True, help="sweep config JSON "
                   "({'template': {...}, 'axes': {'L': [...], ...}})")
    p.add_argument("--out", required=True, help="output table CSV")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("scaling", help="power-law fit of a sweep table")
    p.add_argument("--in", required=True, dest="infile", help="sweep table CSV")
    p.add_argument("--out", required=True, help="output power-law JSON")
    p.set_defaults(func=_cmd_scaling)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
