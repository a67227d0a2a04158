"""Command-line front end: ``fpsearch {schedule,search,sweep,noise,table1,spectral}``.

Settings are resolved as command-line flag, then the matching section of the
``--config`` INI file, then the built-in default. Custom problems live in
``[problem:NAME]`` sections::

    [problem:bowl]
    objective = (x1 - 0.5)^2 + x2^2
    box = -1,1; -1,1
    constraints = x1^2 + x2^2 <= 1
    epsilon = 0.1
"""

from __future__ import annotations

import argparse
import configparser
import sys

from . import __version__, experiments
from .io import render_csv, render_json, write_text
from .overlap import LowAcceptanceError
from .problems import custom_function, get_function
from .schedule import build_schedule
from .spectral import ModeGrid

DEFAULTS = {
    "schedule": {"q": 3, "delta": 0.1},
    "search": {"problem": "alpine02", "delta": 0.1, "epsilon": None, "method": "grid", "samples": 4_000_000,
               "resolution": 256, "refine": 6, "workers": 1},
    "sweep": {"problem": None, "lam": None, "delta": 0.1, "q_min": 1, "q_max": 100, "method": "grid",
              "samples": 4_000_000, "resolution": 256, "refine": 6},
    "noise": {"problem": "alpine02", "lam": None, "delta": 0.1, "depol": "0,0.005,0.01,0.02,0.03", "q_max": 100,
              "method": "grid", "samples": 4_000_000, "resolution": 256, "refine": 6},
    "table1": {"delta": 0.1, "resolution": 256, "refine": 6, "paper_values": True, "table_output": None},
    "spectral": {"terms": "1,2,0; 1,0,2", "window": "0,4", "n_points": 256, "x_max": 8.0, "input": "equal:4",
                 "delta": 0.1, "flag_levels": 4, "check_decomposition": False, "theta1": 0.3, "theta2": 0.2},
}
DEFAULT_FORMAT = {"schedule": "csv", "search": "json", "sweep": "csv", "noise": "csv", "table1": "csv",
                  "spectral": "json"}


class CommandError(Exception):
    pass


def _coerce(value, default):
    if isinstance(value, str) and default is not None and not isinstance(default, str):
        if isinstance(default, bool):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return type(default)(value)
    return value


def resolve(args, config) -> dict:
    section = config[args.command] if config.has_section(args.command) else {}
    out = {}
    for key, default in DEFAULTS[args.command].items():
        value = getattr(args, key, None)
        if value is None and key in section:
            value = _coerce(section[key], default)
        out[key] = default if value is None else value
    out["seed"] = args.seed if args.seed is not None else int(config.get("global", "seed", fallback=0))
    return out


def load_config(path) -> configparser.ConfigParser:
    config = configparser.ConfigParser()
    if path:
        read = config.read(path)
        if not read:
            raise CommandError(f"cannot read config file {path}")
    return config


def lookup_function(name, config, epsilon=None):
    section = f"problem:{name}"
    if config.has_section(section):
        sec = config[section]
        box = [tuple(float(v) for v in part.split(",")) for part in sec["box"].split(";")]
        cons = [c.strip() for c in sec.get("constraints", "").split(";") if c.strip()]
        fn = custom_function(name, sec["objective"], box, cons, float(sec.get("epsilon", 0.1)))
    else:
        try:
            fn = get_function(name)
        except KeyError as exc:
            raise CommandError(str(exc)) from None
    if epsilon is not None:
        fn.epsilon = float(epsilon)
    return fn


def _lambda_for(cfg, config):
    if cfg.get("lam") is not None:
        return float(cfg["lam"]), None
    if not cfg.get("problem"):
        raise CommandError("give --problem or --lambda")
    fn = lookup_function(cfg["problem"], config)
    est = experiments.estimate_lambda(fn, cfg["method"], cfg["samples"], cfg["seed"], cfg["resolution"],
                                      cfg["refine"])
    if est.lam <= 0:
        raise CommandError(f"{fn.name}: no target region found")
    return est.lam, est


def _flat(meta):
    out = {k: v for k, v in meta.items() if k != "config"}
    out.update({f"config.{k}": v for k, v in meta.get("config", {}).items()})
    return out


def _emit(fmt, columns, rows, meta, path):
    if fmt == "csv":
        text = render_csv(columns, rows, _flat(meta))
    else:
        text = render_json({**meta, "columns": columns, "rows": [list(r) for r in rows]})
    write_text(text, path)


def _emit_record(fmt, record, meta, path):
    if fmt == "json":
        text = render_json({**meta, "result": record})
    else:
        flat = {k: v for k, v in record.items() if not isinstance(v, (dict, list))}
        text = render_csv(list(flat), [list(flat.values())], _flat(meta))
    write_text(text, path)


def _meta(command, cfg):
    return {"tool": "fpsearch", "version": __version__, "command": command, "config": dict(cfg)}


def cmd_schedule(cfg, config, fmt, out):
    sched = build_schedule(int(cfg["q"]), float(cfg["delta"]))
    rows = [(j + 1, float(a), float(b)) for j, (a, b) in enumerate(sched)]
    _emit(fmt, ["j", "alpha", "beta"], rows, _meta("schedule", cfg), out)


def cmd_search(cfg, config, fmt, out):
    fn = lookup_function(cfg["problem"], config, cfg["epsilon"])
    try:
        est = experiments.estimate_lambda(fn, cfg["method"], cfg["samples"], cfg["seed"], cfg["resolution"],
                                          cfg["refine"], cfg["workers"])
    except LowAcceptanceError as exc:
        raise CommandError(str(exc)) from None
    summary = experiments.search_summary(est.lam, cfg["delta"])
    record = {"problem": fn.name, **est.to_record(), **summary}
    _emit_record(fmt, record, _meta("search", cfg), out)


def cmd_sweep(cfg, config, fmt, out):
    lam, _ = _lambda_for(cfg, config)
    rows = experiments.sweep_table(lam, cfg["delta"], int(cfg["q_min"]), int(cfg["q_max"]))
    meta = _meta("sweep", cfg)
    meta["lambda"] = lam
    _emit(fmt, ["q", "p_fixed", "p_naive"], rows, meta, out)


def cmd_noise(cfg, config, fmt, out):
    lam, _ = _lambda_for(cfg, config)
    depols = [float(v) for v in str(cfg["depol"]).split(",")]
    rows = experiments.noise_table(lam, cfg["delta"], depols, int(cfg["q_max"]))
    meta = _meta("noise", cfg)
    meta["lambda"] = lam
    _emit(fmt, ["depol", "q", "p"], rows, meta, out)


TABLE1_COLUMNS = ["function", "lambda", "quantum_q", "predicted_q", "lower_bound", "classical"]
TABLE1_PAPER_COLUMNS = ["paper_quantum", "quantum_dev", "paper_classical", "classical_dev"]


def cmd_table1(cfg, config, fmt, out):
    rows = experiments.table1_rows(cfg["delta"], int(cfg["resolution"]), int(cfg["refine"]))
    columns = TABLE1_COLUMNS + (TABLE1_PAPER_COLUMNS if cfg["paper_values"] else [])
    for row in rows:
        if row["quantum_q"] is None:
            print(f"note: {row['function']}: no target region found", file=sys.stderr)
    _emit(fmt, columns, [[r.get(c) for c in columns] for r in rows], _meta("table1", cfg), out)
    table = experiments.format_table(rows)
    if cfg["table_output"]:
        write_text(table, cfg["table_output"])
    elif out:
        sys.stdout.write(table)


def _parse_terms(text):
    terms = []
    for part in str(text).split(";"):
        if part.strip():
            c, a, b = part.split(",")
            terms.append((float(c), int(a), int(b)))
    return terms


def cmd_spectral(cfg, config, fmt, out):
    terms = _parse_terms(cfg["terms"])
    window = tuple(float(v) for v in str(cfg["window"]).split(","))
    grid = ModeGrid(int(cfg["n_points"]), float(cfg["x_max"]))
    decomposition = (float(cfg["theta1"]), float(cfg["theta2"])) if cfg["check_decomposition"] else None
    record = experiments.spectral_record(terms, window, grid, cfg["input"], cfg["delta"], int(cfg["flag_levels"]),
                                         decomposition)
    _emit_record(fmt, record, _meta("spectral", cfg), out)


COMMANDS = {"schedule": cmd_schedule, "search": cmd_search, "sweep": cmd_sweep, "noise": cmd_noise,
            "table1": cmd_table1, "spectral": cmd_spectral}


def _global_flags(parser, default):
    parser.add_argument("--seed", type=int, default=default, help="64-bit seed for Monte Carlo sampling")
    parser.add_argument("--output", "-o", default=default, help="output path (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json"], default=default)
    parser.add_argument("--config", default=default, help="INI file with per-command sections")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpsearch", description="Fixed-point continuous quantum search simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, None)
    # global flags are also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", parents=[common], help="fixed-point phase table")
    p.add_argument("--q", type=int)
    p.add_argument("--delta", type=float)

    def lam_source(p):
        p.add_argument("--problem")
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--method", choices=["grid", "mc"])
        p.add_argument("--samples", type=int)
        p.add_argument("--resolution", type=int)
        p.add_argument("--refine", type=int)

    p = sub.add_parser("search", parents=[common], help="overlap estimate and query counts for one problem")
    p.add_argument("--problem")
    p.add_argument("--delta", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--method", choices=["grid", "mc"])
    p.add_argument("--samples", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--refine", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("sweep", parents=[common], help="fixed-point vs naive success per q")
    lam_source(p)
    p.add_argument("--delta", type=float)
    p.add_argument("--q-min", type=int)
    p.add_argument("--q-max", type=int)

    p = sub.add_parser("noise", parents=[common], help="success per q under depolarizing noise")
    lam_source(p)
    p.add_argument("--delta", type=float)
    p.add_argument("--depol", help="comma-separated depolarizing probabilities")
    p.add_argument("--q-max", type=int)

    p = sub.add_parser("table1", parents=[common], help="reproduce the benchmark table")
    p.add_argument("--delta", type=float)
    p.add_argument("--resolution", type=int)
    p.add_argument("--refine", type=int)
    p.add_argument("--paper-values", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--table-output", help="where to write the formatted text table")

    p = sub.add_parser("spectral", parents=[common], help="eigenvalue-window search on a discretized poly(x, p)")
    p.add_argument("--terms", help="'c,a,b; ...' for c * x^a p^b (Weyl ordered)")
    p.add_argument("--window", help="a,b")
    p.add_argument("--n-points", type=int)
    p.add_argument("--x-max", type=float)
    p.add_argument("--input", help="equal:K or gaussian:center,width")
    p.add_argument("--delta", type=float)
    p.add_argument("--flag-levels", type=int)
    p.add_argument("--check-decomposition", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--theta1", type=float)
    p.add_argument("--theta2", type=float)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        cfg = resolve(args, config)
        fmt = args.format or DEFAULT_FORMAT[args.command]
        COMMANDS[args.command](cfg, config, fmt, args.output)
    except (CommandError, ValueError, OSError) as exc:
        print(f"fpsearch {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
