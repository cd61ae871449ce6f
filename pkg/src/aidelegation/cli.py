"""Command-line interface.

Subcommands: evaluate, policy, classify, sweep, simulate, estimate.

Parameters come from flags or from a JSON file passed with ``--config`` whose
keys mirror the flag names (``{"alpha": 0.6, "v": 0.5}``); flags win. The
default output format can be set with ``AIDELEGATION_FORMAT``.

Exit codes: 0 success, 2 invalid parameters, 3 I/O or ingestion failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from . import __version__, core, estimator, simulator, sweep
from .core import DelegationParams, Mode
from .errors import (
    ConfigError,
    DelegationError,
    IngestionError,
    MissingParameterError,
    ParameterDomainError,
)

FORMAT_ENV = "AIDELEGATION_FORMAT"
FORMATS = ("json", "csv", "table")

EXIT_OK = 0
EXIT_PARAMS = 2
EXIT_IO = 3

_DEFAULTS = {"gain": 1.0, "loss": -1.0, "confidence": 0.95, "stance": "point", "workers": 1}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_PARAMS)


def _add_common(p: argparse.ArgumentParser, *, alpha: bool = True, beta: bool = True) -> None:
    if alpha:
        p.add_argument("--alpha", type=float, help="accuracy of query generation, in (0, 1)")
    if beta:
        p.add_argument("--beta", type=float, help="validation effectiveness, in (0, 1)")
    p.add_argument("--v", type=float, help="delayed profit through the data engineer")
    p.add_argument("--gain", type=float, help="payoff of acting on a correct KPI (default 1)")
    p.add_argument("--loss", type=float, help="payoff of acting on an incorrect KPI (default -1)")
    p.add_argument("--config", type=Path, help="JSON file with parameter values; flags override")
    p.add_argument("--format", choices=FORMATS, help=f"output format (default json, or ${FORMAT_ENV})")
    p.add_argument("--output", type=Path, help="write output here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aidelegation", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", help="expected values, thresholds and condition booleans")
    _add_common(p)
    p = sub.add_parser("policy", help="choose between engineer, PS and FS")
    _add_common(p)
    p = sub.add_parser("classify", help="region label of a parameter point")
    _add_common(p)

    p = sub.add_parser("sweep", help="region grid or boundary curves")
    _add_common(p, alpha=False, beta=False)
    p.add_argument("--alpha", dest="alpha_range", help="alpha grid as start:stop:steps")
    p.add_argument("--beta", dest="beta_range", help="beta grid as start:stop:steps")
    p.add_argument("--curves", action="store_true", default=None, help="emit boundary curves instead")
    p.add_argument("--samples", type=int, help="number of alphas for --curves (default 99)")

    p = sub.add_parser("simulate", help="Monte Carlo run compared with the analytic model")
    _add_common(p)
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="required; there is no implicit entropy")
    p.add_argument("--workers", type=int, help="threads to use; does not change the output")
    p.add_argument("--timing", action="store_true", default=None, help="include elapsed time")

    p = sub.add_parser("estimate", help="estimate alpha/beta from a trial log and decide")
    _add_common(p, alpha=False, beta=False)
    p.add_argument("--log", type=Path, help="JSON Lines (or .csv) trial log")
    p.add_argument("--confidence", type=float, help="interval confidence level (default 0.95)")
    p.add_argument("--stance", choices=[s.value for s in estimator.Stance])
    return parser


def _load_config(path: Optional[Path]) -> dict:
    if path is None:
        return {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestionError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _merge(args: argparse.Namespace) -> dict:
    cfg = _load_config(args.config)
    if args.command == "sweep":
        for key in ("alpha", "beta"):
            if key in cfg:
                cfg[f"{key}_range"] = cfg.pop(key)
    known = set(vars(args)) - {"command", "config"}
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown config key(s) for {args.command}: {', '.join(sorted(unknown))}")
    merged = dict(_DEFAULTS)
    merged.update(cfg)
    merged.update({k: v for k, v in vars(args).items() if v is not None})
    return merged


def _need(opts: dict, key: str, flag: Optional[str] = None) -> Any:
    if opts.get(key) is None:
        raise MissingParameterError(f"missing required parameter {flag or '--' + key}")
    return opts[key]


def _params(opts: dict, need_beta: bool = False) -> DelegationParams:
    alpha = _need(opts, "alpha")
    v = _need(opts, "v")
    if need_beta:
        _need(opts, "beta")
    return DelegationParams(alpha, opts.get("beta"), v, opts["gain"], opts["loss"])


def cmd_evaluate(opts: dict) -> dict:
    params = _params(opts)
    a, v, g, l = params.alpha, params.v, params.gain, params.loss
    conditions, on_boundary = core.evaluate_conditions(params)
    has_beta = params.beta is not None
    bs = core.beta_star(a, v, g, l)
    return {
        "command": "evaluate",
        "params": params.as_dict(),
        "e_engineer": v,
        "e_ps": core.expected_value_ps(params),
        "e_fs": core.expected_value_fs(params) if has_beta else None,
        "thresholds": {
            "alpha_star_ps": core.alpha_star_ps(v, g, l),
            "alpha_star_fs": core.alpha_star_fs(v, g),
            "beta_star": core.beta_star_raw(a, v, g, l),
            "beta_star_feasible": bs is not core.INFEASIBLE,
            "beta_double_star": core.beta_double_star(a, g, l),
        },
        "conditions": {k: conditions.get(k) for k in ("eq1", "eq2", "eq3", "eq4")},
        "on_boundary": on_boundary,
    }


def cmd_policy(opts: dict) -> dict:
    decision = core.decide_policy(_params(opts))
    out = {"command": "policy"}
    out.update(decision.as_dict())
    return out


def cmd_classify(opts: dict) -> dict:
    params = _params(opts)
    label = core.classify_region(params)
    return {"command": "classify", "params": params.as_dict(), **label.as_dict()}


def cmd_sweep(opts: dict) -> dict:
    v = _need(opts, "v")
    if opts.get("curves"):
        table = sweep.boundary_curves(v, opts["gain"], opts["loss"], opts.get("samples") or 99)
        return {"command": "sweep", "kind": "curves", **table.as_dict()}
    spec = sweep.GridSpec(
        alpha_range=sweep.AxisRange.parse(str(_need(opts, "alpha_range", "--alpha"))),
        beta_range=sweep.AxisRange.parse(str(_need(opts, "beta_range", "--beta"))),
        v=v,
        gain=opts["gain"],
        loss=opts["loss"],
    )
    return {
        "command": "sweep",
        "kind": "grid",
        "v": float(v),
        "gain": float(opts["gain"]),
        "loss": float(opts["loss"]),
        "alpha_range": str(spec.alpha_range),
        "beta_range": str(spec.beta_range),
        "cells": [cell.as_dict() for cell in sweep.region_grid(spec)],
    }


def cmd_simulate(opts: dict) -> dict:
    mode = Mode(_need(opts, "mode"))
    seed = _need(opts, "seed")
    trials = _need(opts, "trials")
    params = _params(opts, need_beta=mode is Mode.FS)
    config = simulator.SimulationConfig(params, mode, trials, seed)
    result = simulator.simulate(config, workers=opts["workers"])
    out = {"command": "simulate"}
    out.update(result.as_dict(include_elapsed=bool(opts.get("timing"))))
    out["comparison"] = simulator.compare_to_analytic(result).as_dict()
    return out


def cmd_estimate(opts: dict) -> dict:
    path = Path(_need(opts, "log"))
    v = _need(opts, "v")
    records = estimator.read_trials(path)
    conf = opts["confidence"]
    alpha_est = estimator.estimate_alpha(records, conf)
    has_verdicts = any(r.validation_verdict is not None for r in records)
    beta_est = estimator.estimate_beta(records, conf) if has_verdicts else None
    result = estimator.decide_from_estimates(
        alpha_est, beta_est, v, opts["gain"], opts["loss"], opts["stance"]
    )
    return {
        "command": "estimate",
        "log": str(path),
        "records": len(records),
        "v": float(v),
        "gain": float(opts["gain"]),
        "loss": float(opts["loss"]),
        **result.as_dict(),
    }


COMMANDS: dict[str, Callable[[dict], dict]] = {
    "evaluate": cmd_evaluate,
    "policy": cmd_policy,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
}


def _flatten(obj: Any, prefix: str = "") -> dict[str, Any]:
    if isinstance(obj, dict):
        out: dict[str, Any] = {}
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}{k}."))
        return out
    return {prefix[:-1]: obj}


def _cell_text(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, list):
        return json.dumps(x)
    return str(x)


def _rows(payload: dict) -> tuple[list[str], list[list[str]]]:
    """Tabular view: sweep rows when present, else one flattened row."""
    table = payload.get("cells") if "cells" in payload else payload.get("rows")
    if payload.get("command") == "sweep" and table is not None:
        header = list(sweep.GRID_COLUMNS if payload["kind"] == "grid" else sweep.CURVE_COLUMNS)
        return header, [[_cell_text(r[c]) for c in header] for r in table]
    flat = _flatten(payload)
    header = list(flat)
    return header, [[_cell_text(flat[c]) for c in header]]


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    header, rows = _rows(payload)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if len(rows) == 1 and payload.get("command") != "sweep":
        width = max(len(h) for h in header)
        return "".join(f"{h:<{width}}  {x}\n" for h, x in zip(header, rows[0]))
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines += ["  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def _output_format(opts: dict) -> str:
    fmt = opts.get("format") or os.environ.get(FORMAT_ENV) or "json"
    if fmt not in FORMATS:
        raise ConfigError(f"output format must be one of {', '.join(FORMATS)}, got {fmt!r}")
    return fmt


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        opts = _merge(args)
        fmt = _output_format(opts)
        text = render(COMMANDS[args.command](opts), fmt)
        if opts.get("output"):
            try:
                Path(opts["output"]).write_text(text, encoding="utf-8")
            except OSError as exc:
                raise IngestionError(f"cannot write {opts['output']}: {exc.strerror or exc}") from None
        else:
            sys.stdout.write(text)
    except ParameterDomainError as exc:
        sys.stderr.write(f"aidelegation {args.command}: invalid parameters: {exc}\n")
        return EXIT_PARAMS
    except DelegationError as exc:
        # InsufficientDataError and IngestionError: bad or unreadable input data.
        sys.stderr.write(f"aidelegation {args.command}: {exc}\n")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
