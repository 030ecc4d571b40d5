"""Command-line front end.

Subcommands cover the full analysis surface: single scans, scaling sweeps,
fits, figure datasets, pulse schedules and the two-level crossing check.
All computations are deterministic, outputs are written atomically (temp
file plus rename) and floats are serialized at 12 significant digits, so
identical invocations produce byte-identical files.

Exit codes: 0 success, 2 usage error, 3 validation error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import evolve, kzm, model, protocol
from .errors import (ConfigInconsistent, InvalidParam, IoError, KzsimError,
                     UnknownFigure, UsageError, ValidationError)

_DEFAULTS = dict(bx=0.1, k=1.0, b0=-1.5, bz_end=-0.2, delta_b=0.1,
                 backend="reference", j_hz=215.0)


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one CLI invocation."""

    command: str
    params: dict
    out: str

    def normalized(self) -> str:
        """Canonical JSON form; identical configs serialize identically."""
        payload = {"command": self.command, "out": self.out, "params": self.params}
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D401 - argparse hook
        raise UsageError(message)


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _parse_t2(text: str | None) -> tuple[float, float] | None:
    if text is None or text.lower() == "none":
        return None
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise ValidationError(f"cannot parse --t2 {text!r}: {exc}") from None
    if len(parts) != 2:
        raise ValidationError("--t2 expects two comma-separated seconds, e.g. 2,0.2")
    return (parts[0], parts[1])


def _parse_k_values(text: str) -> tuple[float, ...]:
    if text == "ideal":
        return kzm.IDEAL_K_VALUES
    if text == "experiment":
        return kzm.EXPERIMENT_K_VALUES
    try:
        values = tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"cannot parse --k-grid {text!r}: {exc}") from None
    if not values:
        raise ValidationError("--k-grid must name at least one rate")
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="kzsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p, bz_end=True):
        p.add_argument("--bx", type=float, default=_DEFAULTS["bx"])
        p.add_argument("--k", type=float, default=_DEFAULTS["k"])
        p.add_argument("--b0", type=float, default=_DEFAULTS["b0"])
        if bz_end:
            p.add_argument("--bz-end", type=float, default=_DEFAULTS["bz_end"])
        p.add_argument("--delta-b", type=float, default=_DEFAULTS["delta_b"])
        p.add_argument("--j-hz", type=float, default=_DEFAULTS["j_hz"])

    p = sub.add_parser("scan", help="single sweep, trace CSV")
    add_model_flags(p)
    p.add_argument("--backend", choices=evolve.BACKENDS, default=_DEFAULTS["backend"])
    p.add_argument("--t2", default=None, help="T2 pair in seconds, e.g. 2,0.2")
    p.add_argument("--out", default="scan.csv")
    p.add_argument("--print-config", action="store_true")

    p = sub.add_parser("sweep", help="defect scaling points, CSV")
    p.add_argument("--bx", type=float, action="append", dest="bx_values")
    p.add_argument("--k-grid", default="ideal",
                   help="'ideal', 'experiment' or comma-separated rates")
    p.add_argument("--b0", type=float, default=_DEFAULTS["b0"])
    p.add_argument("--bz-end", type=float, default=_DEFAULTS["bz_end"])
    p.add_argument("--backend", choices=evolve.BACKENDS, default=_DEFAULTS["backend"])
    p.add_argument("--t2", default=None)
    p.add_argument("--j-hz", type=float, default=_DEFAULTS["j_hz"])
    p.add_argument("--out", default="sweep.csv")
    p.add_argument("--print-config", action="store_true")

    p = sub.add_parser("fit", help="scaling sweep plus linear fit, JSON")
    p.add_argument("--bx", type=float, action="append", dest="bx_values")
    p.add_argument("--k-grid", default="ideal")
    p.add_argument("--b0", type=float, default=_DEFAULTS["b0"])
    p.add_argument("--bz-end", type=float, default=_DEFAULTS["bz_end"])
    p.add_argument("--backend", choices=evolve.BACKENDS, default=_DEFAULTS["backend"])
    p.add_argument("--t2", default=None)
    p.add_argument("--j-hz", type=float, default=_DEFAULTS["j_hz"])
    p.add_argument("--out", default="fit.json")
    p.add_argument("--print-config", action="store_true")

    p = sub.add_parser("figure", help="reproduce a published dataset, CSV")
    p.add_argument("figure_id", choices=list(kzm.FIGURE_IDS))
    p.add_argument("--out", default=None)
    p.add_argument("--print-config", action="store_true")

    p = sub.add_parser("schedule", help="pulse program for one protocol run")
    p.add_argument("--bx", type=float, default=_DEFAULTS["bx"])
    p.add_argument("--k", type=float, default=_DEFAULTS["k"])
    p.add_argument("--b0", type=float, default=_DEFAULTS["b0"])
    p.add_argument("--delta-b", type=float, default=_DEFAULTS["delta_b"])
    p.add_argument("--j-hz", type=float, default=_DEFAULTS["j_hz"])
    p.add_argument("--j", type=int, default=15, help="number of sweep segments")
    p.add_argument("--out", default="schedule.txt")
    p.add_argument("--print-config", action="store_true")

    p = sub.add_parser("lz-check", help="two-level sweep vs crossing formula, JSON")
    p.add_argument("--bx", type=float, default=_DEFAULTS["bx"])
    p.add_argument("--k", type=float, default=_DEFAULTS["k"])
    p.add_argument("--out", default="lz-check.json")
    p.add_argument("--print-config", action="store_true")

    return parser


def parse_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    command = ns.command
    params: dict = {}
    if command in ("scan", "schedule", "lz-check"):
        if ns.k <= 0:
            raise ValidationError(f"--k must be positive, got {ns.k}")
        if ns.bx < 0:
            raise ValidationError(f"--bx must be >= 0, got {ns.bx}")
    if command == "scan":
        params = dict(bx=ns.bx, k=ns.k, b0=ns.b0, bz_end=ns.bz_end,
                      delta_b=ns.delta_b, backend=ns.backend,
                      t2=_parse_t2(ns.t2), j_hz=ns.j_hz)
    elif command in ("sweep", "fit"):
        bx_values = tuple(ns.bx_values) if ns.bx_values else (_DEFAULTS["bx"],)
        if any(b <= 0 for b in bx_values):
            raise ValidationError("--bx values must be positive for scaling sweeps")
        k_values = _parse_k_values(ns.k_grid)
        if any(k <= 0 for k in k_values):
            raise ValidationError("scan rates must be positive")
        params = dict(bx_values=bx_values, k_values=k_values, b0=ns.b0,
                      bz_end=ns.bz_end, backend=ns.backend,
                      t2=_parse_t2(ns.t2), j_hz=ns.j_hz)
    elif command == "figure":
        params = dict(figure_id=ns.figure_id)
    elif command == "schedule":
        if ns.j < 0:
            raise ValidationError(f"--j must be >= 0, got {ns.j}")
        params = dict(bx=ns.bx, k=ns.k, b0=ns.b0, delta_b=ns.delta_b,
                      j_hz=ns.j_hz, j=ns.j)
    elif command == "lz-check":
        params = dict(bx=ns.bx, k=ns.k)
    out = ns.out
    if command == "figure" and out is None:
        out = f"{ns.figure_id}.csv"
    cfg = RunConfig(command=command, params=params, out=out)
    if ns.print_config:
        sys.stdout.write(cfg.normalized())
        raise SystemExit(0)
    return cfg


def _atomic_write(path: str, text: str) -> None:
    target = os.path.abspath(path)
    directory = os.path.dirname(target)
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".kzsim-tmp-")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, target)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _rows_to_csv(note: str, header, rows) -> str:
    lines = [f"# {note}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _run_scan(params: dict) -> str:
    cfg = evolve.SweepConfig.from_rate(
        params["bx"], params["k"], b0=params["b0"], bz_end=params["bz_end"],
        delta_b=params["delta_b"], backend=params["backend"],
        t2=params["t2"], j_hz=params["j_hz"],
    )
    start = model.ground_vector(model.ModelParams(bx=params["bx"], bz=params["b0"]))
    if params["t2"] is not None:
        trace = evolve.dephase_propagate(cfg, np.outer(start, start.conj()))
    else:
        trace = evolve.propagate(cfg, start)
    return trace.to_csv()


def _run_sweep_points(params: dict) -> kzm.ScalingFit:
    return kzm.run_scaling_sweep(
        params["bx_values"], params["k_values"], backend=params["backend"],
        b0=params["b0"], bz_end=params["bz_end"], t2=params["t2"],
        j_hz=params["j_hz"],
    )


def execute(cfg: RunConfig) -> int:
    """Run one validated command and write its artifact."""
    if cfg.command == "scan":
        _atomic_write(cfg.out, _run_scan(cfg.params))
    elif cfg.command == "sweep":
        fit = _run_sweep_points(cfg.params)
        body = _rows_to_csv(
            f"scaling sweep: bx={list(cfg.params['bx_values'])},"
            f" backend={cfg.params['backend']}",
            ("tau_ratio", "defect"),
            fit.points,
        )
        _atomic_write(cfg.out, body)
    elif cfg.command == "fit":
        fit = _run_sweep_points(cfg.params)
        _atomic_write(cfg.out, json.dumps(fit.to_record(), sort_keys=True, indent=2) + "\n")
        sys.stdout.write(
            f"alpha_hat={_fmt(fit.alpha_hat)} r={_fmt(fit.r)} n={fit.n_points}\n"
        )
    elif cfg.command == "figure":
        data = kzm.reproduce_figure(cfg.params["figure_id"])
        _atomic_write(cfg.out, _rows_to_csv(
            f"{data.figure_id}: {data.note}", data.header, data.rows))
    elif cfg.command == "schedule":
        p = cfg.params
        sweep = evolve.SweepConfig.from_rate(
            p["bx"], p["k"], b0=p["b0"], bz_end=p["b0"] + p["j"] * p["delta_b"],
            delta_b=p["delta_b"], backend="trotter", j_hz=p["j_hz"],
        )
        sched = protocol.nmr_schedule(sweep, j=p["j"])
        _atomic_write(cfg.out, sched.to_text())
        sys.stdout.write(
            f"schedule with {p['j']} segments, total delay"
            f" {_fmt(sched.total_duration())} s\n"
        )
    elif cfg.command == "lz-check":
        p_num, p_form = kzm.lz_check(cfg.params["bx"], cfg.params["k"])
        record = {"p_numeric": p_num, "p_formula": p_form,
                  "bx": cfg.params["bx"], "k": cfg.params["k"]}
        _atomic_write(cfg.out, json.dumps(record, sort_keys=True, indent=2) + "\n")
        sys.stdout.write(f"p_numeric={_fmt(p_num)} p_formula={_fmt(p_form)}\n")
    else:
        raise UsageError(f"unknown command {cfg.command!r}")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        cfg = parse_args(argv)
        return execute(cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ConfigInconsistent, InvalidParam, UnknownFigure) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 3
    except IoError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except KzsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
