"""Command-line front end: scenario presets in, tables, sweeps and region maps out.

Exit status is 0 on success, 2 for a malformed configuration and 3 when a
numerical routine fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import analytic, presets
from .helstrom import helstrom_bound
from .infotheory import holevo
from .metrics import (
    DEFAULT_TOL,
    EXPENSIVE_TOL,
    QuadratureError,
    hb_field,
    holevo_field,
    integrate_square,
    is_commuting,
    low_eta_sweep,
    StateEntry,
    table_mean_holevo,
)
from .scenario import LossExpansion, Scenario
from .states import PureState, parse_label
from .tensor import NotHermitianError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

COMMANDS = ("hb", "mean", "holevo", "table", "regions", "sweep")


@dataclass
class RunConfig:
    """Everything needed to repeat an invocation; echoed into every output."""

    command: str
    config: list[str] = field(default_factory=list)
    preset: str | None = None
    state: str | None = None
    p0: float | None = None
    eta: float | None = None
    tol: float | None = None
    log_base: float = math.e
    threads: int = 1
    expensive: bool = False
    resolution: int = 50
    eta_max: float = 0.01
    points: int = 101
    format: str = "csv"

    def effective_tol(self) -> float:
        if self.tol is not None:
            return self.tol
        return EXPENSIVE_TOL if self.expensive else DEFAULT_TOL

    def as_metadata(self) -> dict:
        meta = asdict(self)
        meta["tol"] = self.effective_tol()
        return meta


def _log_base(text: str) -> float:
    if text.strip().lower() == "e":
        return math.e
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"log base must be 'e' or a number, got {text!r}")
    if value <= 0 or value == 1:
        raise argparse.ArgumentTypeError("log base must be positive and not 1")
    return value


def _positive(kind):
    def parse(text: str):
        value = kind(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text!r}")
        return value

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--tol", type=_positive(float), help="quadrature tolerance")
    common.add_argument("--log-base", type=_log_base, default=math.e,
                        help="logarithm base for entropies: 'e' (default) or a number such as 2")
    common.add_argument("--threads", type=_positive(int), default=1)
    common.add_argument("--expensive", action="store_true",
                        help="allow four-ququart suites; default tolerance becomes %g" % EXPENSIVE_TOL)
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="qillum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hb", parents=[common], help="Helstrom bound at one point")
    p.add_argument("--config", required=True, help="preset name or YAML scenario file")
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)

    p = sub.add_parser("mean", parents=[common], help="mean Helstrom bound over the unit square")
    p.add_argument("--config", required=True)

    p = sub.add_parser("holevo", parents=[common],
                       help="Holevo information at a point, or its mean when --p0/--eta are omitted")
    p.add_argument("--config", required=True)
    p.add_argument("--p0", type=float)
    p.add_argument("--eta", type=float)

    p = sub.add_parser("table", parents=[common], help="mean HB and Holevo table for a preset suite")
    p.add_argument("preset", help="one of: " + ", ".join(presets.suite_names()))

    p = sub.add_parser("regions", parents=[common], help="region map on a cell-centred grid")
    p.add_argument("state", nargs="?",
                   help="closed-form state id: " + ", ".join(_ANALYTIC_PROBES))
    p.add_argument("--config", help="preset or file; numeric tags only")
    p.add_argument("--resolution", type=_positive(int), default=50)

    p = sub.add_parser("sweep", parents=[common], help="HB against eta at fixed p0")
    p.add_argument("--config", action="append", required=True, help="repeat for several states")
    p.add_argument("--p0", type=float, default=0.5)
    p.add_argument("--eta-max", type=float, default=0.01)
    p.add_argument("--points", type=_positive(int), default=101)
    return parser


_ANALYTIC_PROBES = {
    "S-S-I": lambda: analytic.two_signal_probe("S-S-I"),
    "GHZ": lambda: analytic.two_signal_probe("GHZ"),
    "W": lambda: analytic.two_signal_probe("W"),
    "S-SI": lambda: analytic.two_signal_probe("S-SI"),
    "SS-I": lambda: analytic.two_signal_probe("SS-I"),
    "SI-I": lambda: parse_label("SI-I"),
    "S-S-S": lambda: parse_label("S-S-S"),
}


def _run_config(args: argparse.Namespace) -> RunConfig:
    cfg = getattr(args, "config", None) or []
    if isinstance(cfg, str):
        cfg = [cfg]
    return RunConfig(
        command=args.command,
        config=cfg,
        preset=getattr(args, "preset", None),
        state=getattr(args, "state", None),
        p0=getattr(args, "p0", None),
        eta=getattr(args, "eta", None),
        tol=args.tol,
        log_base=args.log_base,
        threads=args.threads,
        expensive=args.expensive,
        resolution=getattr(args, "resolution", 50),
        eta_max=getattr(args, "eta_max", 0.01),
        points=getattr(args, "points", 101),
        format=args.format,
    )


# -- output ------------------------------------------------------------------------


def _clean(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render(rc: RunConfig, columns: Sequence[str], rows: Sequence[dict]) -> str:
    """CSV with a one-line metadata comment, or JSON ``{"run_config", "columns", "rows"}``."""
    meta = rc.as_metadata()
    if rc.format == "json":
        doc = {
            "run_config": meta,
            "columns": list(columns),
            "rows": [{c: _clean(r.get(c)) for c in columns} for r in rows],
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    buf.write("# run_config: " + json.dumps(meta, separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(columns)
    for r in rows:
        writer.writerow(["" if _clean(r.get(c)) is None else _clean(r.get(c)) for c in columns])
    return buf.getvalue()


# -- commands ----------------------------------------------------------------------


def _scenario(rc: RunConfig, probe: PureState) -> Scenario:
    if rc.p0 is None or rc.eta is None:
        raise presets.ConfigError("--p0 and --eta are required")
    try:
        return Scenario(probe, rc.eta, rc.p0)
    except ValueError as exc:
        raise presets.ConfigError(str(exc)) from exc


def cmd_hb(rc: RunConfig):
    probe = presets.load_scenario(rc.config[0])
    s = _scenario(rc, probe)
    out = helstrom_bound(LossExpansion(probe).pair(s.eta), s.p0)
    row = {
        "config": rc.config[0],
        "p0": s.p0,
        "eta": s.eta,
        "p_err": out.p_err,
        "region": out.tag,
        "pi1_rank": out.rank,
        "spectrum": " ".join(f"{x:.12g}" for x in out.spectrum),
    }
    return list(row), [row]


def cmd_mean(rc: RunConfig):
    probe = presets.load_scenario(rc.config[0])
    r = integrate_square(hb_field(LossExpansion(probe)), tol=rc.effective_tol(), threads=rc.threads)
    row = {"config": rc.config[0], "mean_hb": r.value, "err_estimate": r.error, "evaluations": r.evaluations}
    return list(row), [row]


def cmd_holevo(rc: RunConfig):
    probe = presets.load_scenario(rc.config[0])
    exp = LossExpansion(probe)
    if rc.p0 is None and rc.eta is None:
        row = {"config": rc.config[0], "commuting": is_commuting(exp), "mean_holevo": None,
               "err_estimate": None, "evaluations": 0}
        if row["commuting"]:
            r = integrate_square(holevo_field(exp, rc.log_base), tol=rc.effective_tol(), threads=rc.threads)
            row.update(mean_holevo=r.value, err_estimate=r.error, evaluations=r.evaluations)
        return list(row), [row]
    s = _scenario(rc, probe)
    h = holevo(exp.pair(s.eta), s.p0, rc.log_base)
    row = {"config": rc.config[0], "p0": s.p0, "eta": s.eta, "chi": h.chi,
           "commutator_norm": h.commutator_norm, "commuting": h.commuting}
    return list(row), [row]


TABLE_COLUMNS = ("configuration", "state", "mean_hb", "mean_holevo", "err_estimate",
                 "holevo_err_estimate", "evaluations")


def cmd_table(rc: RunConfig):
    entries = presets.suite_entries(rc.preset)
    if presets.suite_is_expensive(rc.preset) and not rc.expensive:
        raise presets.ConfigError(f"preset {rc.preset!r} is expensive; pass --expensive")
    table = table_mean_holevo(entries, tol=rc.effective_tol(), threads=rc.threads, log_base=rc.log_base)
    return list(TABLE_COLUMNS), [r.as_dict() for r in table.rows]


def cmd_regions(rc: RunConfig):
    if (rc.state is None) == (not rc.config):
        raise presets.ConfigError("give either a closed-form state id or --config")
    if rc.state is not None:
        if rc.state not in _ANALYTIC_PROBES:
            raise presets.ConfigError(f"no closed form for {rc.state!r}; expected one of {list(_ANALYTIC_PROBES)}")
        probe = _ANALYTIC_PROBES[rc.state]()
    else:
        probe = presets.load_scenario(rc.config[0])
    exp = LossExpansion(probe)
    pts = (np.arange(rc.resolution) + 0.5) / rc.resolution
    rows = []
    for p0 in pts:
        for eta in pts:
            out = helstrom_bound(exp.pair(float(eta)), float(p0))
            row = {"p0": float(p0), "eta": float(eta), "region": None, "p_err": out.p_err, "numeric_tag": out.tag}
            if rc.state is not None:
                a = analytic.analytic_bound(rc.state, float(p0), float(eta))
                row["region"] = a.region
            rows.append(row)
    return ["p0", "eta", "region", "p_err", "numeric_tag"], rows


def cmd_sweep(rc: RunConfig):
    entries = [StateEntry("", ref, presets.load_scenario(ref)) for ref in rc.config]
    if not 0.0 <= rc.p0 <= 1.0:
        raise presets.ConfigError("p0 must lie in [0, 1]")
    try:
        sweep = low_eta_sweep(entries, rc.p0, rc.eta_max, rc.points)
    except ValueError as exc:
        raise presets.ConfigError(str(exc)) from exc
    columns = ["eta"] + list(rc.config)
    rows = []
    for i, eta in enumerate(sweep.etas):
        row = {"eta": float(eta)}
        row.update({ref: float(sweep.values[ref][i]) for ref in rc.config})
        rows.append(row)
    return columns, rows


HANDLERS = {"hb": cmd_hb, "mean": cmd_mean, "holevo": cmd_holevo, "table": cmd_table,
            "regions": cmd_regions, "sweep": cmd_sweep}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rc = _run_config(args)
    try:
        columns, rows = HANDLERS[rc.command](rc)
    except presets.ConfigError as exc:
        print(f"qillum: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, np.linalg.LinAlgError, NotHermitianError, FloatingPointError,
            ArithmeticError) as exc:
        print(f"qillum: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render(rc, columns, rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
