"""Command-line interface.

Exit codes: 0 on success, 1 on I/O failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import asymptotics, hydrogen, retarded, static
from .config import load_config, resolve_constants
from .errors import DomainError, OutOfRegimeError, TrackingError
from .hydrogen import AtomicConstants, LevelLabel

OUT_OF_REGIME = "out-of-regime"
EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# formatting
# ---------------------------------------------------------------------------

def _cell(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (np.floating,)):
        return repr(float(value))
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c, "")) for c in columns])
    return buf.getvalue()


def to_table(rows: Sequence[dict], columns: Sequence[str]) -> str:
    cells = [[c for c in columns]] + [[_fmt_table(r.get(c, "")) for c in columns] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    lines = ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def _fmt_table(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return _cell(value)


def _json_value(value):
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def to_json(payload) -> str:
    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        return _json_value(obj)

    return json.dumps(clean(payload), indent=2, sort_keys=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return value


def _level(text: str) -> LevelLabel:
    try:
        return LevelLabel.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _nmax(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 2 <= value <= 8:
        raise argparse.ArgumentTypeError("n_max must lie in 2..8")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value constants file (default: $QEDWALL_CONFIG)")
    common.add_argument("--lamb-shift-au", type=_positive, dest="lamb_shift_au")
    common.add_argument("--fine-structure-au", type=_positive, dest="fine_structure_au")
    common.add_argument("--gamma-2s-au", type=_positive, dest="gamma_2s_au")
    common.add_argument("--gamma-2p-au", type=_positive, dest="gamma_2p_au")
    common.add_argument("--convention", choices=hydrogen.CONVENTIONS)

    parser = argparse.ArgumentParser(prog="qedwall", description="Hydrogen n=2 near a perfect conductor.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energy", parents=[common], help="distance-dependent level shift")
    p.add_argument("--state", type=_level, default=LevelLabel.S12)
    p.add_argument("--z", type=_positive, nargs="+", required=True, help="distance(s) in bohr")
    p.add_argument("--nmax", type=_nmax, default=2)
    p.add_argument("--units", choices=("au", "mhz"), default="au")
    p.add_argument("--format", choices=("csv", "json", "table"), default="table")

    p = sub.add_parser("mixing", parents=[common], help="parity-mixing amplitude")
    p.add_argument("--from", dest="m", type=_level, required=True)
    p.add_argument("--to", dest="n", type=_level, required=True)
    p.add_argument("--z", type=_positive, required=True)
    p.add_argument("--nmax", type=_nmax, default=2)
    p.add_argument("--strict-paper-tail", choices=("on", "off"), default="off")
    p.add_argument("--format", choices=("csv", "json", "table"), default="table")

    p = sub.add_parser("scan", parents=[common], help="tabulate a quantity over distance")
    p.add_argument("--quantity", choices=("energy", "mixing", "admixtures", "gamma"), required=True)
    p.add_argument("--zmin", type=_positive, required=True)
    p.add_argument("--zmax", type=_positive, required=True)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--log", action="store_true", help="logarithmic spacing")
    p.add_argument("--out", help="output file; .json selects JSON, anything else CSV")
    p.add_argument("--state", type=_level, default=LevelLabel.S12)
    p.add_argument("--from", dest="m", type=_level, default=LevelLabel.P12)
    p.add_argument("--to", dest="n", type=_level, default=LevelLabel.S12)
    p.add_argument("--nmax", type=_nmax, default=2)

    sub.add_parser("doubling", parents=[common], help="distance where the 2S decay rate doubles")
    return parser


def _constants(args) -> AtomicConstants:
    file_values = load_config(args.config)
    overrides = {k: getattr(args, k) for k in ("lamb_shift_au", "fine_structure_au", "gamma_2s_au", "gamma_2p_au", "convention")}
    return resolve_constants(file_values, overrides)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

ENERGY_COLUMNS = ("state", "z_au", "method", "energy_au", "energy_mhz")


def energy_records(state: LevelLabel, z: float, n_max: int, constants: AtomicConstants) -> list[dict]:
    channels = hydrogen.dipole_channels(state, n_max, constants)
    values = {
        "retarded": retarded.energy_shift(state, z, channels),
        "nonretarded": static.nonretarded_shift(state, z, order=static.default_order(z), constants=constants),
    }
    try:
        values["tail"] = asymptotics.energy_tail(state, z, channels)
    except OutOfRegimeError:
        values["tail"] = OUT_OF_REGIME
    rows = []
    for method, val in values.items():
        mhz = OUT_OF_REGIME if val == OUT_OF_REGIME else float(constants.to_mhz(val))
        rows.append({"state": state.value, "z_au": z, "method": method, "energy_au": val, "energy_mhz": mhz})
    return rows


def cmd_energy(args, constants) -> str:
    rows = [r for z in args.z for r in energy_records(args.state, z, args.nmax, constants)]
    if args.format == "json":
        return to_json(rows)
    if args.format == "csv":
        return to_csv(rows, ENERGY_COLUMNS)
    col = "energy_mhz" if args.units == "mhz" else "energy_au"
    return to_table(rows, ("state", "z_au", "method", col))


TERM_COLUMNS = ("z_au", "channel", "group", "power", "oscillator", "frequency", "coefficient", "value_au")


def mixing_report(m: LevelLabel, n: LevelLabel, z: float, n_max: int, strict: bool, constants: AtomicConstants) -> dict:
    channels = hydrogen.mixing_channels(m, n, n_max, constants)
    full = retarded.mixing_element(m, n, z, channels)
    terms = asymptotics.mixing_tail_terms(channels, strict_paper=strict)
    try:
        tail = asymptotics.mixing_tail(m, n, z, channels, strict_paper=strict)
    except OutOfRegimeError:
        tail = OUT_OF_REGIME
    cancel = None
    if any(c.label == LevelLabel.P12.value for c in channels):
        cancel = asymptotics.oscillatory_cancellation(m, n, LevelLabel.P12.value, n_max=n_max, constants=constants).vanishes()
    rows = []
    for t in terms:
        row = {"z_au": z, **t.as_row(), "value_au": float(t(z))}
        rows.append(row)
    return {
        "from": m.value,
        "to": n.value,
        "z_au": z,
        "mixing_au": full,
        "tail_au": tail,
        "strict_paper_tail": strict,
        "p12_oscillatory_cancels": cancel,
        "tail_terms": rows,
    }


def cmd_mixing(args, constants) -> str:
    if args.m.parity == args.n.parity:
        raise UsageError("--from and --to must have opposite parity")
    rep = mixing_report(args.m, args.n, args.z, args.nmax, args.strict_paper_tail == "on", constants)
    if args.format == "json":
        return to_json(rep)
    header = (
        f"# from={rep['from']} to={rep['to']} z_au={_cell(rep['z_au'])} "
        f"mixing_au={_cell(rep['mixing_au'])} tail_au={_cell(rep['tail_au'])} "
        f"strict_paper_tail={_cell(rep['strict_paper_tail'])} "
        f"p12_oscillatory_cancels={_cell(rep['p12_oscillatory_cancels'])}\n"
    )
    body = to_csv if args.format == "csv" else to_table
    return header + body(rep["tail_terms"], TERM_COLUMNS)


SCAN_COLUMNS = {
    "energy": ("z_au", "energy_au", "energy_mhz", "nonretarded_au", "tail_au"),
    "mixing": ("z_au", "mixing_au", "tail_au"),
    "admixtures": ("z_au", "aS_sq", "a12_sq", "a32_sq", "branch_eigenvalue_au"),
    "gamma": ("z_au", "xi", "gamma_eff_au"),
}


def scan_grid(zmin: float, zmax: float, points: int, log: bool) -> np.ndarray:
    if not zmin < zmax:
        raise UsageError("--zmin must be below --zmax")
    if points < 2:
        raise UsageError("--points must be >= 2")
    grid = np.geomspace(zmin, zmax, points) if log else np.linspace(zmin, zmax, points)
    grid[0], grid[-1] = zmin, zmax
    return grid


def scan_rows(args, constants) -> list[dict]:
    grid = scan_grid(args.zmin, args.zmax, args.points, args.log)
    q = args.quantity
    rows = []
    if q == "admixtures":
        if args.zmin <= static.MIN_TRACKING_DISTANCE:
            raise UsageError(f"admixture scans need --zmin > {static.MIN_TRACKING_DISTANCE}")
        return static.fig1_rows(grid, constants=constants)
    if q == "energy":
        channels = hydrogen.dipole_channels(args.state, args.nmax, constants)
        for z in grid:
            e = retarded.energy_shift(args.state, z, channels)
            try:
                tail = asymptotics.energy_tail(args.state, z, channels)
            except OutOfRegimeError:
                tail = OUT_OF_REGIME
            rows.append({
                "z_au": float(z),
                "energy_au": e,
                "energy_mhz": float(constants.to_mhz(e)),
                "nonretarded_au": static.nonretarded_shift(args.state, z, order=static.default_order(z), constants=constants),
                "tail_au": tail,
            })
    elif q == "mixing":
        if args.m.parity == args.n.parity:
            raise UsageError("--from and --to must have opposite parity")
        channels = hydrogen.mixing_channels(args.m, args.n, args.nmax, constants)
        for z in grid:
            try:
                tail = asymptotics.mixing_tail(args.m, args.n, z, channels)
            except OutOfRegimeError:
                tail = OUT_OF_REGIME
            rows.append({"z_au": float(z), "mixing_au": retarded.mixing_element(args.m, args.n, z, channels), "tail_au": tail})
    elif q == "gamma":
        for z in grid:
            try:
                prof = static.decay_profile(z, constants)
                rows.append({"z_au": float(z), "xi": prof.xi, "gamma_eff_au": prof.gamma_eff})
            except OutOfRegimeError:
                rows.append({"z_au": float(z), "xi": OUT_OF_REGIME, "gamma_eff_au": OUT_OF_REGIME})
    return rows


def cmd_scan(args, constants) -> tuple[str, str | None]:
    rows = scan_rows(args, constants)
    columns = SCAN_COLUMNS[args.quantity]
    if args.out and args.out.lower().endswith(".json"):
        text = to_json({"quantity": args.quantity, "columns": list(columns), "rows": rows})
    else:
        text = to_csv(rows, columns)
    return text, args.out


def cmd_doubling(args, constants) -> str:
    z0 = static.doubling_distance(constants)
    lines = [f"# {k} = {_cell(v)}" for k, v in constants.as_config().items()]
    lines.append(f"z0_au = {_cell(z0)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        constants = _constants(args)
    except OSError as exc:
        print(f"qedwall: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except DomainError as exc:
        print(f"qedwall: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if args.command == "energy":
                text, out = cmd_energy(args, constants), None
            elif args.command == "mixing":
                text, out = cmd_mixing(args, constants), None
            elif args.command == "scan":
                text, out = cmd_scan(args, constants)
            else:
                text, out = cmd_doubling(args, constants), None
    except (UsageError, DomainError) as exc:
        print(f"qedwall: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrackingError as exc:
        print(f"qedwall: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _emit(text, out)
    except OSError as exc:
        print(f"qedwall: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
