"""Command-line interface.

Subcommands
-----------
point      one scenario, full entanglement report
sweep      1- or 2-axis parameter grid, CSV/JSON output plus figures
converge   re-run one scenario at increasing mode cutoffs
regions    threshold a saved sweep into harvesting-region masks
compare    periodic-vs-Dirichlet region comparison of two saved sweeps

Scenario settings come from flags, or from a JSON config file given with
--config (flags win).  Angular values accept a "pi" suffix ("0.4pi"), times
accept an "r" suffix for light-crossing units ("1.5r"), and positions accept
fractions of the cavity length ("L/6", "5L/6").

Exit codes: 0 success, 1 invalid configuration or arguments, 2 numerical
failure budget exceeded (more than 0.1% of sweep cells failed, or a
single-point computation failed).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__, figures, gridio
from .entanglement import NumericalInconsistencyError
from .evolution import ConditioningError
from .sweep import (
    QUANTITIES,
    ScenarioSpec,
    SweepAxis,
    compare_boundaries,
    convergence_study,
    default_positions,
    extract_regions,
    report_values,
    run_point,
    sweep,
)

#: fraction of sweep cells allowed to fail before the exit code turns to 2
FAILURE_BUDGET = 1e-3

DEFAULT_AXES = ("T=0.05:2:120", "Omega=0.05pi:2pi:120")
DEFAULT_N_VALUES = "10,20,30,40,50,100"

_CONFIG_KEYS = {
    "boundary", "length", "coupling", "omega", "time", "modes",
    "positions", "threshold", "axes", "n_values", "format", "workers",
}


class CliError(ValueError):
    """Invalid configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments by default; this CLI reserves
    # 2 for numerical failures, so remap argument errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_angular(text) -> float:
    """Parse a frequency, accepting a trailing 'pi' ("0.4pi", "pi")."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower().replace(" ", "")
    if s.endswith("pi"):
        head = s[:-2].rstrip("*")
        try:
            factor = float(head) if head else 1.0
        except ValueError:
            raise CliError(f"cannot parse angular value {text!r}") from None
        return factor * math.pi
    try:
        return float(s)
    except ValueError:
        raise CliError(f"cannot parse angular value {text!r}") from None


def parse_duration(text) -> tuple[float, str]:
    """Parse a time; a trailing 'r' means light-crossing units ("1.5r")."""
    if isinstance(text, (int, float)):
        return float(text), "abs"
    s = str(text).strip().lower().replace(" ", "")
    unit = "abs"
    if s.endswith("r"):
        s = s[:-1].rstrip("*")
        unit = "r"
        if not s:
            return 1.0, unit
    try:
        return float(s), unit
    except ValueError:
        raise CliError(f"cannot parse time {text!r}") from None


def parse_position(text, length: float) -> float:
    """Parse one position; 'L' stands for the cavity length ("L/6", "0.5L")."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().replace(" ", "").lower()
    if "l" not in s:
        try:
            return float(s)
        except ValueError:
            raise CliError(f"cannot parse position {text!r}") from None
    head, _, tail = s.partition("l")
    try:
        value = float(head.rstrip("*")) if head else 1.0
        if tail.startswith("/"):
            value /= float(tail[1:])
        elif tail:
            raise ValueError
    except (ValueError, ZeroDivisionError):
        raise CliError(f"cannot parse position {text!r}") from None
    return value * length


def parse_axis(text) -> SweepAxis:
    """Parse an --axis flag, NAME=START:STOP:STEPS[:SCALE]."""
    s = str(text).strip()
    name_part, eq, rest = s.partition("=")
    if not eq:
        raise CliError(f"axis {text!r} must look like T=0.05:2:120")
    canon = {"t": "T", "omega": "Omega", "w": "Omega", "l": "L", "n": "N"}
    name = canon.get(name_part.strip().lower())
    if name is None:
        raise CliError(f"unknown axis name {name_part!r} (use T, Omega, L or N)")
    fields = rest.split(":")
    if len(fields) not in (3, 4):
        raise CliError(f"axis {text!r} must look like NAME=START:STOP:STEPS[:SCALE]")
    scale = fields[3].strip().lower() if len(fields) == 4 else "linear"
    try:
        if name == "Omega":
            start, stop = parse_angular(fields[0]), parse_angular(fields[1])
        elif name == "T":
            # a trailing r on the endpoints is the default unit anyway
            start, stop = (parse_duration(f)[0] for f in fields[:2])
        else:
            start, stop = float(fields[0]), float(fields[1])
        steps = int(fields[2])
    except (ValueError, CliError) as exc:
        raise CliError(f"cannot parse axis {text!r}: {exc}") from None
    try:
        return SweepAxis(name, start, stop, steps, scale)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        config = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(config, dict):
        raise CliError(f"config {path} must hold a JSON object")
    unknown = set(config) - _CONFIG_KEYS
    if unknown:
        raise CliError(f"unknown config keys {sorted(unknown)}")
    return config


def _setting(args, config: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return config.get(key, default)


def _resolve_scenario(args, config: dict, *, need_omega=True, need_time=True):
    """Build the scenario template from flags, config, and defaults."""
    boundary = _setting(args, config, "boundary", "periodic")
    length = float(_setting(args, config, "length", 10.0))
    coupling = float(_setting(args, config, "coupling", 0.01))
    modes = int(_setting(args, config, "modes", 50))

    omega_raw = _setting(args, config, "omega")
    if omega_raw is None:
        if need_omega:
            raise CliError("an oscillator gap is required (--omega, e.g. 0.4pi)")
        omega = 1.0  # placeholder, every cell overrides it
    else:
        omega = parse_angular(omega_raw)

    time_raw = _setting(args, config, "time")
    if time_raw is None:
        if need_time:
            raise CliError("an evolution time is required (--time, e.g. 1.5r)")
        duration = 0.0  # placeholder, every cell overrides it
    else:
        value, unit = parse_duration(time_raw)
        duration = value * length / 3.0 if unit == "r" else value

    positions_raw = _setting(args, config, "positions")
    if positions_raw is None:
        positions = default_positions(length)
    else:
        if isinstance(positions_raw, str):
            tokens = [t for t in positions_raw.split(",") if t.strip()]
        else:
            tokens = list(positions_raw)
        positions = tuple(parse_position(t, length) for t in tokens)

    try:
        return ScenarioSpec.standard(
            boundary,
            length=length,
            cutoff=modes,
            omega=omega,
            coupling=coupling,
            duration=duration,
            positions=positions,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _resolve_axes(args, config: dict) -> tuple[SweepAxis, ...]:
    raw = getattr(args, "axis", None) or config.get("axes") or list(DEFAULT_AXES)
    return tuple(parse_axis(a) for a in raw)


def _out_paths(out, fmt: str) -> tuple[Path, Path]:
    """Data file path and a stem path for sibling figure files."""
    out = Path(out)
    if out.suffix in (".csv", ".json"):
        return out, out.with_suffix("")
    return out.with_suffix(f".{fmt}"), out


def _print_report(scenario: ScenarioSpec, report) -> None:
    values = report_values(report, scenario.detectors.count)
    print(f"boundary            {scenario.cavity.boundary.value}")
    print(f"L                   {scenario.cavity.length:g}")
    print(f"N                   {scenario.cavity.cutoff}")
    print(f"Omega               {scenario.detectors.omega:.6g}")
    print(f"coupling            {scenario.detectors.coupling:g}")
    print(f"T                   {scenario.duration:.6g}  ({scenario.t_over_r:.4g} r)")
    for name in QUANTITIES:
        value = values[name]
        if value is None:
            continue
        print(f"{name:<20}{value:.12e}")
    for key, method in sorted(report.methods.items()):
        print(f"method[{key}]  {method}")
    if report.elapsed_s is not None:
        print(f"elapsed_s           {report.elapsed_s:.3f}")


def cmd_point(args) -> int:
    config = _load_config(args.config)
    scenario = _resolve_scenario(args, config)
    try:
        report = run_point(scenario, full_one_vs_rest=args.tripartite)
    except (ConditioningError, NumericalInconsistencyError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2
    _print_report(scenario, report)
    if args.out:
        fmt = args.format or _setting(args, config, "format", "csv")
        data_path, _ = _out_paths(args.out, fmt)
        axis = SweepAxis("T", scenario.t_over_r, scenario.t_over_r, 1)
        grid = sweep(scenario, [axis], full_one_vs_rest=args.tripartite)
        gridio.write_grid(grid, data_path, fmt)
        print(f"wrote {data_path}")
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    axes = _resolve_axes(args, config)
    names = {axis.name for axis in axes}
    scenario = _resolve_scenario(
        args, config, need_omega="Omega" not in names, need_time="T" not in names
    )
    workers = int(_setting(args, config, "workers", 1))
    fmt = args.format or _setting(args, config, "format", "csv")
    grid = sweep(scenario, axes, workers=workers, full_one_vs_rest=args.tripartite)

    if args.out:
        data_path, stem = _out_paths(args.out, fmt)
        gridio.write_grid(grid, data_path, fmt)
        written = [data_path]
        if not args.no_figures:
            written += figures.grid_heatmaps(grid, stem)
        for path in written:
            print(f"wrote {path}")
    else:
        gridio.write_grid_csv(grid, sys.stdout)  # type: ignore[arg-type]

    failed = grid.n_failed
    if failed:
        print(
            f"{failed} of {len(grid.cells)} cells failed", file=sys.stderr
        )
        if failed > FAILURE_BUDGET * len(grid.cells):
            print("numerical failure budget exceeded", file=sys.stderr)
            return 2
    return 0


def cmd_converge(args) -> int:
    config = _load_config(args.config)
    scenario = _resolve_scenario(args, config)
    raw = _setting(args, config, "n_values", DEFAULT_N_VALUES)
    if isinstance(raw, str):
        raw = [t for t in raw.split(",") if t.strip()]
    try:
        ns = [int(t) for t in raw]
    except ValueError:
        raise CliError(f"cannot parse mode cutoffs {raw}") from None
    try:
        study = convergence_study(scenario, ns, full_one_vs_rest=args.tripartite)
    except (ConditioningError, NumericalInconsistencyError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        raise CliError(str(exc)) from None

    header = "N".rjust(6) + "".join(q.rjust(14) for q in QUANTITIES)
    print(header)
    for cutoff, report in study.rows:
        values = report_values(report, scenario.detectors.count)
        line = str(cutoff).rjust(6)
        for q in QUANTITIES:
            v = values[q]
            line += ("" if v is None else f"{v:.4e}").rjust(14)
        print(line)
    for q in QUANTITIES:
        change = study.final_relative_change(q)
        if change is not None:
            print(f"final relative change {q}: {change:.3e}")

    if args.out:
        fmt = args.format or _setting(args, config, "format", "csv")
        data_path, stem = _out_paths(args.out, fmt)
        gridio.write_convergence(study, data_path, fmt)
        print(f"wrote {data_path}")
        if not args.no_figures:
            fig_path = figures.convergence_figure(
                study, stem.with_name(stem.name + "_convergence.png")
            )
            print(f"wrote {fig_path}")
    return 0


def cmd_regions(args) -> int:
    threshold = float(args.threshold if args.threshold is not None else 1e-10)
    try:
        grid = gridio.load_grid(args.grid)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot load grid {args.grid}: {exc}") from None
    mask = extract_regions(grid, threshold)

    for quantity in QUANTITIES:
        count = mask.cell_count(quantity)
        earliest = mask.earliest(quantity)
        line = f"{quantity:<10} {count:6d} cells above {threshold:g}"
        if earliest is not None:
            line += f", emerges at T = {earliest:.4g} r"
        print(line)

    out = args.out or str(Path(args.grid).with_suffix("")) + "_regions"
    fmt = args.format or "csv"
    _, stem = _out_paths(out, fmt)
    written = gridio.write_regions(mask, stem, fmt)
    if not args.no_figures:
        fig = figures.region_figure(mask, stem.with_name(stem.name + ".png"))
        if fig is not None:
            written.append(fig)
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_compare(args) -> int:
    threshold = float(args.threshold if args.threshold is not None else 1e-10)
    try:
        grid_p = gridio.load_grid(args.periodic_grid)
        grid_d = gridio.load_grid(args.dirichlet_grid)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot load grids: {exc}") from None
    try:
        comparison = compare_boundaries(grid_p, grid_d, threshold, args.quantity)
    except ValueError as exc:
        raise CliError(str(exc)) from None

    for key, value in comparison.to_dict().items():
        print(f"{key:<32}{value}")

    out = args.out or "comparison"
    fmt = args.format or "csv"
    data_path, stem = _out_paths(out, fmt)
    gridio.write_comparison(comparison, data_path, fmt)
    written = [data_path]
    if not args.no_figures:
        fig = figures.comparison_figure(
            extract_regions(grid_p, threshold),
            extract_regions(grid_d, threshold),
            args.quantity,
            stem.with_name(stem.name + ".png"),
        )
        if fig is not None:
            written.append(fig)
    for path in written:
        print(f"wrote {path}")
    return 0


def _add_scenario_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON scenario config")
    parser.add_argument(
        "--boundary", choices=["periodic", "dirichlet"], help="cavity wall type"
    )
    parser.add_argument("--length", type=float, help="cavity length (default 10)")
    parser.add_argument(
        "--coupling", type=float, help="detector-field coupling (default 0.01)"
    )
    parser.add_argument("--omega", help="oscillator gap, e.g. 0.4pi")
    parser.add_argument("--time", help="evolution time, e.g. 1.5r or 5.0")
    parser.add_argument(
        "--modes", type=int, help="field mode cutoff (default 50)"
    )
    parser.add_argument(
        "--positions",
        help="comma-separated detector positions, e.g. L/6,L/2,5L/6",
    )
    parser.add_argument(
        "--tripartite",
        action="store_true",
        help="force all one-vs-rest bipartitions and the tripartite "
        "estimate, even with Dirichlet walls",
    )
    parser.add_argument("--out", metavar="PATH", help="output file or stem")
    parser.add_argument("--format", choices=["csv", "json"], help="output format")
    parser.add_argument("--no-figures", action="store_true", help="skip PNG output")
    parser.add_argument(
        "--seed", type=int, help="random seed (reserved, no stochastic paths yet)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="cavity-harvest",
        description="Exact Gaussian simulation of entanglement harvesting "
        "by oscillator detectors in a 1-D cavity.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_point = sub.add_parser("point", help="single-scenario report")
    _add_scenario_options(p_point)

    p_sweep = sub.add_parser("sweep", help="evaluate a parameter grid")
    _add_scenario_options(p_sweep)
    p_sweep.add_argument(
        "--axis",
        action="append",
        metavar="NAME=START:STOP:STEPS[:SCALE]",
        help="swept axis (repeatable, at most twice); default "
        f"{DEFAULT_AXES[0]} {DEFAULT_AXES[1]}",
    )
    p_sweep.add_argument("--workers", type=int, help="worker processes (default 1)")

    p_conv = sub.add_parser("converge", help="mode-cutoff convergence study")
    _add_scenario_options(p_conv)
    p_conv.add_argument(
        "--n-values",
        dest="n_values",
        help=f"comma-separated cutoffs (default {DEFAULT_N_VALUES})",
    )

    p_reg = sub.add_parser("regions", help="harvesting regions of a saved sweep")
    p_reg.add_argument("grid", help="sweep output file (csv or json)")
    p_reg.add_argument("--threshold", type=float, help="negativity threshold (default 1e-10)")
    p_reg.add_argument("--out", metavar="PATH", help="output stem")
    p_reg.add_argument("--format", choices=["csv", "json"], help="output format")
    p_reg.add_argument("--no-figures", action="store_true", help="skip PNG output")

    p_cmp = sub.add_parser("compare", help="compare periodic and Dirichlet sweeps")
    p_cmp.add_argument("periodic_grid", help="periodic sweep output file")
    p_cmp.add_argument("dirichlet_grid", help="Dirichlet sweep output file")
    p_cmp.add_argument("--threshold", type=float, help="negativity threshold (default 1e-10)")
    p_cmp.add_argument(
        "--quantity", default="E_12", choices=list(QUANTITIES),
        help="quantity to compare (default E_12)",
    )
    p_cmp.add_argument("--out", metavar="PATH", help="output stem (default comparison)")
    p_cmp.add_argument("--format", choices=["csv", "json"], help="output format")
    p_cmp.add_argument("--no-figures", action="store_true", help="skip PNG output")
    return parser


_COMMANDS = {
    "point": cmd_point,
    "sweep": cmd_sweep,
    "converge": cmd_converge,
    "regions": cmd_regions,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main(sys.argv[1:]))
