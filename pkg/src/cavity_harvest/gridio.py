"""Reading and writing sweep results as CSV or JSON.

The CSV schema is fixed:

    T_over_r, omega, L, N, boundary, E_12, E_13, E_23,
    E_1_vs_23, E_2_vs_13, E_3_vs_12, E_tri, spacelike_neighbors, status

one row per grid cell in row-major axis order.  Quantities that were not
computed are left empty, never written as zero, so a blank field is
distinguishable from a separable state.  Floats are written with repr and
therefore round-trip exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .sweep import (
    QUANTITIES,
    BoundaryComparison,
    ConvergenceStudy,
    RegionMask,
    SweepAxis,
    SweepCell,
    SweepGrid,
    report_values,
)

CSV_COLUMNS = (
    "T_over_r",
    "omega",
    "L",
    "N",
    "boundary",
    *QUANTITIES,
    "spacelike_neighbors",
    "status",
)

#: CSV column carrying each axis coordinate
_AXIS_COLUMN = {"T": "T_over_r", "Omega": "omega", "L": "L", "N": "N"}

PathLike = Union[str, Path]


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


def cell_row(cell: SweepCell) -> list:
    row = [
        _fmt(cell.t_over_r),
        _fmt(cell.omega),
        _fmt(cell.length),
        str(cell.cutoff),
        cell.boundary,
    ]
    row.extend(_fmt(cell.values.get(name)) for name in QUANTITIES)
    row.append(_fmt_bool(cell.spacelike_neighbors))
    row.append(cell.status)
    return row


def write_grid_csv(grid: SweepGrid, target) -> Optional[Path]:
    """Write the schema CSV to a path or an open text handle (e.g. stdout)."""
    if hasattr(target, "write"):
        _write_grid_rows(grid, target)
        return None
    path = Path(target)
    with path.open("w", newline="") as handle:
        _write_grid_rows(grid, handle)
    return path


def _write_grid_rows(grid: SweepGrid, handle) -> None:
    writer = csv.writer(handle)
    writer.writerow(CSV_COLUMNS)
    for cell in grid.cells:
        writer.writerow(cell_row(cell))


def grid_to_dict(grid: SweepGrid) -> dict:
    return {
        "meta": grid.meta,
        "axes": [
            {
                "name": axis.name,
                "start": axis.start,
                "stop": axis.stop,
                "steps": axis.steps,
                "scale": axis.scale,
                "unit": axis.unit,
            }
            for axis in grid.axes
        ],
        "cells": [
            {
                "index": cell.index,
                "coords": cell.coords,
                "T_over_r": cell.t_over_r,
                "omega": cell.omega,
                "L": cell.length,
                "N": cell.cutoff,
                "boundary": cell.boundary,
                "values": cell.values,
                "spacelike_neighbors": cell.spacelike_neighbors,
                "spacelike_extremes": cell.spacelike_extremes,
                "status": cell.status,
            }
            for cell in grid.cells
        ],
    }


def write_grid_json(grid: SweepGrid, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(json.dumps(grid_to_dict(grid), indent=2) + "\n")
    return path


def write_grid(grid: SweepGrid, path: PathLike, fmt: Optional[str] = None) -> Path:
    fmt = fmt or _sniff_format(path)
    if fmt == "json":
        return write_grid_json(grid, path)
    return write_grid_csv(grid, path)


def _sniff_format(path: PathLike) -> str:
    return "json" if str(path).endswith(".json") else "csv"


def _ordered_unique(values) -> list:
    seen = {}
    for v in values:
        seen.setdefault(v, None)
    return list(seen)


def _axes_from_columns(columns: dict, n_rows: int) -> tuple[SweepAxis, ...]:
    """Reconstruct the axis layout from the varying CSV columns."""
    uniques = {name: _ordered_unique(col) for name, col in columns.items()}
    varying = [name for name, vals in uniques.items() if len(vals) > 1]
    if not varying:
        t = columns["T"][0] if n_rows else 0.0
        return (SweepAxis("T", t, t, max(n_rows, 1)),)
    if len(varying) == 1:
        name = varying[0]
        vals = uniques[name]
        if len(vals) != n_rows:
            raise ValueError("rows are not a simple sweep over one parameter")
        return (_make_axis(name, vals),)
    if len(varying) != 2:
        raise ValueError(f"cannot reconstruct a grid from axes {varying}")
    # the inner axis is the one that changes between consecutive rows
    a, b = varying
    inner, outer = (a, b) if columns[a][0] != columns[a][1] else (b, a)
    n_inner = len(uniques[inner])
    n_outer = len(uniques[outer])
    if n_inner * n_outer != n_rows:
        raise ValueError(
            f"{n_rows} rows do not fill a {n_outer} x {n_inner} grid"
        )
    expect_inner = uniques[inner] * n_outer
    expect_outer = [v for v in uniques[outer] for _ in range(n_inner)]
    if columns[inner] != expect_inner or columns[outer] != expect_outer:
        raise ValueError("rows are not in row-major grid order")
    return (_make_axis(outer, uniques[outer]), _make_axis(inner, uniques[inner]))


def _make_axis(name: str, values: list) -> SweepAxis:
    return SweepAxis(name, float(values[0]), float(values[-1]), len(values))


def load_grid_csv(path: PathLike) -> SweepGrid:
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != list(CSV_COLUMNS):
            raise ValueError(
                f"{path} does not match the sweep CSV schema "
                f"(got columns {reader.fieldnames})"
            )
        rows = list(reader)
    columns = {
        "T": [float(r["T_over_r"]) for r in rows],
        "Omega": [float(r["omega"]) for r in rows],
        "L": [float(r["L"]) for r in rows],
        "N": [float(r["N"]) for r in rows],
    }
    axes = _axes_from_columns(columns, len(rows))
    names = [axis.name for axis in axes]
    cells = []
    for index, row in enumerate(rows):
        values = {
            name: (float(row[name]) if row[name] != "" else None)
            for name in QUANTITIES
        }
        cells.append(
            SweepCell(
                index=index,
                coords={name: columns[name][index] for name in names},
                t_over_r=columns["T"][index],
                omega=columns["Omega"][index],
                length=columns["L"][index],
                cutoff=int(columns["N"][index]),
                boundary=row["boundary"],
                spacelike_neighbors=row["spacelike_neighbors"] == "true",
                spacelike_extremes=False,  # not part of the schema
                status=row["status"],
                values=values,
            )
        )
    return SweepGrid(axes, tuple(cells), {"source": str(path)})


def load_grid_json(path: PathLike) -> SweepGrid:
    path = Path(path)
    payload = json.loads(path.read_text())
    axes = tuple(
        SweepAxis(
            ax["name"], ax["start"], ax["stop"], ax["steps"],
            ax.get("scale", "linear"), ax.get("unit", ""),
        )
        for ax in payload["axes"]
    )
    cells = []
    for entry in payload["cells"]:
        cells.append(
            SweepCell(
                index=entry["index"],
                coords=entry["coords"],
                t_over_r=entry["T_over_r"],
                omega=entry["omega"],
                length=entry["L"],
                cutoff=entry["N"],
                boundary=entry["boundary"],
                spacelike_neighbors=entry["spacelike_neighbors"],
                spacelike_extremes=entry.get("spacelike_extremes", False),
                status=entry["status"],
                values={
                    name: entry["values"].get(name) for name in QUANTITIES
                },
            )
        )
    meta = dict(payload.get("meta", {}))
    meta.setdefault("source", str(path))
    return SweepGrid(axes, tuple(cells), meta)


def load_grid(path: PathLike) -> SweepGrid:
    if _sniff_format(path) == "json":
        return load_grid_json(path)
    return load_grid_csv(path)


def regions_to_dict(mask: RegionMask) -> dict:
    return {
        "threshold": mask.threshold,
        "axes": [
            {"name": axis.name, "start": axis.start, "stop": axis.stop,
             "steps": axis.steps}
            for axis in mask.axes
        ],
        "masks": {name: np.asarray(m).astype(bool).tolist()
                  for name, m in mask.masks.items()},
        "emergence_axis": mask.emergence_axis,
        "emergence": {name: list(rows) for name, rows in mask.emergence.items()},
    }


def write_regions(mask: RegionMask, base: PathLike, fmt: str = "csv") -> list[Path]:
    """Write mask (and emergence, if present) tables next to ``base``.

    CSV output produces ``<base>.csv`` with one row per cell and, when
    emergence data exists, ``<base>_emergence.csv`` with one row per value of
    the non-time axis.  JSON output is a single ``<base>.json``.
    """
    base = Path(base)
    if fmt == "json":
        path = base.with_suffix(".json")
        path.write_text(json.dumps(regions_to_dict(mask), indent=2) + "\n")
        return [path]
    written = []
    axis_cols = [_AXIS_COLUMN[axis.name] for axis in mask.axes]
    mask_path = base.with_suffix(".csv")
    with mask_path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(axis_cols + [f"in_{name}" for name in QUANTITIES])
        grids = np.meshgrid(*[axis.values for axis in mask.axes], indexing="ij")
        flat_axes = [g.ravel() for g in grids]
        flat_masks = [np.asarray(mask.masks[name]).ravel() for name in QUANTITIES]
        for i in range(flat_axes[0].size):
            row = [_fmt(col[i]) for col in flat_axes]
            row.extend(_fmt_bool(bool(m[i])) for m in flat_masks)
            writer.writerow(row)
    written.append(mask_path)
    if mask.emergence:
        em_path = base.with_name(base.stem + "_emergence.csv")
        other_axis = next(a for a in mask.axes if a.name == mask.emergence_axis)
        with em_path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                [_AXIS_COLUMN[other_axis.name]]
                + [f"T_emerge_{name}" for name in QUANTITIES]
            )
            for k, value in enumerate(other_axis.values):
                row = [_fmt(value)]
                row.extend(_fmt(mask.emergence[name][k]) for name in QUANTITIES)
                writer.writerow(row)
        written.append(em_path)
    return written


def write_convergence(
    study: ConvergenceStudy, path: PathLike, fmt: str = "csv"
) -> Path:
    path = Path(path)
    n_det = study.scenario.detectors.count
    if fmt == "json":
        payload = {
            "rows": [
                {"N": cutoff, "values": _study_values(study, cutoff, n_det)}
                for cutoff, _ in study.rows
            ],
            "final_relative_change": {
                name: study.final_relative_change(name) for name in QUANTITIES
            },
        }
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return path
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["N", *QUANTITIES])
        for cutoff, report in study.rows:
            values = report_values(report, n_det)
            writer.writerow([str(cutoff)] + [_fmt(values[q]) for q in QUANTITIES])
    return path


def _study_values(study: ConvergenceStudy, cutoff: int, n_det: int) -> dict:
    for n, report in study.rows:
        if n == cutoff:
            return report_values(report, n_det)
    raise KeyError(cutoff)


def write_comparison(
    comparison: BoundaryComparison, path: PathLike, fmt: str = "csv"
) -> Path:
    path = Path(path)
    payload = comparison.to_dict()
    if fmt == "json":
        path.write_text(json.dumps(payload, indent=2) + "\n")
        return path
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(payload))
        writer.writerow(
            [
                "" if v is None else (_fmt_bool(v) if isinstance(v, bool) else v)
                for v in payload.values()
            ]
        )
    return path
