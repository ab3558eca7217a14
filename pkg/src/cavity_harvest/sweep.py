"""Parameter-sweep orchestration: single points, grids, convergence, regions.

A scenario fixes cavity, detector array, and evolution time.  Sweeps vary up
to two of (T, Omega, L, N) over a grid, reusing one diagonalized evolution
engine per Hamiltonian (i.e. per distinct (L, N, Omega) combination), which
is what keeps dense time sweeps fast.  Durations are usually quoted in units
of the light-crossing time r = L/3 between adjacent detectors of the
standard equidistant alignment.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .cavity import Boundary, CavitySpec, DetectorArraySpec, detector_labels
from .entanglement import EntanglementReport, analyze_detectors
from .evolution import ConditioningError, EvolutionEngine, detector_state

#: CSV value columns, in schema order
QUANTITIES = (
    "E_12",
    "E_13",
    "E_23",
    "E_1_vs_23",
    "E_2_vs_13",
    "E_3_vs_12",
    "E_tri",
)

AXIS_NAMES = ("T", "Omega", "L", "N")


def default_positions(length: float) -> tuple[float, float, float]:
    """The standard equidistant alignment: L/6, L/2, 5L/6.

    On the periodic ring the three detectors are then mutually equidistant
    (separation L/3); with Dirichlet walls the outer pair is mirror symmetric
    about the middle one.
    """
    return (length / 6.0, length / 2.0, 5.0 * length / 6.0)


@dataclass(frozen=True)
class ScenarioSpec:
    """One fully specified simulation: cavity, detectors, evolution time."""

    cavity: CavitySpec
    detectors: DetectorArraySpec
    duration: float

    def __post_init__(self):
        duration = float(self.duration)
        if not np.isfinite(duration) or duration < 0:
            raise ValueError(f"duration must be non-negative, got {duration}")
        object.__setattr__(self, "duration", duration)

    @property
    def light_crossing(self) -> float:
        """Adjacent-detector light-crossing time r = L/3 of the standard alignment."""
        return self.cavity.length / 3.0

    @property
    def t_over_r(self) -> float:
        return self.duration / self.light_crossing

    @classmethod
    def standard(
        cls,
        boundary: Boundary | str,
        *,
        length: float = 10.0,
        cutoff: int = 50,
        omega: float,
        coupling: float = 0.01,
        duration: float,
        positions: Optional[Sequence[float]] = None,
    ) -> "ScenarioSpec":
        cavity = CavitySpec(length, Boundary(boundary), cutoff)
        pos = tuple(positions) if positions is not None else default_positions(length)
        return cls(cavity, DetectorArraySpec(pos, omega, coupling), duration)


def pairwise_separations(
    boundary: Boundary, length: float, positions: Sequence[float]
) -> tuple[float, ...]:
    """Sorted detector separations; periodic distances wrap around the ring."""
    seps = []
    for a, b in itertools.combinations(positions, 2):
        d = abs(a - b)
        if Boundary(boundary) is Boundary.PERIODIC:
            d = min(d, length - d)
        seps.append(d)
    return tuple(sorted(seps))


@dataclass(frozen=True)
class SweepAxis:
    """One swept parameter.

    ``name`` is one of T, Omega, L, N.  The T axis defaults to light-crossing
    units (``unit="r"``); pass ``unit="abs"`` for absolute times.  ``scale``
    may be "linear" or "log".
    """

    name: str
    start: float
    stop: float
    steps: int
    scale: str = "linear"
    unit: str = ""

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"axis scale must be linear or log, got {self.scale!r}")
        if int(self.steps) < 1:
            raise ValueError(f"axis needs at least 1 step, got {self.steps}")
        if not (np.isfinite(self.start) and np.isfinite(self.stop)):
            raise ValueError("axis endpoints must be finite")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ValueError("log axes need positive endpoints")
        unit = self.unit
        if self.name == "T":
            unit = unit or "r"
            if unit not in ("r", "abs"):
                raise ValueError(f"time axis unit must be r or abs, got {unit!r}")
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "stop", float(self.stop))
        object.__setattr__(self, "unit", unit)

    @property
    def values(self) -> np.ndarray:
        if self.steps == 1:
            vals = np.array([self.start])
        elif self.scale == "log":
            vals = np.geomspace(self.start, self.stop, self.steps)
        else:
            vals = np.linspace(self.start, self.stop, self.steps)
        if self.name == "N":
            ints = np.rint(vals).astype(int)
            if len(np.unique(ints)) != len(ints):
                raise ValueError("mode-count axis rounds to duplicate values")
            return ints
        return vals


@dataclass(frozen=True)
class SweepCell:
    """One evaluated grid point, carrying everything the CSV schema needs."""

    index: int
    coords: dict
    t_over_r: float
    omega: float
    length: float
    cutoff: int
    boundary: str
    spacelike_neighbors: bool
    spacelike_extremes: bool
    status: str
    values: dict
    report: Optional[EntanglementReport] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class SweepGrid:
    """Row-major grid of cells over one or two axes, plus run metadata."""

    axes: tuple[SweepAxis, ...]
    cells: tuple[SweepCell, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = int(np.prod([axis.steps for axis in self.axes]))
        if len(self.cells) != expected:
            raise ValueError(
                f"grid has {len(self.cells)} cells, axes imply {expected}"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(axis.steps for axis in self.axes)

    @property
    def n_failed(self) -> int:
        return sum(not cell.ok for cell in self.cells)

    def value_array(self, quantity: str) -> np.ndarray:
        """Values of one quantity on the grid; NaN where missing or failed."""
        if quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {quantity!r}")
        flat = np.full(len(self.cells), np.nan)
        for cell in self.cells:
            value = cell.values.get(quantity)
            if cell.ok and value is not None:
                flat[cell.index] = value
        return flat.reshape(self.shape)


def _middle_label(detectors: DetectorArraySpec) -> str:
    order = np.argsort(detectors.positions)
    return detector_labels(detectors.count)[order[len(order) // 2]]


def _describe(scenario: ScenarioSpec) -> str:
    return (
        f"(boundary={scenario.cavity.boundary.value}, L={scenario.cavity.length}, "
        f"N={scenario.cavity.cutoff}, Omega={scenario.detectors.omega}, "
        f"coupling={scenario.detectors.coupling}, T={scenario.duration})"
    )


def run_point(
    scenario: ScenarioSpec,
    *,
    engine: Optional[EvolutionEngine] = None,
    full_one_vs_rest: bool = False,
) -> EntanglementReport:
    """Evolve the vacuum for one scenario and analyze the detector block.

    With three detectors and Dirichlet walls only the middle-vs-sides
    bipartition is computed by default (the sides are mirror symmetric, the
    others are not, and the tripartite estimator needs all three); pass
    ``full_one_vs_rest=True`` to force every bipartition via the
    partial-transpose route and form the estimator anyway.
    """
    started = time.perf_counter()
    if engine is None:
        engine = EvolutionEngine.from_specs(scenario.cavity, scenario.detectors)
    try:
        state = engine.evolve_vacuum(scenario.duration)
    except ConditioningError as exc:
        raise ConditioningError(f"{exc} at {_describe(scenario)}") from exc
    reduced = detector_state(state, scenario.detectors.count)
    solos = None
    if (
        scenario.detectors.count == 3
        and scenario.cavity.boundary is Boundary.DIRICHLET
        and not full_one_vs_rest
    ):
        solos = (_middle_label(scenario.detectors),)
    report = analyze_detectors(reduced, symmetric_hint=not full_one_vs_rest, solos=solos)
    return replace(
        report,
        cutoff=scenario.cavity.cutoff,
        elapsed_s=time.perf_counter() - started,
    )


def report_values(report: EntanglementReport, n_detectors: int) -> dict:
    """Map a report onto the CSV quantity columns; absent quantities are None."""
    labels = detector_labels(n_detectors)
    values = {name: None for name in QUANTITIES}
    for (a, b), val in report.pairwise.items():
        i, j = sorted((labels.index(a), labels.index(b)))
        values[f"E_{i + 1}{j + 1}"] = val
    if n_detectors == 3:
        others = {0: "23", 1: "13", 2: "12"}
        for label, val in report.one_vs_rest.items():
            i = labels.index(label)
            values[f"E_{i + 1}_vs_{others[i]}"] = val
        if report.tripartite is not None:
            values["E_tri"] = report.tripartite
    return values


def _cell_scenario(template: ScenarioSpec, coords: dict, t_unit: str) -> ScenarioSpec:
    length = float(coords.get("L", template.cavity.length))
    cutoff = int(coords.get("N", template.cavity.cutoff))
    omega = float(coords.get("Omega", template.detectors.omega))
    stretch = length / template.cavity.length
    positions = tuple(x * stretch for x in template.detectors.positions)
    cavity = CavitySpec(length, template.cavity.boundary, cutoff)
    detectors = DetectorArraySpec(positions, omega, template.detectors.coupling)
    if "T" in coords:
        t = float(coords["T"])
        duration = t * (length / 3.0) if t_unit == "r" else t
    else:
        # keep the duration fixed in light-crossing units when L is swept
        duration = template.duration * stretch
    return ScenarioSpec(cavity, detectors, duration)


def _build_cell(index: int, coords: dict, scenario: ScenarioSpec, outcome) -> SweepCell:
    seps = pairwise_separations(
        scenario.cavity.boundary, scenario.cavity.length, scenario.detectors.positions
    )
    status, report = outcome
    if report is not None:
        values = report_values(report, scenario.detectors.count)
    else:
        values = {name: None for name in QUANTITIES}
    return SweepCell(
        index=index,
        coords=dict(coords),
        t_over_r=scenario.t_over_r,
        omega=scenario.detectors.omega,
        length=scenario.cavity.length,
        cutoff=scenario.cavity.cutoff,
        boundary=scenario.cavity.boundary.value,
        spacelike_neighbors=bool(seps and scenario.duration < seps[0]),
        spacelike_extremes=bool(seps and scenario.duration < seps[-1]),
        status=status,
        values=values,
        report=report,
    )


def _failed_cell(
    index: int, coords: dict, template: ScenarioSpec, t_unit: str, message: str
) -> SweepCell:
    """Row for a cell whose scenario could not even be constructed."""
    length = float(coords.get("L", template.cavity.length))
    cutoff = int(coords.get("N", template.cavity.cutoff))
    omega = float(coords.get("Omega", template.detectors.omega))
    if "T" in coords:
        t = float(coords["T"])
        t_over_r = t if t_unit == "r" else t / (length / 3.0)
    else:
        t_over_r = template.t_over_r
    stretch = length / template.cavity.length
    positions = tuple(x * stretch for x in template.detectors.positions)
    seps = pairwise_separations(template.cavity.boundary, length, positions)
    duration = t_over_r * length / 3.0
    return SweepCell(
        index=index,
        coords=dict(coords),
        t_over_r=t_over_r,
        omega=omega,
        length=length,
        cutoff=cutoff,
        boundary=template.cavity.boundary.value,
        spacelike_neighbors=bool(seps and duration < seps[0]),
        spacelike_extremes=bool(seps and duration < seps[-1]),
        status=f"failed: {message}",
        values={name: None for name in QUANTITIES},
    )


def _group_key(scenario: ScenarioSpec):
    return (
        scenario.cavity.boundary.value,
        scenario.cavity.length,
        scenario.cavity.cutoff,
        scenario.detectors.positions,
        scenario.detectors.omega,
        scenario.detectors.coupling,
    )


def _evaluate_group(payload):
    """Evaluate all cells sharing one Hamiltonian.  Runs in worker processes."""
    entries, full_one_vs_rest = payload
    engine = None
    results = []
    for index, scenario in entries:
        try:
            if engine is None:
                engine = EvolutionEngine.from_specs(scenario.cavity, scenario.detectors)
            report = run_point(
                scenario, engine=engine, full_one_vs_rest=full_one_vs_rest
            )
            results.append((index, ("ok", report)))
        except Exception as exc:  # record per-cell failures, keep sweeping
            results.append((index, (f"failed: {exc}", None)))
    return results


def sweep(
    template: ScenarioSpec,
    axes: Sequence[SweepAxis],
    *,
    workers: int = 1,
    full_one_vs_rest: bool = False,
) -> SweepGrid:
    """Evaluate a 1- or 2-axis grid of scenarios derived from ``template``.

    Cells are laid out row-major (first axis outermost).  Failures are
    recorded per cell, never raised; check ``grid.n_failed``.  With
    ``workers > 1`` groups of cells sharing a Hamiltonian are distributed
    over processes; assembly order is deterministic either way.
    """
    axes = tuple(axes)
    if not 1 <= len(axes) <= 2:
        raise ValueError(f"sweeps support 1 or 2 axes, got {len(axes)}")
    names = [axis.name for axis in axes]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate sweep axes {names}")
    t_unit = next((axis.unit for axis in axes if axis.name == "T"), "r")

    started = time.perf_counter()
    entries = []
    prebuilt = {}
    for index, combo in enumerate(itertools.product(*(axis.values for axis in axes))):
        coords = dict(zip(names, (float(v) for v in combo)))
        try:
            entries.append((index, coords, _cell_scenario(template, coords, t_unit)))
        except Exception as exc:  # invalid cell, e.g. odd N on a periodic axis
            prebuilt[index] = _failed_cell(index, coords, template, t_unit, str(exc))

    groups = {}
    for index, coords, scenario in entries:
        groups.setdefault(_group_key(scenario), []).append((index, scenario))
    payloads = [(group, full_one_vs_rest) for group in groups.values()]

    outcomes = {}
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for results in pool.map(_evaluate_group, payloads):
                outcomes.update(results)
    else:
        for payload in payloads:
            outcomes.update(_evaluate_group(payload))

    scenarios = {index: scenario for index, _, scenario in entries}
    coords_of = {index: coords for index, coords, _ in entries}
    cells = []
    for index in range(len(entries) + len(prebuilt)):
        if index in prebuilt:
            cells.append(prebuilt[index])
        else:
            cells.append(
                _build_cell(index, coords_of[index], scenarios[index], outcomes[index])
            )

    meta = {
        "version": __version__,
        "boundary": template.cavity.boundary.value,
        "coupling": template.detectors.coupling,
        "axes": [
            {
                "name": axis.name,
                "start": axis.start,
                "stop": axis.stop,
                "steps": axis.steps,
                "scale": axis.scale,
                "unit": axis.unit,
            }
            for axis in axes
        ],
        "elapsed_s": time.perf_counter() - started,
    }
    grid = SweepGrid(axes, tuple(cells), meta)
    meta["n_failed"] = grid.n_failed
    return grid


@dataclass(frozen=True)
class ConvergenceStudy:
    """Reports for one scenario at increasing mode cutoffs."""

    scenario: ScenarioSpec
    rows: tuple  # of (cutoff, EntanglementReport)

    def values_for(self, quantity: str) -> tuple:
        out = []
        for cutoff, report in self.rows:
            out.append((cutoff, report_values(report, self.scenario.detectors.count)[quantity]))
        return tuple(out)

    def final_relative_change(self, quantity: str) -> Optional[float]:
        """Relative change of ``quantity`` between the last two cutoffs."""
        vals = [v for _, v in self.values_for(quantity)]
        if len(vals) < 2 or vals[-1] is None or vals[-2] is None:
            return None
        last, prev = vals[-1], vals[-2]
        if last == 0.0:
            return 0.0 if prev == 0.0 else float("inf")
        return abs(last - prev) / abs(last)


def convergence_study(
    scenario: ScenarioSpec,
    n_values: Sequence[int],
    *,
    full_one_vs_rest: bool = False,
) -> ConvergenceStudy:
    """Re-run one scenario at each mode cutoff in ascending ``n_values``."""
    ns = [int(n) for n in n_values]
    if not ns:
        raise ValueError("need at least one cutoff")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"cutoffs must be strictly ascending, got {ns}")
    rows = []
    for n in ns:
        cavity = CavitySpec(scenario.cavity.length, scenario.cavity.boundary, n)
        scaled = ScenarioSpec(cavity, scenario.detectors, scenario.duration)
        rows.append((n, run_point(scaled, full_one_vs_rest=full_one_vs_rest)))
    return ConvergenceStudy(scenario, tuple(rows))


@dataclass(frozen=True)
class RegionMask:
    """Boolean harvesting regions of a grid at one threshold.

    ``masks[q][...]`` is True where quantity q exceeds the threshold on an
    ok cell.  When the grid has a T axis and a second axis, ``emergence[q]``
    holds the earliest T (in the axis unit) per row of the other axis, None
    where the quantity never rises above threshold.
    """

    axes: tuple[SweepAxis, ...]
    threshold: float
    masks: dict
    emergence: dict
    emergence_axis: Optional[str]

    def earliest(self, quantity: str) -> Optional[float]:
        """Earliest emergence time of ``quantity`` over all rows."""
        times = [t for t in self.emergence.get(quantity, ()) if t is not None]
        return min(times) if times else None

    def cell_count(self, quantity: str) -> int:
        return int(np.sum(self.masks[quantity]))


def extract_regions(grid: SweepGrid, epsilon: float) -> RegionMask:
    """Threshold every quantity on the grid at ``epsilon``.

    Failed cells are excluded from all masks.  Masks shrink monotonically as
    epsilon grows.
    """
    epsilon = float(epsilon)
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise ValueError(f"threshold must be positive, got {epsilon}")
    masks = {}
    for quantity in QUANTITIES:
        arr = grid.value_array(quantity)
        masks[quantity] = np.where(np.isnan(arr), False, arr > epsilon)

    emergence = {}
    emergence_axis = None
    names = [axis.name for axis in grid.axes]
    if "T" in names and len(grid.axes) == 2:
        t_pos = names.index("T")
        other = 1 - t_pos
        emergence_axis = names[other]
        t_values = grid.axes[t_pos].values
        for quantity, mask in masks.items():
            rows = []
            for k in range(grid.axes[other].steps):
                line = mask[:, k] if t_pos == 0 else mask[k, :]
                hit = np.flatnonzero(line)
                rows.append(float(t_values[hit[0]]) if hit.size else None)
            emergence[quantity] = tuple(rows)
    return RegionMask(grid.axes, epsilon, masks, emergence, emergence_axis)


@dataclass(frozen=True)
class BoundaryComparison:
    """Periodic-vs-Dirichlet comparison of one quantity's harvesting region."""

    quantity: str
    threshold: float
    emergence_periodic: Optional[float]
    emergence_dirichlet: Optional[float]
    periodic_earlier: Optional[bool]
    periodic_cells: int
    dirichlet_cells: int
    periodic_only_cells: int
    dirichlet_only_cells: int
    periodic_only_spacelike_cells: int

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "threshold": self.threshold,
            "emergence_periodic": self.emergence_periodic,
            "emergence_dirichlet": self.emergence_dirichlet,
            "periodic_earlier": self.periodic_earlier,
            "periodic_cells": self.periodic_cells,
            "dirichlet_cells": self.dirichlet_cells,
            "periodic_only_cells": self.periodic_only_cells,
            "dirichlet_only_cells": self.dirichlet_only_cells,
            "periodic_only_spacelike_cells": self.periodic_only_spacelike_cells,
        }


def compare_boundaries(
    periodic_grid: SweepGrid,
    dirichlet_grid: SweepGrid,
    epsilon: float,
    quantity: str = "E_12",
) -> BoundaryComparison:
    """Compare where one quantity is harvested under the two wall types.

    Both grids must share identical axes.  The comparison thresholds the
    chosen quantity (a neighbor pair by default), finds each grid's earliest
    emergence time, and counts cells harvested under one boundary only,
    including the subset still spacelike separated from the nearest neighbor.
    """
    for grid, expected in ((periodic_grid, "periodic"), (dirichlet_grid, "dirichlet")):
        boundaries = {cell.boundary for cell in grid.cells}
        if boundaries != {expected}:
            raise ValueError(f"expected a pure {expected} grid, found {boundaries}")
    if len(periodic_grid.axes) != len(dirichlet_grid.axes):
        raise ValueError("grids have different axis counts")
    for ax_p, ax_d in zip(periodic_grid.axes, dirichlet_grid.axes):
        if ax_p.name != ax_d.name or not np.array_equal(ax_p.values, ax_d.values):
            raise ValueError(
                f"axis mismatch: {ax_p.name!r} differs between the two grids"
            )

    mask_p = extract_regions(periodic_grid, epsilon)
    mask_d = extract_regions(dirichlet_grid, epsilon)
    only_p = mask_p.masks[quantity] & ~mask_d.masks[quantity]
    only_d = mask_d.masks[quantity] & ~mask_p.masks[quantity]
    spacelike = np.array(
        [cell.spacelike_neighbors for cell in periodic_grid.cells]
    ).reshape(periodic_grid.shape)

    e_p = mask_p.earliest(quantity)
    e_d = mask_d.earliest(quantity)
    earlier = None if e_p is None or e_d is None else bool(e_p < e_d)
    return BoundaryComparison(
        quantity=quantity,
        threshold=float(epsilon),
        emergence_periodic=e_p,
        emergence_dirichlet=e_d,
        periodic_earlier=earlier,
        periodic_cells=mask_p.cell_count(quantity),
        dirichlet_cells=mask_d.cell_count(quantity),
        periodic_only_cells=int(np.sum(only_p)),
        dirichlet_only_cells=int(np.sum(only_d)),
        periodic_only_spacelike_cells=int(np.sum(only_p & spacelike)),
    )
