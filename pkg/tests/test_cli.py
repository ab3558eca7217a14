import csv
import json
import math

import numpy as np
import pytest

from cavity_harvest.cli import (
    CliError,
    main,
    parse_angular,
    parse_axis,
    parse_duration,
    parse_position,
)
from cavity_harvest.gridio import CSV_COLUMNS, load_grid


class TestParsers:
    def test_angular_pi_suffix(self):
        assert parse_angular("0.4pi") == pytest.approx(0.4 * math.pi)
        assert parse_angular("pi") == pytest.approx(math.pi)
        assert parse_angular("2*pi") == pytest.approx(2 * math.pi)
        assert parse_angular("1.5") == 1.5
        assert parse_angular(2.0) == 2.0

    def test_angular_garbage_rejected(self):
        with pytest.raises(CliError):
            parse_angular("about pi")

    def test_duration_r_suffix(self):
        assert parse_duration("1.5r") == (1.5, "r")
        assert parse_duration("r") == (1.0, "r")
        assert parse_duration("4.2") == (4.2, "abs")
        assert parse_duration(3) == (3.0, "abs")

    def test_duration_garbage_rejected(self):
        with pytest.raises(CliError):
            parse_duration("soon")

    def test_position_fractions(self):
        assert parse_position("L/6", 12.0) == pytest.approx(2.0)
        assert parse_position("5L/6", 12.0) == pytest.approx(10.0)
        assert parse_position("0.5L", 12.0) == pytest.approx(6.0)
        assert parse_position("L", 12.0) == pytest.approx(12.0)
        assert parse_position("3.5", 12.0) == 3.5

    def test_position_garbage_rejected(self):
        with pytest.raises(CliError):
            parse_position("left wall", 12.0)

    def test_axis_forms(self):
        axis = parse_axis("T=0.05:2:120")
        assert (axis.name, axis.steps, axis.unit) == ("T", 120, "r")
        axis = parse_axis("Omega=0.05pi:2pi:50")
        assert axis.start == pytest.approx(0.05 * math.pi)
        assert parse_axis("N=10:40:3:log").scale == "log"
        assert parse_axis("omega=1:2:5").name == "Omega"

    def test_axis_garbage_rejected(self):
        with pytest.raises(CliError, match="axis"):
            parse_axis("T:1:2:3")
        with pytest.raises(CliError, match="axis name"):
            parse_axis("Q=1:2:3")
        with pytest.raises(CliError):
            parse_axis("T=1:2")


class TestPoint:
    def test_point_stdout(self, capsys):
        code = main(
            ["point", "--boundary", "dirichlet", "--omega", "0.4pi",
             "--time", "1r", "--modes", "16"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "E_12" in out
        assert "E_2_vs_13" in out
        assert "method[d2|rest]  localization" in out

    def test_point_writes_single_row(self, tmp_path, capsys):
        out = tmp_path / "point.csv"
        code = main(
            ["point", "--omega", "0.4pi", "--time", "1.5r", "--modes", "16",
             "--out", str(out)]
        )
        assert code == 0
        with out.open() as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == list(CSV_COLUMNS)
        assert len(rows) == 2
        assert rows[1][4] == "periodic"

    def test_missing_omega_exits_1(self, capsys):
        assert main(["point", "--time", "1r"]) == 1
        assert "omega" in capsys.readouterr().err

    def test_missing_time_exits_1(self, capsys):
        assert main(["point", "--omega", "1.0"]) == 1
        assert "time" in capsys.readouterr().err


class TestConfig:
    def test_config_supplies_settings(self, tmp_path, capsys):
        config = tmp_path / "scenario.json"
        config.write_text(json.dumps({
            "boundary": "dirichlet",
            "omega": "0.4pi",
            "time": "1r",
            "modes": 16,
            "positions": ["L/6", "L/2", "5L/6"],
        }))
        assert main(["point", "--config", str(config)]) == 0
        assert "dirichlet" in capsys.readouterr().out

    def test_flags_override_config(self, tmp_path, capsys):
        config = tmp_path / "scenario.json"
        config.write_text(json.dumps({"boundary": "dirichlet", "omega": 1.0, "time": 2.0}))
        assert main(["point", "--config", str(config), "--boundary", "periodic",
                     "--modes", "16"]) == 0
        assert "periodic" in capsys.readouterr().out

    def test_unknown_key_exits_1(self, tmp_path, capsys):
        config = tmp_path / "scenario.json"
        config.write_text(json.dumps({"omege": 1.0}))
        assert main(["point", "--config", str(config), "--time", "1r",
                     "--omega", "1"]) == 1
        assert "omege" in capsys.readouterr().err

    def test_malformed_json_exits_1(self, tmp_path, capsys):
        config = tmp_path / "scenario.json"
        config.write_text("{not json")
        assert main(["point", "--config", str(config)]) == 1
        assert "JSON" in capsys.readouterr().err


class TestSweepCommand:
    def test_sweep_to_file_with_figures(self, tmp_path, capsys):
        out = tmp_path / "grid.csv"
        code = main(
            ["sweep", "--modes", "12", "--axis", "T=0.3:1.8:4",
             "--axis", "Omega=0.5:2:3", "--out", str(out)]
        )
        assert code == 0
        grid = load_grid(out)
        assert grid.shape == (4, 3)
        pngs = sorted(p.name for p in tmp_path.glob("*.png"))
        assert "grid_E_tri.png" in pngs

    def test_no_figures_flag(self, tmp_path):
        out = tmp_path / "grid.csv"
        main(["sweep", "--modes", "12", "--axis", "T=0.3:1.8:3",
              "--axis", "Omega=0.5:2:2", "--out", str(out), "--no-figures"])
        assert list(tmp_path.glob("*.png")) == []

    def test_sweep_stdout(self, capsys):
        code = main(["sweep", "--modes", "12", "--omega", "0.4pi",
                     "--axis", "T=0.5:1.5:3", "--no-figures"])
        out = capsys.readouterr().out
        assert code == 0
        assert out.startswith("T_over_r")
        assert len(out.strip().splitlines()) == 4

    def test_failure_budget_exit_2(self, tmp_path, capsys):
        out = tmp_path / "grid.csv"
        code = main(["sweep", "--omega", "0.4pi", "--time", "1r",
                     "--axis", "N=9:11:3", "--out", str(out), "--no-figures"])
        assert code == 2
        assert "budget" in capsys.readouterr().err
        assert out.exists()

    def test_json_format(self, tmp_path):
        out = tmp_path / "grid.json"
        main(["sweep", "--modes", "12", "--axis", "T=0.5:1.5:2",
              "--axis", "Omega=1:2:2", "--out", str(out), "--no-figures",
              "--format", "json"])
        payload = json.loads(out.read_text())
        assert len(payload["cells"]) == 4

    def test_workers_flag(self, tmp_path):
        out = tmp_path / "grid.csv"
        code = main(["sweep", "--modes", "12", "--axis", "T=0.5:1.5:2",
                     "--axis", "Omega=1:2:2", "--out", str(out),
                     "--workers", "2", "--no-figures"])
        assert code == 0
        assert load_grid(out).n_failed == 0


class TestConvergeCommand:
    def test_table_and_file(self, tmp_path, capsys):
        out = tmp_path / "conv.csv"
        code = main(["converge", "--boundary", "dirichlet", "--omega", "0.4pi",
                     "--time", "1r", "--n-values", "8,16,24",
                     "--out", str(out), "--no-figures"])
        assert code == 0
        assert "final relative change" in capsys.readouterr().out
        with out.open() as handle:
            rows = list(csv.reader(handle))
        assert [r[0] for r in rows] == ["N", "8", "16", "24"]

    def test_bad_n_values_exit_1(self, capsys):
        code = main(["converge", "--omega", "1", "--time", "1r",
                     "--n-values", "16,8"])
        assert code == 1
        assert "ascending" in capsys.readouterr().err


@pytest.fixture(scope="module")
def saved_grids(tmp_path_factory):
    base = tmp_path_factory.mktemp("grids")
    for boundary in ("periodic", "dirichlet"):
        code = main(
            ["sweep", "--boundary", boundary, "--modes", "16",
             "--axis", "T=0.2:2:8", "--axis", "Omega=0.5:3:4",
             "--out", str(base / f"{boundary}.csv"), "--no-figures"]
        )
        assert code == 0
    return base / "periodic.csv", base / "dirichlet.csv"


class TestRegionsAndCompare:
    def test_regions_outputs(self, saved_grids, tmp_path, capsys):
        periodic, _ = saved_grids
        out = tmp_path / "regions"
        code = main(["regions", str(periodic), "--threshold", "1e-10",
                     "--out", str(out)])
        assert code == 0
        assert (tmp_path / "regions.csv").exists()
        assert (tmp_path / "regions_emergence.csv").exists()
        assert (tmp_path / "regions.png").exists()
        assert "emerges at" in capsys.readouterr().out

    def test_compare_outputs(self, saved_grids, tmp_path, capsys):
        periodic, dirichlet = saved_grids
        out = tmp_path / "cmp"
        code = main(["compare", str(periodic), str(dirichlet),
                     "--out", str(out), "--no-figures"])
        assert code == 0
        text = capsys.readouterr().out
        assert "periodic_earlier" in text
        assert (tmp_path / "cmp.csv").exists()

    def test_compare_swapped_grids_exit_1(self, saved_grids, capsys):
        periodic, dirichlet = saved_grids
        code = main(["compare", str(dirichlet), str(periodic), "--no-figures"])
        assert code == 1

    def test_regions_missing_file_exit_1(self, tmp_path, capsys):
        code = main(["regions", str(tmp_path / "nope.csv")])
        assert code == 1


class TestArgumentErrors:
    def test_unknown_subcommand_exits_1(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["harvest-all-the-things"])
        assert excinfo.value.code == 1

    def test_bad_flag_exits_1(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["point", "--frequency", "1"])
        assert excinfo.value.code == 1

    def test_bad_axis_exits_1(self, capsys):
        assert main(["sweep", "--axis", "Q=1:2:3"]) == 1
        assert "axis name" in capsys.readouterr().err

    def test_version_exits_0(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
