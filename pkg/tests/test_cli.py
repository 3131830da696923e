"""CLI subcommands, flag plumbing and exit codes."""
import json

import pytest

from forestplan import Scenario
from forestplan.cli import main


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "scen.json"
    code = main([
        "genmap", "--kind", "dense-grid", "--size", "160", "--density", "0.18",
        "--seed", "3", "--targets", "4", "--robot-radius", "4",
        "--l", "10", "--imax", "2500", "--bench-seeds", "2", "--out", str(path),
    ])
    assert code == 0
    return path


def test_genmap_writes_a_loadable_scenario(scenario_file):
    scenario = Scenario.load(scenario_file)
    assert scenario.planner == "sff-star"
    assert len(scenario.targets) == 4
    assert scenario.params.step == 10.0
    assert scenario.seeds == [0, 1]


def test_plan_writes_result_and_svg(scenario_file, tmp_path, capsys):
    out = tmp_path / "result.json"
    svg = tmp_path / "plan.svg"
    code = main(["plan", str(scenario_file), "--seed", "5",
                 "--out", str(out), "--svg", str(svg)])
    assert code == 0
    result = json.loads(out.read_text())
    assert result["seed"] == 5
    assert sorted(result["tour"]) == [0, 1, 2, 3]
    assert result["forest"]["nodes"]
    assert svg.read_text().startswith("<?xml")
    assert "tour" in capsys.readouterr().out


def test_plan_respects_planner_override(scenario_file, tmp_path):
    out = tmp_path / "mtr.json"
    code = main(["plan", str(scenario_file), "--planner", "multi-t-rrt",
                 "--imax", "8000", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["planner"] == "multi-t-rrt"


def test_bench_writes_statistics(scenario_file, tmp_path, capsys):
    out_dir = tmp_path / "run"
    code = main(["bench", str(scenario_file), "--out-dir", str(out_dir)])
    assert code == 0
    data = json.loads((out_dir / "runstats.json").read_text())
    assert len(data["records"]) == 2
    assert data["failures"] == 0
    assert (out_dir / "records.csv").exists()
    assert (out_dir / "hist_tsp_cost.csv").exists()
    assert "tsp_cost" in capsys.readouterr().out


def test_compare_two_runs(scenario_file, tmp_path, capsys):
    run_a = tmp_path / "a"
    run_b = tmp_path / "b"
    assert main(["bench", str(scenario_file), "--out-dir", str(run_a)]) == 0
    assert main(["bench", str(scenario_file), "--out-dir", str(run_b),
                 "--planner", "nr-sff-star"]) == 0
    report_path = tmp_path / "cmp.json"
    code = main(["compare", str(run_a / "runstats.json"), str(run_b / "runstats.json"),
                 "--out", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["planner_a"] == "sff-star"
    assert report["planner_b"] == "nr-sff-star"
    assert "alpha" in capsys.readouterr().out


def test_invalid_scenario_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 42}')
    assert main(["plan", str(bad)]) == 2
    assert "version" in capsys.readouterr().err


def test_unknown_planner_exits_2(scenario_file, capsys):
    assert main(["plan", str(scenario_file), "--planner", "astar"]) == 2
    assert "unknown planner" in capsys.readouterr().err


def test_unreachable_targets_exit_3(scenario_file, capsys):
    assert main(["plan", str(scenario_file), "--imax", "2", "--d", "0.5"]) == 3
    assert "planning failed" in capsys.readouterr().err


def test_too_dense_genmap_exits_3(tmp_path, capsys):
    code = main(["genmap", "--kind", "dense-grid", "--density", "0.9",
                 "--out", str(tmp_path / "x.json")])
    assert code == 3
    assert "planning failed" in capsys.readouterr().err


def test_missing_subcommand_exits_2():
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2
