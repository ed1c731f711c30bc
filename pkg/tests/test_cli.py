import datetime as dt
import json

import numpy as np
import pytest

from epipolicy.cli import main


def run_cli(*argv):
    return main(list(argv))


def test_fit_changepoint_china_window(tmp_path):
    out = tmp_path / "china.json"
    draws = tmp_path / "draws.csv"
    plot = tmp_path / "plot.csv"
    code = run_cli(
        "fit-changepoint", "--csv", "sample", "--country", "China",
        "--from", "2020-01-22", "--to", "2020-03-10",
        "--policy-start", "2020-01-23",
        "--out", str(out), "--draws-csv", str(draws), "--plot-csv", str(plot),
        "--seed", "42")
    assert code == 0
    report = json.loads(out.read_text())
    assert 13 <= report["take_effect_days"] <= 19   # published lag is 16 days
    assert dt.date(2020, 2, 5) <= dt.date.fromisoformat(report["change_date"]) \
        <= dt.date(2020, 2, 11)
    assert draws.read_text().splitlines()[0] == "w1,w2,b1,b2,tau,noise_scale"
    assert plot.read_text().splitlines()[0] == "t,y,fit"


def test_fit_changepoint_missing_file(tmp_path, capsys):
    code = run_cli("fit-changepoint", "--csv", "/nonexistent.csv",
                   "--country", "China", "--from", "2020-01-22",
                   "--to", "2020-03-10", "--out", str(tmp_path / "x.json"))
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_fit_changepoint_unconverged_exit_code(tmp_path, capsys):
    rng = np.random.default_rng(99)
    n = 25
    values = np.round((np.cumsum(np.exp(rng.normal(0.0, 1.5, n))) + 1) * 100)
    d0 = dt.date(2020, 3, 1)
    lines = ["Date,Country/Region,Confirmed,Deaths,Recovered"]
    for k, v in enumerate(values.astype(int)):
        lines.append(f"{d0 + dt.timedelta(days=k)},Jagged,{v},0,0")
    csv_path = tmp_path / "jagged.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    code = run_cli(
        "fit-changepoint", "--csv", str(csv_path), "--country", "Jagged",
        "--from", "2020-03-01", "--to", "2020-03-25",
        "--out", str(tmp_path / "x.json"),
        "--seed", "0", "--warmup", "60", "--samples", "80")
    assert code == 2
    err = capsys.readouterr().err
    assert "rhat" in err


def test_simulate_preset_writes_outputs(tmp_path):
    out = tmp_path / "run"
    code = run_cli("simulate", "--preset", "no_policy", "--out", str(out))
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["total_deaths"] > 0
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header == "day,S,E,I,R,D,new_cases,new_deaths,Re"
    loss_header = (out / "loss.csv").read_text().splitlines()[0]
    assert loss_header == "day,policy,infection,tracing,death,total,cumulative"
    assert len((out / "trajectory.csv").read_text().splitlines()) == 92


def test_simulate_zero_seed(tmp_path):
    out = tmp_path / "zero"
    code = run_cli("simulate", "--preset", "no_policy", "--seed-infected", "0",
                   "--out", str(out))
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["total_cases"] == 0.0
    assert summary["total_loss"] == 0.0


def test_simulate_invalid_schedule_lists_violations(tmp_path, capsys):
    schedule = {"blocks": [
        {"start": 0, "end": 40, "policies": []},
        {"start": 30, "end": 60, "policies": []},
    ]}
    sched_path = tmp_path / "bad.json"
    sched_path.write_text(json.dumps(schedule))
    code = run_cli("simulate", "--schedule", str(sched_path),
                   "--out", str(tmp_path / "run"))
    assert code == 1
    err = capsys.readouterr().err
    assert "overlapping_blocks" in err


def test_simulate_scenario_file_round_trip(tmp_path):
    scenario = {
        "population": 500000,
        "horizon": 30,
        "seed_infected": 1000,
        "schedule": {"blocks": [{
            "start": 0, "end": 30,
            "policies": [{"id": "masks_hygiene", "intensity": 1.0}],
        }]},
    }
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario))
    out = tmp_path / "run"
    assert run_cli("simulate", "--scenario", str(path), "--out", str(out)) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["loss_components"]["policy"] == pytest.approx(
        2.0 * 500000 * 30)


def test_search_cli_reduced(tmp_path):
    out = tmp_path / "ranked.csv"
    code = run_cli("search", "--block-length", "90", "--substeps", "1",
                   "--workers", "1", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "rank,schedule,total_cases,total_deaths,total_loss"
    assert len(lines) == 34  # header + 33 feasible single-block schedules


def test_fit_virus_multi_run_average(tmp_path):
    out = tmp_path / "virus.json"
    code = run_cli(
        "fit-virus", "--csv", "sample", "--country", "Sweden",
        "--from", "2020-03-01", "--to", "2020-03-31",
        "--population", "10230000", "--out", str(out),
        "--runs", "2", "--warmup", "150", "--samples", "150", "--chains", "2",
        "--seed", "3")
    assert code == 0
    report = json.loads(out.read_text())
    assert report["runs"] == 2
    assert set(report) >= {"recovery_time_days", "incubation_time_days",
                           "r0", "case_fatality"}
