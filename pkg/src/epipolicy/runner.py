"""Shared scenario assembly and result serialization.

Both the CLI and the HTTP service build scenarios and format results
through these helpers, so the two front ends produce identical numbers for
identical inputs by construction.
"""
from __future__ import annotations

import csv
import io
from dataclasses import replace

from .econ import EconParams
from .policy import PolicySchedule
from .scenario import (
    DEFAULT_HORIZON,
    DEFAULT_POPULATION,
    DEFAULT_SEED_INFECTED,
    DEFAULT_SUBSTEPS,
    RankedResult,
    Scenario,
    ScenarioResult,
)
from .seird import IcuModel, reference_params


def scenario_from_dict(data: dict) -> Scenario:
    """Build a Scenario from a plain JSON-style dict (missing keys default)."""
    n = float(data.get("population", DEFAULT_POPULATION))
    gdp = float(data.get("gdp_per_capita", 30_000.0))
    horizon = int(data.get("horizon", DEFAULT_HORIZON))
    seed_infected = float(data.get("seed_infected", DEFAULT_SEED_INFECTED))
    substeps = int(data.get("substeps", DEFAULT_SUBSTEPS))

    params = reference_params(n)
    overrides = data.get("params") or {}
    known = {k: float(v) for k, v in overrides.items()
             if k in ("r0", "gamma", "sigma", "mu", "alpha") and v is not None}
    if known:
        params = replace(params, **known)

    icu_overrides = {k: float(v) for k, v in (data.get("icu") or {}).items()
                     if v is not None}
    icu = IcuModel(**icu_overrides)
    econ_overrides = {k: float(v) for k, v in (data.get("econ") or {}).items()
                      if v is not None}
    econ = EconParams(**econ_overrides)

    schedule = data.get("schedule")
    if schedule is None:
        schedule = PolicySchedule.empty()
    elif isinstance(schedule, dict):
        schedule = PolicySchedule.from_json_dict(schedule)

    return Scenario(n=n, gdp_per_capita=gdp, horizon=horizon,
                    seed_infected=seed_infected, params=params, icu=icu,
                    econ=econ, schedule=schedule, substeps=substeps,
                    label=str(data.get("label", "")))


def result_to_dict(result: ScenarioResult) -> dict:
    """ScenarioResult as JSON-ready per-day arrays plus totals."""
    traj = result.trajectory
    loss = result.loss
    horizon = traj.horizon
    return {
        "label": result.label,
        "schedule": result.schedule.to_json_dict(),
        "trajectory": {
            "days": list(range(horizon + 1)),
            "s": [st.s for st in traj.states],
            "e": [st.e for st in traj.states],
            "i": [st.i for st in traj.states],
            "r": [st.r for st in traj.states],
            "d": [st.d for st in traj.states],
            "new_exposed": [fl.new_exposed for fl in traj.flows],
            "new_infectious": [fl.new_infectious for fl in traj.flows],
            "new_recovered": [fl.new_recovered for fl in traj.flows],
            "new_deaths": [fl.new_deaths for fl in traj.flows],
            "re": list(traj.re),
        },
        "loss": {
            "policy": loss.policy.tolist(),
            "infection": loss.infection.tolist(),
            "tracing": loss.tracing.tolist(),
            "death": loss.death.tolist(),
            "total": loss.total.tolist(),
            "cumulative": loss.cumulative().tolist(),
        },
        "totals": {
            "total_cases": loss.total_cases,
            "total_deaths": loss.total_deaths,
            "total_loss": loss.total_loss,
            **{k: v for k, v in loss.component_totals().items() if k != "total"},
        },
    }


def trajectory_csv(result: ScenarioResult) -> str:
    """Per-day compartments and flows; new_cases is the E->I flow."""
    traj = result.trajectory
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["day", "S", "E", "I", "R", "D", "new_cases", "new_deaths", "Re"])
    for day, st in enumerate(traj.states):
        if day < traj.horizon:
            fl = traj.flows[day]
            w.writerow([day, st.s, st.e, st.i, st.r, st.d,
                        fl.new_infectious, fl.new_deaths, traj.re[day]])
        else:
            w.writerow([day, st.s, st.e, st.i, st.r, st.d, "", "", ""])
    return out.getvalue()


def loss_csv(result: ScenarioResult) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["day", "policy", "infection", "tracing", "death", "total",
                "cumulative"])
    for row in result.loss.to_rows():
        w.writerow([row["day"], row["policy"], row["infection"], row["tracing"],
                    row["death"], row["total"], row["cumulative"]])
    return out.getvalue()


def summary_dict(result: ScenarioResult) -> dict:
    return {
        "label": result.label,
        "total_cases": result.total_cases,
        "total_deaths": result.total_deaths,
        "total_loss": result.total_loss,
        "loss_components": result.loss.component_totals(),
        "schedule": result.schedule.to_json_dict(),
    }


def search_results_csv(results: list[RankedResult]) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["rank", "schedule", "total_cases", "total_deaths", "total_loss"])
    for r in results:
        w.writerow([r.rank, r.encoding, r.total_cases, r.total_deaths,
                    r.total_loss])
    return out.getvalue()
