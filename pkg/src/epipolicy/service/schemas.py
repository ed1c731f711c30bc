"""Pydantic request/response models for the HTTP API."""
from __future__ import annotations

import datetime as dt

from pydantic import BaseModel, Field


class PolicyAssignmentIn(BaseModel):
    id: str
    intensity: float


class ScheduleBlockIn(BaseModel):
    start: int
    end: int
    policies: list[PolicyAssignmentIn] = Field(default_factory=list)


class ScheduleIn(BaseModel):
    blocks: list[ScheduleBlockIn] = Field(default_factory=list)


class ParamsOverride(BaseModel):
    r0: float | None = None
    gamma: float | None = None
    sigma: float | None = None
    mu: float | None = None
    alpha: float | None = None


class IcuOverride(BaseModel):
    icu_fraction: float | None = None
    icu_beds_per_capita: float | None = None
    fatality_treated: float | None = None
    fatality_untreated: float | None = None


class EconOverride(BaseModel):
    gdp_per_capita: float | None = None
    lockdown_gdp_frac: float | None = None
    distancing_gdp_frac: float | None = None
    masks_cost: float | None = None
    infection_cost: float | None = None
    tracing_cost: float | None = None
    death_cost: float | None = None


class SimulateRequest(BaseModel):
    population: float = 1_000_000.0
    gdp_per_capita: float = 30_000.0
    horizon: int = 90
    seed_infected: float = 9_000.0
    substeps: int = 4
    label: str = ""
    params: ParamsOverride | None = None
    icu: IcuOverride | None = None
    econ: EconOverride | None = None
    schedule: ScheduleIn = Field(default_factory=ScheduleIn)

    def as_scenario_dict(self) -> dict:
        return {
            "population": self.population,
            "gdp_per_capita": self.gdp_per_capita,
            "horizon": self.horizon,
            "seed_infected": self.seed_infected,
            "substeps": self.substeps,
            "label": self.label,
            "params": self.params.model_dump() if self.params else None,
            "icu": self.icu.model_dump(exclude_none=True) if self.icu else None,
            "econ": self.econ.model_dump(exclude_none=True) if self.econ else None,
            "schedule": self.schedule.model_dump(),
        }


class TrajectoryOut(BaseModel):
    days: list[int]
    s: list[float]
    e: list[float]
    i: list[float]
    r: list[float]
    d: list[float]
    new_exposed: list[float]
    new_infectious: list[float]
    new_recovered: list[float]
    new_deaths: list[float]
    re: list[float]


class LossOut(BaseModel):
    policy: list[float]
    infection: list[float]
    tracing: list[float]
    death: list[float]
    total: list[float]
    cumulative: list[float]


class TotalsOut(BaseModel):
    total_cases: float
    total_deaths: float
    total_loss: float
    policy: float
    infection: float
    tracing: float
    death: float


class SimulateResponse(BaseModel):
    label: str
    schedule: dict
    trajectory: TrajectoryOut
    loss: LossOut
    totals: TotalsOut


class PolicyOut(BaseModel):
    id: str
    efficiency: float
    cost_kind: str
    cost_magnitude: float
    tracing_cost_per_case: float
    lag_days: int


class PoliciesResponse(BaseModel):
    policies: list[PolicyOut]
    vaccine_efficiency: float
    intensity_levels: list[float]


class SearchRequest(BaseModel):
    scenario: SimulateRequest = Field(default_factory=SimulateRequest)
    block_length: int = 30
    top_k: int = 20
    cap: int | None = None
    workers: int | None = None


class RankedResultOut(BaseModel):
    rank: int
    encoding: str
    schedule: dict
    total_cases: float
    total_deaths: float
    total_loss: float


class SearchResponse(BaseModel):
    evaluated: int
    results: list[RankedResultOut]


class ChangepointRequest(BaseModel):
    country: str = ""
    dates: list[dt.date]
    values: list[float]
    policy_start: dt.date | None = None
    seed: int | None = None
    num_warmup: int = 1000
    num_samples: int = 1000
    num_chains: int = 4


class ChangepointResponse(BaseModel):
    country: str
    date_range: list[str]
    policy_start: str | None
    w1: float
    w2: float
    w1_per_day: float
    w2_per_day: float
    tau: float
    noise_scale: float
    change_date: str
    efficiency: float
    efficiency_interval: list[float]
    take_effect_days: int | None
    rhat: dict[str, float]
    ess: dict[str, float]


class ViolationOut(BaseModel):
    rule: str
    message: str
    block_index: int | None = None


class ValidationErrorResponse(BaseModel):
    detail: str
    violations: list[ViolationOut]
