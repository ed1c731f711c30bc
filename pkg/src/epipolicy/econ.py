"""Dollar-denominated loss accounting for epidemic scenarios.

Four cost channels accrue per day:
  * policy running costs (GDP-fraction policies prorated over a 365-day
    year, per-capita policies at their daily rate, both scaled by intensity)
  * treatment of active infections ($ per infected per day)
  * contact tracing ($ per newly confirmed case, scaled by the tracing
    policy's intensity)
  * human-capital cost of deaths ($ per death)

"New cases" are the E->I flow, matching the confirmed-case semantics used
by the inference models; infection cost applies to the I occupancy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HorizonMismatch
from .policy import CostKind, PolicyDef, PolicyId, PolicySchedule, default_catalog
from .seird import Trajectory

DAYS_PER_YEAR = 365.0


@dataclass(frozen=True)
class EconParams:
    gdp_per_capita: float = 30_000.0      # $/person/year
    lockdown_gdp_frac: float = 0.10       # fraction of GDP per year
    distancing_gdp_frac: float = 0.05
    masks_cost: float = 2.0               # $/person/day
    infection_cost: float = 300.0         # $/infected/day
    tracing_cost: float = 6_400.0         # $/new case
    death_cost: float = 7_000_000.0       # $/death

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def catalog_for(econ: EconParams) -> dict[PolicyId, PolicyDef]:
    """Default policy catalog with cost magnitudes taken from econ params."""
    from dataclasses import replace

    cat = default_catalog()
    cat[PolicyId.LOCKDOWN] = replace(
        cat[PolicyId.LOCKDOWN], cost_magnitude=econ.lockdown_gdp_frac)
    cat[PolicyId.DISTANCING] = replace(
        cat[PolicyId.DISTANCING], cost_magnitude=econ.distancing_gdp_frac)
    cat[PolicyId.TRACING_DISTANCING] = replace(
        cat[PolicyId.TRACING_DISTANCING], cost_magnitude=econ.distancing_gdp_frac,
        tracing_cost_per_case=econ.tracing_cost)
    cat[PolicyId.MASKS_HYGIENE] = replace(
        cat[PolicyId.MASKS_HYGIENE], cost_magnitude=econ.masks_cost)
    return cat


def daily_policy_cost(active, econ: EconParams, n: float) -> float:
    """Running cost of the active (PolicyDef, intensity) set for one day."""
    total = 0.0
    for pdef, intensity in active:
        if pdef.cost_kind is CostKind.GDP_FRACTION_PER_YEAR:
            total += intensity * pdef.cost_magnitude * econ.gdp_per_capita * n / DAYS_PER_YEAR
        elif pdef.cost_kind is CostKind.PER_CAPITA_PER_DAY:
            total += intensity * pdef.cost_magnitude * n
    return total


def daily_epidemic_cost(i_active: float, new_cases: float, new_deaths: float,
                        tracing_intensity: float, econ: EconParams
                        ) -> tuple[float, float, float]:
    """(infection, tracing, death) dollars for one day."""
    if min(i_active, new_cases, new_deaths, tracing_intensity) < 0:
        raise ValueError("inputs must be nonnegative")
    infection = econ.infection_cost * i_active
    tracing = econ.tracing_cost * new_cases * tracing_intensity
    death = econ.death_cost * new_deaths
    return infection, tracing, death


@dataclass
class LossBreakdown:
    """Per-day and cumulative dollar losses plus case/death totals."""

    policy: np.ndarray
    infection: np.ndarray
    tracing: np.ndarray
    death: np.ndarray
    total: np.ndarray
    total_cases: float
    total_deaths: float

    @property
    def horizon(self) -> int:
        return len(self.total)

    @property
    def total_loss(self) -> float:
        return float(self.total.sum())

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.total)

    def component_totals(self) -> dict[str, float]:
        return {
            "policy": float(self.policy.sum()),
            "infection": float(self.infection.sum()),
            "tracing": float(self.tracing.sum()),
            "death": float(self.death.sum()),
            "total": self.total_loss,
        }

    def to_rows(self) -> list[dict]:
        cum = self.cumulative()
        return [
            {
                "day": day,
                "policy": float(self.policy[day]),
                "infection": float(self.infection[day]),
                "tracing": float(self.tracing[day]),
                "death": float(self.death[day]),
                "total": float(self.total[day]),
                "cumulative": float(cum[day]),
            }
            for day in range(self.horizon)
        ]


def accumulate(trajectory: Trajectory, schedule: PolicySchedule,
               econ: EconParams, n: float,
               catalog: dict[PolicyId, PolicyDef] | None = None) -> LossBreakdown:
    """Apply the cost model day by day over a simulated trajectory."""
    catalog = catalog or catalog_for(econ)
    horizon = trajectory.horizon
    for b in schedule.blocks:
        if b.end > horizon:
            raise HorizonMismatch(
                f"schedule block ends at {b.end}, trajectory horizon is {horizon}")

    active_by_day: list[list] = [[] for _ in range(horizon)]
    tracing_by_day = [0.0] * horizon
    for b in schedule.blocks:
        for day in range(b.start, b.end):
            for p, v in b.active():
                if day < b.start + catalog[p].lag_days:
                    continue
                active_by_day[day].append((catalog[p], v))
                if p is PolicyId.TRACING_DISTANCING:
                    tracing_by_day[day] = v

    policy = np.zeros(horizon)
    infection = np.zeros(horizon)
    tracing = np.zeros(horizon)
    death = np.zeros(horizon)
    for day in range(horizon):
        st = trajectory.states[day]
        fl = trajectory.flows[day]
        policy[day] = daily_policy_cost(active_by_day[day], econ, n)
        inf, tr, de = daily_epidemic_cost(
            st.i, fl.new_infectious, fl.new_deaths, tracing_by_day[day], econ)
        infection[day] = inf
        tracing[day] = tr
        death[day] = de
    total = policy + infection + tracing + death
    return LossBreakdown(
        policy=policy, infection=infection, tracing=tracing, death=death,
        total=total,
        total_cases=trajectory.cumulative_cases(),
        total_deaths=trajectory.total_deaths(),
    )
