"""Intervention catalog, schedules and reproduction-number composition.

The catalog carries the empirically averaged transmission-reduction
efficiencies of the four simulatable interventions (lockdown 0.96, contact
tracing with distancing 0.96, social distancing 0.74, mask/hygiene mandate
0.30).  Vaccination has a measured average efficiency of 0.81 but no cost
model, so it is exposed only as a constant and excluded from schedules.

Simultaneously active policies compose multiplicatively: each active policy
scales transmission by (1 - intensity * efficiency).  Additive composition
could drive Re negative and would make stacked policies meaningless.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .errors import BlockOutOfRange, OverlappingBlocks


class PolicyId(str, Enum):
    LOCKDOWN = "lockdown"
    DISTANCING = "distancing"
    TRACING_DISTANCING = "tracing_distancing"
    MASKS_HYGIENE = "masks_hygiene"


class CostKind(str, Enum):
    GDP_FRACTION_PER_YEAR = "gdp_fraction_per_year"
    PER_CAPITA_PER_DAY = "per_capita_per_day"
    NONE = "none"


# Averaged efficiency of observed vaccination campaigns; informational only
# (no cost model, not schedulable).
VACCINE_EFFICIENCY = 0.81

INTENSITY_LEVELS = (0.0, 0.5, 1.0)

# Distancing is subsumed by a lockdown and is already part of the
# tracing+distancing bundle, so stacking it on either is rejected.
REDUNDANT_PAIRS = (
    (PolicyId.LOCKDOWN, PolicyId.DISTANCING),
    (PolicyId.TRACING_DISTANCING, PolicyId.DISTANCING),
)


@dataclass(frozen=True)
class PolicyDef:
    """One intervention: transmission efficiency plus its running-cost model."""

    id: PolicyId
    efficiency: float
    cost_kind: CostKind
    cost_magnitude: float = 0.0
    tracing_cost_per_case: float = 0.0
    lag_days: int = 0

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in [0, 1]")
        if self.lag_days < 0:
            raise ValueError("lag_days must be nonnegative")


def default_catalog() -> dict[PolicyId, PolicyDef]:
    """The four simulatable interventions with their default parameters."""
    return {
        PolicyId.LOCKDOWN: PolicyDef(
            PolicyId.LOCKDOWN, efficiency=0.96,
            cost_kind=CostKind.GDP_FRACTION_PER_YEAR, cost_magnitude=0.10),
        PolicyId.DISTANCING: PolicyDef(
            PolicyId.DISTANCING, efficiency=0.74,
            cost_kind=CostKind.GDP_FRACTION_PER_YEAR, cost_magnitude=0.05),
        PolicyId.TRACING_DISTANCING: PolicyDef(
            PolicyId.TRACING_DISTANCING, efficiency=0.96,
            cost_kind=CostKind.GDP_FRACTION_PER_YEAR, cost_magnitude=0.05,
            tracing_cost_per_case=6400.0),
        PolicyId.MASKS_HYGIENE: PolicyDef(
            PolicyId.MASKS_HYGIENE, efficiency=0.30,
            cost_kind=CostKind.PER_CAPITA_PER_DAY, cost_magnitude=2.0),
    }


@dataclass(frozen=True)
class ScheduleBlock:
    """Half-open day range [start, end) with policy intensities."""

    start: int
    end: int
    assignments: tuple[tuple[PolicyId, float], ...]

    @staticmethod
    def of(start: int, end: int, assignments: dict[PolicyId, float] | None = None
           ) -> "ScheduleBlock":
        items = tuple(sorted((assignments or {}).items(), key=lambda kv: kv[0].value))
        return ScheduleBlock(start, end, items)

    def intensity(self, pid: PolicyId) -> float:
        for p, v in self.assignments:
            if p == pid:
                return v
        return 0.0

    def active(self) -> list[tuple[PolicyId, float]]:
        return [(p, v) for p, v in self.assignments if v > 0.0]


@dataclass(frozen=True)
class PolicySchedule:
    blocks: tuple[ScheduleBlock, ...] = ()

    @staticmethod
    def of(blocks) -> "PolicySchedule":
        return PolicySchedule(tuple(blocks))

    @staticmethod
    def empty() -> "PolicySchedule":
        return PolicySchedule(())

    @staticmethod
    def monthly(assignments_per_month, block_length: int = 30) -> "PolicySchedule":
        """Build consecutive fixed-length blocks from per-month assignment dicts."""
        blocks = []
        for k, a in enumerate(assignments_per_month):
            blocks.append(ScheduleBlock.of(k * block_length, (k + 1) * block_length, a))
        return PolicySchedule(tuple(blocks))

    def to_json_dict(self) -> dict:
        return {
            "blocks": [
                {
                    "start": b.start,
                    "end": b.end,
                    "policies": [
                        {"id": p.value, "intensity": v} for p, v in b.assignments
                    ],
                }
                for b in self.blocks
            ]
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @staticmethod
    def from_json_dict(data: dict) -> "PolicySchedule":
        blocks = []
        for b in data.get("blocks", []):
            assignments = {
                PolicyId(p["id"]): float(p["intensity"]) for p in b.get("policies", [])
            }
            blocks.append(ScheduleBlock.of(int(b["start"]), int(b["end"]), assignments))
        return PolicySchedule(tuple(blocks))

    @staticmethod
    def from_json(text: str) -> "PolicySchedule":
        return PolicySchedule.from_json_dict(json.loads(text))

    def encoding(self) -> str:
        """Compact deterministic encoding used for ranking tiebreaks."""
        parts = []
        for b in self.blocks:
            assigns = ",".join(f"{p.value}@{v:g}" for p, v in b.active()) or "-"
            parts.append(f"[{b.start}:{b.end}]{assigns}")
        return "|".join(parts)


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str
    block_index: int | None = None

    def __str__(self) -> str:
        where = f" (block {self.block_index})" if self.block_index is not None else ""
        return f"{self.rule}{where}: {self.message}"


def validate_schedule(schedule: PolicySchedule, horizon: int) -> list[Violation]:
    """Check schedule invariants; returns an empty list when valid."""
    violations: list[Violation] = []
    ordered = sorted(enumerate(schedule.blocks), key=lambda kv: (kv[1].start, kv[1].end))
    for idx, b in enumerate(schedule.blocks):
        if b.start < 0 or b.end > horizon:
            violations.append(Violation(
                "block_out_of_range",
                f"block [{b.start}, {b.end}) outside horizon {horizon}", idx))
        if b.end <= b.start:
            violations.append(Violation(
                "empty_block", f"block [{b.start}, {b.end}) is empty", idx))
        for p, v in b.assignments:
            if v not in INTENSITY_LEVELS:
                violations.append(Violation(
                    "invalid_intensity",
                    f"{p.value} intensity {v} not in {INTENSITY_LEVELS}", idx))
        active = {p for p, v in b.assignments if v > 0}
        for a, bpid in REDUNDANT_PAIRS:
            if a in active and bpid in active:
                violations.append(Violation(
                    "redundant_policy",
                    f"{bpid.value} is redundant while {a.value} is active", idx))
    for (i1, b1), (i2, b2) in zip(ordered, ordered[1:]):
        if b2.start < b1.end:
            violations.append(Violation(
                "overlapping_blocks",
                f"block [{b2.start}, {b2.end}) overlaps [{b1.start}, {b1.end})", i2))
    return violations


def compose_re(r0: float, active) -> float:
    """Effective reproduction number under a set of (PolicyDef, intensity).

    Factors multiply in a canonical order so the result is exactly invariant
    under permutation of the active set.
    """
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    re = r0
    for pdef, intensity in sorted(active, key=lambda pi: (pi[0].id.value, pi[1])):
        re *= 1.0 - intensity * pdef.efficiency
    return re


def re_schedule(r0: float, schedule: PolicySchedule, horizon: int,
                catalog: dict[PolicyId, PolicyDef] | None = None) -> list[float]:
    """Piecewise-constant daily Re; days outside any block get r0.

    Per-policy lag (PolicyDef.lag_days, default 0) delays the day a policy's
    effect begins within its block.
    """
    catalog = catalog or default_catalog()
    ordered = sorted(schedule.blocks, key=lambda b: (b.start, b.end))
    for b in ordered:
        if b.start < 0 or b.end > horizon:
            raise BlockOutOfRange(f"block [{b.start}, {b.end}) outside horizon {horizon}")
    for b1, b2 in zip(ordered, ordered[1:]):
        if b2.start < b1.end:
            raise OverlappingBlocks(
                f"block [{b2.start}, {b2.end}) overlaps [{b1.start}, {b1.end})")
    out = [float(r0)] * horizon
    for b in ordered:
        for day in range(b.start, b.end):
            active = [
                (catalog[p], v)
                for p, v in b.active()
                if day >= b.start + catalog[p].lag_days
            ]
            out[day] = compose_re(r0, active)
    return out
