// Schedule-grid state and the client-side mirror of the server's
// schedule validation rules.  The UI never computes epidemiology or
// economics itself; this module only shapes requests and pre-screens
// schedules so obviously invalid grids fail before a round trip.

import type {
  Intensity,
  PolicyId,
  ScheduleWire,
  SimulateRequest,
  SimulateResponse,
  Violation,
} from "./types.js";

export const POLICY_IDS: PolicyId[] = [
  "lockdown",
  "distancing",
  "tracing_distancing",
  "masks_hygiene",
];

export const INTENSITY_LEVELS: Intensity[] = [0, 0.5, 1];

// distancing is part of both the lockdown and the tracing bundle; the
// server rejects stacking it on either
export const REDUNDANT_PAIRS: [PolicyId, PolicyId][] = [
  ["lockdown", "distancing"],
  ["tracing_distancing", "distancing"],
];

export type MonthAssignment = Record<PolicyId, Intensity>;

export interface CountryParams {
  population: number;
  gdp_per_capita: number;
  seed_infected: number;
  horizon: number;
}

export interface ScheduleGridState {
  months: MonthAssignment[];
  params: CountryParams;
}

export const DEFAULT_PARAMS: CountryParams = {
  population: 1_000_000,
  gdp_per_capita: 30_000,
  seed_infected: 9_000,
  horizon: 90,
};

export function emptyMonth(): MonthAssignment {
  return {
    lockdown: 0,
    distancing: 0,
    tracing_distancing: 0,
    masks_hygiene: 0,
  };
}

export function initialState(): ScheduleGridState {
  return {
    months: [emptyMonth(), emptyMonth(), emptyMonth()],
    params: { ...DEFAULT_PARAMS },
  };
}

export function blockLength(state: ScheduleGridState): number {
  return Math.floor(state.params.horizon / state.months.length);
}

export function toScheduleWire(state: ScheduleGridState): ScheduleWire {
  const len = blockLength(state);
  return {
    blocks: state.months.map((month, k) => ({
      start: k * len,
      end: (k + 1) * len,
      policies: POLICY_IDS.filter((id) => month[id] > 0).map((id) => ({
        id,
        intensity: month[id],
      })),
    })),
  };
}

export function toSimulateRequest(state: ScheduleGridState): SimulateRequest {
  return {
    population: state.params.population,
    gdp_per_capita: state.params.gdp_per_capita,
    horizon: state.params.horizon,
    seed_infected: state.params.seed_infected,
    schedule: toScheduleWire(state),
  };
}

// Mirrors the server's validate_schedule for grids this UI can produce.
export function validateGrid(state: ScheduleGridState): Violation[] {
  const violations: Violation[] = [];
  state.months.forEach((month, index) => {
    for (const id of POLICY_IDS) {
      if (!INTENSITY_LEVELS.includes(month[id])) {
        violations.push({
          rule: "invalid_intensity",
          message: `${id} intensity ${month[id]} not in {0, 0.5, 1}`,
          block_index: index,
        });
      }
    }
    for (const [keep, redundant] of REDUNDANT_PAIRS) {
      if (month[keep] > 0 && month[redundant] > 0) {
        violations.push({
          rule: "redundant_policy",
          message: `${redundant} is redundant while ${keep} is active`,
          block_index: index,
        });
      }
    }
  });
  const p = state.params;
  if (p.population <= 0 || p.horizon < 1 || p.seed_infected < 0 ||
      p.seed_infected >= p.population || p.gdp_per_capita < 0) {
    violations.push({
      rule: "invalid_params",
      message: "country parameters out of range",
      block_index: null,
    });
  }
  return violations;
}

// Bounded set of pinned responses for side-by-side comparison.
export const MAX_PINNED = 8;

export interface PinnedScenario {
  name: string;
  response: SimulateResponse;
}

export class ComparisonSet {
  private items: PinnedScenario[] = [];

  pin(name: string, response: SimulateResponse): boolean {
    if (this.items.length >= MAX_PINNED) {
      return false;
    }
    this.items.push({ name, response });
    return true;
  }

  unpin(name: string): void {
    this.items = this.items.filter((it) => it.name !== name);
  }

  list(): readonly PinnedScenario[] {
    return this.items;
  }

  get size(): number {
    return this.items.length;
  }
}
