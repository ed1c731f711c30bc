// API wire types, mirroring the service's pydantic schemas.

export type PolicyId =
  | "lockdown"
  | "distancing"
  | "tracing_distancing"
  | "masks_hygiene";

export type Intensity = 0 | 0.5 | 1;

export interface PolicyInfo {
  id: PolicyId;
  efficiency: number;
  cost_kind: string;
  cost_magnitude: number;
  tracing_cost_per_case: number;
  lag_days: number;
}

export interface PoliciesResponse {
  policies: PolicyInfo[];
  vaccine_efficiency: number;
  intensity_levels: number[];
}

export interface ScheduleBlockWire {
  start: number;
  end: number;
  policies: { id: PolicyId; intensity: number }[];
}

export interface ScheduleWire {
  blocks: ScheduleBlockWire[];
}

export interface SimulateRequest {
  population: number;
  gdp_per_capita: number;
  horizon: number;
  seed_infected: number;
  schedule: ScheduleWire;
}

export interface TrajectoryWire {
  days: number[];
  s: number[];
  e: number[];
  i: number[];
  r: number[];
  d: number[];
  new_exposed: number[];
  new_infectious: number[];
  new_recovered: number[];
  new_deaths: number[];
  re: number[];
}

export interface LossWire {
  policy: number[];
  infection: number[];
  tracing: number[];
  death: number[];
  total: number[];
  cumulative: number[];
}

export interface TotalsWire {
  total_cases: number;
  total_deaths: number;
  total_loss: number;
  policy: number;
  infection: number;
  tracing: number;
  death: number;
}

export interface SimulateResponse {
  label: string;
  schedule: ScheduleWire;
  trajectory: TrajectoryWire;
  loss: LossWire;
  totals: TotalsWire;
}

export interface Violation {
  rule: string;
  message: string;
  block_index: number | null;
}

export class ValidationError extends Error {
  violations: Violation[];

  constructor(message: string, violations: Violation[]) {
    super(message);
    this.violations = violations;
  }
}
