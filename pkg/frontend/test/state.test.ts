import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import {
  ComparisonSet,
  DEFAULT_PARAMS,
  MAX_PINNED,
  POLICY_IDS,
  emptyMonth,
  initialState,
  toScheduleWire,
  toSimulateRequest,
  validateGrid,
  type MonthAssignment,
  type ScheduleGridState,
} from "../src/state.js";
import type { PolicyId, SimulateResponse } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));

function gridWith(months: MonthAssignment[]): ScheduleGridState {
  return { months, params: { ...DEFAULT_PARAMS } };
}

describe("schedule wire format", () => {
  it("builds half-open monthly blocks with only active policies", () => {
    const months = [emptyMonth(), emptyMonth(), emptyMonth()];
    months[1].tracing_distancing = 1;
    months[1].masks_hygiene = 0.5;
    const wire = toScheduleWire(gridWith(months));
    expect(wire.blocks).toHaveLength(3);
    expect(wire.blocks[1]).toEqual({
      start: 30,
      end: 60,
      policies: [
        { id: "tracing_distancing", intensity: 1 },
        { id: "masks_hygiene", intensity: 0.5 },
      ],
    });
    expect(wire.blocks[0].policies).toEqual([]);
  });

  it("request carries the country parameters verbatim", () => {
    const state = initialState();
    state.params.population = 2_000_000;
    state.params.seed_infected = 123;
    const request = toSimulateRequest(state);
    expect(request.population).toBe(2_000_000);
    expect(request.seed_infected).toBe(123);
    expect(request.horizon).toBe(90);
  });
});

describe("client validation mirrors the server", () => {
  interface FixtureCase {
    months: Record<PolicyId, number>[];
    valid: boolean;
    rules: string[];
  }

  const fixture: FixtureCase[] = JSON.parse(
    readFileSync(join(HERE, "validation_fixture.json"), "utf-8"),
  );

  it("agrees with every recorded server verdict", () => {
    expect(fixture.length).toBe(81);
    for (const tc of fixture) {
      const state = gridWith(
        tc.months.map((m) => ({ ...emptyMonth(), ...m }) as MonthAssignment),
      );
      const violations = validateGrid(state);
      expect(violations.length === 0, JSON.stringify(tc.months[0])).toBe(tc.valid);
      if (!tc.valid) {
        const rules = new Set(violations.map((v) => v.rule));
        for (const rule of tc.rules) {
          expect(rules.has(rule), `expected rule ${rule}`).toBe(true);
        }
      }
    }
  });

  it("flags out-of-range country parameters", () => {
    const state = initialState();
    state.params.seed_infected = state.params.population + 1;
    expect(validateGrid(state).some((v) => v.rule === "invalid_params")).toBe(true);
  });

  it("reports the offending month", () => {
    const months = [emptyMonth(), emptyMonth(), emptyMonth()];
    months[2].lockdown = 1;
    months[2].distancing = 0.5;
    const violations = validateGrid(gridWith(months));
    expect(violations).toHaveLength(1);
    expect(violations[0].block_index).toBe(2);
  });
});

describe("comparison set", () => {
  const fakeResponse = { totals: { total_loss: 1 } } as SimulateResponse;

  it("is bounded to eight pinned scenarios", () => {
    const set = new ComparisonSet();
    for (let k = 0; k < MAX_PINNED; k += 1) {
      expect(set.pin(`s${k}`, fakeResponse)).toBe(true);
    }
    expect(set.pin("overflow", fakeResponse)).toBe(false);
    expect(set.size).toBe(MAX_PINNED);
    set.unpin("s3");
    expect(set.size).toBe(MAX_PINNED - 1);
    expect(set.pin("again", fakeResponse)).toBe(true);
  });
});

describe("policy grid", () => {
  it("covers all four policies", () => {
    expect(POLICY_IDS).toEqual([
      "lockdown", "distancing", "tracing_distancing", "masks_hygiene",
    ]);
  });
});
