import { describe, expect, it } from "vitest";

import { loadPresets } from "../src/presets.js";
import { DEFAULT_PARAMS, toScheduleWire, validateGrid } from "../src/state.js";

describe("presets", () => {
  const presets = loadPresets();

  it("offers the six benchmark policy combinations", () => {
    expect(presets).toHaveLength(6);
    expect(presets.map((p) => p.name)).toEqual([
      "optimal", "tracing_distancing", "lockdown", "distancing",
      "masks_hygiene", "no_policy",
    ]);
  });

  it("no_policy preset has every intensity off", () => {
    const none = presets.find((p) => p.name === "no_policy")!;
    for (const month of none.months) {
      expect(Object.values(month).every((v) => v === 0)).toBe(true);
    }
  });

  it("optimal preset is tracing all months plus masks in month one", () => {
    const optimal = presets.find((p) => p.name === "optimal")!;
    expect(optimal.months[0].tracing_distancing).toBe(1);
    expect(optimal.months[0].masks_hygiene).toBe(1);
    expect(optimal.months[1]).toMatchObject({
      tracing_distancing: 1, masks_hygiene: 0, lockdown: 0, distancing: 0,
    });
    expect(optimal.months[2].tracing_distancing).toBe(1);
    expect(optimal.months[2].masks_hygiene).toBe(0);
  });

  it("every preset passes client validation and serializes to 3 blocks", () => {
    for (const preset of presets) {
      const state = { months: preset.months, params: { ...DEFAULT_PARAMS } };
      expect(validateGrid(state)).toEqual([]);
      expect(toScheduleWire(state).blocks).toHaveLength(3);
    }
  });
});
