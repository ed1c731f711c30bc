import { afterEach, describe, expect, it, vi } from "vitest";

import { fetchPolicies, simulate } from "../src/api.js";
import { ValidationError } from "../src/types.js";
import { initialState, toSimulateRequest } from "../src/state.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("passes service totals through untouched", async () => {
    // the UI must surface exactly what the service computed
    const payload = {
      label: "",
      schedule: { blocks: [] },
      trajectory: { days: [0], s: [1], e: [0], i: [0], r: [0], d: [0],
                    new_exposed: [], new_infectious: [], new_recovered: [],
                    new_deaths: [], re: [] },
      loss: { policy: [], infection: [], tracing: [], death: [], total: [],
              cumulative: [] },
      totals: {
        total_cases: 724760.1059736168,
        total_deaths: 28476.363341545112,
        total_loss: 201744081433.23166,
        policy: 0, infection: 0, tracing: 0, death: 0,
      },
    };
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(200, payload));
    vi.stubGlobal("fetch", fetchMock);

    const got = await simulate(toSimulateRequest(initialState()));
    expect(got.totals).toEqual(payload.totals);
    expect(fetchMock).toHaveBeenCalledWith(
      "/api/simulate", expect.objectContaining({ method: "POST" }));
    const body = JSON.parse(fetchMock.mock.calls[0][1].body as string);
    expect(body.schedule.blocks).toHaveLength(3);
  });

  it("maps a 400 response to a ValidationError with violations", async () => {
    const violations = [
      { rule: "overlapping_blocks", message: "…", block_index: 1 },
    ];
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse(400, {
      detail: "schedule validation failed",
      violations,
    })));

    await expect(simulate(toSimulateRequest(initialState())))
      .rejects.toSatisfy((err: unknown) =>
        err instanceof ValidationError &&
        err.violations.length === 1 &&
        err.violations[0].rule === "overlapping_blocks");
  });

  it("maps other failures to plain errors with the service detail", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(
      jsonResponse(422, { detail: "chains did not converge" })));
    await expect(fetchPolicies()).rejects.toThrow("chains did not converge");
  });
});
