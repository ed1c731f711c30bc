// Thin JSON client for the simulation service.

import {
  type PoliciesResponse,
  type SimulateRequest,
  type SimulateResponse,
  ValidationError,
} from "./types.js";

const API_BASE = "/api";

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(`${API_BASE}${path}`, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (response.status === 400) {
    const body = await response.json().catch(() => ({}));
    throw new ValidationError(
      body.detail ?? "validation failed",
      body.violations ?? [],
    );
  }
  if (!response.ok) {
    const body = await response.json().catch(() => ({}));
    throw new Error(body.detail ?? `HTTP ${response.status}`);
  }
  return response.json() as Promise<T>;
}

export function fetchPolicies(): Promise<PoliciesResponse> {
  return request<PoliciesResponse>("/policies");
}

export function simulate(
  payload: SimulateRequest,
  signal?: AbortSignal,
): Promise<SimulateResponse> {
  return request<SimulateResponse>("/simulate", {
    method: "POST",
    body: JSON.stringify(payload),
    signal,
  });
}
