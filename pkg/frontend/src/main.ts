// Scenario explorer: edit monthly policy intensities, run what-if
// simulations against the service, compare pinned outcomes.

import { fetchPolicies, simulate } from "./api.js";
import { legend, lineChart, type SeriesSpec } from "./charts.js";
import { loadPresets } from "./presets.js";
import {
  ComparisonSet,
  INTENSITY_LEVELS,
  POLICY_IDS,
  initialState,
  toSimulateRequest,
  validateGrid,
  type ScheduleGridState,
} from "./state.js";
import { ValidationError, type SimulateResponse } from "./types.js";

const POLICY_LABELS: Record<string, string> = {
  lockdown: "Lockdown",
  distancing: "Social distancing",
  tracing_distancing: "Tracing + distancing",
  masks_hygiene: "Masks & hygiene",
};

const COLORS = ["#2563eb", "#dc2626", "#16a34a", "#9333ea", "#ea580c",
                "#0891b2", "#4b5563", "#ca8a04"];

const state: ScheduleGridState = initialState();
const pinned = new ComparisonSet();
let lastResponse: SimulateResponse | null = null;
let logScale = false;
let inFlight: AbortController | null = null;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function moneyFmt(v: number): string {
  if (Math.abs(v) >= 1e9) return `$${(v / 1e9).toFixed(3)}B`;
  if (Math.abs(v) >= 1e6) return `$${(v / 1e6).toFixed(1)}M`;
  return `$${v.toFixed(0)}`;
}

function renderGrid(): void {
  const grid = $("grid");
  grid.innerHTML = "";
  const table = document.createElement("table");
  const head = table.insertRow();
  head.insertCell().textContent = "Policy";
  state.months.forEach((_, k) => {
    head.insertCell().textContent = `Month ${k + 1}`;
  });
  for (const pid of POLICY_IDS) {
    const row = table.insertRow();
    row.insertCell().textContent = POLICY_LABELS[pid];
    state.months.forEach((month, k) => {
      const cell = row.insertCell();
      cell.dataset.month = `${k}`;
      cell.dataset.policy = pid;
      const select = document.createElement("select");
      for (const level of INTENSITY_LEVELS) {
        const opt = document.createElement("option");
        opt.value = `${level}`;
        opt.textContent = level === 0 ? "off" : level === 1 ? "full" : "half";
        if (month[pid] === level) opt.selected = true;
        select.appendChild(opt);
      }
      select.addEventListener("change", () => {
        month[pid] = parseFloat(select.value) as 0 | 0.5 | 1;
        clearCellErrors();
      });
      cell.appendChild(select);
    });
  }
  grid.appendChild(table);
}

function clearCellErrors(): void {
  document.querySelectorAll("td.invalid").forEach((el) =>
    el.classList.remove("invalid"));
  $("violations").innerHTML = "";
}

function showViolations(violations: { rule: string; message: string;
                                      block_index: number | null }[]): void {
  const box = $("violations");
  box.innerHTML = "";
  for (const v of violations) {
    const item = document.createElement("div");
    item.className = "violation";
    item.textContent = v.block_index === null
      ? `${v.rule}: ${v.message}`
      : `${v.rule} (month ${v.block_index + 1}): ${v.message}`;
    box.appendChild(item);
    if (v.block_index !== null) {
      document
        .querySelectorAll(`td[data-month="${v.block_index}"]`)
        .forEach((el) => el.classList.add("invalid"));
    }
  }
}

function readParams(): void {
  state.params.population = parseFloat(
    ($("population") as HTMLInputElement).value);
  state.params.gdp_per_capita = parseFloat(
    ($("gdp") as HTMLInputElement).value);
  state.params.seed_infected = parseFloat(
    ($("seed") as HTMLInputElement).value);
  state.params.horizon = parseInt(($("horizon") as HTMLInputElement).value, 10);
}

function renderTotals(response: SimulateResponse): void {
  const totals = response.totals;
  $("totals").innerHTML = `
    <div class="card"><div class="card-label">Total cases</div>
      <div class="card-value">${Math.round(totals.total_cases).toLocaleString()}</div></div>
    <div class="card"><div class="card-label">Total deaths</div>
      <div class="card-value">${Math.round(totals.total_deaths).toLocaleString()}</div></div>
    <div class="card"><div class="card-label">Total loss</div>
      <div class="card-value">${moneyFmt(totals.total_loss)}</div></div>`;
}

function renderCharts(): void {
  if (!lastResponse) return;
  const traj = lastResponse.trajectory;
  const compartments: SeriesSpec[] = [
    { name: "S", values: traj.s, color: "#2563eb" },
    { name: "E", values: traj.e, color: "#ca8a04" },
    { name: "I", values: traj.i, color: "#dc2626" },
    { name: "R", values: traj.r, color: "#16a34a" },
    { name: "D", values: traj.d, color: "#111827" },
  ];
  const compBox = $("compartments");
  compBox.innerHTML = "";
  compBox.appendChild(lineChart(compartments, { logScale }));
  compBox.appendChild(legend(compartments));

  const loss = lastResponse.loss;
  const lossSeries: SeriesSpec[] = [
    { name: "policy", values: loss.policy, color: "#2563eb" },
    { name: "infection", values: loss.infection, color: "#ca8a04" },
    { name: "tracing", values: loss.tracing, color: "#16a34a" },
    { name: "death", values: loss.death, color: "#dc2626" },
    { name: "cumulative total", values: loss.cumulative, color: "#111827" },
  ];
  const lossBox = $("loss");
  lossBox.innerHTML = "";
  lossBox.appendChild(lineChart(lossSeries, { yLabel: "dollars" }));
  lossBox.appendChild(legend(lossSeries));

  const pinnedSeries: SeriesSpec[] = pinned.list().map((p, k) => ({
    name: p.name,
    values: p.response.loss.cumulative,
    color: COLORS[k % COLORS.length],
  }));
  const compareBox = $("comparison");
  compareBox.innerHTML = "";
  if (pinnedSeries.length) {
    compareBox.appendChild(lineChart(pinnedSeries, { yLabel: "cumulative loss" }));
    compareBox.appendChild(legend(pinnedSeries));
  }
}

async function runAndRender(): Promise<void> {
  readParams();
  clearCellErrors();
  const violations = validateGrid(state);
  if (violations.length) {
    showViolations(violations);
    return;
  }
  inFlight?.abort();  // latest-wins
  inFlight = new AbortController();
  const status = $("status");
  status.textContent = "running…";
  try {
    lastResponse = await simulate(toSimulateRequest(state), inFlight.signal);
    status.textContent = "";
    renderTotals(lastResponse);
    renderCharts();
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") return;
    if (err instanceof ValidationError) {
      showViolations(err.violations);
      status.textContent = "";
      return;
    }
    status.textContent = `error: ${(err as Error).message}`;
  }
}

function wirePresets(): void {
  const select = $("preset") as HTMLSelectElement;
  for (const preset of loadPresets()) {
    const opt = document.createElement("option");
    opt.value = preset.name;
    opt.textContent = preset.label;
    select.appendChild(opt);
  }
  select.addEventListener("change", () => {
    const preset = loadPresets().find((p) => p.name === select.value);
    if (!preset) return;
    state.months = preset.months.map((m) => ({ ...m }));
    renderGrid();
    void runAndRender();
  });
}

function wireControls(): void {
  $("run").addEventListener("click", () => void runAndRender());
  $("pin").addEventListener("click", () => {
    if (!lastResponse) return;
    const name = (($("pin-name") as HTMLInputElement).value || "scenario") +
      ` #${pinned.size + 1}`;
    if (!pinned.pin(name, lastResponse)) {
      $("status").textContent = "comparison set is full (8 scenarios)";
      return;
    }
    renderCharts();
  });
  ($("log-toggle") as HTMLInputElement).addEventListener("change", (ev) => {
    logScale = (ev.target as HTMLInputElement).checked;
    renderCharts();
  });
}

async function boot(): Promise<void> {
  renderGrid();
  wirePresets();
  wireControls();
  try {
    const catalog = await fetchPolicies();
    $("catalog").textContent = catalog.policies
      .map((p) => `${POLICY_LABELS[p.id]}: ${(p.efficiency * 100).toFixed(0)}%`)
      .join("  ·  ");
  } catch {
    $("catalog").textContent = "service unreachable";
  }
  await runAndRender();
}

if (typeof document !== "undefined" && document.getElementById("grid")) {
  void boot();
}
