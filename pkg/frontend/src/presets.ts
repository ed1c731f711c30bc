// The six benchmark policy combinations as one-click grid presets.

import { emptyMonth, type MonthAssignment } from "./state.js";

export interface Preset {
  name: string;
  label: string;
  months: MonthAssignment[];
}

function full(policy: keyof MonthAssignment): MonthAssignment[] {
  return [0, 1, 2].map(() => ({ ...emptyMonth(), [policy]: 1 as const }));
}

export function loadPresets(): Preset[] {
  const optimalFirst = { ...emptyMonth(), tracing_distancing: 1 as const,
                         masks_hygiene: 1 as const };
  const tracingOnly = { ...emptyMonth(), tracing_distancing: 1 as const };
  return [
    {
      name: "optimal",
      label: "Optimal policy",
      months: [optimalFirst, { ...tracingOnly }, { ...tracingOnly }],
    },
    {
      name: "tracing_distancing",
      label: "Contact tracing and distancing",
      months: full("tracing_distancing"),
    },
    { name: "lockdown", label: "Lockdown", months: full("lockdown") },
    { name: "distancing", label: "Social distancing", months: full("distancing") },
    {
      name: "masks_hygiene",
      label: "Mask and hygiene mandate",
      months: full("masks_hygiene"),
    },
    {
      name: "no_policy",
      label: "No policy",
      months: [emptyMonth(), emptyMonth(), emptyMonth()],
    },
  ];
}
