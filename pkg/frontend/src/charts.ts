// Dependency-free SVG line charts.  Every plotted number comes straight
// from a service response array; no smoothing or local recomputation.

export interface SeriesSpec {
  name: string;
  values: number[];
  color: string;
}

const WIDTH = 640;
const HEIGHT = 280;
const PAD = { left: 64, right: 16, top: 16, bottom: 34 };

function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!isFinite(lo) || !isFinite(hi) || hi <= lo) {
    return [lo];
  }
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, k) => lo + k * step);
}

function formatTick(v: number): string {
  const abs = Math.abs(v);
  if (abs >= 1e9) return `${(v / 1e9).toFixed(1)}B`;
  if (abs >= 1e6) return `${(v / 1e6).toFixed(1)}M`;
  if (abs >= 1e3) return `${(v / 1e3).toFixed(0)}k`;
  if (abs > 0 && abs < 0.01) return v.toExponential(0);
  return `${Math.round(v * 100) / 100}`;
}

export function lineChart(
  series: SeriesSpec[],
  options: { logScale?: boolean; yLabel?: string } = {},
): SVGSVGElement {
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.classList.add("chart");

  const log = options.logScale ?? false;
  const transform = (v: number) => (log ? Math.log10(Math.max(v, 1e-2)) : v);

  const n = Math.max(...series.map((s) => s.values.length), 1);
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of s.values) {
      const t = transform(v);
      lo = Math.min(lo, t);
      hi = Math.max(hi, t);
    }
  }
  if (!isFinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (hi === lo) {
    hi = lo + 1;
  }

  const x = (idx: number) =>
    PAD.left + (idx / Math.max(n - 1, 1)) * (WIDTH - PAD.left - PAD.right);
  const y = (v: number) =>
    HEIGHT - PAD.bottom -
    ((transform(v) - lo) / (hi - lo)) * (HEIGHT - PAD.top - PAD.bottom);

  for (const tick of niceTicks(lo, hi)) {
    const value = log ? Math.pow(10, tick) : tick;
    const py = HEIGHT - PAD.bottom -
      ((tick - lo) / (hi - lo)) * (HEIGHT - PAD.top - PAD.bottom);
    const line = document.createElementNS(svg.namespaceURI, "line");
    line.setAttribute("x1", `${PAD.left}`);
    line.setAttribute("x2", `${WIDTH - PAD.right}`);
    line.setAttribute("y1", `${py}`);
    line.setAttribute("y2", `${py}`);
    line.setAttribute("class", "gridline");
    svg.appendChild(line);
    const label = document.createElementNS(svg.namespaceURI, "text");
    label.setAttribute("x", `${PAD.left - 6}`);
    label.setAttribute("y", `${py + 4}`);
    label.setAttribute("text-anchor", "end");
    label.setAttribute("class", "ticklabel");
    label.textContent = formatTick(value);
    svg.appendChild(label);
  }

  for (const s of series) {
    const points = s.values
      .map((v, idx) => `${x(idx).toFixed(1)},${y(v).toFixed(1)}`)
      .join(" ");
    const poly = document.createElementNS(svg.namespaceURI, "polyline");
    poly.setAttribute("points", points);
    poly.setAttribute("fill", "none");
    poly.setAttribute("stroke", s.color);
    poly.setAttribute("stroke-width", "1.8");
    svg.appendChild(poly);
  }

  const axis = document.createElementNS(svg.namespaceURI, "text");
  axis.setAttribute("x", `${WIDTH / 2}`);
  axis.setAttribute("y", `${HEIGHT - 8}`);
  axis.setAttribute("text-anchor", "middle");
  axis.setAttribute("class", "ticklabel");
  axis.textContent = options.yLabel ? `day (${options.yLabel})` : "day";
  svg.appendChild(axis);
  return svg;
}

export function legend(series: SeriesSpec[]): HTMLElement {
  const el = document.createElement("div");
  el.className = "legend";
  for (const s of series) {
    const item = document.createElement("span");
    item.className = "legend-item";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = s.color;
    item.appendChild(swatch);
    item.appendChild(document.createTextNode(s.name));
    el.appendChild(item);
  }
  return el;
}
