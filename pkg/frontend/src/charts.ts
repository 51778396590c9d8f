// SVG chart rendering. Pure string producers so the snapshot tests can
// replay a recorded transcript without a DOM.

import { escapeHtml, percent, seriesMonths } from "./format.js";
import type { ForecastResult, MonthlySeries } from "./types.js";

const WIDTH = 720;
const HEIGHT = 260;
const PAD = { left: 48, right: 12, top: 14, bottom: 42 };

const OVERLAY_COLORS = ["#2563eb", "#dc2626", "#059669", "#d97706", "#7c3aed", "#0891b2"];
const ACTUAL_COLOR = "#111827";

interface Scale {
  x: (i: number) => number;
  y: (v: number) => number;
  min: number;
  max: number;
}

function makeScale(count: number, values: number[]): Scale {
  let min = Math.min(...values);
  let max = Math.max(...values);
  if (!isFinite(min) || !isFinite(max)) {
    min = 0;
    max = 1;
  }
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const span = max - min;
  min -= span * 0.05;
  max += span * 0.05;
  const innerW = WIDTH - PAD.left - PAD.right;
  const innerH = HEIGHT - PAD.top - PAD.bottom;
  return {
    x: (i) => PAD.left + (count <= 1 ? innerW / 2 : (i * innerW) / (count - 1)),
    y: (v) => PAD.top + innerH - ((v - min) * innerH) / (max - min),
    min,
    max,
  };
}

/** Polyline segments, broken wherever the series has a missing month. */
export function gapSegments(values: (number | null)[], scale: Scale): string[] {
  const segments: string[] = [];
  let current: string[] = [];
  values.forEach((v, i) => {
    if (v === null) {
      if (current.length > 1) segments.push(current.join(" "));
      current = [];
    } else {
      current.push(`${scale.x(i).toFixed(1)},${scale.y(v).toFixed(1)}`);
    }
  });
  if (current.length > 1) segments.push(current.join(" "));
  return segments;
}

function axis(labels: string[], scale: Scale): string {
  const step = Math.max(1, Math.floor(labels.length / 12));
  const ticks = labels
    .map((label, i) => ({ label, i }))
    .filter(({ i }) => i % step === 0)
    .map(
      ({ label, i }) =>
        `<text class="tick" x="${scale.x(i).toFixed(1)}" y="${HEIGHT - 6}" transform="rotate(-45 ${scale.x(i).toFixed(1)} ${HEIGHT - 6})">${label}</text>`,
    )
    .join("");
  const yTicks = [scale.min, (scale.min + scale.max) / 2, scale.max]
    .map((v) => `<text class="tick" x="4" y="${scale.y(v).toFixed(1)}">${v.toFixed(1)}</text>`)
    .join("");
  return ticks + yTicks;
}

function frame(): string {
  return `<rect class="plot-frame" x="${PAD.left}" y="${PAD.top}" width="${WIDTH - PAD.left - PAD.right}" height="${HEIGHT - PAD.top - PAD.bottom}"/>`;
}

/** Fused monthly series; missing months render as line gaps plus hollow
 * markers along the bottom so their position stays visible. */
export function renderSeriesChart(series: MonthlySeries): string {
  const labels = seriesMonths(series.start_year, series.start_month, series.values.length);
  const present = series.values.filter((v): v is number => v !== null);
  const scale = makeScale(series.values.length, present);
  const segments = gapSegments(series.values, scale)
    .map((points) => `<polyline class="series-line" points="${points}"/>`)
    .join("");
  const dots = series.values
    .map((v, i) =>
      v === null
        ? `<circle class="missing-dot" cx="${scale.x(i).toFixed(1)}" cy="${HEIGHT - PAD.bottom}" r="3"/>`
        : `<circle class="value-dot" cx="${scale.x(i).toFixed(1)}" cy="${scale.y(v).toFixed(1)}" r="2.5"/>`,
    )
    .join("");
  return (
    `<svg class="chart" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="monthly series">` +
    frame() +
    segments +
    dots +
    axis(labels, scale) +
    `</svg>`
  );
}

/** Badge stating the missing-value share; red and advisory when high. */
export function renderMissingBadge(series: MonthlySeries): string {
  const high = series.missing_rate >= 0.5;
  const cls = high ? "badge badge-missing-high" : "badge badge-missing-ok";
  const hint = high
    ? `<span class="hint">high missing share &mdash; consider neighbour-based analysis</span>`
    : "";
  return `<span class="${cls}">missing ${percent(series.missing_rate)}</span>${hint}`;
}

export interface OverlaySeries {
  label: string;
  values: (number | null)[];
  kind: "actual" | "forecast";
}

/** Forecast lines (one per run) overlaid on actuals when available. */
export function renderForecastOverlay(months: string[], lines: OverlaySeries[]): string {
  const present = lines.flatMap((l) => l.values.filter((v): v is number => v !== null));
  const scale = makeScale(months.length, present);
  let colorIndex = 0;
  const body = lines
    .map((line) => {
      const color = line.kind === "actual" ? ACTUAL_COLOR : OVERLAY_COLORS[colorIndex++ % OVERLAY_COLORS.length];
      const dash = line.kind === "actual" ? "" : ` stroke-dasharray="none"`;
      const cls = line.kind === "actual" ? "overlay-actual" : "overlay-forecast";
      return gapSegments(line.values, scale)
        .map((points) => `<polyline class="${cls}" stroke="${color}"${dash} points="${points}"/>`)
        .join("");
    })
    .join("");
  colorIndex = 0;
  const legend = lines
    .map((line, i) => {
      const color = line.kind === "actual" ? ACTUAL_COLOR : OVERLAY_COLORS[colorIndex++ % OVERLAY_COLORS.length];
      return `<g transform="translate(${PAD.left + 8 + i * 170}, ${PAD.top + 4})"><rect width="12" height="3" y="4" fill="${color}"/><text class="legend" x="16" y="9">${escapeHtml(line.label)}</text></g>`;
    })
    .join("");
  return (
    `<svg class="chart" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="forecast overlay">` +
    frame() +
    body +
    legend +
    axis(months, scale) +
    `</svg>`
  );
}

export function forecastMonths(result: ForecastResult): string[] {
  return result.predictions.map((p) => `${p.year}-${String(p.month).padStart(2, "0")}`);
}
