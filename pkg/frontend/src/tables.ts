// HTML table renderers: forecast results and the per-month metrics report.

import { escapeHtml, monthLabel, round } from "./format.js";
import type { ForecastResult, MetricsReport, Station } from "./types.js";

export function renderForecastTable(result: ForecastResult): string {
  const rows = result.predictions
    .map(
      (p) =>
        `<tr><td>${monthLabel(p.year, p.month)}</td><td class="num">${round(p.value)}</td></tr>`,
    )
    .join("");
  const unit = result.unit ? ` (${escapeHtml(result.unit)})` : "";
  return (
    `<table class="results-table"><thead>` +
    `<tr><th>Month</th><th>${escapeHtml(result.variable)}${unit}</th></tr>` +
    `</thead><tbody>${rows}</tbody></table>`
  );
}

export function renderMetricsTable(report: MetricsReport): string {
  const rows = report.months
    .map(
      (m) =>
        `<tr><td>${monthLabel(m.year, m.month)}</td>` +
        `<td class="num">${m.nmse.toExponential(4)}</td>` +
        `<td class="dir">${m.direction ?? ""}</td></tr>`,
    )
    .join("");
  const ds = report.overall_ds === null ? "NA" : round(report.overall_ds, 3);
  const warnings = report.warnings.length
    ? `<p class="warnings">${report.warnings.map(escapeHtml).join("<br>")}</p>`
    : "";
  return (
    `<table class="metrics-table"><thead>` +
    `<tr><th>Month</th><th>NMSE</th><th>DS</th></tr></thead><tbody>${rows}</tbody>` +
    `<tfoot><tr><th>Overall</th><th class="num">${report.overall_nmse.toExponential(4)}</th>` +
    `<th>${ds}</th></tr><tr><td></td><td class="hint">Avg</td><td class="hint">Result</td></tr></tfoot>` +
    `</table>${warnings}`
  );
}

export function renderStationList(
  stations: Station[],
  picked: string[],
  selected: string | null,
): string {
  const pickedSet = new Set(picked);
  const rows = stations
    .map((s) => {
      const classes = [];
      if (s.station_id === selected) classes.push("row-selected");
      if (pickedSet.has(s.station_id)) classes.push("row-picked");
      return (
        `<tr class="${classes.join(" ")}" data-station="${escapeHtml(s.station_id)}">` +
        `<td>${escapeHtml(s.station_id)}</td><td>${escapeHtml(s.name)}</td>` +
        `<td class="num">${s.latitude.toFixed(4)}</td><td class="num">${s.longitude.toFixed(4)}</td>` +
        `<td class="num">${s.elevation === null ? "" : s.elevation.toFixed(0)}</td>` +
        `<td><button class="pick-btn" data-pick="${escapeHtml(s.station_id)}">${pickedSet.has(s.station_id) ? "remove" : "add neighbour"}</button></td></tr>`
      );
    })
    .join("");
  return (
    `<table class="station-table"><thead><tr>` +
    `<th>Station</th><th>Name</th><th>Lat</th><th>Lon</th><th>Elev</th><th></th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}
