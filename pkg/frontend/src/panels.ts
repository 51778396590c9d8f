// Step panels. Each renderer returns the panel's HTML for the current
// state; the app shell owns event wiring and re-rendering.

import { OverlaySeries, forecastMonths, renderForecastOverlay, renderMissingBadge, renderSeriesChart } from "./charts.js";
import { escapeHtml } from "./format.js";
import { renderStationMap } from "./map.js";
import { STEPS, StepNumber, WorkflowState, loadedYears, shouldSuggestNeighbourMode, stepAvailable } from "./state.js";
import { renderForecastTable, renderMetricsTable, renderStationList } from "./tables.js";
import type { Job, MetricsReport } from "./types.js";

export function renderStepNav(state: WorkflowState): string {
  const items = STEPS.map((label, idx) => {
    const step = (idx + 1) as StepNumber;
    const classes = ["step"];
    if (step === state.step) classes.push("step-active");
    if (!stepAvailable(state, step)) classes.push("step-locked");
    return `<button class="${classes.join(" ")}" data-step="${step}">STEP ${step}. ${label}</button>`;
  });
  return `<nav class="steps">${items.join("")}</nav>`;
}

export function renderJobStrip(jobs: Job[]): string {
  if (jobs.length === 0) return "";
  const items = jobs
    .map((job) => {
      const cls = job.state === "failed" ? "job job-failed" : job.state === "done" ? "job job-done" : "job";
      const error = job.error ? ` ${escapeHtml(job.error.code)}` : "";
      return (
        `<div class="${cls}"><span>${escapeHtml(job.kind)} [${job.state}${error}]</span>` +
        `<progress max="100" value="${job.progress}"></progress><span>${job.progress}%</span></div>`
      );
    })
    .join("");
  return `<div class="job-strip">${items}</div>`;
}

export function renderNotice(state: WorkflowState): string {
  const error = state.lastError
    ? `<div class="alert alert-error" role="alert">${escapeHtml(state.lastError)}</div>`
    : "";
  const notice = state.notice
    ? `<div class="dialog" role="dialog"><p>${escapeHtml(state.notice)}</p><button data-action="dismiss-notice">OK</button></div>`
    : "";
  return error + notice;
}

export function renderDownloadPanel(state: WorkflowState): string {
  return `
  <section class="panel" data-panel="1">
    <h2>STEP 1. Download &amp; ingest</h2>
    <p class="help">One year at a time; the archive publishes one file per year.</p>
    <form data-form="ingest">
      <label>Year <input name="year" type="number" min="1763" max="2100" value="2017" required></label>
      <button type="submit" data-action="ingest">Download + ingest</button>
      <button type="button" data-action="download-only">Download only</button>
    </form>
    <p>Ingested years: ${state.ingestedYears.length ? state.ingestedYears.join(", ") : "none yet"}</p>
  </section>`;
}

export function renderCreateDbPanel(state: WorkflowState): string {
  const stationRows = state.stations.length
    ? renderStationList(state.stations, state.neighbourStations, state.selectedStation)
    : `<p class="help">Pick a region and country to list stations.</p>`;
  const map = state.stations.length
    ? renderStationMap(state.stations, {
        selected: state.selectedStation,
        picked: state.neighbourStations,
        focus: true,
      })
    : "";
  const dbs = state.databases
    .map((d) => `<li>${escapeHtml(d.name)} <span class="hint">[${escapeHtml(d.scope_kind ?? "")}:${escapeHtml(d.scope_id ?? "")}]</span></li>`)
    .join("");
  return `
  <section class="panel" data-panel="2">
    <h2>STEP 2. Create database</h2>
    <form data-form="scope-filter">
      <label>Region <select name="region" data-action="filter-region">
        <option value="">(choose)</option>
      </select></label>
      <label>Country <select name="country" data-action="filter-country">
        <option value="">(choose)</option>
      </select></label>
    </form>
    <div class="map-wrap">${map}</div>
    ${stationRows}
    <div class="actions">
      <button data-action="create-db-station" ${state.selectedStation ? "" : "disabled"}>Create station database</button>
      <button data-action="create-db-country" ${state.selectedCountry ? "" : "disabled"}>Create country database</button>
      <button data-action="create-db-region" ${state.selectedRegion ? "" : "disabled"}>Create region database</button>
      <button data-action="map-link" ${state.selectedStation ? "" : "disabled"}>See station on map</button>
    </div>
    <h3>Existing databases</h3>
    <ul class="db-list">${dbs || "<li>none yet</li>"}</ul>
  </section>`;
}

export function renderLoadPanel(state: WorkflowState): string {
  const options = state.databases
    .map((d) => `<option value="${escapeHtml(d.name)}" ${d.name === state.selectedDb ? "selected" : ""}>${escapeHtml(d.name)}</option>`)
    .join("");
  const yearOptions = state.ingestedYears.map((y) => `<option value="${y}">${y}</option>`).join("");
  return `
  <section class="panel" data-panel="3">
    <h2>STEP 3. Load database</h2>
    <p class="help">Loads one ingested year of raw observations into the selected database.</p>
    <form data-form="load">
      <label>Database <select name="db" data-action="select-db">${options}</select></label>
      <label>Year <select name="year">${yearOptions}</select></label>
      <button type="submit" data-action="load-db">Load year</button>
    </form>
    <p>Loaded years for ${escapeHtml(state.selectedDb ?? "(none)")}: ${loadedYears(state).join(", ") || "none"}</p>
  </section>`;
}

function rangeInputs(state: WorkflowState): string {
  return (
    `<label>From <input name="from" type="number" value="${state.fromYear ?? ""}" required></label>` +
    `<label>To <input name="to" type="number" value="${state.toYear ?? ""}" required></label>`
  );
}

function variableSelect(state: WorkflowState): string {
  const vars: [string, string][] = [
    ["rainfall", "rainfall (mm)"],
    ["tmin", "min temperature"],
    ["tmax", "max temperature"],
  ];
  const options = vars
    .map(([v, label]) => `<option value="${v}" ${state.variable === v ? "selected" : ""}>${label}</option>`)
    .join("");
  const units = ["C", "F", "mm"]
    .map((u) => `<option value="${u}" ${state.unit === u ? "selected" : ""}>${u}</option>`)
    .join("");
  return (
    `<label>Variable <select name="variable">${options}</select></label>` +
    `<label>Unit <select name="unit">${units}</select></label>`
  );
}

export function renderSeriesPanel(state: WorkflowState): string {
  let body = `<p class="help">Choose a range and send to draw the fused monthly series.</p>`;
  if (state.series) {
    const suggestion = shouldSuggestNeighbourMode(state.series)
      ? `<p class="suggest">This series is mostly missing; neighbour-based analysis trains on nearby stations instead.</p>`
      : "";
    body = `${renderMissingBadge(state.series)}${suggestion}${renderSeriesChart(state.series)}`;
  }
  return `
  <section class="panel" data-panel="4">
    <h2>STEP 4. Visualize series</h2>
    <form data-form="series">
      ${rangeInputs(state)} ${variableSelect(state)}
      <button type="submit" data-action="show-series">Show on diagram</button>
    </form>
    <div class="series-area">${body}</div>
  </section>`;
}

export function renderViewPanel(state: WorkflowState): string {
  const neighbours = state.neighbourStations.length
    ? `<p>Neighbour stations picked: ${state.neighbourStations.map(escapeHtml).join(", ")}</p>`
    : `<p class="help">For neighbour views, pick stations in STEP 2 (each needs its own loaded station database).</p>`;
  const built = state.view
    ? `<p class="built">Built ${state.view.kind} view: ${escapeHtml(state.view.path)} (${state.view.row_count} rows)</p>`
    : "";
  return `
  <section class="panel" data-panel="5">
    <h2>STEP 5. Build minable view</h2>
    <form data-form="view">
      ${rangeInputs(state)} ${variableSelect(state)}
      <div class="actions">
        <button type="submit" data-action="build-standard">Create file for standard analysis</button>
        <button type="submit" data-action="build-neighbour">Create file for neighbour-based analysis</button>
      </div>
    </form>
    ${neighbours}
    ${built}
  </section>`;
}

export function renderForecastPanel(state: WorkflowState): string {
  const methods = ["gp", "lr", "smo", "mlp"]
    .map((m) => `<option value="${m}">${m.toUpperCase()}</option>`)
    .join("");
  const viewPath = state.view ? escapeHtml(state.view.path) : "";
  const nba = state.view?.kind === "neighbour";
  const standardControls = `
      <label>Kind
        <select name="mode">
          <option value="univariate">Standard analysis (univariate)</option>
          <option value="multivariate">Standard analysis (multivariate)</option>
        </select>
      </label>
      <label>Method <select name="method">${methods}</select></label>
      ${variableSelect(state)}`;
  const nbaControls = `
      <p class="help">Neighbour-based analysis uses bagged regression trees; pick the station to predict.</p>
      <label>Target station <input name="target" value="${escapeHtml(state.selectedStation ?? "")}"></label>`;
  return `
  <section class="panel" data-panel="6">
    <h2>STEP 6. Forecast</h2>
    <p>Minable view: <code>${viewPath}</code></p>
    <form data-form="forecast">
      ${nba ? nbaControls : standardControls}
      <label>Seed <input name="seed" type="number" value="42"></label>
      <button type="submit" data-action="run-forecast">Forecast</button>
    </form>
  </section>`;
}

export function renderResultsPanel(state: WorkflowState): string {
  if (state.forecasts.length === 0) {
    return `<section class="panel" data-panel="7"><h2>STEP 7. Results</h2><p class="help">No forecasts yet.</p></section>`;
  }
  const months = forecastMonths(state.forecasts[0].result);
  const lines: OverlaySeries[] = state.forecasts.map((entry) => ({
    label: entry.label,
    values: entry.result.predictions.map((p): number | null => p.value),
    kind: "forecast",
  }));
  const withReport = state.forecasts.find((f) => f.report !== null);
  if (withReport?.report) {
    const byMonth = new Map(withReport.report.months.map((m) => [`${m.year}-${String(m.month).padStart(2, "0")}`, m.actual]));
    lines.unshift({
      label: "actual",
      values: months.map((label) => byMonth.get(label) ?? null),
      kind: "actual",
    });
  }
  const overlay = renderForecastOverlay(months, lines);
  const tables = state.forecasts
    .map(
      (entry) =>
        `<div class="result-block"><h3>${escapeHtml(entry.label)}</h3>` +
        renderForecastTable(entry.result) +
        (entry.report ? renderMetricsTable(entry.report) : "") +
        `</div>`,
    )
    .join("");
  return `
  <section class="panel" data-panel="7">
    <h2>STEP 7. Results</h2>
    <div class="actions">
      <button data-action="evaluate">Evaluate against stored actuals</button>
      <button data-action="clear-results">Clear data</button>
    </div>
    ${overlay}
    <div class="results">${tables}</div>
  </section>`;
}

export function renderMetricsOnly(report: MetricsReport): string {
  return renderMetricsTable(report);
}

export function renderApp(state: WorkflowState): string {
  const panel = {
    1: renderDownloadPanel,
    2: renderCreateDbPanel,
    3: renderLoadPanel,
    4: renderSeriesPanel,
    5: renderViewPanel,
    6: renderForecastPanel,
    7: renderResultsPanel,
  }[state.step](state);
  return renderStepNav(state) + renderNotice(state) + renderJobStrip(state.activeJobs) + panel;
}
