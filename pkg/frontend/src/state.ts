// Workflow state and step gating. The seven steps mirror the system's
// pipeline order; a step is reachable only when its inputs exist, while
// going BACK to any earlier step never clears what was already gathered.

import type { DatabaseInfo, ForecastResult, Job, MetricsReport, MonthlySeries, Station, ViewDescriptor } from "./types.js";

export const STEPS = [
  "Download & ingest",
  "Create database",
  "Load database",
  "Visualize series",
  "Build minable view",
  "Forecast",
  "Results",
] as const;

export type StepNumber = 1 | 2 | 3 | 4 | 5 | 6 | 7;

export interface ForecastEntry {
  result: ForecastResult;
  report: MetricsReport | null;
  label: string;
}

export interface WorkflowState {
  step: StepNumber;
  ingestedYears: number[];
  databases: DatabaseInfo[];
  selectedDb: string | null;
  selectedRegion: string | null;
  selectedCountry: string | null;
  selectedStation: string | null;
  stations: Station[];
  neighbourStations: string[];
  fromYear: number | null;
  toYear: number | null;
  variable: string;
  unit: string;
  series: MonthlySeries | null;
  view: ViewDescriptor | null;
  forecasts: ForecastEntry[];
  activeJobs: Job[];
  lastError: string | null;
  notice: string | null;
}

export function initialState(): WorkflowState {
  return {
    step: 1,
    ingestedYears: [],
    databases: [],
    selectedDb: null,
    selectedRegion: null,
    selectedCountry: null,
    selectedStation: null,
    stations: [],
    neighbourStations: [],
    fromYear: null,
    toYear: null,
    variable: "tmin",
    unit: "C",
    series: null,
    view: null,
    forecasts: [],
    activeJobs: [],
    lastError: null,
    notice: null,
  };
}

function selectedDatabase(state: WorkflowState): DatabaseInfo | undefined {
  return state.databases.find((d) => d.name === state.selectedDb);
}

export function loadedYears(state: WorkflowState): number[] {
  return selectedDatabase(state)?.years ?? [];
}

function rangeLoaded(state: WorkflowState): boolean {
  if (state.fromYear === null || state.toYear === null) return false;
  const years = loadedYears(state);
  for (let y = state.fromYear; y <= state.toYear; y++) {
    if (!years.includes(y)) return false;
  }
  return state.fromYear <= state.toYear;
}

/** Which steps may be entered right now; step 1 is always open and earlier
 * steps stay open so the user can go back without losing anything. */
export function stepAvailable(state: WorkflowState, step: StepNumber): boolean {
  switch (step) {
    case 1:
      return true;
    case 2:
      return true;
    case 3:
      return state.databases.length > 0;
    case 4:
    case 5:
      return state.selectedDb !== null && loadedYears(state).length > 0;
    case 6:
      return state.view !== null;
    case 7:
      return state.forecasts.length > 0;
  }
}

export function gotoStep(state: WorkflowState, step: StepNumber): WorkflowState {
  if (!stepAvailable(state, step)) return { ...state, lastError: `step ${step} needs earlier steps first` };
  return { ...state, step, lastError: null };
}

/** A view may only be built over years the selected database has loaded. */
export function canBuildView(state: WorkflowState): boolean {
  return state.selectedDb !== null && rangeLoaded(state);
}

export function toggleNeighbour(state: WorkflowState, stationId: string): WorkflowState {
  const present = state.neighbourStations.includes(stationId);
  return {
    ...state,
    neighbourStations: present
      ? state.neighbourStations.filter((s) => s !== stationId)
      : [...state.neighbourStations, stationId],
  };
}

export function upsertJob(state: WorkflowState, job: Job): WorkflowState {
  const rest = state.activeJobs.filter((j) => j.id !== job.id);
  return { ...state, activeJobs: [...rest, job] };
}

export function finishedJobs(state: WorkflowState): Job[] {
  return state.activeJobs.filter((j) => j.state === "done" || j.state === "failed");
}

export function addForecast(state: WorkflowState, entry: ForecastEntry): WorkflowState {
  // multiple results are kept so predictions can be overlaid for comparison
  return { ...state, forecasts: [...state.forecasts, entry], step: 7 };
}

export function clearForecasts(state: WorkflowState): WorkflowState {
  return { ...state, forecasts: [] };
}

/** High missing share: nudge toward neighbour-based analysis. */
export function shouldSuggestNeighbourMode(series: MonthlySeries | null): boolean {
  return series !== null && series.missing_rate >= 0.5;
}
