// Typed client for the service API. Every call unwraps the
// {ok, data|error} envelope; failures throw ApiError carrying the E_* code
// verbatim so panels can surface it unchanged.

import type {
  Country,
  DatabaseInfo,
  Envelope,
  ForecastResult,
  Job,
  MetricsReport,
  MonthlySeries,
  Station,
  ViewDescriptor,
} from "./types.js";

export class ApiError extends Error {
  code: string;

  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }

  display(): string {
    return `${this.code}: ${this.message}`;
  }
}

async function call<T>(method: string, path: string, body?: unknown): Promise<T> {
  const response = await fetch(path, {
    method,
    headers: body === undefined ? undefined : { "Content-Type": "application/json" },
    body: body === undefined ? undefined : JSON.stringify(body),
  });
  let envelope: Envelope<T>;
  try {
    envelope = (await response.json()) as Envelope<T>;
  } catch {
    throw new ApiError("E_NETWORK", `bad response from ${path} (${response.status})`);
  }
  if (!envelope.ok || envelope.data === undefined) {
    const err = envelope.error ?? { code: "E_INTERNAL", message: "unknown error" };
    throw new ApiError(err.code, err.message);
  }
  return envelope.data;
}

export const api = {
  regions: () => call<{ regions: string[] }>("GET", "/catalog/regions"),
  countries: (region?: string) =>
    call<{ countries: Country[] }>("GET", `/catalog/countries${region ? `?region=${encodeURIComponent(region)}` : ""}`),
  stations: (query: { country?: string; region?: string }) => {
    const params = new URLSearchParams();
    if (query.country) params.set("country", query.country);
    else if (query.region) params.set("region", query.region);
    const qs = params.toString();
    return call<{ stations: Station[] }>("GET", `/catalog/stations${qs ? `?${qs}` : ""}`);
  },
  mapLink: (stationId: string) =>
    call<{ url: string }>("GET", `/catalog/stations/${encodeURIComponent(stationId)}/map-link`),

  startDownload: (year: number) => call<Job>("POST", `/years/${year}/download`),
  startIngest: (year: number) => call<Job>("POST", `/years/${year}/ingest`),
  job: (id: string) => call<Job>("GET", `/jobs/${encodeURIComponent(id)}`),

  databases: () => call<{ databases: DatabaseInfo[] }>("GET", "/databases"),
  createDatabase: (scopeKind: string, scopeId: string) =>
    call<DatabaseInfo>("POST", "/databases", { scope_kind: scopeKind, scope_id: scopeId }),
  startLoad: (db: string, year: number) =>
    call<Job>("POST", `/databases/${encodeURIComponent(db)}/years/${year}`),

  series: (db: string, variable: string, unit: string, fromYear: number, toYear: number) =>
    call<MonthlySeries>(
      "GET",
      `/databases/${encodeURIComponent(db)}/series?variable=${variable}&unit=${unit}&from=${fromYear}&to=${toYear}`,
    ),

  views: () => call<{ views: { path: string; kind: string; rows: number }[] }>("GET", "/views"),
  createView: (body: Record<string, unknown>) => call<ViewDescriptor>("POST", "/views", body),

  forecast: (body: Record<string, unknown>) => call<ForecastResult>("POST", "/forecasts", body),
  evaluate: (forecast: ForecastResult, db: string) =>
    call<MetricsReport>("POST", "/evaluations", { forecast, db }),
};

export type Api = typeof api;
