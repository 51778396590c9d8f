// Payload shapes of the service API (see docs/schemas in the repo root).

export interface Envelope<T> {
  ok: boolean;
  data?: T;
  error?: { code: string; message: string };
}

export interface Station {
  station_id: string;
  name: string;
  country_code: string;
  country_name: string;
  region: string;
  latitude: number;
  longitude: number;
  elevation: number | null;
}

export interface Country {
  code: string;
  name: string;
  region: string;
}

export interface DatabaseInfo {
  name: string;
  scope_kind?: string;
  scope_id?: string;
  stations?: string[];
  years?: number[];
}

export interface Job {
  id: string;
  kind: string;
  state: "queued" | "running" | "done" | "failed";
  progress: number;
  message: string;
  result: Record<string, unknown> | null;
  error: { code: string; message: string } | null;
}

export interface MonthlySeries {
  variable: string;
  unit: string;
  start_year: number;
  start_month: number;
  values: (number | null)[];
  missing_rate: number;
}

export interface ViewDescriptor {
  kind: "standard" | "neighbour" | "test";
  path: string;
  from_year: number;
  to_year: number;
  row_count: number;
  variable: string | null;
  unit: string | null;
  stations: string[];
}

export interface Prediction {
  year: number;
  month: number;
  value: number;
}

export interface ForecastResult {
  mode: "univariate" | "multivariate" | "nba";
  method: string;
  variable: string;
  unit: string | null;
  source_view: string;
  seed: number;
  predictions: Prediction[];
}

export interface MetricsMonth {
  year: number;
  month: number;
  actual: number;
  predicted: number;
  nmse: number;
  direction: "+" | "-" | null;
}

export interface MetricsReport {
  n: number;
  months: MetricsMonth[];
  overall_nmse: number;
  overall_ds: number | null;
  warnings: string[];
}
