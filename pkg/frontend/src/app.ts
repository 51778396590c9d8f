// App shell: owns the WorkflowState, wires DOM events to API calls and
// re-renders after every change. All mutations go through the service; the
// UI never optimistically fakes completion (jobs are polled to done).

import { api, ApiError } from "./api.js";
import { renderApp } from "./panels.js";
import {
  ForecastEntry,
  StepNumber,
  WorkflowState,
  addForecast,
  clearForecasts,
  gotoStep,
  initialState,
  toggleNeighbour,
  upsertJob,
} from "./state.js";
import type { Job } from "./types.js";

const POLL_MS = 500;

export class ConsoleApp {
  state: WorkflowState = initialState();
  private root: HTMLElement;
  private timers = new Map<string, number>();

  constructor(root: HTMLElement) {
    this.root = root;
    root.addEventListener("click", (event) => this.onClick(event));
    root.addEventListener("submit", (event) => this.onSubmit(event));
    root.addEventListener("change", (event) => this.onChange(event));
  }

  async boot(): Promise<void> {
    await this.refreshDatabases();
    this.render();
    void this.populateRegions();
  }

  setState(next: WorkflowState): void {
    this.state = next;
    this.render();
  }

  render(): void {
    this.root.innerHTML = renderApp(this.state);
    void this.fillScopeSelectors();
  }

  private fail(error: unknown): void {
    const message = error instanceof ApiError ? error.display() : String(error);
    this.setState({ ...this.state, lastError: message });
  }

  private notice(message: string): void {
    this.setState({ ...this.state, notice: message });
  }

  // -- data refreshers -----------------------------------------------------

  async refreshDatabases(): Promise<void> {
    try {
      const { databases } = await api.databases();
      this.state = { ...this.state, databases };
      if (!this.state.selectedDb && databases.length > 0) {
        this.state = { ...this.state, selectedDb: databases[0].name };
      }
    } catch (error) {
      if (!(error instanceof ApiError)) throw error;
      this.state = { ...this.state, lastError: error.display() };
    }
  }

  private async populateRegions(): Promise<void> {
    await this.fillScopeSelectors();
  }

  private async fillScopeSelectors(): Promise<void> {
    const regionSelect = this.root.querySelector<HTMLSelectElement>('select[name="region"]');
    if (regionSelect && regionSelect.options.length <= 1) {
      try {
        const { regions } = await api.regions();
        for (const region of regions) {
          const option = document.createElement("option");
          option.value = region;
          option.textContent = region;
          if (region === this.state.selectedRegion) option.selected = true;
          regionSelect.append(option);
        }
      } catch (error) {
        this.fail(error);
        return;
      }
    }
    const countrySelect = this.root.querySelector<HTMLSelectElement>('select[name="country"]');
    if (countrySelect && countrySelect.options.length <= 1 && this.state.selectedRegion) {
      try {
        const { countries } = await api.countries(this.state.selectedRegion);
        for (const country of countries) {
          const option = document.createElement("option");
          option.value = country.code;
          option.textContent = `${country.code} ${country.name}`;
          if (country.code === this.state.selectedCountry) option.selected = true;
          countrySelect.append(option);
        }
      } catch (error) {
        this.fail(error);
      }
    }
  }

  // -- job polling -----------------------------------------------------------

  trackJob(job: Job, onDone?: (job: Job) => void): void {
    this.setState(upsertJob(this.state, job));
    const timer = window.setInterval(async () => {
      try {
        const latest = await api.job(job.id);
        this.setState(upsertJob(this.state, latest));
        if (latest.state === "done" || latest.state === "failed") {
          window.clearInterval(timer);
          this.timers.delete(job.id);
          if (latest.state === "done") {
            onDone?.(latest);
          } else if (latest.error) {
            this.fail(new ApiError(latest.error.code, latest.error.message));
          }
        }
      } catch (error) {
        window.clearInterval(timer);
        this.timers.delete(job.id);
        this.fail(error);
      }
    }, POLL_MS);
    this.timers.set(job.id, timer);
  }

  // -- event handling -----------------------------------------------------------

  private onClick(event: Event): void {
    const target = event.target as HTMLElement;
    const stepButton = target.closest<HTMLElement>("[data-step]");
    if (stepButton) {
      this.setState(gotoStep(this.state, Number(stepButton.dataset.step) as StepNumber));
      return;
    }
    const pick = target.closest<HTMLElement>("[data-pick]");
    if (pick) {
      this.setState(toggleNeighbour(this.state, pick.dataset.pick ?? ""));
      return;
    }
    const marker = target.closest<HTMLElement>("[data-station]");
    if (marker?.dataset.station) {
      this.setState({ ...this.state, selectedStation: marker.dataset.station });
      return;
    }
    const action = target.closest<HTMLElement>("[data-action]")?.dataset.action;
    if (!action) return;
    switch (action) {
      case "dismiss-notice":
        this.setState({ ...this.state, notice: null });
        break;
      case "create-db-station":
        void this.createDb("station", this.state.selectedStation);
        break;
      case "create-db-country":
        void this.createDb("country", this.state.selectedCountry);
        break;
      case "create-db-region":
        void this.createDb("region", this.state.selectedRegion);
        break;
      case "map-link":
        void this.openMapLink();
        break;
      case "evaluate":
        void this.evaluateAll();
        break;
      case "clear-results":
        this.setState(clearForecasts(this.state));
        break;
      default:
        break;
    }
  }

  private onChange(event: Event): void {
    const target = event.target as HTMLSelectElement;
    if (target.name === "region") {
      this.setState({ ...this.state, selectedRegion: target.value || null, selectedCountry: null, stations: [] });
    } else if (target.name === "country") {
      const country = target.value || null;
      this.state = { ...this.state, selectedCountry: country };
      if (country) void this.loadStations(country);
    } else if (target.dataset.action === "select-db") {
      this.setState({ ...this.state, selectedDb: target.value });
    }
  }

  private onSubmit(event: Event): void {
    event.preventDefault();
    const form = event.target as HTMLFormElement;
    const kind = form.dataset.form;
    const data = new FormData(form);
    const submitter = (event as SubmitEvent).submitter as HTMLElement | null;
    const action = submitter?.dataset.action;
    if (kind === "ingest") {
      const year = Number(data.get("year"));
      if (action === "download-only") void this.startDownload(year);
      else void this.startIngest(year);
    } else if (kind === "load") {
      this.state = { ...this.state, selectedDb: String(data.get("db")) };
      void this.startLoad(String(data.get("db")), Number(data.get("year")));
    } else if (kind === "series") {
      void this.showSeries(data);
    } else if (kind === "view") {
      void this.buildView(data, action === "build-neighbour");
    } else if (kind === "forecast") {
      void this.runForecast(data);
    }
  }

  // -- operations ------------------------------------------------------------

  private async startDownload(year: number): Promise<void> {
    try {
      this.trackJob(await api.startDownload(year), () => this.notice(`Year ${year} downloaded successfully.`));
    } catch (error) {
      this.fail(error);
    }
  }

  private async startIngest(year: number): Promise<void> {
    try {
      this.trackJob(await api.startIngest(year), () => {
        this.setState({
          ...this.state,
          ingestedYears: [...new Set([...this.state.ingestedYears, year])].sort(),
        });
        this.notice(`Year ${year} ingested into the world database successfully.`);
      });
    } catch (error) {
      this.fail(error);
    }
  }

  private async loadStations(country: string): Promise<void> {
    try {
      const { stations } = await api.stations({ country });
      this.setState({ ...this.state, stations });
    } catch (error) {
      this.fail(error);
    }
  }

  private async createDb(kind: string, scopeId: string | null): Promise<void> {
    if (!scopeId) return;
    try {
      const created = await api.createDatabase(kind, scopeId);
      await this.refreshDatabases();
      this.setState({ ...this.state, selectedDb: created.name });
      this.notice(`Database "${created.name}" created successfully.`);
    } catch (error) {
      this.fail(error);
    }
  }

  private async openMapLink(): Promise<void> {
    if (!this.state.selectedStation) return;
    try {
      const { url } = await api.mapLink(this.state.selectedStation);
      window.open(url, "_blank", "noopener");
    } catch (error) {
      this.fail(error);
    }
  }

  private async startLoad(db: string, year: number): Promise<void> {
    try {
      this.trackJob(await api.startLoad(db, year), async () => {
        await this.refreshDatabases();
        this.render();
        this.notice(`Database "${db}" loaded with ${year} successfully.`);
      });
    } catch (error) {
      this.fail(error);
    }
  }

  private async showSeries(data: FormData): Promise<void> {
    if (!this.state.selectedDb) return;
    const variable = String(data.get("variable"));
    const unit = variable === "rainfall" ? "mm" : String(data.get("unit"));
    try {
      const series = await api.series(
        this.state.selectedDb,
        variable,
        unit,
        Number(data.get("from")),
        Number(data.get("to")),
      );
      this.setState({
        ...this.state,
        variable,
        unit,
        fromYear: Number(data.get("from")),
        toYear: Number(data.get("to")),
        series,
        lastError: null,
      });
    } catch (error) {
      this.fail(error);
    }
  }

  private async buildView(data: FormData, neighbour: boolean): Promise<void> {
    const fromYear = Number(data.get("from"));
    const toYear = Number(data.get("to"));
    const variable = String(data.get("variable"));
    const unit = variable === "rainfall" ? "mm" : String(data.get("unit"));
    try {
      const view = neighbour
        ? await api.createView({
            kind: "neighbour",
            stations: this.state.neighbourStations,
            variable,
            unit,
            from: fromYear,
            to: toYear,
          })
        : await api.createView({
            kind: "standard",
            db: this.state.selectedDb,
            from: fromYear,
            to: toYear,
          });
      this.setState({ ...this.state, view, fromYear, toYear, variable, unit, lastError: null });
      this.notice(`Minable view created successfully (${view.row_count} rows).`);
    } catch (error) {
      this.fail(error);
    }
  }

  private async runForecast(data: FormData): Promise<void> {
    if (!this.state.view) return;
    const seed = Number(data.get("seed") ?? 42);
    try {
      let entry: ForecastEntry;
      if (this.state.view.kind === "neighbour") {
        const target = String(data.get("target"));
        const result = await api.forecast({ view: this.state.view.path, mode: "nba", target_station: target, seed });
        entry = { result, report: null, label: `nba/bagging @${target}` };
      } else {
        const mode = String(data.get("mode"));
        const method = String(data.get("method"));
        const variable = String(data.get("variable"));
        const result = await api.forecast({ view: this.state.view.path, mode, method, variable, seed });
        entry = { result, report: null, label: `${mode}/${method} ${variable}` };
      }
      this.setState(addForecast(this.state, entry));
    } catch (error) {
      this.fail(error);
    }
  }

  private async evaluateAll(): Promise<void> {
    if (!this.state.selectedDb) return;
    try {
      const entries: ForecastEntry[] = [];
      for (const entry of this.state.forecasts) {
        const report = await api.evaluate(entry.result, this.state.selectedDb);
        entries.push({ ...entry, report });
      }
      this.setState({ ...this.state, forecasts: entries, lastError: null });
    } catch (error) {
      this.fail(error);
    }
  }
}

export function mountConsole(root: HTMLElement): ConsoleApp {
  const app = new ConsoleApp(root);
  void app.boot();
  return app;
}
