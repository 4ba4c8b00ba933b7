/**
 * DOM-free orchestration between the API client and a renderer.
 *
 * The controller owns the fetch discipline the UI promises: a control
 * change issues exactly one layer fetch and one report fetch (a single
 * combined result fetch when a scenario is active), scenario mutations are
 * optimistic with rollback, and every rendered number flows straight from
 * a payload.
 */

import type {
  ApiClient,
  CityInfo,
  IsochronePayload,
  LayerPayload,
  PoiOut,
  ReportDiffPayload,
  ReportPayload,
  ScenarioPayload,
} from "./api.js";
import { applyPatch, initialState, type ViewState } from "./state.js";

export interface RenderInput {
  state: ViewState;
  layer: LayerPayload;
  baselineReport: ReportPayload;
  scenarioReport: ReportPayload | null;
  reportDiff: ReportDiffPayload | null;
  pois: PoiOut[];
  scenario: ScenarioPayload | null;
}

export interface Renderer {
  render(input: RenderInput): void;
  renderIsochrone(payload: (IsochronePayload & { poiId: string }) | null): void;
  showPendingMarker(lat: number, lon: number): void;
  clearPendingMarker(): void;
  showError(message: string): void;
}

export class Controller {
  state: ViewState;
  scenario: ScenarioPayload | null = null;
  private pois: PoiOut[] = [];
  private busy = false;
  private shownIsochrone: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly renderer: Renderer,
    private readonly cities: CityInfo[],
  ) {
    this.state = initialState(cities);
  }

  get mutationPending(): boolean {
    return this.busy;
  }

  /** Initial load; same fetch discipline as any control change. */
  async start(): Promise<void> {
    await this.refresh(true);
  }

  /**
   * Apply a control-panel change. Exactly one layer fetch plus one report
   * fetch (or one combined scenario-result fetch) follows.
   */
  async changeControl(patch: Partial<ViewState>): Promise<void> {
    const before = this.state;
    this.state = applyPatch(this.state, patch, this.cities);
    const cityChanged = this.state.city !== before.city;
    if (cityChanged) {
      this.scenario = null;
    }
    await this.refresh(cityChanged || this.pois.length === 0);
  }

  private async refresh(reloadPois: boolean): Promise<void> {
    const { city, category, window, dimension } = this.state;
    if (reloadPois) {
      this.pois = await this.api.pois(city, category);
    } else if (this.poisCategory !== category) {
      this.pois = await this.api.pois(city, category);
    }
    this.poisCategory = category;

    let layer: LayerPayload;
    let baselineReport: ReportPayload;
    let scenarioReport: ReportPayload | null = null;
    let reportDiff: ReportDiffPayload | null = null;
    if (this.scenario) {
      const result = await this.api.scenarioResult(
        this.scenario.id,
        category,
        window,
        dimension,
      );
      layer = result.layer;
      baselineReport = result.report.baseline;
      scenarioReport = result.report.scenario;
      reportDiff = result.report.diff;
      this.scenario = result.scenario;
    } else {
      layer = await this.api.layer(city, category, window, dimension);
      baselineReport = await this.api.report(city, category, window, dimension);
    }
    this.renderer.render({
      state: this.state,
      layer,
      baselineReport,
      scenarioReport,
      reportDiff,
      pois: this.pois,
      scenario: this.scenario,
    });
  }

  private poisCategory: string | null = null;

  private async ensureScenario(): Promise<ScenarioPayload> {
    if (!this.scenario) {
      this.scenario = await this.api.createScenario(this.state.city);
    }
    return this.scenario;
  }

  /**
   * Place a hypothetical facility at a map click. The marker appears
   * optimistically; a failed mutation rolls it back.
   */
  async placePoi(lat: number, lon: number, supplyUnits = 1.0): Promise<void> {
    if (this.busy) {
      return;
    }
    this.busy = true;
    this.renderer.showPendingMarker(lat, lon);
    try {
      const scenario = await this.ensureScenario();
      this.scenario = await this.api.addPoi(scenario.id, {
        lat,
        lon,
        category: this.state.category,
        supply_units: supplyUnits,
      });
      await this.refresh(false);
    } catch (err) {
      this.renderer.showError(err instanceof Error ? err.message : String(err));
    } finally {
      this.renderer.clearPendingMarker();
      this.busy = false;
    }
  }

  /** Remove a baseline facility or retract a scenario-added one. */
  async removePoi(poiId: string): Promise<void> {
    if (this.busy) {
      return;
    }
    this.busy = true;
    try {
      const scenario = await this.ensureScenario();
      this.scenario = await this.api.removePoi(scenario.id, poiId);
      if (this.isScenarioEmpty()) {
        // dropping the last change returns the view to pure baseline
        this.scenario = null;
      }
      await this.refresh(false);
    } catch (err) {
      this.renderer.showError(err instanceof Error ? err.message : String(err));
    } finally {
      this.busy = false;
    }
  }

  private isScenarioEmpty(): boolean {
    return (
      this.scenario !== null &&
      this.scenario.added.length === 0 &&
      this.scenario.removed.length === 0
    );
  }

  /** Toggle the 30-minute isochrone overlay for a facility. */
  async togglePoiIsochrone(poiId: string): Promise<void> {
    if (this.shownIsochrone === poiId) {
      this.shownIsochrone = null;
      this.renderer.renderIsochrone(null);
      return;
    }
    const payload = await this.api.isochrone(
      poiId,
      this.state.city,
      this.state.window,
      this.scenario?.id,
    );
    this.shownIsochrone = poiId;
    this.renderer.renderIsochrone({ poiId, ...payload });
  }
}
