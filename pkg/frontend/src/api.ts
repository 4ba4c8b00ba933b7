/**
 * Typed client for the accessibility service API.
 *
 * Every number the UI displays comes out of these payloads verbatim; the
 * frontend never recomputes domain math.
 */

export interface LatLon {
  lat: number;
  lon: number;
}

export interface CityInfo {
  id: string;
  name: string;
  center: LatLon;
  categories: string[];
  windows: string[];
}

export interface LayerFeature {
  type: "Feature";
  geometry: { type: "Polygon"; coordinates: number[][][] };
  properties: { cell_id: string; score: number; population: number } & Record<
    string,
    number | string
  >;
}

export interface LayerPayload {
  type: "FeatureCollection";
  features: LayerFeature[];
}

export interface PoiOut {
  id: string;
  category: string;
  name: string;
  lat: number;
  lon: number;
  supply_units: number;
  origin: "baseline" | "scenario";
}

export interface ReportBracket {
  name: string;
  score: number | null;
  population: number;
}

export interface ReportPayload {
  dimension: string;
  brackets: ReportBracket[];
  gap_ratio: number | "inf" | null;
}

export interface IsochronePayload {
  type: "FeatureCollection";
  features: LayerFeature[];
  poi_id: string;
  window: string;
  budget_s: number;
  cell_count: number;
}

export interface ScenarioPayload {
  id: string;
  city: string;
  added: PoiOut[];
  removed: string[];
}

export interface ReportDiffPayload {
  dimension: string;
  brackets: string[];
  score_deltas: (number | null)[];
  gap_ratio_delta: number | null;
}

export interface ScenarioResultPayload {
  scenario: ScenarioPayload;
  city: string;
  category: string;
  window: string;
  dimension: string;
  layer: LayerPayload;
  delta: { cell_id: string; delta: number }[];
  report: {
    baseline: ReportPayload;
    scenario: ReportPayload;
    diff: ReportDiffPayload;
  };
}

export interface AddPoiBody {
  lat: number;
  lon: number;
  category: string;
  name?: string;
  supply_units?: number;
  id?: string;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

function query(params: Record<string, string | number | undefined>): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined) {
      parts.push(`${encodeURIComponent(key)}=${encodeURIComponent(String(value))}`);
    }
  }
  return parts.length ? `?${parts.join("&")}` : "";
}

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
    private readonly base = "",
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let code = "http_error";
      let message = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as {
          detail?: { code?: string; message?: string };
        };
        code = body.detail?.code ?? code;
        message = body.detail?.message ?? message;
      } catch {
        // non-JSON error body: keep defaults
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  cities(): Promise<CityInfo[]> {
    return this.request("/api/cities");
  }

  layer(
    city: string,
    category: string,
    window: string,
    dimension: string,
  ): Promise<LayerPayload> {
    return this.request(`/api/layer${query({ city, category, window, dimension })}`);
  }

  pois(city: string, category?: string): Promise<PoiOut[]> {
    return this.request(`/api/pois${query({ city, category })}`);
  }

  report(
    city: string,
    category: string,
    window: string,
    dimension: string,
  ): Promise<ReportPayload> {
    return this.request(`/api/report${query({ city, category, window, dimension })}`);
  }

  isochrone(
    poiId: string,
    city: string,
    window: string,
    scenario?: string,
  ): Promise<IsochronePayload> {
    return this.request(
      `/api/poi/${encodeURIComponent(poiId)}/isochrone${query({ city, window, scenario })}`,
    );
  }

  previewIsochrone(
    city: string,
    lat: number,
    lon: number,
    window: string,
  ): Promise<IsochronePayload> {
    return this.request(`/api/preview/isochrone${query({ city, lat, lon, window })}`);
  }

  createScenario(city: string, id?: string): Promise<ScenarioPayload> {
    return this.request("/api/scenario", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ city, id }),
    });
  }

  addPoi(scenarioId: string, body: AddPoiBody): Promise<ScenarioPayload> {
    return this.request(`/api/scenario/${encodeURIComponent(scenarioId)}/poi`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  removePoi(scenarioId: string, poiId: string): Promise<ScenarioPayload> {
    return this.request(
      `/api/scenario/${encodeURIComponent(scenarioId)}/poi/${encodeURIComponent(poiId)}`,
      { method: "DELETE" },
    );
  }

  scenarioResult(
    scenarioId: string,
    category: string,
    window: string,
    dimension: string,
  ): Promise<ScenarioResultPayload> {
    return this.request(
      `/api/scenario/${encodeURIComponent(scenarioId)}/result` +
        query({ category, window, dimension }),
    );
  }
}
