/**
 * Pure payload-to-presentation transforms.
 *
 * Everything here is a deterministic function of API payloads so the
 * contract tests can assert that each displayed value is traceable to a
 * payload field. No DOM, no fetches, no domain math beyond binning scores
 * into colors.
 */

import type {
  IsochronePayload,
  LayerFeature,
  LayerPayload,
  PoiOut,
  ReportDiffPayload,
  ReportPayload,
  ScenarioPayload,
} from "./api.js";

export const ZERO_FILL = "#d8d8d8"; // neutral style for zero-score cells

// sequential ramp, light to dark
export const RAMP = [
  "#ffffcc",
  "#c7e9b4",
  "#7fcdbb",
  "#41b6c4",
  "#1d91c0",
  "#225ea8",
  "#0c2c84",
];

export type ScaleMode = "quantile" | "linear";

export interface ColorScale {
  mode: ScaleMode;
  /** ascending upper bin edges over the nonzero scores */
  thresholds: number[];
  colors: string[];
  legend: { min: number; max: number; stops: { upTo: number; color: string }[] };
}

/**
 * Color scale over the nonzero scores of a layer. Quantile by default:
 * accessibility scores are heavy-tailed and a linear ramp washes out the
 * map. Zero scores are excluded from the scale and drawn in ZERO_FILL.
 */
export function buildColorScale(
  scores: number[],
  mode: ScaleMode = "quantile",
  colors: string[] = RAMP,
): ColorScale {
  const nonzero = scores.filter((s) => s > 0).sort((a, b) => a - b);
  if (nonzero.length === 0) {
    return {
      mode,
      thresholds: [],
      colors: [],
      legend: { min: 0, max: 0, stops: [] },
    };
  }
  const min = nonzero[0];
  const max = nonzero[nonzero.length - 1];
  const bins = Math.min(colors.length, nonzero.length);
  const thresholds: number[] = [];
  for (let k = 1; k <= bins; k += 1) {
    if (mode === "quantile") {
      const idx = Math.min(nonzero.length - 1, Math.ceil((k / bins) * nonzero.length) - 1);
      thresholds.push(nonzero[idx]);
    } else {
      thresholds.push(min + ((max - min) * k) / bins);
    }
  }
  const used = colors.slice(0, bins);
  return {
    mode,
    thresholds,
    colors: used,
    legend: {
      min,
      max,
      stops: thresholds.map((upTo, i) => ({ upTo, color: used[i] })),
    },
  };
}

export function colorFor(scale: ColorScale, score: number): string {
  if (score <= 0 || scale.thresholds.length === 0) {
    return ZERO_FILL;
  }
  for (let i = 0; i < scale.thresholds.length; i += 1) {
    if (score <= scale.thresholds[i]) {
      return scale.colors[i];
    }
  }
  return scale.colors[scale.colors.length - 1];
}

/** Equirectangular lon/lat -> SVG user units, y growing downwards. */
export interface Projector {
  x(lon: number): number;
  y(lat: number): number;
}

const EARTH_RADIUS_M = 6_371_000;

export function makeProjector(
  center: { lat: number; lon: number },
  metersPerUnit = 50,
): Projector {
  const kx =
    ((EARTH_RADIUS_M * Math.cos((center.lat * Math.PI) / 180)) * Math.PI) / 180;
  const ky = (EARTH_RADIUS_M * Math.PI) / 180;
  return {
    x: (lon) => ((lon - center.lon) * kx) / metersPerUnit,
    y: (lat) => -((lat - center.lat) * ky) / metersPerUnit,
  };
}

export function featurePath(feature: LayerFeature, proj: Projector): string {
  const ring = feature.geometry.coordinates[0];
  const parts = ring.map(([lon, lat], i) => {
    const cmd = i === 0 ? "M" : "L";
    return `${cmd}${proj.x(lon).toFixed(2)},${proj.y(lat).toFixed(2)}`;
  });
  return `${parts.join("")}Z`;
}

export interface CellViewModel {
  cellId: string;
  path: string;
  fill: string;
  score: number;
}

export function layerViewModel(
  payload: LayerPayload,
  scale: ColorScale,
  proj: Projector,
): CellViewModel[] {
  return payload.features.map((feature) => ({
    cellId: feature.properties.cell_id,
    path: featurePath(feature, proj),
    fill: colorFor(scale, feature.properties.score),
    score: feature.properties.score,
  }));
}

export interface TooltipLine {
  label: string;
  value: string | number;
}

/**
 * Tooltip content for a hovered cell: id, score, population and the
 * bracket counts of the selected dimension, all verbatim payload values.
 */
export function tooltipLines(
  properties: LayerFeature["properties"],
  dimension: string,
): TooltipLine[] {
  const lines: TooltipLine[] = [
    { label: "cell", value: properties.cell_id },
    { label: "score", value: properties.score },
    { label: "population", value: properties.population },
  ];
  const prefix = `${dimension}.`;
  for (const [key, value] of Object.entries(properties)) {
    if (key.startsWith(prefix)) {
      lines.push({ label: key.slice(prefix.length), value });
    }
  }
  return lines;
}

export interface BarViewModel {
  bracket: string;
  baseline: number | null;
  scenario: number | null;
  delta: number | null;
  population: number;
}

export interface ChartViewModel {
  dimension: string;
  bars: BarViewModel[];
  gapBaseline: number | "inf" | null;
  gapScenario: number | "inf" | null;
  /** max score across both series, for axis scaling */
  axisMax: number;
}

export function chartViewModel(
  baseline: ReportPayload,
  scenario?: ReportPayload,
  diff?: ReportDiffPayload,
): ChartViewModel {
  const bars = baseline.brackets.map((bracket, i) => ({
    bracket: bracket.name,
    baseline: bracket.score,
    scenario: scenario ? scenario.brackets[i].score : null,
    delta: diff ? diff.score_deltas[i] : null,
    population: bracket.population,
  }));
  let axisMax = 0;
  for (const bar of bars) {
    for (const v of [bar.baseline, bar.scenario]) {
      if (typeof v === "number" && v > axisMax) {
        axisMax = v;
      }
    }
  }
  return {
    dimension: baseline.dimension,
    bars,
    gapBaseline: baseline.gap_ratio,
    gapScenario: scenario ? scenario.gap_ratio : null,
    axisMax,
  };
}

export interface MarkerViewModel {
  id: string;
  name: string;
  x: number;
  y: number;
  kind: "baseline" | "scenario";
  removed: boolean;
}

/**
 * Markers for baseline POIs plus scenario additions. Added facilities get
 * the scenario style so the two kinds are never conflated; removed
 * baseline facilities are flagged for strikethrough styling.
 */
export function markerViewModels(
  pois: PoiOut[],
  proj: Projector,
  scenario?: ScenarioPayload | null,
): MarkerViewModel[] {
  const removed = new Set(scenario?.removed ?? []);
  const markers: MarkerViewModel[] = pois.map((poi) => ({
    id: poi.id,
    name: poi.name,
    x: proj.x(poi.lon),
    y: proj.y(poi.lat),
    kind: "baseline",
    removed: removed.has(poi.id),
  }));
  for (const poi of scenario?.added ?? []) {
    markers.push({
      id: poi.id,
      name: poi.name,
      x: proj.x(poi.lon),
      y: proj.y(poi.lat),
      kind: "scenario",
      removed: false,
    });
  }
  return markers;
}

export interface IsochroneViewModel {
  poiId: string;
  cellCount: number;
  paths: string[];
}

export function isochroneViewModel(
  payload: IsochronePayload,
  proj: Projector,
): IsochroneViewModel {
  return {
    poiId: payload.poi_id,
    cellCount: payload.cell_count,
    paths: payload.features.map((f) => featurePath(f, proj)),
  };
}

export function formatGap(gap: number | "inf" | null): string {
  if (gap === null) {
    return "n/a";
  }
  if (gap === "inf") {
    return "∞";
  }
  return String(gap);
}
