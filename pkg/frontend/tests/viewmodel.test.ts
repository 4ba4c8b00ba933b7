/**
 * Contract tests against recorded API payloads: every number the UI shows
 * must be a verbatim payload field (the frontend never computes domain
 * math), and the color scale/legend derive only from payload scores.
 */

import { describe, expect, it } from "vitest";

import type {
  IsochronePayload,
  LayerPayload,
  PoiOut,
  ReportPayload,
  ScenarioPayload,
  ScenarioResultPayload,
} from "../src/api.js";
import {
  buildColorScale,
  chartViewModel,
  colorFor,
  featurePath,
  formatGap,
  isochroneViewModel,
  layerViewModel,
  makeProjector,
  markerViewModels,
  tooltipLines,
  ZERO_FILL,
} from "../src/viewmodel.js";
import { fixture } from "./helpers.js";

const layer = fixture<LayerPayload>("layer_grocery_morning_race");
const report = fixture<ReportPayload>("report_grocery_morning_race");
const pois = fixture<PoiOut[]>("pois_grocery");
const isochrone = fixture<IsochronePayload>("isochrone_first_grocery");
const addedResult = fixture<ScenarioResultPayload>("scenario_result_added");
const scenarioWithAdd = fixture<ScenarioPayload>("scenario_with_add");
const proj = makeProjector({ lat: 39.9, lon: -83.0 });

describe("tooltip", () => {
  it("shows cell id, score, population and bracket counts verbatim", () => {
    for (const feature of layer.features.slice(0, 25)) {
      const lines = tooltipLines(feature.properties, "race");
      const byLabel = new Map(lines.map((l) => [l.label, l.value]));
      expect(byLabel.get("cell")).toBe(feature.properties.cell_id);
      expect(byLabel.get("score")).toBe(feature.properties.score);
      expect(byLabel.get("population")).toBe(feature.properties.population);
      for (const bracket of ["white", "black", "asian", "other"]) {
        expect(byLabel.get(bracket)).toBe(feature.properties[`race.${bracket}`]);
      }
    }
  });

  it("includes only the selected dimension's brackets", () => {
    const lines = tooltipLines(layer.features[0].properties, "race");
    const labels = lines.map((l) => l.label);
    // payload property keys are serialized alphabetically
    expect(labels).toEqual(["cell", "score", "population", "asian", "black", "other", "white"]);
  });
});

describe("color scale", () => {
  const scores = layer.features.map((f) => f.properties.score);

  it("legend bounds equal payload min/max of nonzero scores", () => {
    const nonzero = scores.filter((s) => s > 0);
    const scale = buildColorScale(scores);
    expect(scale.legend.min).toBe(Math.min(...nonzero));
    expect(scale.legend.max).toBe(Math.max(...nonzero));
  });

  it("zero scores get the neutral style", () => {
    const scale = buildColorScale(scores);
    expect(colorFor(scale, 0)).toBe(ZERO_FILL);
    const zeroCells = layerViewModel(layer, scale, proj).filter((c) => c.score === 0);
    expect(zeroCells.length).toBeGreaterThan(0);
    for (const cell of zeroCells) {
      expect(cell.fill).toBe(ZERO_FILL);
    }
  });

  it("uniform nonzero scores map to a single color", () => {
    const scale = buildColorScale([2, 2, 2, 0, 2]);
    const fills = new Set([2, 2, 2].map((s) => colorFor(scale, s)));
    expect(fills.size).toBe(1);
  });

  it("quantile thresholds are monotone and cover the max", () => {
    const scale = buildColorScale(scores);
    for (let i = 1; i < scale.thresholds.length; i += 1) {
      expect(scale.thresholds[i]).toBeGreaterThanOrEqual(scale.thresholds[i - 1]);
    }
    expect(scale.thresholds[scale.thresholds.length - 1]).toBe(scale.legend.max);
  });

  it("empty layer produces an empty scale", () => {
    const scale = buildColorScale([]);
    expect(scale.legend.stops).toEqual([]);
  });
});

describe("layer view model", () => {
  it("renders one polygon per payload feature", () => {
    const scale = buildColorScale(layer.features.map((f) => f.properties.score));
    const cells = layerViewModel(layer, scale, proj);
    expect(cells.length).toBe(layer.features.length);
    expect(cells.length).toBeGreaterThanOrEqual(380); // ~400-cell fixture
  });

  it("paths are closed hexagons", () => {
    const path = featurePath(layer.features[0], proj);
    expect(path.startsWith("M")).toBe(true);
    expect(path.endsWith("Z")).toBe(true);
    expect(path.split("L").length).toBe(7); // 6 edges + closing vertex
  });
});

describe("charts", () => {
  it("bar values equal the report payload verbatim", () => {
    const vm = chartViewModel(report);
    expect(vm.bars.map((b) => b.bracket)).toEqual(report.brackets.map((b) => b.name));
    expect(vm.bars.map((b) => b.baseline)).toEqual(report.brackets.map((b) => b.score));
    expect(vm.bars.map((b) => b.population)).toEqual(
      report.brackets.map((b) => b.population),
    );
    expect(vm.gapBaseline).toBe(report.gap_ratio);
  });

  it("scenario bars and deltas come from the result payload verbatim", () => {
    const vm = chartViewModel(
      addedResult.report.baseline,
      addedResult.report.scenario,
      addedResult.report.diff,
    );
    expect(vm.bars.map((b) => b.scenario)).toEqual(
      addedResult.report.scenario.brackets.map((b) => b.score),
    );
    expect(vm.bars.map((b) => b.delta)).toEqual(addedResult.report.diff.score_deltas);
    expect(vm.gapScenario).toBe(addedResult.report.scenario.gap_ratio);
  });

  it("gap formatting preserves payload values", () => {
    expect(formatGap(report.gap_ratio)).toBe(String(report.gap_ratio));
    expect(formatGap("inf")).toBe("∞");
    expect(formatGap(null)).toBe("n/a");
  });
});

describe("markers", () => {
  it("baseline markers match the poi payload 1:1", () => {
    const markers = markerViewModels(pois, proj, null);
    expect(markers.length).toBe(pois.length);
    expect(markers.every((m) => m.kind === "baseline")).toBe(true);
  });

  it("scenario-added markers are styled as scenario and counted", () => {
    const markers = markerViewModels(pois, proj, scenarioWithAdd);
    const scenarioMarkers = markers.filter((m) => m.kind === "scenario");
    expect(scenarioMarkers.length).toBe(scenarioWithAdd.added.length);
    expect(scenarioMarkers.map((m) => m.id)).toEqual(
      scenarioWithAdd.added.map((p) => p.id),
    );
  });

  it("removed baseline markers are flagged", () => {
    const withRemoval = { ...scenarioWithAdd, removed: [pois[0].id] };
    const markers = markerViewModels(pois, proj, withRemoval);
    expect(markers.find((m) => m.id === pois[0].id)?.removed).toBe(true);
  });
});

describe("isochrone", () => {
  it("overlay cell count equals the payload", () => {
    const vm = isochroneViewModel(isochrone, proj);
    expect(vm.cellCount).toBe(isochrone.cell_count);
    expect(vm.paths.length).toBe(isochrone.features.length);
    expect(isochrone.features.length).toBe(isochrone.cell_count);
  });
});
