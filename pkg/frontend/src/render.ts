/**
 * SVG/DOM renderer. All values shown are taken from the RenderInput
 * payloads via the viewmodel transforms; this file only draws.
 */

import type { RenderInput, Renderer } from "./controller.js";
import type { CityInfo, IsochronePayload } from "./api.js";
import {
  buildColorScale,
  chartViewModel,
  formatGap,
  isochroneViewModel,
  layerViewModel,
  makeProjector,
  markerViewModels,
  tooltipLines,
  ZERO_FILL,
  type Projector,
  type ScaleMode,
} from "./viewmodel.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const VIEW = 600; // svg user units per half-axis

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

export interface MapCallbacks {
  onCellHover(cellId: string | null, clientX: number, clientY: number): void;
  onMapClick(lat: number, lon: number): void;
  onMarkerClick(poiId: string, kind: "baseline" | "scenario"): void;
  onMarkerRemove(poiId: string): void;
}

export class DomRenderer implements Renderer {
  private proj: Projector;
  private svg: SVGSVGElement;
  private layerGroup: SVGElement;
  private isoGroup: SVGElement;
  private markerGroup: SVGElement;
  private pendingGroup: SVGElement;
  private tooltip: HTMLElement;
  private legendBox: HTMLElement;
  private chartBox: HTMLElement;
  private errorBox: HTMLElement;
  scaleMode: ScaleMode = "quantile";

  constructor(
    mapHost: HTMLElement,
    sideHost: HTMLElement,
    city: CityInfo,
    private readonly callbacks: MapCallbacks,
  ) {
    this.cityCenter = city.center;
    this.proj = makeProjector(city.center);
    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("viewBox", `${-VIEW} ${-VIEW / 2} ${2 * VIEW} ${VIEW}`);
    this.svg.classList.add("citymap");
    this.layerGroup = svgEl("g", { class: "cells" });
    this.isoGroup = svgEl("g", { class: "isochrone" });
    this.markerGroup = svgEl("g", { class: "markers" });
    this.pendingGroup = svgEl("g", { class: "pending" });
    this.svg.append(this.layerGroup, this.isoGroup, this.markerGroup, this.pendingGroup);
    mapHost.append(this.svg);

    this.tooltip = el("div", "tooltip hidden");
    mapHost.append(this.tooltip);

    this.legendBox = el("div", "legend");
    this.chartBox = el("div", "charts");
    this.errorBox = el("div", "error hidden");
    sideHost.append(this.errorBox, this.legendBox, this.chartBox);

    this.svg.addEventListener("click", (event) => {
      if ((event.target as Element).closest(".marker")) {
        return;
      }
      const { lat, lon } = this.unprojectEvent(event);
      this.callbacks.onMapClick(lat, lon);
    });
  }

  private unprojectEvent(event: MouseEvent): { lat: number; lon: number } {
    const point = this.svg.createSVGPoint();
    point.x = event.clientX;
    point.y = event.clientY;
    const ctm = this.svg.getScreenCTM();
    const user = ctm ? point.matrixTransform(ctm.inverse()) : point;
    // invert the projector (meters-per-unit and the equirect factors)
    const metersPerUnit = 50;
    const kx = ((6_371_000 * Math.cos((this.cityCenter.lat * Math.PI) / 180)) * Math.PI) / 180;
    const ky = (6_371_000 * Math.PI) / 180;
    return {
      lon: this.cityCenter.lon + (user.x * metersPerUnit) / kx,
      lat: this.cityCenter.lat - (user.y * metersPerUnit) / ky,
    };
  }

  private cityCenter = { lat: 0, lon: 0 };

  setCity(city: CityInfo): void {
    this.cityCenter = city.center;
    this.proj = makeProjector(city.center);
  }

  render(input: RenderInput): void {
    this.errorBox.classList.add("hidden");

    const scores = input.layer.features.map((f) => f.properties.score);
    const scale = buildColorScale(scores, this.scaleMode);
    this.layerGroup.replaceChildren();
    if (input.layer.features.length === 0) {
      this.legendBox.replaceChildren(el("p", "empty", "no cells to display"));
    }
    const cells = layerViewModel(input.layer, scale, this.proj);
    const byId = new Map(
      input.layer.features.map((f) => [f.properties.cell_id, f.properties]),
    );
    for (const cell of cells) {
      const path = svgEl("path", {
        d: cell.path,
        fill: cell.fill,
        class: "cell",
        "data-cell": cell.cellId,
      });
      path.addEventListener("mousemove", (event) => {
        this.callbacks.onCellHover(cell.cellId, event.clientX, event.clientY);
        const props = byId.get(cell.cellId);
        if (props) {
          const lines = tooltipLines(props, input.state.dimension)
            .map((line) => `${line.label}: ${line.value}`)
            .join("\n");
          this.tooltip.textContent = lines;
          this.tooltip.classList.remove("hidden");
          this.tooltip.style.left = `${event.offsetX + 14}px`;
          this.tooltip.style.top = `${event.offsetY + 14}px`;
        }
      });
      path.addEventListener("mouseleave", () => {
        this.callbacks.onCellHover(null, 0, 0);
        this.tooltip.classList.add("hidden");
      });
      this.layerGroup.append(path);
    }

    this.renderLegend(scale);
    this.renderMarkers(input);
    this.renderCharts(input);
  }

  private renderLegend(scale: ReturnType<typeof buildColorScale>): void {
    this.legendBox.replaceChildren(el("h3", undefined, "accessibility"));
    const rows = el("div", "legend-rows");
    const zero = el("div", "legend-row");
    zero.append(colorChip(ZERO_FILL), el("span", undefined, "0"));
    rows.append(zero);
    for (const stop of scale.legend.stops) {
      const row = el("div", "legend-row");
      row.append(colorChip(stop.color), el("span", undefined, `≤ ${stop.upTo}`));
      rows.append(row);
    }
    this.legendBox.append(rows);
    if (scale.legend.stops.length > 0) {
      this.legendBox.append(
        el("p", "legend-bounds", `min ${scale.legend.min} · max ${scale.legend.max}`),
      );
    }
  }

  private renderMarkers(input: RenderInput): void {
    this.markerGroup.replaceChildren();
    const markers = markerViewModels(input.pois, this.proj, input.scenario);
    for (const marker of markers) {
      const group = svgEl("g", {
        class: `marker ${marker.kind}${marker.removed ? " removed" : ""}`,
        transform: `translate(${marker.x.toFixed(2)},${marker.y.toFixed(2)})`,
        "data-poi": marker.id,
      });
      group.append(
        svgEl("circle", { r: "7", class: "marker-dot" }),
        svgEl("title", {}),
      );
      (group.lastChild as SVGElement).textContent =
        `${marker.name} (${marker.kind}${marker.removed ? ", removed" : ""})`;
      group.addEventListener("click", (event) => {
        event.stopPropagation();
        if (event.shiftKey) {
          this.callbacks.onMarkerRemove(marker.id);
        } else {
          this.callbacks.onMarkerClick(marker.id, marker.kind);
        }
      });
      this.markerGroup.append(group);
    }
  }

  private renderCharts(input: RenderInput): void {
    const vm = chartViewModel(
      input.baselineReport,
      input.scenarioReport ?? undefined,
      input.reportDiff ?? undefined,
    );
    this.chartBox.replaceChildren(el("h3", undefined, `${vm.dimension} equity`));
    const gap = el("p", "gap-badge");
    gap.textContent = input.scenarioReport
      ? `gap ratio: ${formatGap(vm.gapBaseline)} → ${formatGap(vm.gapScenario)}`
      : `gap ratio: ${formatGap(vm.gapBaseline)}`;
    this.chartBox.append(gap);
    const chart = el("div", "bars");
    for (const bar of vm.bars) {
      const row = el("div", "bar-row");
      row.append(el("span", "bar-label", bar.bracket));
      const track = el("div", "bar-track");
      track.append(barDiv(bar.baseline, vm.axisMax, "bar-baseline"));
      if (input.scenarioReport) {
        track.append(barDiv(bar.scenario, vm.axisMax, "bar-scenario"));
      }
      row.append(track);
      const value = el(
        "span",
        "bar-value",
        bar.scenario !== null && input.scenarioReport
          ? `${bar.baseline ?? "n/a"} → ${bar.scenario ?? "n/a"}`
          : `${bar.baseline ?? "n/a"}`,
      );
      row.append(value);
      chart.append(row);
    }
    this.chartBox.append(chart);
  }

  renderIsochrone(payload: (IsochronePayload & { poiId: string }) | null): void {
    this.isoGroup.replaceChildren();
    if (!payload) {
      return;
    }
    const vm = isochroneViewModel(payload, this.proj);
    for (const d of vm.paths) {
      this.isoGroup.append(svgEl("path", { d, class: "iso-cell" }));
    }
  }

  showPendingMarker(lat: number, lon: number): void {
    this.pendingGroup.replaceChildren(
      svgEl("circle", {
        cx: this.proj.x(lon).toFixed(2),
        cy: this.proj.y(lat).toFixed(2),
        r: "7",
        class: "marker-pending",
      }),
    );
  }

  clearPendingMarker(): void {
    this.pendingGroup.replaceChildren();
  }

  showError(message: string): void {
    this.errorBox.textContent = message;
    this.errorBox.classList.remove("hidden");
  }
}

function colorChip(color: string): HTMLElement {
  const chip = el("span", "chip");
  chip.style.background = color;
  return chip;
}

function barDiv(value: number | null, axisMax: number, cls: string): HTMLElement {
  const bar = el("div", cls);
  const frac = value === null || axisMax <= 0 ? 0 : value / axisMax;
  bar.style.width = `${Math.round(frac * 100)}%`;
  return bar;
}
