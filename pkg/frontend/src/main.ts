/** Bootstrap: load capabilities, build the controller, wire the controls. */

import { ApiClient } from "./api.js";
import { Controller } from "./controller.js";
import { DomRenderer } from "./render.js";
import { DIMENSIONS } from "./state.js";

const CATEGORY_LABELS: Record<string, string> = {
  vaccination_center: "Vaccination Centers",
  grocery: "Grocery Stores",
  restaurant: "Restaurants",
  school: "Schools & Pre-schools",
  hospital_clinic: "Hospitals & Clinics",
  cinema_theatre: "Cinemas & Theaters",
};

const DIMENSION_LABELS: Record<string, string> = {
  race: "Race",
  age_sex: "Age & Sex",
  income: "Income",
  vehicle: "Vehicle Availability",
};

function option(value: string, label: string): HTMLOptionElement {
  const node = document.createElement("option");
  node.value = value;
  node.textContent = label;
  return node;
}

async function boot(): Promise<void> {
  const api = new ApiClient();
  const cities = await api.cities();
  const controlsHost = document.getElementById("controls")!;
  const mapHost = document.getElementById("map")!;
  const sideHost = document.getElementById("side")!;

  if (cities.length === 0) {
    mapHost.textContent = "no cities are loaded on the server";
    return;
  }

  let controller: Controller;
  const renderer = new DomRenderer(mapHost, sideHost, cities[0], {
    onCellHover() {
      // tooltip handled inside the renderer; hook kept for tests/extensions
    },
    onMapClick(lat, lon) {
      if (placeMode.checked) {
        void controller.placePoi(lat, lon);
      }
    },
    onMarkerClick(poiId) {
      void controller.togglePoiIsochrone(poiId);
    },
    onMarkerRemove(poiId) {
      void controller.removePoi(poiId);
    },
  });
  controller = new Controller(api, renderer, cities);

  const citySel = document.createElement("select");
  for (const city of cities) {
    citySel.append(option(city.id, city.name));
  }
  const categorySel = document.createElement("select");
  const windowSel = document.createElement("select");
  const dimensionSel = document.createElement("select");
  for (const dim of DIMENSIONS) {
    dimensionSel.append(option(dim, DIMENSION_LABELS[dim] ?? dim));
  }

  const placeMode = document.createElement("input");
  placeMode.type = "checkbox";
  placeMode.id = "place-mode";
  const placeLabel = document.createElement("label");
  placeLabel.htmlFor = "place-mode";
  placeLabel.textContent = "place facility on click";

  function syncCityOptions(): void {
    const city = cities.find((c) => c.id === controller.state.city)!;
    categorySel.replaceChildren(
      ...city.categories.map((c) => option(c, CATEGORY_LABELS[c] ?? c)),
    );
    windowSel.replaceChildren(...city.windows.map((w) => option(w, w)));
    citySel.value = controller.state.city;
    categorySel.value = controller.state.category;
    windowSel.value = controller.state.window;
    dimensionSel.value = controller.state.dimension;
  }

  function labelled(text: string, node: HTMLElement): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "control";
    const label = document.createElement("span");
    label.textContent = text;
    wrap.append(label, node);
    return wrap;
  }

  controlsHost.append(
    labelled("city", citySel),
    labelled("facility type", categorySel),
    labelled("time of day", windowSel),
    labelled("demographics", dimensionSel),
    labelled("scenario", placeLabel),
    placeMode,
  );

  const busyGuard = (fn: () => Promise<void>) => () => {
    if (!controller.mutationPending) {
      void fn().then(syncCityOptions);
    }
  };
  citySel.addEventListener("change", busyGuard(async () => {
    await controller.changeControl({ city: citySel.value });
    const city = cities.find((c) => c.id === controller.state.city)!;
    renderer.setCity(city);
  }));
  categorySel.addEventListener(
    "change",
    busyGuard(() => controller.changeControl({ category: categorySel.value })),
  );
  windowSel.addEventListener(
    "change",
    busyGuard(() => controller.changeControl({ window: windowSel.value })),
  );
  dimensionSel.addEventListener(
    "change",
    busyGuard(() => controller.changeControl({ dimension: dimensionSel.value })),
  );

  await controller.start();
  syncCityOptions();
}

void boot();
