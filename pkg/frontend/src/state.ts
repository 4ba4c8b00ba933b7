/** View state: the current control-panel selection plus scenario context. */

import type { CityInfo } from "./api.js";

export interface ViewState {
  city: string;
  category: string;
  window: string;
  dimension: string;
  scenarioId: string | null;
  selectedPoi: string | null;
  hoverCell: string | null;
}

export const DIMENSIONS = ["race", "age_sex", "income", "vehicle"] as const;

export function initialState(cities: CityInfo[]): ViewState {
  if (cities.length === 0) {
    throw new Error("no cities loaded");
  }
  const city = cities[0];
  const category = city.categories.includes("vaccination_center")
    ? "vaccination_center"
    : city.categories[0];
  const window = city.windows.includes("morning") ? "morning" : city.windows[0];
  return {
    city: city.id,
    category,
    window,
    dimension: "race",
    scenarioId: null,
    selectedPoi: null,
    hoverCell: null,
  };
}

/** Clamp a state patch to the capabilities advertised by /api/cities. */
export function applyPatch(
  state: ViewState,
  patch: Partial<ViewState>,
  cities: CityInfo[],
): ViewState {
  const next = { ...state, ...patch };
  const city = cities.find((c) => c.id === next.city);
  if (!city) {
    throw new Error(`unknown city ${next.city}`);
  }
  if (!city.categories.includes(next.category)) {
    next.category = city.categories[0];
  }
  if (!city.windows.includes(next.window)) {
    next.window = city.windows[0];
  }
  if (!DIMENSIONS.includes(next.dimension as (typeof DIMENSIONS)[number])) {
    next.dimension = "race";
  }
  if (patch.city !== undefined && patch.city !== state.city) {
    // scenarios and selections are city-scoped
    next.scenarioId = null;
    next.selectedPoi = null;
    next.hoverCell = null;
  }
  return next;
}
