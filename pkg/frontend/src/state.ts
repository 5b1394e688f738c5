/** UI state and pure reducers for the block explorer.
 *
 * Every reducer returns a fresh state object; callers re-render from the
 * result. Layout-shaping fields live in LayoutState and every change to
 * them snapshots the previous value, so an arbitrary action sequence can
 * be undone step by step back to the initial layout.
 *
 * Rule metrics are stored exactly as the server returned them. Nothing in
 * this module computes a statistic.
 */

import type {
  Membership,
  PlotJson,
  RuleResponse,
  Selection,
  Transform,
  LayoutRequest,
} from "./types.js";

/** Fields that determine the geometry requested from POST /layout,
 * plus the line-weight slider (applied at render time only). */
export interface LayoutState {
  attributes: number[] | null;
  reference: number | null;
  purity: number;
  small: number;
  lineWeight: number;
  transforms: Transform[];
}

export interface ErrorNote {
  kind: "banner" | "inline";
  message: string;
}

export interface UiState {
  datasetId: string | null;
  layout: LayoutState;
  /** Undo stack: snapshot of `layout` before each change, oldest first. */
  history: LayoutState[];
  selections: Selection[];
  rules: RuleResponse[];
  plot: PlotJson | null;
  error: ErrorNote | null;
}

function cloneLayout(layout: LayoutState): LayoutState {
  return {
    attributes: layout.attributes ? [...layout.attributes] : null,
    reference: layout.reference,
    purity: layout.purity,
    small: layout.small,
    lineWeight: layout.lineWeight,
    transforms: layout.transforms.map((t) => ({ ...t })),
  };
}

export function initialState(datasetId: string | null = null): UiState {
  return {
    datasetId,
    layout: {
      attributes: null,
      reference: null,
      purity: 0.0,
      small: 0.0,
      lineWeight: 1.0,
      transforms: [],
    },
    history: [],
    selections: [],
    rules: [],
    plot: null,
    error: null,
  };
}

/** Request body for POST /layout reflecting the current layout fields. */
export function layoutPayload(state: UiState): LayoutRequest {
  const req: LayoutRequest = {
    purity: state.layout.purity,
    small: state.layout.small,
    transforms: state.layout.transforms.map((t) => ({ ...t })),
  };
  if (state.layout.attributes) req.attributes = [...state.layout.attributes];
  if (state.layout.reference !== null) req.reference = state.layout.reference;
  return req;
}

function withLayout(state: UiState, next: LayoutState): UiState {
  return {
    ...state,
    layout: next,
    history: [...state.history, cloneLayout(state.layout)],
  };
}

export function applyTransform(state: UiState, transform: Transform): UiState {
  const next = cloneLayout(state.layout);
  next.transforms.push({ ...transform });
  return withLayout(state, next);
}

export interface ThresholdChange {
  purity?: number;
  small?: number;
  lineWeight?: number;
}

export function setThresholds(state: UiState, change: ThresholdChange): UiState {
  const next = cloneLayout(state.layout);
  if (change.purity !== undefined) next.purity = change.purity;
  if (change.small !== undefined) next.small = change.small;
  if (change.lineWeight !== undefined) next.lineWeight = change.lineWeight;
  return withLayout(state, next);
}

export function setAttributes(state: UiState, attributes: number[] | null): UiState {
  const next = cloneLayout(state.layout);
  next.attributes = attributes ? [...attributes] : null;
  return withLayout(state, next);
}

export function setReference(state: UiState, reference: number | null): UiState {
  const next = cloneLayout(state.layout);
  next.reference = reference;
  return withLayout(state, next);
}

export function canUndo(state: UiState): boolean {
  return state.history.length > 0;
}

/** Pop the most recent layout snapshot. No-op on an empty history. */
export function undo(state: UiState): UiState {
  if (state.history.length === 0) return state;
  const history = [...state.history];
  const layout = history.pop() as LayoutState;
  return { ...state, layout, history };
}

function sameValues(a: number[], b: number[]): boolean {
  if (a.length !== b.length) return false;
  const xs = [...a].sort((p, q) => p - q);
  const ys = [...b].sort((p, q) => p - q);
  return xs.every((v, i) => v === ys[i]);
}

function blockExists(plot: PlotJson, attr: number, values: number[]): boolean {
  const axis = plot.axes.find((ax) => ax.attr === attr);
  if (!axis) return false;
  return axis.blocks.some((b) => sameValues(b.values, values));
}

/** Install fresh geometry from the server. Selections pointing at blocks
 * that no longer exist are dropped; a pending error is cleared. */
export function receivePlot(state: UiState, plot: PlotJson): UiState {
  const selections = state.selections.filter((s) =>
    blockExists(plot, s.attr, s.values),
  );
  return { ...state, plot, selections, error: null };
}

/** Highlight one block for rule extraction. A second selection on the same
 * attribute replaces the first. The block must exist in the current plot. */
export function selectBlock(
  state: UiState,
  attr: number,
  values: number[],
  membership: Membership,
): UiState {
  if (!state.plot) throw new Error("no layout loaded yet");
  if (!blockExists(state.plot, attr, values)) {
    throw new Error(`no block with values [${values.join(",")}] on attribute ${attr}`);
  }
  const kept = state.selections.filter((s) => s.attr !== attr);
  kept.push({ attr, values: [...values], membership });
  kept.sort((a, b) => a.attr - b.attr);
  return { ...state, selections: kept };
}

export function clearSelection(state: UiState, attr: number): UiState {
  return { ...state, selections: state.selections.filter((s) => s.attr !== attr) };
}

export function clearSelections(state: UiState): UiState {
  return { ...state, selections: [] };
}

/** The extract button is live only when at least one block is selected. */
export function canExtract(state: UiState): boolean {
  return state.selections.length > 0;
}

/** Append a server-produced rule verbatim; the panel shows its metrics
 * exactly as received. */
export function addRule(state: UiState, rule: RuleResponse): UiState {
  return { ...state, rules: [...state.rules, rule] };
}

export function setError(state: UiState, error: ErrorNote): UiState {
  return { ...state, error };
}

export function clearError(state: UiState): UiState {
  return { ...state, error: null };
}
