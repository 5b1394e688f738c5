/** Orchestration between the API client and the state reducers.
 *
 * These functions hold the interaction contracts in one testable place:
 * layout edits round-trip through POST /layout, extraction posts the
 * current selections and appends the returned rule verbatim, a 422 turns
 * into an inline validation note, and any other failure (including a
 * malformed plot body) turns into an error banner with the rest of the
 * state untouched.
 */

import { ApiClient, ApiError } from "./api.js";
import { validatePlot } from "./render.js";
import {
  UiState,
  addRule,
  canExtract,
  layoutPayload,
  receivePlot,
  setError,
} from "./state.js";

function noteFrom(err: unknown): { kind: "banner" | "inline"; message: string } {
  if (err instanceof ApiError && err.status === 422) {
    return { kind: "inline", message: err.message };
  }
  const message = err instanceof Error ? err.message : String(err);
  return { kind: "banner", message };
}

/** Fetch geometry for the current layout fields. On success the new plot
 * replaces the old one and stale selections are pruned; on any failure the
 * previous plot, layout, and selections survive and only `error` is set. */
export async function refreshLayout(
  client: ApiClient,
  state: UiState,
): Promise<UiState> {
  if (!state.datasetId) {
    return setError(state, { kind: "banner", message: "no dataset selected" });
  }
  try {
    const doc = await client.layout(state.datasetId, layoutPayload(state));
    return receivePlot(state, validatePlot(doc));
  } catch (err) {
    return setError(state, noteFrom(err));
  }
}

/** Turn the selected blocks into a rule for `targetClass`. With nothing
 * selected this is a no-op that never touches the network (the button is
 * disabled in the UI; this guard keeps programmatic callers honest). */
export async function extractRule(
  client: ApiClient,
  state: UiState,
  targetClass: number,
): Promise<UiState> {
  if (!canExtract(state) || !state.datasetId) return state;
  try {
    const rule = await client.ruleFromBlocks(
      state.datasetId,
      state.selections,
      targetClass,
    );
    return addRule({ ...state, error: null }, rule);
  } catch (err) {
    return setError(state, noteFrom(err));
  }
}
