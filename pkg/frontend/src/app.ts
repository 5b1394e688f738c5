/** Browser wiring: connects the controls in index.html to the reducers,
 * the API client, and the SVG renderer. Everything interesting lives in
 * state.ts / controller.ts / render.ts; this file only moves DOM events
 * in and HTML out.
 */

import { ApiClient, ApiError } from "./api.js";
import { extractRule, refreshLayout } from "./controller.js";
import { renderPlot } from "./render.js";
import {
  UiState,
  applyTransform,
  canExtract,
  canUndo,
  clearSelections,
  initialState,
  selectBlock,
  setAttributes,
  setReference,
  setThresholds,
  undo,
} from "./state.js";
import type { DatasetInfo, Membership, RuleResponse, Transform } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const baseUrl = new URLSearchParams(location.search).get("api") ?? "";
const client = new ApiClient(baseUrl);

let state: UiState = initialState();

const datasetSelect = el<HTMLSelectElement>("dataset-select");
const axisSelect = el<HTMLSelectElement>("axis-select");
const plotHost = el<HTMLDivElement>("plot");
const banner = el<HTMLDivElement>("error-banner");
const inlineError = el<HTMLSpanElement>("inline-error");
const rulesHost = el<HTMLDivElement>("rules");
const describeHost = el<HTMLUListElement>("describe");
const mineHost = el<HTMLPreElement>("mine-result");
const selectionLabel = el<HTMLSpanElement>("selection-summary");

const purityInput = el<HTMLInputElement>("purity");
const smallInput = el<HTMLInputElement>("small");
const weightInput = el<HTMLInputElement>("line-weight");
const uniformInput = el<HTMLInputElement>("uniform");
const attributesInput = el<HTMLInputElement>("attributes");
const referenceInput = el<HTMLInputElement>("reference");
const relocateInput = el<HTMLInputElement>("relocate-threshold");
const sortClassInput = el<HTMLInputElement>("sort-class");
const sortTopInput = el<HTMLInputElement>("sort-top");
const targetClassInput = el<HTMLInputElement>("target-class");

const extractBtn = el<HTMLButtonElement>("btn-extract");
const undoBtn = el<HTMLButtonElement>("btn-undo");

function metricsTable(rule: RuleResponse): string {
  const m = rule.metrics;
  const rows: Array<[string, number]> = [
    ["precision %", m.precision_pct],
    ["coverage %", m.coverage_pct],
    ["recall %", m.recall_pct],
    ["covered", m.N_covered],
    ["correct", m.N_correct],
    ["incorrect", m.N_incorrect],
  ];
  const cells = rows
    .map(([k, v]) => `<tr><td>${k}</td><td>${v}</td></tr>`)
    .join("");
  return `<table class="metrics">${cells}</table>`;
}

function render(): void {
  if (state.plot) {
    plotHost.innerHTML = renderPlot(state.plot, {
      lineWeight: Number(weightInput.value),
      uniformLines: uniformInput.checked,
      selections: state.selections,
    });
    const attrs = state.plot.axes.map((a) => a.attr);
    const current = axisSelect.value;
    axisSelect.innerHTML = attrs
      .map((a) => `<option value="${a}">X${a}</option>`)
      .join("");
    if (attrs.some((a) => String(a) === current)) axisSelect.value = current;
  }
  banner.textContent = state.error?.kind === "banner" ? state.error.message : "";
  banner.style.display = state.error?.kind === "banner" ? "block" : "none";
  inlineError.textContent = state.error?.kind === "inline" ? state.error.message : "";
  extractBtn.disabled = !canExtract(state);
  undoBtn.disabled = !canUndo(state);
  selectionLabel.textContent = state.selections.length
    ? state.selections
        .map((s) => `X${s.attr} [${s.values.join(",")}] ${s.membership}`)
        .join("; ")
    : "none";
  rulesHost.innerHTML = state.rules
    .map(
      (r) =>
        `<div class="rule"><code>${r.text}</code>${metricsTable(r)}</div>`,
    )
    .join("");
}

async function refresh(): Promise<void> {
  state = await refreshLayout(client, state);
  render();
}

function currentAxisOrder(): number[] {
  return state.plot ? state.plot.axes.map((a) => a.attr) : [];
}

async function applyAndRefresh(transform: Transform): Promise<void> {
  state = applyTransform(state, transform);
  await refresh();
}

function selectedAxis(): number | null {
  const v = Number(axisSelect.value);
  return Number.isFinite(v) && axisSelect.value !== "" ? v : null;
}

function moveAxis(delta: number): Transform | null {
  const attr = selectedAxis();
  if (attr === null) return null;
  const order = currentAxisOrder();
  const i = order.indexOf(attr);
  const j = i + delta;
  if (i < 0 || j < 0 || j >= order.length) return null;
  const swapped = [...order];
  const a = swapped[i] as number;
  swapped[i] = swapped[j] as number;
  swapped[j] = a;
  return { op: "reorder", order: swapped };
}

function parseAttributes(text: string): number[] | null {
  const trimmed = text.trim();
  if (!trimmed) return null;
  return trimmed
    .split(",")
    .map((t) => Number(t.trim()))
    .filter((n) => Number.isFinite(n));
}

function wireControls(): void {
  el<HTMLButtonElement>("btn-flip").addEventListener("click", () => {
    const attr = selectedAxis();
    if (attr !== null) void applyAndRefresh({ op: "flip", attr });
  });
  el<HTMLButtonElement>("btn-left").addEventListener("click", () => {
    const t = moveAxis(-1);
    if (t) void applyAndRefresh(t);
  });
  el<HTMLButtonElement>("btn-right").addEventListener("click", () => {
    const t = moveAxis(1);
    if (t) void applyAndRefresh(t);
  });
  el<HTMLButtonElement>("btn-relocate").addEventListener("click", () => {
    void applyAndRefresh({ op: "relocate", threshold: Number(relocateInput.value) });
  });
  el<HTMLButtonElement>("btn-sort").addEventListener("click", () => {
    void applyAndRefresh({
      op: "sort",
      class: Number(sortClassInput.value),
      on_top: sortTopInput.checked,
    });
  });
  undoBtn.addEventListener("click", () => {
    state = undo(state);
    void refresh();
  });
  el<HTMLButtonElement>("btn-apply-view").addEventListener("click", () => {
    state = setAttributes(state, parseAttributes(attributesInput.value));
    const ref = referenceInput.value.trim();
    state = setReference(state, ref === "" ? null : Number(ref));
    void refresh();
  });
  el<HTMLButtonElement>("btn-clear-selection").addEventListener("click", () => {
    state = clearSelections(state);
    render();
  });

  for (const input of [purityInput, smallInput]) {
    input.addEventListener("change", () => {
      state = setThresholds(state, {
        purity: Number(purityInput.value),
        small: Number(smallInput.value),
      });
      void refresh();
    });
  }
  weightInput.addEventListener("input", () => {
    state = setThresholds(state, { lineWeight: Number(weightInput.value) });
    render();
  });
  uniformInput.addEventListener("change", render);

  plotHost.addEventListener("click", (event) => {
    const target = event.target as Element | null;
    const group = target?.closest("[data-attr]");
    if (!group) return;
    const attr = Number(group.getAttribute("data-attr"));
    const raw = group.getAttribute("data-values") ?? "";
    const values = raw === "" ? [] : raw.split(",").map(Number);
    const membership: Membership = event.shiftKey ? "not-in" : "in";
    try {
      state = selectBlock(state, attr, values, membership);
    } catch (err) {
      state = {
        ...state,
        error: { kind: "inline", message: (err as Error).message },
      };
    }
    render();
  });

  extractBtn.addEventListener("click", () => {
    void (async () => {
      state = await extractRule(client, state, Number(targetClassInput.value));
      render();
    })();
  });

  el<HTMLButtonElement>("btn-describe").addEventListener("click", () => {
    void (async () => {
      if (!state.datasetId) return;
      try {
        const res = await client.describe(state.datasetId, {
          purity: Number(purityInput.value) || 0.8,
          size: 0.1,
        });
        describeHost.innerHTML = res.lines
          .map((line) => `<li>${line}</li>`)
          .join("");
      } catch (err) {
        state = { ...state, error: { kind: "banner", message: String(err) } };
        render();
      }
    })();
  });

  el<HTMLButtonElement>("btn-mine").addEventListener("click", () => {
    void runMiningPreset();
  });

  datasetSelect.addEventListener("change", () => {
    state = initialState(datasetSelect.value);
    void refresh();
  });
}

const MINE_PRESETS: Record<string, unknown> = {
  "srg1-sequential": {
    algorithm: "srg1",
    grouping: { kind: "sequential", size: 3 },
    thresholds: { precision: 1.0, coverage: 0.005 },
  },
  "srg2-relaxed": {
    algorithm: "srg2",
    grouping: { kind: "sequential", size: 3 },
    thresholds: { precision: 0.95, coverage: 0.005 },
  },
};

async function runMiningPreset(): Promise<void> {
  if (!state.datasetId) return;
  const preset = el<HTMLSelectElement>("mine-preset").value;
  const config = MINE_PRESETS[preset];
  if (!config) return;
  mineHost.textContent = "submitting...";
  let runId: string;
  try {
    const ticket = await client.mine(state.datasetId, config);
    runId = ticket.run_id;
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      const detail = err.detail as { run_id?: string } | null;
      if (!detail?.run_id) {
        mineHost.textContent = err.message;
        return;
      }
      runId = detail.run_id;
    } else {
      mineHost.textContent = String(err);
      return;
    }
  }
  for (;;) {
    const record = await client.run(runId);
    if (record.status === "done" || record.status === "error") {
      mineHost.textContent = JSON.stringify(
        record.error ?? record.result,
        null,
        2,
      );
      return;
    }
    mineHost.textContent = `run ${runId}: ${record.status}`;
    await new Promise((resolve) => setTimeout(resolve, 500));
  }
}

async function boot(): Promise<void> {
  wireControls();
  let datasets: DatasetInfo[];
  try {
    datasets = await client.listDatasets();
  } catch (err) {
    banner.textContent = `cannot reach service: ${String(err)}`;
    banner.style.display = "block";
    return;
  }
  datasetSelect.innerHTML = datasets
    .map((d) => `<option value="${d.id}">${d.id} (${d.cases} cases)</option>`)
    .join("");
  const first = datasets[0];
  if (first) {
    state = initialState(first.id);
    await refresh();
  }
}

void boot();
