/** SVG rendering of layout documents.
 *
 * renderPlot is a pure function from a PlotJson document to an SVG string,
 * so the drawing logic is testable without a DOM. The app injects the
 * string into the page and attaches event handlers through the data-attr /
 * data-values attributes stamped on each block group.
 *
 * Visual vocabulary: each block is a stacked bar on its axis; the share of
 * the dominant class is filled with that class's color and the remaining
 * mass is grey. Blocks at or above the purity threshold get a green frame.
 * A <title> child carries the histogram and purity for hover inspection.
 */

import type { BlockGeom, PlotJson, Selection } from "./types.js";

export const DEFAULT_PALETTE = ["#cc33cc", "#3355cc", "#e8c500"];
export const NON_DOMINANT_GREY = "#9a9a9a";
export const PURE_FRAME = "#1e9e3e";

export interface RenderOptions {
  width?: number;
  height?: number;
  /** Class colors, assigned to class ids in ascending order. */
  palette?: string[];
  /** Blocks with purity >= this get the green frame. */
  pureThreshold?: number;
  /** Multiplier for polyline stroke widths. */
  lineWeight?: number;
  /** Ignore case weights and draw every line at the same width. */
  uniformLines?: boolean;
  /** Blocks to mark as selected (dashed outline + membership tag). */
  selections?: Selection[];
}

const MARGIN_X = 48;
const MARGIN_TOP = 16;
const MARGIN_BOTTOM = 32;
const AXIS_WIDTH = 26;

function fail(reason: string): never {
  throw new Error(`plot document: ${reason}`);
}

function isNum(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

/** Structural check of a /layout response. Throws with a readable reason;
 * the app turns that into the error banner without touching its state. */
export function validatePlot(doc: unknown): PlotJson {
  if (doc === null || typeof doc !== "object" || Array.isArray(doc)) {
    fail("expected an object with axes and lines");
  }
  const obj = doc as Record<string, unknown>;
  if (!Array.isArray(obj.axes)) fail("axes must be an array");
  if (!Array.isArray(obj.lines)) fail("lines must be an array");
  obj.axes.forEach((axis, i) => {
    if (axis === null || typeof axis !== "object") fail(`axis ${i} is not an object`);
    const ax = axis as Record<string, unknown>;
    if (!isNum(ax.attr)) fail(`axis ${i} has no numeric attr`);
    if (typeof ax.flipped !== "boolean") fail(`axis ${i} has no flipped flag`);
    if (!Array.isArray(ax.blocks)) fail(`axis ${i} blocks must be an array`);
    ax.blocks.forEach((block, j) => {
      const b = block as Record<string, unknown>;
      if (b === null || typeof b !== "object") fail(`block ${i}/${j} is not an object`);
      if (!Array.isArray(b.values)) fail(`block ${i}/${j} values must be an array`);
      if (!isNum(b.y0) || !isNum(b.y1)) fail(`block ${i}/${j} has non-numeric bounds`);
      if (b.y0 < -1e-9 || b.y1 > 1 + 1e-9 || b.y0 > b.y1) {
        fail(`block ${i}/${j} bounds [${b.y0}, ${b.y1}] outside [0, 1]`);
      }
      if (!isNum(b.frequency)) fail(`block ${i}/${j} has no frequency`);
      if (!isNum(b.purity) || b.purity < 0 || b.purity > 1 + 1e-9) {
        fail(`block ${i}/${j} purity out of range`);
      }
      if (b.histogram === null || typeof b.histogram !== "object") {
        fail(`block ${i}/${j} has no histogram`);
      }
    });
  });
  const nAxes = obj.axes.length;
  obj.lines.forEach((line, i) => {
    if (line === null || typeof line !== "object") fail(`line ${i} is not an object`);
    const ln = line as Record<string, unknown>;
    if (!Array.isArray(ln.path)) fail(`line ${i} path must be an array`);
    if (ln.path.length !== nAxes) {
      fail(`line ${i} path has ${ln.path.length} points for ${nAxes} axes`);
    }
    if (!ln.path.every(isNum)) fail(`line ${i} path has non-numeric points`);
    if (!isNum(ln.weight) || ln.weight < 0) fail(`line ${i} has a bad weight`);
    if (!isNum(ln.class)) fail(`line ${i} has no class`);
  });
  return doc as PlotJson;
}

/** Map each class id appearing in the plot to a palette color, ids sorted
 * ascending, palette reused cyclically when there are more classes. */
export function classPalette(plot: PlotJson, palette?: string[]): Map<number, string> {
  const colors = palette && palette.length > 0 ? palette : DEFAULT_PALETTE;
  const ids = new Set<number>();
  for (const axis of plot.axes) {
    for (const block of axis.blocks) {
      if (block.dominant_class !== null) ids.add(block.dominant_class);
    }
  }
  for (const line of plot.lines) ids.add(line.class);
  const sorted = [...ids].sort((a, b) => a - b);
  const map = new Map<number, string>();
  sorted.forEach((id, i) => map.set(id, colors[i % colors.length] as string));
  return map;
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toFixed(2);
}

function blockTitle(attr: number, block: BlockGeom): string {
  const hist = Object.entries(block.histogram)
    .sort(([a], [b]) => Number(a) - Number(b))
    .map(([cls, n]) => `C${cls}:${n}`)
    .join(" ");
  const purityPct = Math.round(block.purity * 100);
  return (
    `X${attr} values ${block.values.join(",")} | ` +
    `${block.frequency} cases | purity ${purityPct}% | ${hist}`
  );
}

function selectionFor(
  selections: Selection[] | undefined,
  attr: number,
  values: number[],
): Selection | undefined {
  if (!selections) return undefined;
  const want = [...values].sort((a, b) => a - b).join(",");
  return selections.find(
    (s) =>
      s.attr === attr && [...s.values].sort((a, b) => a - b).join(",") === want,
  );
}

export function renderPlot(plot: PlotJson, opts: RenderOptions = {}): string {
  const width = opts.width ?? 960;
  const height = opts.height ?? 540;
  const pureThreshold = opts.pureThreshold ?? 1.0;
  const palette = classPalette(plot, opts.palette);
  const plotH = height - MARGIN_TOP - MARGIN_BOTTOM;
  const nAxes = plot.axes.length;
  const step = nAxes > 1 ? (width - 2 * MARGIN_X) / (nAxes - 1) : 0;
  const axisX = (i: number) => (nAxes > 1 ? MARGIN_X + i * step : width / 2);
  // layout y grows upward; the screen y axis grows downward
  const toScreenY = (v: number) => MARGIN_TOP + (1 - v) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
      `width="${width}" height="${height}" font-family="sans-serif">`,
  );
  parts.push(`<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`);

  const maxWeight = plot.lines.reduce((m, l) => Math.max(m, l.weight), 0);
  const lineScale = opts.lineWeight ?? 1.0;
  for (const line of plot.lines) {
    const pts = line.path
      .map((v, i) => `${fmt(axisX(i))},${fmt(toScreenY(v))}`)
      .join(" ");
    const w = opts.uniformLines
      ? 1.5 * lineScale
      : lineScale * (0.6 + (maxWeight > 0 ? 3.4 * (line.weight / maxWeight) : 0));
    const color = palette.get(line.class) ?? NON_DOMINANT_GREY;
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" ` +
        `stroke-width="${fmt(w)}" stroke-opacity="0.45"/>`,
    );
  }

  plot.axes.forEach((axis, i) => {
    const x = axisX(i) - AXIS_WIDTH / 2;
    parts.push(`<g class="axis" data-axis="${axis.attr}">`);
    for (const block of axis.blocks) {
      const top = toScreenY(block.y1);
      const blockH = Math.max((block.y1 - block.y0) * plotH, 0);
      const color =
        block.dominant_class !== null
          ? (palette.get(block.dominant_class) ?? NON_DOMINANT_GREY)
          : NON_DOMINANT_GREY;
      const domH = blockH * block.purity;
      const pure = block.purity >= pureThreshold && block.frequency > 0;
      const selected = selectionFor(opts.selections, axis.attr, block.values);
      parts.push(
        `<g class="block" data-attr="${axis.attr}" ` +
          `data-values="${block.values.join(",")}">`,
      );
      parts.push(`<title>${esc(blockTitle(axis.attr, block))}</title>`);
      parts.push(
        `<rect x="${fmt(x)}" y="${fmt(top)}" width="${AXIS_WIDTH}" ` +
          `height="${fmt(domH)}" fill="${color}" stroke="#333333" stroke-width="0.4"/>`,
      );
      if (blockH - domH > 1e-9) {
        parts.push(
          `<rect x="${fmt(x)}" y="${fmt(top + domH)}" width="${AXIS_WIDTH}" ` +
            `height="${fmt(blockH - domH)}" fill="${NON_DOMINANT_GREY}" ` +
            `stroke="#333333" stroke-width="0.4"/>`,
        );
      }
      if (pure) {
        parts.push(
          `<rect class="pure-frame" x="${fmt(x)}" y="${fmt(top)}" ` +
            `width="${AXIS_WIDTH}" height="${fmt(blockH)}" fill="none" ` +
            `stroke="${PURE_FRAME}" stroke-width="2"/>`,
        );
      }
      if (selected) {
        parts.push(
          `<rect class="selection" x="${fmt(x - 3)}" y="${fmt(top - 3)}" ` +
            `width="${AXIS_WIDTH + 6}" height="${fmt(blockH + 6)}" fill="none" ` +
            `stroke="#111111" stroke-width="1.5" stroke-dasharray="4 3"/>`,
        );
        parts.push(
          `<text class="selection-tag" x="${fmt(x + AXIS_WIDTH + 6)}" ` +
            `y="${fmt(top + 10)}" font-size="10">${selected.membership}</text>`,
        );
      }
      parts.push("</g>");
    }
    const label = `X${axis.attr}${axis.flipped ? " (flipped)" : ""}`;
    parts.push(
      `<text class="axis-label" x="${fmt(axisX(i))}" y="${fmt(height - 10)}" ` +
        `font-size="12" text-anchor="middle">${esc(label)}</text>`,
    );
    parts.push("</g>");
  });

  parts.push("</svg>");
  return parts.join("\n");
}
