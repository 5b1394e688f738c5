import { describe, expect, it } from "vitest";

import {
  DEFAULT_PALETTE,
  NON_DOMINANT_GREY,
  PURE_FRAME,
  classPalette,
  renderPlot,
  validatePlot,
} from "../src/render.js";
import type { BlockInfo, PlotJson } from "../src/types.js";
import { fixture } from "./helpers.js";

const plot = fixture<PlotJson>("layout_small.json");

function odorOnly(): PlotJson {
  const axis = plot.axes.find((a) => a.attr === 5);
  if (!axis) throw new Error("fixture lost its odor axis");
  return { axes: [axis], lines: [] };
}

/** Split the SVG into one chunk per block group for substring checks. */
function blockChunks(svg: string): string[] {
  return svg.split('<g class="block"').slice(1);
}

describe("validatePlot", () => {
  it("accepts a captured layout document", () => {
    expect(validatePlot(plot)).toBe(plot);
  });

  it.each([
    [null, /expected an object/],
    [[1, 2], /expected an object/],
    [{ lines: [] }, /axes must be an array/],
    [{ axes: [], lines: {} }, /lines must be an array/],
    [{ axes: [{ attr: 1, flipped: false }], lines: [] }, /blocks must be an array/],
    [{ axes: [{ attr: "x", flipped: false, blocks: [] }], lines: [] }, /numeric attr/],
  ] as Array<[unknown, RegExp]>)("rejects %j", (doc, message) => {
    expect(() => validatePlot(doc)).toThrow(message);
  });

  it("rejects block bounds outside the unit interval", () => {
    const bad = JSON.parse(JSON.stringify(plot)) as PlotJson;
    bad.axes[0]!.blocks[0]!.y1 = 1.5;
    expect(() => validatePlot(bad)).toThrow(/outside \[0, 1\]/);
  });

  it("rejects lines whose path length disagrees with the axes", () => {
    const bad = JSON.parse(JSON.stringify(plot)) as PlotJson;
    bad.lines[0]!.path = [0.5];
    expect(() => validatePlot(bad)).toThrow(/path has 1 points for 3 axes/);
  });

  it("rejects non-numeric weights", () => {
    const bad = JSON.parse(JSON.stringify(plot)) as unknown as {
      lines: Array<{ weight: unknown }>;
    };
    bad.lines[0]!.weight = "heavy";
    expect(() => validatePlot(bad)).toThrow(/bad weight/);
  });
});

describe("renderPlot", () => {
  it("renders axes, labels, and one polyline per line", () => {
    const svg = renderPlot(plot);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.match(/<g class="axis"/g)).toHaveLength(3);
    expect(svg.match(/<polyline /g)).toHaveLength(plot.lines.length);
    for (const label of ["X5", "X20", "X21"]) {
      expect(svg).toContain(`>${label}</text>`);
    }
  });

  it("frames every fully pure block in green", () => {
    const svg = renderPlot(odorOnly());
    const pureBlocks = odorOnly().axes[0]!.blocks.filter((b) => b.purity === 1);
    expect(pureBlocks).toHaveLength(8);
    expect(svg.match(/class="pure-frame"/g)).toHaveLength(8);
  });

  it("shows six fully-poisonous framed blocks on the odor axis", () => {
    const svg = renderPlot(odorOnly());
    const poisonColor = DEFAULT_PALETTE[0]!;
    const framedPoisonous = blockChunks(svg).filter(
      (chunk) =>
        chunk.includes(`fill="${poisonColor}"`) && chunk.includes("pure-frame"),
    );
    expect(framedPoisonous).toHaveLength(6);
  });

  it("paints non-dominant mass grey", () => {
    const svg = renderPlot(odorOnly());
    // only the odor=none block is impure on this axis
    expect(svg.match(new RegExp(`fill="${NON_DOMINANT_GREY}"`, "g"))).toHaveLength(1);
    const impureChunk = blockChunks(svg).find((c) => c.includes('data-values="7"'));
    expect(impureChunk).toContain(NON_DOMINANT_GREY);
    expect(impureChunk).not.toContain(PURE_FRAME);
  });

  it("exposes histogram and purity through hover titles", () => {
    const svg = renderPlot(odorOnly());
    expect(svg).toContain(
      "<title>X5 values 5 | 2160 cases | purity 100% | C1:2160 C2:0</title>",
    );
    const impure = blockChunks(svg).find((c) => c.includes('data-values="7"'));
    expect(impure).toMatch(/purity 97% \| C1:120 C2:3408/);
  });

  it("stamps block groups with data attributes for event wiring", () => {
    const svg = renderPlot(plot);
    expect(svg).toContain('data-attr="5" data-values="5"');
    expect(svg).toContain('data-attr="21" data-values="6"');
  });

  it("uses the magenta/blue/yellow palette by default and accepts overrides", () => {
    const base = renderPlot(plot);
    expect(base).toContain(DEFAULT_PALETTE[0]!);
    expect(base).toContain(DEFAULT_PALETTE[1]!);
    const custom = renderPlot(plot, { palette: ["#010101", "#020202"] });
    expect(custom).toContain('fill="#010101"');
    expect(custom).not.toContain(DEFAULT_PALETTE[0]!);
  });

  it("maps lower class ids to earlier palette entries", () => {
    const colors = classPalette(plot);
    expect(colors.get(1)).toBe(DEFAULT_PALETTE[0]);
    expect(colors.get(2)).toBe(DEFAULT_PALETTE[1]);
  });

  it("weights lines by case count unless uniform is requested", () => {
    const widths = (svg: string) =>
      new Set([...svg.matchAll(/stroke-width="([\d.]+)"/g)].map((m) => m[1]));
    const weighted = renderPlot(plot);
    const uniform = renderPlot(plot, { uniformLines: true });
    expect(widths(weighted).size).toBeGreaterThan(2);
    const uniformLineWidths = new Set(
      [...uniform.matchAll(/<polyline [^>]*stroke-width="([\d.]+)"/g)].map(
        (m) => m[1],
      ),
    );
    expect(uniformLineWidths.size).toBe(1);
  });

  it("marks selected blocks with a dashed outline and membership tag", () => {
    const svg = renderPlot(plot, {
      selections: [
        { attr: 5, values: [5], membership: "in" },
        { attr: 20, values: [8], membership: "not-in" },
      ],
    });
    expect(svg.match(/class="selection"/g)).toHaveLength(2);
    expect(svg).toContain("stroke-dasharray");
    expect(svg).toContain(">in</text>");
    expect(svg).toContain(">not-in</text>");
  });

  it("renders an empty dataset as empty axes without crashing", () => {
    const svg = renderPlot({ axes: [], lines: [] });
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).not.toContain("<polyline");
  });
});

describe("captured geometry properties", () => {
  it("mirrors block bounds when an axis is flipped", () => {
    const flipped = fixture<PlotJson>("layout_flipped.json");
    const before = plot.axes.find((a) => a.attr === 5)!;
    const after = flipped.axes.find((a) => a.attr === 5)!;
    expect(after.flipped).toBe(true);
    expect(renderPlot(flipped)).toContain("X5 (flipped)");
    for (const b of after.blocks) {
      const twin = before.blocks.find(
        (o) => o.values.join(",") === b.values.join(","),
      )!;
      expect(b.y0).toBeCloseTo(1 - twin.y1, 9);
      expect(b.y1).toBeCloseTo(1 - twin.y0, 9);
    }
  });

  it("flipping the same axis twice restores the original layout", () => {
    const twice = fixture<PlotJson>("layout_flip_twice.json");
    expect(twice).toEqual(plot);
  });

  it("passes the purity filter through to the server verbatim", () => {
    const pure = fixture<BlockInfo[]>("blocks_odor_pure.json");
    expect(pure.length).toBeGreaterThan(0);
    expect(pure.every((b) => b.purity === 1)).toBe(true);
  });
});
