import { describe, expect, it } from "vitest";

import type { EllipsePair, SelectionStatsPayload, ViewPayload } from "../src/api";
import { renderPairplot } from "../src/pairplot";
import { COLORS, renderScatter } from "../src/scatter";
import { StubCanvas } from "./stub_canvas";

function makeView(n: number): ViewPayload {
  return {
    method: "ica",
    model_version: 1,
    stale: false,
    scores: [0.03, -0.01],
    directions: [
      [1, 0],
      [0, 1],
    ],
    warning_flags: [],
    points: Array.from({ length: n }, (_, i) => ({
      row_id: `r${i}`,
      data_x: Math.cos(i),
      data_y: Math.sin(i),
      bg_x: Math.cos(i) + 0.3,
      bg_y: Math.sin(i) - 0.3,
      selected: false,
    })),
  };
}

const ellipses: EllipsePair = {
  selection: { center: [0, 0], axis_lengths: [1, 0.5], angle: 0.3 },
  background: { center: [0.2, -0.2], axis_lengths: [1.2, 0.6], angle: 0.3 },
};

const baseOpts = {
  width: 400,
  height: 300,
  overlays: { background: true, displacement: true, ellipses: true },
};

describe("renderScatter", () => {
  it("draws black data, gray sample and one line per row", () => {
    const ctx = new StubCanvas();
    const stats = renderScatter(ctx, makeView(25), {
      ...baseOpts,
      selection: new Set(),
    });
    expect(stats.dataPoints).toBe(25);
    expect(stats.backgroundPoints).toBe(25);
    expect(stats.displacementLines).toBe(25);
    expect(stats.ellipsesDrawn).toBe(0); // empty selection: no ellipses
    expect(ctx.count("fill", (o) => o.fillStyle === COLORS.data)).toBe(25);
  });

  it("paints selected rows red on top", () => {
    const ctx = new StubCanvas();
    const stats = renderScatter(ctx, makeView(10), {
      ...baseOpts,
      selection: new Set(["r1", "r2", "r3"]),
    });
    expect(stats.selectedPoints).toBe(3);
    expect(stats.dataPoints).toBe(7);
    expect(ctx.count("fill", (o) => o.fillStyle === COLORS.selected)).toBe(3);
  });

  it("draws a solid and a dashed ellipse for a nonempty selection", () => {
    const ctx = new StubCanvas();
    const stats = renderScatter(ctx, makeView(10), {
      ...baseOpts,
      selection: new Set(["r1", "r2", "r3"]),
      ellipses,
    });
    expect(stats.ellipsesDrawn).toBe(2);
    const ellipseStrokes = ctx.ops.filter(
      (o) => o.op === "stroke" && o.strokeStyle === COLORS.ellipse,
    );
    expect(ellipseStrokes).toHaveLength(2);
    expect(ellipseStrokes[0]!.lineDash).toEqual([]);
    expect(ellipseStrokes[1]!.lineDash).toEqual([6, 4]);
  });

  it("skips ellipses when the selection is empty even if provided", () => {
    const ctx = new StubCanvas();
    const stats = renderScatter(ctx, makeView(10), {
      ...baseOpts,
      selection: new Set(),
      ellipses,
    });
    expect(stats.ellipsesDrawn).toBe(0);
  });

  it("overlay toggles suppress sample and lines without refetching", () => {
    const ctx = new StubCanvas();
    const stats = renderScatter(ctx, makeView(10), {
      width: 400,
      height: 300,
      overlays: { background: false, displacement: true, ellipses: true },
      selection: new Set(),
    });
    expect(stats.backgroundPoints).toBe(0);
    expect(stats.displacementLines).toBe(0); // lines need the sample visible
  });

  it("caps displacement lines with uniform subsampling", () => {
    const ctx = new StubCanvas();
    const stats = renderScatter(ctx, makeView(5000), {
      ...baseOpts,
      selection: new Set(),
    });
    expect(stats.displacementLines).toBe(2000);
    expect(stats.dataPoints).toBe(5000); // data itself is never subsampled
  });

  it("shows the stale banner when asked", () => {
    const ctx = new StubCanvas();
    const stats = renderScatter(ctx, makeView(5), {
      ...baseOpts,
      selection: new Set(),
      stale: true,
    });
    expect(stats.staleBanner).toBe(true);
    expect(ctx.count("fillText")).toBe(1);
  });
});

describe("renderPairplot", () => {
  it("draws at most four attribute panels ranked by score", () => {
    const stats: SelectionStatsPayload = {
      count: 12,
      rest_empty: false,
      jaccard: {},
      attributes: Array.from({ length: 6 }, (_, i) => ({
        name: `col${i}`,
        mean_selected: i,
        std_selected: 1,
        mean_rest: 0,
        std_rest: 1,
        score: 6 - i,
      })),
    };
    const ctx = new StubCanvas();
    const out = renderPairplot(ctx, stats, 400, 200);
    expect(out.panels).toBe(4);
    const labels = ctx.ops.filter((o) => o.op === "fillText").map((o) => String(o.args[0]));
    expect(labels.some((t) => t.startsWith("col0"))).toBe(true);
    expect(labels.some((t) => t.startsWith("col4"))).toBe(false);
  });
});
