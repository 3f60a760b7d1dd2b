/** Canvas scatterplot: data in black, current selection in red, the
 * background-model sample in gray with one displacement line per row tying
 * each data point to its sampled twin, plus 95% ellipses for the selection
 * (solid blue) and its background counterpart (dashed blue). */

import type { EllipsePair, ViewPayload } from "./api";
import {
  dataBounds,
  ellipsePath,
  makeScale,
  subsampleIndices,
  type Scale,
} from "./geometry";

export const COLORS = {
  data: "#1a1a1a",
  selected: "#d62728",
  background: "#a0a0a0",
  displacement: "rgba(160,160,160,0.45)",
  ellipse: "#1f77b4",
  banner: "#8a5a00",
};

export const DISPLACEMENT_CAP = 2000;

/** The slice of CanvasRenderingContext2D the renderer needs; tests pass a
 * recording stub. */
export interface Canvas2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  setLineDash(segments: number[]): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string;
  fillStyle: string;
  lineWidth: number;
  font: string;
}

export interface RenderOptions {
  width: number;
  height: number;
  selection: Set<string>;
  overlays: { background: boolean; displacement: boolean; ellipses: boolean };
  ellipses?: EllipsePair | null;
  stale?: boolean;
  displacementCap?: number;
}

export interface RenderStats {
  dataPoints: number;
  selectedPoints: number;
  backgroundPoints: number;
  displacementLines: number;
  ellipsesDrawn: number;
  staleBanner: boolean;
}

function dot(ctx: Canvas2D, x: number, y: number, r: number, color: string): void {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.fill();
}

function strokePath(ctx: Canvas2D, pts: { x: number; y: number }[], scale: Scale): void {
  ctx.beginPath();
  pts.forEach((p, i) => {
    const px = scale.sx(p.x);
    const py = scale.sy(p.y);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
}

export function viewScale(view: ViewPayload, width: number, height: number): Scale {
  const coords = view.points.flatMap((p) => [
    { x: p.data_x, y: p.data_y },
    { x: p.bg_x, y: p.bg_y },
  ]);
  return makeScale(dataBounds(coords), width, height);
}

export function renderScatter(
  ctx: Canvas2D,
  view: ViewPayload,
  opts: RenderOptions,
): RenderStats {
  const { width, height } = opts;
  const cap = opts.displacementCap ?? DISPLACEMENT_CAP;
  const scale = viewScale(view, width, height);
  const stats: RenderStats = {
    dataPoints: 0,
    selectedPoints: 0,
    backgroundPoints: 0,
    displacementLines: 0,
    ellipsesDrawn: 0,
    staleBanner: false,
  };

  ctx.clearRect(0, 0, width, height);
  ctx.setLineDash([]);

  if (opts.overlays.displacement && opts.overlays.background) {
    ctx.strokeStyle = COLORS.displacement;
    ctx.lineWidth = 1;
    for (const idx of subsampleIndices(view.points.length, cap)) {
      const p = view.points[idx]!;
      ctx.beginPath();
      ctx.moveTo(scale.sx(p.data_x), scale.sy(p.data_y));
      ctx.lineTo(scale.sx(p.bg_x), scale.sy(p.bg_y));
      ctx.stroke();
      stats.displacementLines++;
    }
  }

  if (opts.overlays.background) {
    ctx.strokeStyle = COLORS.background;
    ctx.lineWidth = 1;
    for (const p of view.points) {
      ctx.beginPath();
      ctx.arc(scale.sx(p.bg_x), scale.sy(p.bg_y), 2.2, 0, 2 * Math.PI);
      ctx.stroke();
      stats.backgroundPoints++;
    }
  }

  for (const p of view.points) {
    if (opts.selection.has(p.row_id)) continue;
    dot(ctx, scale.sx(p.data_x), scale.sy(p.data_y), 2.4, COLORS.data);
    stats.dataPoints++;
  }
  for (const p of view.points) {
    if (!opts.selection.has(p.row_id)) continue;
    dot(ctx, scale.sx(p.data_x), scale.sy(p.data_y), 3.0, COLORS.selected);
    stats.selectedPoints++;
  }

  // ellipses only make sense for a nonempty selection
  if (opts.overlays.ellipses && opts.ellipses && opts.selection.size > 0) {
    ctx.strokeStyle = COLORS.ellipse;
    ctx.lineWidth = 1.5;
    ctx.setLineDash([]);
    strokePath(ctx, ellipsePath(opts.ellipses.selection), scale);
    stats.ellipsesDrawn++;
    ctx.setLineDash([6, 4]);
    strokePath(ctx, ellipsePath(opts.ellipses.background), scale);
    stats.ellipsesDrawn++;
    ctx.setLineDash([]);
  }

  if (opts.stale) {
    ctx.fillStyle = COLORS.banner;
    ctx.font = "13px sans-serif";
    ctx.fillRect(0, 0, width, 24);
    ctx.fillStyle = "#ffffff";
    ctx.fillText("view is stale: update the background and recompute", 8, 16);
    stats.staleBanner = true;
  }
  return stats;
}
