/** 2x2 panel of the four attributes that most separate the selection from
 * the rest, drawn from selection statistics alone: for each attribute, the
 * selection's mean +- std interval in red over the rest's in black. */

import type { SelectionStatsPayload } from "./api";
import type { Canvas2D } from "./scatter";

export const PAIRPLOT_TOP_K = 4;

export interface PairplotStats {
  panels: number;
}

export function renderPairplot(
  ctx: Canvas2D,
  stats: SelectionStatsPayload,
  width: number,
  height: number,
): PairplotStats {
  ctx.clearRect(0, 0, width, height);
  const top = stats.attributes.slice(0, PAIRPLOT_TOP_K);
  const cols = 2;
  const rows = Math.ceil(PAIRPLOT_TOP_K / cols);
  const cellW = width / cols;
  const cellH = height / rows;
  ctx.font = "11px sans-serif";

  top.forEach((attr, i) => {
    const x0 = (i % cols) * cellW;
    const y0 = Math.floor(i / cols) * cellH;
    const lo = Math.min(attr.mean_selected - attr.std_selected, attr.mean_rest - attr.std_rest);
    const hi = Math.max(attr.mean_selected + attr.std_selected, attr.mean_rest + attr.std_rest);
    const span = hi - lo || 1;
    const toX = (v: number) => x0 + 8 + ((v - lo) / span) * (cellW - 16);

    const bar = (mean: number, std: number, y: number, color: string) => {
      ctx.strokeStyle = color;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(toX(mean - std), y);
      ctx.lineTo(toX(mean + std), y);
      ctx.stroke();
      ctx.fillStyle = color;
      ctx.beginPath();
      ctx.arc(toX(mean), y, 3, 0, 2 * Math.PI);
      ctx.fill();
    };

    ctx.fillStyle = "#333333";
    ctx.fillText(`${attr.name}  (score ${attr.score.toFixed(2)})`, x0 + 8, y0 + 14);
    bar(attr.mean_rest, attr.std_rest, y0 + cellH * 0.45, "#1a1a1a");
    bar(attr.mean_selected, attr.std_selected, y0 + cellH * 0.7, "#d62728");
  });
  return { panels: top.length };
}
