/** Selection hit-testing and screen-space helpers for the scatterplot. */

export interface Pt {
  x: number;
  y: number;
}

export interface Rect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface PlacedPoint extends Pt {
  row_id: string;
}

export function normalizeRect(r: Rect): Rect {
  return {
    x0: Math.min(r.x0, r.x1),
    y0: Math.min(r.y0, r.y1),
    x1: Math.max(r.x0, r.x1),
    y1: Math.max(r.y0, r.y1),
  };
}

export function pointsInRect(points: PlacedPoint[], rect: Rect): string[] {
  const r = normalizeRect(rect);
  return points
    .filter((p) => p.x >= r.x0 && p.x <= r.x1 && p.y >= r.y0 && p.y <= r.y1)
    .map((p) => p.row_id);
}

/** Ray-casting point-in-polygon; the polygon is the lasso path. */
export function pointInPolygon(p: Pt, polygon: Pt[]): boolean {
  let inside = false;
  for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
    const a = polygon[i]!;
    const b = polygon[j]!;
    const crosses = a.y > p.y !== b.y > p.y;
    if (crosses && p.x < ((b.x - a.x) * (p.y - a.y)) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

export function pointsInPolygon(points: PlacedPoint[], polygon: Pt[]): string[] {
  if (polygon.length < 3) return [];
  return points.filter((p) => pointInPolygon(p, polygon)).map((p) => p.row_id);
}

/** Deterministic uniform subsample of 0..n-1, at most cap indices. */
export function subsampleIndices(n: number, cap: number): number[] {
  if (cap <= 0) return [];
  if (n <= cap) return Array.from({ length: n }, (_, i) => i);
  const out: number[] = [];
  const stride = n / cap;
  for (let k = 0; k < cap; k++) out.push(Math.floor(k * stride));
  return out;
}

export interface Bounds {
  minX: number;
  maxX: number;
  minY: number;
  maxY: number;
}

export function dataBounds(points: Pt[], padFraction = 0.06): Bounds {
  let minX = Infinity,
    maxX = -Infinity,
    minY = Infinity,
    maxY = -Infinity;
  for (const p of points) {
    minX = Math.min(minX, p.x);
    maxX = Math.max(maxX, p.x);
    minY = Math.min(minY, p.y);
    maxY = Math.max(maxY, p.y);
  }
  if (!isFinite(minX)) return { minX: -1, maxX: 1, minY: -1, maxY: 1 };
  const padX = (maxX - minX || 1) * padFraction;
  const padY = (maxY - minY || 1) * padFraction;
  return { minX: minX - padX, maxX: maxX + padX, minY: minY - padY, maxY: maxY + padY };
}

export interface Scale {
  sx: (v: number) => number;
  sy: (v: number) => number;
  invertX: (px: number) => number;
  invertY: (px: number) => number;
}

/** Map data coordinates to pixels; y flips so "up" means larger values. */
export function makeScale(bounds: Bounds, width: number, height: number): Scale {
  const spanX = bounds.maxX - bounds.minX || 1;
  const spanY = bounds.maxY - bounds.minY || 1;
  return {
    sx: (v) => ((v - bounds.minX) / spanX) * width,
    sy: (v) => height - ((v - bounds.minY) / spanY) * height,
    invertX: (px) => bounds.minX + (px / width) * spanX,
    invertY: (px) => bounds.minY + ((height - px) / height) * spanY,
  };
}

export interface EllipseLike {
  center: [number, number];
  axis_lengths: [number, number];
  angle: number;
}

/** Polyline tracing an ellipse in data coordinates. */
export function ellipsePath(e: EllipseLike, segments = 64): Pt[] {
  const [cx, cy] = e.center;
  const [a, b] = e.axis_lengths;
  const cos = Math.cos(e.angle);
  const sin = Math.sin(e.angle);
  const out: Pt[] = [];
  for (let i = 0; i <= segments; i++) {
    const t = (2 * Math.PI * i) / segments;
    const ex = a * Math.cos(t);
    const ey = b * Math.sin(t);
    out.push({ x: cx + ex * cos - ey * sin, y: cy + ex * sin + ey * cos });
  }
  return out;
}
