/** Browser entry point: wires the canvas, the selection gestures and the
 * action buttons to the API. Expensive operations (refitting the model,
 * recomputing a projection) fire only on explicit button clicks. */

import { ApiClient, type EllipsePair, type SessionInfo } from "./api";
import { pointsInPolygon, pointsInRect, type PlacedPoint, type Pt } from "./geometry";
import { renderPairplot } from "./pairplot";
import { renderScatter, viewScale, type Canvas2D } from "./scatter";
import { ExplorerState } from "./state";

const api = new ApiClient("");
const state = new ExplorerState();
let session: SessionInfo | null = null;
let ellipses: EllipsePair | null = null;
let pollTimer: number | null = null;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const canvas = $<HTMLCanvasElement>("scatter");
const pairCanvas = $<HTMLCanvasElement>("pairplot");
const statusEl = $<HTMLDivElement>("status");
const statsEl = $<HTMLDivElement>("stats");
const groupingSelect = $<HTMLSelectElement>("groupings");

function log(text: string): void {
  statusEl.textContent = text;
}

function draw(): void {
  if (!state.view) return;
  const ctx = canvas.getContext("2d") as unknown as Canvas2D;
  renderScatter(ctx, state.view, {
    width: canvas.width,
    height: canvas.height,
    selection: state.selection,
    overlays: state.overlays,
    ellipses,
    stale: state.isStale(),
  });
}

async function refreshStatsPanel(): Promise<void> {
  if (!session) return;
  if (state.selection.size === 0) {
    statsEl.textContent = "no selection";
    ellipses = null;
    return;
  }
  const stats = await api.getSelectionStats(session.id);
  const jaccard = Object.entries(stats.jaccard)
    .sort((a, b) => b[1] - a[1])
    .slice(0, 4)
    .map(([k, v]) => `${k}: ${v.toFixed(3)}`)
    .join("  ");
  statsEl.textContent = `${stats.count} selected   jaccard ${jaccard || "n/a"}`;
  const pctx = pairCanvas.getContext("2d") as unknown as Canvas2D;
  renderPairplot(pctx, stats, pairCanvas.width, pairCanvas.height);
  ellipses =
    state.selection.size >= 3 && session ? await api.getSelectionEllipses(session.id) : null;
}

async function pushSelection(): Promise<void> {
  if (!session) return;
  await api.postSelection(session.id, state.selectionList());
  await refreshStatsPanel();
  draw();
}

async function fetchView(method?: "pca" | "ica"): Promise<void> {
  if (!session) return;
  const view = await api.getView(session.id, method);
  state.setView(view);
  ellipses = null;
  const top = view.scores.length ? Math.max(...view.scores.map(Math.abs)) : 0;
  log(`${view.method} view, top |score| ${top.toFixed(4)}` +
      (view.warning_flags.length ? ` (${view.warning_flags.join(", ")})` : ""));
  await refreshStatsPanel();
  draw();
}

function pollFit(): void {
  if (pollTimer !== null) window.clearInterval(pollTimer);
  pollTimer = window.setInterval(() => {
    void (async () => {
      if (!session) return;
      const fit = await api.fitStatus(session.id);
      state.fit = fit;
      if (fit.state === "running") {
        log(`fitting... ${fit.log_tail[fit.log_tail.length - 1] ?? ""}`);
        return;
      }
      if (pollTimer !== null) window.clearInterval(pollTimer);
      pollTimer = null;
      log(`fit ${fit.fit_status} (${fit.sweeps ?? "?"} sweeps); recompute a view`);
      draw();
    })();
  }, 250);
}

async function loadGroupingOptions(): Promise<void> {
  if (!session) return;
  const { names } = await api.listGroupings(session.id);
  groupingSelect.innerHTML = "";
  for (const name of names) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    groupingSelect.appendChild(option);
  }
}

function canvasPoints(): PlacedPoint[] {
  if (!state.view) return [];
  const scale = viewScale(state.view, canvas.width, canvas.height);
  return state.view.points.map((p) => ({
    row_id: p.row_id,
    x: scale.sx(p.data_x),
    y: scale.sy(p.data_y),
  }));
}

function wireSelectionGestures(): void {
  let dragStart: Pt | null = null;
  let lasso: Pt[] = [];
  const lassoMode = $<HTMLInputElement>("lasso-mode");

  canvas.addEventListener("mousedown", (ev) => {
    const rect = canvas.getBoundingClientRect();
    dragStart = { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
    lasso = [dragStart];
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (!dragStart) return;
    const rect = canvas.getBoundingClientRect();
    lasso.push({ x: ev.clientX - rect.left, y: ev.clientY - rect.top });
  });
  canvas.addEventListener("mouseup", (ev) => {
    if (!dragStart) return;
    const rect = canvas.getBoundingClientRect();
    const end = { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
    const mode = $<HTMLInputElement>("additive-mode").checked ? "additive" : "replace";
    const ids = lassoMode.checked
      ? pointsInPolygon(canvasPoints(), lasso)
      : pointsInRect(canvasPoints(), {
          x0: dragStart.x,
          y0: dragStart.y,
          x1: end.x,
          y1: end.y,
        });
    dragStart = null;
    lasso = [];
    state.select(ids, mode);
    void pushSelection();
  });
}

function wireButtons(): void {
  $("btn-upload").addEventListener("click", () => {
    void (async () => {
      const csv = $<HTMLTextAreaElement>("csv-input").value;
      const label = $<HTMLInputElement>("label-column").value.trim() || undefined;
      session = await api.createSession(csv, { labelColumn: label, viewMethod: "pca" });
      log(`session ${session.id}: ${session.n} rows x ${session.d} columns`);
      await loadGroupingOptions();
      await fetchView();
    })();
  });

  $("btn-pca").addEventListener("click", () => void fetchView("pca"));
  $("btn-ica").addEventListener("click", () => void fetchView("ica"));

  $("btn-cluster").addEventListener("click", () => {
    void (async () => {
      if (!session || state.selection.size === 0) return;
      const out = await api.addConstraint(session.id, "cluster");
      log(`cluster constraint added (${out.primitives} primitives); update the background`);
      draw();
    })();
  });
  $("btn-two-d").addEventListener("click", () => {
    void (async () => {
      if (!session || state.selection.size === 0) return;
      const out = await api.addConstraint(session.id, "two_d");
      log(`2-D constraint added (${out.primitives} primitives); update the background`);
      draw();
    })();
  });
  $("btn-fit").addEventListener("click", () => {
    void (async () => {
      if (!session) return;
      state.fit = await api.startFit(session.id);
      pollFit();
    })();
  });
  $("btn-cancel").addEventListener("click", () => {
    void (async () => {
      if (!session) return;
      await api.cancelFit(session.id);
    })();
  });

  $("btn-grouping").addEventListener("click", () => {
    void (async () => {
      if (!session || !groupingSelect.value) return;
      const grouping = await api.loadGrouping(session.id, groupingSelect.value);
      const mode = $<HTMLInputElement>("additive-mode").checked ? "additive" : "replace";
      state.select(grouping.row_ids, mode);
      await pushSelection();
    })();
  });
  $("btn-save-grouping").addEventListener("click", () => {
    void (async () => {
      if (!session || state.selection.size === 0) return;
      const name = window.prompt("grouping name") ?? "";
      if (!name) return;
      await api.saveGrouping(session.id, name, state.selectionList());
      await loadGroupingOptions();
    })();
  });

  for (const overlay of ["background", "displacement", "ellipses"] as const) {
    $<HTMLInputElement>(`overlay-${overlay}`).addEventListener("change", () => {
      state.toggleOverlay(overlay);
      draw(); // display-only: no refetch
    });
  }
}

wireSelectionGestures();
wireButtons();
log("paste CSV and start a session");
