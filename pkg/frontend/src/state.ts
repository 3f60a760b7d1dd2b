/** Client-side view state: the current projection payload, the selection,
 * and pure display toggles. Overlay toggles never trigger network traffic;
 * everything analytical round-trips through the API client. */

import type { FitState, ViewPayload } from "./api";

export type SelectionMode = "replace" | "additive";

export interface Overlays {
  background: boolean;
  displacement: boolean;
  ellipses: boolean;
}

export class ExplorerState {
  view: ViewPayload | null = null;
  method: "pca" | "ica" = "pca";
  selection = new Set<string>();
  selectionMode: SelectionMode = "replace";
  overlays: Overlays = { background: true, displacement: true, ellipses: true };
  fit: FitState | null = null;
  private knownIds = new Set<string>();

  setView(view: ViewPayload): void {
    this.view = view;
    this.method = view.method;
    this.knownIds = new Set(view.points.map((p) => p.row_id));
    // invariant: the selection only ever refers to displayed rows
    for (const id of [...this.selection]) {
      if (!this.knownIds.has(id)) this.selection.delete(id);
    }
  }

  /** Apply a selection gesture; returns the resulting sorted id list. */
  select(ids: Iterable<string>, mode?: SelectionMode): string[] {
    const effective = mode ?? this.selectionMode;
    const incoming = [...ids].filter((id) => this.knownIds.size === 0 || this.knownIds.has(id));
    if (effective === "replace") this.selection = new Set(incoming);
    else for (const id of incoming) this.selection.add(id);
    return this.selectionList();
  }

  clearSelection(): void {
    this.selection.clear();
  }

  selectionList(): string[] {
    return [...this.selection].sort();
  }

  toggleOverlay(name: keyof Overlays): boolean {
    this.overlays[name] = !this.overlays[name];
    return this.overlays[name];
  }

  /** The view no longer matches the server model (constraints changed or a
   * fit finished); rendering should show the recompute banner. */
  isStale(): boolean {
    if (this.view === null) return true;
    if (this.view.stale) return true;
    if (this.fit !== null && this.fit.model_version > this.view.model_version) return true;
    return false;
  }

  fitRunning(): boolean {
    return this.fit?.state === "running";
  }
}
