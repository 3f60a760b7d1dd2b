/** Recording stand-in for the 2D canvas context. */

import type { Canvas2D } from "../src/scatter";

export interface Op {
  op: string;
  args: unknown[];
  strokeStyle: string;
  fillStyle: string;
  lineDash: number[];
}

export class StubCanvas implements Canvas2D {
  ops: Op[] = [];
  strokeStyle = "";
  fillStyle = "";
  lineWidth = 1;
  font = "";
  private dash: number[] = [];

  private record(op: string, ...args: unknown[]): void {
    this.ops.push({
      op,
      args,
      strokeStyle: this.strokeStyle,
      fillStyle: this.fillStyle,
      lineDash: [...this.dash],
    });
  }

  clearRect(...args: unknown[]): void {
    this.record("clearRect", ...args);
  }
  beginPath(): void {
    this.record("beginPath");
  }
  moveTo(...args: unknown[]): void {
    this.record("moveTo", ...args);
  }
  lineTo(...args: unknown[]): void {
    this.record("lineTo", ...args);
  }
  arc(...args: unknown[]): void {
    this.record("arc", ...args);
  }
  stroke(): void {
    this.record("stroke");
  }
  fill(): void {
    this.record("fill");
  }
  setLineDash(segments: number[]): void {
    this.dash = segments;
    this.record("setLineDash", segments);
  }
  fillRect(...args: unknown[]): void {
    this.record("fillRect", ...args);
  }
  fillText(...args: unknown[]): void {
    this.record("fillText", ...args);
  }

  count(op: string, predicate?: (o: Op) => boolean): number {
    return this.ops.filter((o) => o.op === op && (predicate ? predicate(o) : true)).length;
  }
}
