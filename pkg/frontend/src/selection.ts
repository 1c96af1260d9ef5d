/**
 * Client-local node selection: rectangle sweeps plus per-node toggles.
 *
 * The selection is a plain set of node ids; converting it to a request is
 * lossless — exactly the selected ids, in ascending order.
 */

import type { Point } from "./layout.js";

export interface Rect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

/** Ids whose positions fall inside the (unordered-corner) rectangle. */
export function rectSelect(positions: ReadonlyMap<number, Point>, rect: Rect): number[] {
  const loX = Math.min(rect.x0, rect.x1);
  const hiX = Math.max(rect.x0, rect.x1);
  const loY = Math.min(rect.y0, rect.y1);
  const hiY = Math.max(rect.y0, rect.y1);
  const hit: number[] = [];
  for (const [id, p] of positions) {
    if (p.x >= loX && p.x <= hiX && p.y >= loY && p.y <= hiY) hit.push(id);
  }
  return hit.sort((a, b) => a - b);
}

/** Flip one node's membership in the selection. */
export function toggle(selected: Set<number>, id: number): void {
  if (selected.has(id)) selected.delete(id);
  else selected.add(id);
}

/** The ids a request will carry: the selection verbatim, ascending. */
export function selectionToNodeIds(selected: ReadonlySet<number>): number[] {
  return [...selected].sort((a, b) => a - b);
}
