/**
 * Deterministic, purely cosmetic node placement.
 *
 * Positions are seeded from lens centroids so that layouts stay comparable
 * before and after a rescale, then relaxed with a fixed-iteration force pass
 * (edge springs, pair repulsion, a pull back toward the seed).  No randomness:
 * the only tie-breaker for coincident seeds is a hash of the node id.
 */

import type { ViewModel } from "./model.js";

export interface Point {
  x: number;
  y: number;
}

export const VIEW_WIDTH = 800;
export const VIEW_HEIGHT = 600;
const PADDING = 40;
const ITERATIONS = 60;
const SPRING = 0.02;
const REPULSION = 400;
const SEED_PULL = 0.08;

/** Deterministic angle in [0, 2π) derived from a node id. */
function idAngle(id: number): number {
  let h = id >>> 0;
  h = (h ^ (h >>> 16)) * 0x45d9f3b;
  h = (h ^ (h >>> 16)) * 0x45d9f3b;
  h = h ^ (h >>> 16);
  return ((h >>> 0) / 0x100000000) * 2 * Math.PI;
}

function seedPositions(model: ViewModel): Map<number, Point> {
  const seeds = new Map<number, Point>();
  if (model.nodes.length === 0) return seeds;

  const xs = model.nodes.map((n) => n.lensCentroid[0] ?? 0);
  const ys = model.nodes.map((n) => n.lensCentroid[1] ?? 0);
  const lo = [Math.min(...xs), Math.min(...ys)];
  const hi = [Math.max(...xs), Math.max(...ys)];
  const spanX = hi[0]! - lo[0]! || 1;
  const spanY = hi[1]! - lo[1]! || 1;
  const boxW = VIEW_WIDTH - 2 * PADDING;
  const boxH = VIEW_HEIGHT - 2 * PADDING;

  model.nodes.forEach((node, i) => {
    const fx = ((xs[i]! - lo[0]!) / spanX) * boxW + PADDING;
    // SVG y grows downward; flip so larger lens values sit higher.
    const fy = ((hi[1]! - ys[i]!) / spanY) * boxH + PADDING;
    // Nudge coincident seeds apart deterministically.
    const angle = idAngle(node.id);
    seeds.set(node.id, {
      x: fx + 2 * Math.cos(angle),
      y: fy + 2 * Math.sin(angle),
    });
  });
  return seeds;
}

/** Compute positions for every node id in the model. */
export function layoutComplex(model: ViewModel): Map<number, Point> {
  const seeds = seedPositions(model);
  const pos = new Map<number, Point>();
  for (const [id, p] of seeds) pos.set(id, { x: p.x, y: p.y });
  const ids = model.nodes.map((n) => n.id);

  for (let iter = 0; iter < ITERATIONS; iter++) {
    const force = new Map<number, Point>();
    for (const id of ids) force.set(id, { x: 0, y: 0 });

    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const a = pos.get(ids[i]!)!;
        const b = pos.get(ids[j]!)!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let d2 = dx * dx + dy * dy;
        if (d2 < 1e-6) {
          // Coincident points: push along the id-derived direction.
          const angle = idAngle(ids[i]! * 31 + ids[j]!);
          dx = Math.cos(angle);
          dy = Math.sin(angle);
          d2 = 1;
        }
        const f = REPULSION / d2;
        const fa = force.get(ids[i]!)!;
        const fb = force.get(ids[j]!)!;
        fa.x += dx * f;
        fa.y += dy * f;
        fb.x -= dx * f;
        fb.y -= dy * f;
      }
    }

    for (const [u, v] of model.edges) {
      const a = pos.get(u);
      const b = pos.get(v);
      if (!a || !b) continue;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const fu = force.get(u)!;
      const fv = force.get(v)!;
      fu.x += dx * SPRING;
      fu.y += dy * SPRING;
      fv.x -= dx * SPRING;
      fv.y -= dy * SPRING;
    }

    for (const id of ids) {
      const p = pos.get(id)!;
      const seed = seeds.get(id)!;
      const f = force.get(id)!;
      f.x += (seed.x - p.x) * SEED_PULL;
      f.y += (seed.y - p.y) * SEED_PULL;
      p.x += Math.max(-12, Math.min(12, f.x));
      p.y += Math.max(-12, Math.min(12, f.y));
      p.x = Math.max(PADDING / 2, Math.min(VIEW_WIDTH - PADDING / 2, p.x));
      p.y = Math.max(PADDING / 2, Math.min(VIEW_HEIGHT - PADDING / 2, p.y));
    }
  }
  return pos;
}
