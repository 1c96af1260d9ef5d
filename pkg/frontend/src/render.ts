/**
 * SVG rendering of a complex: translucent dim-2 triangles underneath edges,
 * node discs on top (radius ∝ √size, hue by magnification level).
 *
 * Output is deterministic — fixed element order, fixed attribute order,
 * coordinates rounded to two decimals — so renders can be snapshot-compared.
 */

import type { Point } from "./layout.js";
import type { ViewModel } from "./model.js";

export const SVG_NS = "http://www.w3.org/2000/svg";
const MAX_RADIUS = 16;
const EMPTY_HINT = "nothing to show yet — create a session to render its complex";

export interface RenderOptions {
  /** Keys (see simplexKey) of simplices to paint as violations. */
  violations?: ReadonlySet<string>;
  /** Node ids that changed in the last mutation; they get the pulse class. */
  changed?: ReadonlySet<number>;
}

/** Canonical key for a simplex: sorted ids joined with commas. */
export function simplexKey(ids: readonly number[]): string {
  return [...ids].sort((a, b) => a - b).join(",");
}

/** Fill color for a magnification level; distinct hues per level. */
export function levelColor(level: number): string {
  const hue = (210 + 55 * level) % 360;
  return `hsl(${hue}, 70%, 55%)`;
}

function fmt(x: number): string {
  return x.toFixed(2);
}

function classList(base: string, flags: Array<[string, boolean]>): string {
  const parts = [base];
  for (const [name, on] of flags) if (on) parts.push(name);
  return parts.join(" ");
}

/** Replace the SVG's content with a drawing of the model. */
export function renderComplex(
  svg: SVGSVGElement,
  model: ViewModel,
  positions: ReadonlyMap<number, Point>,
  options: RenderOptions = {},
): void {
  const doc = svg.ownerDocument;
  while (svg.firstChild) svg.removeChild(svg.firstChild);
  const violations = options.violations ?? new Set<string>();
  const changed = options.changed ?? new Set<number>();

  if (model.nodes.length === 0) {
    const hint = doc.createElementNS(SVG_NS, "text");
    hint.setAttribute("class", "hint");
    hint.setAttribute("x", "50%");
    hint.setAttribute("y", "50%");
    hint.setAttribute("text-anchor", "middle");
    hint.textContent = EMPTY_HINT;
    svg.appendChild(hint);
    return;
  }

  for (const tri of model.triangles) {
    const pts = tri.map((id) => positions.get(id));
    if (pts.some((p) => p === undefined)) continue;
    const poly = doc.createElementNS(SVG_NS, "polygon");
    poly.setAttribute(
      "class",
      classList("triangle", [["violation", violations.has(simplexKey(tri))]]),
    );
    poly.setAttribute("points", pts.map((p) => `${fmt(p!.x)},${fmt(p!.y)}`).join(" "));
    poly.setAttribute("data-simplex", simplexKey(tri));
    svg.appendChild(poly);
  }

  for (const [u, v] of model.edges) {
    const a = positions.get(u);
    const b = positions.get(v);
    if (!a || !b) continue;
    const line = doc.createElementNS(SVG_NS, "line");
    line.setAttribute(
      "class",
      classList("edge", [["violation", violations.has(simplexKey([u, v]))]]),
    );
    line.setAttribute("x1", fmt(a.x));
    line.setAttribute("y1", fmt(a.y));
    line.setAttribute("x2", fmt(b.x));
    line.setAttribute("y2", fmt(b.y));
    line.setAttribute("data-simplex", simplexKey([u, v]));
    svg.appendChild(line);
  }

  const maxSize = Math.max(...model.nodes.map((n) => n.size));
  const unit = MAX_RADIUS / Math.sqrt(Math.max(maxSize, 1));
  for (const node of model.nodes) {
    const p = positions.get(node.id);
    if (!p) continue;
    const circle = doc.createElementNS(SVG_NS, "circle");
    circle.setAttribute(
      "class",
      classList("node", [
        ["selected", node.selected],
        ["pulse", changed.has(node.id)],
        ["violation", violations.has(simplexKey([node.id]))],
      ]),
    );
    circle.setAttribute("cx", fmt(p.x));
    circle.setAttribute("cy", fmt(p.y));
    circle.setAttribute("r", fmt(unit * Math.sqrt(node.size)));
    circle.setAttribute("fill", levelColor(node.level));
    circle.setAttribute("data-node-id", String(node.id));
    circle.setAttribute("data-region", String(node.region));
    svg.appendChild(circle);
  }
}
