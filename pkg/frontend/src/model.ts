/**
 * View model of a committed complex snapshot.
 *
 * Built from a server response and never edited in place: topology shown on
 * screen is always re-derived from the last committed server payload.  Only
 * the selection flags are client-local state.
 */

export interface ComplexJson {
  nodes: NodeJson[];
  simplices: number[][];
  dim_cap: number;
  truncated: boolean;
}

export interface NodeJson {
  id: number;
  size: number;
  level: number;
  lens_centroid: number[];
}

export interface ViewNode {
  id: number;
  size: number;
  level: number;
  /** Rescale-region namespace the node id lives in (0 = base complex). */
  region: number;
  lensCentroid: number[];
  selected: boolean;
}

export interface ViewModel {
  nodes: ViewNode[];
  edges: Array<[number, number]>;
  triangles: Array<[number, number, number]>;
  /** Simplices above dimension 2, reported as a badge instead of drawn. */
  higherDimCount: number;
  dimCap: number;
  truncated: boolean;
}

/** Raised when a payload does not have the complex shape the UI expects. */
export class SchemaError extends Error {}

const REGION_STRIDE = 1_000_000;

function fail(path: string, want: string): never {
  throw new SchemaError(`${path}: expected ${want}`);
}

function asRecord(value: unknown, path: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    fail(path, "an object");
  }
  return value as Record<string, unknown>;
}

function asNumber(value: unknown, path: string): number {
  if (typeof value !== "number" || !Number.isFinite(value)) {
    fail(path, "a finite number");
  }
  return value;
}

function asNumberArray(value: unknown, path: string): number[] {
  if (!Array.isArray(value) || value.length === 0) {
    fail(path, "a non-empty array of numbers");
  }
  return value.map((x, i) => asNumber(x, `${path}[${i}]`));
}

/**
 * Validate a server complex payload and build the render model.
 *
 * Throws SchemaError (caught by the shell, shown as a banner) on any shape
 * mismatch, including simplices that reference unknown node ids.
 */
export function buildViewModel(payload: unknown): ViewModel {
  const cx = asRecord(payload, "complex");
  if (!Array.isArray(cx.nodes)) fail("complex.nodes", "an array");
  if (!Array.isArray(cx.simplices)) fail("complex.simplices", "an array");
  if (typeof cx.truncated !== "boolean") fail("complex.truncated", "a boolean");
  const dimCap = asNumber(cx.dim_cap, "complex.dim_cap");

  const nodes: ViewNode[] = [];
  const known = new Set<number>();
  cx.nodes.forEach((raw, i) => {
    const rec = asRecord(raw, `complex.nodes[${i}]`);
    const id = asNumber(rec.id, `complex.nodes[${i}].id`);
    if (known.has(id)) fail(`complex.nodes[${i}].id`, "a unique node id");
    known.add(id);
    nodes.push({
      id,
      size: asNumber(rec.size, `complex.nodes[${i}].size`),
      level: asNumber(rec.level, `complex.nodes[${i}].level`),
      region: Math.floor(id / REGION_STRIDE),
      lensCentroid: asNumberArray(rec.lens_centroid, `complex.nodes[${i}].lens_centroid`),
      selected: false,
    });
  });

  const edges: Array<[number, number]> = [];
  const triangles: Array<[number, number, number]> = [];
  let higherDimCount = 0;
  cx.simplices.forEach((raw, i) => {
    const ids = asNumberArray(raw, `complex.simplices[${i}]`);
    for (const id of ids) {
      if (!known.has(id)) {
        fail(`complex.simplices[${i}]`, `node ids from the complex (got ${id})`);
      }
    }
    if (ids.length === 2) edges.push([ids[0]!, ids[1]!]);
    else if (ids.length === 3) triangles.push([ids[0]!, ids[1]!, ids[2]!]);
    else if (ids.length > 3) higherDimCount += 1;
  });

  nodes.sort((a, b) => a.id - b.id);
  return { nodes, edges, triangles, higherDimCount, dimCap, truncated: cx.truncated };
}

/** Project the client-local selection set onto the model's flags. */
export function applySelection(model: ViewModel, selected: ReadonlySet<number>): void {
  for (const node of model.nodes) node.selected = selected.has(node.id);
}
