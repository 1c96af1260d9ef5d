/**
 * Build the JSON bodies the service consumes from UI control state.
 *
 * The scale control works on the client-side cover settings (the session
 * snapshot stores bin geometry, not a bins-per-axis count): "finer" doubles
 * the bin count, "coarser" halves it (floored, never below 1).
 */

import { selectionToNodeIds } from "./selection.js";

export type Scale = "finer" | "same" | "coarser";
export type Scheme = "cuboidal" | "brick";

export interface CoverControls {
  scheme: Scheme;
  bins: number;
  g: number;
}

export interface MagnifyBody {
  node_ids: number[];
  cover: { scheme: Scheme; bins_per_axis: number; g: number };
  cluster?: string;
}

export interface Suggestion {
  action: string;
  factor: number;
}

export function scaleBins(base: number, scale: Scale): number {
  if (scale === "finer") return base * 2;
  if (scale === "coarser") return Math.max(1, Math.floor(base / 2));
  return base;
}

/**
 * The rescale request for the current selection and controls.  Omitting the
 * cluster spec lets the server fall back to the session's base parameters.
 */
export function buildMagnifyRequest(
  selected: ReadonlySet<number>,
  controls: CoverControls,
  scale: Scale,
  clusterSpec?: string,
): MagnifyBody {
  const body: MagnifyBody = {
    node_ids: selectionToNodeIds(selected),
    cover: {
      scheme: controls.scheme,
      bins_per_axis: scaleBins(controls.bins, scale),
      g: controls.g,
    },
  };
  const spec = clusterSpec?.trim();
  if (spec) body.cluster = spec;
  return body;
}

/**
 * Turn a reported violation into prefilled control state: select the
 * violating simplex and scale the current bin count by the suggested factor.
 */
export function applySuggestion(
  simplex: number[],
  suggestion: Suggestion,
  currentBins: number,
): { nodeIds: number[]; bins: number } {
  const bins =
    suggestion.action === "coarsen"
      ? Math.max(1, Math.floor(currentBins / suggestion.factor))
      : currentBins * suggestion.factor;
  return { nodeIds: [...simplex].sort((a, b) => a - b), bins };
}
