/**
 * Interactive shell wiring the canvas, selection, and service calls together.
 *
 * Invariants:
 *  - displayed topology always comes from the last committed server response
 *    (kept verbatim in `committedLog`); the client never edits it;
 *  - one mutation in flight at a time — mutation controls are disabled while
 *    a request is pending, and a server 409 surfaces as a retryable toast;
 *  - selection → request mapping is lossless (exactly the selected ids).
 */

import { ApiClient, OfflineError } from "./api.js";
import { layoutComplex, type Point, VIEW_HEIGHT, VIEW_WIDTH } from "./layout.js";
import {
  applySelection,
  buildViewModel,
  SchemaError,
  type ViewModel,
} from "./model.js";
import { renderComplex, simplexKey, SVG_NS } from "./render.js";
import {
  applySuggestion,
  buildMagnifyRequest,
  type CoverControls,
  type Scale,
  type Scheme,
} from "./requests.js";
import { rectSelect, selectionToNodeIds, toggle } from "./selection.js";

const DRAG_THRESHOLD = 3;
const PENDING_TOOLTIP = "wait for the in-flight operation to finish";
const NO_SESSION_TOOLTIP = "create a session first";

type Pending = "create" | "magnify" | "diagnose" | null;

interface ViolationJson {
  simplex: number[];
  method: string;
  beta0: number;
  witness: number[];
  suggestion: { action: string; factor: number };
}

export interface Mutation {
  before: number;
  after: number;
  nodeDelta: number;
  degeneracyPoints: number;
}

export interface AppOptions {
  baseUrl: string;
  fetchFn?: typeof fetch;
}

interface RetryableRequest {
  kind: "magnify" | "diagnose";
  body: unknown;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function option(doc: Document, value: string, label?: string): HTMLOptionElement {
  const opt = doc.createElement("option");
  opt.value = value;
  opt.textContent = label ?? value;
  return opt;
}

export class ExplorerApp {
  private readonly api: ApiClient;
  private readonly doc: Document;

  private sessionId: string | null = null;
  private model: ViewModel | null = null;
  private positions: ReadonlyMap<number, Point> = new Map();
  private readonly selection = new Set<number>();
  private pending: Pending = null;
  private committedLog: string[] = [];
  private committedComplex: unknown = null;
  private lastMutation: Mutation | null = null;
  private changedIds = new Set<number>();
  private violationKeys = new Set<string>();
  private violations: ViolationJson[] = [];
  private retryable: RetryableRequest | null = null;
  private inflight: Promise<void> = Promise.resolve();

  private lassoStart: Point | null = null;
  private lassoMoved = false;
  private suppressNextClick = false;

  // Control elements (exposed for tests via query; kept as fields for wiring).
  readonly svg: SVGSVGElement;
  private readonly banner: HTMLDivElement;
  private readonly toast: HTMLDivElement;
  private readonly toastText: HTMLSpanElement;
  private readonly retryButton: HTMLButtonElement;
  private readonly statusLine: HTMLDivElement;
  private readonly nodeCount: HTMLSpanElement;
  private readonly deltaDisplay: HTMLSpanElement;
  private readonly degeneracyBadge: HTMLSpanElement;
  private readonly higherDimBadge: HTMLSpanElement;
  private readonly selectionCount: HTMLSpanElement;
  private readonly diagnoseStatus: HTMLDivElement;
  private readonly violationList: HTMLUListElement;

  private readonly fixtureSelect: HTMLSelectElement;
  private readonly seedInput: HTMLInputElement;
  private readonly sizeInput: HTMLInputElement;
  private readonly lensInput: HTMLInputElement;
  private readonly createSchemeSelect: HTMLSelectElement;
  private readonly createBinsInput: HTMLInputElement;
  private readonly createGInput: HTMLInputElement;
  private readonly createClusterInput: HTMLInputElement;
  private readonly createButton: HTMLButtonElement;

  private readonly scaleSelect: HTMLSelectElement;
  private readonly schemeSelect: HTMLSelectElement;
  private readonly binsInput: HTMLInputElement;
  private readonly gInput: HTMLInputElement;
  private readonly clusterInput: HTMLInputElement;
  private readonly applyButton: HTMLButtonElement;
  private readonly clearButton: HTMLButtonElement;
  private readonly methodSelect: HTMLSelectElement;
  private readonly diagnoseButton: HTMLButtonElement;

  constructor(root: HTMLElement, options: AppOptions) {
    this.doc = root.ownerDocument;
    this.api = new ApiClient(options.baseUrl, options.fetchFn);
    const doc = this.doc;

    root.textContent = "";
    root.classList.add("explorer");

    // --- session creation form ---------------------------------------------
    const form = el(doc, "div", "session-form");
    this.fixtureSelect = doc.createElement("select");
    this.fixtureSelect.className = "fixture";
    for (const name of ["blob_ring", "circle", "two_blob", "blobs", "brick"]) {
      this.fixtureSelect.appendChild(option(doc, name));
    }
    this.seedInput = el(doc, "input", "seed");
    this.seedInput.value = "7";
    this.sizeInput = el(doc, "input", "n-points");
    this.sizeInput.placeholder = "n (fixture default)";
    this.lensInput = el(doc, "input", "lens");
    this.lensInput.value = "coord:0,1";
    this.createSchemeSelect = doc.createElement("select");
    this.createSchemeSelect.className = "create-scheme";
    this.createSchemeSelect.appendChild(option(doc, "cuboidal"));
    this.createSchemeSelect.appendChild(option(doc, "brick"));
    this.createBinsInput = el(doc, "input", "create-bins");
    this.createBinsInput.value = "4";
    this.createGInput = el(doc, "input", "create-g");
    this.createGInput.value = "0.25";
    this.createClusterInput = el(doc, "input", "create-cluster");
    this.createClusterInput.value = "single:auto";
    this.createButton = el(doc, "button", "create", "Create session");
    form.append(
      el(doc, "label", undefined, "fixture"),
      this.fixtureSelect,
      el(doc, "label", undefined, "seed"),
      this.seedInput,
      this.sizeInput,
      el(doc, "label", undefined, "lens"),
      this.lensInput,
      el(doc, "label", undefined, "cover"),
      this.createSchemeSelect,
      this.createBinsInput,
      this.createGInput,
      el(doc, "label", undefined, "cluster"),
      this.createClusterInput,
      this.createButton,
    );

    // --- notification surfaces ---------------------------------------------
    this.banner = el(doc, "div", "banner hidden");
    this.toast = el(doc, "div", "toast hidden");
    this.toastText = el(doc, "span", "toast-text");
    this.retryButton = el(doc, "button", "retry", "Retry");
    this.toast.append(this.toastText, this.retryButton);

    // --- canvas --------------------------------------------------------------
    const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    svg.setAttribute("class", "canvas");
    svg.setAttribute("width", String(VIEW_WIDTH));
    svg.setAttribute("height", String(VIEW_HEIGHT));
    svg.setAttribute("viewBox", `0 0 ${VIEW_WIDTH} ${VIEW_HEIGHT}`);
    this.svg = svg;

    // --- sidebar --------------------------------------------------------------
    const sidebar = el(doc, "div", "sidebar");
    this.nodeCount = el(doc, "span", "node-count", "nodes: –");
    this.deltaDisplay = el(doc, "span", "delta", "");
    this.degeneracyBadge = el(doc, "span", "badge badge-degeneracy", "degeneracy points: 0");
    this.higherDimBadge = el(doc, "span", "badge badge-higher", "higher-dim simplices: 0");
    this.selectionCount = el(doc, "span", "selection-count", "selected: 0");
    this.clearButton = el(doc, "button", "clear-selection", "Clear selection");

    this.scaleSelect = doc.createElement("select");
    this.scaleSelect.className = "scale";
    this.scaleSelect.appendChild(option(doc, "finer", "×2 finer"));
    this.scaleSelect.appendChild(option(doc, "same", "same scale"));
    this.scaleSelect.appendChild(option(doc, "coarser", "×2 coarser"));
    this.scaleSelect.value = "same";
    this.schemeSelect = doc.createElement("select");
    this.schemeSelect.className = "scheme";
    this.schemeSelect.appendChild(option(doc, "cuboidal"));
    this.schemeSelect.appendChild(option(doc, "brick"));
    this.binsInput = el(doc, "input", "bins");
    this.binsInput.value = "4";
    this.gInput = el(doc, "input", "g");
    this.gInput.value = "0.25";
    this.clusterInput = el(doc, "input", "cluster");
    this.clusterInput.placeholder = "cluster spec (session default)";
    this.applyButton = el(doc, "button", "apply", "Apply magnify");

    this.methodSelect = doc.createElement("select");
    this.methodSelect.className = "method";
    this.methodSelect.appendChild(option(doc, "clustering"));
    this.methodSelect.appendChild(option(doc, "persistence"));
    this.diagnoseButton = el(doc, "button", "diagnose", "Diagnose");
    this.diagnoseStatus = el(doc, "div", "diagnose-status", "");
    this.violationList = el(doc, "ul", "violations");
    this.statusLine = el(doc, "div", "status", "");

    sidebar.append(
      this.nodeCount,
      this.deltaDisplay,
      this.degeneracyBadge,
      this.higherDimBadge,
      this.selectionCount,
      this.clearButton,
      el(doc, "label", undefined, "scale"),
      this.scaleSelect,
      el(doc, "label", undefined, "scheme"),
      this.schemeSelect,
      el(doc, "label", undefined, "bins"),
      this.binsInput,
      el(doc, "label", undefined, "overlap g"),
      this.gInput,
      this.clusterInput,
      this.applyButton,
      el(doc, "label", undefined, "diagnose"),
      this.methodSelect,
      this.diagnoseButton,
      this.diagnoseStatus,
      this.violationList,
      this.statusLine,
    );

    const main = el(doc, "div", "main");
    main.append(svg, sidebar);
    root.append(form, this.banner, this.toast, main);

    this.wireEvents();
    this.refreshControls();
    this.renderAll();
  }

  // ---------------------------------------------------------------- events --

  private wireEvents(): void {
    this.createButton.addEventListener("click", () => this.track(() => this.create()));
    this.applyButton.addEventListener("click", () => this.track(() => this.apply()));
    this.diagnoseButton.addEventListener("click", () => this.track(() => this.diagnose()));
    this.retryButton.addEventListener("click", () => this.track(() => this.retry()));
    this.clearButton.addEventListener("click", () => {
      this.selection.clear();
      this.renderAll();
    });

    this.svg.addEventListener("mousedown", (ev) => {
      this.suppressNextClick = false;
      this.lassoStart = this.toCanvas(ev);
      this.lassoMoved = false;
    });
    this.svg.addEventListener("mousemove", (ev) => {
      if (!this.lassoStart) return;
      const p = this.toCanvas(ev);
      if (
        Math.abs(p.x - this.lassoStart.x) > DRAG_THRESHOLD ||
        Math.abs(p.y - this.lassoStart.y) > DRAG_THRESHOLD
      ) {
        this.lassoMoved = true;
      }
    });
    this.svg.addEventListener("mouseup", (ev) => {
      if (!this.lassoStart) return;
      const end = this.toCanvas(ev);
      if (this.lassoMoved) {
        const hit = rectSelect(this.positions, {
          x0: this.lassoStart.x,
          y0: this.lassoStart.y,
          x1: end.x,
          y1: end.y,
        });
        this.selection.clear();
        for (const id of hit) this.selection.add(id);
        this.suppressNextClick = true;
        this.renderAll();
      }
      this.lassoStart = null;
      this.lassoMoved = false;
    });
    this.svg.addEventListener("click", (ev) => {
      if (this.suppressNextClick) {
        this.suppressNextClick = false;
        return;
      }
      const target = ev.target as Element | null;
      const idAttr = target?.getAttribute?.("data-node-id");
      if (idAttr === null || idAttr === undefined) return;
      toggle(this.selection, Number(idAttr));
      this.renderAll();
    });
  }

  private toCanvas(ev: MouseEvent): Point {
    const rect = this.svg.getBoundingClientRect();
    const scaleX = rect.width > 0 ? VIEW_WIDTH / rect.width : 1;
    const scaleY = rect.height > 0 ? VIEW_HEIGHT / rect.height : 1;
    return { x: (ev.clientX - rect.left) * scaleX, y: (ev.clientY - rect.top) * scaleY };
  }

  /** Chain an async operation so tests can await quiescence via idle(). */
  private track(op: () => Promise<void>): void {
    this.inflight = this.inflight.then(op, op);
  }

  /** Resolves once every operation started so far has settled. */
  idle(): Promise<void> {
    return this.inflight;
  }

  // ------------------------------------------------------------- operations --

  private async create(): Promise<void> {
    if (this.pending) return;
    this.pending = "create";
    this.refreshControls();
    try {
      const body: Record<string, unknown> = {
        fixture: this.fixtureSelect.value,
        seed: Number(this.seedInput.value || "0"),
        lens: this.lensInput.value || "coord:0,1",
        cover: {
          scheme: this.createSchemeSelect.value,
          bins_per_axis: Number(this.createBinsInput.value || "4"),
          g: Number(this.createGInput.value || "0.25"),
        },
        cluster: this.createClusterInput.value || "single:auto",
      };
      if (this.sizeInput.value.trim()) body.n = Number(this.sizeInput.value);
      const res = await this.api.createSession(body);
      if (res.status !== 201) {
        this.showBanner("error", `session creation failed (${res.status}): ${this.detail(res.data)}`);
        return;
      }
      const data = res.data as { session_id: string; complex: unknown };
      if (!this.commit(data.complex, res.raw)) return;
      this.sessionId = data.session_id;
      this.selection.clear();
      this.changedIds = new Set();
      this.lastMutation = null;
      this.violations = [];
      this.violationKeys = new Set();
      // The applied cover becomes the baseline the scale control works from.
      this.binsInput.value = this.createBinsInput.value;
      this.gInput.value = this.createGInput.value;
      this.schemeSelect.value = this.createSchemeSelect.value;
      this.hideBanner();
      this.hideToast();
      this.setStatus(`session ${data.session_id} created`);
      this.deltaDisplay.textContent = "";
      this.diagnoseStatus.textContent = "";
      this.diagnoseStatus.className = "diagnose-status";
      this.renderAll();
    } catch (err) {
      this.handleTransport(err);
    } finally {
      this.pending = null;
      this.refreshControls();
    }
  }

  private controls(): CoverControls {
    return {
      scheme: this.schemeSelect.value as Scheme,
      bins: Number(this.binsInput.value || "1"),
      g: Number(this.gInput.value || "0"),
    };
  }

  private async apply(): Promise<void> {
    if (this.pending || !this.sessionId) return;
    if (this.selection.size === 0) {
      this.setStatus("selection is empty — nothing was sent");
      return;
    }
    const body = buildMagnifyRequest(
      this.selection,
      this.controls(),
      this.scaleSelect.value as Scale,
      this.clusterInput.value,
    );
    await this.sendMagnify(body);
  }

  private async sendMagnify(body: unknown): Promise<void> {
    if (this.pending || !this.sessionId) return;
    this.pending = "magnify";
    this.refreshControls();
    try {
      const before = this.model?.nodes.length ?? 0;
      const beforeNodes = this.snapshotNodeShapes();
      const res = await this.api.magnify(this.sessionId, body);
      if (res.status === 409) {
        this.showBusyToast({ kind: "magnify", body });
        return;
      }
      if (res.status !== 200) {
        this.showBanner("error", `magnify failed (${res.status}): ${this.detail(res.data)}`);
        return;
      }
      const data = res.data as {
        complex: unknown;
        degeneracy_points: unknown[];
        node_delta: number;
      };
      if (!this.commit(data.complex, res.raw)) return;
      const after = this.model!.nodes.length;
      this.changedIds = this.diffChanged(beforeNodes);
      this.lastMutation = {
        before,
        after,
        nodeDelta: data.node_delta,
        degeneracyPoints: data.degeneracy_points.length,
      };
      const d = data.node_delta;
      this.deltaDisplay.textContent = `${before} → ${after} (${d >= 0 ? "+" : ""}${d})`;
      this.degeneracyBadge.textContent = `degeneracy points: ${data.degeneracy_points.length}`;
      // Stale after the topology changed; a new diagnose run repopulates them.
      this.violations = [];
      this.violationKeys = new Set();
      this.violationList.textContent = "";
      this.diagnoseStatus.textContent = "";
      this.diagnoseStatus.className = "diagnose-status";
      // What was applied is the new baseline for the scale control.
      const applied = body as { cover?: { bins_per_axis?: number; scheme?: string; g?: number } };
      if (applied.cover?.bins_per_axis !== undefined) {
        this.binsInput.value = String(applied.cover.bins_per_axis);
      }
      if (applied.cover?.scheme) this.schemeSelect.value = applied.cover.scheme;
      if (applied.cover?.g !== undefined) this.gInput.value = String(applied.cover.g);
      this.scaleSelect.value = "same";
      const kept = new Set(this.model!.nodes.map((n) => n.id));
      for (const id of [...this.selection]) if (!kept.has(id)) this.selection.delete(id);
      this.hideBanner();
      this.hideToast();
      this.setStatus("magnify committed");
      this.renderAll();
    } catch (err) {
      this.handleTransport(err);
    } finally {
      this.pending = null;
      this.refreshControls();
    }
  }

  private async diagnose(): Promise<void> {
    if (this.pending || !this.sessionId) return;
    const body = { method: this.methodSelect.value };
    await this.sendDiagnose(body);
  }

  private async sendDiagnose(body: unknown): Promise<void> {
    if (this.pending || !this.sessionId) return;
    this.pending = "diagnose";
    this.refreshControls();
    try {
      const res = await this.api.diagnose(this.sessionId, body);
      if (res.status === 409) {
        this.showBusyToast({ kind: "diagnose", body });
        return;
      }
      if (res.status !== 200) {
        this.showBanner("error", `diagnose failed (${res.status}): ${this.detail(res.data)}`);
        return;
      }
      const data = res.data as { bad: boolean; violations: ViolationJson[]; skipped: number };
      this.violations = data.violations;
      this.violationKeys = new Set(data.violations.map((v) => simplexKey(v.simplex)));
      this.renderViolations(data);
      this.hideBanner();
      this.hideToast();
      this.renderAll();
    } catch (err) {
      this.handleTransport(err);
    } finally {
      this.pending = null;
      this.refreshControls();
    }
  }

  private retry(): Promise<void> {
    const req = this.retryable;
    this.retryable = null;
    this.hideToast();
    if (!req) return Promise.resolve();
    return req.kind === "magnify" ? this.sendMagnify(req.body) : this.sendDiagnose(req.body);
  }

  // ---------------------------------------------------------------- commits --

  /** Install a server-sent complex as the displayed model.  False on schema mismatch. */
  private commit(complexJson: unknown, rawResponse: string): boolean {
    let model: ViewModel;
    try {
      model = buildViewModel(complexJson);
    } catch (err) {
      if (err instanceof SchemaError) {
        this.showBanner("error", `server response did not match the complex schema: ${err.message}`);
        return false;
      }
      throw err;
    }
    this.model = model;
    this.committedComplex = complexJson;
    this.committedLog.push(rawResponse);
    this.positions = layoutComplex(model);
    return true;
  }

  private snapshotNodeShapes(): Map<number, string> {
    const shapes = new Map<number, string>();
    for (const n of this.model?.nodes ?? []) {
      shapes.set(n.id, JSON.stringify([n.size, n.level, n.lensCentroid]));
    }
    return shapes;
  }

  /** Nodes that are new or whose size/level/centroid changed — these pulse. */
  private diffChanged(before: Map<number, string>): Set<number> {
    const changed = new Set<number>();
    for (const n of this.model?.nodes ?? []) {
      const prev = before.get(n.id);
      if (prev === undefined || prev !== JSON.stringify([n.size, n.level, n.lensCentroid])) {
        changed.add(n.id);
      }
    }
    return changed;
  }

  // ------------------------------------------------------------------ views --

  private renderViolations(data: { bad: boolean; violations: ViolationJson[]; skipped: number }): void {
    this.violationList.textContent = "";
    if (!data.bad) {
      this.diagnoseStatus.textContent =
        data.skipped > 0 ? `no violations (${data.skipped} skipped)` : "no violations";
      this.diagnoseStatus.className = "diagnose-status clean";
      return;
    }
    this.diagnoseStatus.textContent = `${data.violations.length} violation(s) found`;
    this.diagnoseStatus.className = "diagnose-status bad";
    data.violations.forEach((v, i) => {
      const li = this.doc.createElement("li");
      li.className = "violation-item";
      li.setAttribute("data-index", String(i));
      li.textContent =
        `simplex [${v.simplex.join(", ")}] split into ${v.beta0} parts — ` +
        `suggest ${v.suggestion.action} ×${v.suggestion.factor}`;
      li.addEventListener("click", () => this.prefillSuggestion(i));
      this.violationList.appendChild(li);
    });
  }

  /** Load a violation's suggested request into the controls for one-click apply. */
  private prefillSuggestion(index: number): void {
    const v = this.violations[index];
    if (!v) return;
    const { nodeIds, bins } = applySuggestion(v.simplex, v.suggestion, Number(this.binsInput.value || "1"));
    this.selection.clear();
    for (const id of nodeIds) this.selection.add(id);
    this.binsInput.value = String(bins);
    this.scaleSelect.value = "same";
    this.schemeSelect.value = "cuboidal";
    this.setStatus(`suggestion loaded: ${v.suggestion.action} [${nodeIds.join(", ")}] — Apply to run it`);
    this.renderAll();
  }

  private renderAll(): void {
    if (this.model) {
      applySelection(this.model, this.selection);
      renderComplex(this.svg, this.model, this.positions, {
        violations: this.violationKeys,
        changed: this.changedIds,
      });
      this.nodeCount.textContent = `nodes: ${this.model.nodes.length}`;
      this.higherDimBadge.textContent = `higher-dim simplices: ${this.model.higherDimCount}`;
    } else {
      renderComplex(this.svg, { nodes: [], edges: [], triangles: [], higherDimCount: 0, dimCap: 0, truncated: false }, new Map());
      this.nodeCount.textContent = "nodes: –";
    }
    this.selectionCount.textContent = `selected: ${this.selection.size}`;
  }

  private refreshControls(): void {
    const busy = this.pending !== null;
    const noSession = this.sessionId === null;
    this.createButton.disabled = busy;
    this.applyButton.disabled = busy || noSession;
    this.diagnoseButton.disabled = busy || noSession;
    const tip = busy ? PENDING_TOOLTIP : noSession ? NO_SESSION_TOOLTIP : "";
    this.createButton.title = busy ? PENDING_TOOLTIP : "";
    this.applyButton.title = tip;
    this.diagnoseButton.title = tip;
  }

  private showBusyToast(req: RetryableRequest): void {
    this.retryable = req;
    this.toastText.textContent = "session is busy — another mutation is in flight";
    this.toast.className = "toast busy";
  }

  private hideToast(): void {
    this.toast.className = "toast hidden";
  }

  private showBanner(kind: "error" | "offline", text: string): void {
    this.banner.textContent = text;
    this.banner.className = `banner ${kind}`;
  }

  private hideBanner(): void {
    this.banner.className = "banner hidden";
    this.banner.textContent = "";
  }

  private setStatus(text: string): void {
    this.statusLine.textContent = text;
  }

  private handleTransport(err: unknown): void {
    if (err instanceof OfflineError) {
      this.showBanner("offline", "server unreachable — check that the service is running");
      return;
    }
    throw err;
  }

  private detail(data: unknown): string {
    if (typeof data === "object" && data !== null && "detail" in data) {
      return String((data as { detail: unknown }).detail);
    }
    return "unexpected response";
  }

  // ------------------------------------------------------------- test hooks --

  getModel(): ViewModel | null {
    return this.model;
  }

  getPositions(): ReadonlyMap<number, Point> {
    return this.positions;
  }

  getSelection(): ReadonlySet<number> {
    return this.selection;
  }

  getSelectedIds(): number[] {
    return selectionToNodeIds(this.selection);
  }

  getSessionId(): string | null {
    return this.sessionId;
  }

  getLastMutation(): Mutation | null {
    return this.lastMutation;
  }

  /** Raw response bodies every displayed complex was derived from, oldest first. */
  getCommittedLog(): readonly string[] {
    return this.committedLog;
  }

  getCommittedComplex(): unknown {
    return this.committedComplex;
  }

  isPending(): boolean {
    return this.pending !== null;
  }
}

export function createApp(root: HTMLElement, options: AppOptions): ExplorerApp {
  return new ExplorerApp(root, options);
}
