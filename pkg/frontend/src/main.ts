// Program-builder interface: select sentences, apply operations one edge at
// a time, pin roots to summary positions, export the finished program.
// All module execution and scoring happens server-side.

import { ApiError, SessionClient } from "./api.js";
import {
  Selection,
  availableKinds,
  selectableNodes,
  toggleSelection,
  workingRoots,
} from "./state.js";
import { ModuleKind, ProposeResponse, SessionNode, SessionState } from "./types.js";

const client = new SessionClient();

interface AppState {
  session: SessionState | null;
  selection: Selection;
  proposal: (ProposeResponse & { kind: ModuleKind; operands: string[] }) | null;
  notice: string;
}

const app: AppState = { session: null, selection: { ids: [] }, proposal: null, notice: "" };

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = ""
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function notify(message: string): void {
  app.notice = message;
  render();
  if (message) {
    window.setTimeout(() => {
      if (app.notice === message) {
        app.notice = "";
        render();
      }
    }, 4000);
  }
}

async function call<T>(action: () => Promise<T>): Promise<T | null> {
  try {
    return await action();
  } catch (error) {
    if (error instanceof ApiError) {
      notify(error.rule ? `${error.detail} (${error.rule})` : error.detail);
    } else {
      notify(String(error));
    }
    return null;
  }
}

function refresh(state: SessionState): void {
  app.session = state;
  app.selection = { ids: [] };
  app.proposal = null;
  render();
}

// --- actions -----------------------------------------------------------------

async function startSession(): Promise<void> {
  const docText = (document.getElementById("doc-input") as HTMLTextAreaElement).value;
  const summaryText = (document.getElementById("summary-input") as HTMLTextAreaElement).value;
  const sentences = docText.split("\n").map((s) => s.trim()).filter(Boolean);
  const summary = summaryText.split("\n").map((s) => s.trim()).filter(Boolean);
  if (!sentences.length) {
    notify("paste a document first, one sentence per line");
    return;
  }
  const state = await call(() =>
    client.createSession({
      id: `ui-${Date.now()}`,
      document: sentences,
      summary: summary.length ? summary : undefined,
    })
  );
  if (state) refresh(state);
}

async function proposeSelected(kind: ModuleKind): Promise<void> {
  if (!app.session) return;
  const operands = app.selection.ids;
  const proposal = await call(() => client.propose(app.session!.id, kind, operands));
  if (proposal) {
    app.proposal = { ...proposal, kind, operands };
    render();
  }
}

async function applyCandidate(index: number): Promise<void> {
  if (!app.session || !app.proposal) return;
  const { kind, operands } = app.proposal;
  const state = await call(() => client.applyEdge(app.session!.id, kind, operands, index));
  if (state) refresh(state);
}

async function pinRoot(nodeId: string, targetIndex: number): Promise<void> {
  if (!app.session) return;
  const state = await call(() => client.pin(app.session!.id, targetIndex, nodeId));
  if (state) refresh(state);
}

async function undo(): Promise<void> {
  if (!app.session) return;
  const state = await call(() => client.undo(app.session!.id));
  if (state) refresh(state);
}

async function switchPhase(phase: "pre_training" | "training" | "post_training"): Promise<void> {
  if (!app.session) return;
  const state = await call(() => client.setPhase(app.session!.id, phase));
  if (state) refresh(state);
}

async function exportProgram(): Promise<void> {
  if (!app.session) return;
  const record = await call(() => client.exportSession(app.session!.id));
  if (record) {
    const target = document.getElementById("export-output")!;
    target.textContent = JSON.stringify(record, null, 2);
  }
}

// --- rendering ---------------------------------------------------------------

function scoreBadge(score: number): HTMLElement {
  const badge = el("span", "badge", (100 * score).toFixed(1));
  badge.title = "ROUGE-L F1 vs summary sentence (x100)";
  return badge;
}

function renderTree(node: SessionNode, nodes: Map<string, SessionNode>): HTMLElement {
  const wrapper = el("div", "tree-node");
  const label = node.kind ? node.kind : node.id;
  wrapper.append(el("span", node.kind ? "op-label" : "leaf-label", label));
  wrapper.append(el("div", "node-text", node.text));
  if (node.children.length) {
    const children = el("div", "tree-children");
    for (const childId of node.children) {
      const child = nodes.get(childId);
      if (child) children.append(renderTree(child, nodes));
    }
    wrapper.append(children);
  }
  return wrapper;
}

function render(): void {
  const root = document.getElementById("app")!;
  root.textContent = "";

  const notice = el("div", "notice", app.notice);
  notice.style.visibility = app.notice ? "visible" : "hidden";
  root.append(notice);

  if (!app.session) {
    root.append(renderSetup());
    return;
  }
  const state = app.session;
  const nodeMap = new Map(state.nodes.map((n) => [n.id, n]));

  root.append(renderPhaseBanner(state));
  const columns = el("div", "columns");
  columns.append(renderPalette(state));
  columns.append(renderWorkshop(state, nodeMap));
  columns.append(renderSummaryPanel(state, nodeMap));
  root.append(columns);

  if (app.proposal) root.append(renderCandidatePicker());

  const footer = el("div", "footer");
  const undoButton = el("button", "", "undo last step");
  undoButton.onclick = () => void undo();
  const exportButton = el("button", "primary", "export program");
  exportButton.onclick = () => void exportProgram();
  footer.append(undoButton, exportButton);
  root.append(footer);
  root.append(el("pre", "export", ""), );
  root.lastElementChild!.id = "export-output";
}

function renderSetup(): HTMLElement {
  const panel = el("div", "setup");
  panel.append(el("h2", "", "start a session"));
  panel.append(el("p", "", "document sentences, one per line:"));
  const doc = el("textarea");
  doc.id = "doc-input";
  doc.rows = 8;
  panel.append(doc);
  panel.append(el("p", "", "reference or model summary (optional), one sentence per line:"));
  const summary = el("textarea");
  summary.id = "summary-input";
  summary.rows = 4;
  panel.append(summary);
  const start = el("button", "primary", "create session");
  start.onclick = () => void startSession();
  panel.append(start);
  return panel;
}

function renderPhaseBanner(state: SessionState): HTMLElement {
  const banner = el("div", `phase phase-${state.phase}`);
  banner.append(el("strong", "", `phase: ${state.phase.replace("_", " ")}`));
  for (const phase of ["pre_training", "training", "post_training"] as const) {
    if (phase === state.phase) continue;
    const button = el("button", "ghost", `go to ${phase.replace("_", " ")}`);
    button.onclick = () => void switchPhase(phase);
    banner.append(button);
  }
  if (state.summary_metrics) {
    const rouge = state.summary_metrics["rougeL"];
    if (rouge) {
      banner.append(el("span", "badge big", `summary R-L ${(100 * rouge.f1).toFixed(1)}`));
    }
  }
  return banner;
}

function renderPalette(state: SessionState): HTMLElement {
  const palette = el("div", "panel palette");
  palette.append(el("h3", "", "document"));
  const usable = selectableNodes(state);
  state.document.forEach((sentence, i) => {
    const id = `D${i + 1}`;
    const chip = el("div", "chip");
    if (app.selection.ids.includes(id)) chip.classList.add("selected");
    if (!usable.has(id)) chip.classList.add("disabled");
    chip.append(el("span", "chip-id", id));
    chip.append(el("span", "", sentence));
    chip.onclick = () => {
      if (!usable.has(id)) return;
      app.selection = toggleSelection(app.selection, id);
      app.proposal = null;
      render();
    };
    palette.append(chip);
  });
  return palette;
}

function renderWorkshop(state: SessionState, nodeMap: Map<string, SessionNode>): HTMLElement {
  const workshop = el("div", "panel workshop");
  workshop.append(el("h3", "", "working trees"));

  const toolbar = el("div", "toolbar");
  const kinds = availableKinds(app.selection);
  for (const kind of ["compression", "paraphrase", "fusion"] as ModuleKind[]) {
    const button = el("button", "", kind);
    button.disabled = !kinds.includes(kind);
    button.onclick = () => void proposeSelected(kind);
    toolbar.append(button);
  }
  toolbar.append(
    el("span", "hint", app.selection.ids.length
      ? `selected: ${app.selection.ids.join(", ")}`
      : "select one sentence (compress/paraphrase) or two (fuse)")
  );
  workshop.append(toolbar);

  const usable = selectableNodes(state);
  for (const node of workingRoots(state)) {
    const card = el("div", "card");
    if (app.selection.ids.includes(node.id)) card.classList.add("selected");
    const head = el("div", "card-head");
    head.append(el("span", "chip-id", node.id));
    if (node.scores) {
      node.scores.forEach((score, target) => {
        const badge = scoreBadge(score);
        badge.title = `vs summary sentence ${target + 1}`;
        head.append(badge);
      });
    }
    if (node.pinned_at !== null) {
      head.append(el("span", "pin-flag", `pinned -> S${node.pinned_at + 1}`));
    } else if (state.summary) {
      state.summary.forEach((_, target) => {
        const pin = el("button", "ghost", `pin S${target + 1}`);
        pin.onclick = (event) => {
          event.stopPropagation();
          void pinRoot(node.id, target);
        };
        head.append(pin);
      });
    }
    card.append(head);
    card.append(renderTree(node, nodeMap));
    card.onclick = () => {
      if (!usable.has(node.id)) return;
      app.selection = toggleSelection(app.selection, node.id);
      app.proposal = null;
      render();
    };
    workshop.append(card);
  }
  return workshop;
}

function renderSummaryPanel(state: SessionState, nodeMap: Map<string, SessionNode>): HTMLElement {
  const panel = el("div", "panel summary");
  panel.append(el("h3", "", "summary targets"));
  (state.summary ?? []).forEach((sentence, i) => {
    const row = el("div", "target-row");
    row.append(el("div", "target-ref", `S${i + 1}: ${sentence}`));
    const pinnedId = state.pins[String(i)];
    if (pinnedId) {
      const pinned = nodeMap.get(pinnedId);
      row.append(el("div", "target-pinned", pinned ? pinned.text : pinnedId));
    } else {
      row.append(el("div", "target-missing", "no root pinned yet"));
    }
    panel.append(row);
  });
  if (state.phase === "training" && state.training_programs) {
    panel.append(el("h3", "", "model programs (training)"));
    for (const program of state.training_programs) {
      const block = el("div", "training-program");
      block.append(el("code", "", program.dsl ?? ""));
      for (const sentence of program.summary ?? []) {
        block.append(el("div", "node-text", sentence));
      }
      panel.append(block);
    }
  }
  return panel;
}

function renderCandidatePicker(): HTMLElement {
  const proposal = app.proposal!;
  const dialog = el("div", "picker");
  dialog.append(
    el("h3", "", `${proposal.kind} ( ${proposal.operands.join(" , ")} ): pick a candidate`)
  );
  proposal.candidates.forEach((candidate, index) => {
    const row = el("div", "candidate");
    const scores = proposal.scores[index];
    if (scores) {
      scores.forEach((score, target) => {
        const badge = scoreBadge(score);
        badge.title = `vs summary sentence ${target + 1}`;
        row.append(badge);
      });
    }
    row.append(el("span", "", candidate));
    row.onclick = () => void applyCandidate(index);
    dialog.append(row);
  });
  const cancel = el("button", "ghost", "cancel");
  cancel.onclick = () => {
    app.proposal = null;
    render();
  };
  dialog.append(cancel);
  return dialog;
}

document.addEventListener("DOMContentLoaded", () => render());
