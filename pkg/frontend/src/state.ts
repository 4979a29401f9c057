// Client-side mirror of the session: a fold over the event log plus the
// transient UI selection. The server remains the source of truth; the fold
// exists for optimistic rendering and for verifying replay parity.

import { ModuleKind, SessionEvent, SessionNode, SessionState } from "./types.js";

export interface CanvasState {
  nodes: Map<string, SessionNode>;
  pins: Map<number, string>;
  consumed: Set<string>;
  phase: string;
}

export function initialCanvas(document: string[], phase = "pre_training"): CanvasState {
  const nodes = new Map<string, SessionNode>();
  document.forEach((text, i) => {
    const id = `D${i + 1}`;
    nodes.set(id, {
      id,
      text,
      kind: null,
      children: [],
      sources: [i + 1],
      height: 0,
      consumed: false,
      pinned_at: null,
      scores: null,
    });
  });
  return { nodes, pins: new Map(), consumed: new Set(), phase };
}

function applyOne(canvas: CanvasState, event: SessionEvent): void {
  if (event.type === "edge") {
    const children = event.operands.map((id) => {
      const node = canvas.nodes.get(id);
      if (!node) throw new Error(`unknown operand ${id}`);
      return node;
    });
    const sources = [...new Set(children.flatMap((c) => c.sources))].sort((a, b) => a - b);
    canvas.nodes.set(event.node_id, {
      id: event.node_id,
      text: event.text,
      kind: event.kind,
      children: event.operands.slice(),
      sources,
      height: 1 + Math.max(...children.map((c) => c.height)),
      consumed: false,
      pinned_at: null,
      scores: null,
    });
    for (const child of children) {
      if (child.kind !== null) canvas.consumed.add(child.id);
    }
  } else if (event.type === "pin") {
    canvas.pins.set(event.target_index, event.node_id);
  } else if (event.type === "phase") {
    canvas.phase = event.phase;
  }
}

/** Rebuild canvas state from an event log; undo drops the latest survivor. */
export function foldEvents(
  document: string[],
  events: SessionEvent[],
  initialPhase = "pre_training"
): CanvasState {
  const surviving: SessionEvent[] = [];
  for (const event of events) {
    if (event.type === "undo") {
      surviving.pop();
    } else {
      surviving.push(event);
    }
  }
  const canvas = initialCanvas(document, initialPhase);
  for (const event of surviving) applyOne(canvas, event);
  return canvas;
}

/** Check a server snapshot against a local fold of its own event log. */
export function replayMatchesServer(state: SessionState): boolean {
  const folded = foldEvents(state.document, state.events, "pre_training");
  for (const node of state.nodes) {
    const local = folded.nodes.get(node.id);
    if (!local || local.text !== node.text) return false;
    if (local.kind !== node.kind) return false;
  }
  if (folded.nodes.size !== state.nodes.length) return false;
  for (const [target, nodeId] of Object.entries(state.pins)) {
    if (folded.pins.get(Number(target)) !== nodeId) return false;
  }
  return true;
}

// --- selection handling ------------------------------------------------------

export interface Selection {
  ids: string[];
}

export function toggleSelection(selection: Selection, nodeId: string): Selection {
  if (selection.ids.includes(nodeId)) {
    return { ids: selection.ids.filter((id) => id !== nodeId) };
  }
  if (selection.ids.length >= 2) {
    return { ids: [selection.ids[1]!, nodeId] };
  }
  return { ids: [...selection.ids, nodeId] };
}

/** Operations offered for the current selection size. */
export function availableKinds(selection: Selection): ModuleKind[] {
  if (selection.ids.length === 1) return ["compression", "paraphrase"];
  if (selection.ids.length === 2) return ["fusion"];
  return [];
}

/** Roots of the working forest: generated nodes not consumed by an edge. */
export function workingRoots(state: SessionState): SessionNode[] {
  return state.nodes.filter((n) => n.kind !== null && !n.consumed);
}

export function selectableNodes(state: SessionState): Set<string> {
  const pinned = new Set(Object.values(state.pins));
  return new Set(
    state.nodes
      .filter((n) => !n.consumed && !pinned.has(n.id))
      .map((n) => n.id)
  );
}
