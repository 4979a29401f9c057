import { describe, expect, it } from "vitest";

import {
  availableKinds,
  foldEvents,
  initialCanvas,
  replayMatchesServer,
  selectableNodes,
  toggleSelection,
  workingRoots,
} from "../src/state.js";
import { SessionEvent, SessionState } from "../src/types.js";

const DOC = ["The farmer helps the bridge.", "The doctor shows the market.", "The singer finds the castle."];

const EDGE_A: SessionEvent = {
  type: "edge",
  kind: "compression",
  operands: ["D1"],
  chosen: 0,
  node_id: "N1",
  text: "The farmer helps.",
};

const EDGE_B: SessionEvent = {
  type: "edge",
  kind: "fusion",
  operands: ["N1", "D2"],
  chosen: 0,
  node_id: "N2",
  text: "The farmer helps and the doctor shows the market.",
};

describe("foldEvents", () => {
  it("starts with one leaf per document sentence", () => {
    const canvas = initialCanvas(DOC);
    expect(canvas.nodes.size).toBe(3);
    expect(canvas.nodes.get("D2")?.text).toBe(DOC[1]);
    expect(canvas.nodes.get("D2")?.sources).toEqual([2]);
  });

  it("adds edge nodes with derived sources and heights", () => {
    const canvas = foldEvents(DOC, [EDGE_A, EDGE_B]);
    const fused = canvas.nodes.get("N2")!;
    expect(fused.sources).toEqual([1, 2]);
    expect(fused.height).toBe(2);
    expect(canvas.consumed.has("N1")).toBe(true);
    expect(canvas.consumed.has("D1")).toBe(false); // leaves stay reusable
  });

  it("applies pins and phases", () => {
    const canvas = foldEvents(DOC, [
      EDGE_A,
      { type: "pin", target_index: 0, node_id: "N1" },
      { type: "phase", phase: "training" },
    ]);
    expect(canvas.pins.get(0)).toBe("N1");
    expect(canvas.phase).toBe("training");
  });

  it("undo drops the latest surviving event", () => {
    const withUndo = foldEvents(DOC, [EDGE_A, EDGE_B, { type: "undo" }]);
    expect(withUndo.nodes.has("N2")).toBe(false);
    expect(withUndo.nodes.has("N1")).toBe(true);
    expect(withUndo.consumed.has("N1")).toBe(false);

    const doubleUndo = foldEvents(DOC, [EDGE_A, { type: "undo" }, { type: "undo" }]);
    expect(doubleUndo.nodes.has("N1")).toBe(false);
    expect(doubleUndo.nodes.size).toBe(3);
  });

  it("undo then new edge replays cleanly", () => {
    const canvas = foldEvents(DOC, [
      EDGE_A,
      { type: "undo" },
      { ...EDGE_A, node_id: "N1", text: "A different compression." },
    ]);
    expect(canvas.nodes.get("N1")?.text).toBe("A different compression.");
  });
});

function serverState(events: SessionEvent[]): SessionState {
  const canvas = foldEvents(DOC, events);
  return {
    id: "s",
    phase: "pre_training",
    document: DOC,
    summary: ["a target sentence."],
    nodes: [...canvas.nodes.values()].map((n) => ({
      ...n,
      consumed: canvas.consumed.has(n.id),
      pinned_at: null,
      scores: null,
    })),
    pins: Object.fromEntries([...canvas.pins].map(([k, v]) => [String(k), v])),
    summary_metrics: null,
    training_programs: null,
    events,
  };
}

describe("replayMatchesServer", () => {
  it("accepts a consistent snapshot", () => {
    expect(replayMatchesServer(serverState([EDGE_A, EDGE_B]))).toBe(true);
  });

  it("rejects a tampered snapshot", () => {
    const state = serverState([EDGE_A]);
    state.nodes.find((n) => n.id === "N1")!.text = "tampered";
    expect(replayMatchesServer(state)).toBe(false);
  });
});

describe("selection", () => {
  it("toggles and caps at two, evicting the oldest", () => {
    let selection = { ids: [] as string[] };
    selection = toggleSelection(selection, "D1");
    selection = toggleSelection(selection, "D2");
    expect(selection.ids).toEqual(["D1", "D2"]);
    selection = toggleSelection(selection, "D3");
    expect(selection.ids).toEqual(["D2", "D3"]);
    selection = toggleSelection(selection, "D2");
    expect(selection.ids).toEqual(["D3"]);
  });

  it("offers unary ops for one selection and fusion for two", () => {
    expect(availableKinds({ ids: [] })).toEqual([]);
    expect(availableKinds({ ids: ["D1"] })).toEqual(["compression", "paraphrase"]);
    expect(availableKinds({ ids: ["D1", "D2"] })).toEqual(["fusion"]);
  });

  it("consumed and pinned nodes are not selectable", () => {
    const state = serverState([EDGE_A, EDGE_B]);
    state.pins = { "0": "N2" };
    const usable = selectableNodes(state);
    expect(usable.has("N1")).toBe(false); // consumed by the fusion
    expect(usable.has("N2")).toBe(false); // pinned
    expect(usable.has("D1")).toBe(true);
    expect(workingRoots(state).map((n) => n.id)).toEqual(["N2"]);
  });
});
