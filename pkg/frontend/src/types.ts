// Wire types mirroring the service's pydantic schemas.

export type ModuleKind = "fusion" | "compression" | "paraphrase";

export type Phase = "pre_training" | "training" | "post_training";

export interface SessionNode {
  id: string;
  text: string;
  kind: ModuleKind | null;
  children: string[];
  sources: number[]; // 1-based document sentence ids
  height: number;
  consumed: boolean;
  pinned_at: number | null;
  scores: number[] | null; // vs each summary sentence
}

export interface MetricTriple {
  precision: number;
  recall: number;
  f1: number;
}

export interface SessionState {
  id: string;
  phase: Phase;
  document: string[];
  summary: string[] | null;
  nodes: SessionNode[];
  pins: Record<string, string>;
  summary_metrics: Record<string, MetricTriple> | null;
  training_programs: ProgramRecord[] | null;
  events: SessionEvent[];
}

export interface EdgeEvent {
  type: "edge";
  kind: ModuleKind;
  operands: string[];
  chosen: number;
  node_id: string;
  text: string;
}

export interface PinEvent {
  type: "pin";
  target_index: number;
  node_id: string;
}

export interface PhaseEvent {
  type: "phase";
  phase: Phase;
}

export interface UndoEvent {
  type: "undo";
}

export type SessionEvent = EdgeEvent | PinEvent | PhaseEvent | UndoEvent;

export interface ProposeResponse {
  candidates: string[];
  scores: number[][]; // per candidate, per summary sentence
}

export interface ProgramRecord {
  id: string;
  dsl: string;
  summary: string[];
  metrics: Record<string, MetricTriple>;
  nodes: unknown[];
  timing_ms?: number;
  config?: Record<string, unknown>;
}
