// Typed client for the session API. Every mutation returns the fresh server
// state; the canvas never computes metrics or module outputs locally.

import {
  ModuleKind,
  Phase,
  ProgramRecord,
  ProposeResponse,
  SessionState,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
    public rule?: string
  ) {
    super(rule ? `${detail} [${rule}]` : detail);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let detail = response.statusText;
    let rule: string | undefined;
    try {
      const body = await response.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
      rule = body.rule;
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ApiError(response.status, detail, rule);
  }
  return response.json() as Promise<T>;
}

export class SessionClient {
  constructor(private base: string = "") {}

  private url(path: string): string {
    return `${this.base}/v1${path}`;
  }

  createSession(
    record: { id: string; document: string[]; summary?: string[] },
    phase: Phase = "pre_training",
    trainingPrograms: ProgramRecord[] = []
  ): Promise<SessionState> {
    return request(this.url("/sessions"), {
      method: "POST",
      body: JSON.stringify({ record, phase, training_programs: trainingPrograms }),
    });
  }

  getSession(id: string): Promise<SessionState> {
    return request(this.url(`/sessions/${id}`));
  }

  propose(
    id: string,
    kind: ModuleKind,
    operands: string[],
    maxCandidates = 5
  ): Promise<ProposeResponse> {
    return request(this.url(`/sessions/${id}/propose`), {
      method: "POST",
      body: JSON.stringify({ kind, operands, max_candidates: maxCandidates }),
    });
  }

  applyEdge(
    id: string,
    kind: ModuleKind,
    operands: string[],
    chosenCandidate: number,
    maxCandidates = 5
  ): Promise<SessionState> {
    return request<{ state: SessionState }>(this.url(`/sessions/${id}/edges`), {
      method: "POST",
      body: JSON.stringify({
        kind,
        operands,
        chosen_candidate: chosenCandidate,
        max_candidates: maxCandidates,
      }),
    }).then((body) => body.state);
  }

  pin(id: string, targetIndex: number, nodeId: string): Promise<SessionState> {
    return request(this.url(`/sessions/${id}/pin`), {
      method: "POST",
      body: JSON.stringify({ target_index: targetIndex, node_id: nodeId }),
    });
  }

  undo(id: string): Promise<SessionState> {
    return request(this.url(`/sessions/${id}/undo`), { method: "POST" });
  }

  setPhase(id: string, phase: Phase): Promise<SessionState> {
    return request(this.url(`/sessions/${id}/phase`), {
      method: "POST",
      body: JSON.stringify({ phase }),
    });
  }

  exportSession(id: string): Promise<ProgramRecord> {
    return request(this.url(`/sessions/${id}/export`), { method: "POST" });
  }
}
