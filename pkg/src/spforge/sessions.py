"""Event-sourced sessions for interactive, edge-at-a-time program building.

A session starts from a corpus record: every document sentence becomes an
available leaf node. Each recorded edge executes one module over existing
nodes, and the chosen candidate becomes a new root in the working forest.
Roots get pinned to summary-sentence positions; exporting turns the pinned
forest into a program record.

Events are appended to one JSONL file per session (ids are UUIDs) and carry
the generated text, so replaying a log rebuilds the exact working state
without a backend. Undo is itself an event; the fold interprets it by
dropping the most recent surviving event, which keeps the on-disk log an
append-only audit trail.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .backends import ModuleBackend, ModuleRequest
from .core import ModuleKind, SPNode, SPTree, SummarizationProgram
from .corpus import CorpusRecord, metrics_to_dict, program_nodes, ProgramRecord
from .dsl import serialize
from .rouge import rouge_suite, sentence_scorer
from .search import check_admissible

PHASES = ("pre_training", "training", "post_training")


class InadmissibleEdge(ValueError):
    def __init__(self, rule: str, message: str):
        self.rule = rule
        super().__init__(message)


class UnknownNode(KeyError):
    pass


@dataclass(frozen=True)
class SessionNode:
    id: str
    text: str
    kind: ModuleKind | None
    children: tuple[str, ...]
    source_set: frozenset[int]
    height: int

    @property
    def is_leaf(self) -> bool:
        return self.kind is None


@dataclass
class Session:
    id: str
    record: CorpusRecord
    phase: str = "pre_training"
    initial_phase: str = "pre_training"
    training_programs: list[dict] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    nodes: dict[str, SessionNode] = field(default_factory=dict)
    consumed: set[str] = field(default_factory=set)
    pins: dict[int, str] = field(default_factory=dict)
    _next_node: int = 1

    def __post_init__(self) -> None:
        for i, sentence in enumerate(self.record.document):
            node_id = f"D{i + 1}"
            self.nodes[node_id] = SessionNode(
                id=node_id,
                text=sentence,
                kind=None,
                children=(),
                source_set=frozenset({i}),
                height=0,
            )

    # -- queries ---------------------------------------------------------

    def node(self, node_id: str) -> SessionNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def available(self, node_id: str) -> bool:
        """Usable as an operand: exists, not consumed, not pinned."""
        if node_id not in self.nodes:
            return False
        if node_id in self.consumed:
            return False
        return node_id not in self.pins.values()

    def roots(self) -> list[SessionNode]:
        return [
            node
            for node_id, node in self.nodes.items()
            if not node.is_leaf and node_id not in self.consumed
        ]

    def check_edge(self, kind: ModuleKind, operand_ids: list[str]) -> None:
        if len(operand_ids) != kind.arity:
            raise InadmissibleEdge(
                "arity", f"{kind.value} takes {kind.arity} operand(s), got {len(operand_ids)}"
            )
        for node_id in operand_ids:
            self.node(node_id)
            if not self.available(node_id):
                raise InadmissibleEdge(
                    "consumed", f"node {node_id} is already part of a tree or pinned"
                )
        if len(set(operand_ids)) != len(operand_ids):
            raise InadmissibleEdge("rule3:duplicate-document-sentence", "operands must differ")
        # check_admissible only inspects kind / is_leaf / source_set, which
        # SessionNode provides just like SPNode does.
        s1 = self.node(operand_ids[0])
        s2 = self.node(operand_ids[1]) if kind.arity == 2 else None
        rule = check_admissible(kind, s1, s2)
        if rule is not None:
            raise InadmissibleEdge(rule, f"edge violates {rule}")

    # -- event application -------------------------------------------------

    def apply_event(self, event: dict) -> SessionNode | None:
        kind = event["type"]
        if kind == "edge":
            module = ModuleKind(event["kind"])
            operands = list(event["operands"])
            self.check_edge(module, operands)
            children = [self.node(i) for i in operands]
            sources = frozenset().union(*(c.source_set for c in children))
            node = SessionNode(
                id=event["node_id"],
                text=event["text"],
                kind=module,
                children=tuple(operands),
                source_set=sources,
                height=1 + max(c.height for c in children),
            )
            self.nodes[node.id] = node
            for child in children:
                if not child.is_leaf:
                    self.consumed.add(child.id)
            number = int(node.id[1:]) if node.id[1:].isdigit() else self._next_node
            self._next_node = max(self._next_node, number + 1)
            self.events.append(event)
            return node
        if kind == "pin":
            node_id = event["node_id"]
            self.node(node_id)
            if node_id in self.consumed:
                raise InadmissibleEdge("consumed", f"{node_id} is inside another tree")
            self.pins[int(event["target_index"])] = node_id
            self.events.append(event)
            return None
        if kind == "phase":
            phase = event["phase"]
            if phase not in PHASES:
                raise ValueError(f"unknown phase {phase!r}")
            self.phase = phase
            self.events.append(event)
            return None
        if kind == "undo":
            self.events.append(event)
            rebuilt = replay(
                self.id, self.record, self.events, self.training_programs, self.initial_phase
            )
            self.nodes = rebuilt.nodes
            self.consumed = rebuilt.consumed
            self.pins = rebuilt.pins
            self.phase = rebuilt.phase
            self._next_node = rebuilt._next_node
            return None
        raise ValueError(f"unknown event type {kind!r}")

    def next_node_id(self) -> str:
        return f"N{self._next_node}"

    # -- views -------------------------------------------------------------

    def to_spnode(self, node_id: str, scorer=None) -> SPNode:
        node = self.node(node_id)
        score = scorer(node.text) if scorer else None
        if node.is_leaf:
            return SPNode.leaf(min(node.source_set), node.text, score=score)
        children = tuple(self.to_spnode(c, scorer) for c in node.children)
        return SPNode.internal(node.kind, children, text=node.text, score=score)


def replay(
    session_id: str,
    record: CorpusRecord,
    events: list[dict],
    training_programs: list[dict] | None = None,
    initial_phase: str = "pre_training",
) -> Session:
    """Fold an event log into a fresh session; undo drops the latest
    surviving event."""
    effective: list[dict] = []
    for event in events:
        if event.get("type") == "undo":
            if effective:
                effective.pop()
        else:
            effective.append(event)
    session = Session(
        session_id,
        record,
        phase=initial_phase,
        initial_phase=initial_phase,
        training_programs=list(training_programs or []),
    )
    for event in effective:
        session.apply_event(event)
    return session


def propose_edge(
    session: Session,
    kind: ModuleKind,
    operand_ids: list[str],
    backend: ModuleBackend,
    max_candidates: int = 5,
) -> list[str]:
    """Candidate texts for an edge without recording anything."""
    session.check_edge(kind, operand_ids)
    inputs = tuple(session.node(i).text for i in operand_ids)
    result = backend.execute(ModuleRequest(kind, inputs, max_candidates=max_candidates))
    return list(result.candidates)


def record_edge(
    session: Session,
    kind: ModuleKind,
    operand_ids: list[str],
    chosen_candidate: int,
    backend: ModuleBackend,
    max_candidates: int = 5,
) -> SessionNode:
    """Execute the edge, keep the chosen candidate as a new node, append the
    event."""
    candidates = propose_edge(session, kind, operand_ids, backend, max_candidates)
    if not 0 <= chosen_candidate < len(candidates):
        raise IndexError(
            f"chosen candidate {chosen_candidate} outside 0..{len(candidates) - 1}"
        )
    event = {
        "type": "edge",
        "kind": kind.value,
        "operands": list(operand_ids),
        "chosen": chosen_candidate,
        "node_id": session.next_node_id(),
        "text": candidates[chosen_candidate],
    }
    node = session.apply_event(event)
    assert node is not None
    return node


def root_scores(session: Session, metric: str = "rougeL") -> dict[str, list[float]]:
    """Each unconsumed generated node scored against every summary sentence."""
    if session.record.summary is None:
        return {}
    scorers = [sentence_scorer(metric, s) for s in session.record.summary]
    return {
        node.id: [scorer(node.text) for scorer in scorers] for node in session.roots()
    }


def export_session(session: Session, metric: str = "rougeL") -> ProgramRecord:
    """Pinned forest -> program record with DSL, node dump and metrics."""
    if not session.pins:
        raise ValueError("nothing pinned; pin a root per summary sentence first")
    expected = sorted(session.pins)
    if expected != list(range(len(expected))):
        raise ValueError(f"pinned positions {expected} are not contiguous from 0")
    if session.record.summary is not None and len(expected) != len(session.record.summary):
        raise ValueError(
            f"{len(expected)} pinned of {len(session.record.summary)} summary sentences"
        )
    trees = []
    for target_index in expected:
        scorer = None
        if session.record.summary is not None:
            scorer = sentence_scorer(metric, session.record.summary[target_index])
        root = session.to_spnode(session.pins[target_index], scorer)
        trees.append(SPTree(root=root, target_index=target_index))
    program = SummarizationProgram(tuple(trees), session.record.id)
    summary = [t.root.text for t in trees]
    if session.record.summary is not None:
        metrics = metrics_to_dict(rouge_suite(summary, list(session.record.summary)))
    else:
        metrics = {}
    return ProgramRecord(
        id=session.record.id,
        dsl=serialize(program),
        nodes=program_nodes(program),
        summary=summary,
        metrics=metrics,
        timing_ms=0.0,
        config={"session_id": session.id, "metric": metric},
    )


class SessionStore:
    """JSONL-per-session persistence with single-writer locking."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir) / "sessions"
        self.root.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.jsonl"

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(
        self,
        record: CorpusRecord,
        phase: str = "pre_training",
        training_programs: list[dict] | None = None,
    ) -> Session:
        if phase not in PHASES:
            raise ValueError(f"unknown phase {phase!r}")
        session_id = str(uuid.uuid4())
        session = Session(
            session_id,
            record,
            phase=phase,
            initial_phase=phase,
            training_programs=list(training_programs or []),
        )
        header = {
            "type": "created",
            "id": session_id,
            "phase": phase,
            "record": {
                "id": record.id,
                "document": list(record.document),
                "summary": list(record.summary) if record.summary is not None else None,
                "extracted": [i + 1 for i in record.extracted] if record.extracted else None,
            },
            "training_programs": session.training_programs,
        }
        with self.lock(session_id):
            with self._path(session_id).open("w", encoding="utf-8") as handle:
                handle.write(json.dumps(header, ensure_ascii=False) + "\n")
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self.lock(session_id):
            if session_id in self._sessions:
                return self._sessions[session_id]
            path = self._path(session_id)
            if not path.exists():
                raise KeyError(session_id)
            with path.open("r", encoding="utf-8") as handle:
                lines = [json.loads(line) for line in handle if line.strip()]
            header, events = lines[0], lines[1:]
            record_data = header["record"]
            record = CorpusRecord(
                id=record_data["id"],
                document=tuple(record_data["document"]),
                summary=tuple(record_data["summary"]) if record_data.get("summary") else None,
                extracted=tuple(i - 1 for i in record_data["extracted"])
                if record_data.get("extracted")
                else None,
            )
            session = replay(
                session_id,
                record,
                events,
                header.get("training_programs"),
                header.get("phase", "pre_training"),
            )
            self._sessions[session_id] = session
            return session

    def append_event(self, session_id: str, event: dict) -> None:
        with self._path(session_id).open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event, ensure_ascii=False) + "\n")
