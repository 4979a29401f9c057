"""JSONL corpus and program persistence, plus a naive sentence segmenter.

Corpus records carry a document (pre-segmented sentence list, or raw text
with ``"segment": true``), an optional reference summary, and an optional
list of extracted sentence indices feeding the extract-and-build pipeline.

Program records store everything needed to replay a searched or authored
program without a backend: the DSL string, a full node dump with per-node
texts and scores, the summary, metrics, timing and the config snapshot.
Sentence indices are 1-based on the wire and 0-based in memory.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import IO, Iterable

from .core import Document, ModuleKind, SPNode, SPTree, SummarizationProgram
from .rouge import MetricTriple


class MalformedLine(ValueError):
    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    document: tuple[str, ...]
    summary: tuple[str, ...] | None = None
    extracted: tuple[int, ...] | None = None  # 0-based sentence indices

    def to_document(self) -> Document:
        return Document(self.id, self.document)


@dataclass
class ProgramRecord:
    id: str
    dsl: str
    nodes: list[dict]  # [{"target_index": i, "root": {...node dump...}}]
    summary: list[str]
    metrics: dict[str, dict[str, float]]
    timing_ms: float = 0.0
    config: dict = field(default_factory=dict)
    faithfulness_annotations: list[dict] | None = None

    def to_program(self, document_id: str | None = None) -> SummarizationProgram:
        trees = tuple(
            SPTree(root=node_from_dict(entry["root"]), target_index=entry["target_index"])
            for entry in self.nodes
        )
        return SummarizationProgram(trees, document_id or self.id)


def node_to_dict(node: SPNode) -> dict:
    out: dict = {
        "kind": node.kind.value if node.kind is not None else "leaf",
        "text": node.text,
        "score": node.score,
    }
    if node.is_leaf:
        out["leaf_id"] = (node.leaf_index + 1) if node.leaf_index is not None else None
    else:
        out["children"] = [node_to_dict(c) for c in node.children]
    return out


def node_from_dict(data: dict) -> SPNode:
    kind = data.get("kind")
    if kind == "leaf":
        leaf_id = data.get("leaf_id")
        if not isinstance(leaf_id, int) or leaf_id < 1:
            raise ValueError(f"bad leaf_id {leaf_id!r}")
        return SPNode.leaf(leaf_id - 1, data.get("text", ""), score=data.get("score"))
    children = tuple(node_from_dict(c) for c in data.get("children", ()))
    return SPNode.internal(
        ModuleKind(kind), children, text=data.get("text", ""), score=data.get("score")
    )


def program_nodes(program: SummarizationProgram) -> list[dict]:
    return [
        {"target_index": tree.target_index, "root": node_to_dict(tree.root)}
        for tree in program.trees
    ]


def metrics_to_dict(metrics: dict[str, MetricTriple]) -> dict[str, dict[str, float]]:
    return {name: triple.as_dict() for name, triple in metrics.items()}


# --- corpus records -----------------------------------------------------------


def _parse_corpus_record(data: dict, line_number: int) -> CorpusRecord:
    record_id = data.get("id")
    if not isinstance(record_id, str) or not record_id:
        raise MalformedLine(line_number, "missing or non-string 'id'")
    document = data.get("document")
    if isinstance(document, str):
        if not data.get("segment"):
            raise MalformedLine(
                line_number, "'document' is raw text but 'segment' flag is not set"
            )
        sentences = segment(document)
    elif isinstance(document, list) and all(isinstance(s, str) for s in document):
        sentences = [s for s in document if s.strip()]
    else:
        raise MalformedLine(line_number, "missing or malformed 'document'")
    if not sentences:
        raise MalformedLine(line_number, "document has no sentences")

    summary = data.get("summary")
    if summary is not None:
        if not isinstance(summary, list) or not all(isinstance(s, str) for s in summary):
            raise MalformedLine(line_number, "'summary' must be a list of sentences")
        summary = tuple(summary)

    extracted = data.get("extracted")
    if extracted is not None:
        if not isinstance(extracted, list) or not all(isinstance(i, int) for i in extracted):
            raise MalformedLine(line_number, "'extracted' must be a list of 1-based indices")
        if any(i < 1 or i > len(sentences) for i in extracted):
            raise MalformedLine(line_number, "'extracted' index outside the document")
        extracted = tuple(i - 1 for i in extracted)

    return CorpusRecord(record_id, tuple(sentences), summary, extracted)


def load_corpus(stream: IO[str]) -> list[CorpusRecord]:
    records: list[CorpusRecord] = []
    seen_ids: set[str] = set()
    for line_number, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_number, f"invalid JSON ({exc.msg})") from exc
        if not isinstance(data, dict):
            raise MalformedLine(line_number, "record must be a JSON object")
        record = _parse_corpus_record(data, line_number)
        if record.id in seen_ids:
            raise MalformedLine(line_number, f"duplicate id {record.id!r}")
        seen_ids.add(record.id)
        records.append(record)
    return records


def save_corpus(records: Iterable[CorpusRecord], stream: IO[str]) -> None:
    for record in records:
        data: dict = {"id": record.id, "document": list(record.document)}
        if record.summary is not None:
            data["summary"] = list(record.summary)
        if record.extracted is not None:
            data["extracted"] = [i + 1 for i in record.extracted]
        stream.write(json.dumps(data, ensure_ascii=False) + "\n")


# --- program records ----------------------------------------------------------

_PROGRAM_KEYS = {
    "id", "dsl", "nodes", "summary", "metrics", "timing_ms", "config",
    "faithfulness_annotations",
}


def save_programs(records: Iterable[ProgramRecord], stream: IO[str]) -> None:
    for record in records:
        data = {
            "id": record.id,
            "dsl": record.dsl,
            "nodes": record.nodes,
            "summary": record.summary,
            "metrics": record.metrics,
            "timing_ms": record.timing_ms,
            "config": record.config,
        }
        if record.faithfulness_annotations is not None:
            data["faithfulness_annotations"] = record.faithfulness_annotations
        stream.write(json.dumps(data, ensure_ascii=False) + "\n")


def load_programs(stream: IO[str]) -> list[ProgramRecord]:
    records: list[ProgramRecord] = []
    for line_number, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_number, f"invalid JSON ({exc.msg})") from exc
        if not isinstance(data, dict):
            raise MalformedLine(line_number, "record must be a JSON object")
        unknown = set(data) - _PROGRAM_KEYS
        if unknown:
            raise MalformedLine(line_number, f"unknown fields {sorted(unknown)}")
        try:
            record = ProgramRecord(
                id=data["id"],
                dsl=data["dsl"],
                nodes=data["nodes"],
                summary=data["summary"],
                metrics=data["metrics"],
                timing_ms=data.get("timing_ms", 0.0),
                config=data.get("config", {}),
                faithfulness_annotations=data.get("faithfulness_annotations"),
            )
        except KeyError as exc:
            raise MalformedLine(line_number, f"missing field {exc.args[0]!r}") from exc
        try:
            record.to_program()
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedLine(line_number, f"node dump does not validate: {exc}") from exc
        records.append(record)
    return records


# --- naive sentence segmentation ------------------------------------------------

_ABBREVIATIONS = {
    "dr", "mr", "mrs", "ms", "prof", "st", "jr", "sr", "inc", "ltd", "co",
    "vs", "etc", "fig", "no", "e.g", "i.e", "u.s", "u.k", "approx", "dept",
}

_BOUNDARY = re.compile(r"(?:(?<=[.?!][\"'])|(?<=[.?!]))\s+(?=[\"'A-Z0-9])")


def segment(raw: str) -> list[str]:
    """Approximate splitting after sentence-final punctuation followed by an
    uppercase letter, digit or quote; common abbreviations never split."""
    raw = raw.strip()
    if not raw:
        return []
    pieces: list[str] = []
    start = 0
    for match in _BOUNDARY.finditer(raw):
        candidate = raw[start : match.start()]
        last_word = candidate.rsplit(None, 1)[-1] if candidate.split() else ""
        if last_word.rstrip(".").lower() in _ABBREVIATIONS:
            continue
        pieces.append(candidate.strip())
        start = match.end()
    tail = raw[start:].strip()
    if tail:
        pieces.append(tail)
    return [p for p in pieces if p]
