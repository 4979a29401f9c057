"""Pydantic request/response models for the HTTP service.

Sentence indices are 1-based everywhere on the wire.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

from ..corpus import CorpusRecord, ProgramRecord, segment
from ..search import SearchConfig


class CorpusRecordModel(BaseModel):
    id: str
    document: Union[list[str], str]
    summary: Optional[list[str]] = None
    extracted: Optional[list[int]] = None  # 1-based
    segment: bool = False

    def to_record(self) -> CorpusRecord:
        if isinstance(self.document, str):
            sentences = tuple(segment(self.document))
        else:
            sentences = tuple(s for s in self.document if s.strip())
        if not sentences:
            raise ValueError("document has no sentences")
        extracted = None
        if self.extracted is not None:
            if any(i < 1 or i > len(sentences) for i in self.extracted):
                raise ValueError("extracted index outside the document")
            extracted = tuple(i - 1 for i in self.extracted)
        summary = tuple(self.summary) if self.summary else None
        return CorpusRecord(self.id, sentences, summary, extracted)


class SearchConfigModel(BaseModel):
    k: int = 4
    queue_size: int = Field(default=20, ge=1)
    max_height: int = Field(default=2, ge=0)
    max_candidates: int = Field(default=5, ge=1)
    metric: Literal["rougeL", "rouge1", "rouge2"] = "rougeL"
    strict_improvement: bool = True
    rule4_literal: bool = False

    def to_config(self) -> SearchConfig:
        return SearchConfig(
            k=self.k,
            queue_size=self.queue_size,
            max_height=self.max_height,
            max_candidates=self.max_candidates,
            metric=self.metric,
            strict_improvement=self.strict_improvement,
            rule4_literal=self.rule4_literal,
        )


class ProgramRecordModel(BaseModel):
    id: str
    dsl: str
    nodes: list[dict]
    summary: list[str]
    metrics: dict[str, dict[str, float]]
    timing_ms: float = 0.0
    config: dict = Field(default_factory=dict)
    faithfulness_annotations: Optional[list[dict]] = None

    @staticmethod
    def from_record(record: ProgramRecord) -> "ProgramRecordModel":
        return ProgramRecordModel(
            id=record.id,
            dsl=record.dsl,
            nodes=record.nodes,
            summary=record.summary,
            metrics=record.metrics,
            timing_ms=record.timing_ms,
            config=record.config,
            faithfulness_annotations=record.faithfulness_annotations,
        )


class SearchRequest(BaseModel):
    record: CorpusRecordModel
    config: SearchConfigModel = Field(default_factory=SearchConfigModel)


class ExecuteProgramRequest(BaseModel):
    document: list[str]
    dsl: str
    document_id: str = "doc"
    max_candidates: int = Field(default=5, ge=1)
    target: Optional[list[str]] = None  # enables best-vs-target selection


class ExecuteProgramResponse(BaseModel):
    summary: list[str]
    nodes: list[dict]


class ValidateRequest(BaseModel):
    dsl: str
    doc_size: int = Field(ge=1)


class DiagnosticModel(BaseModel):
    code: str
    position: int
    message: str


class ValidateResponse(BaseModel):
    diagnostics: list[DiagnosticModel]


class RougeRequest(BaseModel):
    candidate: Union[str, list[str]]
    reference: Union[str, list[str]]

    def sentence_lists(self) -> tuple[list[str], list[str]]:
        cand = [self.candidate] if isinstance(self.candidate, str) else list(self.candidate)
        ref = [self.reference] if isinstance(self.reference, str) else list(self.reference)
        return cand, ref


class TripleModel(BaseModel):
    precision: float
    recall: float
    f1: float


class RougeResponse(BaseModel):
    rouge1: TripleModel
    rouge2: TripleModel
    rougeL: TripleModel
    rougeLsum: TripleModel


class ModuleExecuteRequest(BaseModel):
    kind: Literal["fusion", "compression", "paraphrase"]
    inputs: list[str] = Field(min_length=1, max_length=2)
    max_candidates: int = Field(default=5, ge=1)


class ModuleExecuteResponse(BaseModel):
    candidates: list[str]


class ModuleBatchRequest(BaseModel):
    requests: list[ModuleExecuteRequest]


class ModuleBatchResponse(BaseModel):
    results: list[dict]  # {"candidates": [...]} or {"error": "..."}


class CreateSessionRequest(BaseModel):
    record: CorpusRecordModel
    phase: Literal["pre_training", "training", "post_training"] = "pre_training"
    training_programs: list[dict] = Field(default_factory=list)


class SessionNodeModel(BaseModel):
    id: str
    text: str
    kind: Optional[str]
    children: list[str]
    sources: list[int]  # 1-based document sentence ids
    height: int
    consumed: bool
    pinned_at: Optional[int] = None
    scores: Optional[list[float]] = None  # vs each summary sentence


class SessionStateResponse(BaseModel):
    id: str
    phase: str
    document: list[str]
    summary: Optional[list[str]]
    nodes: list[SessionNodeModel]
    pins: dict[int, str]
    summary_metrics: Optional[dict[str, dict[str, float]]] = None
    training_programs: Optional[list[dict]] = None
    events: list[dict] = Field(default_factory=list)


class ProposeEdgeRequest(BaseModel):
    kind: Literal["fusion", "compression", "paraphrase"]
    operands: list[str] = Field(min_length=1, max_length=2)
    max_candidates: int = Field(default=5, ge=1)


class ProposeEdgeResponse(BaseModel):
    candidates: list[str]
    scores: list[list[float]]  # per candidate, per summary sentence


class RecordEdgeRequest(BaseModel):
    kind: Literal["fusion", "compression", "paraphrase"]
    operands: list[str] = Field(min_length=1, max_length=2)
    chosen_candidate: int = Field(ge=0)
    max_candidates: int = Field(default=5, ge=1)


class RecordEdgeResponse(BaseModel):
    node: SessionNodeModel
    state: SessionStateResponse


class PinRequest(BaseModel):
    target_index: int = Field(ge=0)
    node_id: str


class PhaseRequest(BaseModel):
    phase: Literal["pre_training", "training", "post_training"]


class HealthResponse(BaseModel):
    status: str
    backend: str
    version: str
