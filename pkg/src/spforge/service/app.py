"""FastAPI service wrapping the core package.

Stateless endpoints (search, execute, validate, rouge, modules) are pure
over their inputs; session endpoints serialize per-session through a
single-writer lock. Schema violations answer 400, unknown ids 404, and an
unreachable module backend 502.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import __version__
from ..backends import BackendUnavailable, EmptyGeneration, ModuleBackend, ModuleRequest, ReferenceBackend
from ..core import Document, ModuleKind, SummaryTarget
from ..dsl import ParseError, check_wellformed, parse
from ..executor import ExecutionConfig, execute_skeleton
from ..pipeline import search_record
from ..rouge import rouge_suite
from ..corpus import program_nodes
from ..sessions import (
    InadmissibleEdge,
    Session,
    SessionStore,
    export_session,
    propose_edge,
    record_edge,
    root_scores,
)
from ..search import sentence_scorer
from .schemas import (
    CreateSessionRequest,
    DiagnosticModel,
    ExecuteProgramRequest,
    ExecuteProgramResponse,
    HealthResponse,
    ModuleBatchRequest,
    ModuleBatchResponse,
    ModuleExecuteRequest,
    ModuleExecuteResponse,
    PhaseRequest,
    PinRequest,
    ProgramRecordModel,
    ProposeEdgeRequest,
    ProposeEdgeResponse,
    RecordEdgeRequest,
    RecordEdgeResponse,
    RougeRequest,
    RougeResponse,
    SearchRequest,
    SessionNodeModel,
    SessionStateResponse,
    TripleModel,
    ValidateRequest,
    ValidateResponse,
)


def _session_state(session: Session) -> SessionStateResponse:
    pinned_by_node = {node_id: idx for idx, node_id in session.pins.items()}
    badge_scores = root_scores(session)
    nodes = []
    for node in session.nodes.values():
        nodes.append(
            SessionNodeModel(
                id=node.id,
                text=node.text,
                kind=node.kind.value if node.kind else None,
                children=list(node.children),
                sources=[i + 1 for i in sorted(node.source_set)],
                height=node.height,
                consumed=node.id in session.consumed,
                pinned_at=pinned_by_node.get(node.id),
                scores=badge_scores.get(node.id),
            )
        )
    summary_metrics = None
    if session.record.summary is not None and session.pins:
        indices = sorted(session.pins)
        if indices == list(range(len(session.record.summary))):
            candidate = [session.node(session.pins[i]).text for i in indices]
            summary_metrics = {
                name: triple.as_dict()
                for name, triple in rouge_suite(
                    candidate, list(session.record.summary)
                ).items()
            }
    return SessionStateResponse(
        id=session.id,
        phase=session.phase,
        document=list(session.record.document),
        summary=list(session.record.summary) if session.record.summary else None,
        nodes=nodes,
        pins=dict(session.pins),
        summary_metrics=summary_metrics,
        training_programs=session.training_programs if session.phase == "training" else None,
        events=list(session.events),
    )


def create_app(
    backend: ModuleBackend | None = None,
    data_dir: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    backend = backend or ReferenceBackend()
    if data_dir is None:
        data_dir = Path(tempfile.mkdtemp(prefix="spforge-"))
    store = SessionStore(data_dir)

    app = FastAPI(title="spforge", version=__version__)
    app.state.backend = backend
    app.state.store = store

    @app.exception_handler(RequestValidationError)
    async def schema_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(BackendUnavailable)
    async def backend_error(request: Request, exc: BackendUnavailable):
        return JSONResponse(status_code=502, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        detail: object = str(exc)
        if isinstance(exc, ParseError):
            detail = [vars(d) for d in exc.diagnostics]
        if isinstance(exc, InadmissibleEdge):
            return JSONResponse(
                status_code=400, content={"detail": str(exc), "rule": exc.rule}
            )
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.exception_handler(KeyError)
    async def missing_error(request: Request, exc: KeyError):
        return JSONResponse(status_code=404, content={"detail": f"unknown id {exc.args[0]!r}"})

    @app.get("/v1/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(
            status="ok", backend=type(backend).__name__, version=__version__
        )

    @app.post("/v1/search", response_model=ProgramRecordModel)
    def search(request: SearchRequest) -> ProgramRecordModel:
        record = request.record.to_record()
        program = search_record(record, request.config.to_config(), backend)
        return ProgramRecordModel.from_record(program)

    @app.post("/v1/programs/execute", response_model=ExecuteProgramResponse)
    def execute_program(request: ExecuteProgramRequest) -> ExecuteProgramResponse:
        doc = Document(request.document_id, tuple(request.document))
        skeleton = parse(request.dsl, len(doc.sentences))
        target = SummaryTarget(tuple(request.target)) if request.target else None
        config = ExecutionConfig(
            max_candidates=request.max_candidates,
            selection="best_vs_target" if target else "top1",
        )
        program, summary = execute_skeleton(skeleton, doc, backend, config, target)
        return ExecuteProgramResponse(summary=summary, nodes=program_nodes(program))

    @app.post("/v1/programs/validate", response_model=ValidateResponse)
    def validate_program(request: ValidateRequest) -> ValidateResponse:
        diagnostics = check_wellformed(request.dsl, request.doc_size)
        return ValidateResponse(
            diagnostics=[
                DiagnosticModel(code=d.code, position=d.position, message=d.message)
                for d in diagnostics
            ]
        )

    @app.post("/v1/rouge", response_model=RougeResponse)
    def rouge(request: RougeRequest) -> RougeResponse:
        candidate, reference = request.sentence_lists()
        suite = rouge_suite(candidate, reference)
        return RougeResponse(
            **{name: TripleModel(**triple.as_dict()) for name, triple in suite.items()}
        )

    @app.post("/v1/modules/execute", response_model=ModuleExecuteResponse)
    def modules_execute(request: ModuleExecuteRequest) -> ModuleExecuteResponse:
        module_request = ModuleRequest(
            ModuleKind(request.kind), tuple(request.inputs), request.max_candidates
        )
        try:
            result = backend.execute(module_request)
        except EmptyGeneration as exc:
            raise ValueError(str(exc)) from exc
        return ModuleExecuteResponse(candidates=list(result.candidates))

    @app.post("/v1/modules/execute_batch", response_model=ModuleBatchResponse)
    def modules_execute_batch(request: ModuleBatchRequest) -> ModuleBatchResponse:
        module_requests = [
            ModuleRequest(ModuleKind(r.kind), tuple(r.inputs), r.max_candidates)
            for r in request.requests
        ]
        results = backend.execute_batch(module_requests)
        payload = [
            {"candidates": list(r.candidates)} if r is not None else {"error": "empty generation"}
            for r in results
        ]
        return ModuleBatchResponse(results=payload)

    # -- sessions ---------------------------------------------------------

    @app.post("/v1/sessions", response_model=SessionStateResponse)
    def create_session(request: CreateSessionRequest) -> SessionStateResponse:
        record = request.record.to_record()
        session = store.create(record, request.phase, request.training_programs)
        return _session_state(session)

    @app.get("/v1/sessions/{session_id}", response_model=SessionStateResponse)
    def get_session(session_id: str) -> SessionStateResponse:
        return _session_state(store.get(session_id))

    @app.post("/v1/sessions/{session_id}/propose", response_model=ProposeEdgeResponse)
    def propose(session_id: str, request: ProposeEdgeRequest) -> ProposeEdgeResponse:
        session = store.get(session_id)
        with store.lock(session_id):
            candidates = propose_edge(
                session, ModuleKind(request.kind), request.operands, backend,
                request.max_candidates,
            )
        scores: list[list[float]] = []
        if session.record.summary is not None:
            scorers = [sentence_scorer("rougeL", s) for s in session.record.summary]
            scores = [[scorer(c) for scorer in scorers] for c in candidates]
        return ProposeEdgeResponse(candidates=candidates, scores=scores)

    @app.post("/v1/sessions/{session_id}/edges", response_model=RecordEdgeResponse)
    def add_edge(session_id: str, request: RecordEdgeRequest) -> RecordEdgeResponse:
        session = store.get(session_id)
        with store.lock(session_id):
            node = record_edge(
                session,
                ModuleKind(request.kind),
                request.operands,
                request.chosen_candidate,
                backend,
                request.max_candidates,
            )
            store.append_event(session_id, session.events[-1])
        state = _session_state(session)
        node_model = next(n for n in state.nodes if n.id == node.id)
        return RecordEdgeResponse(node=node_model, state=state)

    @app.post("/v1/sessions/{session_id}/pin", response_model=SessionStateResponse)
    def pin(session_id: str, request: PinRequest) -> SessionStateResponse:
        session = store.get(session_id)
        with store.lock(session_id):
            event = {"type": "pin", "target_index": request.target_index, "node_id": request.node_id}
            session.apply_event(event)
            store.append_event(session_id, event)
        return _session_state(session)

    @app.post("/v1/sessions/{session_id}/undo", response_model=SessionStateResponse)
    def undo(session_id: str) -> SessionStateResponse:
        session = store.get(session_id)
        with store.lock(session_id):
            event = {"type": "undo"}
            session.apply_event(event)
            store.append_event(session_id, event)
        return _session_state(session)

    @app.post("/v1/sessions/{session_id}/phase", response_model=SessionStateResponse)
    def set_phase(session_id: str, request: PhaseRequest) -> SessionStateResponse:
        session = store.get(session_id)
        with store.lock(session_id):
            event = {"type": "phase", "phase": request.phase}
            session.apply_event(event)
            store.append_event(session_id, event)
        return _session_state(session)

    @app.post("/v1/sessions/{session_id}/export", response_model=ProgramRecordModel)
    def export(session_id: str) -> ProgramRecordModel:
        session = store.get(session_id)
        with store.lock(session_id):
            record = export_session(session)
        return ProgramRecordModel.from_record(record)

    ui_path = Path(ui_dir) if ui_dir else None
    if ui_path and ui_path.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_path), html=True), name="ui")

    return app
