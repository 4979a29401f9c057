"""FastAPI app serving the module wire contract.

    POST /v1/modules/execute        {"kind","inputs","max_candidates"} -> {"candidates":[...]}
    POST /v1/modules/execute_batch  {"requests":[...]} -> {"results":[{"candidates":[...]}|{"error":...}]}
    GET  /v1/health                 readiness plus the loaded-model manifest

Schema and arity violations answer 400, model failures 500.
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .batching import ModelWorker
from .config import KINDS, ServerConfig, arity
from .models import ModelError, load_model

REQUEST_TIMEOUT_S = 120.0


class ExecuteRequest(BaseModel):
    kind: Literal["fusion", "compression", "paraphrase"]
    inputs: list[str] = Field(min_length=1, max_length=2)
    max_candidates: int = Field(default=5, ge=1)


class BatchRequest(BaseModel):
    requests: list[ExecuteRequest]


class ArityError(ValueError):
    pass


def _validate(request: ExecuteRequest, config: ServerConfig) -> None:
    expected = arity(request.kind)
    if len(request.inputs) != expected:
        raise ArityError(
            f"{request.kind} takes {expected} input(s), got {len(request.inputs)}"
        )
    if any(not text.strip() for text in request.inputs):
        raise ArityError("inputs must be non-empty sentences")
    if request.max_candidates > config.beam_width:
        raise ArityError(
            f"max_candidates {request.max_candidates} exceeds beam width {config.beam_width}"
        )


def create_app(config: ServerConfig) -> FastAPI:
    workers: dict[str, ModelWorker] = {}

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        for kind in KINDS:
            model = load_model(config.model_spec(kind), config.beam_width, config.device, kind)
            workers[kind] = ModelWorker(model, config.max_batch_size, config.linger_ms)
        app.state.ready = True
        yield
        app.state.ready = False
        for worker in workers.values():
            worker.stop()
        workers.clear()

    app = FastAPI(title="sp-module-server", lifespan=lifespan)
    app.state.ready = False

    @app.exception_handler(RequestValidationError)
    async def schema_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(ArityError)
    async def arity_error(request: Request, exc: ArityError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ModelError)
    async def model_error(request: Request, exc: ModelError):
        return JSONResponse(status_code=500, content={"detail": str(exc)})

    def _run(request: ExecuteRequest) -> list[str]:
        future = workers[request.kind].submit(request.inputs, request.max_candidates)
        candidates = future.result(timeout=REQUEST_TIMEOUT_S)
        if not candidates:
            raise ModelError(f"{request.kind} produced no candidates")
        return candidates

    @app.get("/v1/health")
    def health():
        if not app.state.ready:
            return JSONResponse(
                status_code=503, content={"status": "loading", "models": {}}
            )
        return {
            "status": "ready",
            "models": {kind: config.model_spec(kind) for kind in KINDS},
            "beam_width": config.beam_width,
            "max_batch_size": config.max_batch_size,
            "batches_run": {k: w.batches_run for k, w in workers.items()},
        }

    @app.post("/v1/modules/execute")
    def execute(request: ExecuteRequest):
        _validate(request, config)
        return {"candidates": _run(request)}

    @app.post("/v1/modules/execute_batch")
    def execute_batch(batch: BatchRequest):
        futures = []
        for item in batch.requests:
            try:
                _validate(item, config)
                futures.append(workers[item.kind].submit(item.inputs, item.max_candidates))
            except ArityError as exc:
                futures.append(exc)
        results = []
        for future in futures:
            if isinstance(future, ArityError):
                results.append({"error": str(future)})
                continue
            try:
                candidates = future.result(timeout=REQUEST_TIMEOUT_S)
                if candidates:
                    results.append({"candidates": candidates})
                else:
                    results.append({"error": "no candidates"})
            except Exception as exc:
                results.append({"error": str(exc)})
        return {"results": results}

    return app


def main() -> None:
    import uvicorn

    config = ServerConfig.from_env()
    uvicorn.run(create_app(config), host="0.0.0.0", port=config.port)


if __name__ == "__main__":
    main()
