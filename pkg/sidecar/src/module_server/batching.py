"""Micro-batching: one worker thread per model, collecting concurrent
requests into batches before each forward pass."""

from __future__ import annotations

import queue
import threading
import time
from concurrent.futures import Future
from dataclasses import dataclass, field
from typing import Sequence

from .models import TextOpModel

_STOP = object()


@dataclass
class _Job:
    inputs: tuple[str, ...]
    max_candidates: int
    future: Future = field(default_factory=Future)


class ModelWorker:
    """Serializes access to one model; callers block on a future.

    The worker drains its queue up to `max_batch` items, lingering briefly
    for stragglers so concurrent callers share a forward pass.
    """

    def __init__(self, model: TextOpModel, max_batch: int = 8, linger_ms: float = 5.0):
        self.model = model
        self.max_batch = max_batch
        self.linger_s = linger_ms / 1000.0
        self._queue: queue.Queue = queue.Queue()
        self._thread = threading.Thread(target=self._loop, daemon=True)
        self._thread.start()
        self.batches_run = 0
        self.items_served = 0

    def submit(self, inputs: Sequence[str], max_candidates: int) -> Future:
        job = _Job(tuple(inputs), max_candidates)
        self._queue.put(job)
        return job.future

    def stop(self) -> None:
        self._queue.put(_STOP)
        self._thread.join(timeout=2.0)

    def _collect(self) -> list[_Job] | None:
        head = self._queue.get()
        if head is _STOP:
            return None
        batch = [head]
        deadline = time.monotonic() + self.linger_s
        while len(batch) < self.max_batch:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                break
            try:
                item = self._queue.get(timeout=remaining)
            except queue.Empty:
                break
            if item is _STOP:
                self._queue.put(_STOP)  # re-deliver for the outer loop
                break
            batch.append(item)
        return batch

    def _loop(self) -> None:
        while True:
            batch = self._collect()
            if batch is None:
                return
            budget = max(job.max_candidates for job in batch)
            try:
                results = self.model.generate([job.inputs for job in batch], budget)
            except Exception as exc:
                for job in batch:
                    job.future.set_exception(exc)
                continue
            self.batches_run += 1
            self.items_served += len(batch)
            for job, candidates in zip(batch, results):
                job.future.set_result(list(candidates[: job.max_candidates]))
