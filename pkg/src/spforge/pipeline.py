"""Corpus-level orchestration shared by the CLI and the HTTP service."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from .backends import ModuleBackend
from .baselines import StructureDistribution, random_program
from .core import SummaryTarget
from .corpus import CorpusRecord, ProgramRecord, metrics_to_dict, program_nodes
from .dsl import serialize
from .executor import ExecutionConfig, execute_skeleton
from .search import SearchConfig, SearchResult, sp_search


def result_to_record(
    record: CorpusRecord, result: SearchResult, config: SearchConfig
) -> ProgramRecord:
    return ProgramRecord(
        id=record.id,
        dsl=serialize(result.program),
        nodes=program_nodes(result.program),
        summary=[tree.root.text for tree in result.program.trees],
        metrics=metrics_to_dict(result.summary_metrics),
        timing_ms=result.total_ms,
        config=config.as_dict(),
    )


def search_record(
    record: CorpusRecord, config: SearchConfig, backend: ModuleBackend
) -> ProgramRecord:
    if record.summary is None:
        raise ValueError(f"record {record.id!r} has no reference summary to search against")
    result = sp_search(record.to_document(), SummaryTarget(record.summary), config, backend)
    return result_to_record(record, result, config)


def search_corpus(
    records: Sequence[CorpusRecord],
    config: SearchConfig,
    backend: ModuleBackend,
    parallel: int = 1,
) -> list[ProgramRecord]:
    """Search every record; examples are independent, so they may run on a
    thread pool (the backend is the only shared resource)."""
    if parallel <= 1:
        return [search_record(r, config, backend) for r in records]
    with ThreadPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(lambda r: search_record(r, config, backend), records))


def random_baseline(
    records: Sequence[CorpusRecord],
    backend: ModuleBackend,
    seed: int,
    extract_and_build: bool = False,
    dist: StructureDistribution | None = None,
    max_candidates: int = 5,
) -> list[list[str]]:
    """Random-program summaries: leaves drawn from the whole document (joint)
    or from each record's extracted set (extract-and-build)."""
    dist = dist or StructureDistribution.shipped_default()
    outputs: list[list[str]] = []
    config = ExecutionConfig(max_candidates=max_candidates, selection="top1")
    for index, record in enumerate(records):
        doc = record.to_document()
        if extract_and_build:
            if not record.extracted:
                raise ValueError(f"record {record.id!r} has no extracted sentence set")
            pool = list(record.extracted)
        else:
            pool = list(range(len(doc.sentences)))
        usable = dist.restrict(len(pool))
        skeleton = random_program(doc, pool, usable, f"{seed}:{record.id}:{index}")
        _, summary = execute_skeleton(skeleton, doc, backend, config)
        outputs.append(summary)
    return outputs
