"""Best-first search for oracle summarization programs.

Each summary sentence is searched independently: starting from the top-k
document sentences (ranked by unigram overlap with the whole summary), the
engine enqueues every admissible operation, processes the queue in
whole-height waves (rank by score, truncate to the queue bound, batch
execute), keeps a generated sentence only when it strictly improves on its
operands, and finally returns the best-scoring node as the tree root.

An item's priority is the maximum of its operands' metric scores against the
target sentence; the height field only breaks ties and enforces the height
cap. Admissibility filters:

    rule1  an output of compression is not compressed again
    rule2  an output of paraphrase is not paraphrased again
    rule3  fusing would duplicate a document sentence within the tree
    rule4  operands are intermediates with overlapping sources
    rule5  fusion operands must respect document order (by min source index)

rule4 defaults to requiring fully disjoint source sets; `rule4_literal`
relaxes it to blocking only intermediates derived from one identical
sentence set.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Sequence

from .backends import ModuleBackend, ModuleRequest
from .core import (
    Document,
    ModuleKind,
    SPNode,
    SPTree,
    SummarizationProgram,
    SummaryTarget,
)
from .rouge import (
    DEFAULT_TOKENIZER,
    MetricTriple,
    TokenizerConfig,
    rouge_suite,
    sentence_scorer,
    unigram_overlap_fraction,
)

UNBOUNDED_QUEUE = 10**9


@dataclass(frozen=True)
class SearchConfig:
    k: int = 4  # initial document sentences
    queue_size: int = 20  # Q: items kept per wave after pruning
    max_height: int = 2  # H: tallest tree the search may build
    max_candidates: int = 5  # G: generations requested per module call
    metric: str = "rougeL"  # optimized sentence metric (F measure)
    strict_improvement: bool = True
    rule4_literal: bool = False
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER

    def __post_init__(self) -> None:
        if self.k < 1 or self.queue_size < 1 or self.max_candidates < 1:
            raise ValueError("k, queue_size and max_candidates must be >= 1")
        if self.max_height < 0:
            raise ValueError("max_height must be >= 0")

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "queue_size": self.queue_size,
            "max_height": self.max_height,
            "max_candidates": self.max_candidates,
            "metric": self.metric,
            "strict_improvement": self.strict_improvement,
            "rule4_literal": self.rule4_literal,
        }


@dataclass(frozen=True)
class QueueItem:
    """A pending module application: operands, kind, resulting height, priority."""

    s1: SPNode
    s2: SPNode | None
    kind: ModuleKind
    h: int
    score: float
    seq: int  # insertion order, breaks remaining ties

    def describe(self) -> dict:
        return {
            "kind": self.kind.value,
            "s1": self.s1.text,
            "s2": self.s2.text if self.s2 is not None else None,
            "h": self.h,
            "score": self.score,
        }


def check_admissible(
    kind: ModuleKind,
    s1: SPNode,
    s2: SPNode | None = None,
    rule4_literal: bool = False,
) -> str | None:
    """None when the application is allowed, else the tag of the rule it breaks."""
    if kind is ModuleKind.COMPRESSION and s1.kind is ModuleKind.COMPRESSION:
        return "rule1:recompression"
    if kind is ModuleKind.PARAPHRASE and s1.kind is ModuleKind.PARAPHRASE:
        return "rule2:reparaphrase"
    if kind is ModuleKind.FUSION:
        if s2 is None:
            return "rule3:missing-operand"
        overlapping = bool(s1.source_set & s2.source_set)
        if overlapping and (s1.is_leaf or s2.is_leaf):
            return "rule3:duplicate-document-sentence"
        if not s1.is_leaf and not s2.is_leaf:
            if rule4_literal:
                if s1.source_set == s2.source_set:
                    return "rule4:same-source-intermediates"
            elif overlapping:
                return "rule4:overlapping-sources"
        if min(s1.source_set) >= min(s2.source_set):
            return "rule5:temporal-order"
    return None


def admissible(item: QueueItem, rule4_literal: bool = False) -> tuple[bool, str | None]:
    reason = check_admissible(item.kind, item.s1, item.s2, rule4_literal)
    return reason is None, reason


def score_item(s1_score: float, s2_score: float | None) -> float:
    """Priority of a pending application: max of its operands' metric values."""
    if s2_score is None:
        return s1_score
    return max(s1_score, s2_score)


def select_top_k(
    doc: Document,
    summary: SummaryTarget,
    k: int,
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
) -> list[int]:
    """Indices of the k sentences with the highest unigram overlap against the
    whole summary, returned in document order; ties keep document order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    summary_text = summary.text
    scored = [
        (unigram_overlap_fraction(sentence, summary_text, tokenizer), i)
        for i, sentence in enumerate(doc.sentences)
    ]
    chosen = sorted(scored, key=lambda pair: (-pair[0], pair[1]))[:k]
    return sorted(i for _, i in chosen)


# --- trace records -----------------------------------------------------------


@dataclass
class GenerationRecord:
    item: dict
    text: str | None
    metric: float | None
    retained: bool
    reason: str  # retained | not-improving | duplicate-text | empty-generation


@dataclass
class WaveRecord:
    height: int
    queue_before: list[dict]
    queue_after: list[dict]
    generated: list[GenerationRecord]
    best_updates: list[dict]
    elapsed_ms: float = 0.0


@dataclass
class SearchTrace:
    target: str
    leaf_scores: list[dict]
    waves: list[WaveRecord] = field(default_factory=list)
    total_ms: float = 0.0
    suppressed_duplicates: int = 0

    def as_dict(self, include_timing: bool = True) -> dict:
        waves = []
        for wave in self.waves:
            record = {
                "height": wave.height,
                "queue_before": wave.queue_before,
                "queue_after": wave.queue_after,
                "generated": [vars(g) for g in wave.generated],
                "best_updates": wave.best_updates,
            }
            if include_timing:
                record["elapsed_ms"] = wave.elapsed_ms
            waves.append(record)
        out = {
            "target": self.target,
            "leaf_scores": self.leaf_scores,
            "waves": waves,
            "suppressed_duplicates": self.suppressed_duplicates,
        }
        if include_timing:
            out["total_ms"] = self.total_ms
        return out


@dataclass
class SearchResult:
    program: SummarizationProgram
    per_root_scores: list[float]
    summary_metrics: dict[str, MetricTriple]
    traces: list[SearchTrace]

    @property
    def total_ms(self) -> float:
        return sum(t.total_ms for t in self.traces)


# --- the search itself -------------------------------------------------------


def _normalize(text: str) -> str:
    return " ".join(text.split())


class _TreeSearch:
    def __init__(
        self,
        leaves: Sequence[SPNode],
        target: str,
        config: SearchConfig,
        backend: ModuleBackend,
    ):
        if not leaves:
            raise ValueError("search needs at least one leaf")
        self.config = config
        self.backend = backend
        self.metric = sentence_scorer(config.metric, target, config.tokenizer)
        self.leaves = [
            leaf if leaf.score is not None else replace(leaf, score=self.metric(leaf.text))
            for leaf in leaves
        ]
        self.pool: list[SPNode] = list(self.leaves)
        self.seen_texts = {_normalize(leaf.text) for leaf in self.leaves}
        self.best = max(self.leaves, key=lambda leaf: leaf.score)
        self.trace = SearchTrace(
            target=target,
            leaf_scores=[
                {"leaf": leaf.leaf_index, "text": leaf.text, "score": leaf.score}
                for leaf in self.leaves
            ],
        )
        self._seq = 0

    def _make_item(self, kind: ModuleKind, s1: SPNode, s2: SPNode | None) -> QueueItem | None:
        if kind not in self.backend.supported_kinds:
            return None
        if check_admissible(kind, s1, s2, self.config.rule4_literal) is not None:
            return None
        h = 1 + max(s1.height, s2.height if s2 is not None else 0)
        if h > self.config.max_height:
            return None
        self._seq += 1
        return QueueItem(
            s1=s1,
            s2=s2,
            kind=kind,
            h=h,
            score=score_item(s1.score, s2.score if s2 is not None else None),
            seq=self._seq,
        )

    def _spawn(self, node: SPNode) -> list[QueueItem]:
        items = []
        for kind in (ModuleKind.COMPRESSION, ModuleKind.PARAPHRASE):
            item = self._make_item(kind, node, None)
            if item is not None:
                items.append(item)
        for other in self.pool:
            if other is node:
                continue
            for s1, s2 in ((node, other), (other, node)):
                item = self._make_item(ModuleKind.FUSION, s1, s2)
                if item is not None:
                    items.append(item)
        return items

    def _initial_items(self) -> list[QueueItem]:
        items = []
        for leaf in self.leaves:
            for kind in (ModuleKind.COMPRESSION, ModuleKind.PARAPHRASE):
                item = self._make_item(kind, leaf, None)
                if item is not None:
                    items.append(item)
        for s1 in self.leaves:
            for s2 in self.leaves:
                if s1 is s2:
                    continue
                item = self._make_item(ModuleKind.FUSION, s1, s2)
                if item is not None:
                    items.append(item)
        return items

    def run(self) -> tuple[SPNode, SearchTrace]:
        started = time.perf_counter()
        pending = self._initial_items()
        while pending:
            wave_started = time.perf_counter()
            height = pending[0].h
            ranked = sorted(pending, key=lambda i: (-i.score, i.h, i.seq))
            queue = ranked[: self.config.queue_size]
            wave = WaveRecord(
                height=height,
                queue_before=[i.describe() for i in ranked],
                queue_after=[i.describe() for i in queue],
                generated=[],
                best_updates=[],
            )
            pending = []

            requests = [
                ModuleRequest(
                    kind=item.kind,
                    inputs=(item.s1.text,) if item.s2 is None else (item.s1.text, item.s2.text),
                    max_candidates=self.config.max_candidates,
                )
                for item in queue
            ]
            results = self.backend.execute_batch(requests)

            for item, result in zip(queue, results):
                if result is None:
                    wave.generated.append(
                        GenerationRecord(item.describe(), None, None, False, "empty-generation")
                    )
                    continue
                best_text = max(result.candidates, key=self.metric)
                best_score = self.metric(best_text)
                operand_max = item.score
                improving = (
                    best_score > operand_max
                    if self.config.strict_improvement
                    else best_score >= operand_max
                )
                if not improving:
                    wave.generated.append(
                        GenerationRecord(item.describe(), best_text, best_score, False, "not-improving")
                    )
                    continue
                if _normalize(best_text) in self.seen_texts:
                    self.trace.suppressed_duplicates += 1
                    wave.generated.append(
                        GenerationRecord(item.describe(), best_text, best_score, False, "duplicate-text")
                    )
                    continue
                children = (item.s1,) if item.s2 is None else (item.s1, item.s2)
                node = SPNode.internal(item.kind, children, text=best_text, score=best_score)
                self.pool.append(node)
                self.seen_texts.add(_normalize(best_text))
                wave.generated.append(
                    GenerationRecord(item.describe(), best_text, best_score, True, "retained")
                )
                if node.score > self.best.score:
                    self.best = node
                    wave.best_updates.append({"text": node.text, "score": node.score})
                pending.extend(self._spawn(node))

            wave.elapsed_ms = (time.perf_counter() - wave_started) * 1000.0
            self.trace.waves.append(wave)

        self.trace.total_ms = (time.perf_counter() - started) * 1000.0
        return self.best, self.trace


def search_tree(
    leaves: Sequence[SPNode],
    target: str,
    config: SearchConfig,
    backend: ModuleBackend,
) -> tuple[SPNode, SearchTrace]:
    """Best tree (by the configured metric) over the given leaves, plus its trace."""
    return _TreeSearch(leaves, target, config, backend).run()


def sp_search(
    doc: Document,
    summary: SummaryTarget,
    config: SearchConfig,
    backend: ModuleBackend,
) -> SearchResult:
    """One tree per summary sentence, searched over the top-k document sentences."""
    top = select_top_k(doc, summary, config.k, config.tokenizer)
    trees: list[SPTree] = []
    per_root: list[float] = []
    traces: list[SearchTrace] = []
    for target_index, target in enumerate(summary.sentences):
        metric = sentence_scorer(config.metric, target, config.tokenizer)
        leaves = [
            SPNode.leaf(i, doc.sentences[i], score=metric(doc.sentences[i])) for i in top
        ]
        root, trace = search_tree(leaves, target, config, backend)
        trees.append(SPTree(root=root, target_index=target_index))
        per_root.append(root.score if root.score is not None else 0.0)
        traces.append(trace)
    program = SummarizationProgram(tuple(trees), doc.id)
    candidate_sents = [t.root.text for t in trees]
    summary_metrics = rouge_suite(candidate_sents, list(summary.sentences), config.tokenizer)
    return SearchResult(program, per_root, summary_metrics, traces)
