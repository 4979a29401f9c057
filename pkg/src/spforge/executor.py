"""Execute program skeletons against a document through a backend.

Execution is bottom-up and batched level by level: all nodes of the same
height across the whole skeleton go to the backend in one batch. Node texts
are chosen either as the backend's first candidate (generation mode) or as
the candidate scoring highest against the tree's target sentence (the rule
the search itself uses), so re-executing a searched skeleton with the same
backend reproduces the searched summary.

`execute_first_wellformed` implements inference over externally produced
program strings: scan candidates in order, run the first well-formed one,
and fall back to an extractive summary when none parses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .backends import EmptyGeneration, ModuleBackend, ModuleRequest
from .core import Document, SPNode, SPTree, SummarizationProgram, SummaryTarget, concat_summary
from .dsl import ProgramSkeleton, check_wellformed, parse
from .rouge import DEFAULT_TOKENIZER, TokenizerConfig, sentence_scorer
from .search import select_top_k

FALLBACK = "FALLBACK"


@dataclass(frozen=True)
class ExecutionConfig:
    max_candidates: int = 5  # g: candidates requested per module call
    selection: str = "top1"  # top1 | best_vs_target
    normalize_whitespace: bool = False
    metric: str = "rougeL"  # candidate-selection metric for best_vs_target
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER

    def __post_init__(self) -> None:
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")
        if self.selection not in ("top1", "best_vs_target"):
            raise ValueError(f"unknown selection mode {self.selection!r}")


def execute_skeleton(
    skeleton: ProgramSkeleton,
    doc: Document,
    backend: ModuleBackend,
    config: ExecutionConfig = ExecutionConfig(),
    target: SummaryTarget | None = None,
) -> tuple[SummarizationProgram, list[str]]:
    """Fill a skeleton's texts bottom-up; returns the program and its summary."""
    if config.selection == "best_vs_target":
        if target is None:
            raise ValueError("best_vs_target selection requires a target summary")
        if len(target.sentences) != len(skeleton.trees):
            raise ValueError(
                f"skeleton has {len(skeleton.trees)} tree(s) but target has "
                f"{len(target.sentences)} sentence(s)"
            )

    scorers = None
    if config.selection == "best_vs_target" and target is not None:
        scorers = [
            sentence_scorer(config.metric, sentence, config.tokenizer)
            for sentence in target.sentences
        ]

    # tree_index -> mutable map from skeleton node id to executed node
    executed: list[dict[int, SPNode]] = [{} for _ in skeleton.trees]
    levels: dict[int, list[tuple[int, SPNode]]] = {}
    max_height = 0
    for tree_index, root in enumerate(skeleton.trees):
        for node in root.walk():
            levels.setdefault(node.height, []).append((tree_index, node))
            max_height = max(max_height, node.height)

    for tree_index, node in levels.get(0, []):
        if node.leaf_index is None or not 0 <= node.leaf_index < len(doc.sentences):
            raise ValueError(f"leaf index {node.leaf_index} invalid for this document")
        text = doc.sentences[node.leaf_index]
        if config.normalize_whitespace:
            text = " ".join(text.split())
        score = scorers[tree_index](text) if scorers else None
        executed[tree_index][id(node)] = SPNode.leaf(node.leaf_index, text, score=score)

    for height in range(1, max_height + 1):
        batch = levels.get(height, [])
        requests = []
        for tree_index, node in batch:
            children = tuple(executed[tree_index][id(c)] for c in node.children)
            requests.append(
                ModuleRequest(
                    kind=node.kind,
                    inputs=tuple(c.text for c in children),
                    max_candidates=config.max_candidates,
                )
            )
        results = backend.execute_batch(requests)
        for (tree_index, node), result in zip(batch, results):
            if result is None:
                raise EmptyGeneration(
                    f"{node.kind.value} produced no candidates at height {height}"
                )
            if scorers is not None:
                text = max(result.candidates, key=scorers[tree_index])
            else:
                text = result.candidates[0]
            if config.normalize_whitespace:
                text = " ".join(text.split())
            children = tuple(executed[tree_index][id(c)] for c in node.children)
            score = scorers[tree_index](text) if scorers else None
            executed[tree_index][id(node)] = SPNode.internal(
                node.kind, children, text=text, score=score
            )

    trees = tuple(
        SPTree(root=executed[i][id(root)], target_index=i)
        for i, root in enumerate(skeleton.trees)
    )
    program = SummarizationProgram(trees, doc.id)
    return program, concat_summary(program)


def execute_first_wellformed(
    candidates: Sequence[str],
    doc: Document,
    backend: ModuleBackend,
    fallback: Sequence[int] | None = None,
    config: ExecutionConfig = ExecutionConfig(),
    target: SummaryTarget | None = None,
) -> tuple[list[str], int | str]:
    """Execute the first candidate program that passes the well-formedness
    check; returns (summary, index of the executed candidate).

    When every candidate is rejected the extractive fallback is returned and
    the second element is the FALLBACK marker. The fallback defaults to the
    top-k overlap sentences when a target is available, else the leading
    document sentences.
    """
    for index, text in enumerate(candidates):
        if check_wellformed(text, len(doc.sentences)):
            continue
        skeleton = parse(text, len(doc.sentences))
        exec_target = target if config.selection == "best_vs_target" else None
        _, summary = execute_skeleton(skeleton, doc, backend, config, exec_target)
        return summary, index

    if fallback is None:
        if target is not None:
            fallback = select_top_k(doc, target, 4, config.tokenizer)
        else:
            fallback = range(min(4, len(doc.sentences)))
    indices = sorted(set(fallback))
    if any(i < 0 or i >= len(doc.sentences) for i in indices):
        raise ValueError("fallback indices outside the document")
    return [doc.sentences[i] for i in indices], FALLBACK
