"""Random-program generators, extractive baselines and structure statistics.

The shipped structure distribution covers the ten most frequent tree shapes
observed in searched oracle programs, renormalized to sum to one. Two rows
of the published table print fusion with a single operand; they are shipped
here with the elided operand restored as a document sentence, which keeps
the stated tree heights intact.
"""

from __future__ import annotations

import random
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    Document,
    ModuleKind,
    SPNode,
    SummarizationProgram,
    SummaryTarget,
    structure_signature,
)
from .dsl import ProgramSkeleton
from .search import select_top_k


class InsufficientLeaves(ValueError):
    """The leaf pool is too small for a sampled tree structure."""


_SHIPPED_ROWS: list[tuple[str, float]] = [
    ("compression ( · )", 8.0),
    ("compression ( fusion ( · , · ) )", 8.0),
    ("fusion ( fusion ( · , · ) fusion ( · , · ) )", 7.0),
    ("( · )", 7.0),
    ("fusion ( compression ( · ) fusion ( · , · ) )", 6.0),
    ("paraphrase ( compression ( · ) )", 6.0),
    ("paraphrase ( fusion ( · , · ) )", 6.0),
    ("fusion ( fusion ( · , · ) compression ( · ) )", 5.0),
    ("fusion ( fusion ( · , · ) · )", 5.0),
    ("fusion ( compression ( · ) · )", 5.0),
]


@dataclass(frozen=True)
class StructureDistribution:
    entries: tuple[tuple[str, float], ...]
    source: str  # shipped_appendix_defaults | computed_from_corpus

    def __post_init__(self) -> None:
        total = sum(p for _, p in self.entries)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        for signature, _ in self.entries:
            parse_signature(signature)  # raises on malformed signatures
        object.__setattr__(self, "entries", tuple(self.entries))

    @staticmethod
    def shipped_default() -> "StructureDistribution":
        total = sum(w for _, w in _SHIPPED_ROWS)
        return StructureDistribution(
            tuple((s, w / total) for s, w in _SHIPPED_ROWS),
            source="shipped_appendix_defaults",
        )

    @staticmethod
    def from_programs(programs: Iterable[SummarizationProgram]) -> "StructureDistribution":
        counts = Counter(
            structure_signature(tree) for program in programs for tree in program.trees
        )
        total = sum(counts.values())
        if total == 0:
            raise ValueError("no trees to build a distribution from")
        entries = tuple(
            (signature, count / total) for signature, count in counts.most_common()
        )
        return StructureDistribution(entries, source="computed_from_corpus")

    def sample(self, rng: random.Random) -> str:
        signatures = [s for s, _ in self.entries]
        weights = [p for _, p in self.entries]
        return rng.choices(signatures, weights=weights, k=1)[0]

    def restrict(self, max_leaves: int) -> "StructureDistribution":
        """Renormalized distribution over structures needing <= max_leaves."""
        kept = [
            (signature, p)
            for signature, p in self.entries
            if len(parse_signature(signature).leaves()) <= max_leaves
        ]
        if not kept:
            raise InsufficientLeaves(f"no structure fits a pool of {max_leaves} leaves")
        total = sum(p for _, p in kept)
        return StructureDistribution(
            tuple((s, p / total) for s, p in kept), source=self.source
        )


_SIG_TOKEN = re.compile(r"·|[(),]|[a-z]+")


def parse_signature(signature: str) -> SPNode:
    """Parse a structure signature into a shape tree with placeholder leaves
    numbered left to right."""
    tokens = _SIG_TOKEN.findall(signature)
    if "".join(tokens).replace(" ", "") != signature.replace(" ", ""):
        raise ValueError(f"stray characters in signature {signature!r}")
    counter = [0]

    def next_leaf() -> SPNode:
        node = SPNode.leaf(counter[0])
        counter[0] += 1
        return node

    def parse_node(pos: int) -> tuple[SPNode, int]:
        if pos >= len(tokens):
            raise ValueError("unexpected end of signature")
        token = tokens[pos]
        if token == "·":
            return next_leaf(), pos + 1
        if token == "(":  # "( · )" singleton form
            if pos + 2 < len(tokens) and tokens[pos + 1] == "·" and tokens[pos + 2] == ")":
                return next_leaf(), pos + 3
            raise ValueError("parenthesized group must contain a single leaf")
        try:
            kind = ModuleKind(token)
        except ValueError as exc:
            raise ValueError(f"unknown operator {token!r} in signature") from exc
        if pos + 1 >= len(tokens) or tokens[pos + 1] != "(":
            raise ValueError(f"{token} must open a parenthesized argument list")
        cursor = pos + 2
        children: list[SPNode] = []
        while cursor < len(tokens) and tokens[cursor] != ")":
            if tokens[cursor] == ",":
                cursor += 1
                continue
            child, cursor = parse_node(cursor)
            children.append(child)
        if cursor >= len(tokens):
            raise ValueError("unclosed parenthesis in signature")
        if len(children) != kind.arity:
            raise ValueError(f"{token} takes {kind.arity} argument(s), found {len(children)}")
        return SPNode.internal(kind, children), cursor + 1

    node, consumed = parse_node(0)
    if consumed != len(tokens):
        raise ValueError(f"trailing tokens in signature {signature!r}")
    return node


def _relabel(shape: SPNode, assignment: dict[int, int]) -> SPNode:
    if shape.is_leaf:
        return SPNode.leaf(assignment[shape.leaf_index])
    return SPNode.internal(shape.kind, [_relabel(c, assignment) for c in shape.children])


def random_program(
    doc: Document,
    leaf_pool: Sequence[int],
    dist: StructureDistribution,
    rng_seed: int | str,
    n_trees: int | None = None,
) -> ProgramSkeleton:
    """Sample a program skeleton: tree count uniform over {1,2,3,4} (unless
    pinned), a structure per tree from the distribution, and leaves drawn
    without replacement within each tree (with replacement across trees)."""
    pool = sorted(set(leaf_pool))
    if not pool:
        raise InsufficientLeaves("leaf pool is empty")
    if any(i < 0 or i >= len(doc.sentences) for i in pool):
        raise ValueError("leaf pool index outside the document")
    rng = random.Random(rng_seed)
    count = n_trees if n_trees is not None else rng.randint(1, 4)
    trees: list[SPNode] = []
    for _ in range(count):
        shape = parse_signature(dist.sample(rng))
        needed = len(shape.leaves())
        if needed > len(pool):
            raise InsufficientLeaves(
                f"structure needs {needed} leaves but the pool has {len(pool)}"
            )
        chosen = sorted(rng.sample(pool, needed))
        assignment = {placeholder: index for placeholder, index in enumerate(chosen)}
        trees.append(_relabel(shape, assignment))
    return ProgramSkeleton(tuple(trees))


def leaves_baseline(program: SummarizationProgram) -> list[str]:
    """Distinct leaf sentences of an executed program, in document order."""
    by_index: dict[int, str] = {}
    for tree in program.trees:
        for leaf in tree.root.leaves():
            if leaf.leaf_index is not None and leaf.leaf_index not in by_index:
                by_index[leaf.leaf_index] = leaf.text
    return [by_index[i] for i in sorted(by_index)]


def topk_baseline(doc: Document, summary: SummaryTarget, k: int = 4) -> list[str]:
    """Extractive summary: top-k sentences by unigram overlap, document order."""
    return [doc.sentences[i] for i in select_top_k(doc, summary, k)]


@dataclass
class StructureStats:
    signature_counts: list[tuple[str, int]]  # descending by frequency
    height_histogram: dict[int, int]  # per tree
    leaf_count_histogram: dict[int, int]  # distinct leaves per program
    n_trees: int
    n_programs: int

    def frequencies(self) -> list[tuple[str, float]]:
        if self.n_trees == 0:
            return []
        return [(s, c / self.n_trees) for s, c in self.signature_counts]


def structure_stats(programs: Sequence[SummarizationProgram]) -> StructureStats:
    signatures: Counter[str] = Counter()
    heights: Counter[int] = Counter()
    leaf_counts: Counter[int] = Counter()
    n_trees = 0
    for program in programs:
        distinct: set[int] = set()
        for tree in program.trees:
            n_trees += 1
            signatures[structure_signature(tree)] += 1
            heights[tree.root.height] += 1
            distinct |= {l.leaf_index for l in tree.root.leaves() if l.leaf_index is not None}
        leaf_counts[len(distinct)] += 1
    return StructureStats(
        signature_counts=signatures.most_common(),
        height_histogram=dict(sorted(heights.items())),
        leaf_count_histogram=dict(sorted(leaf_counts.items())),
        n_trees=n_trees,
        n_programs=len(programs),
    )
