"""Domain model for summarization programs.

A program is an ordered list of binary trees, one per summary sentence.
Leaves are document sentences, internal nodes are outputs of sentence
operations (fusion, compression, paraphrase), and the root texts concatenate
into the summary. Values here are immutable after construction and safe to
share across threads.

Sentence identifiers are 1-based in display and wire formats ("<D1>") and
0-based everywhere internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence


class UnexecutedProgram(RuntimeError):
    """Raised when reading a summary out of a program with empty root texts."""


class ModuleKind(str, Enum):
    COMPRESSION = "compression"
    PARAPHRASE = "paraphrase"
    FUSION = "fusion"

    @property
    def arity(self) -> int:
        return 2 if self is ModuleKind.FUSION else 1


MODULE_KINDS = (ModuleKind.COMPRESSION, ModuleKind.PARAPHRASE, ModuleKind.FUSION)


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.sentences:
            raise ValueError("document must contain at least one sentence")
        for i, s in enumerate(self.sentences):
            if not s.strip():
                raise ValueError(f"document sentence {i + 1} is empty")
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class SummaryTarget:
    sentences: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.sentences:
            raise ValueError("summary must contain at least one sentence")
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def text(self) -> str:
        return " ".join(self.sentences)


@dataclass(frozen=True)
class SPNode:
    """One node of a program tree.

    ``kind`` is None for leaves. ``text`` may be empty in skeletons that have
    not been executed yet. ``score`` is the optional metric value against the
    tree's target sentence. ``source_set`` and ``height`` are derived and
    cached at construction.
    """

    text: str
    kind: ModuleKind | None
    children: tuple["SPNode", ...]
    leaf_index: int | None
    source_set: frozenset[int]
    height: int
    score: float | None = None

    @staticmethod
    def leaf(index: int, text: str = "", score: float | None = None) -> "SPNode":
        if index < 0:
            raise ValueError(f"leaf index must be >= 0, got {index}")
        return SPNode(
            text=text,
            kind=None,
            children=(),
            leaf_index=index,
            source_set=frozenset({index}),
            height=0,
            score=score,
        )

    @staticmethod
    def internal(
        kind: ModuleKind,
        children: Sequence["SPNode"],
        text: str = "",
        score: float | None = None,
    ) -> "SPNode":
        children = tuple(children)
        if len(children) != kind.arity:
            raise ValueError(
                f"{kind.value} takes {kind.arity} operand(s), got {len(children)}"
            )
        sources: frozenset[int] = frozenset()
        for child in children:
            sources |= child.source_set
        return SPNode(
            text=text,
            kind=kind,
            children=children,
            leaf_index=None,
            source_set=sources,
            height=1 + max(c.height for c in children),
            score=score,
        )

    @property
    def is_leaf(self) -> bool:
        return self.kind is None

    def walk(self) -> Iterator["SPNode"]:
        """Depth-first iteration over the subtree, this node first."""
        yield self
        for child in self.children:
            yield from child.walk()

    def leaves(self) -> list["SPNode"]:
        return [n for n in self.walk() if n.is_leaf]


@dataclass(frozen=True)
class SPTree:
    root: SPNode
    target_index: int


@dataclass(frozen=True)
class SummarizationProgram:
    trees: tuple[SPTree, ...]
    document_id: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "trees", tuple(self.trees))


def concat_summary(program: SummarizationProgram) -> list[str]:
    """Root texts in tree order; the program must have been executed."""
    texts = []
    for i, tree in enumerate(program.trees):
        if not tree.root.text.strip():
            raise UnexecutedProgram(f"tree {i} has an empty root text")
        texts.append(tree.root.text)
    return texts


def source_set(node: SPNode) -> frozenset[int]:
    """Document indices reachable in the subtree (recomputed, not cached)."""
    if node.is_leaf:
        return frozenset({node.leaf_index}) if node.leaf_index is not None else frozenset()
    result: frozenset[int] = frozenset()
    for child in node.children:
        result |= source_set(child)
    return result


def structure_signature(tree: SPTree) -> str:
    """Canonical shape string with leaves anonymized to a middle dot.

    Fusion children are comma-separated only when both are leaves, matching
    the rendering of the shipped frequency table; a lone leaf renders
    ``( · )``.
    """
    return _signature(tree.root, top=True)


def _signature(node: SPNode, top: bool = False) -> str:
    if node.is_leaf:
        return "( · )" if top else "·"
    parts = [_signature(c) for c in node.children]
    if node.kind is ModuleKind.FUSION and all(c.is_leaf for c in node.children):
        inner = " , ".join(parts)
    else:
        inner = " ".join(parts)
    return f"{node.kind.value} ( {inner} )"


@dataclass(frozen=True)
class TreeDiagnostic:
    code: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} at [{self.path}]: {self.message}"


def validate_tree(tree: SPTree, doc_size: int) -> list[TreeDiagnostic]:
    """Structural diagnostics for one tree; empty list means valid.

    Never raises: every violated invariant yields one diagnostic carrying the
    child-index path of the offending node (root path is "").
    """
    diagnostics: list[TreeDiagnostic] = []
    seen_leaves: dict[int, str] = {}

    def visit(node: SPNode, path: str) -> None:
        if node.kind is None:
            if node.children:
                diagnostics.append(
                    TreeDiagnostic("LeafWithChildren", path, "leaf node has children")
                )
            if node.leaf_index is None:
                diagnostics.append(
                    TreeDiagnostic("MissingLeafIndex", path, "leaf node has no index")
                )
            else:
                if not 0 <= node.leaf_index < doc_size:
                    diagnostics.append(
                        TreeDiagnostic(
                            "LeafIndexOutOfRange",
                            path,
                            f"D{node.leaf_index + 1} outside document of size {doc_size}",
                        )
                    )
                if node.leaf_index in seen_leaves:
                    diagnostics.append(
                        TreeDiagnostic(
                            "DuplicateLeaf",
                            path,
                            f"D{node.leaf_index + 1} already used at [{seen_leaves[node.leaf_index]}]",
                        )
                    )
                else:
                    seen_leaves[node.leaf_index] = path
        else:
            if node.leaf_index is not None:
                diagnostics.append(
                    TreeDiagnostic("LeafIndexOnInternal", path, "internal node has a leaf index")
                )
            if len(node.children) != node.kind.arity:
                diagnostics.append(
                    TreeDiagnostic(
                        "ArityMismatch",
                        path,
                        f"{node.kind.value} has {len(node.children)} child(ren), expects {node.kind.arity}",
                    )
                )
        if node.kind is None and node.leaf_index is not None:
            expected_sources = frozenset({node.leaf_index})
        elif node.children:
            expected_sources = frozenset().union(*(c.source_set for c in node.children))
        else:
            expected_sources = frozenset()
        if node.source_set != expected_sources:
            diagnostics.append(
                TreeDiagnostic("SourceSetMismatch", path, "cached source set is stale")
            )
        expected_height = 0 if not node.children else 1 + max(c.height for c in node.children)
        if node.height != expected_height:
            diagnostics.append(
                TreeDiagnostic("HeightMismatch", path, "cached height is stale")
            )
        for i, child in enumerate(node.children):
            visit(child, f"{path}.{i}" if path else str(i))

    visit(tree.root, "")
    return diagnostics


def validate_program(program: SummarizationProgram, doc_size: int) -> list[TreeDiagnostic]:
    diagnostics: list[TreeDiagnostic] = []
    for i, tree in enumerate(program.trees):
        if tree.target_index != i:
            diagnostics.append(
                TreeDiagnostic("TargetIndexMismatch", str(i), f"tree {i} targets {tree.target_index}")
            )
        for d in validate_tree(tree, doc_size):
            diagnostics.append(TreeDiagnostic(d.code, f"{i}:{d.path}", d.message))
    return diagnostics
