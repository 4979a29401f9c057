"""Domain model: node construction, validation, signatures, summaries."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spforge.core import (
    Document,
    ModuleKind,
    SPNode,
    SPTree,
    SummarizationProgram,
    SummaryTarget,
    UnexecutedProgram,
    concat_summary,
    source_set,
    structure_signature,
    validate_program,
    validate_tree,
)


def leaf(i, text="x"):
    return SPNode.leaf(i, text)


def fuse(a, b, text="f"):
    return SPNode.internal(ModuleKind.FUSION, (a, b), text)


def compress(a, text="c"):
    return SPNode.internal(ModuleKind.COMPRESSION, (a,), text)


def paraphrase(a, text="p"):
    return SPNode.internal(ModuleKind.PARAPHRASE, (a,), text)


class TestConstruction:
    def test_document_rejects_empty_sentences(self):
        with pytest.raises(ValueError):
            Document("d", ("ok", "  "))
        with pytest.raises(ValueError):
            Document("d", ())

    def test_summary_target_requires_sentences(self):
        with pytest.raises(ValueError):
            SummaryTarget(())

    def test_arity_enforced(self):
        with pytest.raises(ValueError):
            SPNode.internal(ModuleKind.FUSION, (leaf(0),))
        with pytest.raises(ValueError):
            SPNode.internal(ModuleKind.COMPRESSION, (leaf(0), leaf(1)))

    def test_derived_fields(self):
        node = fuse(leaf(0), compress(leaf(2)))
        assert node.source_set == frozenset({0, 2})
        assert node.height == 2
        assert source_set(node) == node.source_set

    def test_source_set_examples(self):
        assert source_set(leaf(2)) == frozenset({2})
        assert source_set(fuse(leaf(0), compress(leaf(1)))) == frozenset({0, 1})
        assert source_set(paraphrase(leaf(4))) == frozenset({4})


class TestConcatSummary:
    def test_roots_in_order(self):
        program = SummarizationProgram(
            (
                SPTree(leaf(0, "A wins."), 0),
                SPTree(leaf(1, "B loses."), 1),
            ),
            "d",
        )
        assert concat_summary(program) == ["A wins.", "B loses."]

    def test_singleton(self):
        program = SummarizationProgram((SPTree(leaf(0, "X."), 0),), "d")
        assert concat_summary(program) == ["X."]

    def test_empty_root_raises(self):
        program = SummarizationProgram((SPTree(leaf(0, ""), 0),), "d")
        with pytest.raises(UnexecutedProgram):
            concat_summary(program)


class TestSignature:
    def test_lone_leaf(self):
        assert structure_signature(SPTree(leaf(3), 0)) == "( · )"

    def test_compression_of_fusion(self):
        tree = SPTree(compress(fuse(leaf(0), leaf(1))), 0)
        assert structure_signature(tree) == "compression ( fusion ( · , · ) )"

    def test_paraphrase_of_compression(self):
        tree = SPTree(paraphrase(compress(leaf(2))), 0)
        assert structure_signature(tree) == "paraphrase ( compression ( · ) )"

    def test_fusion_of_subtrees_uses_spaces(self):
        tree = SPTree(fuse(fuse(leaf(0), leaf(1)), fuse(leaf(2), leaf(3))), 0)
        assert structure_signature(tree) == "fusion ( fusion ( · , · ) fusion ( · , · ) )"

    def test_invariant_under_leaf_relabeling(self):
        a = SPTree(fuse(leaf(0), compress(leaf(1))), 0)
        b = SPTree(fuse(leaf(5), compress(leaf(9))), 0)
        assert structure_signature(a) == structure_signature(b)


class TestValidateTree:
    def test_wellformed(self):
        assert validate_tree(SPTree(compress(leaf(0)), 0), 3) == []

    def test_arity_mismatch_reported(self):
        bad = SPNode(
            text="f",
            kind=ModuleKind.FUSION,
            children=(leaf(0),),
            leaf_index=None,
            source_set=frozenset({0}),
            height=1,
        )
        codes = [d.code for d in validate_tree(SPTree(bad, 0), 3)]
        assert "ArityMismatch" in codes

    def test_duplicate_leaf_reported(self):
        tree = SPTree(fuse(leaf(1), leaf(1)), 0)
        codes = [d.code for d in validate_tree(tree, 3)]
        assert "DuplicateLeaf" in codes

    def test_out_of_range_leaf(self):
        codes = [d.code for d in validate_tree(SPTree(leaf(7), 0), 3)]
        assert "LeafIndexOutOfRange" in codes

    def test_stale_caches_detected(self):
        stale = SPNode(
            text="c",
            kind=ModuleKind.COMPRESSION,
            children=(leaf(0),),
            leaf_index=None,
            source_set=frozenset({5}),
            height=3,
        )
        codes = {d.code for d in validate_tree(SPTree(stale, 0), 3)}
        assert {"SourceSetMismatch", "HeightMismatch"} <= codes

    def test_program_target_indices(self):
        program = SummarizationProgram((SPTree(leaf(0, "t"), 1),), "d")
        codes = [d.code for d in validate_program(program, 2)]
        assert "TargetIndexMismatch" in codes


@st.composite
def random_tree(draw, max_depth=3):
    counter = [0]

    def build(depth):
        if depth >= max_depth or draw(st.booleans()):
            counter[0] += 1
            return leaf(counter[0] - 1)
        kind = draw(st.sampled_from(list(ModuleKind)))
        if kind is ModuleKind.FUSION:
            return SPNode.internal(kind, (build(depth + 1), build(depth + 1)), "t")
        return SPNode.internal(kind, (build(depth + 1),), "t")

    return build(0), counter[0]


@given(random_tree())
@settings(max_examples=100)
def test_constructed_trees_always_validate(tree_and_size):
    tree, size = tree_and_size
    assert validate_tree(SPTree(tree, 0), max(size, 1)) == []
