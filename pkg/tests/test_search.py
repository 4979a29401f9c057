"""Search engine tests: ranking, admissibility, wave mechanics, oracle checks."""

import json
import random

import pytest

from spforge.backends import CandidateSet, ModuleBackend, ModuleRequest
from spforge.core import Document, ModuleKind, SPNode, SummaryTarget, validate_program
from spforge.search import (
    QueueItem,
    SearchConfig,
    UNBOUNDED_QUEUE,
    admissible,
    check_admissible,
    score_item,
    search_tree,
    select_top_k,
    sp_search,
)

from oracles import exhaustive_best_score, tiny_instance


def leaf(i, text, score=None):
    return SPNode.leaf(i, text, score=score)


class TestSelectTopK:
    def test_small_document_returns_all(self):
        doc = Document("d", ("a b", "c d", "e f"))
        summary = SummaryTarget(("a c e",))
        assert select_top_k(doc, summary, 4) == [0, 1, 2]

    def test_hand_computed_fractions(self):
        doc = Document(
            "d",
            (
                "alpha beta gamma",   # 2/3 overlap
                "delta epsilon",      # 0/2
                "alpha beta",         # 2/2
                "gamma delta beta",   # 2/3
                "zeta eta theta",     # 0/3
            ),
        )
        summary = SummaryTarget(("alpha beta gamma or so",))
        assert select_top_k(doc, summary, 4) == [0, 1, 2, 3]
        assert select_top_k(doc, summary, 2) == [0, 2]
        assert select_top_k(doc, summary, 3) == [0, 2, 3]

    def test_all_zero_ties_break_by_document_order(self):
        doc = Document("d", ("q w", "e r", "t y", "u i"))
        summary = SummaryTarget(("zzz",))
        assert select_top_k(doc, summary, 2) == [0, 1]

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            select_top_k(Document("d", ("a",)), SummaryTarget(("a",)), 0)


class TestScoreItem:
    def test_max_of_operands(self):
        assert score_item(0.40, 0.70) == 0.70

    def test_unary_is_single_operand(self):
        assert score_item(0.40, None) == 0.40

    def test_zeros(self):
        assert score_item(0.0, 0.0) == 0.0


class TestAdmissibility:
    def setup_method(self):
        self.d1 = leaf(0, "one text here")
        self.d2 = leaf(1, "two text here")
        self.c1 = SPNode.internal(ModuleKind.COMPRESSION, (self.d1,), "one text")
        self.p1 = SPNode.internal(ModuleKind.PARAPHRASE, (self.d1,), "a text here")

    def test_rule1_no_recompression(self):
        assert check_admissible(ModuleKind.COMPRESSION, self.c1) == "rule1:recompression"
        assert check_admissible(ModuleKind.COMPRESSION, self.p1) is None

    def test_rule2_no_reparaphrase(self):
        assert check_admissible(ModuleKind.PARAPHRASE, self.p1) == "rule2:reparaphrase"
        assert check_admissible(ModuleKind.PARAPHRASE, self.c1) is None

    def test_rule3_duplicate_document_sentence(self):
        tag = check_admissible(ModuleKind.FUSION, self.d1, self.c1)
        assert tag == "rule3:duplicate-document-sentence"

    def test_rule4_same_source_intermediates(self):
        tag = check_admissible(ModuleKind.FUSION, self.p1, self.c1)
        assert tag == "rule4:overlapping-sources"

    def test_rule4_literal_blocks_identical_sources_only(self):
        d3 = leaf(2, "three text here")
        c2 = SPNode.internal(ModuleKind.COMPRESSION, (self.d2,), "two text")
        c3 = SPNode.internal(ModuleKind.COMPRESSION, (d3,), "three text")
        fused01 = SPNode.internal(ModuleKind.FUSION, (self.c1, c2), "mix01")
        fused12 = SPNode.internal(ModuleKind.FUSION, (c2, c3), "mix12")
        # sources {0,1} vs {1,2}: overlapping but not identical, document order ok
        assert check_admissible(ModuleKind.FUSION, fused01, fused12, rule4_literal=True) is None
        assert (
            check_admissible(ModuleKind.FUSION, fused01, fused12)
            == "rule4:overlapping-sources"
        )
        assert (
            check_admissible(ModuleKind.FUSION, self.p1, self.c1, rule4_literal=True)
            == "rule4:same-source-intermediates"
        )

    def test_rule5_temporal_order(self):
        assert check_admissible(ModuleKind.FUSION, self.d2, self.d1) == "rule5:temporal-order"
        assert check_admissible(ModuleKind.FUSION, self.d1, self.d2) is None

    def test_admissible_wrapper_returns_reason(self):
        item = QueueItem(self.d2, self.d1, ModuleKind.FUSION, 1, 0.0, 0)
        ok, reason = admissible(item)
        assert not ok and reason == "rule5:temporal-order"


class _NonImprovingBackend(ModuleBackend):
    """Candidates that never overlap any target."""

    def execute(self, request: ModuleRequest) -> CandidateSet:
        return CandidateSet(("qqq www eee",))


class TestSearchTree:
    def test_exact_leaf_match_gives_singleton(self, reference_backend):
        target = "the copper lantern."
        leaves = [leaf(0, "the copper lantern."), leaf(1, "a granite melody.")]
        config = SearchConfig(k=2, queue_size=10, max_height=2, max_candidates=2)
        root, trace = search_tree(leaves, target, config, reference_backend)
        assert root.is_leaf and root.leaf_index == 0
        assert root.score == pytest.approx(1.0)

    def test_non_improving_backend_returns_best_leaf(self):
        target = "saddle bishop tundra."
        leaves = [leaf(0, "saddle walnut."), leaf(1, "bishop tundra walnut.")]
        config = SearchConfig(k=2, queue_size=10, max_height=2, max_candidates=1)
        root, trace = search_tree(leaves, target, config, _NonImprovingBackend())
        assert root.is_leaf and root.leaf_index == 1
        assert all(not g.retained for wave in trace.waves for g in wave.generated)

    def test_empty_leaves_is_precondition_violation(self, reference_backend):
        with pytest.raises(ValueError):
            search_tree([], "target", SearchConfig(), reference_backend)


class TestBruteForceEquivalence:
    def test_small_instances(self, reference_backend):
        for trial in range(12):
            rng = random.Random(500 + trial)
            sents, target, height = tiny_instance(rng)
            doc = Document(f"t{trial}", tuple(sents))
            summary = SummaryTarget((target,))
            config = SearchConfig(
                k=2, queue_size=UNBOUNDED_QUEUE, max_height=height, max_candidates=1
            )
            result = sp_search(doc, summary, config, reference_backend)
            top = select_top_k(doc, summary, 2)
            expected = exhaustive_best_score(
                [(i, sents[i]) for i in top], target, height
            )
            assert result.per_root_scores[0] == expected


class TestSpSearch:
    def test_one_tree_per_summary_sentence(self, reference_backend):
        doc = Document("d", ("the falcon orchard.", "the copper voyage.", "a saddle quarry."))
        summary = SummaryTarget(("the falcon orchard.", "the copper voyage."))
        result = sp_search(doc, summary, SearchConfig(k=2, max_candidates=2), reference_backend)
        assert [t.target_index for t in result.program.trees] == [0, 1]

    def test_extractive_identity(self, reference_backend):
        doc = Document("d", ("alpha beta gamma.", "delta epsilon zeta.", "eta theta iota."))
        summary = SummaryTarget(("delta epsilon zeta.", "alpha beta gamma."))
        result = sp_search(doc, summary, SearchConfig(k=3, max_candidates=2), reference_backend)
        assert all(t.root.is_leaf for t in result.program.trees)
        assert result.summary_metrics["rougeL"].f1 == pytest.approx(1.0)

    def test_root_dominates_all_materialized_nodes(self, reference_backend):
        rng = random.Random(9)
        sents, target, _ = tiny_instance(rng)
        doc = Document("d", tuple(sents))
        result = sp_search(
            doc, SummaryTarget((target,)), SearchConfig(k=3, max_candidates=3), reference_backend
        )
        trace = result.traces[0]
        root_score = result.per_root_scores[0]
        for record in trace.leaf_scores:
            assert root_score >= record["score"]
        for wave in trace.waves:
            for generated in wave.generated:
                if generated.metric is not None:
                    assert root_score >= generated.metric

    def test_program_validates(self, reference_backend):
        doc = Document("d", ("the falcon orchard granite.", "the copper lantern voyage."))
        summary = SummaryTarget(("the falcon granite and copper lantern.",))
        result = sp_search(doc, summary, SearchConfig(k=2, max_candidates=3), reference_backend)
        assert validate_program(result.program, 2) == []

    def test_determinism_byte_identical(self, reference_backend):
        rng = random.Random(31)
        sents, target, _ = tiny_instance(rng)
        doc = Document("d", tuple(sents))
        summary = SummaryTarget((target, target))
        config = SearchConfig(k=3, max_candidates=3)
        one = sp_search(doc, summary, config, reference_backend)
        two = sp_search(doc, summary, config, reference_backend)
        as_json = lambda r: json.dumps(
            [t.as_dict(include_timing=False) for t in r.traces], sort_keys=True
        )
        assert as_json(one) == as_json(two)
        assert one.program == two.program

    def test_queue_bound_recorded_in_trace(self, reference_backend):
        doc = Document(
            "d",
            (
                "the falcon orchard granite melody.",
                "the copper lantern voyage thicket.",
                "a saddle quarry bishop tundra.",
                "the harvest ember walnut field.",
            ),
        )
        summary = SummaryTarget(("falcon granite and copper voyage and saddle bishop.",))
        config = SearchConfig(k=4, queue_size=5, max_height=2, max_candidates=3)
        result = sp_search(doc, summary, config, reference_backend)
        waves = result.traces[0].waves
        assert any(len(w.queue_before) > 5 for w in waves)
        assert all(len(w.queue_after) <= 5 for w in waves)

    def test_height_bound(self, reference_backend):
        rng = random.Random(13)
        sents, target, _ = tiny_instance(rng)
        doc = Document("d", tuple(sents))
        for height in (0, 1, 2):
            config = SearchConfig(k=3, max_height=height, max_candidates=2)
            result = sp_search(doc, SummaryTarget((target,)), config, reference_backend)
            assert result.program.trees[0].root.height <= height
