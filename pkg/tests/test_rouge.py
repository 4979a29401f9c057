"""ROUGE scorer tests: frozen examples, oracle agreement, properties."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spforge.rouge import (
    InvalidN,
    MetricTriple,
    TokenizerConfig,
    porter_stem,
    rouge_l,
    rouge_lsum,
    rouge_n,
    tokenize,
    unigram_overlap_fraction,
)

from oracles import naive_rouge_l, naive_rouge_n, naive_union_lcs, random_token_pair

tokens_st = st.lists(st.sampled_from("abcdef"), min_size=0, max_size=20)


class TestTokenize:
    def test_defaults_lowercase_and_strip(self):
        assert tokenize("The cat, sat!") == ["the", "cat", "sat"]

    def test_empty(self):
        assert tokenize("") == []

    def test_alphanumerics_retained(self):
        assert tokenize("A1 b2") == ["a1", "b2"]

    def test_no_strip_keeps_punctuation(self):
        config = TokenizerConfig(strip_non_alphanumeric=False)
        assert tokenize("The cat, sat!", config) == ["the", "cat,", "sat!"]

    def test_deterministic(self):
        config = TokenizerConfig(use_stemmer=True)
        assert tokenize("running dogs jumped", config) == tokenize("running dogs jumped", config)

    def test_stemmer_folds_inflections(self):
        config = TokenizerConfig(use_stemmer=True)
        assert tokenize("running runs", config) == ["run", "run"]


class TestPorter:
    @pytest.mark.parametrize(
        "word,stem",
        [
            ("caresses", "caress"),
            ("ponies", "poni"),
            ("cats", "cat"),
            ("agreed", "agre"),
            ("feed", "feed"),
            ("plastered", "plaster"),
            ("motoring", "motor"),
            ("hopping", "hop"),
            ("relational", "relat"),
            ("rational", "ration"),
            ("generalizations", "gener"),
            ("oscillators", "oscil"),
            ("happy", "happi"),
            ("sky", "sky"),
        ],
    )
    def test_known_stems(self, word, stem):
        assert porter_stem(word) == stem


class TestRougeN:
    def test_identity(self):
        assert rouge_n("a b c", "a b c", 1) == MetricTriple(1.0, 1.0, 1.0)
        assert rouge_n("a b c", "a b c", 2) == MetricTriple(1.0, 1.0, 1.0)

    def test_disjoint(self):
        assert rouge_n("a b", "c d", 1) == MetricTriple(0.0, 0.0, 0.0)

    def test_hand_counted_unigrams(self):
        triple = rouge_n("the gunman police", "police killed the gunman", 1)
        assert triple.precision == pytest.approx(1.0)
        assert triple.recall == pytest.approx(0.75)
        assert triple.f1 == pytest.approx(0.857142857, abs=1e-9)

    def test_invalid_n(self):
        with pytest.raises(InvalidN):
            rouge_n("a", "a", 0)

    def test_no_ngrams_of_that_order(self):
        assert rouge_n("a", "a", 2) == MetricTriple.zero()

    @given(cand=tokens_st, ref=tokens_st, n=st.integers(1, 3))
    @settings(max_examples=150)
    def test_matches_naive_oracle(self, cand, ref, n):
        got = rouge_n(" ".join(cand), " ".join(ref), n)
        expected = naive_rouge_n(cand, ref, n)
        assert got.precision == pytest.approx(expected[0], abs=1e-9)
        assert got.recall == pytest.approx(expected[1], abs=1e-9)
        assert got.f1 == pytest.approx(expected[2], abs=1e-9)

    @given(cand=tokens_st, ref=tokens_st)
    @settings(max_examples=100)
    def test_f_symmetric_under_swap(self, cand, ref):
        a = rouge_n(" ".join(cand), " ".join(ref), 1)
        b = rouge_n(" ".join(ref), " ".join(cand), 1)
        assert a.f1 == pytest.approx(b.f1, abs=1e-12)
        assert a.precision == pytest.approx(b.recall, abs=1e-12)

    @given(cand=tokens_st, ref=st.lists(st.sampled_from("abcdef"), min_size=1, max_size=20))
    @settings(max_examples=100)
    def test_appending_reference_token_never_lowers_recall(self, cand, ref):
        before = rouge_n(" ".join(cand), " ".join(ref), 1).recall
        after = rouge_n(" ".join(cand + [ref[0]]), " ".join(ref), 1).recall
        assert after >= before - 1e-12


class TestRougeL:
    def test_identity(self):
        assert rouge_l("x y z", "x y z") == MetricTriple(1.0, 1.0, 1.0)

    def test_dp_oracle_example(self):
        triple = rouge_l("the cat sat", "the cat ran")
        assert triple.precision == pytest.approx(2 / 3)
        assert triple.recall == pytest.approx(2 / 3)
        assert triple.f1 == pytest.approx(2 / 3)

    def test_empty_candidate(self):
        assert rouge_l("", "a b") == MetricTriple.zero()

    @given(cand=tokens_st, ref=tokens_st)
    @settings(max_examples=150)
    def test_matches_naive_oracle(self, cand, ref):
        got = rouge_l(" ".join(cand), " ".join(ref))
        expected = naive_rouge_l(cand, ref)
        assert got.f1 == pytest.approx(expected[2], abs=1e-9)

    @given(cand=tokens_st, ref=tokens_st)
    @settings(max_examples=100)
    def test_f_symmetric_under_swap(self, cand, ref):
        a = rouge_l(" ".join(cand), " ".join(ref))
        b = rouge_l(" ".join(ref), " ".join(cand))
        assert a.f1 == pytest.approx(b.f1, abs=1e-12)


class TestRougeLsum:
    def test_identity(self):
        sents = ["a b c", "d e f"]
        assert rouge_lsum(sents, sents) == MetricTriple(1.0, 1.0, 1.0)

    def test_single_sentences_collapse_to_rouge_l(self):
        assert rouge_lsum(["x y z"], ["x q z"]) == rouge_l("x y z", "x q z")

    def test_split_candidate_covers_reference(self):
        # Frozen from the independent union-LCS oracle.
        expected = naive_union_lcs([["a", "b"], ["c", "d"]], [["a", "b", "c", "d"]])
        got = rouge_lsum(["a b", "c d"], ["a b c d"])
        assert (got.precision, got.recall, got.f1) == pytest.approx(expected)
        assert got.f1 == pytest.approx(1.0)

    def test_matches_union_lcs_oracle_on_random_pairs(self):
        rng = random.Random(42)
        for _ in range(100):
            cands = [random_token_pair(rng, 8)[0] for _ in range(rng.randint(1, 3))]
            refs = [random_token_pair(rng, 8)[0] for _ in range(rng.randint(1, 3))]
            got = rouge_lsum([" ".join(s) for s in cands], [" ".join(s) for s in refs])
            expected = naive_union_lcs(cands, refs)
            assert got.f1 == pytest.approx(expected[2], abs=1e-9)


class TestOverlapFraction:
    def test_full_containment(self):
        assert unigram_overlap_fraction("a b", "b a c") == 1.0

    def test_disjoint(self):
        assert unigram_overlap_fraction("a b", "c d") == 0.0

    def test_half(self):
        assert unigram_overlap_fraction("a b c d", "a c q") == 0.5

    def test_empty_sentence(self):
        assert unigram_overlap_fraction("", "a b") == 0.0
