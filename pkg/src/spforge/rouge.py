"""ROUGE scoring used as the search objective and for all evaluation.

Implements ROUGE-N (clipped n-gram overlap), ROUGE-L (longest common
subsequence) and summary-level ROUGE-Lsum (union-LCS with token-count
clipping), plus the unigram-overlap fraction used to rank document
sentences against a summary. Everything here is a pure function of its
inputs; scores live in [0, 1] and report layers scale by 100.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

_STRIP_PATTERN = re.compile(r"[^0-9a-zA-Z]+")


class InvalidN(ValueError):
    """Raised when an n-gram order below 1 is requested."""


@dataclass(frozen=True)
class TokenizerConfig:
    """Deterministic tokenization settings: same config + text -> same tokens."""

    lowercase: bool = True
    strip_non_alphanumeric: bool = True
    use_stemmer: bool = False


DEFAULT_TOKENIZER = TokenizerConfig()


@dataclass(frozen=True)
class MetricTriple:
    precision: float
    recall: float
    f1: float

    @staticmethod
    def zero() -> "MetricTriple":
        return MetricTriple(0.0, 0.0, 0.0)

    @staticmethod
    def from_pr(precision: float, recall: float) -> "MetricTriple":
        if precision + recall > 0:
            f1 = 2 * precision * recall / (precision + recall)
        else:
            f1 = 0.0
        return MetricTriple(precision, recall, f1)

    def as_dict(self) -> dict[str, float]:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def tokenize(text: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> list[str]:
    if config.lowercase:
        text = text.lower()
    if config.strip_non_alphanumeric:
        text = _STRIP_PATTERN.sub(" ", text)
    tokens = text.split()
    if config.use_stemmer:
        # Stemming only applies to plain lowercase words longer than 3
        # characters, mirroring common ROUGE practice.
        tokens = [
            porter_stem(t) if len(t) > 3 and t.isalpha() and t.islower() else t
            for t in tokens
        ]
    return tokens


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(
    candidate: str,
    reference: str,
    n: int,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> MetricTriple:
    """Clipped n-gram overlap precision/recall/F1."""
    if n < 1:
        raise InvalidN(f"n-gram order must be >= 1, got {n}")
    cand = _ngrams(tokenize(candidate, config), n)
    ref = _ngrams(tokenize(reference, config), n)
    total_cand = sum(cand.values())
    total_ref = sum(ref.values())
    if total_cand == 0 or total_ref == 0:
        return MetricTriple.zero()
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    return MetricTriple.from_pr(overlap / total_cand, overlap / total_ref)


def _lcs_table(a: Sequence[str], b: Sequence[str]) -> list[list[int]]:
    rows = len(a) + 1
    cols = len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(1, rows):
        ai = a[i - 1]
        row = table[i]
        prev = table[i - 1]
        for j in range(1, cols):
            if ai == b[j - 1]:
                row[j] = prev[j - 1] + 1
            else:
                row[j] = prev[j] if prev[j] >= row[j - 1] else row[j - 1]
    return table


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    return _lcs_table(a, b)[len(a)][len(b)]


def rouge_l(
    candidate: str,
    reference: str,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> MetricTriple:
    """LCS-based precision/recall/F1 over token sequences."""
    cand = tokenize(candidate, config)
    ref = tokenize(reference, config)
    if not cand or not ref:
        return MetricTriple.zero()
    lcs = lcs_length(cand, ref)
    return MetricTriple.from_pr(lcs / len(cand), lcs / len(ref))


def _lcs_hit_positions(ref: Sequence[str], cand: Sequence[str]) -> set[int]:
    """Positions of ``ref`` tokens matched by one canonical LCS alignment."""
    if not ref or not cand:
        return set()
    table = _lcs_table(ref, cand)
    hits: set[int] = set()
    i, j = len(ref), len(cand)
    while i > 0 and j > 0:
        if ref[i - 1] == cand[j - 1] and table[i][j] == table[i - 1][j - 1] + 1:
            hits.add(i - 1)
            i -= 1
            j -= 1
        elif table[i - 1][j] >= table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    return hits


def rouge_lsum(
    candidate_sents: Iterable[str],
    reference_sents: Iterable[str],
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> MetricTriple:
    """Summary-level LCS: per reference sentence, the union of LCS matches
    against every candidate sentence, with hits clipped by token counts so
    precision stays bounded. Collapses to plain ROUGE-L when both sides are
    single sentences."""
    cand_tokens = [tokenize(s, config) for s in candidate_sents]
    ref_tokens = [tokenize(s, config) for s in reference_sents]
    total_cand = sum(len(t) for t in cand_tokens)
    total_ref = sum(len(t) for t in ref_tokens)
    if total_cand == 0 or total_ref == 0:
        return MetricTriple.zero()
    remaining_cand = Counter(t for sent in cand_tokens for t in sent)
    remaining_ref = Counter(t for sent in ref_tokens for t in sent)
    hits = 0
    for ref_sent in ref_tokens:
        union: set[int] = set()
        for cand_sent in cand_tokens:
            union |= _lcs_hit_positions(ref_sent, cand_sent)
        for pos in sorted(union):
            token = ref_sent[pos]
            if remaining_cand[token] > 0 and remaining_ref[token] > 0:
                hits += 1
                remaining_cand[token] -= 1
                remaining_ref[token] -= 1
    return MetricTriple.from_pr(hits / total_cand, hits / total_ref)


def unigram_overlap_fraction(
    sentence: str,
    summary: str,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> float:
    """Fraction of the sentence's distinct tokens that appear in the summary."""
    sent_types = set(tokenize(sentence, config))
    if not sent_types:
        return 0.0
    summary_types = set(tokenize(summary, config))
    return len(sent_types & summary_types) / len(sent_types)


ROUGE_METRICS = ("rouge1", "rouge2", "rougeL", "rougeLsum")


def rouge_suite(
    candidate_sents: Sequence[str],
    reference_sents: Sequence[str],
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> dict[str, MetricTriple]:
    """All four reported ROUGE variants for a candidate/reference summary pair."""
    candidate = " ".join(candidate_sents)
    reference = " ".join(reference_sents)
    return {
        "rouge1": rouge_n(candidate, reference, 1, config),
        "rouge2": rouge_n(candidate, reference, 2, config),
        "rougeL": rouge_l(candidate, reference, config),
        "rougeLsum": rouge_lsum(candidate_sents, reference_sents, config),
    }


SENTENCE_METRICS = ("rouge1", "rouge2", "rougeL")


def sentence_scorer(
    metric: str,
    target: str,
    config: TokenizerConfig = DEFAULT_TOKENIZER,
) -> Callable[[str], float]:
    """F1 scorer for candidate sentences against one fixed target sentence."""
    if metric == "rougeL":
        return lambda text: rouge_l(text, target, config).f1
    if metric == "rouge1":
        return lambda text: rouge_n(text, target, 1, config).f1
    if metric == "rouge2":
        return lambda text: rouge_n(text, target, 2, config).f1
    raise ValueError(f"unknown sentence metric {metric!r}")


# --- Porter stemmer ---------------------------------------------------------
#
# Classic Porter (1980) suffix stripping, kept local so the scorer has no
# lexicon dependencies. Only consulted when TokenizerConfig.use_stemmer is on.

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    forms = "".join("c" if _is_consonant(stem, i) else "v" for i in range(len(stem)))
    count = 0
    prev = ""
    for ch in forms:
        if prev == "v" and ch == "c":
            count += 1
        prev = ch
    return count


def _contains_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
    ):
        return False
    return word[-1] not in "wxy"


def _replace_suffix(word: str, suffix: str, repl: str, min_measure: int) -> str | None:
    if not word.endswith(suffix):
        return None
    stem = word[: len(word) - len(suffix)]
    if _measure(stem) > min_measure:
        return stem + repl
    return word


_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
]

_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]

_STEP4 = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment",
    "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def porter_stem(word: str) -> str:
    if len(word) <= 2:
        return word

    # Step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("ss"):
        pass
    elif word.endswith("s"):
        word = word[:-1]

    # Step 1b
    if word.endswith("eed"):
        stem = word[:-3]
        if _measure(stem) > 0:
            word = word[:-1]
    else:
        stripped = None
        if word.endswith("ed") and _contains_vowel(word[:-2]):
            stripped = word[:-2]
        elif word.endswith("ing") and _contains_vowel(word[:-3]):
            stripped = word[:-3]
        if stripped is not None:
            word = stripped
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_consonant(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure(word) == 1 and _ends_cvc(word):
                word += "e"

    # Step 1c
    if word.endswith("y") and _contains_vowel(word[:-1]):
        word = word[:-1] + "i"

    # Steps 2 and 3: longest matching suffix wins, then the rule either
    # applies or the step is done.
    for table in (_STEP2, _STEP3):
        for suffix, repl in table:
            if word.endswith(suffix):
                replaced = _replace_suffix(word, suffix, repl, 0)
                if replaced is not None:
                    word = replaced
                break

    # Step 4
    for suffix in _STEP4:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if _measure(stem) > 1:
                if suffix == "ion" and stem and stem[-1] not in "st":
                    break
                word = stem
            break

    # Step 5a
    if word.endswith("e"):
        stem = word[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            word = stem

    # Step 5b
    if _measure(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
        word = word[:-1]

    return word
