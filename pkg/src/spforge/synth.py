"""Synthetic corpora whose summaries are compositions of reference-backend
operations over the document sentences.

Two flavors:

* ``reproducible``: every summary sentence is either a verbatim copy or a
  single reference-backend output over sentences the top-k ranking is
  guaranteed to select: content words are unique per document, fusion
  targets keep the full token union, and compression targets keep the bulk
  of their source. The search reconstructs these summaries exactly, which
  makes the corpus a clean demonstration against extractive baselines.
* ``rich``: adds two-step chains (fuse then compress, paraphrase then fuse)
  and larger documents, exercising pruning and full tree heights with no
  reproduction guarantee.

Per-example RNG streams derive from (seed, example index), so corpora are
reproducible item by item.
"""

from __future__ import annotations

import random

from .backends import ModuleRequest, ReferenceBackend, content_types
from .core import ModuleKind
from .corpus import CorpusRecord
from .rouge import tokenize

_ADJECTIVES = [
    "big", "fast", "small", "smart", "rich", "old", "new", "happy",
    "bright", "quiet", "tall", "sharp", "brave", "calm", "plain", "bold",
    "keen", "grand", "pale", "swift",
]
_VERBS = ["help", "buy", "show", "make", "use", "find", "get", "keep", "need", "tell"]
_NOUNS = [
    "engineer", "pilot", "farmer", "doctor", "artist", "mayor", "student",
    "driver", "judge", "singer", "guard", "chef", "clerk", "coach", "nurse",
]
_OBJECTS = [
    "bridge", "harbor", "engine", "garden", "market", "castle", "tunnel",
    "rocket", "statue", "library", "museum", "factory", "airport", "stadium",
]
_PLACES = [
    "valley", "river", "border", "village", "island", "desert", "forest",
    "meadow", "canyon", "plateau",
]

# Distractor sentences draw from a reserved vocabulary so they share nothing
# but stopwords with the summary and always rank below the source sentences.
_D_NOUNS = ["janitor", "violinist", "astronomer", "plumber", "referee", "senator", "umpire", "botanist"]
_D_OBJECTS = ["lantern", "compass", "anchor", "whistle", "ladder", "barrel", "kettle", "easel"]
_D_PLACES = ["glacier", "lagoon", "quarry", "marsh", "dune", "fjord", "grove", "reef"]


def _pick_different_tokens(rng: random.Random, candidates: tuple[str, ...], source: str) -> str | None:
    source_tokens = tokenize(source)
    usable = [c for c in candidates if tokenize(c) != source_tokens]
    return rng.choice(usable) if usable else None


class _ExampleBuilder:
    def __init__(self, rng: random.Random, n_doc: int, max_candidates: int):
        self.rng = rng
        self.backend = ReferenceBackend()
        self.max_candidates = max_candidates

        adjectives = rng.sample(_ADJECTIVES, 2 * n_doc)
        verbs = rng.sample(_VERBS, min(n_doc, len(_VERBS)))
        nouns = rng.sample(_NOUNS, min(n_doc, len(_NOUNS)))
        objects = rng.sample(_OBJECTS, min(n_doc, len(_OBJECTS)))
        places = rng.sample(_PLACES, min(n_doc, len(_PLACES)))
        d_nouns = rng.sample(_D_NOUNS, len(_D_NOUNS))
        d_objects = rng.sample(_D_OBJECTS, len(_D_OBJECTS))
        d_places = rng.sample(_D_PLACES, len(_D_PLACES))

        self.sentences: list[str] = []
        self._distractor_slots: list[int] = []
        for i in range(n_doc):
            comma = rng.random() < 0.5
            tail = f", near the {places[i % len(places)]}." if comma else f" near the {places[i % len(places)]}."
            self.sentences.append(
                f"The {adjectives[2 * i]} {nouns[i % len(nouns)]} can "
                f"{verbs[i % len(verbs)]} the {adjectives[2 * i + 1]} "
                f"{objects[i % len(objects)]}{tail}"
            )
        self._distractor_words = list(zip(d_nouns, d_objects, d_places))
        self.free = list(range(n_doc))
        rng.shuffle(self.free)

    def _take(self, count: int) -> list[int]:
        taken = sorted(self.free[:count])
        del self.free[:count]
        return taken

    def demote_unused(self) -> None:
        """Rewrite every unused sentence from the distractor vocabulary."""
        for slot, index in enumerate(self.free):
            noun, obj, place = self._distractor_words[slot % len(self._distractor_words)]
            self.sentences[index] = f"A {noun} watched the {obj} beside the {place}."

    def _candidates(self, kind: ModuleKind, inputs: tuple[str, ...]) -> tuple[str, ...]:
        return self.backend.execute(
            ModuleRequest(kind, inputs, max_candidates=self.max_candidates)
        ).candidates

    def copy(self) -> tuple[str, list[int]]:
        (i,) = self._take(1)
        return self.sentences[i], [i]

    def paraphrase(self) -> tuple[str, list[int]]:
        (i,) = self._take(1)
        source = self.sentences[i]
        chosen = _pick_different_tokens(
            self.rng, self._candidates(ModuleKind.PARAPHRASE, (source,)), source
        )
        return (chosen if chosen is not None else source), [i]

    def compression(self, first_only: bool) -> tuple[str, list[int]]:
        (i,) = self._take(1)
        candidates = self._candidates(ModuleKind.COMPRESSION, (self.sentences[i],))
        chosen = candidates[0] if first_only else self.rng.choice(candidates)
        return chosen, [i]

    def fusion(self, full_union: bool) -> tuple[str, list[int]]:
        i, j = self._take(2)
        left, right = self.sentences[i], self.sentences[j]
        candidates = self._candidates(ModuleKind.FUSION, (left, right))
        if full_union:
            wanted = content_types(left) | content_types(right)
            full = [c for c in candidates if content_types(c) >= wanted]
            chosen = full[0] if full else candidates[0]
        else:
            chosen = self.rng.choice(candidates)
        return chosen, [i, j]

    def fuse_then_compress(self) -> tuple[str, list[int]]:
        i, j = self._take(2)
        fused = self.rng.choice(
            self._candidates(ModuleKind.FUSION, (self.sentences[i], self.sentences[j]))
        )
        compressed = self._candidates(ModuleKind.COMPRESSION, (fused,))
        return self.rng.choice(compressed), [i, j]

    def paraphrase_then_fuse(self) -> tuple[str, list[int]]:
        i, j = self._take(2)
        rewritten = _pick_different_tokens(
            self.rng,
            self._candidates(ModuleKind.PARAPHRASE, (self.sentences[i],)),
            self.sentences[i],
        )
        left = rewritten if rewritten is not None else self.sentences[i]
        return (
            self.rng.choice(self._candidates(ModuleKind.FUSION, (left, self.sentences[j]))),
            [i, j],
        )


def _cap_recipes(recipes: list[str], budget: int = 4) -> list[str]:
    """Keep total source-sentence usage within the top-k selection budget."""
    capped: list[str] = []
    for recipe in recipes:
        cost = 2 if recipe in ("fusion", "fuse_then_compress", "paraphrase_then_fuse") else 1
        if budget - cost < 0:
            break
        budget -= cost
        capped.append(recipe)
    return capped or ["copy"]


def make_example(
    example_id: str,
    rng: random.Random,
    mode: str = "reproducible",
    max_candidates: int = 3,
) -> CorpusRecord:
    n_doc = 6 if mode == "reproducible" else 8
    builder = _ExampleBuilder(rng, n_doc, max_candidates)

    if mode == "reproducible":
        n_sum = rng.randint(1, 2)
        if rng.random() < 0.15:
            recipes = ["copy"] * n_sum
        else:
            first = rng.choice(["fusion", "fusion", "paraphrase", "compression"])
            rest = [
                rng.choice(["copy", "fusion", "paraphrase", "compression"])
                for _ in range(n_sum - 1)
            ]
            recipes = [first] + rest
    elif mode == "rich":
        n_sum = rng.randint(2, 4)
        deep = ["fuse_then_compress", "paraphrase_then_fuse"]
        shallow = ["copy", "fusion", "paraphrase", "compression"]
        recipes = [rng.choice(deep)] + [
            rng.choice(shallow + deep) for _ in range(n_sum - 1)
        ]
    else:
        raise ValueError(f"unknown corpus mode {mode!r}")
    recipes = _cap_recipes(recipes)

    guaranteed = mode == "reproducible"
    summary: list[str] = []
    used: list[int] = []
    for recipe in recipes:
        if recipe == "copy":
            text, indices = builder.copy()
        elif recipe == "paraphrase":
            text, indices = builder.paraphrase()
        elif recipe == "compression":
            text, indices = builder.compression(first_only=guaranteed)
        elif recipe == "fusion":
            text, indices = builder.fusion(full_union=guaranteed)
        elif recipe == "fuse_then_compress":
            text, indices = builder.fuse_then_compress()
        else:
            text, indices = builder.paraphrase_then_fuse()
        summary.append(text)
        used.extend(indices)

    builder.demote_unused()
    return CorpusRecord(
        id=example_id,
        document=tuple(builder.sentences),
        summary=tuple(summary),
        extracted=tuple(sorted(set(used))),
    )


def make_corpus(
    n_examples: int,
    seed: int = 0,
    mode: str = "reproducible",
    max_candidates: int = 3,
) -> list[CorpusRecord]:
    return [
        make_example(f"{mode}-{i:04d}", random.Random(f"{seed}:{i}"), mode, max_candidates)
        for i in range(n_examples)
    ]
