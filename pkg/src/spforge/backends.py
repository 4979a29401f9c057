"""Sentence-operation backends.

A backend turns a `ModuleRequest` (kind + input sentences + candidate budget)
into a ranked `CandidateSet`. Two implementations ship here: a deterministic
rule-based reference backend used for search experiments and tests, and an
HTTP client for an inference sidecar speaking the wire contract

    POST /v1/modules/execute        {"kind","inputs","max_candidates"} -> {"candidates":[...]}
    POST /v1/modules/execute_batch  {"requests":[...]} -> {"results":[{"candidates":[...]}|{"error":...}]}

Backends never see the search target; they are pure functions of the request.
"""

from __future__ import annotations

import re
import threading
import time
from dataclasses import dataclass
from typing import Sequence

import httpx

from .core import MODULE_KINDS, ModuleKind


class BackendUnavailable(RuntimeError):
    """Remote transport failed after retries, or the server answered 5xx."""


class EmptyGeneration(RuntimeError):
    """The backend produced nothing usable for a request."""


@dataclass(frozen=True)
class ModuleRequest:
    kind: ModuleKind
    inputs: tuple[str, ...]
    max_candidates: int = 5

    def __post_init__(self) -> None:
        if len(self.inputs) != self.kind.arity:
            raise ValueError(
                f"{self.kind.value} takes {self.kind.arity} input(s), got {len(self.inputs)}"
            )
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")
        if any(not s.strip() for s in self.inputs):
            raise ValueError("inputs must be non-empty sentences")
        object.__setattr__(self, "inputs", tuple(self.inputs))


@dataclass(frozen=True)
class CandidateSet:
    """Non-empty, backend-ranked candidate sentences, best first."""

    candidates: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.candidates:
            raise ValueError("candidate set must not be empty")
        if any(not c.strip() for c in self.candidates):
            raise ValueError("candidates must be non-empty")
        object.__setattr__(self, "candidates", tuple(self.candidates))


class ModuleBackend:
    """Contract shared by all backends; subclasses override `execute`."""

    supported_kinds: frozenset[ModuleKind] = frozenset(MODULE_KINDS)

    def execute(self, request: ModuleRequest) -> CandidateSet:
        raise NotImplementedError

    def execute_batch(self, requests: Sequence[ModuleRequest]) -> list[CandidateSet | None]:
        """Positionally aligned results; None marks a per-item empty generation."""
        results: list[CandidateSet | None] = []
        for request in requests:
            try:
                results.append(self.execute(request))
            except EmptyGeneration:
                results.append(None)
        return results


_TERMINAL = re.compile(r"[.!?]+$")
_PARENTHETICAL = re.compile(r"\s*\([^()]*\)")
_SPACES = re.compile(r"\s+")


def _split_terminal(sentence: str) -> tuple[str, str]:
    sentence = sentence.strip()
    match = _TERMINAL.search(sentence)
    if match:
        return sentence[: match.start()].rstrip(), match.group(0)
    return sentence, ""


def _clean(text: str) -> str:
    return _SPACES.sub(" ", text).strip()


# Small stopword list for deciding which tokens carry content.
_STOPWORDS = frozenset(
    "a an the and or but if then than as of in on at by for to from with "
    "without is are was were be been being it its this that these those "
    "he she they we you i his her their our your not no so do does did "
    "has have had will would can could may might into over under".split()
)


def content_types(sentence: str) -> set[str]:
    """Distinct lowercased alphanumeric tokens minus stopwords."""
    tokens = re.findall(r"[0-9A-Za-z]+", sentence.lower())
    return {t for t in tokens if t not in _STOPWORDS}


# Bidirectional synonym table for the reference paraphraser.
_SYNONYM_PAIRS = [
    ("big", "large"), ("fast", "quick"), ("begin", "start"), ("help", "assist"),
    ("buy", "purchase"), ("show", "display"), ("said", "stated"), ("make", "build"),
    ("use", "employ"), ("find", "locate"), ("get", "obtain"), ("end", "finish"),
    ("happy", "glad"), ("small", "little"), ("smart", "clever"), ("rich", "wealthy"),
    ("old", "ancient"), ("new", "novel"), ("keep", "retain"), ("need", "require"),
    ("ask", "request"), ("tell", "inform"), ("leave", "depart"), ("choose", "select"),
]

SYNONYMS: dict[str, str] = {}
for _a, _b in _SYNONYM_PAIRS:
    SYNONYMS[_a] = _b
    SYNONYMS[_b] = _a

_ARTICLES = {"a": "the", "an": "the", "the": "a"}


def _match_case(template: str, word: str) -> str:
    if template[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


class ReferenceBackend(ModuleBackend):
    """Deterministic rule-based stand-in for the neural modules.

    Shape-correct by construction: compression candidates are strictly
    shorter, paraphrase candidates differ from the input while keeping its
    content words, and every fusion candidate carries tokens from both
    inputs. Identical requests always yield identical candidate sets.
    """

    def execute(self, request: ModuleRequest) -> CandidateSet:
        if request.kind is ModuleKind.COMPRESSION:
            candidates = self._compress(request.inputs[0])
        elif request.kind is ModuleKind.PARAPHRASE:
            candidates = self._paraphrase(request.inputs[0])
        else:
            candidates = self._fuse(request.inputs[0], request.inputs[1])
        inputs = {_clean(s) for s in request.inputs}
        deduped: list[str] = []
        for cand in candidates:
            cand = _clean(cand)
            if cand and cand not in inputs and cand not in deduped:
                deduped.append(cand)
        deduped = deduped[: request.max_candidates]
        if not deduped:
            raise EmptyGeneration(f"no usable {request.kind.value} output")
        return CandidateSet(tuple(deduped))

    def _compress(self, sentence: str) -> list[str]:
        core, terminal = _split_terminal(sentence)
        n_tokens = len(core.split())
        out: list[str] = []

        def push(candidate_core: str) -> None:
            candidate_core = _clean(candidate_core).rstrip(",;")
            if candidate_core and len(candidate_core.split()) < n_tokens:
                out.append(candidate_core + terminal)

        if "," in core:
            push(core[: core.rindex(",")])
        if "(" in core:
            push(_PARENTHETICAL.sub("", core))
        tokens = core.split()
        for drop in range(1, len(tokens) - 1):
            push(" ".join(tokens[: len(tokens) - drop]))
        return out

    def _paraphrase(self, sentence: str) -> list[str]:
        core, terminal = _split_terminal(sentence)
        tokens = core.split()
        out: list[str] = []

        toggled = [
            _match_case(t, _ARTICLES[t.lower()]) if t.lower() in _ARTICLES else t
            for t in tokens
        ]
        if toggled != tokens:
            out.append(" ".join(toggled) + terminal)

        # Synonym substitutions are budgeted so candidates keep at least 80%
        # of the input's content-word types.
        n_content = len(content_types(sentence))
        budget = n_content // 5
        hits = [
            (i, SYNONYMS[t.lower().strip(",;:")])
            for i, t in enumerate(tokens)
            if t.lower().strip(",;:") in SYNONYMS
        ]
        if budget >= 1:
            for i, replacement in hits:
                swapped = list(tokens)
                trailing = tokens[i][len(tokens[i].rstrip(",;:")):]
                swapped[i] = _match_case(tokens[i], replacement) + trailing
                out.append(" ".join(swapped) + terminal)
        if budget >= 2 and len(hits) >= 2:
            swapped = list(tokens)
            for i, replacement in hits[:budget]:
                trailing = tokens[i][len(tokens[i].rstrip(",;:")):]
                swapped[i] = _match_case(tokens[i], replacement) + trailing
            out.append(" ".join(swapped) + terminal)

        # Last resort keeps the op total: flip the terminal punctuation.
        out.append(core if terminal else core + ".")
        return out

    def _fuse(self, first: str, second: str) -> list[str]:
        core1, _ = _split_terminal(first)
        core2, terminal2 = _split_terminal(second)
        terminal = terminal2 or "."

        def first_clause(core: str) -> str:
            clause = core.split(",")[0].strip() if "," in core else core
            return clause if content_types(clause) else core

        def main_clause(core: str) -> str:
            clause = core.rsplit(",", 1)[-1].strip() if "," in core else core
            return clause if content_types(clause) else core

        tokens1 = core1.split()
        tokens2 = core2.split()
        half1 = " ".join(tokens1[: max(1, (len(tokens1) + 1) // 2)])
        half2 = " ".join(tokens2[len(tokens2) // 2 :])

        def splice(left: str, right: str) -> str:
            right = right[:1].lower() + right[1:] if right[:1].isupper() else right
            return f"{left.rstrip(',;')} and {right}{terminal}"

        out = [splice(first_clause(core1), main_clause(core2)), splice(core1, core2)]
        if content_types(half1) and content_types(half2):
            out.append(splice(half1, half2))
        return out


class DisabledKindsBackend(ModuleBackend):
    """Ablation wrapper hiding one or more operation kinds from the search."""

    def __init__(self, inner: ModuleBackend, disabled: Sequence[ModuleKind]):
        self.inner = inner
        self.supported_kinds = inner.supported_kinds - frozenset(disabled)

    def execute(self, request: ModuleRequest) -> CandidateSet:
        if request.kind not in self.supported_kinds:
            raise EmptyGeneration(f"{request.kind.value} module is disabled")
        return self.inner.execute(request)

    def execute_batch(self, requests: Sequence[ModuleRequest]) -> list[CandidateSet | None]:
        results: list[CandidateSet | None] = [None] * len(requests)
        forwarded = [(i, r) for i, r in enumerate(requests) if r.kind in self.supported_kinds]
        if forwarded:
            inner_results = self.inner.execute_batch([r for _, r in forwarded])
            for (i, _), result in zip(forwarded, inner_results):
                results[i] = result
        return results


class RemoteBackend(ModuleBackend):
    """Client for a module-inference sidecar speaking the wire contract.

    Retries transport failures twice with exponential backoff. Concurrent
    callers share one connection pool; `max_in_flight` bounds concurrency.
    """

    def __init__(
        self,
        base_url: str,
        timeout_ms: int = 30_000,
        retries: int = 2,
        backoff_s: float = 0.25,
        max_in_flight: int = 8,
        client: httpx.Client | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.retries = retries
        self.backoff_s = backoff_s
        self._client = client or httpx.Client(timeout=timeout_ms / 1000.0)
        self._slots = threading.Semaphore(max_in_flight)

    def close(self) -> None:
        self._client.close()

    def _post(self, path: str, payload: dict) -> dict:
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff_s * (2 ** (attempt - 1)))
            try:
                with self._slots:
                    response = self._client.post(self.base_url + path, json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = BackendUnavailable(
                    f"{path} returned {response.status_code}: {response.text[:200]}"
                )
                continue
            if response.status_code != 200:
                raise BackendUnavailable(
                    f"{path} returned {response.status_code}: {response.text[:200]}"
                )
            return response.json()
        raise BackendUnavailable(f"POST {path} failed after {self.retries + 1} attempts: {last_error}")

    @staticmethod
    def _to_payload(request: ModuleRequest) -> dict:
        return {
            "kind": request.kind.value,
            "inputs": list(request.inputs),
            "max_candidates": request.max_candidates,
        }

    @staticmethod
    def _parse_candidates(body: dict, budget: int) -> CandidateSet:
        candidates = body.get("candidates")
        if not isinstance(candidates, list) or not candidates:
            raise EmptyGeneration("server returned no candidates")
        if any(not isinstance(c, str) or not c.strip() for c in candidates):
            raise BackendUnavailable("server returned malformed candidates")
        return CandidateSet(tuple(candidates[:budget]))

    def execute(self, request: ModuleRequest) -> CandidateSet:
        body = self._post("/v1/modules/execute", self._to_payload(request))
        if "error" in body:
            raise EmptyGeneration(str(body["error"]))
        return self._parse_candidates(body, request.max_candidates)

    def execute_batch(self, requests: Sequence[ModuleRequest]) -> list[CandidateSet | None]:
        if not requests:
            return []
        body = self._post(
            "/v1/modules/execute_batch",
            {"requests": [self._to_payload(r) for r in requests]},
        )
        results = body.get("results")
        if not isinstance(results, list) or len(results) != len(requests):
            raise BackendUnavailable("batch response not aligned with request")
        parsed: list[CandidateSet | None] = []
        for request, item in zip(requests, results):
            if not isinstance(item, dict) or "error" in item:
                parsed.append(None)
                continue
            try:
                parsed.append(self._parse_candidates(item, request.max_candidates))
            except EmptyGeneration:
                parsed.append(None)
        return parsed
