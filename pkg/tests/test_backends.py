"""Backend contract tests: reference rules, batching, remote client."""

import json
import threading

import httpx
import pytest

from spforge.backends import (
    BackendUnavailable,
    CandidateSet,
    DisabledKindsBackend,
    EmptyGeneration,
    ModuleRequest,
    ReferenceBackend,
    RemoteBackend,
    content_types,
)
from spforge.core import ModuleKind
from spforge.rouge import tokenize


@pytest.fixture
def backend():
    return ReferenceBackend()


SENT_A = "The quick farmer can help the old bridge, near the valley."
SENT_B = "The small doctor can show the new market near the river."


class TestRequestContract:
    def test_arity_checked(self):
        with pytest.raises(ValueError):
            ModuleRequest(ModuleKind.FUSION, ("one sentence only",))
        with pytest.raises(ValueError):
            ModuleRequest(ModuleKind.COMPRESSION, ("a", "b"))

    def test_max_candidates_positive(self):
        with pytest.raises(ValueError):
            ModuleRequest(ModuleKind.COMPRESSION, ("a b c",), 0)

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            ModuleRequest(ModuleKind.COMPRESSION, ("   ",))

    def test_candidate_set_nonempty(self):
        with pytest.raises(ValueError):
            CandidateSet(())


class TestReferenceCompression:
    def test_trailing_drops(self, backend):
        result = backend.execute(ModuleRequest(ModuleKind.COMPRESSION, ("alpha beta gamma delta",), 3))
        assert result.candidates == ("alpha beta gamma", "alpha beta")

    def test_strictly_shorter(self, backend):
        request = ModuleRequest(ModuleKind.COMPRESSION, (SENT_A,), 5)
        n_input = len(SENT_A.split())
        for candidate in backend.execute(request).candidates:
            assert len(candidate.split()) < n_input

    def test_comma_clause_dropped_first(self, backend):
        result = backend.execute(ModuleRequest(ModuleKind.COMPRESSION, (SENT_A,), 5))
        assert result.candidates[0] == "The quick farmer can help the old bridge."

    def test_parenthetical_removed(self, backend):
        result = backend.execute(
            ModuleRequest(ModuleKind.COMPRESSION, ("alpha (a digression) beta gamma.",), 5)
        )
        assert "alpha beta gamma." in result.candidates

    def test_too_short_raises_empty_generation(self, backend):
        with pytest.raises(EmptyGeneration):
            backend.execute(ModuleRequest(ModuleKind.COMPRESSION, ("two words",), 5))

    def test_deterministic(self, backend):
        request = ModuleRequest(ModuleKind.COMPRESSION, (SENT_A,), 4)
        assert backend.execute(request) == backend.execute(request)


class TestReferenceParaphrase:
    def test_differs_but_keeps_content(self, backend):
        request = ModuleRequest(ModuleKind.PARAPHRASE, (SENT_A,), 5)
        source_content = content_types(SENT_A)
        for candidate in backend.execute(request).candidates:
            assert candidate != SENT_A
            shared = content_types(candidate) & source_content
            assert len(shared) >= 0.8 * len(source_content)

    def test_never_empty_even_without_articles(self, backend):
        result = backend.execute(ModuleRequest(ModuleKind.PARAPHRASE, ("gamma delta epsilon.",), 3))
        assert result.candidates
        assert all(c != "gamma delta epsilon." for c in result.candidates)

    def test_article_toggle_first(self, backend):
        result = backend.execute(ModuleRequest(ModuleKind.PARAPHRASE, (SENT_A,), 5))
        assert result.candidates[0].startswith("A quick farmer")


class TestReferenceFusion:
    def test_contains_content_from_both(self, backend):
        request = ModuleRequest(ModuleKind.FUSION, (SENT_A, SENT_B), 5)
        for candidate in backend.execute(request).candidates:
            assert content_types(candidate) & content_types(SENT_A)
            assert content_types(candidate) & content_types(SENT_B)

    def test_token_union_candidate_exists(self, backend):
        request = ModuleRequest(ModuleKind.FUSION, (SENT_A, SENT_B), 5)
        wanted = content_types(SENT_A) | content_types(SENT_B)
        assert any(
            content_types(c) >= wanted for c in backend.execute(request).candidates
        )

    def test_simple_splice(self, backend):
        result = backend.execute(ModuleRequest(ModuleKind.FUSION, ("a b.", "c d."), 1))
        tokens = set(tokenize(result.candidates[0]))
        assert {"a", "b", "c", "d"} <= tokens


class TestBatch:
    def test_empty_batch(self, backend):
        assert backend.execute_batch([]) == []

    def test_alignment_and_equivalence(self, backend):
        requests = [
            ModuleRequest(ModuleKind.COMPRESSION, (SENT_A,), 3),
            ModuleRequest(ModuleKind.FUSION, (SENT_A, SENT_B), 2),
            ModuleRequest(ModuleKind.PARAPHRASE, (SENT_B,), 3),
        ]
        batched = backend.execute_batch(requests)
        individual = [backend.execute(r) for r in requests]
        assert batched == individual

    def test_per_item_empty_generation(self, backend):
        requests = [
            ModuleRequest(ModuleKind.COMPRESSION, ("two words",), 3),
            ModuleRequest(ModuleKind.PARAPHRASE, (SENT_A,), 3),
        ]
        results = backend.execute_batch(requests)
        assert results[0] is None
        assert results[1] is not None


class TestDisabledKinds:
    def test_disabled_kind_hidden_and_refused(self, backend):
        wrapped = DisabledKindsBackend(backend, [ModuleKind.FUSION])
        assert ModuleKind.FUSION not in wrapped.supported_kinds
        with pytest.raises(EmptyGeneration):
            wrapped.execute(ModuleRequest(ModuleKind.FUSION, (SENT_A, SENT_B), 2))
        results = wrapped.execute_batch(
            [
                ModuleRequest(ModuleKind.FUSION, (SENT_A, SENT_B), 2),
                ModuleRequest(ModuleKind.COMPRESSION, (SENT_A,), 2),
            ]
        )
        assert results[0] is None and results[1] is not None


def _wire_handler(request: httpx.Request) -> httpx.Response:
    """In-test server speaking the module wire contract over MockTransport."""
    reference = ReferenceBackend()
    payload = json.loads(request.content)

    def run(item):
        try:
            module_request = ModuleRequest(
                ModuleKind(item["kind"]), tuple(item["inputs"]), item["max_candidates"]
            )
            return {"candidates": list(reference.execute(module_request).candidates)}
        except EmptyGeneration as exc:
            return {"error": str(exc)}

    if request.url.path.endswith("/execute_batch"):
        return httpx.Response(200, json={"results": [run(i) for i in payload["requests"]]})
    return httpx.Response(200, json=run(payload))


@pytest.fixture
def remote_pair():
    client = httpx.Client(transport=httpx.MockTransport(_wire_handler))
    remote = RemoteBackend("http://sidecar", client=client)
    yield remote, ReferenceBackend()
    remote.close()


class TestRemoteBackend:
    def test_matches_reference_over_the_wire(self, remote_pair):
        remote, reference = remote_pair
        request = ModuleRequest(ModuleKind.FUSION, (SENT_A, SENT_B), 3)
        assert remote.execute(request) == reference.execute(request)

    def test_batch_alignment_with_errors(self, remote_pair):
        remote, reference = remote_pair
        requests = [
            ModuleRequest(ModuleKind.COMPRESSION, ("two words",), 3),
            ModuleRequest(ModuleKind.PARAPHRASE, (SENT_A,), 3),
        ]
        results = remote.execute_batch(requests)
        assert results[0] is None
        assert results[1] == reference.execute(requests[1])

    def test_unreachable_server_raises_backend_unavailable(self):
        def refuse(request):
            raise httpx.ConnectError("refused")

        client = httpx.Client(transport=httpx.MockTransport(refuse))
        remote = RemoteBackend("http://nowhere", client=client, retries=1, backoff_s=0.0)
        with pytest.raises(BackendUnavailable):
            remote.execute(ModuleRequest(ModuleKind.COMPRESSION, (SENT_A,), 2))

    def test_retries_then_succeeds(self):
        calls = {"n": 0}

        def flaky(request):
            calls["n"] += 1
            if calls["n"] < 3:
                return httpx.Response(500, text="boom")
            return httpx.Response(200, json={"candidates": ["ok output"]})

        client = httpx.Client(transport=httpx.MockTransport(flaky))
        remote = RemoteBackend("http://flaky", client=client, retries=2, backoff_s=0.0)
        result = remote.execute(ModuleRequest(ModuleKind.COMPRESSION, (SENT_A,), 2))
        assert result.candidates == ("ok output",)
        assert calls["n"] == 3

    def test_concurrent_calls_share_pool(self, remote_pair):
        remote, reference = remote_pair
        request = ModuleRequest(ModuleKind.PARAPHRASE, (SENT_B,), 3)
        expected = reference.execute(request)
        outcomes = []

        def call():
            outcomes.append(remote.execute(request))

        threads = [threading.Thread(target=call) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(o == expected for o in outcomes)
