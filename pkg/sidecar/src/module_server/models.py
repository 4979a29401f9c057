"""Text-operation models behind a single generate() interface.

A model takes a batch of items (each one or two input sentences) and returns
one candidate list per item, best first. The stub model is deterministic
string manipulation for tests and development; the seq2seq model wraps any
HuggingFace encoder-decoder checkpoint with beam search.
"""

from __future__ import annotations

from typing import Protocol, Sequence


class TextOpModel(Protocol):
    def generate(
        self, batch: Sequence[Sequence[str]], max_candidates: int
    ) -> list[list[str]]: ...


class ModelError(RuntimeError):
    pass


class StubModel:
    """Deterministic rule model: shape-correct candidates with no weights."""

    def __init__(self, kind: str):
        self.kind = kind

    def _one(self, inputs: Sequence[str], n: int) -> list[str]:
        if self.kind == "fusion":
            left = inputs[0].rstrip(" .!?")
            right = inputs[1].rstrip(" .!?")
            out = [f"{left} and {right}."]
            if n > 1:
                out.append(f"{left}, while {right}.")
            return out[:n]
        if self.kind == "compression":
            words = inputs[0].rstrip(" .!?").split()
            out = []
            for drop in range(1, len(words)):
                if len(words) - drop < 1:
                    break
                out.append(" ".join(words[: len(words) - drop]) + ".")
            return out[:n] or [inputs[0].rstrip(" .!?") + "."]
        words = inputs[0].rstrip(" .!?").split()
        out = []
        for shift in range(1, min(n, max(len(words) - 1, 1)) + 1):
            out.append(" ".join(words[shift:] + words[:shift]) + ".")
        return out[:n] or [inputs[0]]

    def generate(self, batch, max_candidates):
        return [self._one(inputs, max_candidates) for inputs in batch]


class Seq2SeqModel:
    """Beam-search wrapper over a HuggingFace seq2seq checkpoint.

    Fusion inputs are joined with the tokenizer's separator token so two
    sentences reach the encoder as one sequence, matching how sentence-pair
    fusion checkpoints are trained.
    """

    def __init__(self, name_or_path: str, beam_width: int, device: str = "cpu"):
        try:
            import torch
            from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
        except ImportError as exc:  # pragma: no cover - env without extras
            raise ModelError(
                "transformers/torch are required for hf: models; "
                "install the 'models' extra"
            ) from exc
        self._torch = torch
        self.beam_width = beam_width
        self.device = device
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(name_or_path)
            self.model = AutoModelForSeq2SeqLM.from_pretrained(name_or_path)
        except Exception as exc:
            raise ModelError(f"failed to load {name_or_path!r}: {exc}") from exc
        self.model.to(device)
        self.model.eval()

    def generate(self, batch, max_candidates):
        sep = self.tokenizer.sep_token or " "
        texts = [sep.join(inputs) for inputs in batch]
        n = min(max_candidates, self.beam_width)
        encoded = self.tokenizer(
            texts, return_tensors="pt", padding=True, truncation=True, max_length=256
        ).to(self.device)
        with self._torch.no_grad():
            output = self.model.generate(
                **encoded,
                num_beams=self.beam_width,
                num_return_sequences=n,
                max_length=128,
                early_stopping=True,
            )
        decoded = self.tokenizer.batch_decode(output, skip_special_tokens=True)
        grouped = [decoded[i * n : (i + 1) * n] for i in range(len(batch))]
        return [[c.strip() for c in group if c.strip()] or [texts[i]] for i, group in enumerate(grouped)]


def load_model(spec: str, beam_width: int, device: str, kind: str) -> TextOpModel:
    if spec == "stub":
        return StubModel(kind)
    if spec.startswith("hf:"):
        return Seq2SeqModel(spec[3:], beam_width, device)
    raise ModelError(f"unknown model spec {spec!r}; use 'stub' or 'hf:<name-or-path>'")
