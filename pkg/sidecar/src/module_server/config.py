"""Server configuration: model specs per operation, decoding and batching.

Model specs are strings: ``hf:<name-or-path>`` loads a seq2seq checkpoint via
transformers, ``stub`` serves the built-in deterministic test model. All
settings come from environment variables:

    SP_MODULES_FUSION / SP_MODULES_COMPRESSION / SP_MODULES_PARAPHRASE
    SP_MODULES_BEAM (default 5)   SP_MODULES_MAX_BATCH (default 8)
    SP_MODULES_LINGER_MS (default 5)   SP_MODULES_DEVICE (default cpu)
    SP_MODULES_PORT (default 8801)
"""

from __future__ import annotations

import os
from dataclasses import dataclass

KINDS = ("fusion", "compression", "paraphrase")

_ARITY = {"fusion": 2, "compression": 1, "paraphrase": 1}


def arity(kind: str) -> int:
    return _ARITY[kind]


@dataclass(frozen=True)
class ServerConfig:
    fusion_model: str
    compression_model: str
    paraphrase_model: str
    beam_width: int = 5
    max_batch_size: int = 8
    linger_ms: float = 5.0
    device: str = "cpu"
    port: int = 8801

    def __post_init__(self) -> None:
        if self.beam_width < 1:
            raise ValueError("beam width must be >= 1")
        if self.max_batch_size < 1:
            raise ValueError("max batch size must be >= 1")

    def model_spec(self, kind: str) -> str:
        return {
            "fusion": self.fusion_model,
            "compression": self.compression_model,
            "paraphrase": self.paraphrase_model,
        }[kind]

    @staticmethod
    def from_env() -> "ServerConfig":
        missing = [
            f"SP_MODULES_{kind.upper()}"
            for kind in KINDS
            if not os.environ.get(f"SP_MODULES_{kind.upper()}")
        ]
        if missing:
            raise RuntimeError(f"missing model configuration: {', '.join(missing)}")
        return ServerConfig(
            fusion_model=os.environ["SP_MODULES_FUSION"],
            compression_model=os.environ["SP_MODULES_COMPRESSION"],
            paraphrase_model=os.environ["SP_MODULES_PARAPHRASE"],
            beam_width=int(os.environ.get("SP_MODULES_BEAM", "5")),
            max_batch_size=int(os.environ.get("SP_MODULES_MAX_BATCH", "8")),
            linger_ms=float(os.environ.get("SP_MODULES_LINGER_MS", "5")),
            device=os.environ.get("SP_MODULES_DEVICE", "cpu"),
            port=int(os.environ.get("SP_MODULES_PORT", "8801")),
        )

    @staticmethod
    def for_stub(**overrides) -> "ServerConfig":
        """Stub models for contract tests and local development."""
        defaults = dict(
            fusion_model="stub", compression_model="stub", paraphrase_model="stub"
        )
        defaults.update(overrides)
        return ServerConfig(**defaults)
