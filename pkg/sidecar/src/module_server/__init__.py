"""Inference sidecar for sentence fusion, compression and paraphrase."""

__version__ = "0.1.0"
