"""Corpus evaluation tables, bootstrap significance, and the sweep harness.

Scores are stored in [0, 1] internally; report layers scale by 100.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import IO, Sequence

import numpy as np

from .backends import ModuleBackend
from .core import SummaryTarget
from .corpus import CorpusRecord
from .rouge import ROUGE_METRICS, TokenizerConfig, DEFAULT_TOKENIZER, rouge_suite
from .search import SearchConfig, sp_search


class LengthMismatch(ValueError):
    """A system's output list is not aligned with the references."""


@dataclass
class EvalReport:
    systems: dict[str, dict[str, float]]  # system -> metric -> mean x100
    per_example: dict[str, list[dict[str, float]]]  # f1 in [0,1] per example
    p_values: dict[str, dict[str, float]] = field(default_factory=dict)  # "A>B"
    n_examples: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_examples": self.n_examples,
                "systems": self.systems,
                "p_values": self.p_values,
                "per_example": self.per_example,
            },
            indent=2,
        )

    def render_table(self) -> str:
        """Aligned text table in the usual report layout."""
        headers = ["System", "R1", "R2", "RL", "RLsum"]
        rows = [
            [name] + [f"{self.systems[name][m]:.2f}" for m in ROUGE_METRICS]
            for name in self.systems
        ]
        widths = [max(len(r[i]) for r in [headers] + rows) for i in range(len(headers))]
        lines = [
            "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
            "  ".join("-" * w for w in widths),
        ]
        for row in rows:
            lines.append(
                "  ".join(
                    cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
                    for i, cell in enumerate(row)
                )
            )
        return "\n".join(lines)


def bootstrap_pvalue(
    a: Sequence[float],
    b: Sequence[float],
    resamples: int = 10_000,
    seed: int = 0,
) -> float:
    """One-sided paired bootstrap p-value for mean(a) > mean(b)."""
    if len(a) != len(b):
        raise LengthMismatch(f"paired samples differ in length: {len(a)} vs {len(b)}")
    diffs = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    rng = np.random.default_rng(seed)
    indices = rng.integers(0, len(diffs), size=(resamples, len(diffs)))
    means = diffs[indices].mean(axis=1)
    return float((np.count_nonzero(means <= 0) + 1) / (resamples + 1))


def evaluate(
    system_outputs: dict[str, Sequence[Sequence[str]]],
    references: Sequence[Sequence[str]],
    bootstrap: bool = True,
    resamples: int = 10_000,
    seed: int = 0,
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
) -> EvalReport:
    """Mean ROUGE (x100) per system plus paired bootstrap p-values.

    Each system maps to one summary (list of sentences) per reference; empty
    summaries are allowed and score zero.
    """
    n = len(references)
    for name, outputs in system_outputs.items():
        if len(outputs) != n:
            raise LengthMismatch(f"system {name!r} has {len(outputs)} outputs for {n} references")

    per_example: dict[str, list[dict[str, float]]] = {}
    for name, outputs in system_outputs.items():
        scores = []
        for output, reference in zip(outputs, references):
            suite = rouge_suite(list(output), list(reference), tokenizer)
            scores.append({metric: suite[metric].f1 for metric in ROUGE_METRICS})
        per_example[name] = scores

    systems = {
        name: {
            metric: 100.0 * sum(s[metric] for s in scores) / n if n else 0.0
            for metric in ROUGE_METRICS
        }
        for name, scores in per_example.items()
    }

    p_values: dict[str, dict[str, float]] = {}
    if bootstrap and n > 0:
        for first, second in combinations(system_outputs, 2):
            for metric in ROUGE_METRICS:
                a = [s[metric] for s in per_example[first]]
                b = [s[metric] for s in per_example[second]]
                if sum(a) >= sum(b):
                    better, worse, x, y = first, second, a, b
                else:
                    better, worse, x, y = second, first, b, a
                key = f"{better}>{worse}"
                p_values.setdefault(key, {})[metric] = bootstrap_pvalue(
                    x, y, resamples=resamples, seed=seed
                )

    return EvalReport(systems=systems, per_example=per_example, p_values=p_values, n_examples=n)


# --- hyperparameter sweeps ------------------------------------------------------


@dataclass
class SweepRow:
    k: int
    queue_size: int
    max_candidates: int
    max_height: int
    rouge: dict[str, float]  # means x100
    mean_seconds: float
    n_examples: int


def sweep(
    records: Sequence[CorpusRecord],
    configs: Sequence[SearchConfig],
    backend: ModuleBackend,
) -> list[SweepRow]:
    """One row per config: mean ROUGE of searched summaries and mean seconds
    per sample measured from the search traces."""
    rows = []
    for config in configs:
        references: list[list[str]] = []
        outputs: list[list[str]] = []
        total_seconds = 0.0
        for record in records:
            if record.summary is None:
                continue
            result = sp_search(
                record.to_document(), SummaryTarget(record.summary), config, backend
            )
            outputs.append([t.root.text for t in result.program.trees])
            references.append(list(record.summary))
            total_seconds += result.total_ms / 1000.0
        n = len(references)
        report = evaluate({"search": outputs}, references, bootstrap=False)
        rows.append(
            SweepRow(
                k=config.k,
                queue_size=config.queue_size,
                max_candidates=config.max_candidates,
                max_height=config.max_height,
                rouge=report.systems["search"],
                mean_seconds=total_seconds / n if n else 0.0,
                n_examples=n,
            )
        )
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], stream: IO[str]) -> None:
    writer = csv.writer(stream)
    writer.writerow(
        ["k", "queue_size", "max_candidates", "max_height"]
        + list(ROUGE_METRICS)
        + ["mean_seconds", "n_examples"]
    )
    for row in rows:
        writer.writerow(
            [row.k, row.queue_size, row.max_candidates, row.max_height]
            + [f"{row.rouge[m]:.2f}" for m in ROUGE_METRICS]
            + [f"{row.mean_seconds:.3f}", row.n_examples]
        )
