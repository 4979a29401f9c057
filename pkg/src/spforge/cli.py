"""Command-line frontend.

Exit codes: 0 success, 1 input error, 2 backend error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from .backends import BackendUnavailable, ModuleBackend, ReferenceBackend, RemoteBackend
from .baselines import structure_stats, leaves_baseline, topk_baseline
from .core import SummaryTarget
from .corpus import (
    CorpusRecord,
    MalformedLine,
    load_corpus,
    load_programs,
    save_programs,
)
from .dsl import ParseError, check_wellformed, parse
from .evaluate import evaluate, sweep, write_sweep_csv
from .executor import ExecutionConfig, execute_skeleton
from .pipeline import random_baseline, search_corpus
from .search import SearchConfig


def _add_backend_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", choices=["reference", "remote"], default="reference")
    parser.add_argument("--remote-url", default="http://127.0.0.1:8801")
    parser.add_argument("--timeout-ms", type=int, default=30_000)


def _add_search_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=4, help="initial document sentences")
    parser.add_argument("--queue-size", type=int, default=20, help="queue bound Q")
    parser.add_argument("--height", type=int, default=2, help="maximum tree height H")
    parser.add_argument("--gens", type=int, default=5, help="candidates per module call G")
    parser.add_argument("--metric", choices=["rougeL", "rouge1", "rouge2"], default="rougeL")


def _make_backend(args: argparse.Namespace) -> ModuleBackend:
    if args.backend == "remote":
        return RemoteBackend(args.remote_url, timeout_ms=args.timeout_ms)
    return ReferenceBackend()


def _make_config(args: argparse.Namespace) -> SearchConfig:
    return SearchConfig(
        k=args.k,
        queue_size=args.queue_size,
        max_height=args.height,
        max_candidates=args.gens,
        metric=args.metric,
    )


def _load_corpus(path: str) -> list[CorpusRecord]:
    with open(path, "r", encoding="utf-8") as handle:
        return load_corpus(handle)


def _write_summaries(path: str, records: list[CorpusRecord], summaries: list[list[str]]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record, summary in zip(records, summaries):
            handle.write(json.dumps({"id": record.id, "summary": summary}) + "\n")


def _read_summaries(path: str) -> dict[str, list[str]]:
    outputs: dict[str, list[str]] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            data = json.loads(line)
            if "id" not in data or "summary" not in data:
                raise MalformedLine(number, "expected {'id', 'summary'} objects")
            outputs[data["id"]] = data["summary"]
    return outputs


def cmd_search(args: argparse.Namespace) -> int:
    records = _load_corpus(args.corpus)
    config = _make_config(args)
    backend = _make_backend(args)
    programs = search_corpus(records, config, backend, parallel=args.parallel)
    with open(args.out, "w", encoding="utf-8") as handle:
        save_programs(programs, handle)
    mean_rl = sum(p.metrics["rougeL"]["f1"] for p in programs) / len(programs) if programs else 0.0
    print(f"searched {len(programs)} record(s); mean R-L {100 * mean_rl:.2f}; wrote {args.out}")
    return 0


def cmd_execute(args: argparse.Namespace) -> int:
    records = {r.id: r for r in _load_corpus(args.corpus)}
    backend = _make_backend(args)
    config = ExecutionConfig(max_candidates=args.gens, selection="top1")

    if args.dsl:
        record = records.get(args.id) if args.id else next(iter(records.values()))
        if record is None:
            print(f"error: record {args.id!r} not found", file=sys.stderr)
            return 1
        doc = record.to_document()
        skeleton = parse(args.dsl, len(doc.sentences))
        _, summary = execute_skeleton(skeleton, doc, backend, config)
        for sentence in summary:
            print(sentence)
        return 0

    if not args.programs:
        print("error: provide --dsl or --programs", file=sys.stderr)
        return 1
    with open(args.programs, "r", encoding="utf-8") as handle:
        program_records = load_programs(handle)
    executed = []
    for program_record in program_records:
        record = records.get(program_record.id)
        if record is None:
            print(f"error: corpus has no record {program_record.id!r}", file=sys.stderr)
            return 1
        doc = record.to_document()
        skeleton = parse(program_record.dsl, len(doc.sentences))
        target = SummaryTarget(record.summary) if record.summary and args.best_vs_target else None
        exec_config = ExecutionConfig(
            max_candidates=args.gens,
            selection="best_vs_target" if target else "top1",
        )
        _, summary = execute_skeleton(skeleton, doc, backend, exec_config, target)
        executed.append(summary)
    _write_summaries(args.out, [records[p.id] for p in program_records], executed)
    print(f"executed {len(executed)} program(s); wrote {args.out}")
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    records = _load_corpus(args.corpus)
    backend = _make_backend(args)
    if args.system == "topk":
        outputs = []
        for record in records:
            if record.summary is None:
                print(f"error: record {record.id!r} has no summary", file=sys.stderr)
                return 1
            outputs.append(topk_baseline(record.to_document(), SummaryTarget(record.summary), args.k))
    elif args.system == "leaves":
        if not args.programs:
            print("error: --system leaves requires --programs", file=sys.stderr)
            return 1
        with open(args.programs, "r", encoding="utf-8") as handle:
            program_records = {p.id: p for p in load_programs(handle)}
        outputs = []
        for record in records:
            program_record = program_records.get(record.id)
            if program_record is None:
                print(f"error: no searched program for {record.id!r}", file=sys.stderr)
                return 1
            outputs.append(leaves_baseline(program_record.to_program()))
    else:
        outputs = random_baseline(
            records,
            backend,
            seed=args.seed,
            extract_and_build=args.system == "random-extract",
            max_candidates=args.gens,
        )
    _write_summaries(args.out, records, outputs)
    print(f"wrote {args.system} baseline for {len(records)} record(s) to {args.out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    records = _load_corpus(args.corpus)
    references = []
    ids = []
    for record in records:
        if record.summary is None:
            print(f"error: record {record.id!r} has no reference summary", file=sys.stderr)
            return 1
        references.append(list(record.summary))
        ids.append(record.id)

    systems: dict[str, list[list[str]]] = {}
    for spec_item in args.systems:
        if "=" not in spec_item:
            print(f"error: --systems takes NAME=PATH, got {spec_item!r}", file=sys.stderr)
            return 1
        name, path = spec_item.split("=", 1)
        outputs = _read_summaries(path)
        missing = [i for i in ids if i not in outputs]
        if missing:
            print(f"error: {name} is missing outputs for {missing[:3]}...", file=sys.stderr)
            return 1
        systems[name] = [outputs[i] for i in ids]

    report = evaluate(systems, references, bootstrap=not args.no_bootstrap, seed=args.seed)
    print(report.render_table())
    if report.p_values:
        print()
        for pair, metrics in report.p_values.items():
            rendered = ", ".join(f"{m}={p:.4f}" for m, p in metrics.items())
            print(f"p-values {pair}: {rendered}")
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    with open(args.programs, "r", encoding="utf-8") as handle:
        program_records = load_programs(handle)
    programs = [p.to_program() for p in program_records]
    stats = structure_stats(programs)
    print(f"{stats.n_programs} program(s), {stats.n_trees} tree(s)")
    print("\nstructure frequencies:")
    for signature, frequency in stats.frequencies():
        print(f"  {100 * frequency:5.1f}%  {signature}")
    print("\ntree heights:", stats.height_histogram)
    print("distinct leaves per program:", stats.leaf_count_histogram)
    if args.out:
        payload = {
            "signatures": stats.signature_counts,
            "height_histogram": stats.height_histogram,
            "leaf_count_histogram": stats.leaf_count_histogram,
        }
        Path(args.out).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    records = _load_corpus(args.corpus)
    if args.limit:
        records = records[: args.limit]
    grid = json.loads(args.grid)
    axes = {
        "k": grid.get("k", [4]),
        "queue_size": grid.get("queue_size", grid.get("Q", [20])),
        "max_height": grid.get("max_height", grid.get("H", [2])),
        "max_candidates": grid.get("max_candidates", grid.get("G", [5])),
    }
    configs = [
        SearchConfig(k=k, queue_size=q, max_height=h, max_candidates=g, metric=args.metric)
        for k, q, h, g in itertools.product(
            axes["k"], axes["queue_size"], axes["max_height"], axes["max_candidates"]
        )
    ]
    backend = _make_backend(args)
    rows = sweep(records, configs, backend)
    with open(args.out, "w", encoding="utf-8", newline="") as handle:
        write_sweep_csv(rows, handle)
    for row in rows:
        rouge = "/".join(f"{row.rouge[m]:.2f}" for m in ("rouge1", "rouge2", "rougeL"))
        print(
            f"k={row.k} Q={row.queue_size} H={row.max_height} G={row.max_candidates}"
            f"  R1/R2/RL {rouge}  {row.mean_seconds:.3f}s/sample"
        )
    print(f"wrote {args.out}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    diagnostics = check_wellformed(args.dsl, args.doc_size)
    if not diagnostics:
        print("ok")
        return 0
    for diagnostic in diagnostics:
        print(diagnostic)
    return 1


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app

    app = create_app(
        backend=_make_backend(args),
        data_dir=args.data_dir,
        ui_dir=args.ui_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spforge",
        description="Search, execute and evaluate summarization programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="search oracle programs for a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    _add_search_options(p)
    _add_backend_options(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("execute", help="execute program strings against documents")
    p.add_argument("--corpus", required=True)
    p.add_argument("--programs", help="program records to re-execute")
    p.add_argument("--dsl", help="one-off program string")
    p.add_argument("--id", help="record id for --dsl (default: first record)")
    p.add_argument("--out", default="executed.jsonl")
    p.add_argument("--gens", type=int, default=5)
    p.add_argument("--best-vs-target", action="store_true")
    _add_backend_options(p)
    p.set_defaults(func=cmd_execute)

    p = sub.add_parser("baseline", help="extractive and random-program baselines")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--system",
        choices=["topk", "leaves", "random-joint", "random-extract"],
        default="topk",
    )
    p.add_argument("--programs", help="searched programs (for --system leaves)")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--gens", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    _add_backend_options(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("eval", help="ROUGE report over system output files")
    p.add_argument("--corpus", required=True)
    p.add_argument("--systems", nargs="+", required=True, metavar="NAME=PATH")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-bootstrap", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="structure statistics over searched programs")
    p.add_argument("--programs", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sweep", help="hyperparameter sweep with timing")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grid", default='{"k": [4], "queue_size": [20], "max_height": [2], "max_candidates": [5]}')
    p.add_argument("--limit", type=int, default=0, help="cap the number of records")
    p.add_argument("--metric", choices=["rougeL", "rouge1", "rouge2"], default="rougeL")
    _add_backend_options(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="check a program string for well-formedness")
    p.add_argument("--dsl", required=True)
    p.add_argument("--doc-size", type=int, required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8800)
    p.add_argument("--data-dir", default="./spforge-data")
    p.add_argument("--ui-dir", default=None)
    _add_backend_options(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BackendUnavailable as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 2
    except (MalformedLine, ParseError, FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
