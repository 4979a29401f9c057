"""spforge: searchable, executable summarization programs.

Summaries are represented as ordered lists of binary trees over document
sentences, built from three sentence operations (fusion, compression,
paraphrase). The package searches oracle programs that reproduce reference
summaries, parses and executes bracketed program strings, and ships the
baselines, evaluation and service layers around them.
"""

__version__ = "0.1.0"

from .core import (
    Document,
    ModuleKind,
    SPNode,
    SPTree,
    SummarizationProgram,
    SummaryTarget,
    concat_summary,
    structure_signature,
    validate_tree,
)
from .backends import (
    BackendUnavailable,
    CandidateSet,
    EmptyGeneration,
    ModuleRequest,
    ReferenceBackend,
    RemoteBackend,
)
from .dsl import ParseError, ProgramSkeleton, check_wellformed, parse, serialize
from .executor import ExecutionConfig, execute_first_wellformed, execute_skeleton
from .rouge import MetricTriple, TokenizerConfig, rouge_l, rouge_lsum, rouge_n, rouge_suite
from .search import SearchConfig, SearchResult, search_tree, select_top_k, sp_search

__all__ = [
    "__version__",
    "BackendUnavailable",
    "CandidateSet",
    "Document",
    "EmptyGeneration",
    "ExecutionConfig",
    "MetricTriple",
    "ModuleKind",
    "ModuleRequest",
    "ParseError",
    "ProgramSkeleton",
    "ReferenceBackend",
    "RemoteBackend",
    "SearchConfig",
    "SearchResult",
    "SPNode",
    "SPTree",
    "SummarizationProgram",
    "SummaryTarget",
    "TokenizerConfig",
    "check_wellformed",
    "concat_summary",
    "execute_first_wellformed",
    "execute_skeleton",
    "parse",
    "rouge_l",
    "rouge_lsum",
    "rouge_n",
    "rouge_suite",
    "search_tree",
    "select_top_k",
    "serialize",
    "sp_search",
    "structure_signature",
    "validate_tree",
]
