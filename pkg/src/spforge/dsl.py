"""Bracketed program strings: serialization, parsing, well-formedness.

Grammar (whitespace insignificant, commas tolerated between operands):

    Program := Tree (";" Tree)*
    Tree    := Leaf | "(" Leaf ")" | Kind "(" Arg+ ")"
    Arg     := Leaf | Tree
    Leaf    := "<D" int ">"          # 1-based sentence identifiers
    Kind    := "fusion" | "compression" | "paraphrase"

The checker reports every violation it can attribute, not only the first.
Structural sequence errors (an operator without an operand list, a missing
tree separator, a parenthesized group that is not a single identifier) are
reported under ArityMismatch with a precise message, since the diagnostic
vocabulary is fixed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import ModuleKind, SPNode, SummarizationProgram

VOCABULARY = {k.value for k in ModuleKind}

_TOKEN = re.compile(
    r"(?P<LEAF><D(?P<INDEX>\d+)>)|(?P<PUNCT>[();,])|(?P<WORD>[A-Za-z]+)|(?P<JUNK>[^\s();,]+)"
)


@dataclass(frozen=True)
class Diagnostic:
    code: str  # UnbalancedParens | OOVToken | ArityMismatch | BadIdentifier | EmptyProgram
    position: int
    message: str

    def __str__(self) -> str:
        return f"{self.code}@{self.position}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


@dataclass(frozen=True)
class ProgramSkeleton:
    """Program shape without texts or scores: roots of unexecuted trees."""

    trees: tuple[SPNode, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "trees", tuple(self.trees))

    @staticmethod
    def from_program(program: SummarizationProgram) -> "ProgramSkeleton":
        return ProgramSkeleton(tuple(_strip(t.root) for t in program.trees))


def _strip(node: SPNode) -> SPNode:
    if node.is_leaf:
        if node.leaf_index is None:
            raise ValueError("leaf node without an index cannot be serialized")
        return SPNode.leaf(node.leaf_index)
    return SPNode.internal(node.kind, tuple(_strip(c) for c in node.children))


def serialize(program: ProgramSkeleton | SummarizationProgram) -> str:
    """Canonical bracketed rendering; trees joined by " ; "."""
    if isinstance(program, SummarizationProgram):
        roots = [t.root for t in program.trees]
    else:
        roots = list(program.trees)
    return " ; ".join(_render_tree(r) for r in roots)


def serialize_tree(root: SPNode) -> str:
    return _render_tree(root)


def _render_tree(root: SPNode) -> str:
    if root.is_leaf:
        return f"( <D{root.leaf_index + 1}> )"
    return _render(root)


def _render(node: SPNode) -> str:
    if node.is_leaf:
        return f"<D{node.leaf_index + 1}>"
    args = " ".join(_render(c) for c in node.children)
    return f"{node.kind.value} ( {args} )"


@dataclass(frozen=True)
class _Token:
    type: str  # LEAF | LPAREN | RPAREN | SEMI | COMMA | KIND | OOV
    position: int
    text: str
    index: int | None = None  # 0-based leaf index for LEAF tokens


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    for match in _TOKEN.finditer(text):
        pos = match.start()
        if match.group("LEAF"):
            tokens.append(_Token("LEAF", pos, match.group(), int(match.group("INDEX")) - 1))
        elif match.group("PUNCT"):
            punct = match.group()
            kind = {"(": "LPAREN", ")": "RPAREN", ";": "SEMI", ",": "COMMA"}[punct]
            tokens.append(_Token(kind, pos, punct))
        elif match.group("WORD"):
            word = match.group()
            tokens.append(_Token("KIND" if word in VOCABULARY else "OOV", pos, word))
        else:
            tokens.append(_Token("OOV", pos, match.group()))
    return tokens


def check_wellformed(text: str, doc_size: int) -> list[Diagnostic]:
    """All detectable violations; empty list means the text parses."""
    _, diagnostics = _analyze(text, doc_size)
    return diagnostics


def parse(text: str, doc_size: int) -> ProgramSkeleton:
    skeleton, diagnostics = _analyze(text, doc_size)
    if diagnostics or skeleton is None:
        raise ParseError(diagnostics)
    return skeleton


def _analyze(text: str, doc_size: int) -> tuple[ProgramSkeleton | None, list[Diagnostic]]:
    diagnostics: list[Diagnostic] = []
    tokens = _lex(text)
    if not tokens:
        return None, [Diagnostic("EmptyProgram", 0, "program contains no tokens")]

    for token in tokens:
        if token.type == "OOV":
            diagnostics.append(
                Diagnostic("OOVToken", token.position, f"{token.text!r} is not in the vocabulary")
            )
        elif token.type == "LEAF" and not 0 <= token.index < doc_size:
            diagnostics.append(
                Diagnostic(
                    "BadIdentifier",
                    token.position,
                    f"{token.text} outside <D1>..<D{doc_size}>",
                )
            )

    depth = 0
    balanced = True
    for token in tokens:
        if token.type == "LPAREN":
            depth += 1
        elif token.type == "RPAREN":
            depth -= 1
            if depth < 0:
                diagnostics.append(
                    Diagnostic("UnbalancedParens", token.position, "unmatched ')'")
                )
                balanced = False
                depth = 0
    if depth > 0:
        diagnostics.append(
            Diagnostic("UnbalancedParens", tokens[-1].position, f"{depth} unclosed '('")
        )
        balanced = False

    roots: list[SPNode] | None = []
    if balanced:
        structural = [t for t in tokens if t.type != "OOV"]
        segments = _split_segments(structural)
        for segment, boundary_pos in segments:
            if not segment:
                diagnostics.append(
                    Diagnostic("EmptyProgram", boundary_pos, "empty tree between separators")
                )
                roots = None
                continue
            node = _parse_tree(segment, diagnostics)
            if node is None or roots is None:
                roots = None
            else:
                roots.append(node)
    else:
        roots = None

    if roots is not None and diagnostics:
        roots = None
    if roots is not None and not roots:
        diagnostics.append(Diagnostic("EmptyProgram", 0, "program contains no trees"))
        roots = None
    skeleton = ProgramSkeleton(tuple(roots)) if roots is not None else None
    return skeleton, diagnostics


def _split_segments(tokens: list[_Token]) -> list[tuple[list[_Token], int]]:
    segments: list[tuple[list[_Token], int]] = []
    current: list[_Token] = []
    depth = 0
    last_pos = 0
    for token in tokens:
        if token.type == "LPAREN":
            depth += 1
        elif token.type == "RPAREN":
            depth -= 1
        if token.type == "SEMI" and depth == 0:
            segments.append((current, token.position))
            current = []
            last_pos = token.position
            continue
        current.append(token)
    segments.append((current, last_pos))
    return segments


def _parse_tree(tokens: list[_Token], diagnostics: list[Diagnostic]) -> SPNode | None:
    node, consumed = _parse_node(tokens, 0, diagnostics)
    if consumed < len(tokens):
        extra = tokens[consumed]
        diagnostics.append(
            Diagnostic(
                "ArityMismatch",
                extra.position,
                f"unexpected {extra.text!r}; trees must be separated by ';'",
            )
        )
        return None
    return node


def _parse_node(
    tokens: list[_Token], start: int, diagnostics: list[Diagnostic]
) -> tuple[SPNode | None, int]:
    token = tokens[start]
    if token.type == "LEAF":
        return SPNode.leaf(max(token.index, 0)), start + 1

    if token.type == "LPAREN":
        end = _matching_paren(tokens, start)
        inner = tokens[start + 1 : end]
        if len(inner) == 1 and inner[0].type == "LEAF":
            return SPNode.leaf(max(inner[0].index, 0)), end + 1
        diagnostics.append(
            Diagnostic(
                "ArityMismatch",
                token.position,
                "a parenthesized singleton must contain exactly one sentence identifier",
            )
        )
        return None, end + 1

    if token.type == "KIND":
        kind = ModuleKind(token.text)
        if start + 1 >= len(tokens) or tokens[start + 1].type != "LPAREN":
            diagnostics.append(
                Diagnostic(
                    "ArityMismatch",
                    token.position,
                    f"{token.text} must be followed by a parenthesized operand list",
                )
            )
            return None, start + 1
        end = _matching_paren(tokens, start + 1)
        args: list[SPNode | None] = []
        cursor = start + 2
        while cursor < end:
            if tokens[cursor].type == "COMMA":
                cursor += 1
                continue
            arg, cursor = _parse_node(tokens[:end], cursor, diagnostics)
            args.append(arg)
        if len(args) != kind.arity:
            diagnostics.append(
                Diagnostic(
                    "ArityMismatch",
                    token.position,
                    f"{token.text} takes {kind.arity} operand(s), found {len(args)}",
                )
            )
            return None, end + 1
        if any(a is None for a in args):
            return None, end + 1
        return SPNode.internal(kind, [a for a in args if a is not None]), end + 1

    diagnostics.append(
        Diagnostic(
            "ArityMismatch",
            token.position,
            f"unexpected {token.text!r}; expected a sentence identifier or operator",
        )
    )
    return None, start + 1


def _matching_paren(tokens: list[_Token], open_index: int) -> int:
    depth = 0
    for i in range(open_index, len(tokens)):
        if tokens[i].type == "LPAREN":
            depth += 1
        elif tokens[i].type == "RPAREN":
            depth -= 1
            if depth == 0:
                return i
    raise AssertionError("parens verified balanced before structural parse")
