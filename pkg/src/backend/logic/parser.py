"""
Text syntax for formulas.

    formula := unary ('&' unary)*
    unary   := '~' unary | 'exists' Zi formula | atom | '(' formula ')'
    atom    := 'hyp' '(' Zi ')' | Zi '<=' Zj | '|' Zi '|' '=' p 'mod' q

``exists`` scopes as far right as possible. Unicode spellings are accepted
for the connectives. ``#`` starts a comment that runs to the end of the line.
"""

import logging
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from src.backend.config_loader import CONFIG
from src.backend.errors import BudgetExceeded, FormulaError
from src.backend.logic.formula import And, Count, Exists, Formula, Hyp, Not, Subset

logger = logging.getLogger(__name__)

_ALIASES = {"¬": "~", "∧": "&", "∃": "exists", "⊆": "<=", "≡": "="}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<comment>\#[^\n]*)
    |(?P<var>Z(?P<index>\d+))
    |(?P<int>\d+)
    |(?P<word>exists|hyp|mod|∃)
    |(?P<sym><=|[~&()|=¬∧⊆≡])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character {text[pos]!r}", position=pos, rule="token")
        kind = m.lastgroup
        if kind == "index":
            kind = "var"
        if kind not in ("ws", "comment"):
            value = _ALIASES.get(m.group(), m.group())
            tokens.append(Token(kind, value, pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


# Raw trees keep source offsets so construction errors can point at the text.
# ("hyp", pos, i) ("subset", pos, i, j) ("count", pos, i, p, q)
# ("not", pos, child) ("and", pos, left, right) ("exists", pos, i, child)
RawNode = tuple


class FormulaParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def _peek(self) -> Token:
        return self.tokens[self.i]

    def _consume(self, kind: Optional[str] = None, text: Optional[str] = None, rule: str = "syntax") -> Token:
        tok = self._peek()
        if (kind and tok.kind != kind) or (text and tok.text != text):
            want = repr(text) if text else kind
            got = repr(tok.text) if tok.text else "end of input"
            raise FormulaError(f"expected {want}, found {got}", position=tok.pos, rule=rule)
        self.i += 1
        return tok

    def _var(self, rule: str) -> int:
        tok = self._consume("var", rule=rule)
        return int(tok.text[1:])

    def parse(self) -> RawNode:
        node = self.formula()
        self._consume("end", rule="trailing-input")
        return node

    def formula(self) -> RawNode:
        node = self.unary()
        while self._peek().text == "&":
            tok = self._consume()
            node = ("and", tok.pos, node, self.unary())
        return node

    def unary(self) -> RawNode:
        tok = self._peek()
        if tok.text == "~":
            self._consume()
            return ("not", tok.pos, self.unary())
        if tok.text == "exists":
            self._consume()
            index = self._var("exists")
            return ("exists", tok.pos, index, self.formula())
        if tok.text == "(":
            self._consume()
            node = self.formula()
            self._consume(text=")", rule="parenthesis")
            return node
        return self.atom()

    def atom(self) -> RawNode:
        tok = self._peek()
        if tok.text == "hyp":
            self._consume()
            self._consume(text="(", rule="hyp")
            index = self._var("hyp")
            self._consume(text=")", rule="hyp")
            return ("hyp", tok.pos, index)
        if tok.text == "|":
            self._consume()
            index = self._var("count")
            self._consume(text="|", rule="count")
            self._consume(text="=", rule="count")
            p = int(self._consume("int", rule="count").text)
            self._consume(text="mod", rule="count")
            q = int(self._consume("int", rule="count").text)
            return ("count", tok.pos, index, p, q)
        if tok.kind == "var":
            left = self._var("subset")
            self._consume(text="<=", rule="subset")
            return ("subset", tok.pos, left, self._var("subset"))
        got = repr(tok.text) if tok.text else "end of input"
        raise FormulaError(f"expected an atom, found {got}", position=tok.pos, rule="atom")


def raw_size(node: RawNode) -> int:
    kind = node[0]
    if kind in ("not", "exists"):
        return 1 + raw_size(node[-1])
    if kind == "and":
        return 1 + raw_size(node[2]) + raw_size(node[3])
    return 1


def build(node: RawNode) -> Formula:
    """Turn a raw tree into checked Formula nodes, attaching offsets to any error."""
    kind, pos = node[0], node[1]
    try:
        if kind == "hyp":
            return Hyp(node[2])
        if kind == "subset":
            return Subset(node[2], node[3])
        if kind == "count":
            return Count(node[2], node[3], node[4])
        if kind == "not":
            return Not(build(node[2]))
        if kind == "and":
            return And(build(node[2]), build(node[3]))
        return Exists(node[2], build(node[3]))
    except FormulaError as e:
        if e.position is not None:
            raise
        raise FormulaError(e.bare_message, position=pos, rule=e.rule) from None


def parse_raw(text: str) -> RawNode:
    raw = FormulaParser(text).parse()
    size = raw_size(raw)
    if size > CONFIG["formula_max_nodes"]:
        raise BudgetExceeded("formula_max_nodes", CONFIG["formula_max_nodes"], size)
    return raw


def parse_formula(text: str) -> Formula:
    formula = build(parse_raw(text))
    logger.debug(f"parsed formula with {formula.size} nodes: {formula.render()}")
    return formula


# ---- linting ----


def _raw_var_free(node: RawNode) -> Tuple[frozenset, frozenset]:
    kind = node[0]
    if kind == "hyp" or kind == "count":
        s = frozenset((node[2],))
        return s, s
    if kind == "subset":
        s = frozenset((node[2], node[3]))
        return s, s
    if kind == "not":
        return _raw_var_free(node[2])
    if kind == "and":
        v1, f1 = _raw_var_free(node[2])
        v2, f2 = _raw_var_free(node[3])
        return v1 | v2, f1 | f2
    v, f = _raw_var_free(node[3])
    return v, f - {node[2]}


def _rename(node: RawNode, old: int, new: int) -> RawNode:
    kind = node[0]
    swap = lambda i: new if i == old else i  # noqa: E731
    if kind == "hyp":
        return (kind, node[1], swap(node[2]))
    if kind == "subset":
        return (kind, node[1], swap(node[2]), swap(node[3]))
    if kind == "count":
        return (kind, node[1], swap(node[2]), node[3], node[4])
    if kind == "not":
        return (kind, node[1], _rename(node[2], old, new))
    if kind == "and":
        return (kind, node[1], _rename(node[2], old, new), _rename(node[3], old, new))
    return (kind, node[1], swap(node[2]), _rename(node[3], old, new))


def _raw_text(node: RawNode) -> str:
    # same layout as Formula.render
    kind = node[0]
    if kind == "hyp":
        return f"hyp(Z{node[2]})"
    if kind == "subset":
        return f"Z{node[2]} <= Z{node[3]}"
    if kind == "count":
        return f"|Z{node[2]}| = {node[3]} mod {node[4]}"
    if kind == "not":
        inner = _raw_text(node[2])
        return f"~({inner})" if node[2][0] in ("and", "exists") else f"~{inner}"
    if kind == "and":
        left = _raw_text(node[2])
        if node[2][0] == "exists":
            left = f"({left})"
        right = _raw_text(node[3])
        if node[3][0] in ("and", "exists"):
            right = f"({right})"
        return f"{left} & {right}"
    return f"exists Z{node[2]} {_raw_text(node[3])}"


def lint_formula(text: str) -> Tuple[str, List[str]]:
    """
    Suggest a corrected formula for conjunction clashes.

    A variable bound on one side of a conjunction and free on the other is
    renamed to a fresh index inside the bound side. Returns the suggested text
    and one message per rename; an empty list means the input was already fine.
    """
    raw = parse_raw(text)
    var, _ = _raw_var_free(raw)
    fresh = [max(var, default=0) + 1]
    messages: List[str] = []

    def fix(node: RawNode) -> RawNode:
        kind = node[0]
        if kind == "not":
            return (kind, node[1], fix(node[2]))
        if kind == "exists":
            return (kind, node[1], node[2], fix(node[3]))
        if kind != "and":
            return node
        left, right = fix(node[2]), fix(node[3])
        for side in (0, 1):
            mine, other = (left, right) if side == 0 else (right, left)
            v, f = _raw_var_free(mine)
            _, other_free = _raw_var_free(other)
            for old in sorted((v - f) & other_free):
                new = fresh[0]
                fresh[0] += 1
                mine = _rename(mine, old, new)
                messages.append(f"offset {node[1]}: Z{old} is bound in one conjunct and free in the other; renamed the bound Z{old} to Z{new}")
            left, right = (mine, other) if side == 0 else (other, mine)
        return (kind, node[1], left, right)

    fixed = fix(raw)
    suggestion = _raw_text(fixed)
    # the suggestion must be a valid formula
    build(parse_raw(suggestion))
    return suggestion, messages
