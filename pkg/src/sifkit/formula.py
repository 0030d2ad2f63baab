"""LaTeX formula engine: linear lexing, AST parsing, serialization, graphs.

The lexer keeps command names whole ("\\frac" is one token, never "\\" +
"frac"). The parser builds operator-rooted trees with normalized script
nodes ("^", "_" as prefix labels), so serialization is a prefix walk whose
output re-parses to an identical tree: each internal node emits its label
followed by one brace-wrapped group per child. Brace groups used as
operands collapse when they hold a single node; command arguments always
stay groups.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import (
    GroupParseError,
    LexError,
    MissingArgument,
    UnbalancedBrace,
    UnknownStructure,
)


class TokenKind(str, Enum):
    COMMAND = "command"
    SYMBOL = "symbol"
    NUMBER = "number"
    OPERATOR = "operator"
    BRACE = "brace"
    STRUCTURE = "structure"


class NodeKind(str, Enum):
    COMMAND = "command"
    GROUP = "group"
    SYMBOL = "symbol"
    NUMBER = "number"
    OPERATOR = "operator"
    SUP = "sup"
    SUB = "sub"


@dataclass(frozen=True)
class FormulaToken:
    text: str
    kind: TokenKind

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class AstNode:
    label: str
    kind: NodeKind
    children: tuple["AstNode", ...] = ()

    def is_leaf(self) -> bool:
        return not self.children

    def walk(self):
        """Preorder traversal."""
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class FormulaForest:
    trees: tuple[AstNode, ...]

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)


class EdgeType(str, Enum):
    PARENT_CHILD = "ParentChild"
    SAME_SYMBOL = "SameSymbol"


@dataclass(frozen=True)
class GraphNode:
    node_id: int
    label: str
    kind: NodeKind
    tree_index: int


@dataclass(frozen=True)
class FormulaGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[tuple[int, int, EdgeType], ...]


# Known argument counts; everything else parses as an arity-0 leaf so real
# exam formulas are never rejected outright.
COMMAND_ARITY = {
    "\\frac": 2,
    "\\dfrac": 2,
    "\\tfrac": 2,
    "\\sqrt": 1,
    "\\textf": 1,
    "\\text": 1,
    "\\mathrm": 1,
    "\\mathbf": 1,
    "\\mathbb": 1,
    "\\overline": 1,
    "\\underline": 1,
    "\\vec": 1,
    "\\hat": 1,
    "\\tilde": 1,
    "\\dot": 1,
    "\\boxed": 1,
    "\\sum": 0,
    "\\int": 0,
    "\\prod": 0,
    "\\lim": 0,
}
OPTIONAL_ARG_COMMANDS = frozenset({"\\sqrt"})

_REL_OPS = frozenset({
    "=", "<", ">", "\\le", "\\leq", "\\ge", "\\geq", "\\ne", "\\neq",
    "\\in", "\\notin", "\\subset", "\\subseteq", "\\supset", "\\supseteq",
    "\\sim", "\\approx", "\\equiv", "\\propto", "\\to", "\\rightarrow",
    "\\Rightarrow", "\\mid",
})
_ADD_OPS = frozenset({"+", "-", "\\pm", "\\mp", "\\cup", "\\cap"})
_MUL_OPS = frozenset({"*", "/", "\\times", "\\div", "\\cdot", "\\ast", "\\circ"})
_INFIX_OPS = _REL_OPS | _ADD_OPS | _MUL_OPS
_SIGN_OPS = frozenset({"+", "-", "\\pm", "\\mp"})

_GROUP_LABEL = "{}"
_OPT_LABEL = "[]"
_LEFT = "\\left"
_RIGHT = "\\right"

_ASCII_OPERATORS = frozenset("+-*/=<>|,.;:!?'\"@#%&~`()")


# --- lexing -------------------------------------------------------------------

def _lex(latex: str) -> list[tuple[FormulaToken, int]]:
    tokens: list[tuple[FormulaToken, int]] = []
    i, n = 0, len(latex)
    while i < n:
        c = latex[i]
        if c.isspace():
            i += 1
            continue
        if c == "\\":
            if i + 1 >= n:
                raise LexError("stray '\\' at end of formula", offset=i)
            nxt = latex[i + 1]
            if nxt.isspace():
                raise LexError("'\\' must begin a command or escape", offset=i)
            if nxt.isalpha() and nxt.isascii():
                j = i + 1
                while j < n and latex[j].isalpha() and latex[j].isascii():
                    j += 1
                tokens.append((FormulaToken(latex[i:j], TokenKind.COMMAND), i))
                i = j
            else:
                tokens.append((FormulaToken(latex[i:i + 2], TokenKind.COMMAND), i))
                i += 2
            continue
        if c.isdigit() and c.isascii():
            j = i
            while j < n and latex[j].isdigit() and latex[j].isascii():
                j += 1
            tokens.append((FormulaToken(latex[i:j], TokenKind.NUMBER), i))
            i = j
            continue
        if c in "{}[]":
            tokens.append((FormulaToken(c, TokenKind.BRACE), i))
        elif c in "^_":
            tokens.append((FormulaToken(c, TokenKind.STRUCTURE), i))
        elif c.isalpha():
            tokens.append((FormulaToken(c, TokenKind.SYMBOL), i))
        elif c in _ASCII_OPERATORS or (not c.isascii() and c.isprintable()):
            tokens.append((FormulaToken(c, TokenKind.OPERATOR), i))
        else:
            raise LexError(f"illegal character {c!r} in formula", offset=i)
        i += 1
    return tokens


def linear_tokenize(latex: str) -> list[FormulaToken]:
    """Flat token stream of a formula body; whitespace is dropped."""
    return [tok for tok, _ in _lex(latex)]


def detokenize(tokens) -> str:
    """Join tokens back into LaTeX.

    A space is inserted where adjacent tokens would fuse on re-lexing:
    a command followed by a letter, or a number followed by a number.
    """
    parts = []
    prev = ""
    for tok in tokens:
        text = tok.text if isinstance(tok, FormulaToken) else str(tok)
        if text and prev:
            cmd_fuse = prev.startswith("\\") and prev[-1].isalpha() and text[0].isalpha()
            num_fuse = prev[-1].isdigit() and text[0].isdigit()
            if cmd_fuse or num_fuse:
                parts.append(" ")
        parts.append(text)
        prev = text
    return "".join(parts)


# --- parsing ------------------------------------------------------------------

class _Parser:
    def __init__(self, pairs):
        self.toks = [p[0] for p in pairs]
        self.offsets = [p[1] for p in pairs]
        self.pos = 0

    def peek(self) -> FormulaToken | None:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def advance(self) -> FormulaToken:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def offset(self) -> int:
        if self.pos < len(self.offsets):
            return self.offsets[self.pos]
        return self.offsets[-1] + len(self.toks[-1].text) if self.toks else 0

    # -- helpers ---------------------------------------------------------

    def at_closer(self, closers) -> bool:
        tok = self.peek()
        return tok is not None and tok.text in closers

    def splice(self, expr: AstNode | None) -> tuple[AstNode, ...]:
        """Group contents: flatten a juxtaposition group, keep other nodes."""
        if expr is None:
            return ()
        if expr.kind is NodeKind.GROUP and expr.label == _GROUP_LABEL:
            return expr.children
        return (expr,)

    def unwrap(self, children: tuple[AstNode, ...]) -> AstNode:
        """Brace-group contents as an operand: singleton collapses."""
        if len(children) == 1:
            return children[0]
        return AstNode(_GROUP_LABEL, NodeKind.GROUP, children)

    def parse_braced(self, closers) -> tuple[AstNode, ...]:
        """Contents of a brace group; the opening '{' is current."""
        self.advance()
        expr = self.parse_expr(closers | {"}"})
        tok = self.peek()
        if tok is None or tok.text != "}":
            raise UnbalancedBrace("missing '}'", offset=self.offset())
        self.advance()
        return self.splice(expr)

    # -- grammar levels ----------------------------------------------------

    def parse_expr(self, closers) -> AstNode | None:
        node = self.parse_additive(closers)
        if node is None:
            return None
        while True:
            tok = self.peek()
            if tok is None or tok.text in closers or tok.text not in _REL_OPS:
                break
            op = self.advance()
            rhs = self.parse_additive(closers)
            if rhs is None:
                node = self._append(node, AstNode(op.text, NodeKind.OPERATOR))
                break
            node = AstNode(op.text, NodeKind.OPERATOR, (node, rhs))
        return node

    def parse_additive(self, closers) -> AstNode | None:
        node = self.parse_multiplicative(closers)
        if node is None:
            return None
        while True:
            tok = self.peek()
            if tok is None or tok.text in closers or tok.text not in _ADD_OPS:
                break
            op = self.advance()
            rhs = self.parse_multiplicative(closers)
            if rhs is None:
                node = self._append(node, AstNode(op.text, NodeKind.OPERATOR))
                break
            node = AstNode(op.text, NodeKind.OPERATOR, (node, rhs))
        return node

    def parse_multiplicative(self, closers) -> AstNode | None:
        node = self.parse_juxt(closers)
        if node is None:
            return None
        while True:
            tok = self.peek()
            if tok is None or tok.text in closers or tok.text not in _MUL_OPS:
                break
            op = self.advance()
            rhs = self.parse_juxt(closers)
            if rhs is None:
                node = self._append(node, AstNode(op.text, NodeKind.OPERATOR))
                break
            node = AstNode(op.text, NodeKind.OPERATOR, (node, rhs))
        return node

    def parse_juxt(self, closers) -> AstNode | None:
        atoms = []
        while True:
            tok = self.peek()
            if tok is None or tok.text in closers:
                break
            if tok.text in _INFIX_OPS and atoms:
                break
            atom = self.parse_postfix(closers)
            if atom is None:
                break
            atoms.append(atom)
        if not atoms:
            return None
        if len(atoms) == 1:
            return atoms[0]
        return AstNode(_GROUP_LABEL, NodeKind.GROUP, tuple(atoms))

    def parse_postfix(self, closers) -> AstNode | None:
        node = self.parse_atom(closers)
        if node is None:
            return None
        while True:
            tok = self.peek()
            if tok is None or tok.kind is not TokenKind.STRUCTURE or tok.text in closers:
                break
            script = self.advance()
            operand = self.parse_atom(closers)
            if operand is None:
                raise MissingArgument(
                    f"script {script.text!r} is missing its operand",
                    offset=self.offset(),
                )
            kind = NodeKind.SUP if script.text == "^" else NodeKind.SUB
            node = AstNode(script.text, kind, (node, operand))
        return node

    def parse_atom(self, closers) -> AstNode | None:
        tok = self.peek()
        if tok is None or tok.text in closers:
            return None
        text = tok.text

        if tok.kind is TokenKind.NUMBER:
            self.advance()
            return AstNode(text, NodeKind.NUMBER)
        if tok.kind is TokenKind.SYMBOL:
            self.advance()
            return AstNode(text, NodeKind.SYMBOL)

        if tok.kind is TokenKind.BRACE:
            if text == "{":
                children = self.parse_braced(closers)
                return self.unwrap(children)
            if text == "}":
                raise UnbalancedBrace("unmatched '}'", offset=self.offset())
            # '[' and ']' outside an optional argument are ordinary leaves
            self.advance()
            return AstNode(text, NodeKind.OPERATOR)

        if tok.kind is TokenKind.STRUCTURE:
            return self._parse_prefix_script(closers)

        if tok.kind is TokenKind.OPERATOR:
            self.advance()
            if text in _INFIX_OPS:
                return self._parse_prefix_operator(text, closers)
            return AstNode(text, NodeKind.OPERATOR)

        # commands; operator-valued commands (\in, \times, ...) parse as operators
        if text in _INFIX_OPS:
            self.advance()
            return self._parse_prefix_operator(text, closers)
        if text == _RIGHT:
            raise UnknownStructure("\\right without \\left", offset=self.offset())
        if text == _LEFT:
            return self._parse_left_right(closers)
        self.advance()
        if text in COMMAND_ARITY:
            return self._parse_command(text, closers)
        return AstNode(text, NodeKind.COMMAND)

    # -- atom helpers ------------------------------------------------------

    def _append(self, node: AstNode, leaf: AstNode) -> AstNode:
        """Attach a dangling trailing operator as a leaf."""
        if node.kind is NodeKind.GROUP and node.label == _GROUP_LABEL:
            return AstNode(_GROUP_LABEL, NodeKind.GROUP, node.children + (leaf,))
        return AstNode(_GROUP_LABEL, NodeKind.GROUP, (node, leaf))

    def _parse_prefix_script(self, closers) -> AstNode:
        script = self.advance()
        groups = []
        while len(groups) < 2:
            tok = self.peek()
            if tok is None or tok.text != "{":
                break
            groups.append(self.unwrap(self.parse_braced(closers)))
        if len(groups) != 2:
            raise MissingArgument(
                f"prefix {script.text!r} needs a base and a script group",
                offset=self.offset(),
            )
        kind = NodeKind.SUP if script.text == "^" else NodeKind.SUB
        return AstNode(script.text, kind, tuple(groups))

    def _parse_prefix_operator(self, op: str, closers) -> AstNode:
        groups = []
        while len(groups) < 2:
            tok = self.peek()
            if tok is None or tok.text != "{":
                break
            groups.append(self.unwrap(self.parse_braced(closers)))
        if groups:
            return AstNode(op, NodeKind.OPERATOR, tuple(groups))
        if op in _SIGN_OPS:
            operand = self.parse_postfix(closers)
            if operand is not None:
                return AstNode(op, NodeKind.OPERATOR, (operand,))
        return AstNode(op, NodeKind.OPERATOR)

    def _parse_command(self, name: str, closers) -> AstNode:
        children: list[AstNode] = []
        if name in OPTIONAL_ARG_COMMANDS:
            tok = self.peek()
            if tok is not None and tok.text == "[":
                self.advance()
                expr = self.parse_expr(closers | {"]"})
                end = self.peek()
                if end is None or end.text != "]":
                    raise UnbalancedBrace("missing ']'", offset=self.offset())
                self.advance()
                children.append(AstNode(_OPT_LABEL, NodeKind.GROUP, self.splice(expr)))
        for _ in range(COMMAND_ARITY[name]):
            tok = self.peek()
            if tok is not None and tok.text == "{":
                children.append(
                    AstNode(_GROUP_LABEL, NodeKind.GROUP, self.parse_braced(closers))
                )
                continue
            if tok is None or tok.text in closers:
                raise MissingArgument(
                    f"{name} expects {COMMAND_ARITY[name]} argument(s)",
                    offset=self.offset(),
                )
            atom = self.parse_atom(closers)
            if atom is None:
                raise MissingArgument(
                    f"{name} expects {COMMAND_ARITY[name]} argument(s)",
                    offset=self.offset(),
                )
            children.append(AstNode(_GROUP_LABEL, NodeKind.GROUP, (atom,)))
        return AstNode(name, NodeKind.COMMAND, tuple(children))

    def _parse_left_right(self, closers) -> AstNode:
        self.advance()
        open_tok = self.peek()
        if open_tok is None:
            raise MissingArgument("\\left is missing its delimiter", offset=self.offset())
        self.advance()
        expr = self.parse_expr(frozenset({_RIGHT}))
        tok = self.peek()
        if tok is None or tok.text != _RIGHT:
            raise UnknownStructure("\\left without matching \\right", offset=self.offset())
        self.advance()
        close_tok = self.peek()
        if close_tok is None:
            raise MissingArgument("\\right is missing its delimiter", offset=self.offset())
        self.advance()
        label = f"{_LEFT}{open_tok.text}{_RIGHT}{close_tok.text}"
        return AstNode(label, NodeKind.GROUP, self.splice(expr))


def parse_formula(latex: str) -> AstNode:
    """Parse a formula body (no enclosing dollars) into an AST."""
    parser = _Parser(_lex(latex))
    expr = parser.parse_expr(frozenset())
    if parser.pos != len(parser.toks):
        raise UnknownStructure(
            f"unparsed trailing content starting at {parser.peek().text!r}",
            offset=parser.offset(),
        )
    if expr is None:
        return AstNode(_GROUP_LABEL, NodeKind.GROUP, ())
    return expr


# --- serialization --------------------------------------------------------------

_LEAF_TOKEN_KIND = {
    NodeKind.SYMBOL: TokenKind.SYMBOL,
    NodeKind.NUMBER: TokenKind.NUMBER,
    NodeKind.OPERATOR: TokenKind.OPERATOR,
    NodeKind.COMMAND: TokenKind.COMMAND,
}

_OPEN_BRACE = FormulaToken("{", TokenKind.BRACE)
_CLOSE_BRACE = FormulaToken("}", TokenKind.BRACE)
_OPEN_BRACKET = FormulaToken("[", TokenKind.BRACE)
_CLOSE_BRACKET = FormulaToken("]", TokenKind.BRACE)


def _label_token(node: AstNode) -> FormulaToken:
    if node.kind in (NodeKind.SUP, NodeKind.SUB):
        return FormulaToken(node.label, TokenKind.STRUCTURE)
    if node.kind is NodeKind.OPERATOR:
        return FormulaToken(node.label, TokenKind.OPERATOR)
    return FormulaToken(node.label, TokenKind.COMMAND)


def _is_plain_group(node: AstNode) -> bool:
    return node.kind is NodeKind.GROUP and node.label == _GROUP_LABEL


def _ser_seq(children, out: list[FormulaToken]):
    # Internal script/operator nodes are brace-wrapped inside multi-element
    # sequences: their prefix form would otherwise absorb a neighbor's brace
    # group (or bind as a postfix script) when re-parsed.
    wrap_internal = len(children) > 1
    for child in children:
        if _is_plain_group(child):
            out.append(_OPEN_BRACE)
            _ser_seq(child.children, out)
            out.append(_CLOSE_BRACE)
        elif (wrap_internal and not child.is_leaf()
                and child.kind in (NodeKind.SUP, NodeKind.SUB, NodeKind.OPERATOR)):
            out.append(_OPEN_BRACE)
            _ser(child, out)
            out.append(_CLOSE_BRACE)
        else:
            _ser(child, out)


def _ser(node: AstNode, out: list[FormulaToken]):
    if node.kind is NodeKind.GROUP:
        if node.label.startswith(_LEFT):
            split = node.label.rindex(_RIGHT)
            open_delim = node.label[len(_LEFT):split]
            close_delim = node.label[split + len(_RIGHT):]
            out.append(FormulaToken(_LEFT, TokenKind.COMMAND))
            out.append(FormulaToken(open_delim, TokenKind.OPERATOR))
            _ser_seq(node.children, out)
            out.append(FormulaToken(_RIGHT, TokenKind.COMMAND))
            out.append(FormulaToken(close_delim, TokenKind.OPERATOR))
        else:
            _ser_seq(node.children, out)
        return
    if node.is_leaf():
        out.append(FormulaToken(node.label, _LEAF_TOKEN_KIND[node.kind]))
        return
    out.append(_label_token(node))
    for child in node.children:
        if node.kind is NodeKind.COMMAND and child.kind is NodeKind.GROUP \
                and child.label == _OPT_LABEL:
            out.append(_OPEN_BRACKET)
            _ser_seq(child.children, out)
            out.append(_CLOSE_BRACKET)
            continue
        out.append(_OPEN_BRACE)
        if _is_plain_group(child):
            _ser_seq(child.children, out)
        else:
            _ser(child, out)
        out.append(_CLOSE_BRACE)


def ast_tokenize(ast: AstNode) -> list[FormulaToken]:
    """Prefix serialization: node label first, children in brace groups."""
    out: list[FormulaToken] = []
    _ser(ast, out)
    return out


# --- forests and graphs -----------------------------------------------------------

def group_parse(formulas) -> FormulaForest:
    """Parse formulas into a forest, aggregating failures with their indices."""
    trees = []
    failures = []
    for idx, formula in enumerate(formulas):
        try:
            trees.append(parse_formula(formula))
        except (LexError, MissingArgument, UnbalancedBrace, UnknownStructure) as exc:
            failures.append((idx, exc))
    if failures:
        raise GroupParseError(failures)
    return FormulaForest(tuple(trees))


def build_graph(forest: FormulaForest) -> FormulaGraph:
    """All AST nodes plus parent-child edges and same-symbol leaf edges.

    Node ids are assigned in preorder within each tree, trees in order, so
    the graph is deterministic for a given forest.
    """
    nodes: list[GraphNode] = []
    edges: list[tuple[int, int, EdgeType]] = []
    symbol_leaves: dict[str, list[int]] = {}

    def visit(node: AstNode, tree_index: int) -> int:
        node_id = len(nodes)
        nodes.append(GraphNode(node_id, node.label, node.kind, tree_index))
        if node.is_leaf() and node.kind is NodeKind.SYMBOL:
            symbol_leaves.setdefault(node.label, []).append(node_id)
        for child in node.children:
            child_id = visit(child, tree_index)
            edges.append((node_id, child_id, EdgeType.PARENT_CHILD))
        return node_id

    for tree_index, tree in enumerate(forest.trees):
        visit(tree, tree_index)

    same_symbol = []
    for label in sorted(symbol_leaves):
        ids = symbol_leaves[label]
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                same_symbol.append((ids[i], ids[j], EdgeType.SAME_SYMBOL))
    same_symbol.sort(key=lambda e: (e[0], e[1]))
    return FormulaGraph(tuple(nodes), tuple(edges) + tuple(same_symbol))


def graph_to_json(graph: FormulaGraph) -> dict:
    """JSON-ready dict: {nodes: [{id,label,kind,tree}], edges: [{src,dst,type}]}."""
    return {
        "nodes": [
            {"id": n.node_id, "label": n.label, "kind": n.kind.value, "tree": n.tree_index}
            for n in graph.nodes
        ],
        "edges": [
            {"src": src, "dst": dst, "type": etype.value}
            for src, dst, etype in graph.edges
        ],
    }
