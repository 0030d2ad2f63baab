import re

import pytest

from sifkit.errors import (
    GroupParseError,
    LexError,
    MissingArgument,
    UnbalancedBrace,
    UnknownStructure,
)
from sifkit.formula import (
    COMMAND_ARITY,
    AstNode,
    EdgeType,
    NodeKind,
    TokenKind,
    ast_tokenize,
    build_graph,
    detokenize,
    graph_to_json,
    group_parse,
    linear_tokenize,
    parse_formula,
)


def texts(tokens):
    return [t.text for t in tokens]


def test_linear_tokenize_examples():
    assert texts(linear_tokenize("\\frac{x}{2}")) == \
        ["\\frac", "{", "x", "}", "{", "2", "}"]
    assert texts(linear_tokenize("x")) == ["x"]
    assert texts(linear_tokenize("x^{2}+y_{1}")) == \
        ["x", "^", "{", "2", "}", "+", "y", "_", "{", "1", "}"]


def test_linear_tokenize_kinds():
    kinds = [t.kind for t in linear_tokenize("\\frac{12}^_x+")]
    assert kinds == [TokenKind.COMMAND, TokenKind.BRACE, TokenKind.NUMBER,
                     TokenKind.BRACE, TokenKind.STRUCTURE, TokenKind.STRUCTURE,
                     TokenKind.SYMBOL, TokenKind.OPERATOR]


def test_commands_never_split(formula_corpus):
    for name in COMMAND_ARITY:
        body = name + "{x}{y}" if COMMAND_ARITY[name] else name + " x"
        toks = texts(linear_tokenize(body))
        assert name in toks
        assert "\\" not in toks
    for formula in formula_corpus:
        for tok in linear_tokenize(formula):
            assert tok.text != "\\"


def test_lex_errors():
    with pytest.raises(LexError):
        linear_tokenize("x\\")
    with pytest.raises(LexError):
        linear_tokenize("\\ frac")
    with pytest.raises(LexError):
        linear_tokenize("a\x00b")


def test_lossless_lexing(formula_corpus):
    for formula in formula_corpus:
        joined = "".join(texts(linear_tokenize(formula)))
        assert joined == re.sub(r"\s+", "", formula)


def test_parse_examples():
    frac = parse_formula("\\frac{x}{2}")
    assert frac.label == "\\frac" and frac.kind is NodeKind.COMMAND
    assert [c.kind for c in frac.children] == [NodeKind.GROUP, NodeKind.GROUP]
    assert frac.children[0].children[0] == AstNode("x", NodeKind.SYMBOL)
    assert frac.children[1].children[0] == AstNode("2", NodeKind.NUMBER)

    leaf = parse_formula("x")
    assert leaf == AstNode("x", NodeKind.SYMBOL)

    with pytest.raises(MissingArgument):
        parse_formula("\\frac{x}")


def test_parse_structure_rules():
    sup = parse_formula("x^{2}")
    assert sup.kind is NodeKind.SUP and len(sup.children) == 2
    sub = parse_formula("a_1")
    assert sub.kind is NodeKind.SUB
    rel = parse_formula("x+y=1")
    assert rel.label == "=" and rel.children[0].label == "+"
    opt = parse_formula("\\sqrt[n]{x}")
    assert opt.children[0].label == "[]"
    with pytest.raises(UnbalancedBrace):
        parse_formula("{x")
    with pytest.raises(UnbalancedBrace):
        parse_formula("x}")
    with pytest.raises(UnknownStructure):
        parse_formula("\\right) x")


def test_leaves_are_atomic(formula_corpus):
    for formula in formula_corpus[:200]:
        for node in parse_formula(formula).walk():
            if node.is_leaf():
                assert node.kind in (NodeKind.SYMBOL, NodeKind.NUMBER,
                                     NodeKind.OPERATOR, NodeKind.COMMAND,
                                     NodeKind.GROUP)


def test_ast_tokenize_examples():
    assert texts(ast_tokenize(parse_formula("x^{2}"))) == \
        ["^", "{", "x", "}", "{", "2", "}"]
    assert texts(ast_tokenize(parse_formula("x"))) == ["x"]
    assert texts(ast_tokenize(parse_formula("\\frac{x}{2}"))) == \
        ["\\frac", "{", "x", "}", "{", "2", "}"]
    assert texts(ast_tokenize(parse_formula("x+y=1"))) == \
        ["=", "{", "+", "{", "x", "}", "{", "y", "}", "}", "{", "1", "}"]


def test_serialize_reparse_fixpoint(formula_corpus):
    for formula in formula_corpus:
        tree = parse_formula(formula)
        serialized = detokenize(ast_tokenize(tree))
        reparsed = parse_formula(serialized)
        assert reparsed == tree, formula
        assert detokenize(ast_tokenize(reparsed)) == serialized


def test_group_parse():
    forest = group_parse(["x+1", "x-1"])
    assert len(forest) == 2
    assert len(group_parse([])) == 0
    with pytest.raises(GroupParseError) as exc_info:
        group_parse(["x", "\\frac{x}"])
    (index, error), = exc_info.value.failures
    assert index == 1 and isinstance(error, MissingArgument)


def test_graph_examples():
    graph = build_graph(group_parse(["x+1", "x-1"]))
    same = [e for e in graph.edges if e[2] is EdgeType.SAME_SYMBOL]
    assert len(same) == 1
    src, dst, _ = same[0]
    assert graph.nodes[src].label == "x" and graph.nodes[dst].label == "x"
    assert graph.nodes[src].tree_index == 0 and graph.nodes[dst].tree_index == 1

    within = build_graph(group_parse(["x+x"]))
    assert sum(1 for e in within.edges if e[2] is EdgeType.SAME_SYMBOL) == 1

    empty = build_graph(group_parse([]))
    assert empty.nodes == () and empty.edges == ()


def test_graph_counting_invariants(formula_corpus):
    forest = group_parse(formula_corpus)
    graph = build_graph(forest)
    pc = sum(1 for e in graph.edges if e[2] is EdgeType.PARENT_CHILD)
    expected_pc = sum(sum(1 for _ in tree.walk()) - 1 for tree in forest)
    assert pc == expected_pc

    leaf_ids = {n.node_id for n in graph.nodes}
    for src, dst, etype in graph.edges:
        if etype is EdgeType.PARENT_CHILD:
            leaf_ids.discard(src)
    label_counts = {}
    for node in graph.nodes:
        if node.node_id in leaf_ids and node.kind is NodeKind.SYMBOL:
            label_counts[node.label] = label_counts.get(node.label, 0) + 1
    expected_ss = sum(c * (c - 1) // 2 for c in label_counts.values())
    ss = sum(1 for e in graph.edges if e[2] is EdgeType.SAME_SYMBOL)
    assert ss == expected_ss


def test_graph_determinism(formula_corpus):
    sample = formula_corpus[:50]
    g1 = build_graph(group_parse(sample))
    g2 = build_graph(group_parse(list(sample)))
    assert g1 == g2


def test_graph_json_shape():
    graph = build_graph(group_parse(["x+1"]))
    obj = graph_to_json(graph)
    assert set(obj) == {"nodes", "edges"}
    assert all(set(n) == {"id", "label", "kind", "tree"} for n in obj["nodes"])
    assert all(set(e) == {"src", "dst", "type"} for e in obj["edges"])
    assert {e["type"] for e in obj["edges"]} <= {"ParentChild", "SameSymbol"}
