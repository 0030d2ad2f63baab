"""Shared fixtures: golden items, desk pairs, deterministic corpora."""

import json
import random

import pytest

from sifkit.data import DESK_PAIRS_PATH, GOLDEN_ITEMS_PATH
from sifkit.items import parse_record
from sifkit.tokenizer import TokenSeq


@pytest.fixture(scope="session")
def golden_items():
    with open(GOLDEN_ITEMS_PATH, encoding="utf-8") as fh:
        return [parse_record(line) for line in fh if line.strip()]


@pytest.fixture(scope="session")
def desk_pairs_path():
    return DESK_PAIRS_PATH


# --- deterministic generators ---------------------------------------------------

_CJK = "数列函已知求值的若则图中点直线方程解集合概率为和差积共有个是不正确"
_WORDS = ["then", "value", "given", "solve", "find", "when", "what", "colors"]
_PUNCT = "，。？！、；：,.?!;:"
_FORMULA_LEAVES = ["x", "y", "z", "a", "b", "n", "m", "1", "2", "3", "10",
                   "\\pi", "\\alpha", "\\beta", "\\theta"]


def make_formula(rnd: random.Random, depth: int = 0) -> str:
    r = rnd.random()
    if depth > 3 or r < 0.30:
        return rnd.choice(_FORMULA_LEAVES)
    if r < 0.40:
        return f"\\frac{{{make_formula(rnd, depth + 1)}}}{{{make_formula(rnd, depth + 1)}}}"
    if r < 0.48:
        return f"\\sqrt{{{make_formula(rnd, depth + 1)}}}"
    if r < 0.58:
        return f"{make_formula(rnd, depth + 1)}^{{{make_formula(rnd, depth + 1)}}}"
    if r < 0.66:
        return f"{make_formula(rnd, depth + 1)}_{{{make_formula(rnd, depth + 1)}}}"
    if r < 0.78:
        op = rnd.choice(["+", "-", "=", "<", ">", "\\times", "\\cdot"])
        return f"{make_formula(rnd, depth + 1)}{op}{make_formula(rnd, depth + 1)}"
    if r < 0.86:
        return f"\\left({make_formula(rnd, depth + 1)}\\right)"
    if r < 0.93:
        return f"{{{make_formula(rnd, depth + 1)}{make_formula(rnd, depth + 1)}}}"
    return f"{make_formula(rnd, depth + 1)} {make_formula(rnd, depth + 1)}"


def make_text(rnd: random.Random) -> str:
    parts = []
    for _ in range(rnd.randint(1, 6)):
        r = rnd.random()
        if r < 0.5:
            parts.append("".join(rnd.choice(_CJK) for _ in range(rnd.randint(1, 4))))
        elif r < 0.8:
            parts.append(rnd.choice(_WORDS))
            parts.append(" ")
        else:
            parts.append(rnd.choice(_PUNCT))
    return "".join(parts)


def make_sif_string(rnd: random.Random) -> str:
    pieces = []
    for _ in range(rnd.randint(1, 7)):
        r = rnd.random()
        if r < 0.40:
            pieces.append(make_text(rnd))
        elif r < 0.70:
            pieces.append(f"${make_formula(rnd)}$")
        elif r < 0.78:
            pieces.append(rnd.choice(["$\\SIFBlank$", "$\\SIFChoice$", "$\\SIFSep$"]))
        elif r < 0.86:
            pieces.append(f"$\\SIFTag{{{rnd.choice(['options', 'stem', 'list'])}}}$")
        elif r < 0.94:
            pieces.append(f"$\\FigureID{{fig-{rnd.randint(0, 999):03d}}}$")
        else:
            pieces.append("$\\FormFigureID{ff-01}$")
    return "".join(pieces)


def make_raw_string(rnd: random.Random) -> str:
    """Unconverted input: bare math runs, blanks, brackets, some SIF regions."""
    pieces = []
    for _ in range(rnd.randint(1, 6)):
        r = rnd.random()
        if r < 0.35:
            pieces.append(make_text(rnd))
        elif r < 0.55:
            pieces.append(rnd.choice(
                ["x=2", "3x+1", "k", "x+1", "12", "y<0", "a/b", "2^3", "x_1"]))
        elif r < 0.65:
            pieces.append("_" * rnd.randint(2, 5))
        elif r < 0.75:
            pieces.append(rnd.choice(["()", "（）", "( )"]))
        elif r < 0.9:
            pieces.append(f"${make_formula(rnd)}$")
        else:
            pieces.append(rnd.choice(_WORDS))
    return "".join(pieces)


@pytest.fixture(scope="session")
def sif_corpus():
    rnd = random.Random(20240811)
    return [make_sif_string(rnd) for _ in range(1000)]


@pytest.fixture(scope="session")
def raw_corpus():
    rnd = random.Random(987654)
    return [make_raw_string(rnd) for _ in range(1000)]


@pytest.fixture(scope="session")
def formula_corpus():
    rnd = random.Random(555)
    fixed = [
        "x+y=1", "\\frac{x}{2}", "x^{2}+y_{1}", "\\sqrt[n]{x}", "a{bc}d",
        "P(m,n)", "x^{2} + y^{2} = 16", "\\frac{x^2}{3} + \\frac{y^2}{m} = 1",
        "\\sin \\left( \\frac{\\pi}{4} - x \\right) = \\frac{1}{3}",
        "S_{n}=2a_{n}-2^{n+1}", "f(x+6)=f(x)+f(3-x)", "120^{\\circ}",
        "C_{2}H_{5}OH", "-x+1", "x \\in R", "|x-1|<2",
        "\\left\\{a_n\\right\\}", "\\frac{1}{2}ab\\sin C",
    ]
    return fixed + [make_formula(rnd) for _ in range(500 - len(fixed))]


def planted_corpus():
    """Skip-gram toy corpus: alpha/beta share contexts, gamma/delta others."""
    fill_a = [f"suna{i}" for i in range(8)]
    fill_g = [f"rockg{i}" for i in range(8)]
    return ([TokenSeq(("alpha", "beta", fill_a[i % 8], fill_a[(i + 1) % 8]))
             for i in range(160)]
            + [TokenSeq(("gamma", "delta", fill_g[i % 8], fill_g[(i + 1) % 8]))
               for i in range(160)])


@pytest.fixture(scope="session")
def toy_corpus():
    return planted_corpus()
