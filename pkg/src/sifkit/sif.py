"""SIF grammar: validation of raw strings and conversion into SIF form.

The checkable grammar, stated once:

R1  Outside ``$...$``: CJK ideographs, CJK/general/fullwidth punctuation,
    ASCII letters, digits, punctuation and whitespace. Backslash is math-only.
R2  Digits, the operator characters ``+ - * / = < > ^ _ |`` and isolated
    single latin letters belong inside ``$...$``; multi-letter alphabetic
    words are ordinary text.
R3  Special tokens are exactly ``$\\SIFBlank$``, ``$\\SIFChoice$``,
    ``$\\SIFSep$`` and ``$\\SIFTag{name}$``. Unconverted blank runs
    (``__``) and empty bracket pairs are flagged so conversion stays the
    single path that introduces the special tokens.
R4  Inside ``$...$``: braces balance, ``\\`` starts a command or escapes a
    symbol (never whitespace), dollars pair globally with no nesting.
R5  ``$\\textf{text, labels}$`` styles text; labels are a non-empty subset
    of {b, d, i, t, u, w} in alphabetical order.
R6  Figures are ``$\\FigureID{token}$``, ``$\\FormFigureID{token}$`` or
    ``$\\FigureBase64{payload}$`` with a base64 payload; the reserved
    commands stand alone in their dollar region.

Conversion applies, in order and left to right: C1 runs of two or more
underscores become ``$\\SIFBlank$``; C2 empty ASCII or fullwidth
parenthesis pairs become ``$\\SIFChoice$``; C3 maximal runs over the math
character class are wrapped in dollars when they contain a digit or an
operator or are a single isolated letter; C4 existing dollar regions pass
through untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import Unconvertible


class ViolationCode(str, Enum):
    NON_SIF_CHAR = "NonSifChar"
    BARE_MATH_TOKEN = "BareMathToken"
    UNBALANCED_DOLLAR = "UnbalancedDollar"
    UNBALANCED_BRACE = "UnbalancedBrace"
    BAD_STYLE_LABEL = "BadStyleLabel"
    BAD_FIGURE_REF = "BadFigureRef"
    BAD_SPECIAL_TOKEN = "BadSpecialToken"


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    span: tuple[int, int]  # byte offsets into the UTF-8 encoding
    message: str


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...]


# --- character classes -------------------------------------------------------

# Unicode blocks usable as plain text: CJK ideographs plus the punctuation
# blocks Chinese typography draws on (fullwidth forms, 《》, ……, ﹣).
_TEXT_BLOCKS = (
    (0x3000, 0x303F),
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xFF00, 0xFFEF),
    (0x2000, 0x206F),
    (0xFE30, 0xFE4F),
    (0xFE50, 0xFE6F),
)

_ASCII_TEXT_OK = [False] * 128
for _c in range(128):
    _ch = chr(_c)
    if _ch.isalnum() or _ch in " \t\n\r":
        _ASCII_TEXT_OK[_c] = True
    elif 0x21 <= _c <= 0x7E and _ch not in "$\\":
        _ASCII_TEXT_OK[_c] = True

_ASCII_FORMULA_OK = list(_ASCII_TEXT_OK)
_ASCII_FORMULA_OK[ord("\\")] = True


def _in_text_blocks(ch: str) -> bool:
    o = ord(ch)
    if o == 0xB7:  # middle dot in transliterated names
        return True
    for lo, hi in _TEXT_BLOCKS:
        if lo <= o <= hi:
            return True
    return False


def _char_ok(ch: str, in_formula: bool) -> bool:
    o = ord(ch)
    if o < 128:
        return (_ASCII_FORMULA_OK if in_formula else _ASCII_TEXT_OK)[o]
    return _in_text_blocks(ch)


_MATH_RUN_RE = re.compile(r"[0-9A-Za-z+\-*/=<>^_|]+")
_MATH_OPS = frozenset("+-*/=<>^_|")
_EMPTY_PARENS_RE = re.compile(r"\(\s*\)|（\s*）")
_CONVERT_TRIGGER_RE = re.compile(r"_{2,}|\(\s*\)|（\s*）")

_SIF_MARK_NAMES = frozenset({"SIFBlank", "SIFChoice", "SIFSep", "SIFTag"})
_FIGURE_NAMES = frozenset({"FigureID", "FormFigureID", "FigureBase64"})
_RESERVED_NAMES = _SIF_MARK_NAMES | _FIGURE_NAMES

_LEADING_CMD_RE = re.compile(r"\\([A-Za-z][A-Za-z0-9]*)")  # digits: \FigureBase64
_TAG_BODY_RE = re.compile(r"\\SIFTag\{([^{}$]+)\}\Z")
_FIGURE_ID_BODY_RE = re.compile(r"\\(?:FormFigure|Figure)ID\{([^{}$\s]+)\}\Z")
_FIGURE_B64_BODY_RE = re.compile(r"\\FigureBase64\{([A-Za-z0-9+/]+={0,2})\}\Z")
_EMBEDDED_RESERVED_RE = re.compile(
    r"\\(SIFBlank|SIFChoice|SIFSep|SIFTag|FigureID|FormFigureID|FigureBase64)\b"
)
_TEXTF_RE = re.compile(r"\\textf\b")

_STYLE_LABELS = "bdituw"


# --- dollar-region scanning --------------------------------------------------

def _find_close(s: str, start: int) -> int | None:
    """Next unescaped ``$`` at or after ``start``; None when absent."""
    j = s.find("$", start)
    while j != -1:
        k = j - 1
        backslashes = 0
        while k >= start and s[k] == "\\":
            backslashes += 1
            k -= 1
        if backslashes % 2 == 0:
            return j
        j = s.find("$", j + 1)
    return None


def _scan(s: str) -> list[tuple[str, int, int]]:
    """Split into ("text", a, b), ("math", a, b) and ("lonely", a, a+1) parts.

    Math spans include both delimiting dollars. Dollars pair sequentially;
    an opening dollar with no unescaped close is "lonely" and the remainder
    is treated as text.
    """
    parts: list[tuple[str, int, int]] = []
    i, n = 0, len(s)
    text_start = 0
    while i < n:
        if s[i] == "$":
            if text_start < i:
                parts.append(("text", text_start, i))
            close = _find_close(s, i + 1)
            if close is None:
                parts.append(("lonely", i, i + 1))
                i += 1
            else:
                parts.append(("math", i, close + 1))
                i = close + 1
            text_start = i
        else:
            i += 1
    if text_start < n:
        parts.append(("text", text_start, n))
    return parts


# --- validation ---------------------------------------------------------------

class _Collector:
    """Accumulates violations with character spans, converts to bytes once."""

    def __init__(self, source: str):
        self.source = source
        self.found: list[tuple[int, int, ViolationCode, str]] = []

    def add(self, start: int, end: int, code: ViolationCode, message: str):
        self.found.append((start, end, code, message))

    def report(self) -> ValidationReport:
        if not self.found:
            return ValidationReport(True, ())
        self.found.sort(key=lambda v: (v[0], v[1], v[2].value))
        prefix = [0] * (len(self.source) + 1)
        total = 0
        for idx, ch in enumerate(self.source):
            o = ord(ch)
            total += 1 if o < 0x80 else 2 if o < 0x800 else 3 if o < 0x10000 else 4
            prefix[idx + 1] = total
        violations = tuple(
            Violation(code, (prefix[a], prefix[b]), message)
            for a, b, code, message in self.found
        )
        return ValidationReport(False, violations)


def _check_text(s: str, start: int, end: int, out: _Collector):
    piece = s[start:end]

    # R1: disallowed characters, reported as maximal runs
    run_start = None
    for idx, ch in enumerate(piece):
        if _char_ok(ch, in_formula=False):
            if run_start is not None:
                out.add(start + run_start, start + idx, ViolationCode.NON_SIF_CHAR,
                        f"character(s) {piece[run_start:idx]!r} not allowed outside math mode")
                run_start = None
        elif run_start is None:
            run_start = idx
    if run_start is not None:
        out.add(start + run_start, end, ViolationCode.NON_SIF_CHAR,
                f"character(s) {piece[run_start:]!r} not allowed outside math mode")

    # R3: unconverted blanks / choice brackets
    for m in _EMPTY_PARENS_RE.finditer(piece):
        out.add(start + m.start(), start + m.end(), ViolationCode.BAD_SPECIAL_TOKEN,
                "empty bracket pair should be $\\SIFChoice$")

    # R2: math-class runs that belong inside dollars
    for m in _MATH_RUN_RE.finditer(piece):
        run = m.group()
        if len(run) >= 2 and set(run) == {"_"}:
            out.add(start + m.start(), start + m.end(), ViolationCode.BAD_SPECIAL_TOKEN,
                    "blank run should be $\\SIFBlank$")
        elif any(c.isdigit() or c in _MATH_OPS for c in run):
            out.add(start + m.start(), start + m.end(), ViolationCode.BARE_MATH_TOKEN,
                    f"{run!r} must be wrapped in $...$")
        elif len(run) == 1:
            out.add(start + m.start(), start + m.end(), ViolationCode.BARE_MATH_TOKEN,
                    f"isolated letter {run!r} must be wrapped in $...$")


def _match_braced_arg(body: str, open_idx: int) -> int | None:
    """Index just past the brace group opening at ``open_idx``; None if unclosed."""
    depth = 0
    i = open_idx
    n = len(body)
    while i < n:
        c = body[i]
        if c == "\\" and i + 1 < n:
            i += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return None


def _check_textf(body: str, base: int, out: _Collector):
    for m in _TEXTF_RE.finditer(body):
        idx = m.end()
        if idx >= len(body) or body[idx] != "{":
            out.add(base + m.start(), base + idx, ViolationCode.BAD_STYLE_LABEL,
                    "\\textf requires a braced {text, labels} argument")
            continue
        close = _match_braced_arg(body, idx)
        if close is None:
            # brace imbalance is reported by the generic scan
            continue
        arg = body[idx + 1:close - 1]
        span = (base + m.start(), base + close)
        if "," not in arg:
            out.add(*span, ViolationCode.BAD_STYLE_LABEL,
                    "\\textf argument must end with a comma and style labels")
            continue
        labels = arg.rsplit(",", 1)[1].strip()
        if not labels:
            out.add(*span, ViolationCode.BAD_STYLE_LABEL, "empty style labels")
        elif any(c not in _STYLE_LABELS for c in labels):
            out.add(*span, ViolationCode.BAD_STYLE_LABEL,
                    f"style labels {labels!r} must be a subset of {{b,d,i,t,u,w}}")
        elif list(labels) != sorted(set(labels)):
            out.add(*span, ViolationCode.BAD_STYLE_LABEL,
                    f"style labels {labels!r} must be unique and in alphabetical order")


def _check_formula_body(s: str, body_start: int, body_end: int, out: _Collector):
    body = s[body_start:body_end]

    # Exact special forms are fully handled here.
    lead = _LEADING_CMD_RE.match(body)
    lead_name = lead.group(1) if lead else None
    if lead_name in _RESERVED_NAMES:
        if lead_name in ("SIFBlank", "SIFChoice", "SIFSep"):
            if body == f"\\{lead_name}":
                return
            out.add(body_start, body_end, ViolationCode.BAD_SPECIAL_TOKEN,
                    f"malformed special token $\\{lead_name}$")
            return
        if lead_name == "SIFTag":
            if _TAG_BODY_RE.match(body):
                return
            out.add(body_start, body_end, ViolationCode.BAD_SPECIAL_TOKEN,
                    "malformed $\\SIFTag{name}$")
            return
        if lead_name in ("FigureID", "FormFigureID"):
            if _FIGURE_ID_BODY_RE.match(body):
                return
            out.add(body_start, body_end, ViolationCode.BAD_FIGURE_REF,
                    f"malformed $\\{lead_name}{{token}}$")
            return
        if _FIGURE_B64_BODY_RE.match(body):
            return
        out.add(body_start, body_end, ViolationCode.BAD_FIGURE_REF,
                "malformed $\\FigureBase64{payload}$ (payload must be base64)")
        return

    # Reserved commands may not be embedded inside larger formulas.
    for m in _EMBEDDED_RESERVED_RE.finditer(body):
        code = (ViolationCode.BAD_FIGURE_REF if m.group(1) in _FIGURE_NAMES
                else ViolationCode.BAD_SPECIAL_TOKEN)
        out.add(body_start + m.start(), body_start + m.end(), code,
                f"\\{m.group(1)} must stand alone in its own $...$")

    # R4: backslash syntax and brace balance, escape-aware
    open_stack: list[int] = []
    extra_close_reported = False
    i, n = 0, len(body)
    while i < n:
        c = body[i]
        if c == "\\":
            if i + 1 >= n or body[i + 1].isspace():
                out.add(body_start + i, body_start + i + 1,
                        ViolationCode.BAD_SPECIAL_TOKEN,
                        "stray backslash: not a command or escape")
                i += 1
            elif body[i + 1].isalpha():
                j = i + 1
                while j < n and body[j].isalpha():
                    j += 1
                i = j
            else:
                i += 2
            continue
        if c == "{":
            open_stack.append(i)
        elif c == "}":
            if open_stack:
                open_stack.pop()
            elif not extra_close_reported:
                out.add(body_start + i, body_start + i + 1,
                        ViolationCode.UNBALANCED_BRACE, "unmatched '}'")
                extra_close_reported = True
        elif not _char_ok(c, in_formula=True):
            out.add(body_start + i, body_start + i + 1, ViolationCode.NON_SIF_CHAR,
                    f"character {c!r} not allowed in a formula")
        i += 1
    if open_stack:
        pos = open_stack[0]
        out.add(body_start + pos, body_start + pos + 1,
                ViolationCode.UNBALANCED_BRACE, "unmatched '{'")

    # R5
    _check_textf(body, body_start, out)


def validate(raw: str) -> ValidationReport:
    """Enumerate every SIF grammar violation with code and byte span."""
    out = _Collector(raw)
    for kind, a, b in _scan(raw):
        if kind == "text":
            _check_text(raw, a, b, out)
        elif kind == "math":
            _check_formula_body(raw, a + 1, b - 1, out)
        else:
            out.add(a, b, ViolationCode.UNBALANCED_DOLLAR,
                    "unpaired '$'")
    return out.report()


def is_sif(raw: str) -> bool:
    """True iff ``raw`` satisfies the SIF grammar."""
    return validate(raw).valid


# --- conversion ----------------------------------------------------------------

def _needs_wrap(run: str) -> bool:
    if any(c.isdigit() or c in _MATH_OPS for c in run):
        return True
    return len(run) == 1 and run.isalpha()


def _convert_math_runs(piece: str) -> str:
    if not piece:
        return piece
    parts = []
    pos = 0
    for m in _MATH_RUN_RE.finditer(piece):
        run = m.group()
        if _needs_wrap(run):
            parts.append(piece[pos:m.start()])
            parts.append(f"${run}$")
            pos = m.end()
    parts.append(piece[pos:])
    return "".join(parts)


def _convert_text(piece: str) -> str:
    parts = []
    pos = 0
    for m in _CONVERT_TRIGGER_RE.finditer(piece):
        parts.append(_convert_math_runs(piece[pos:m.start()]))
        parts.append("$\\SIFBlank$" if m.group().startswith("_") else "$\\SIFChoice$")
        pos = m.end()
    parts.append(_convert_math_runs(piece[pos:]))
    return "".join(parts)


def to_sif(raw: str) -> str:
    """Convert a raw string into SIF form; valid input is returned unchanged.

    Raises Unconvertible when no valid SIF can be produced (characters
    outside the supported charset, or unpaired dollar signs).
    """
    if is_sif(raw):
        return raw
    parts = _scan(raw)
    if any(kind == "lonely" for kind, _, _ in parts):
        raise Unconvertible("unpaired '$' in input")
    converted = []
    for kind, a, b in parts:
        if kind == "math":
            converted.append(raw[a:b])
        else:
            converted.append(_convert_text(raw[a:b]))
    result = "".join(converted)
    report = validate(result)
    if not report.valid:
        first = report.violations[0]
        raise Unconvertible(
            f"not convertible to SIF: {first.code.value} at bytes {first.span}: {first.message}"
        )
    return result
