"""Arrangement text format and product-string parsing.

File format::

    # comment
    field Q            (or GF(p))
    vars 3
    1 0 0 ^3
    0 1 0 ^ 3
    1 -2 0
    1 1/2 0

One line per hyperplane: ``vars`` coefficients, optionally followed by
``^ m`` (default multiplicity 1).
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from .arrangement import MultiArrangement, _normalized
from .linalg import Field, QQ, parse_field


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


_TOKEN = re.compile(r"\^|[^\s^]+")


def _tokens(text: str):
    """[(token, 1-based column)] of a line with comments removed."""
    text = text.split("#", 1)[0]
    return [(m.group(), m.start() + 1) for m in _TOKEN.finditer(text)]


def _coefficient(tok: str, field: Field, line: int, col: int):
    try:
        value = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad coefficient {tok!r}", line, col) from None
    try:
        return field(value)
    except ZeroDivisionError as exc:
        raise ParseError(str(exc), line, col) from None


def parse_arrangement_text(text: str) -> MultiArrangement:
    field = None
    nvars = None
    forms, mults = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        head, col = toks[0]
        if head == "field":
            if field is not None:
                raise ParseError("duplicate field line", lineno, col)
            if len(toks) < 2:
                raise ParseError("field line needs Q or GF(p)", lineno, col)
            desc = "".join(t for t, _ in toks[1:])
            try:
                field = parse_field(desc)
            except ValueError as exc:
                raise ParseError(str(exc), lineno, toks[1][1]) from None
            continue
        if head == "vars":
            if field is None:
                raise ParseError("field line must come first", lineno, col)
            if nvars is not None:
                raise ParseError("duplicate vars line", lineno, col)
            if len(toks) != 2 or not toks[1][0].isdigit() or int(toks[1][0]) < 1:
                raise ParseError("vars line needs one positive integer", lineno, col)
            nvars = int(toks[1][0])
            continue
        if field is None or nvars is None:
            raise ParseError("expected 'field' and 'vars' lines before hyperplanes", lineno, col)
        mult = 1
        body = toks
        carets = [i for i, (t, _) in enumerate(toks) if t == "^"]
        if carets:
            i = carets[0]
            if len(carets) > 1 or i != len(toks) - 2:
                raise ParseError("multiplicity must be written '^ m' at the end of the line",
                                 lineno, toks[i][1])
            mtok, mcol = toks[i + 1]
            if not mtok.isdigit() or int(mtok) < 1:
                raise ParseError(f"bad multiplicity {mtok!r}", lineno, mcol)
            mult = int(mtok)
            body = toks[:i]
        if len(body) != nvars:
            c = body[nvars][1] if len(body) > nvars else (body[-1][1] if body else col)
            raise ParseError(f"expected {nvars} coefficients, found {len(body)}", lineno, c)
        form = [_coefficient(t, field, lineno, c) for t, c in body]
        if not any(form):
            raise ParseError("zero form", lineno, col)
        try:
            MultiArrangement(field, forms + [form])
        except ValueError as exc:
            raise ParseError(str(exc), lineno, col) from None
        forms.append(form)
        mults.append(mult)
    if field is None:
        raise ParseError("missing field line")
    if nvars is None:
        raise ParseError("missing vars line")
    if not forms:
        raise ParseError("no hyperplanes")
    return MultiArrangement(field, forms, mults)


def parse_arrangement(path) -> MultiArrangement:
    """Read an arrangement file."""
    return parse_arrangement_text(Path(path).read_text())


def _coef_str(c, field: Field) -> str:
    if field.characteristic:
        return str(int(c))
    return str(Fraction(c))


def serialize(A: MultiArrangement) -> str:
    """Canonical text form; re-parses to an equal arrangement."""
    lines = [f"field {A.field.name}", f"vars {A.nvars}"]
    for f, m in zip(A.forms, A.mults):
        row = " ".join(_coef_str(c, A.field) for c in f)
        lines.append(row + (f" ^{m}" if m > 1 else ""))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# product strings such as "x^3 y^3 (x - 2y)^3"

_VAR_ORDER = ["x", "y", "z", "w"]
_FACTOR = re.compile(r"\s*(\((?P<form>[^()]*)\)|(?P<var>[A-Za-z]\w*))\s*(\^\s*(?P<exp>\d+))?")
_TERM = re.compile(r"\s*(?P<sign>[+-])?\s*(?P<coef>\d+(?:/\d+)?)?\s*\*?\s*(?P<var>[A-Za-z]\w*)?")


def _linear_terms(text: str, offset: int):
    """{var: Fraction} for a linear form like 'x - 1/2 y'."""
    out = {}
    pos = 0
    text = text.rstrip()
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or not m.group("var") or (not first and not m.group("sign")):
            raise ParseError(f"cannot read linear form at {text[pos:]!r}", 1, offset + pos + 1)
        coef = Fraction(m.group("coef") or 1)
        if m.group("sign") == "-":
            coef = -coef
        var = m.group("var")
        out[var] = out.get(var, Fraction(0)) + coef
        pos = m.end()
        first = False
    if not out:
        raise ParseError("empty factor", 1, offset + 1)
    return out


def _var_key(v: str):
    if v in _VAR_ORDER:
        return (0, _VAR_ORDER.index(v), 0, v)
    m = re.fullmatch(r"([A-Za-z]+)(\d+)", v)
    if m:
        return (1, 0, int(m.group(2)), m.group(1))
    return (2, 0, 0, v)


def parse_product(text: str, field: Field = QQ) -> MultiArrangement:
    """Parse a product of powered linear forms into a multi-arrangement.

    Variables are ordered x, y, z, w, then x1, x2, ... .  Repeated factors
    (up to scalar) have their exponents added.
    """
    factors = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _FACTOR.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input {text[pos:]!r}", 1, pos + 1)
        if m.group("form") is not None:
            terms = _linear_terms(m.group("form"), m.start("form"))
        else:
            terms = {m.group("var"): Fraction(1)}
        factors.append((terms, int(m.group("exp") or 1), m.start() + 1))
        pos = m.end()
    if not factors:
        raise ParseError("empty product")
    names = sorted({v for t, _, _ in factors for v in t}, key=_var_key)
    forms, mults = [], []
    seen = {}
    for terms, e, col in factors:
        try:
            form = tuple(field(terms.get(v, 0)) for v in names)
        except ZeroDivisionError as exc:
            raise ParseError(str(exc), 1, col) from None
        if not any(form):
            raise ParseError("factor vanishes identically", 1, col)
        key = _normalized(form)
        if key in seen:
            mults[seen[key]] += e
            continue
        seen[key] = len(forms)
        forms.append(form)
        mults.append(e)
    return MultiArrangement(field, forms, mults, names=names)
