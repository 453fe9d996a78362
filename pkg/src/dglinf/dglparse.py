"""Parser for the ``.dgl`` description language.

::

    file   := "dgl" "{" decl* "}"
    decl   := "gen" IDENT ":" INT | "d" IDENT "=" expr | "cap" INT | "title" STRING
    expr   := term (("+" | "-") term)*       (a leading "-" is allowed)
    term   := (RATIONAL "*")? factor | "0"
    factor := IDENT | "[" expr "," expr "]" | "(" expr ")"

``#`` starts a comment running to the end of the line.  A generator with no
``d`` declaration has zero differential.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .freelie import FreeDGL, Generator, LieElement, bracket

KEYWORDS = {"dgl", "gen", "cap", "title"}


class DglSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"[^"\n]*")
  | (?P<rational>\d+/\d+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}\[\](),:=+\-*])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise DglSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- expression tree ---------------------------------------------------------

@dataclass(frozen=True)
class Gen:
    name: str
    line: int
    col: int


@dataclass(frozen=True)
class Bracket:
    left: "Expr"
    right: "Expr"
    line: int
    col: int


@dataclass(frozen=True)
class Sum:
    terms: tuple          # of (Fraction, factor)
    line: int
    col: int


Expr = Gen | Bracket | Sum


def format_expr(e) -> str:
    if isinstance(e, Gen):
        return e.name
    if isinstance(e, Bracket):
        return f"[{format_expr(e.left)},{format_expr(e.right)}]"
    if not e.terms:
        return "0"
    out = ""
    for i, (c, f) in enumerate(e.terms):
        body = format_expr(f)
        if isinstance(f, Sum):
            body = f"({body})"
        mag = abs(c)
        if mag != 1:
            body = f"{mag}*{body}"
        if i == 0:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out


def evaluate(e, degrees: Mapping[str, int], index: Mapping[str, int] | None = None) -> LieElement:
    """Evaluate against generator degrees; words use ``index`` (name -> position)."""
    index = index or {name: i for i, name in enumerate(degrees)}
    if isinstance(e, Gen):
        if e.name not in degrees:
            raise DglSyntaxError(f"unknown identifier {e.name!r}", e.line, e.col)
        return LieElement(degrees[e.name], {(index[e.name],): 1})
    if isinstance(e, Bracket):
        return bracket(evaluate(e.left, degrees, index), evaluate(e.right, degrees, index))
    result = None
    for c, f in e.terms:
        val = evaluate(f, degrees, index)
        if result is not None and val.degree != result.degree:
            raise DglSyntaxError(
                f"degree mismatch: term of degree {val.degree} added to degree {result.degree}",
                e.line, e.col)
        result = c * val if result is None else result + c * val
    if result is None:
        # literal 0 carries no degree; callers fix it up
        return LieElement(-10**9)
    return result


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> Token:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        found = tok.text if tok.kind != "eof" else "end of input"
        raise DglSyntaxError(f"{msg} (found {found!r})", tok.line, tok.col)

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind == "string":
            self.error(f"expected {text!r}")
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            self.error(f"expected {what}")
        return self.next()

    def document(self) -> "DglDocument":
        self.expect("dgl")
        self.expect("{")
        doc = DglDocument()
        while self.peek().text != "}":
            t = self.peek()
            if t.kind == "eof":
                self.error("unclosed '{'")
            if t.text == "gen":
                self.next()
                name = self.expect_kind("ident", "generator name")
                self.expect(":")
                deg = self.expect_kind("int", "integer degree")
                doc.generators.append((name.text, int(deg.text), name.line, name.col))
            elif t.text == "d" and self.peek(1).kind == "ident" and self.peek(2).text == "=":
                self.next()
                name = self.next()
                self.expect("=")
                doc.differentials.append((name.text, self.expr(), name.line, name.col))
            elif t.text == "cap":
                self.next()
                doc.cap = int(self.expect_kind("int", "integer cap").text)
            elif t.text == "title":
                self.next()
                doc.title = self.expect_kind("string", "quoted title").text[1:-1]
            else:
                self.error("expected 'gen', 'd', 'cap' or 'title'")
        self.expect("}")
        if self.peek().kind != "eof":
            self.error("trailing input after closing '}'")
        return doc

    def expr(self):
        start = self.peek()
        terms = []
        sign = 1
        if self.peek().text == "-":
            self.next()
            sign = -1
        elif self.peek().text == "+":
            self.next()
        terms.append(self.term(sign))
        while self.peek().text in ("+", "-"):
            sign = 1 if self.next().text == "+" else -1
            terms.append(self.term(sign))
        terms = [t for t in terms if t is not None]
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return Sum(tuple(terms), start.line, start.col)

    def term(self, sign: int):
        t = self.peek()
        if t.kind in ("int", "rational"):
            if self.peek(1).text == "*":
                self.next()
                self.next()
                return (sign * Fraction(t.text), self.factor())
            if t.text == "0":
                self.next()
                return None
            self.error("expected '*' after coefficient", self.peek(1))
        return (Fraction(sign), self.factor())

    def factor(self):
        t = self.peek()
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.next()
            return Gen(t.text, t.line, t.col)
        if t.text == "[":
            self.next()
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect("]")
            return Bracket(a, b, t.line, t.col)
        if t.text == "(":
            self.next()
            e = self.expr()
            self.expect(")")
            if not isinstance(e, Sum):
                e = Sum(((Fraction(1), e),), t.line, t.col)
            return e
        self.error("expected a generator, '[' or '('")


@dataclass
class DglDocument:
    generators: list = field(default_factory=list)      # (name, degree, line, col)
    differentials: list = field(default_factory=list)   # (name, expr, line, col)
    cap: int | None = None
    title: str = ""

    def validate(self) -> None:
        seen = {}
        for name, deg, line, col in self.generators:
            if name in seen:
                raise DglSyntaxError(f"generator {name!r} declared twice", line, col)
            if deg < 1:
                raise DglSyntaxError(f"generator {name!r} needs degree >= 1", line, col)
            seen[name] = deg
        done = set()
        for name, e, line, col in self.differentials:
            if name not in seen:
                raise DglSyntaxError(f"differential of undeclared generator {name!r}", line, col)
            if name in done:
                raise DglSyntaxError(f"differential of {name!r} given twice", line, col)
            done.add(name)
            val = evaluate(e, seen)
            if val.terms and val.degree != seen[name] - 1:
                raise DglSyntaxError(
                    f"degree mismatch: d{name} has degree {val.degree}, expected {seen[name] - 1}",
                    line, col)

    def to_dgl(self, cap: int | None = None) -> FreeDGL:
        self.validate()
        degrees = {name: deg for name, deg, *_ in self.generators}
        gens = [Generator(name, deg) for name, deg, *_ in self.generators]
        diff = {}
        for name, e, *_ in self.differentials:
            val = evaluate(e, degrees)
            diff[name] = val if val.terms else LieElement(degrees[name] - 1)
        cap = cap if cap is not None else (self.cap if self.cap is not None else default_cap(gens))
        return FreeDGL(gens, diff, cap, self.title)

    def serialize(self) -> str:
        lines = ["dgl {"]
        if self.title:
            lines.append(f'  title "{self.title}"')
        if self.cap is not None:
            lines.append(f"  cap {self.cap}")
        for name, deg, *_ in self.generators:
            lines.append(f"  gen {name}:{deg}")
        for name, e, *_ in self.differentials:
            lines.append(f"  d {name} = {format_expr(e)}")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def canonical(self) -> tuple:
        """Location-free content, for equality after a round trip."""
        return (tuple((n, d) for n, d, *_ in self.generators),
                tuple((n, format_expr(e)) for n, e, *_ in self.differentials),
                self.cap, self.title)


def default_cap(gens) -> int:
    return max((g.degree for g in gens), default=1) + 1


def parse_dgl(text: str) -> DglDocument:
    doc = _Parser(text).document()
    doc.validate()
    return doc


def parse_expression(text: str, dgl: FreeDGL) -> LieElement:
    """Parse a standalone expression against the generators of ``dgl``."""
    p = _Parser(text)
    e = p.expr()
    if p.peek().kind != "eof":
        p.error("trailing input after expression")
    degrees = {g.name: g.degree for g in dgl.generators}
    return evaluate(e, degrees, dgl.index)


def dgl_to_document(dgl: FreeDGL) -> DglDocument:
    """Document for an in-memory DGL (differentials rendered on the Lie basis)."""
    doc = DglDocument(title=dgl.title, cap=dgl.degree_cap)
    for g in dgl.generators:
        doc.generators.append((g.name, g.degree, 0, 0))
    for g in dgl.generators:
        dg = dgl.differential_of(g.name)
        if dg.terms:
            text = _format_free(dgl, dg)
            p = _Parser(text)
            doc.differentials.append((g.name, p.expr(), 0, 0))
    return doc


def _format_free(dgl: FreeDGL, x: LieElement) -> str:
    # like FreeDGL.format but without requiring |x| <= cap
    if x.degree <= dgl.degree_cap:
        return dgl.format(x)
    big = FreeDGL(dgl.generators, None, x.degree)
    return big.format(x)
