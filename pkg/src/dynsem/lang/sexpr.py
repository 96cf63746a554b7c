"""Position-tracking s-expression reader and canonical printer.

Atoms are bare tokens or double-quoted strings (with ``\\"`` and ``\\\\``
escapes). ``;`` starts a comment running to the end of the line. Lines and
columns are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ParseError

RESERVED = set('();"\\')


@dataclass(frozen=True)
class SAtom:
    text: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def position(self) -> tuple[int, int]:
        return (self.line, self.col)


@dataclass(frozen=True)
class SList:
    children: tuple = ()
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    @property
    def position(self) -> tuple[int, int]:
        return (self.line, self.col)

    def __len__(self) -> int:
        return len(self.children)

    def __iter__(self):
        return iter(self.children)

    def __getitem__(self, i):
        return self.children[i]

    @property
    def head(self) -> str | None:
        if self.children and isinstance(self.children[0], SAtom):
            return self.children[0].text
        return None


SExpr = SAtom | SList


def excerpt(text: str, line: int, col: int) -> str:
    lines = text.splitlines() or [""]
    src = lines[line - 1] if 0 < line <= len(lines) else ""
    return f"  {src}\n  {' ' * (col - 1)}^"


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str, line: int, col: int) -> ParseError:
        return ParseError(message, (line, col), excerpt(self.text, line, col))

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip(self) -> None:
        while self.pos < len(self.text):
            ch = self.peek()
            if ch.isspace():
                self.advance()
            elif ch == ";":
                while self.pos < len(self.text) and self.peek() != "\n":
                    self.advance()
            else:
                break

    def read(self) -> SExpr:
        self.skip()
        line, col = self.line, self.col
        ch = self.peek()
        if ch == "":
            raise self.error("unexpected end of input", line, col)
        if ch == ")":
            raise self.error("unexpected ')'", line, col)
        if ch == "(":
            self.advance()
            children = []
            while True:
                self.skip()
                if self.peek() == "":
                    raise self.error(f"unbalanced '(' opened at {line}:{col}", self.line, self.col)
                if self.peek() == ")":
                    self.advance()
                    return SList(tuple(children), line, col)
                children.append(self.read())
        if ch == '"':
            return self.read_string(line, col)
        start = self.pos
        while self.pos < len(self.text):
            c = self.peek()
            if c.isspace() or c in "();":
                break
            if c in '"\\':
                raise self.error(f"stray {c!r} inside atom", self.line, self.col)
            self.advance()
        return SAtom(self.text[start:self.pos], line, col)

    def read_string(self, line: int, col: int) -> SAtom:
        self.advance()
        out = []
        while True:
            c = self.peek()
            if c == "":
                raise self.error(f"unterminated string opened at {line}:{col}", self.line, self.col)
            self.advance()
            if c == '"':
                return SAtom("".join(out), line, col)
            if c == "\\":
                nxt = self.peek()
                if nxt not in ('"', "\\"):
                    raise self.error("unknown escape in string", self.line, self.col)
                out.append(self.advance())
            else:
                out.append(c)


def parse_all(text: str) -> list[SExpr]:
    """Every top-level form in ``text``."""
    reader = _Reader(text)
    forms = []
    while True:
        reader.skip()
        if reader.peek() == "":
            return forms
        forms.append(reader.read())


def parse(text: str) -> SExpr:
    """Exactly one form; trailing tokens are an error."""
    reader = _Reader(text)
    form = reader.read()
    reader.skip()
    if reader.peek() != "":
        raise reader.error("unexpected token after expression", reader.line, reader.col)
    return form


def _needs_quotes(text: str) -> bool:
    return text == "" or any(c.isspace() or c in RESERVED for c in text)


def format_atom(text: str) -> str:
    if not _needs_quotes(text):
        return text
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format(expr: SExpr) -> str:  # noqa: A001 - mirrors parse
    """Canonical single-line text for ``expr``."""
    if isinstance(expr, SAtom):
        return format_atom(expr.text)
    return "(" + " ".join(format(c) for c in expr.children) + ")"


def format_all(forms: list[SExpr]) -> str:
    return "".join(format(f) + "\n" for f in forms)
