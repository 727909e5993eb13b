"""A small s-expression reader that keeps source positions."""

from __future__ import annotations

from typing import List, Union


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0, source: str = "<input>"):
        self.msg = msg
        self.line = line
        self.col = col
        self.source = source
        super().__init__("%s:%d:%d: %s" % (source, line, col, msg))


class Atom(str):
    """A symbol token; behaves as ``str`` and remembers where it came from."""

    line = 0
    col = 0

    def __new__(cls, text: str, line: int = 0, col: int = 0):
        a = str.__new__(cls, text)
        a.line = line
        a.col = col
        return a


class SList(list):
    line = 0
    col = 0

    def __init__(self, items=(), line: int = 0, col: int = 0):
        super().__init__(items)
        self.line = line
        self.col = col


SExpr = Union[Atom, SList]

DELIMS = set("() \t\r\n;")


def read_all(text: str, source: str = "<input>") -> List[SExpr]:
    """Parse every top-level form in ``text``."""
    out: List[SExpr] = []
    stack: List[SList] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append(SList((), line, col))
            i += 1
            col += 1
            continue
        if ch == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col, source)
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
            i += 1
            col += 1
            continue
        start, scol = i, col
        while i < n and text[i] not in DELIMS:
            i += 1
            col += 1
        atom = Atom(text[start:i], line, scol)
        (stack[-1] if stack else out).append(atom)
    if stack:
        top = stack[-1]
        raise ParseError("unclosed '('", top.line, top.col, source)
    return out


def read_one(text: str, source: str = "<input>") -> SExpr:
    forms = read_all(text, source)
    if len(forms) != 1:
        raise ParseError("expected exactly one form, found %d" % len(forms), 1, 1, source)
    return forms[0]


def where(x: SExpr):
    return getattr(x, "line", 0), getattr(x, "col", 0)


def dumps(x) -> str:
    if isinstance(x, list):
        return "(" + " ".join(dumps(a) for a in x) + ")"
    return str(x)
