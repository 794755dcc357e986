"""Parser and pretty-printer for lattice expressions.

Grammar (whitespace-insensitive)::

    expr  := term ('+' term)*
    term  := block ('*' INT)?
    block := NAME ('(' args ')')? | '<' INT '>' | '[' rows ']'
    args  := INT (',' INT)*
    rows  := row (';' row)*          row := INT (','? INT)*

Examples: ``U + U(3) + A2*2``, ``<2> + E8(2)``, ``[-4 1; 1 -2]``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


class ExprSyntaxError(ValueError):
    def __init__(self, position: int, expected: str, found: str = ""):
        self.position = position
        self.expected = expected
        self.found = found
        msg = f"at offset {position}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)

    def to_json(self) -> dict:
        return {"type": "SyntaxError", "position": self.position,
                "expected": self.expected, "message": str(self)}


@dataclass(frozen=True)
class Block:
    name: str
    params: tuple[int, ...] = ()


@dataclass(frozen=True)
class LiteralGram:
    matrix: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Repeat:
    expr: "LatticeExpr"
    count: int


@dataclass(frozen=True)
class Sum:
    items: tuple["LatticeExpr", ...]


LatticeExpr = Union[Block, LiteralGram, Repeat, Sum]

_TOKEN = re.compile(r"\s*(?:(?P<int>-?\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*()<>\[\];,]))")


class _Tokens:
    def __init__(self, src: str):
        self.src = src
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(src) and src[pos].isspace():
                pos += 1
            if pos >= len(src):
                break
            m = _TOKEN.match(src, pos)
            if not m or m.end() == pos:
                raise ExprSyntaxError(pos, "a token", src[pos])
            kind = m.lastgroup
            start = m.start(kind)
            self.toks.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0
        self.end = len(src)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "", self.end)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ExprSyntaxError(pos, repr(op), val)

    def expect_int(self, what="integer") -> int:
        kind, val, pos = self.take()
        if kind != "int":
            raise ExprSyntaxError(pos, what, val)
        return int(val)


def parse(src: str) -> LatticeExpr:
    toks = _Tokens(src)
    e = _expr(toks)
    kind, val, pos = toks.peek()
    if kind != "eof":
        raise ExprSyntaxError(pos, "'+', '*' or end of input", val)
    return e


def _expr(t: _Tokens) -> LatticeExpr:
    items = [_term(t)]
    while t.peek()[:2] == ("op", "+"):
        t.take()
        items.append(_term(t))
    return items[0] if len(items) == 1 else Sum(tuple(items))


def _term(t: _Tokens) -> LatticeExpr:
    b = _block(t)
    if t.peek()[:2] == ("op", "*"):
        t.take()
        pos = t.peek()[2]
        n = t.expect_int("repeat count")
        if n < 1:
            raise ExprSyntaxError(pos, "positive repeat count", str(n))
        return Repeat(b, n)
    return b


def _block(t: _Tokens) -> LatticeExpr:
    kind, val, pos = t.take()
    if kind == "name":
        params: tuple[int, ...] = ()
        if t.peek()[:2] == ("op", "("):
            t.take()
            args = [t.expect_int("integer argument")]
            while t.peek()[:2] == ("op", ","):
                t.take()
                args.append(t.expect_int("integer argument"))
            t.expect_op(")")
            params = tuple(args)
        return Block(val, params)
    if (kind, val) == ("op", "<"):
        k = t.expect_int()
        t.expect_op(">")
        return Block("<>", (k,))
    if (kind, val) == ("op", "["):
        rows = [[t.expect_int("matrix entry")]]
        while True:
            k2, v2, p2 = t.peek()
            if k2 == "int":
                rows[-1].append(int(t.take()[1]))
            elif (k2, v2) == ("op", ","):
                t.take()
            elif (k2, v2) == ("op", ";"):
                t.take()
                rows.append([t.expect_int("matrix entry")])
            elif (k2, v2) == ("op", "]"):
                t.take()
                break
            else:
                raise ExprSyntaxError(p2, "matrix entry, ';' or ']'", v2)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ExprSyntaxError(pos, "square matrix")
        if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
            raise ExprSyntaxError(pos, "symmetric matrix")
        return LiteralGram(tuple(tuple(r) for r in rows))
    raise ExprSyntaxError(pos, "lattice name, '<' or '['", val)


def pretty(e: LatticeExpr) -> str:
    if isinstance(e, Block):
        if e.name == "<>":
            return f"<{e.params[0]}>"
        if e.params:
            return f"{e.name}({','.join(map(str, e.params))})"
        return e.name
    if isinstance(e, LiteralGram):
        return "[" + "; ".join(" ".join(map(str, r)) for r in e.matrix) + "]"
    if isinstance(e, Repeat):
        return f"{pretty(e.expr)}*{e.count}"
    if isinstance(e, Sum):
        return " + ".join(pretty(x) for x in e.items)
    raise TypeError(f"not an expression: {e!r}")


def flatten(e: LatticeExpr) -> list[LatticeExpr]:
    """Summands of ``e`` with repeats expanded, in order."""
    if isinstance(e, Sum):
        return [b for x in e.items for b in flatten(x)]
    if isinstance(e, Repeat):
        return flatten(e.expr) * e.count
    return [e]
