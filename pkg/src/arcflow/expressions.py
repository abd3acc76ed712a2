"""Tiny prefix grammar for arc-field expressions.

    expr     := NAME | call
    call     := 'sum' '(' expr ',' expr ')'
              | 'scale' '(' NUMBER ',' expr ')'
              | 'bracket' '(' expr ',' expr ')'
              | 'ibracket' '(' expr ',' expr ',' INT ')'

Names resolve against a registry of fixture arc fields. Parse errors
name the offending token.
"""

import re

from arcflow.arcs import bracket, iterated_bracket, scale_field, sum_fields
from arcflow.errors import ExpressionError

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|[-+]?\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|[(),])")


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            snippet = text[pos:pos + 12]
            raise ExpressionError(f"cannot tokenize at {snippet!r}", token=snippet)
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, registry):
        self.tokens = tokens
        self.i = 0
        self.registry = registry

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise ExpressionError(
                f"unexpected end of expression (wanted {expected or 'a token'})",
                token="<end>")
        if expected is not None and tok != expected:
            raise ExpressionError(f"expected {expected!r}, found {tok!r}", token=tok)
        self.i += 1
        return tok

    def parse_expr(self):
        tok = self.take()
        if tok in ("sum", "bracket"):
            self.take("(")
            a = self.parse_expr()
            self.take(",")
            b = self.parse_expr()
            self.take(")")
            return sum_fields(a, b) if tok == "sum" else bracket(a, b)
        if tok == "scale":
            self.take("(")
            num = self.take()
            try:
                c = float(num)
            except ValueError:
                raise ExpressionError(
                    f"scale needs a numeric constant, found {num!r}", token=num)
            self.take(",")
            a = self.parse_expr()
            self.take(")")
            return scale_field(c, a)
        if tok == "ibracket":
            self.take("(")
            a = self.parse_expr()
            self.take(",")
            b = self.parse_expr()
            self.take(",")
            num = self.take()
            try:
                n = int(num)
            except ValueError:
                raise ExpressionError(
                    f"ibracket depth must be an integer, found {num!r}", token=num)
            self.take(")")
            return iterated_bracket(a, b, n)
        if tok in ("(", ")", ","):
            raise ExpressionError(f"unexpected {tok!r}", token=tok)
        if tok not in self.registry:
            raise ExpressionError(f"unknown fixture {tok!r}", token=tok)
        return self.registry[tok]


def parse_expression(text, registry):
    """Parse an expression string into an arc field over named fixtures."""
    parser = _Parser(tokenize(text), registry)
    field = parser.parse_expr()
    if parser.peek() is not None:
        raise ExpressionError(f"trailing input {parser.peek()!r}",
                              token=parser.peek())
    return field
