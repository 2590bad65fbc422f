"""Text grammar for elements and generator expressions.

::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := int | [int '*'] factor ('*' factor)*
    factor := 'e[' ints ']' | 'x[' ints ']' | 'a[' ints ']'

Whitespace is insignificant.  ``e[i,j,...]`` is ``e_i ^ e_j ^ ...`` in the
given order, ``x[a_1,...,a_n]`` is ``x^a`` and ``a[i,j,...]`` is the blowup
generator ``d(e_i ^ e_j ^ ...)``.  With ``n > 1`` a one-entry ``x[i]`` is
accepted as the variable ``x_i``.  Products are twisted.
"""

import re

from .koszul import Element, KoszulIndex, apply_dh


class ParseError(ValueError):
    """Syntax or range error; ``position`` is a 0-based offset into the input."""

    def __init__(self, message, position, text=""):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")

    def caret(self):
        return f"{self.text}\n{' ' * self.position}^"


_TOKEN = re.compile(r"\s*(?:(\d+)|([exa])\s*\[|(\])|([,+\-*]))")


def _tokenize(text):
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if not m:
            j = pos
            while j < len(text) and text[j].isspace():
                j += 1
            raise ParseError(f"unexpected character {text[j]!r}", j, text)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("open", m.group(2), start))
        elif m.group(3) is not None:
            tokens.append(("]", "]", start))
        else:
            tokens.append((m.group(4), m.group(4), start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, n, generators):
        self.text = text
        self.n = n
        self.generators = generators
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise self.error(f"expected {kind!r}, found {self.describe(tok)}", tok)
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, tok[2], self.text)

    @staticmethod
    def describe(tok):
        return "end of input" if tok[0] == "end" else repr(str(tok[1]))

    def expr(self):
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        total = self.term().scale(sign)
        while self.peek()[0] in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
            total = total + self.term().scale(sign)
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.describe(self.peek())}")
        return total

    def term(self):
        coeff = 1
        tok = self.peek()
        if tok[0] == "int":
            coeff = self.take()[1]
            if self.peek()[0] != "*":
                return Element.unit(self.n).scale(coeff)
            self.take("*")
        value = self.factor()
        while self.peek()[0] == "*":
            self.take()
            value = value * self.factor()
        return value.scale(coeff)

    def ints(self):
        values = []
        if self.peek()[0] == "]":
            self.take()
            return values, []
        positions = []
        while True:
            tok = self.take("int")
            values.append(tok[1])
            positions.append(tok)
            if self.peek()[0] == ",":
                self.take()
                continue
            self.take("]")
            return values, positions

    def factor(self):
        tok = self.peek()
        if tok[0] != "open":
            raise self.error(f"expected e[, x[ or a[, found {self.describe(tok)}", tok)
        self.take()
        kind = tok[1]
        values, positions = self.ints()
        if kind == "e":
            for v, p in zip(values, positions):
                if not 1 <= v <= self.n:
                    raise self.error(f"index {v} out of range 1..{self.n}", p)
            return Element.e(self.n, *values)
        if kind == "x":
            if len(values) == self.n:
                return Element.x(tuple(values))
            if len(values) == 1 and self.n > 1:
                i = values[0]
                if not 1 <= i <= self.n:
                    raise self.error(f"variable x[{i}] out of range 1..{self.n}", positions[0])
                return Element.x(tuple(1 if j == i - 1 else 0 for j in range(self.n)))
            raise self.error(f"x[...] needs {self.n} exponents, got {len(values)}", tok)
        if not self.generators:
            raise self.error("generators a[...] are not allowed here", tok)
        if len(values) < 2:
            raise self.error("a[...] needs at least two indices", tok)
        for v, p in zip(values, positions):
            if not 1 <= v <= self.n:
                raise self.error(f"index {v} out of range 1..{self.n}", p)
        return apply_dh(Element.e(self.n, *values))


def parse(text, n, generators=False):
    """Parse ``text`` into an :class:`Element` with ``n`` variables."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not text.strip():
        raise ParseError("empty expression", 0, text)
    return _Parser(text, n, generators).expr()


def parse_label(text, n):
    """Parse a single label such as ``e[1,3]*x[0,4,0]``; returns ``(sign, KoszulIndex)``."""
    el = parse(text, n)
    if len(el.terms) != 1:
        raise ParseError("expected a single basis label", 0, text)
    (lab, c), = el.terms.items()
    if c not in (1, -1):
        raise ParseError("expected a signed basis label", 0, text)
    return c, lab


def format_element(xi):
    """Canonical text form; ``parse(format_element(xi), n) == xi``."""
    return xi.format()


def format_label(label):
    return KoszulIndex.format(label)


__all__ = ["ParseError", "format_element", "format_label", "parse", "parse_label"]
