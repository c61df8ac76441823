"""Expression language for defining functions and structure entries.

Grammar: rational literals (INT or INT/INT), variables x1..xn, y1..yn and
the complex sugar z1..zn, operators + - * ^ with natural exponents,
functions Re, Im, conj, abs2, and parentheses.  No general division; a
slash is only part of a rational literal.  Expressions are expanded into
exact truncated series over the 2n real coordinates; an expression whose
imaginary part survives the expansion is rejected.
"""

import re as _re

from .errors import ParseError
from .jets import TruncatedSeries
from .rational import Q

_TOKEN = _re.compile(r"""
    (?P<num>\d+(?:\s*/\s*\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[+\-*^()])
  | (?P<ws>\s+)
  | (?P<bad>.)
""", _re.VERBOSE)

_VAR = _re.compile(r"^([xyz])([1-9][0-9]*)$")
_FUNCTIONS = ("Re", "Im", "conj", "abs2")


def _tokenize(text):
    out = []
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        if kind == "ws":
            continue
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group()!r}", m.start())
        out.append((kind, m.group(), m.start()))
    out.append(("end", "", len(text)))
    return out


class _Parser:
    """Recursive descent over the token list, building a small tree."""

    def __init__(self, tokens, n):
        self.tokens = tokens
        self.pos = 0
        self.n = n

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect_op(self, op):
        kind, val, at = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", at)
        return self.take()

    def parse(self):
        node = self.expr()
        kind, val, at = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", at)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                node = ("add" if val == "+" else "sub", node, rhs)
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                node = ("mul", node, self.unary())
            else:
                return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "^":
                self.take()
                nk, nv, at = self.take()
                if nk != "num" or "/" in nv:
                    raise ParseError("exponent must be a natural number", at)
                node = ("pow", node, int(nv))
            else:
                return node

    def atom(self):
        kind, val, at = self.take()
        if kind == "num":
            if "/" in val:
                a, b = val.split("/")
                if int(b) == 0:
                    raise ParseError("zero denominator", at)
                return ("num", Q(int(a), int(b)))
            return ("num", Q(int(val)))
        if kind == "name":
            if val in _FUNCTIONS:
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return ("fun", val, inner)
            m = _VAR.match(val)
            if m:
                idx = int(m.group(2))
                if idx > self.n:
                    raise ParseError(
                        f"variable {val} out of range for n={self.n}", at)
                return ("var", m.group(1), idx)
            raise ParseError(f"unknown name {val!r}", at)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected {val!r}", at)


def _degree(node) -> int:
    tag = node[0]
    if tag == "num":
        return 0
    if tag == "var":
        return 1
    if tag == "neg":
        return _degree(node[1])
    if tag in ("add", "sub"):
        return max(_degree(node[1]), _degree(node[2]))
    if tag == "mul":
        return _degree(node[1]) + _degree(node[2])
    if tag == "pow":
        return _degree(node[1]) * node[2]
    if tag == "fun":
        d = _degree(node[2])
        return 2 * d if node[1] == "abs2" else d
    raise AssertionError(tag)


def _eval(node, n, cap):
    """Evaluate to a (real, imaginary) pair of series."""
    tag = node[0]
    zero = TruncatedSeries.zero(2 * n, cap)
    if tag == "num":
        return TruncatedSeries.constant(node[1], 2 * n, cap), zero
    if tag == "var":
        kind, idx = node[1], node[2]
        base = 2 * (idx - 1)
        xs = TruncatedSeries.variable(base, 2 * n, cap)
        ys = TruncatedSeries.variable(base + 1, 2 * n, cap)
        if kind == "x":
            return xs, zero
        if kind == "y":
            return ys, zero
        return xs, ys  # z_i = x_i + i y_i
    if tag == "neg":
        re_, im_ = _eval(node[1], n, cap)
        return -re_, -im_
    if tag in ("add", "sub"):
        ar, ai = _eval(node[1], n, cap)
        br, bi = _eval(node[2], n, cap)
        if tag == "add":
            return ar + br, ai + bi
        return ar - br, ai - bi
    if tag == "mul":
        ar, ai = _eval(node[1], n, cap)
        br, bi = _eval(node[2], n, cap)
        return ar * br - ai * bi, ar * bi + ai * br
    if tag == "pow":
        ar, ai = _eval(node[1], n, cap)
        rr, ri = TruncatedSeries.constant(1, 2 * n, cap), zero
        for _ in range(node[2]):
            rr, ri = rr * ar - ri * ai, rr * ai + ri * ar
        return rr, ri
    if tag == "fun":
        fr, fi = _eval(node[2], n, cap)
        name = node[1]
        if name == "Re":
            return fr, zero
        if name == "Im":
            return fi, zero
        if name == "conj":
            return fr, -fi
        return fr * fr + fi * fi, zero  # abs2
    raise AssertionError(tag)


def parse_expression(text: str, n: int, cap: int | None = None) -> TruncatedSeries:
    """Expand an expression into an exact series in the 2n real variables.

    Evaluation runs at a cap no smaller than the expression's total degree,
    so the expansion is an exact polynomial identity; the result is then
    re-capped to the requested truncation order.
    """
    if n < 1:
        raise ValueError("n must be positive")
    node = _Parser(_tokenize(text), n).parse()
    work = max(_degree(node), cap or 0, 2)
    re_, im_ = _eval(node, n, work)
    if not im_.is_zero():
        raise ParseError("expression is not real-valued")
    if cap is not None and cap < work:
        re_ = re_.truncate(cap)
    return re_


def _monomial_text(exps) -> str:
    parts = []
    for idx, e in enumerate(exps):
        if e == 0:
            continue
        name = ("x" if idx % 2 == 0 else "y") + str(idx // 2 + 1)
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def series_to_expression(s: TruncatedSeries) -> str:
    """Render a series in the input grammar; re-parsing at the same cap
    reproduces the series exactly."""
    if s.num_vars % 2:
        raise ValueError("the grammar only covers an even number of variables")
    bits: list[str] = []
    for exps, c in s.terms():
        mono = _monomial_text(exps)
        neg = c < 0
        mag = -c if neg else c
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = f"{mag}"
        if not bits:
            bits.append(f"-{body}" if neg else body)
        else:
            bits.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(bits) if bits else "0"
