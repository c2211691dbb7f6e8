"""Text form of value distributions.

Grammar (whitespace anywhere between tokens is ignored)::

    expr     := name "(" args ")"
    args     := number | named ("," named)*
    named    := key "=" number

    point(<n>)
    gamma(min=<n>, max=<n>)          gamma(shape=<n>, scale=<n>)
    normal(min=<n>, max=<n>)         normal(mean=<n>, sd=<n>)
    uniform(min=<n>, max=<n>)
    triangular(min=<n>, mode=<n>, max=<n>)

Range forms go through :func:`~cbasim.distributions.fit_from_range`.  Apart
from ``point``, arguments must be named: a bare ``gamma(10000, 100000)``
could mean shape/scale or min/max, and reading it the wrong way turns a
five-figure amount into a ten-figure one.
"""

from __future__ import annotations

import math
import re

from .distributions import (
    DistributionError,
    DistributionSpec,
    Gamma,
    Normal,
    Point,
    Triangular,
    Uniform,
    fit_from_range,
)

__all__ = ["ExpressionError", "parse_value_expr", "format_value_expr", "format_number"]


class ExpressionError(ValueError):
    """Malformed value expression.  ``offset`` is 0-based, ``column`` 1-based."""

    def __init__(self, message: str, text: str, offset: int) -> None:
        self.text = text
        self.offset = offset
        self.column = offset + 1
        super().__init__(f"{message} at column {self.column} in {text!r}")


_TOKEN = re.compile(
    r"\s*(?:(?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<punct>[(),=]))"
)

_FORMS = {
    "gamma": ({"min", "max"}, {"shape", "scale"}),
    "normal": ({"min", "max"}, {"mean", "sd"}),
    "uniform": ({"min", "max"},),
    "triangular": ({"min", "mode", "max"},),
}

_SIGNATURES = {
    "point": "point(<n>)",
    "gamma": "gamma(min=<n>, max=<n>) or gamma(shape=<n>, scale=<n>)",
    "normal": "normal(min=<n>, max=<n>) or normal(mean=<n>, sd=<n>)",
    "uniform": "uniform(min=<n>, max=<n>)",
    "triangular": "triangular(min=<n>, mode=<n>, max=<n>)",
}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = len(text) - len(text[pos:].lstrip())
            raise ExpressionError(f"unexpected character {text[start]!r}", text, start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str, value: str | None = None, what: str | None = None):
        tok = self.tokens[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ExpressionError(f"expected {what or value or kind}, found {found}", self.text, tok[2])
        self.i += 1
        return tok

    def number(self) -> float:
        _, raw, _ = self.take("number", what="a number")
        return float(raw)

    def parse(self):
        _, name, name_at = self.take("name", what="a distribution name")
        fname = name.lower()
        if fname not in _SIGNATURES:
            raise ExpressionError(
                f"unknown distribution {name!r}; expected one of {', '.join(_SIGNATURES)}", self.text, name_at
            )
        self.take("punct", "(", "'('")
        if fname == "point":
            value = self.number()
            self.take("punct", ")", "')'")
            self.take("end", what="end of input")
            return fname, {"value": value}, name_at

        if self.peek()[0] == "number":
            raise ExpressionError(
                f"{fname}() takes named arguments, e.g. {_SIGNATURES[fname]}; a positional form such as "
                f"{fname}(10000,100000) is ambiguous between min/max and shape/scale",
                self.text,
                self.peek()[2],
            )
        args: dict[str, float] = {}
        while True:
            _, key, key_at = self.take("name", what="an argument name")
            if key in args:
                raise ExpressionError(f"duplicate argument {key!r}", self.text, key_at)
            self.take("punct", "=", "'='")
            args[key] = self.number()
            if self.peek()[:2] == ("punct", ","):
                self.i += 1
                continue
            break
        self.take("punct", ")", "',' or ')'")
        self.take("end", what="end of input")
        if set(args) not in _FORMS[fname]:
            raise ExpressionError(
                f"{fname}() got arguments ({', '.join(args)}); expected {_SIGNATURES[fname]}", self.text, name_at
            )
        return fname, args, name_at


def parse_value_expr(text: str) -> DistributionSpec:
    """Parse a value expression into a distribution.

    >>> parse_value_expr("point(2244)")
    Point(value=2244.0)
    """
    fname, a, at = _Parser(text).parse()
    try:
        if fname == "point":
            return Point(a["value"])
        if "min" in a and fname != "triangular":
            return fit_from_range(fname, a["min"], a["max"])
        if fname == "gamma":
            return Gamma(a["shape"], a["scale"])
        if fname == "normal":
            return Normal(a["mean"], a["sd"])
        return Triangular(a["min"], a["mode"], a["max"])
    except DistributionError as exc:
        raise ExpressionError(str(exc), text, at) from exc


def format_number(x: float) -> str:
    """Shortest text that parses back to exactly ``x``."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot format non-finite number {x}")
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def format_value_expr(spec: DistributionSpec) -> str:
    """Inverse of :func:`parse_value_expr`."""
    n = format_number
    if isinstance(spec, Point):
        return f"point({n(spec.value)})"
    if isinstance(spec, Gamma):
        if spec.bounds is not None:
            return f"gamma(min={n(spec.bounds[0])}, max={n(spec.bounds[1])})"
        return f"gamma(shape={n(spec.shape)}, scale={n(spec.scale)})"
    if isinstance(spec, Normal):
        if spec.bounds is not None:
            return f"normal(min={n(spec.bounds[0])}, max={n(spec.bounds[1])})"
        return f"normal(mean={n(spec.mu)}, sd={n(spec.sigma)})"
    if isinstance(spec, Uniform):
        return f"uniform(min={n(spec.low)}, max={n(spec.high)})"
    if isinstance(spec, Triangular):
        return f"triangular(min={n(spec.low)}, mode={n(spec.mode)}, max={n(spec.high)})"
    raise TypeError(f"not a distribution spec: {spec!r}")
