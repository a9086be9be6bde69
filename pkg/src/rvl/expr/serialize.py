"""Text forms of expressions: plain, LaTeX and the s-expression exchange format.

Grammar of the s-expression format::

    atom  := -?[0-9]+ | -?[0-9]+/[0-9]+ | x
    node  := (+ e...) | (* e...) | (^ e k) | (exp e) | (int e)
           | (dn NAME k) | (fn NAME) | (par NAME)

`(fn NAME)` is shorthand for `(dn NAME 0)`. Function names and parameter
names must be declared in the `SymbolTable` handed to `parse`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Literal

from pydantic import BaseModel, ConfigDict

from ..errors import ParseError, UnknownSymbolError
from .canonical import normalize
from .nodes import (
    Add, Const, Exp, Expr, FunctionSymbol, Int, Mul, Param, Pow, X, XVar,
)


Format = Literal["plain", "latex", "sexpr"]


class SymbolTable(BaseModel):
    """Declared function and parameter names; `indexed` prefixes accept any numeric suffix."""

    model_config = ConfigDict(frozen=True)

    functions: frozenset[str] = frozenset({"w", "y", "z", "W", "q"})
    indexed: frozenset[str] = frozenset({"a", "r"})
    params: frozenset[str] = frozenset({"a"})

    def declares_function(self, name: str) -> bool:
        if name in self.functions:
            return True
        match = re.fullmatch(r"([A-Za-z_]+)(\d+)", name)
        return bool(match) and match.group(1) in self.indexed

    def declares_param(self, name: str) -> bool:
        return name in self.params

    def with_functions(self, *names: str) -> SymbolTable:
        return self.model_copy(update={"functions": self.functions | frozenset(names)})


DEFAULT_SYMBOLS = SymbolTable()


# ---------------------------------------------------------------- rendering

_LATEX_NAMES = {"w": r"\omega", "W": "W", "y": "y", "z": "z", "q": "q"}
_INDEXED_LATEX = re.compile(r"^([ar])(\d+)$")


def _fraction_plain(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _fraction_latex(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    sign = "-" if value < 0 else ""
    return rf"{sign}\frac{{{abs(value.numerator)}}}{{{value.denominator}}}"


def _latex_name(name: str) -> str:
    if name in _LATEX_NAMES:
        return _LATEX_NAMES[name]
    match = _INDEXED_LATEX.match(name)
    if match:
        letter = r"\alpha" if match.group(1) == "a" else "r"
        return f"{letter}_{{{match.group(2)}}}"
    return name


def _split_coefficient(term: Expr) -> tuple[Fraction, list[Expr]]:
    match term:
        case Const():
            return term.value, []
        case Mul():
            factors = list(term.factors)
            if factors and isinstance(factors[0], Const):
                return factors[0].value, factors[1:]
            return Fraction(1), factors
    return Fraction(1), [term]


class _Renderer:
    """Walks a canonical tree; subclasses decide the spelling of each node."""

    def render(self, e: Expr) -> str:
        if isinstance(e, Add):
            return self.sum(e.terms)
        return self.sum((e,))

    def sum(self, terms: tuple[Expr, ...]) -> str:
        pieces: list[str] = []
        for i, term in enumerate(terms):
            coefficient, factors = _split_coefficient(term)
            negative = coefficient < 0
            body = self.product(abs(coefficient), factors)
            if i == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces) if pieces else "0"

    def product(self, coefficient: Fraction, factors: list[Expr]) -> str:
        raise NotImplementedError

    def factor(self, e: Expr) -> str:
        match e:
            case Pow():
                return self.power(e.base, e.exponent)
            case Const():
                return self.constant(e.value)
        return self.atom(e)

    def power(self, base: Expr, exponent: int) -> str:
        raise NotImplementedError

    def constant(self, value: Fraction) -> str:
        raise NotImplementedError

    def atom(self, e: Expr) -> str:
        raise NotImplementedError


class _PlainRenderer(_Renderer):
    def product(self, coefficient: Fraction, factors: list[Expr]) -> str:
        parts = [self.factor(f) for f in factors]
        if coefficient != 1 or not parts:
            parts.insert(0, _fraction_plain(coefficient))
        return "*".join(parts)

    def power(self, base: Expr, exponent: int) -> str:
        text = self.atom(base)
        if isinstance(base, Add):
            text = f"({text})"
        return f"{text}^{exponent}" if exponent > 0 else f"{text}^({exponent})"

    def constant(self, value: Fraction) -> str:
        return _fraction_plain(value)

    def atom(self, e: Expr) -> str:
        match e:
            case XVar():
                return "x"
            case Param():
                return e.name
            case FunctionSymbol():
                if e.order <= 3:
                    return e.name + "'" * e.order
                return f"{e.name}^({e.order})"
            case Exp():
                return f"exp({self.render(e.arg)})"
            case Int():
                return f"Int({self.render(e.arg)})"
            case Add():
                return self.render(e)
        raise TypeError(f"Cannot render {type(e).__name__}")


class _LatexRenderer(_Renderer):
    def product(self, coefficient: Fraction, factors: list[Expr]) -> str:
        parts = [self.factor(f) for f in factors]
        if coefficient != 1 or not parts:
            parts.insert(0, _fraction_latex(coefficient))
        return " ".join(parts)

    def power(self, base: Expr, exponent: int) -> str:
        text = self.atom(base)
        if isinstance(base, (Add, Int)) or (isinstance(base, FunctionSymbol) and base.order > 3):
            text = rf"\left({text}\right)"
        elif isinstance(base, FunctionSymbol) and base.order > 0:
            text = f"{{{text}}}"
        return f"{text}^{{{exponent}}}"

    def constant(self, value: Fraction) -> str:
        return _fraction_latex(value)

    def atom(self, e: Expr) -> str:
        match e:
            case XVar():
                return "x"
            case Param():
                return e.name
            case FunctionSymbol():
                name = _latex_name(e.name)
                if e.order <= 3:
                    return name + "'" * e.order
                return f"{name}^{{({e.order})}}"
            case Exp():
                return f"e^{{{self.render(e.arg)}}}"
            case Int():
                return rf"\int {self.render(e.arg)}\,dx"
            case Add():
                return self.render(e)
        raise TypeError(f"Cannot render {type(e).__name__}")


_RENDERERS = {"plain": _PlainRenderer(), "latex": _LatexRenderer()}


def render(e: Expr, fmt: Format = "latex") -> str:
    """Deterministic text of the canonical form of `e`."""
    canonical = normalize(e)
    if fmt == "sexpr":
        return canonical.sexpr()
    if fmt not in _RENDERERS:
        raise ValueError(f"Unknown format '{fmt}', expected plain, latex or sexpr")
    return _RENDERERS[fmt].render(canonical)


# ------------------------------------------------------------------ parsing

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_NUMBER = re.compile(r"^-?\d+(?:/\d+)?$")
_INTEGER = re.compile(r"^-?\d+$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            break
        if match.lastindex is None:
            break
        tokens.append((match.group(match.lastindex), match.start(match.lastindex)))
        position = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str, symbols: SymbolTable):
        self.text = text
        self.symbols = symbols
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> tuple[str, int]:
        if self.index >= len(self.tokens):
            raise ParseError("Unexpected end of input", len(self.text))
        return self.tokens[self.index]

    def take(self) -> tuple[str, int]:
        token = self.peek()
        self.index += 1
        return token

    def expect_close(self) -> None:
        token, position = self.take()
        if token != ")":
            raise ParseError(f"Expected ')' but found '{token}'", position)

    def integer(self) -> int:
        token, position = self.take()
        if not _INTEGER.match(token):
            raise ParseError(f"Expected an integer but found '{token}'", position)
        return int(token)

    def name(self) -> tuple[str, int]:
        token, position = self.take()
        if not _NAME.match(token):
            raise ParseError(f"Expected a name but found '{token}'", position)
        return token, position

    def parse(self) -> Expr:
        if not self.tokens:
            raise ParseError("Empty input", 0)
        e = self.expr()
        if self.index < len(self.tokens):
            token, position = self.tokens[self.index]
            raise ParseError(f"Unexpected trailing input '{token}'", position)
        return e

    def expr(self) -> Expr:
        token, position = self.take()
        if token == ")":
            raise ParseError("Unexpected ')'", position)
        if token != "(":
            return self.atom(token, position)
        head, head_position = self.take()
        match head:
            case "+":
                return Add(tuple(self.rest()))
            case "*":
                return Mul(tuple(self.rest()))
            case "^":
                base = self.expr()
                exponent = self.integer()
                self.expect_close()
                return Pow(base, exponent)
            case "exp":
                arg = self.expr()
                self.expect_close()
                return Exp(arg)
            case "int":
                arg = self.expr()
                self.expect_close()
                return Int(arg)
            case "dn" | "fn":
                name, name_position = self.name()
                order = self.integer() if head == "dn" else 0
                if order < 0:
                    raise ParseError("Derivative order must be non-negative", name_position)
                self.expect_close()
                if not self.symbols.declares_function(name):
                    raise UnknownSymbolError(name, name_position)
                return FunctionSymbol(name, order)
            case "par":
                name, name_position = self.name()
                self.expect_close()
                if not self.symbols.declares_param(name):
                    raise UnknownSymbolError(name, name_position)
                return Param(name)
        raise ParseError(f"Unknown node '{head}'", head_position)

    def rest(self) -> list[Expr]:
        items = []
        while self.peek()[0] != ")":
            items.append(self.expr())
        self.take()
        return items

    def atom(self, token: str, position: int) -> Expr:
        if token == "x":
            return X
        if _NUMBER.match(token):
            numerator, _, denominator = token.partition("/")
            if denominator and int(denominator) == 0:
                raise ParseError("Zero denominator", position)
            return Const(Fraction(int(numerator), int(denominator or 1)))
        if _NAME.match(token):
            raise UnknownSymbolError(token, position)
        raise ParseError(f"Unexpected token '{token}'", position)


def parse(text: str, symbols: SymbolTable = DEFAULT_SYMBOLS) -> Expr:
    """Parse the s-expression format into a canonical expression."""
    return normalize(_Parser(text, symbols).parse())


def parse_number(text: str) -> Expr:
    """A bare rational such as `3`, `-1/4` or `0.25` as a constant."""
    try:
        return Const(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"Not a number: '{text}'", 0) from e


__all__ = ["DEFAULT_SYMBOLS", "Format", "SymbolTable", "parse", "parse_number", "render"]
