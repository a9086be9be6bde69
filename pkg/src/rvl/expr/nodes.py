from __future__ import annotations

from fractions import Fraction
from typing import Any, Optional


Number = int | Fraction


class Expr:
    """Immutable node of an expression tree in the independent variable x.

    Nodes are built raw (operator overloads do no simplification); `normalize`
    in `rvl.expr.canonical` turns any tree into its canonical form. The slots
    prefixed with `_` are memo caches filled by the canonical layer and never
    change the value a node denotes.
    """

    __slots__ = ("_hash", "_canonical", "_poly", "_sort_key", "_symbols")

    def __init__(self) -> None:
        self._hash: Optional[int] = None
        self._canonical: Optional[Expr] = None
        self._poly: Optional[dict] = None
        self._sort_key: Optional[tuple] = None
        self._symbols: Optional[frozenset] = None

    def _fields(self) -> tuple:
        raise NotImplementedError

    def sexpr(self) -> str:
        raise NotImplementedError

    def children(self) -> tuple[Expr, ...]:
        return ()

    def __eq__(self, other: Any) -> bool:
        if self is other:
            return True
        if not isinstance(other, Expr):
            return NotImplemented
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._fields() == other._fields()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._fields()))
        return self._hash

    def __repr__(self) -> str:
        return self.sexpr()

    # raw tree builders
    def __add__(self, other: Any) -> Expr:
        return Add((self, as_expr(other)))

    def __radd__(self, other: Any) -> Expr:
        return Add((as_expr(other), self))

    def __sub__(self, other: Any) -> Expr:
        return Add((self, Mul((MINUS_ONE, as_expr(other)))))

    def __rsub__(self, other: Any) -> Expr:
        return Add((as_expr(other), Mul((MINUS_ONE, self))))

    def __mul__(self, other: Any) -> Expr:
        return Mul((self, as_expr(other)))

    def __rmul__(self, other: Any) -> Expr:
        return Mul((as_expr(other), self))

    def __truediv__(self, other: Any) -> Expr:
        return Mul((self, Pow(as_expr(other), -1)))

    def __rtruediv__(self, other: Any) -> Expr:
        return Mul((as_expr(other), Pow(self, -1)))

    def __pow__(self, exponent: int) -> Expr:
        return Pow(self, exponent)

    def __neg__(self) -> Expr:
        return Mul((MINUS_ONE, self))


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Number | str):
        super().__init__()
        if isinstance(value, float):
            raise TypeError("Const takes exact numbers; convert floats with Fraction() first")
        self.value = Fraction(value)

    def _fields(self) -> tuple:
        return (self.value,)

    def sexpr(self) -> str:
        if self.value.denominator == 1:
            return str(self.value.numerator)
        return f"{self.value.numerator}/{self.value.denominator}"


class XVar(Expr):
    """The independent variable x."""

    __slots__ = ()

    def _fields(self) -> tuple:
        return ()

    def sexpr(self) -> str:
        return "x"


class FunctionSymbol(Expr):
    """Occurrence of an unknown function of x, differentiated `order` times."""

    __slots__ = ("name", "order")

    def __init__(self, name: str, order: int = 0):
        super().__init__()
        if order < 0:
            raise ValueError(f"Derivative order must be non-negative, got {order}")
        self.name = name
        self.order = order

    def _fields(self) -> tuple:
        return (self.name, self.order)

    def derivative(self, times: int = 1) -> FunctionSymbol:
        return FunctionSymbol(self.name, self.order + times)

    @property
    def base(self) -> FunctionSymbol:
        return self if self.order == 0 else FunctionSymbol(self.name, 0)

    def sexpr(self) -> str:
        return f"(dn {self.name} {self.order})"


class Param(Expr):
    """Named constant such as the constant of integration a."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        super().__init__()
        self.name = name

    def _fields(self) -> tuple:
        return (self.name,)

    def sexpr(self) -> str:
        return f"(par {self.name})"


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple[Expr, ...]):
        super().__init__()
        self.terms = tuple(terms)

    def _fields(self) -> tuple:
        return self.terms

    def children(self) -> tuple[Expr, ...]:
        return self.terms

    def sexpr(self) -> str:
        return "(+ " + " ".join(t.sexpr() for t in self.terms) + ")"


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: tuple[Expr, ...]):
        super().__init__()
        self.factors = tuple(factors)

    def _fields(self) -> tuple:
        return self.factors

    def children(self) -> tuple[Expr, ...]:
        return self.factors

    def sexpr(self) -> str:
        return "(* " + " ".join(f.sexpr() for f in self.factors) + ")"


class Pow(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: int):
        super().__init__()
        if not isinstance(exponent, int) or isinstance(exponent, bool):
            raise TypeError(f"Only integer exponents are supported, got {exponent!r}")
        self.base = base
        self.exponent = exponent

    def _fields(self) -> tuple:
        return (self.base, self.exponent)

    def children(self) -> tuple[Expr, ...]:
        return (self.base,)

    def sexpr(self) -> str:
        return f"(^ {self.base.sexpr()} {self.exponent})"


class Exp(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        super().__init__()
        self.arg = as_expr(arg)

    def _fields(self) -> tuple:
        return (self.arg,)

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)

    def sexpr(self) -> str:
        return f"(exp {self.arg.sexpr()})"


class Int(Expr):
    """Formal antiderivative of the argument with respect to x."""

    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        super().__init__()
        self.arg = as_expr(arg)

    def _fields(self) -> tuple:
        return (self.arg,)

    def children(self) -> tuple[Expr, ...]:
        return (self.arg,)

    def sexpr(self) -> str:
        return f"(int {self.arg.sexpr()})"


def as_expr(value: Any) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Const(value)
    raise TypeError(f"Cannot use {value!r} as an expression")


ZERO = Const(0)
ONE = Const(1)
MINUS_ONE = Const(-1)
X = XVar()
