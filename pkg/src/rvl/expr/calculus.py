from __future__ import annotations

from typing import Mapping

from ..errors import NonlocalDependencyError
from .canonical import is_zero, normalize
from .nodes import (
    Add, Const, Exp, Expr, FunctionSymbol, Int, Mul, ONE, Param, Pow, XVar, ZERO,
)


def free_symbols(e: Expr) -> frozenset[FunctionSymbol]:
    """All function-symbol occurrences in `e`, including inside Int and exp."""
    cached = e._symbols
    if cached is not None:
        return cached
    if isinstance(e, FunctionSymbol):
        symbols = frozenset((e,))
    else:
        symbols = frozenset().union(*(free_symbols(child) for child in e.children()))
    e._symbols = symbols
    return symbols


def local_symbols(e: Expr) -> frozenset[FunctionSymbol]:
    """Function symbols occurring outside any Int node."""
    match e:
        case FunctionSymbol():
            return frozenset((e,))
        case Int():
            return frozenset()
        case _:
            return frozenset().union(*(local_symbols(child) for child in e.children()))


def max_order(e: Expr, name: str) -> int:
    """Highest derivative order of `name` in `e`, or -1 if it does not occur."""
    orders = [s.order for s in free_symbols(normalize(e)) if s.name == name]
    return max(orders, default=-1)


def contains_integral_of(e: Expr, name: str) -> bool:
    match e:
        case Int():
            return any(s.name == name for s in free_symbols(e.arg))
        case _:
            return any(contains_integral_of(child, name) for child in e.children())


def _derivative(e: Expr) -> Expr:
    match e:
        case Const() | Param():
            return ZERO
        case XVar():
            return ONE
        case FunctionSymbol():
            return e.derivative()
        case Add():
            return Add(tuple(_derivative(t) for t in e.terms))
        case Mul():
            terms = []
            for i, factor in enumerate(e.factors):
                if isinstance(factor, (Const, Param)):
                    continue
                terms.append(Mul(e.factors[:i] + (_derivative(factor),) + e.factors[i + 1:]))
            return Add(tuple(terms)) if terms else ZERO
        case Pow():
            return Mul((Const(e.exponent), Pow(e.base, e.exponent - 1), _derivative(e.base)))
        case Exp():
            return Mul((_derivative(e.arg), e))
        case Int():
            return e.arg
    raise TypeError(f"Unknown expression node {type(e).__name__}")


def differentiate(e: Expr, times: int = 1) -> Expr:
    """Total derivative d^times/dx^times, canonical."""
    result = normalize(e)
    for _ in range(times):
        result = normalize(_derivative(result))
    return result


def _partial(e: Expr, symbol: FunctionSymbol) -> Expr:
    if symbol not in free_symbols(e):
        return ZERO
    match e:
        case FunctionSymbol():
            return ONE
        case Add():
            return Add(tuple(_partial(t, symbol) for t in e.terms))
        case Mul():
            terms = []
            for i, factor in enumerate(e.factors):
                if symbol in free_symbols(factor):
                    terms.append(Mul(e.factors[:i] + (_partial(factor, symbol),) + e.factors[i + 1:]))
            return Add(tuple(terms))
        case Pow():
            return Mul((Const(e.exponent), Pow(e.base, e.exponent - 1), _partial(e.base, symbol)))
        case Exp():
            return Mul((_partial(e.arg, symbol), e))
        case Int():
            raise NonlocalDependencyError(
                f"{symbol.sexpr()} occurs under an integral in {e.sexpr()}; "
                f"rewrite in a potential variable first"
            )
    raise TypeError(f"Unknown expression node {type(e).__name__}")


def partial_derivative(e: Expr, symbol: FunctionSymbol) -> Expr:
    """Formal partial derivative treating every (name, order) as independent."""
    return normalize(_partial(normalize(e), symbol))


def _replace(e: Expr, mapping: Mapping[FunctionSymbol, Expr]) -> Expr:
    if not any(s in mapping for s in free_symbols(e)):
        return e
    match e:
        case FunctionSymbol():
            return mapping[e]
        case Add():
            return Add(tuple(_replace(t, mapping) for t in e.terms))
        case Mul():
            return Mul(tuple(_replace(f, mapping) for f in e.factors))
        case Pow():
            return Pow(_replace(e.base, mapping), e.exponent)
        case Exp():
            return Exp(_replace(e.arg, mapping))
        case Int():
            return Int(_replace(e.arg, mapping))
    return e


def substitute_many(e: Expr, mapping: Mapping[FunctionSymbol, Expr]) -> Expr:
    """Simultaneous replacement of exact (name, order) occurrences."""
    return normalize(_replace(normalize(e), mapping))


def substitute(e: Expr, target: FunctionSymbol, replacement: Expr) -> Expr:
    """Replace `target` only; other derivative orders of the same name are left alone."""
    return substitute_many(e, {target: replacement})


def bind(e: Expr, bindings: Mapping[str, Expr]) -> Expr:
    """Replace every derivative order of each bound name by the matching derivative of its value."""
    mapping = {
        s: differentiate(bindings[s.name], s.order)
        for s in free_symbols(normalize(e))
        if s.name in bindings
    }
    return substitute_many(e, mapping) if mapping else normalize(e)


def variational_derivative(e: Expr, variable: FunctionSymbol | str) -> Expr:
    """Sum over i of (-1)^i D^i dE/d(var^(i)), the Euler-Lagrange operator."""
    name = variable.name if isinstance(variable, FunctionSymbol) else variable
    e = normalize(e)
    terms = []
    for i in range(max_order(e, name) + 1):
        partial = partial_derivative(e, FunctionSymbol(name, i))
        if partial == ZERO:
            continue
        term = differentiate(partial, i)
        terms.append(term if i % 2 == 0 else Mul((Const(-1), term)))
    return normalize(Add(tuple(terms)))


def is_total_derivative(e: Expr, *variables: FunctionSymbol | str) -> bool:
    """A smooth expression is a total derivative iff all its variational derivatives vanish."""
    return all(is_zero(variational_derivative(e, v)) for v in variables)


def _to_potential(e: Expr, name: str, potential: str) -> Expr:
    match e:
        case FunctionSymbol() if e.name == name:
            return FunctionSymbol(potential, e.order + 1)
        case Int():
            arg = normalize(e.arg)
            if isinstance(arg, FunctionSymbol) and arg.name == name:
                return FunctionSymbol(potential, arg.order)
            return Int(_to_potential(arg, name, potential))
        case Add():
            return Add(tuple(_to_potential(t, name, potential) for t in e.terms))
        case Mul():
            return Mul(tuple(_to_potential(f, name, potential) for f in e.factors))
        case Pow():
            return Pow(_to_potential(e.base, name, potential), e.exponent)
        case Exp():
            return Exp(_to_potential(e.arg, name, potential))
    return e


def to_potential(e: Expr, name: str = "w", potential: str = "W") -> Expr:
    """Rewrite in the potential variable W with W' = w: w^(k) -> W^(k+1), Int(w^(k)) -> W^(k)."""
    return normalize(_to_potential(normalize(e), name, potential))


def from_potential(e: Expr, name: str = "w", potential: str = "W") -> Expr:
    """Inverse of `to_potential`: W -> Int(w), W^(k) -> w^(k-1)."""
    mapping: dict[FunctionSymbol, Expr] = {}
    for s in free_symbols(normalize(e)):
        if s.name == potential:
            mapping[s] = Int(FunctionSymbol(name)) if s.order == 0 else FunctionSymbol(name, s.order - 1)
    return substitute_many(e, mapping) if mapping else normalize(e)
