"""Canonical form of expressions.

Every expression is mapped to a Laurent polynomial over *atoms*: x, function
symbols, parameters, exp(...) and Int(...) nodes with canonical arguments, and
(for negative powers only) multi-term sums. A monomial is a tuple of
``(atom, exponent)`` pairs sorted by `atom_key`, holding at most one exp atom
whose exponent is 1. Products of exponentials are merged into a single exp of
the summed argument. Int is linear over constants and parameters.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .nodes import (
    Add, Const, Exp, Expr, FunctionSymbol, Int, Mul, Param, Pow, X, XVar, ZERO,
)


Monomial = tuple[tuple[Expr, int], ...]
Poly = dict[Monomial, Fraction]

_NAMED_RANK = {"q": 3, "w": 4, "W": 5, "y": 6, "z": 7}
_INDEXED_NAME = re.compile(r"^([ar])(\d+)$")


def symbol_rank(name: str) -> tuple[int, int, str]:
    """Class order x < alphas < r's < q < w < W < y < z < anything else."""
    match = _INDEXED_NAME.match(name)
    if match:
        return (1 if match.group(1) == "a" else 2, int(match.group(2)), "")
    if name in _NAMED_RANK:
        return (_NAMED_RANK[name], 0, "")
    return (8, 0, name)


def atom_key(atom: Expr) -> tuple[int, int, str, int]:
    key = atom._sort_key
    if key is not None:
        return key
    match atom:
        case Param():
            key = (0, 0, atom.name, 0)
        case XVar():
            key = (0, 1, "", 0)
        case FunctionSymbol():
            rank, index, name = symbol_rank(atom.name)
            key = (rank, index, name, atom.order)
        case Int():
            key = (9, 0, atom.arg.sexpr(), 0)
        case Exp():
            key = (10, 0, atom.arg.sexpr(), 0)
        case _:
            key = (11, 0, atom.sexpr(), 0)
    atom._sort_key = key
    return key


def monomial_key(monomial: Monomial) -> tuple:
    degree = sum(k for _, k in monomial)
    return (degree, tuple((atom_key(atom), k) for atom, k in monomial))


def canonical_from_poly(poly: Poly) -> Expr:
    expr = from_poly(poly)
    if expr._canonical is None:
        expr._canonical = expr
        expr._poly = poly
    return expr


def _canonical_exp(arg_poly: Poly) -> Optional[Exp]:
    if not arg_poly:
        return None
    atom = Exp(canonical_from_poly(arg_poly))
    atom._canonical = atom
    return atom


def make_monomial(items: Iterable[tuple[Expr, int]]) -> Monomial:
    powers: dict[Expr, int] = {}
    exps: list[tuple[Exp, int]] = []
    for atom, k in items:
        if k == 0:
            continue
        if isinstance(atom, Exp):
            exps.append((atom, k))
        else:
            powers[atom] = powers.get(atom, 0) + k

    result = [(atom, k) for atom, k in powers.items() if k != 0]
    if len(exps) == 1 and exps[0][1] == 1:
        result.append(exps[0])
    elif exps:
        argument: Poly = {}
        for atom, k in exps:
            _accumulate(argument, to_poly(atom.arg), Fraction(k))
        merged = _canonical_exp(argument)
        if merged is not None:
            result.append((merged, 1))
    result.sort(key=lambda item: atom_key(item[0]))
    return tuple(result)


def _accumulate(target: Poly, source: Poly, scale: Fraction = Fraction(1)) -> None:
    for monomial, coefficient in source.items():
        value = target.get(monomial, Fraction(0)) + coefficient * scale
        if value:
            target[monomial] = value
        else:
            target.pop(monomial, None)


def poly_add(*polys: Poly) -> Poly:
    result: Poly = {}
    for poly in polys:
        _accumulate(result, poly)
    return result


def poly_mul(left: Poly, right: Poly) -> Poly:
    result: Poly = {}
    for m1, c1 in left.items():
        for m2, c2 in right.items():
            if not m1:
                monomial = m2
            elif not m2:
                monomial = m1
            else:
                monomial = make_monomial(m1 + m2)
            value = result.get(monomial, Fraction(0)) + c1 * c2
            if value:
                result[monomial] = value
            else:
                result.pop(monomial, None)
    return result


def poly_pow(poly: Poly, exponent: int) -> Poly:
    result: Poly = {(): Fraction(1)}
    for _ in range(exponent):
        result = poly_mul(result, poly)
    return result


def _invert_monomial(monomial: Monomial) -> Monomial:
    items = []
    for atom, k in monomial:
        if isinstance(atom, Exp):
            negated = _canonical_exp(poly_mul({(): Fraction(-1)}, to_poly(atom.arg)))
            items.append((negated, 1))
        else:
            items.append((atom, -k))
    return make_monomial(items)


def poly_inverse(poly: Poly) -> Poly:
    if not poly:
        raise ZeroDivisionError("Division by an expression that normalizes to 0")
    if len(poly) == 1:
        (monomial, coefficient), = poly.items()
        return {_invert_monomial(monomial): 1 / coefficient}
    # multi-term denominators stay opaque
    atom = canonical_from_poly(dict(poly))
    return {((atom, -1),): Fraction(1)}


def _int_poly(argument: Poly) -> Poly:
    result: Poly = {}
    for monomial, coefficient in argument.items():
        constants = [(atom, k) for atom, k in monomial if isinstance(atom, Param)]
        variables = [(atom, k) for atom, k in monomial if not isinstance(atom, Param)]
        if not variables:
            term = {make_monomial(constants + [(X, 1)]): coefficient}
        elif len(variables) == 1 and isinstance(variables[0][0], XVar) and variables[0][1] != -1:
            k = variables[0][1]
            term = {make_monomial(constants + [(X, k + 1)]): coefficient / (k + 1)}
        else:
            atom = Int(canonical_from_poly({tuple(variables): Fraction(1)}))
            atom._canonical = atom
            term = {make_monomial(constants + [(atom, 1)]): coefficient}
        _accumulate(result, term)
    return result


def to_poly(e: Expr) -> Poly:
    """Polynomial view of `e`. The returned dict may be cached: do not mutate it."""
    if e._poly is not None:
        return e._poly
    match e:
        case Const():
            poly = {(): e.value} if e.value else {}
        case XVar() | FunctionSymbol() | Param():
            poly = {((e, 1),): Fraction(1)}
        case Add():
            poly = poly_add(*(to_poly(t) for t in e.terms))
        case Mul():
            poly = {(): Fraction(1)}
            for factor in e.factors:
                poly = poly_mul(poly, to_poly(factor))
                if not poly:
                    break
        case Pow():
            base = to_poly(e.base)
            if e.exponent >= 0:
                poly = poly_pow(base, e.exponent)
            else:
                poly = poly_pow(poly_inverse(base), -e.exponent)
        case Exp():
            argument = normalize(e.arg)
            if argument == ZERO:
                poly = {(): Fraction(1)}
            else:
                atom = e if argument is e.arg else Exp(argument)
                atom._canonical = atom
                poly = {((atom, 1),): Fraction(1)}
        case Int():
            poly = _int_poly(to_poly(normalize(e.arg)))
        case _:
            raise TypeError(f"Unknown expression node {type(e).__name__}")
    if e._canonical is e:
        e._poly = poly
    return poly


def monomial_to_expr(monomial: Monomial, coefficient: Fraction = Fraction(1)) -> Expr:
    factors: list[Expr] = []
    if coefficient != 1 or not monomial:
        factors.append(Const(coefficient))
    for atom, k in monomial:
        factors.append(atom if k == 1 else Pow(atom, k))
    return factors[0] if len(factors) == 1 else Mul(tuple(factors))


def from_poly(poly: Poly) -> Expr:
    if not poly:
        return ZERO
    terms = [monomial_to_expr(m, poly[m]) for m in sorted(poly, key=monomial_key)]
    result = terms[0] if len(terms) == 1 else Add(tuple(terms))
    return result


def normalize(e: Expr) -> Expr:
    """Canonical form of `e`; idempotent and value preserving."""
    canonical = e._canonical
    if canonical is not None:
        return canonical
    poly = to_poly(e)
    canonical = from_poly(poly)
    canonical._canonical = canonical
    canonical._poly = poly
    e._canonical = canonical
    return canonical


def is_zero(e: Expr) -> bool:
    return normalize(e) == ZERO


def terms_of(e: Expr) -> list[tuple[Monomial, Fraction]]:
    """Monomials of the canonical form, in canonical order."""
    poly = to_poly(normalize(e))
    return [(m, poly[m]) for m in sorted(poly, key=monomial_key)]


def _is_unit_atom(atom: Expr) -> bool:
    return isinstance(atom, (Exp, Param))


def _core(monomial: Monomial) -> Monomial:
    return tuple((atom, k) for atom, k in monomial if not _is_unit_atom(atom))


def _factor_candidates(numerator: Expr, denominator: Expr) -> Iterator[Expr]:
    top = to_poly(normalize(numerator))
    bottom = to_poly(normalize(denominator))
    if not top or not bottom:
        return
    pivot = max(bottom, key=monomial_key)
    pivot_core = _core(pivot)
    inverse = _invert_monomial(pivot)
    for monomial in sorted(top, key=monomial_key):
        if _core(monomial) == pivot_core:
            quotient = make_monomial(monomial + inverse)
            yield canonical_from_poly({quotient: top[monomial] / bottom[pivot]})


def unit_factor(numerator: Expr, denominator: Expr) -> Optional[Expr]:
    """Find f = c * params * exp(...) with numerator = f * denominator.

    Exponentials and parameters are treated as units of the polynomial algebra
    over function symbols. Returns None when no such f exists.
    """
    for candidate in _factor_candidates(numerator, denominator):
        if is_zero(numerator - candidate * denominator):
            return candidate
    return None


def candidate_factor(numerator: Expr, denominator: Expr) -> Optional[Expr]:
    """First factor matched on the leading monomial of the denominator, unverified."""
    return next(_factor_candidates(numerator, denominator), None)
