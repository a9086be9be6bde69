"""Adjoint operators, self-adjointness tests and the odd-coefficient conditions of order 2n."""

from fractions import Fraction
from math import comb
from typing import Optional, Sequence

from ..errors import CoefficientIndexError, OrderError
from ..expr import (
    Const, Exp, Expr, FunctionSymbol, Int, bind, differentiate, is_total_derivative, is_zero,
    normalize, partial_derivative,
)
from ..log import logger
from ..types import AuditReport, CoefficientComparison, IndexTuple, LinearOperator
from .chain import operator_from_expression


def adjoint(op: LinearOperator) -> LinearOperator:
    """N(v) = sum_i (-1)^(n-i) D^(n-i)(r_i v), re-collected by derivative order of v."""
    v = FunctionSymbol(op.variable)
    n = op.order
    terms = [
        Const((-1) ** (n - i)) * differentiate(r * v, n - i)
        for i, r in enumerate(op.coeffs)
    ]
    return operator_from_expression(sum(terms[1:], terms[0]), op.variable, order=n)


def _difference(left: LinearOperator, right: LinearOperator) -> list[Expr]:
    return [normalize(a - b) for a, b in zip(left.coeffs, right.coeffs)]


def is_self_adjoint(op: LinearOperator) -> bool:
    return all(is_zero(d) for d in _difference(adjoint(op), op))


def _partner(name: str) -> str:
    return "z" if name != "z" else "y"


def lagrange_identity_check(op: LinearOperator, other: Optional[LinearOperator] = None) -> bool:
    """Whether z M(y) - y N(z) is a total derivative; N defaults to the adjoint of M."""
    other = adjoint(op) if other is None else other
    y, z = op.variable, _partner(op.variable)
    bilinear = FunctionSymbol(z) * op.apply() - FunctionSymbol(y) * other.with_variable(z).apply()
    return is_total_derivative(bilinear, y, z)


def second_order_multiplier(alpha1: Expr) -> Expr:
    """exp(Int(a1)); scales y'' + a1 y' + a0 y to a self-adjoint operator."""
    return normalize(Exp(Int(alpha1)))


def _require_order(op: LinearOperator, order: int) -> None:
    if op.order != order:
        raise OrderError(f"Expected an operator of order {order}, got order {op.order}")


def fourth_order_condition_residuals(op: LinearOperator) -> dict[str, Expr]:
    """Residuals of r1 = 2 r0' and q' = r3 with q = r2 - r0''."""
    _require_order(op, 4)
    r0, r1, r2, r3, _ = op.coeffs
    q = normalize(r2 - differentiate(r0, 2))
    return {
        "r1 - 2*r0'": normalize(r1 - 2 * differentiate(r0)),
        "q' - r3": normalize(differentiate(q) - r3),
    }


def fourth_order_conditions(op: LinearOperator) -> bool:
    return all(is_zero(r) for r in fourth_order_condition_residuals(op).values())


def fourth_order_self_adjoint_operator(r0: Expr, q: Expr, r4: Expr, variable: str = "y") -> LinearOperator:
    """Coefficients of (r0 y'')'' + (q y')' + r4 y."""
    return LinearOperator(
        coeffs=[r0, 2 * differentiate(r0), differentiate(r0, 2) + q, differentiate(q), r4],
        variable=variable,
    )


def symbolic_even_coefficients(n: int) -> list[Expr]:
    return [FunctionSymbol(f"r{2 * p}") for p in range(n + 1)]


def _odd_placeholder(i: int) -> FunctionSymbol:
    return FunctionSymbol(f"__odd{i}")


def odd_coefficient_from_adjoint(n: int, even_coeffs: Sequence[Expr]) -> list[Expr]:
    """Odd coefficients r1, r3, ..., r_{2n-1} that make the order-2n operator self-adjoint.

    Equating the coefficient of v^(2n-2k-1) in adjoint(M) - M gives -2 r_{2k+1}
    plus terms in r_0..r_{2k} only, so the system is solved from k = 0 upward.
    """
    if n < 1:
        raise OrderError(f"n must be a positive integer, got {n}")
    if len(even_coeffs) != n + 1:
        raise CoefficientIndexError(f"Expected {n + 1} even coefficients r0..r{2 * n}, got {len(even_coeffs)}")

    coeffs: list[Expr] = []
    for i in range(2 * n + 1):
        coeffs.append(even_coeffs[i // 2] if i % 2 == 0 else _odd_placeholder(i))
    op = LinearOperator(coeffs=coeffs, variable="y")
    equations = _difference(adjoint(op), op)

    solved: dict[str, Expr] = {}
    odd: list[Expr] = []
    for k in range(n):
        i = 2 * k + 1
        unknown = _odd_placeholder(i)
        equation = bind(equations[i], solved)
        slope = partial_derivative(equation, unknown)
        rest = normalize(equation - slope * unknown)
        value = normalize(-rest / slope)
        solved[unknown.name] = value
        odd.append(value)
        logger.debug(f"Solved r{i} for the order-{2 * n} self-adjoint operator")
    return odd


def self_adjoint_operator(n: int, even_coeffs: Sequence[Expr], variable: str = "y") -> LinearOperator:
    """Order-2n operator with the given even coefficients and the odd ones that make it self-adjoint."""
    odd = odd_coefficient_from_adjoint(n, even_coeffs)
    coeffs = [even_coeffs[i // 2] if i % 2 == 0 else odd[i // 2] for i in range(2 * n + 1)]
    return LinearOperator(coeffs=coeffs, variable=variable)


def odd_coefficient_initial(n: int, r0: Expr) -> Expr:
    """Initial condition r1 = n r0'."""
    return normalize(n * differentiate(r0))


def _check_step(n: int, k: int) -> None:
    if not 1 <= k <= n - 1:
        raise CoefficientIndexError(f"k must satisfy 1 <= k <= {n - 1} for n = {n}, got {k}")


def odd_coefficient_recurrence(n: int, k: int, coeffs: Sequence[Expr]) -> Expr:
    """r_{2k+1} from r_0..r_{2k} by the alternating binomial recurrence.

    The final term enters with binomial C(2n-2k-1, 2n-2k-1) = 1 as it is
    commonly printed; adjoint expansion gives C(2n-2k, 2n-2k-1) there.
    """
    _check_step(n, k)
    if len(coeffs) < 2 * k + 1:
        raise CoefficientIndexError(f"r_{2 * k + 1} needs r0..r{2 * k}, got {len(coeffs)} coefficients")
    bottom = 2 * n - 2 * k - 1
    terms: list[Expr] = []
    for i in range(2 * k + 1):
        top = 2 * n - i if i < 2 * k else bottom
        terms.append(Const((-1) ** i * comb(top, bottom)) * differentiate(coeffs[i], 2 * k + 1 - i))
    return normalize(Const(Fraction(1, 2)) * sum(terms[1:], terms[0]))


def _compositions_even(total: int, parts: int) -> list[tuple[int, ...]]:
    if parts == 0:
        return [()] if total == 0 else []
    result = []
    for first in range(2, total - 2 * (parts - 1) + 1, 2):
        result += [(first, *rest) for rest in _compositions_even(total - first, parts - 1)]
    return result


def enumerate_index_set(length: int, total: int) -> list[IndexTuple]:
    """Tuples (k_1, ..., k_l) with k_1 odd < m, the rest even positive, summing to m; lexicographic."""
    if length < 2 or total < 1 or total % 2 == 0:
        raise ValueError(f"Index sets need l >= 2 and odd m >= 1, got l={length}, m={total}")
    tuples = []
    for head in range(1, total, 2):
        for tail in _compositions_even(total - head, length - 1):
            tuples.append(IndexTuple(entries=(head, *tail)))
    return tuples


def _binomial_chain(top: int, entries: tuple[int, ...]) -> int:
    product, used = 1, 0
    for k in entries:
        product *= comb(top - used, k)
        used += k
    return product


def closed_form_weight(n: int, k: int, p: int) -> Fraction:
    """Weight of r_{2p}^(2k+1-2p) in the closed-form solution for r_{2k+1}."""
    top, m = 2 * n - 2 * p, 2 * k + 1 - 2 * p
    weight = Fraction(comb(top, m), 2)
    for length in range(2, k - p + 2):
        inner = sum(_binomial_chain(top, t.entries) for t in enumerate_index_set(length, m))
        weight += Fraction((-1) ** (length - 1), 2 ** length) * inner
    return weight


def odd_coefficient_closed_form(n: int, k: int, even_coeffs: Sequence[Expr]) -> Expr:
    """r_{2k+1} as a combination of derivatives of the even coefficients r_0, r_2, ..., r_{2k}."""
    _check_step(n, k)
    if len(even_coeffs) < k + 1:
        raise CoefficientIndexError(f"r_{2 * k + 1} needs r0..r{2 * k}, got {len(even_coeffs)} even coefficients")
    terms = [
        Const(closed_form_weight(n, k, p)) * differentiate(even_coeffs[p], 2 * k + 1 - 2 * p)
        for p in range(k + 1)
    ]
    return normalize(sum(terms[1:], terms[0]))


def recurrence_audit(n: int, form: str = "recurrence") -> AuditReport:
    """Compare the printed recurrence or closed form against adjoint expansion, coefficient by coefficient."""
    if form not in ("recurrence", "closed"):
        raise ValueError(f"Unknown form '{form}', expected recurrence or closed")
    evens = symbolic_even_coefficients(n)
    oracle = odd_coefficient_from_adjoint(n, evens)

    comparisons = [CoefficientComparison(index=1, printed=odd_coefficient_initial(n, evens[0]), oracle=oracle[0])]
    for k in range(1, n):
        if form == "recurrence":
            known = [evens[i // 2] if i % 2 == 0 else oracle[i // 2] for i in range(2 * k + 1)]
            printed = odd_coefficient_recurrence(n, k, known)
        else:
            printed = odd_coefficient_closed_form(n, k, evens)
        comparisons.append(CoefficientComparison(index=2 * k + 1, printed=printed, oracle=oracle[k]))

    notes = []
    for c in comparisons:
        if not c.match:
            notes.append(f"r{c.index} differs from the adjoint expansion by {normalize(c.printed - c.oracle).sexpr()}")
    if n == 2:
        q = normalize(evens[1] - differentiate(evens[0], 2))
        holds = is_zero(differentiate(q) - oracle[1])
        notes.append(f"fourth-order condition q' = r3 with q = r2 - r0'': {'holds' if holds else 'fails'} for the oracle value")
    report = AuditReport(n=n, form=form, comparisons=comparisons, notes=notes)
    logger.info(f"Audit of the {form} form for n={n}: {sum(c.match for c in comparisons)}/{len(comparisons)} coefficients match")
    return report

