"""Riccati chain equations and their Cole-Hopf linearizations.

The substitution engine is the identity y^(k) = g_k * y for y = exp(Int(w)),
where g_0 = 1 and g_{k+1} = theta(g_k) with theta = d/dx + w.
"""

from typing import Mapping, Optional, Sequence

from ..errors import ArityError, NotLinearError, NotMonicError, OrderError, VerificationFailure
from ..expr import (
    ONE, Expr, FunctionSymbol, differentiate, free_symbols, is_zero, max_order, normalize,
    partial_derivative, substitute_many, terms_of,
)
from ..log import logger
from ..types import LinearOperator, RiccatiChainEq


OMEGA = FunctionSymbol("w")
Y = FunctionSymbol("y")


def symbolic_alphas(order: int) -> list[Expr]:
    return [FunctionSymbol(f"a{j}") for j in range(order + 1)]


def bind_alphas(order: int, table: Optional[Mapping[str, Expr]] = None) -> list[Expr]:
    """Symbolic alphas a0..aN with the entries of `table` substituted in."""
    table = dict(table or {})
    unknown = sorted(set(table) - {f"a{j}" for j in range(order + 1)})
    if unknown:
        raise ArityError(f"Bindings {unknown} do not belong to an order-{order} chain (a0..a{order})")
    return [normalize(table.get(f"a{j}", FunctionSymbol(f"a{j}"))) for j in range(order + 1)]


def theta_apply(e: Expr, omega: FunctionSymbol = OMEGA) -> Expr:
    return normalize(differentiate(e) + omega * e)


def cole_hopf_y_derivatives(count: int, omega: FunctionSymbol = OMEGA) -> list[Expr]:
    """[g_0, ..., g_{count-1}] with y^(k) = g_k * y."""
    if count < 0:
        raise OrderError(f"Derivative count must be non-negative, got {count}")
    gs = [ONE]
    while len(gs) < count:
        gs.append(theta_apply(gs[-1], omega))
    return gs[:count]


def cole_hopf_y_derivative(k: int, omega: FunctionSymbol = OMEGA) -> Expr:
    """g_k with y^(k) = g_k * y; g_k = theta^(k-1) w for k >= 1."""
    if k < 0:
        raise OrderError(f"Derivative order must be non-negative, got {k}")
    return cole_hopf_y_derivatives(k + 1, omega)[k]


def build_chain_equation(order: int, alphas: Optional[Sequence[Expr]] = None) -> RiccatiChainEq:
    if order < 1:
        raise OrderError(f"Chain order must be a positive integer, got {order}")
    alphas = symbolic_alphas(order) if alphas is None else list(alphas)
    if len(alphas) != order + 1:
        raise ArityError(f"Order {order} needs {order + 1} alphas (a0..a{order}), got {len(alphas)}")

    gs = cole_hopf_y_derivatives(order + 2)
    terms = [gs[order + 1], alphas[0]]
    terms += [alphas[j] * gs[j] for j in range(1, order + 1)]
    lhs = normalize(sum(terms[1:], terms[0]))
    logger.debug(f"Built chain equation of order {order} with {len(terms_of(lhs))} terms")
    return RiccatiChainEq(order=order, alphas=alphas, lhs=lhs, variable=OMEGA.name)


def cole_hopf_substitute(e: Expr, y: str = "y", omega: FunctionSymbol = OMEGA) -> Expr:
    """Replace every y^(k) in `e` by g_k * y."""
    base = FunctionSymbol(y)
    targets = [s for s in free_symbols(normalize(e)) if s.name == y and s.order > 0]
    gs = cole_hopf_y_derivatives(max((s.order for s in targets), default=0) + 1, omega)
    mapping = {s: gs[s.order] * base for s in targets}
    return substitute_many(e, mapping)


def linearization_certificate(eq: RiccatiChainEq) -> Expr:
    """apply(linearize(eq), y) with y^(k) -> g_k y, minus lhs * y. Zero when the linearization holds."""
    op = linearize(eq)
    omega = FunctionSymbol(eq.variable)
    substituted = cole_hopf_substitute(op.apply(), op.variable, omega)
    return normalize(substituted - eq.lhs * FunctionSymbol(op.variable))


def linearize(eq: RiccatiChainEq, certify: bool = False) -> LinearOperator:
    """Operator y^(N+1) + a_N y^(N) + ... + a_0 y of the homogeneous linear equation."""
    op = LinearOperator(coeffs=[ONE, *reversed(eq.alphas)], variable=Y.name)
    if certify:
        residual = linearization_certificate(eq)
        if not is_zero(residual):
            raise VerificationFailure(f"Linearization certificate does not vanish: {residual.sexpr()}")
        logger.info(f"Linearization of the order-{eq.order} chain equation certified")
    return op


def delinearize(op: LinearOperator) -> RiccatiChainEq:
    """Chain equation whose Cole-Hopf linearization is `op`; op must be monic of order >= 2."""
    if not is_zero(op.coeffs[0] - ONE):
        raise NotMonicError(f"Leading coefficient must be 1, got {op.coeffs[0].sexpr()}; divide through first")
    if op.order < 2:
        raise OrderError(f"Linear operator of order {op.order} has no chain counterpart (order >= 2 required)")
    if any(s.name == op.variable for c in op.coeffs for s in free_symbols(c)):
        raise NotLinearError(f"Coefficients depend on the variable {op.variable}")
    order = op.order - 1
    alphas = [op.coeffs[order + 1 - j] for j in range(order + 1)]
    return build_chain_equation(order, alphas)


def operator_from_expression(e: Expr, variable: str = "y", order: Optional[int] = None) -> LinearOperator:
    """Collect coefficients of variable^(k) in a linear homogeneous expression."""
    e = normalize(e)
    top = max_order(e, variable) if order is None else order
    if top < 1:
        raise OrderError(f"Expression is not a differential expression in {variable}")
    coeffs = []
    for k in range(top, -1, -1):
        coefficient = partial_derivative(e, FunctionSymbol(variable, k))
        if any(s.name == variable for s in free_symbols(coefficient)):
            raise NotLinearError(f"Coefficient of {variable}^({k}) depends on {variable}")
        coeffs.append(coefficient)
    op = LinearOperator(coeffs=coeffs, variable=variable)
    if not is_zero(op.apply() - e):
        raise NotLinearError(f"Expression is not linear homogeneous in {variable}")
    return op
