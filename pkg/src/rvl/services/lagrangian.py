"""Lagrangians for linear self-adjoint operators and for the odd-order Riccati chain.

Lagrangians in w that carry exp(Int(w)) are nonlocal in w. They are verified
in the potential W with W' = w, where they become ordinary higher-order
Lagrangians.
"""

from typing import Optional, Sequence

from ..errors import NotLinearError, NotSelfAdjointError, OrderError, PolicyRefusal
from ..expr import (
    Exp, Expr, FunctionSymbol, Int, Param, ZERO, candidate_factor, contains_integral_of, differentiate,
    free_symbols, from_potential, is_zero, max_order, normalize, partial_derivative, substitute_many,
    to_potential, unit_factor, variational_derivative,
)
from ..log import logger
from ..types import EomVerification, Lagrangian, LinearOperator
from .chain import (
    OMEGA, build_chain_equation, cole_hopf_y_derivatives, linearize, symbolic_alphas,
)
from .selfadjoint import (
    fourth_order_conditions, fourth_order_self_adjoint_operator, is_self_adjoint, second_order_multiplier,
)


A = Param("a")
POTENTIAL = "W"


def ansatz_lagrangian(op: LinearOperator, variable: Optional[str] = None, waive: bool = False) -> Lagrangian:
    """L = v * M(v) for a self-adjoint M; `waive` accepts any M and records that on the result."""
    if variable is not None:
        op = op.with_variable(variable)
    self_adjoint = is_self_adjoint(op)
    if not self_adjoint and not waive:
        raise NotSelfAdjointError(f"Operator of order {op.order} is not self-adjoint; pass waive=True to build y*M(y) anyway")
    if not self_adjoint:
        logger.warning(f"Building y*M(y) from a non-self-adjoint operator of order {op.order}")
    v = FunctionSymbol(op.variable)
    return Lagrangian.of(v * op.apply(), op.variable, waived=not self_adjoint)


def euler_lagrange(lagrangian: Lagrangian) -> Expr:
    return variational_derivative(lagrangian.expr, lagrangian.variable)


def gauge_subtract(lagrangian: Lagrangian, gauge: Expr) -> Lagrangian:
    """L - d/dx(gauge); the Euler-Lagrange expression is unchanged."""
    return Lagrangian.of(lagrangian.expr - differentiate(gauge), lagrangian.variable, waived=lagrangian.waived)


def reduction_gauge(lagrangian: Lagrangian) -> Expr:
    """Gauge term dL/dv^(n) * v^(n-1) that removes the top derivative of a Lagrangian linear in it."""
    n, name = lagrangian.order, lagrangian.variable
    if n < 1:
        raise OrderError(f"Lagrangian of order {n} cannot be reduced further")
    top = FunctionSymbol(name, n)
    below = FunctionSymbol(name, n - 1)
    coefficient = partial_derivative(lagrangian.expr, top)
    if top in free_symbols(coefficient):
        raise NotLinearError(f"Lagrangian is not linear in {name}^({n})")
    if max_order(coefficient, name) >= n - 1:
        raise NotLinearError(f"Coefficient of {name}^({n}) depends on {name}^({n - 1}) or higher")
    return normalize(coefficient * below)


def reduce_gauge(lagrangian: Lagrangian, steps: int = 1) -> Lagrangian:
    """Lower the order by subtracting reduction gauges, `steps` times."""
    for _ in range(steps):
        reduced = gauge_subtract(lagrangian, reduction_gauge(lagrangian))
        logger.debug(f"Gauge reduction lowered the order from {lagrangian.order} to {reduced.order}")
        lagrangian = reduced
    return lagrangian


def cole_hopf_lagrangian(lagrangian: Lagrangian, omega: FunctionSymbol = OMEGA, a: Expr = A) -> Lagrangian:
    """Substitute y = a*exp(Int(w)), i.e. y^(k) -> a * g_k * exp(Int(w))."""
    y = lagrangian.variable
    carrier = a * Exp(Int(omega))
    targets = [s for s in free_symbols(lagrangian.expr) if s.name == y]
    gs = cole_hopf_y_derivatives(max((s.order for s in targets), default=0) + 1, omega)
    mapping = {s: gs[s.order] * carrier for s in targets}
    return Lagrangian.of(substitute_many(lagrangian.expr, mapping), omega.name, waived=lagrangian.waived)


def _alphas(order: int, alphas: Optional[Sequence[Expr]]) -> list[Expr]:
    return symbolic_alphas(order) if alphas is None else list(alphas)


def chain_linear_lagrangian(order: int, alphas: Optional[Sequence[Expr]] = None) -> Lagrangian:
    """y * M(y) for the linearization of the order-N chain equation."""
    if order % 2 == 0:
        raise PolicyRefusal(
            f"Order {order} is even: its linearization has odd order {order + 1}, "
            f"and only odd-order chain equations (even-order linear counterparts) admit this construction"
        )
    op = linearize(build_chain_equation(order, _alphas(order, alphas)))
    return ansatz_lagrangian(op, waive=True)


def riccati_lagrangian(alphas: Optional[Sequence[Expr]] = None, a: Expr = A) -> Lagrangian:
    """a^2 exp(Int(a1) + 2 Int(w)) (w' + w^2 + a1 w + a0)."""
    alphas = _alphas(1, alphas)
    op = linearize(build_chain_equation(1, alphas)).scale(second_order_multiplier(alphas[1]))
    return cole_hopf_lagrangian(ansatz_lagrangian(op), a=a)


def riccati3_lagrangian(alphas: Optional[Sequence[Expr]] = None, a: Expr = A) -> Lagrangian:
    """a^2 exp(2 Int(w)) (S1 + S2) from y * (y'''' + a3 y''' + a2 y'' + a1 y' + a0 y)."""
    return cole_hopf_lagrangian(chain_linear_lagrangian(3, _alphas(3, alphas)), a=a)


def general_odd_lagrangian(n: int, alphas: Optional[Sequence[Expr]] = None, a: Expr = A) -> Lagrangian:
    """Lagrangian in w of the order-(2n-1) chain equation, from y * M(y) with r0 = 1, r_j = a_{2n-j}."""
    if n < 1:
        raise OrderError(f"n must be a positive integer, got {n}")
    order = 2 * n - 1
    return cole_hopf_lagrangian(chain_linear_lagrangian(order, _alphas(order, alphas)), a=a)


def fourth_order_q_lagrangian(r0: Expr, q: Expr, r4: Expr, variable: str = "y") -> Lagrangian:
    """y * ((r0 y'')'' + (q y')' + r4 y)."""
    return ansatz_lagrangian(fourth_order_self_adjoint_operator(r0, q, r4, variable))


def q_r_forms_equivalent(op: LinearOperator) -> bool:
    """Whether the q-form built from r0, q = r2 - r0'', r4 equals y*M(y); true only under the fourth-order conditions."""
    if not fourth_order_conditions(op):
        return False
    r0, _, r2, _, r4 = op.coeffs
    q_form = fourth_order_q_lagrangian(r0, normalize(r2 - differentiate(r0, 2)), r4, op.variable)
    r_form = ansatz_lagrangian(op)
    return is_zero(q_form.expr - r_form.expr)


def same_dynamics(first: Lagrangian, second: Lagrangian) -> bool:
    return first.variable == second.variable and is_zero(euler_lagrange(first) - euler_lagrange(second))


def verify_eom(lagrangian: Lagrangian, eom: Expr, variable: Optional[str] = None) -> EomVerification:
    """Check euler_lagrange(L) = f * eom with f a constant times parameters and exponentials."""
    name = variable or lagrangian.variable
    expr, target = lagrangian.expr, normalize(eom)
    potential = contains_integral_of(expr, name)
    if potential:
        expr = to_potential(expr, name, POTENTIAL)
        target = to_potential(target, name, POTENTIAL)
        el = variational_derivative(expr, POTENTIAL)
        logger.info(f"Verifying in the potential {POTENTIAL} with {POTENTIAL}' = {name}")
    else:
        el = variational_derivative(expr, name)

    def original(e: Expr) -> Expr:
        return from_potential(e, name, POTENTIAL) if potential else e

    factor = None if is_zero(target) else unit_factor(el, target)
    note = None
    if lagrangian.waived:
        note = "built from a non-self-adjoint operator; proportionality holds only where it is self-adjoint"
    if factor is not None and not is_zero(factor):
        return EomVerification(
            verified=True, euler_lagrange=original(el), eom=normalize(eom), factor=original(factor),
            residual=ZERO, potential=potential, note=note,
        )

    guess = None if is_zero(target) else candidate_factor(el, target)
    residual = el if guess is None else normalize(el - guess * target)
    logger.warning("Euler-Lagrange expression is not a unit multiple of the equation of motion")
    return EomVerification(
        verified=False, euler_lagrange=original(el), eom=normalize(eom), factor=None,
        residual=original(residual), potential=potential, note=note,
    )
