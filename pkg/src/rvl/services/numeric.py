"""Numerical shadow of the symbolic pipeline: RK4 trajectories, quadrature of actions, stationarity checks."""

import operator
from functools import reduce
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import cumulative_trapezoid, trapezoid

from ..errors import (
    ArityError, EndpointSupportError, NonlocalDependencyError, NotMonicError, OrderError,
    UnboundSymbolError, WindowEmptyError,
)
from ..expr import (
    Add, Const, Exp, Expr, FunctionSymbol, Int, Mul, Param, Pow, XVar, contains_integral_of,
    differentiate, is_zero, max_order, normalize, partial_derivative, to_potential,
)
from ..log import logger
from ..types import Lagrangian, LinearOperator
from .chain import OMEGA, cole_hopf_y_derivatives, delinearize


BLOWUP_THRESHOLD = 1e12
WINDOW_THRESHOLD = 1e-8

# (x, state) -> value; x and state are scalars/vectors for single points or arrays for whole grids
Evaluator = Callable[[Any, Any], Any]


class ConstantCoefficient(BaseModel):
    value: float

    def at(self, order: int, x: Any, binding: "CoefficientBinding") -> Any:
        return np.zeros_like(x, dtype=float) + (self.value if order == 0 else 0.0)


class TabulatedCoefficient(BaseModel):
    """Samples (x_i, f_i) interpolated linearly; derivatives from finite differences of the table."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: np.ndarray
    values: np.ndarray

    def table(self, order: int) -> np.ndarray:
        samples = self.values
        for _ in range(order):
            samples = np.gradient(samples, self.x, edge_order=2)
        return samples

    def at(self, order: int, x: Any, binding: "CoefficientBinding") -> Any:
        return np.interp(x, self.x, self.table(order))


class SymbolicCoefficient(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    expr: Expr

    def at(self, order: int, x: Any, binding: "CoefficientBinding") -> Any:
        evaluator = compile_expr(differentiate(self.expr, order), binding.lookup({}))
        return evaluator(x, None)


Coefficient = Union[ConstantCoefficient, TabulatedCoefficient, SymbolicCoefficient]


class CoefficientBinding(BaseModel):
    """Concrete values for the coefficient functions and parameters of an expression."""

    entries: Dict[str, Coefficient] = Field(default_factory=dict)

    @classmethod
    def constants(cls, **values: float) -> "CoefficientBinding":
        return cls(entries={name: ConstantCoefficient(value=v) for name, v in values.items()})

    def merged(self, other: "CoefficientBinding") -> "CoefficientBinding":
        return CoefficientBinding(entries={**self.entries, **other.entries})

    def at(self, name: str, order: int, x: Any) -> Any:
        if name not in self.entries:
            raise UnboundSymbolError(name)
        return self.entries[name].at(order, x, self)

    def lookup(self, state_names: Dict[str, int]) -> Callable[[Expr], Evaluator]:
        """Resolver mapping symbols to evaluators; names in `state_names` read columns of the state."""

        def resolve(symbol: Expr) -> Evaluator:
            if isinstance(symbol, Param):
                name, order = symbol.name, 0
            else:
                name, order = symbol.name, symbol.order
            if name in state_names:
                if order >= state_names[name]:
                    raise OrderError(f"{name}^({order}) is not available in the state (orders < {state_names[name]})")
                return lambda x, state: state[..., order]
            if name not in self.entries:
                raise UnboundSymbolError(name)
            return lambda x, state: self.at(name, order, x)

        return resolve


def compile_expr(e: Expr, resolve: Callable[[Expr], Evaluator]) -> Evaluator:
    """Turn a canonical expression into a numpy closure. Int nodes need the whole grid as x."""
    match e:
        case Const():
            value = float(e.value)
            return lambda x, state: value + np.zeros_like(x, dtype=float)
        case XVar():
            return lambda x, state: np.asarray(x, dtype=float)
        case FunctionSymbol() | Param():
            return resolve(e)
        case Add():
            parts = [compile_expr(t, resolve) for t in e.terms]
            return lambda x, state: reduce(operator.add, (p(x, state) for p in parts))
        case Mul():
            parts = [compile_expr(f, resolve) for f in e.factors]
            return lambda x, state: reduce(operator.mul, (p(x, state) for p in parts))
        case Pow():
            base, exponent = compile_expr(e.base, resolve), e.exponent
            return lambda x, state: np.power(base(x, state), float(exponent))
        case Exp():
            arg = compile_expr(e.arg, resolve)
            return lambda x, state: np.exp(arg(x, state))
        case Int():
            arg = compile_expr(e.arg, resolve)

            def antiderivative(x, state):
                if np.ndim(x) == 0:
                    raise NonlocalDependencyError("Int nodes can only be evaluated along a whole grid")
                return cumulative_trapezoid(arg(x, state), x, initial=0.0)

            return antiderivative
    raise TypeError(f"Cannot compile {type(e).__name__}")


def uniform_grid(start: float, stop: float, step: float) -> np.ndarray:
    if stop <= start or step <= 0:
        raise ValueError(f"Invalid grid [{start}, {stop}] with step {step}")
    intervals = max(1, int(round((stop - start) / step)))
    grid = np.linspace(start, stop, intervals + 1)
    if not np.isclose(grid[1] - grid[0], step, rtol=1e-9, atol=0.0):
        logger.debug(f"Step adjusted from {step} to {grid[1] - grid[0]} to fit [{start}, {stop}]")
    return grid


class Trajectory(BaseModel):
    """Samples of a function and its first derivatives on a uniform grid.

    `values[:, k]` holds the k-th derivative. When the trajectory solves an
    explicit ODE, `rhs` gives the next derivative from (grid, values); higher
    ones fall back to finite differences.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    variable: str
    grid: np.ndarray
    values: np.ndarray
    rhs: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    events: Tuple[str, ...] = ()

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0]) if len(self.grid) > 1 else 0.0

    @property
    def order(self) -> int:
        return self.values.shape[1]

    @property
    def truncated(self) -> bool:
        return bool(self.events)

    @classmethod
    def from_samples(cls, variable: str, grid: np.ndarray, samples: Union[np.ndarray, Sequence[np.ndarray]]) -> "Trajectory":
        """Wrap externally computed samples; a 1-D array or a list of derivative columns."""
        grid = np.asarray(grid, dtype=float)
        columns = np.asarray(samples, dtype=float)
        if columns.ndim == 1:
            columns = columns[:, None]
        elif columns.shape[0] != len(grid):
            columns = columns.T
        if columns.shape[0] != len(grid):
            raise ArityError(f"{columns.shape[0]} samples for a grid of {len(grid)} points")
        if len(grid) < 3 or np.any(np.diff(grid) <= 0):
            raise ValueError("Grid must be strictly increasing with at least three points")
        return cls(variable=variable, grid=grid, values=columns)

    def jet(self, k: int) -> np.ndarray:
        if k < self.order:
            return self.values[:, k]
        if k == self.order and self.rhs is not None:
            return self.rhs(self.grid, self.values)
        return np.gradient(self.jet(k - 1), self.grid, edge_order=2)

    def jets(self, count: int) -> np.ndarray:
        return np.column_stack([self.jet(k) for k in range(count)])

    def window(self, start: int, stop: int) -> "Trajectory":
        return self.model_copy(update={"grid": self.grid[start:stop], "values": self.values[start:stop]})

    def index_of(self, x: float) -> int:
        return int(np.argmin(np.abs(self.grid - x)))

    def value_at(self, x: float, k: int = 0) -> float:
        return float(np.interp(x, self.grid, self.jet(k)))

    def perturbed(self, bump: "Bump", epsilon: float, count: int) -> "Trajectory":
        """Samples of v + epsilon*b with derivatives 0..count-1 stored explicitly."""
        columns = [self.jet(k) + epsilon * bump.derivative(k, self.grid) for k in range(count)]
        return Trajectory(variable=self.variable, grid=self.grid, values=np.column_stack(columns))


def _explicit_rhs(eq: Expr, variable: str) -> Tuple[int, Expr]:
    eq = normalize(eq)
    n = max_order(eq, variable)
    if n < 1:
        raise OrderError(f"Equation has no derivative of {variable}")
    if any(isinstance(node, Int) for node in _walk(eq)):
        raise NonlocalDependencyError("Equations with Int nodes cannot be integrated pointwise")
    top = FunctionSymbol(variable, n)
    if not is_zero(partial_derivative(eq, top) - 1):
        raise NotMonicError(f"Equation must be linear in {variable}^({n}) with unit coefficient")
    return n, normalize(top - eq)


def _walk(e: Expr):
    yield e
    for child in e.children():
        yield from _walk(child)


def integrate(
    eq: Expr,
    variable: str,
    binding: CoefficientBinding,
    init: Sequence[float],
    grid: np.ndarray,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> Trajectory:
    """Classical RK4 for eq = 0 solved for its highest derivative, from x = grid[0]."""
    n, rhs_expr = _explicit_rhs(eq, variable)
    if len(init) != n:
        raise ArityError(f"Equation of order {n} needs {n} initial values, got {len(init)}")
    rhs = compile_expr(rhs_expr, binding.lookup({variable: n}))

    def field(x: float, state: np.ndarray) -> np.ndarray:
        return np.append(state[1:], rhs(x, state))

    grid = np.asarray(grid, dtype=float)
    values = np.empty((len(grid), n))
    values[0] = init
    events: list[str] = []
    last = len(grid)
    for i in range(len(grid) - 1):
        x, h, state = grid[i], grid[i + 1] - grid[i], values[i]
        k1 = field(x, state)
        k2 = field(x + h / 2, state + h / 2 * k1)
        k3 = field(x + h / 2, state + h / 2 * k2)
        k4 = field(x + h, state + h * k3)
        values[i + 1] = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(values[i + 1])) or np.max(np.abs(values[i + 1])) > blowup_threshold:
            events.append(f"blow-up near x={grid[i + 1]:.6g}; trajectory truncated at x={grid[i]:.6g}")
            logger.warning(events[-1])
            last = i + 1
            break

    return Trajectory(
        variable=variable, grid=grid[:last], values=values[:last],
        rhs=lambda xs, vs: rhs(xs, vs), events=tuple(events),
    )


def evaluate_on_grid(e: Expr, binding: CoefficientBinding, traj: Trajectory) -> np.ndarray:
    """Values of `e` at every grid point; Int nodes start from 0 at the first grid point."""
    e = normalize(e)
    count = max_order(e, traj.variable) + 1
    state = traj.jets(max(count, 1))
    evaluator = compile_expr(e, binding.lookup({traj.variable: max(count, 1)}))
    return np.asarray(evaluator(traj.grid, state), dtype=float) + np.zeros(len(traj.grid))


def evaluate(e: Expr, binding: CoefficientBinding, traj: Trajectory, index: int) -> float:
    return float(evaluate_on_grid(e, binding, traj)[index])


def action(lagrangian: Lagrangian, binding: CoefficientBinding, traj: Trajectory) -> float:
    """Composite trapezoidal quadrature of L along the trajectory."""
    return float(trapezoid(evaluate_on_grid(lagrangian.expr, binding, traj), traj.grid))


class Bump(BaseModel):
    """amplitude * ((x - x0)(x1 - x))^m / peak on [x0, x1], zero outside; unit peak for amplitude 1."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    start: float
    stop: float
    smoothness: int
    amplitude: float = 1.0
    polynomial: Polynomial

    def derivative(self, k: int, x: np.ndarray) -> np.ndarray:
        inside = (x >= self.start) & (x <= self.stop)
        values = self.polynomial.deriv(k)(x) if k else self.polynomial(x)
        return np.where(inside, self.amplitude * values, 0.0)


def polynomial_bump(start: float, stop: float, smoothness: int = 4, amplitude: float = 1.0) -> Bump:
    if stop <= start:
        raise EndpointSupportError(f"Bump support [{start}, {stop}] is empty")
    if smoothness < 1:
        raise EndpointSupportError(f"Bump smoothness must be positive, got {smoothness}")
    base = Polynomial([-start * stop, start + stop, -1.0])
    peak = ((stop - start) / 2) ** (2 * smoothness)
    return Bump(start=start, stop=stop, smoothness=smoothness, amplitude=amplitude, polynomial=base ** smoothness / peak)


def potential_trajectory(traj: Trajectory, count: int, potential: str = "W") -> Trajectory:
    """W = Int(w) from 0 at the first grid point, with W^(k) = w^(k-1)."""
    columns = [cumulative_trapezoid(traj.jet(0), traj.grid, initial=0.0)]
    columns += [traj.jet(k) for k in range(count - 1)]
    return Trajectory(variable=potential, grid=traj.grid, values=np.column_stack(columns))


def first_variation_residual(
    lagrangian: Lagrangian,
    binding: CoefficientBinding,
    traj: Trajectory,
    bump: Bump,
    epsilon: float,
) -> float:
    """|S(v + eps b) - S(v - eps b)| / (2 eps); vanishes up to O(eps) + O(h^2) along a solution.

    Lagrangians with Int(w) are varied in the potential W = Int(w), so the
    variation stays compactly supported.
    """
    working, base = lagrangian, traj
    if contains_integral_of(lagrangian.expr, lagrangian.variable):
        working = Lagrangian.of(to_potential(lagrangian.expr, lagrangian.variable, "W"), "W")
        base = potential_trajectory(traj, working.order + 1)
    if bump.smoothness < working.order:
        raise EndpointSupportError(
            f"Bump of smoothness {bump.smoothness} does not vanish to order {working.order - 1} at its endpoints"
        )
    if bump.start < base.grid[0] or bump.stop > base.grid[-1]:
        raise EndpointSupportError(f"Bump support [{bump.start}, {bump.stop}] leaves the grid [{base.grid[0]}, {base.grid[-1]}]")

    count = working.order + 1
    plus = action(working, binding, base.perturbed(bump, epsilon, count))
    minus = action(working, binding, base.perturbed(bump, -epsilon, count))
    return abs(plus - minus) / (2 * epsilon)


class ConsistencyReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    deviation: float
    window: Tuple[float, float]
    omega: Trajectory


def nonvanishing_window(traj: Trajectory, threshold: float = WINDOW_THRESHOLD) -> Tuple[int, int]:
    """Largest run of consecutive samples with |v| > threshold and constant sign, as a slice (start, stop)."""
    values = traj.jet(0)
    signs = np.where(np.abs(values) > threshold, np.sign(values), 0.0)
    best, start = (0, 0), None
    for i, sign in enumerate(np.append(signs, 0.0)):
        if start is not None and sign != signs[start]:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = None
        if sign != 0.0 and start is None:
            start = i
    if best[1] - best[0] < 3:
        raise WindowEmptyError(f"{traj.variable} vanishes on the whole grid (|{traj.variable}| <= {threshold})")
    return best


def _omega_initial_data(y_traj: Trajectory, index: int, order: int, binding: CoefficientBinding) -> List[float]:
    """w, w', ..., w^(N-1) at a grid point from y^(k) = g_k y, solved upward in k."""
    y0 = y_traj.jet(0)[index]
    gs = cole_hopf_y_derivatives(order + 1)
    known: List[float] = []
    for k in range(1, order + 1):
        leading = FunctionSymbol(OMEGA.name, k - 1)
        lower = normalize(gs[k] - leading)
        state = np.array(known + [0.0])
        value = compile_expr(lower, binding.lookup({OMEGA.name: k}))(y_traj.grid[index], state)
        known.append(y_traj.jet(k)[index] / y0 - float(value))
    return known


def cole_hopf_consistency(
    y_traj: Trajectory,
    op: LinearOperator,
    binding: CoefficientBinding,
    threshold: float = WINDOW_THRESHOLD,
    blowup_threshold: float = BLOWUP_THRESHOLD,
) -> ConsistencyReport:
    """Integrate the chain equation of `op` from Cole-Hopf initial data and compare w with y'/y."""
    start, stop = nonvanishing_window(y_traj, threshold)
    window = y_traj.window(start, stop)
    if (start, stop) != (0, len(y_traj.grid)):
        logger.info(f"Restricted to the window [{window.grid[0]:.6g}, {window.grid[-1]:.6g}] where y does not vanish")

    chain = delinearize(op)
    init = _omega_initial_data(window, 0, chain.order, binding)
    omega = integrate(chain.lhs, chain.variable, binding, init, window.grid, blowup_threshold)
    ratio = window.jet(1)[: len(omega.grid)] / window.jet(0)[: len(omega.grid)]
    deviation = float(np.max(np.abs(omega.jet(0) - ratio)))
    return ConsistencyReport(deviation=deviation, window=(float(window.grid[0]), float(window.grid[-1])), omega=omega)


def convergence_order(run: Callable[[float], float], step: float, exact: Optional[float] = None) -> float:
    """Observed order from step halving: against `exact` if given, else from three levels."""
    coarse, fine = run(step), run(step / 2)
    if exact is not None:
        return float(np.log2(abs(coarse - exact) / abs(fine - exact)))
    finest = run(step / 4)
    return float(np.log2(abs(coarse - fine) / abs(fine - finest)))
