from typing import List, Literal, Optional, Tuple

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import CoefficientIndexError
from .expr import Expr, FunctionSymbol, as_expr, differentiate, is_zero, max_order, normalize, render


class LinearOperator(BaseModel):
    """M(y) = sum_i r_i * y^(n-i); coeffs[i] multiplies the (n-i)-th derivative."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coeffs: Tuple[Expr, ...]
    variable: str = "y"

    @field_validator("coeffs", mode="before")
    @classmethod
    def normalize_coeffs(cls, value):
        return tuple(normalize(as_expr(c)) for c in value)

    @model_validator(mode="after")
    def validate_leading(self) -> Self:
        if len(self.coeffs) < 2:
            raise ValueError("A linear operator needs an order of at least 1 (two coefficients)")
        if is_zero(self.coeffs[0]):
            raise ValueError("Leading coefficient r0 must not be identically zero")
        return self

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, i: int) -> Expr:
        if not 0 <= i <= self.order:
            raise CoefficientIndexError(f"r{i} is out of range for an operator of order {self.order}")
        return self.coeffs[i]

    def derivative_coefficient(self, k: int) -> Expr:
        """Coefficient multiplying the k-th derivative of the variable."""
        return self.coefficient(self.order - k)

    def apply(self, f: Optional[Expr] = None) -> Expr:
        target = FunctionSymbol(self.variable) if f is None else f
        terms = [r * differentiate(target, self.order - i) for i, r in enumerate(self.coeffs)]
        return normalize(sum(terms[1:], terms[0]))

    def scale(self, g: Expr) -> "LinearOperator":
        return LinearOperator(coeffs=[g * r for r in self.coeffs], variable=self.variable)

    def with_variable(self, variable: str) -> "LinearOperator":
        return LinearOperator(coeffs=self.coeffs, variable=variable)


class RiccatiChainEq(BaseModel):
    """Order-N member of the chain: lhs = theta^N w + sum_j a_j theta^(j-1) w + a_0."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    order: int = Field(ge=0)
    alphas: Tuple[Expr, ...]
    lhs: Expr
    variable: str = "w"

    @field_validator("alphas", mode="before")
    @classmethod
    def normalize_alphas(cls, value):
        return tuple(normalize(as_expr(a)) for a in value)

    @model_validator(mode="after")
    def validate_arity(self) -> Self:
        if len(self.alphas) != self.order + 1:
            raise ValueError(f"Expected {self.order + 1} alphas for order {self.order}, got {len(self.alphas)}")
        return self


class Lagrangian(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    expr: Expr
    variable: str
    order: int
    waived: bool = False  # built from an operator that was not self-adjoint

    @model_validator(mode="after")
    def validate_order(self) -> Self:
        if self.expr is not normalize(self.expr):
            raise ValueError("Lagrangian expression must be canonical; build it with Lagrangian.of")
        if self.order != max_order(self.expr, self.variable):
            raise ValueError(f"Order {self.order} does not match the highest derivative of {self.variable}")
        return self

    @classmethod
    def of(cls, expr: Expr, variable: str, waived: bool = False) -> Self:
        canonical = normalize(expr)
        return cls(expr=canonical, variable=variable, order=max_order(canonical, variable), waived=waived)


class IndexTuple(BaseModel):
    """Member of the index set I_l^m: odd k_1 followed by even parts, summing to m."""

    model_config = ConfigDict(frozen=True)

    entries: Tuple[int, ...]

    @model_validator(mode="after")
    def validate_membership(self) -> Self:
        if len(self.entries) < 2:
            raise ValueError("Index tuples have at least two entries")
        head, *tail = self.entries
        if head <= 0 or head % 2 == 0:
            raise ValueError(f"First entry must be odd and positive, got {head}")
        if any(k <= 0 or k % 2 for k in tail):
            raise ValueError(f"Trailing entries must be even and positive, got {tuple(tail)}")
        return self

    @property
    def length(self) -> int:
        return len(self.entries)

    @property
    def total(self) -> int:
        return sum(self.entries)


class CoefficientComparison(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    index: int
    printed: Expr
    oracle: Expr

    @property
    def match(self) -> bool:
        return is_zero(self.printed - self.oracle)

    def line(self) -> str:
        verdict = "yes" if self.match else "no"
        return f"r{self.index}: printed={render(self.printed, 'sexpr')} oracle={render(self.oracle, 'sexpr')} match={verdict}"


class AuditReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    form: Literal["recurrence", "closed"]
    comparisons: List[CoefficientComparison] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    @property
    def all_match(self) -> bool:
        return all(c.match for c in self.comparisons)

    def lines(self) -> List[str]:
        return [c.line() for c in self.comparisons] + [f"note: {note}" for note in self.notes]


class EomVerification(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    verified: bool
    euler_lagrange: Expr
    eom: Expr
    factor: Optional[Expr] = None
    residual: Optional[Expr] = None
    potential: bool = False  # verified in W with W' = w
    note: Optional[str] = None

    def lines(self) -> List[str]:
        if self.verified:
            lines = [f"factor={render(self.factor, 'sexpr')}"]
        else:
            lines = [f"residual={render(self.residual, 'sexpr')}"]
        if self.potential:
            lines.append("note: verified in the potential variable W with W' = w")
        if self.note:
            lines.append(f"note: {self.note}")
        return lines


class RunConfig(BaseModel):
    command: Literal["generate", "linearize", "selfadjoint", "lagrangian", "numeric"]
    order: Optional[int] = None
    alphas_path: Optional[str] = None
    format: Literal["plain", "latex", "sexpr"] = "latex"
    x_range: Optional[Tuple[float, float]] = None
    step: Optional[float] = None
    epsilon: Optional[float] = None
    out: Optional[str] = None

    @model_validator(mode="after")
    def validate_numeric_options(self) -> Self:
        numeric = (self.x_range, self.step, self.epsilon)
        if self.command == "numeric":
            if any(option is None for option in numeric):
                raise ValueError("numeric runs need a range, a step and an epsilon")
            if self.x_range[1] <= self.x_range[0]:
                raise ValueError(f"Empty range {self.x_range}")
            if self.step <= 0 or self.epsilon <= 0:
                raise ValueError("step and epsilon must be positive")
        elif any(option is not None for option in numeric):
            raise ValueError(f"Numeric options are not accepted by '{self.command}'")
        return self


class CommandReport(BaseModel):
    text: str
    exit_code: int = 0
    error: bool = False  # text goes to stderr
