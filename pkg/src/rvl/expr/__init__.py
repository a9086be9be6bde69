from .nodes import (
    Add, Const, Exp, Expr, FunctionSymbol, Int, Mul, MINUS_ONE, ONE, Param, Pow, X, XVar, ZERO,
    as_expr,
)
from .canonical import (
    candidate_factor, is_zero, normalize, terms_of, unit_factor,
)
from .calculus import (
    bind, contains_integral_of, differentiate, free_symbols, from_potential, is_total_derivative,
    local_symbols, max_order, partial_derivative, substitute, substitute_many, to_potential,
    variational_derivative,
)
from .serialize import DEFAULT_SYMBOLS, Format, SymbolTable, parse, parse_number, render
