import math
import random
import pytest
from fractions import Fraction

from src.rvl.errors import NonlocalDependencyError
from src.rvl.expr import (
    Add, Const, Exp, FunctionSymbol, Int, Mul, Param, Pow, X, XVar, ZERO, bind, contains_integral_of, differentiate,
    free_symbols, from_potential, is_total_derivative, is_zero, max_order, normalize, partial_derivative,
    substitute, to_potential, unit_factor, variational_derivative,
)


w = FunctionSymbol("w")
y = FunctionSymbol("y")


def d(name: str, k: int) -> FunctionSymbol:
    return FunctionSymbol(name, k)


class TestNormalize:
    def test_idempotent(self):
        e = (w + 1) * (w - 1) + 3 * d("w", 1) * w ** 2 - Exp(2 * Int(w)) * Exp(-Int(w))
        once = normalize(e)
        assert normalize(once) == once

    def test_collects_like_terms(self):
        assert normalize(w + w + w) == normalize(3 * w)
        assert is_zero(w * d("w", 1) - d("w", 1) * w)

    def test_folds_rationals(self):
        assert normalize(Const(Fraction(1, 2)) + Const(Fraction(1, 3))) == Const(Fraction(5, 6))
        assert normalize(Const(2) * Const(3) - 6) == ZERO

    def test_identities_removed(self):
        assert normalize(w * 1 + 0) == w
        assert normalize(w ** 1) == w
        assert normalize(w ** 0) == Const(1)

    def test_exp_of_sum_is_product(self):
        assert is_zero(Exp(Int(w) + Int(y)) - Exp(Int(w)) * Exp(Int(y)))
        assert normalize(Exp(ZERO)) == Const(1)

    def test_const_rejects_floats(self):
        with pytest.raises(TypeError):
            Const(0.5)


class TestDifferentiate:
    def test_product_rule(self):
        assert is_zero(differentiate(w * y) - (d("w", 1) * y + w * d("y", 1)))

    def test_chain_rule_through_exp(self):
        e = Exp(2 * Int(w))
        assert is_zero(differentiate(e) - 2 * w * e)

    def test_int_is_an_antiderivative(self):
        assert is_zero(differentiate(Int(w ** 2)) - w ** 2)

    def test_power_rule_negative(self):
        assert is_zero(differentiate(w ** -1) + d("w", 1) * w ** -2)

    def test_x(self):
        assert normalize(differentiate(X ** 3)) == normalize(3 * X ** 2)
        assert differentiate(Param("a")) == ZERO

    def test_repeated(self):
        assert normalize(differentiate(w, 4)) == d("w", 4)


class TestPartials:
    def test_partial_treats_derivatives_as_independent(self):
        e = w * d("w", 1) ** 2
        assert is_zero(partial_derivative(e, w) - d("w", 1) ** 2)
        assert is_zero(partial_derivative(e, d("w", 1)) - 2 * w * d("w", 1))
        assert partial_derivative(e, d("w", 2)) == ZERO

    def test_nonlocal_dependency_raises(self):
        with pytest.raises(NonlocalDependencyError):
            partial_derivative(Exp(Int(w)) * d("w", 1), w)

    def test_int_free_of_symbol_is_constant(self):
        assert is_zero(partial_derivative(Exp(Int(FunctionSymbol("a1"))) * w, w) - Exp(Int(FunctionSymbol("a1"))))


class TestVariationalDerivative:
    def test_oscillator(self):
        L = y ** 2 - d("y", 1) ** 2
        assert is_zero(variational_derivative(L, "y") - (2 * y + 2 * d("y", 2)))

    def test_null_lagrangian(self):
        assert is_total_derivative(y * d("y", 1), "y")
        assert is_total_derivative(differentiate(w ** 3 * d("w", 1)), "w")
        assert not is_total_derivative(y ** 2, "y")

    def test_y_times_operator(self):
        L = y * (d("y", 2) + y)
        assert is_zero(variational_derivative(L, y) - 2 * (d("y", 2) + y))


class TestSymbols:
    def test_free_symbols_and_orders(self):
        e = w * d("w", 3) + Int(y)
        assert free_symbols(e) == frozenset({w, d("w", 3), y})
        assert max_order(e, "w") == 3
        assert max_order(e, "z") == -1
        assert contains_integral_of(e, "y")
        assert not contains_integral_of(e, "w")

    def test_substitute(self):
        e = w ** 2 + d("w", 1)
        assert is_zero(substitute(e, w, X) - (X ** 2 + d("w", 1)))

    def test_bind_differentiates_value(self):
        e = FunctionSymbol("a1", 2) + FunctionSymbol("a1")
        assert is_zero(bind(e, {"a1": X ** 3}) - (6 * X + X ** 3))


class TestPotential:
    def test_round_trip(self):
        e = Exp(2 * Int(w)) * (d("w", 1) + w ** 2)
        W = FunctionSymbol("W")
        expected = Exp(2 * W) * (d("W", 2) + d("W", 1) ** 2)
        assert is_zero(to_potential(e) - expected)
        assert is_zero(from_potential(to_potential(e)) - e)


class TestUnitFactor:
    def test_finds_exponential_factor(self):
        a = Param("a")
        eom = d("w", 1) + w ** 2
        factor = 2 * a ** 2 * Exp(2 * Int(w))
        assert is_zero(unit_factor(normalize(factor * eom), eom) - factor)

    def test_none_when_not_proportional(self):
        assert unit_factor(normalize(w ** 2 + 1), normalize(w + 1)) is None


def random_polynomial(rng: random.Random, depth: int = 3):
    """Small random tree over w, w', x and integers."""
    if depth == 0:
        return rng.choice([w, d("w", 1), X, Const(rng.randint(-3, 3))])
    left, right = random_polynomial(rng, depth - 1), random_polynomial(rng, depth - 1)
    return rng.choice([left + right, left * right, left - right])


class TestRandomised:
    @pytest.mark.parametrize("seed", range(10))
    def test_product_rule(self, seed):
        rng = random.Random(seed)
        f, g = random_polynomial(rng), random_polynomial(rng)
        assert is_zero(differentiate(f * g) - (differentiate(f) * g + f * differentiate(g)))

    @pytest.mark.parametrize("seed", range(10))
    def test_normal_form_is_order_independent(self, seed):
        rng = random.Random(seed)
        f, g, h = (random_polynomial(rng, 2) for _ in range(3))
        assert normalize((f + g) * h) == normalize(h * g + f * h)

    @pytest.mark.parametrize("seed", range(10))
    def test_chain_rule_over_the_jet(self, seed):
        rng = random.Random(seed)
        e = random_jet_polynomial(rng)
        expected = sum((partial_derivative(e, d("w", k)) * d("w", k + 1) for k in range(3)), ZERO)
        assert is_zero(differentiate(e) - expected)

    @pytest.mark.parametrize("seed", range(10))
    def test_normalize_keeps_the_value(self, seed):
        rng = random.Random(seed)
        e = random_elementary(rng)
        for x in (-1.0, 0.3, 1.7):
            scale = evaluate_at(e, x, magnitude=True)
            assert math.isclose(evaluate_at(normalize(e), x), evaluate_at(e, x), rel_tol=1e-10, abs_tol=1e-12 * scale)


def random_jet_polynomial(rng: random.Random, depth: int = 3):
    """Random tree over w, w', w'' and integers."""
    if depth == 0:
        return rng.choice([w, d("w", 1), d("w", 2), Const(rng.randint(-3, 3))])
    left, right = random_jet_polynomial(rng, depth - 1), random_jet_polynomial(rng, depth - 1)
    return rng.choice([left + right, left * right, left - right])


def random_elementary(rng: random.Random, depth: int = 3):
    """Random tree in x alone, with exponentials and squares."""
    if depth == 0:
        return rng.choice([X, Const(rng.randint(-3, 3)), Exp(Const(rng.choice([-1, 1, 2])) * X)])
    left, right = random_elementary(rng, depth - 1), random_elementary(rng, depth - 1)
    return rng.choice([left + right, left * right, left - right, left ** 2])


def evaluate_at(e, x: float, magnitude: bool = False) -> float:
    """Value at x; with `magnitude`, the same tree with every constant and x taken absolute."""
    match e:
        case Const():
            return abs(float(e.value)) if magnitude else float(e.value)
        case XVar():
            return abs(x) if magnitude else x
        case Add():
            return sum(evaluate_at(t, x, magnitude) for t in e.terms)
        case Mul():
            return math.prod(evaluate_at(f, x, magnitude) for f in e.factors)
        case Pow():
            return evaluate_at(e.base, x, magnitude) ** e.exponent
        case Exp():
            return math.exp(evaluate_at(e.arg, x, magnitude))
    raise TypeError(f"cannot evaluate {type(e).__name__}")
