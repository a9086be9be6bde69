import pytest
from pydantic import ValidationError

from src.rvl.errors import CoefficientIndexError
from src.rvl.expr import ONE, ZERO, FunctionSymbol, X, is_zero, normalize
from src.rvl.types import (
    CommandReport, CoefficientComparison, EomVerification, IndexTuple, Lagrangian, LinearOperator,
    RiccatiChainEq, RunConfig,
)


class TestLinearOperator:
    def test_minimal_operator(self):
        op = LinearOperator(coeffs=[ONE, X])
        assert op.order == 1
        assert op.variable == "y"
        assert is_zero(op.apply() - (FunctionSymbol("y", 1) + X * FunctionSymbol("y")))

    def test_coefficients_are_normalized(self):
        op = LinearOperator(coeffs=[X + X, 1, 0])
        assert op.coeffs == (normalize(2 * X), ONE, ZERO)

    def test_coefficient_lookup(self):
        op = LinearOperator(coeffs=[ONE, X, X ** 2])
        assert op.coefficient(1) == X
        assert op.derivative_coefficient(0) == normalize(X ** 2)
        with pytest.raises(CoefficientIndexError):
            op.coefficient(3)

    def test_coefficient_index_error_is_index_error(self):
        assert issubclass(CoefficientIndexError, IndexError)

    def test_rejects_zero_leading(self):
        with pytest.raises(ValidationError):
            LinearOperator(coeffs=[ZERO, ONE])

    def test_rejects_order_zero(self):
        with pytest.raises(ValidationError):
            LinearOperator(coeffs=[ONE])

    def test_apply_to_expression(self):
        op = LinearOperator(coeffs=[ONE, ZERO, ONE])
        assert is_zero(op.apply(X ** 2) - (2 + X ** 2))

    def test_scale_and_rename(self):
        op = LinearOperator(coeffs=[ONE, ONE]).scale(X).with_variable("z")
        assert op.coeffs == (X, X)
        assert op.variable == "z"


class TestRiccatiChainEq:
    def test_arity(self):
        with pytest.raises(ValidationError):
            RiccatiChainEq(order=2, alphas=[ONE, ONE], lhs=ZERO)

    def test_negative_order(self):
        with pytest.raises(ValidationError):
            RiccatiChainEq(order=-1, alphas=[], lhs=ZERO)


class TestLagrangian:
    def test_of_computes_order(self):
        L = Lagrangian.of(FunctionSymbol("y") * FunctionSymbol("y", 3), "y")
        assert L.order == 3
        assert not L.waived

    def test_rejects_wrong_order(self):
        expr = normalize(FunctionSymbol("y", 2))
        with pytest.raises(ValidationError):
            Lagrangian(expr=expr, variable="y", order=1)

    def test_rejects_raw_tree(self):
        with pytest.raises(ValidationError):
            Lagrangian(expr=FunctionSymbol("y") + FunctionSymbol("y"), variable="y", order=0)


class TestIndexTuple:
    def test_valid(self):
        t = IndexTuple(entries=(3, 2, 4))
        assert t.length == 3
        assert t.total == 9

    @pytest.mark.parametrize("entries", [(1,), (2, 2), (1, 3), (1, 0), (-1, 2)])
    def test_invalid(self, entries):
        with pytest.raises(ValidationError):
            IndexTuple(entries=entries)


class TestReports:
    def test_comparison_line(self):
        c = CoefficientComparison(index=3, printed=FunctionSymbol("r2", 1), oracle=FunctionSymbol("r2", 1))
        assert c.match
        assert c.line() == "r3: printed=(dn r2 1) oracle=(dn r2 1) match=yes"

    def test_verification_lines(self):
        v = EomVerification(
            verified=False, euler_lagrange=ONE, eom=ONE, residual=X, potential=True, note="waived",
        )
        lines = v.lines()
        assert lines[0] == "residual=x"
        assert "note: waived" in lines

    def test_command_report_defaults(self):
        report = CommandReport(text="ok")
        assert report.exit_code == 0
        assert not report.error


class TestRunConfig:
    def test_symbolic_command(self):
        config = RunConfig(command="generate", order=3)
        assert config.format == "latex"
        assert config.x_range is None

    def test_numeric_requires_options(self):
        with pytest.raises(ValidationError):
            RunConfig(command="numeric", order=1, x_range=(0.0, 1.0))

    def test_numeric_options_rejected_elsewhere(self):
        with pytest.raises(ValidationError):
            RunConfig(command="generate", order=1, step=1e-3)

    def test_empty_range(self):
        with pytest.raises(ValidationError):
            RunConfig(command="numeric", order=1, x_range=(1.0, 0.0), step=1e-3, epsilon=1e-4)

    def test_format_choices(self):
        with pytest.raises(ValidationError):
            RunConfig(command="generate", order=1, format="html")
