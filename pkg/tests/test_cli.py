import numpy as np
import pytest
from click.testing import CliRunner

from src.rvl import cli
from src.rvl.expr import ONE, ZERO, parse
from src.rvl.services.chain import bind_alphas, build_chain_equation


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("RVL_MAX_ORDER", "RVL_WARN_ORDER", "RVL_FORMAT", "RVL_STEP", "RVL_EPSILON", "RVL_BLOWUP_THRESHOLD"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def runner():
    return CliRunner()


def value_of(output: str, key: str) -> str:
    for line in output.splitlines():
        if line.startswith(key):
            return line.split("=", 1)[1].strip() if "=" in line else line.split(":", 1)[1].strip()
    raise AssertionError(f"{key} not found in {output!r}")


class TestGenerate:
    def test_riccati_sexpr(self, runner):
        result = runner.invoke(cli, ["generate", "--order", "1", "--format", "sexpr"])
        assert result.exit_code == 0
        text = result.stdout.strip()
        assert text.endswith(" = 0")
        assert parse(text[: -len(" = 0")]) == build_chain_equation(1).lhs

    def test_default_format_is_latex(self, runner):
        result = runner.invoke(cli, ["generate", "-N", "3"])
        assert result.exit_code == 0
        assert r"\omega'''" in result.stdout
        assert r"\alpha_{3}" in result.stdout

    def test_order_zero_is_usage_error(self, runner):
        result = runner.invoke(cli, ["generate", "--order", "0"])
        assert result.exit_code == 2

    def test_max_order_from_env(self, runner):
        result = runner.invoke(cli, ["generate", "--order", "3"], env={"RVL_MAX_ORDER": "2"})
        assert result.exit_code == 2

    def test_alpha_table(self, runner, tmp_path):
        path = tmp_path / "alphas.txt"
        path.write_text("a0 = 1\na1 = 0\n")
        result = runner.invoke(cli, ["generate", "--order", "1", "--alphas", str(path), "--format", "sexpr"])
        assert result.exit_code == 0
        expected = build_chain_equation(1, bind_alphas(1, {"a0": ONE, "a1": ZERO})).lhs
        assert parse(result.stdout.strip()[: -len(" = 0")]) == expected

    def test_foreign_alpha_in_table(self, runner, tmp_path):
        path = tmp_path / "alphas.txt"
        path.write_text("a5 = 1\n")
        result = runner.invoke(cli, ["generate", "--order", "1", "--alphas", str(path)])
        assert result.exit_code == 2


class TestLinearize:
    def test_round_trip(self, runner):
        result = runner.invoke(cli, ["linearize", "--order", "2", "--round-trip", "--format", "plain"])
        assert result.exit_code == 0
        assert "certificate: 0" in result.stdout
        assert "round-trip: yes" in result.stdout

    def test_riccati_operator(self, runner):
        result = runner.invoke(cli, ["linearize", "--order", "1", "--format", "sexpr"])
        assert result.exit_code == 0
        assert "(dn y 2)" in result.stdout


class TestSelfAdjoint:
    def test_recurrence_audit(self, runner):
        result = runner.invoke(cli, ["selfadjoint", "--recurrence", "n=2", "--form", "recurrence"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "form: recurrence (n=2)"
        assert lines[1].startswith("r1: printed=") and lines[1].endswith("match=yes")
        assert lines[2].startswith("r3: printed=") and lines[2].endswith("match=no")

    def test_both_forms(self, runner):
        result = runner.invoke(cli, ["selfadjoint", "--recurrence", "n=3"])
        assert result.exit_code == 0
        assert "form: recurrence (n=3)" in result.stdout
        assert "form: closed (n=3)" in result.stdout

    def test_bad_recurrence_argument(self, runner):
        result = runner.invoke(cli, ["selfadjoint", "--recurrence", "k=2"])
        assert result.exit_code == 2

    def test_nothing_to_do(self, runner):
        result = runner.invoke(cli, ["selfadjoint"])
        assert result.exit_code == 2

    def test_operator_file(self, runner, tmp_path):
        path = tmp_path / "op.yaml"
        path.write_text("variable: y\ncoefficients: ['1', '0', 'x', '0', '1']\n")
        result = runner.invoke(cli, ["selfadjoint", str(path), "--format", "plain"])
        assert result.exit_code == 0
        assert "self-adjoint: no" in result.stdout
        assert "r1 - 2*r0': 0" in result.stdout
        assert "q' - r3: 1" in result.stdout

    def test_self_adjoint_operator_file(self, runner, tmp_path):
        path = tmp_path / "op.yaml"
        path.write_text("coefficients: ['(fn r0)', '(dn r0 1)', '(fn r2)']\n")
        result = runner.invoke(cli, ["selfadjoint", str(path)])
        assert result.exit_code == 0
        assert "self-adjoint: yes" in result.stdout
        assert "lagrange identity: yes" in result.stdout


class TestLagrangian:
    def test_riccati(self, runner):
        result = runner.invoke(cli, ["lagrangian", "--order", "1", "--format", "sexpr"])
        assert result.exit_code == 0
        assert "verified: yes" in result.stdout
        assert "factor=" in result.stdout

    def test_reduce_gauge(self, runner):
        result = runner.invoke(cli, ["lagrangian", "--order", "1", "--reduce-gauge", "--format", "plain"])
        assert result.exit_code == 0
        assert "order 2 -> 1" in result.stdout
        assert "dynamics unchanged" in result.stdout

    def test_even_order_refused(self, runner):
        result = runner.invoke(cli, ["lagrangian", "--order", "2"])
        assert result.exit_code == 3

    def test_third_order_symbolic_is_waived(self, runner):
        result = runner.invoke(cli, ["lagrangian", "--order", "3", "--format", "sexpr"])
        assert result.exit_code == 0
        assert "verified: no" in result.stdout
        assert "note:" in result.stdout

    def test_third_order_self_adjoint_alphas(self, runner, tmp_path):
        path = tmp_path / "alphas.txt"
        path.write_text("a3 = 0\na1 = (dn a2 1)\n")
        result = runner.invoke(cli, ["lagrangian", "--order", "3", "--alphas", str(path), "--format", "sexpr"])
        assert result.exit_code == 0
        assert "verified: yes" in result.stdout


class TestNumeric:
    def test_riccati_tangent(self, runner):
        result = runner.invoke(cli, ["numeric", "riccati", "--a0", "1", "--range", "0", "1.2", "--at", "1"])
        assert result.exit_code == 0
        assert abs(float(value_of(result.stdout, "w(1)")) + np.tan(1.0)) < 1e-6

    def test_convergence(self, runner):
        result = runner.invoke(
            cli, ["numeric", "riccati", "--a0", "1", "--range", "0", "1.2", "--step", "0.02", "--convergence"],
        )
        assert result.exit_code == 0
        assert float(value_of(result.stdout, "convergence order")) >= 3.8

    def test_csv_output(self, runner, tmp_path):
        out = tmp_path / "w.csv"
        result = runner.invoke(
            cli, ["numeric", "riccati", "--a0", "1", "--range", "0", "1", "--step", "0.1", "--out", str(out)],
        )
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x, v0"
        assert len(lines) == 12

    def test_blow_up(self, runner, tmp_path):
        out = tmp_path / "w.csv"
        result = runner.invoke(
            cli, ["numeric", "riccati", "--init", "-1", "--range", "0", "2", "--out", str(out)],
            env={"RVL_BLOWUP_THRESHOLD": "1e6"},
        )
        assert result.exit_code == 5
        assert "event: blow-up" in result.stdout
        assert out.exists()

    def test_colehopf(self, runner):
        result = runner.invoke(cli, ["numeric", "colehopf", "--a0", "1", "--range", "0", "1.2"])
        assert result.exit_code == 0
        assert "verdict: PASS" in result.stdout
        assert float(value_of(result.stdout, "deviation")) < 1e-6

    def test_variation_pass(self, runner):
        result = runner.invoke(cli, ["numeric", "variation", "--a0", "1", "--range", "0", "1.2"])
        assert result.exit_code == 0
        assert "verdict: PASS" in result.stdout

    def test_variation_linear_form(self, runner):
        result = runner.invoke(
            cli, ["numeric", "variation", "--a0", "1", "--a1", "0.5", "--range", "0", "1.2", "--form", "linear"],
        )
        assert result.exit_code == 0
        assert "variable: y" in result.stdout
        assert "verdict: PASS" in result.stdout

    def test_variation_detects_non_solution(self, runner):
        result = runner.invoke(cli, ["numeric", "variation", "--a0", "1", "--range", "0", "1.2", "--perturb", "0.5"])
        assert result.exit_code == 4
        assert "verdict: FAIL" in result.stdout

    def test_even_order_variation_refused(self, runner):
        result = runner.invoke(cli, ["numeric", "variation", "--order", "2", "--range", "0", "1"])
        assert result.exit_code == 3

    def test_alpha_outside_order(self, runner):
        result = runner.invoke(cli, ["numeric", "riccati", "--a3", "1", "--range", "0", "1"])
        assert result.exit_code == 2

    def test_range_required(self, runner):
        result = runner.invoke(cli, ["numeric", "riccati", "--a0", "1"])
        assert result.exit_code == 2

    def test_empty_range(self, runner):
        result = runner.invoke(cli, ["numeric", "riccati", "--range", "1", "0"])
        assert result.exit_code == 2


class TestDeterminism:
    @pytest.mark.parametrize("args", [
        ["generate", "--order", "3", "--format", "sexpr"],
        ["linearize", "--order", "2", "--round-trip", "--format", "plain"],
        ["lagrangian", "--order", "3", "--format", "latex"],
        ["selfadjoint", "--recurrence", "n=3"],
        ["numeric", "colehopf", "--a0", "1", "--range", "0", "1.2", "--step", "0.01"],
    ])
    def test_repeated_runs_print_the_same(self, runner, args):
        first = runner.invoke(cli, args)
        second = runner.invoke(cli, args)
        assert first.exit_code == second.exit_code
        assert first.stdout == second.stdout
