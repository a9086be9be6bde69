import numpy as np
import pytest
from fractions import Fraction

from src.rvl.errors import ParseError, UnknownSymbolError
from src.rvl.expr import Const, FunctionSymbol, X, is_zero
from src.rvl.services.numeric import ConstantCoefficient, SymbolicCoefficient, TabulatedCoefficient, Trajectory
from src.rvl.utilities import load_alphas, load_binding, load_operator, write_trajectory_csv


class TestLoadAlphas:
    def test_valid_table(self, tmp_path):
        path = tmp_path / "alphas.txt"
        path.write_text("# Riccati with constant a0\na0 = 1/2\na1 = (* 2 (fn a2))   # trailing comment\n\n")
        table = load_alphas(str(path))
        assert table["a0"] == Const(Fraction(1, 2))
        assert is_zero(table["a1"] - 2 * FunctionSymbol("a2"))

    def test_not_an_alpha(self, tmp_path):
        path = tmp_path / "alphas.txt"
        path.write_text("b1 = 1\n")
        with pytest.raises(ParseError):
            load_alphas(str(path))

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "alphas.txt"
        path.write_text("a0 1\n")
        with pytest.raises(ParseError):
            load_alphas(str(path))

    def test_unknown_symbol(self, tmp_path):
        path = tmp_path / "alphas.txt"
        path.write_text("a0 = (fn u)\n")
        with pytest.raises(UnknownSymbolError):
            load_alphas(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_alphas(str(tmp_path / "missing.txt"))


class TestLoadBinding:
    def test_all_kinds(self, tmp_path):
        (tmp_path / "a1.csv").write_text("x, value\n0, 0\n0.5, 1\n1, 2\n")
        path = tmp_path / "binding.txt"
        path.write_text("a0 = const 0.25\na1 = table a1.csv\na2 = expr (* 3 x)\n")
        binding = load_binding(str(path))
        assert isinstance(binding.entries["a0"], ConstantCoefficient)
        assert isinstance(binding.entries["a1"], TabulatedCoefficient)
        assert isinstance(binding.entries["a2"], SymbolicCoefficient)
        assert binding.at("a0", 0, 0.3) == pytest.approx(0.25)
        assert binding.at("a1", 0, 0.25) == pytest.approx(0.5)
        assert binding.at("a2", 0, 2.0) == pytest.approx(6.0)

    def test_table_without_header(self, tmp_path):
        (tmp_path / "t.csv").write_text("0, 1\n1, 1\n2, 1\n")
        path = tmp_path / "binding.txt"
        path.write_text("a0 = table t.csv\n")
        assert load_binding(str(path)).at("a0", 0, 1.5) == pytest.approx(1.0)

    def test_unknown_kind(self, tmp_path):
        path = tmp_path / "binding.txt"
        path.write_text("a0 = spline 1 2 3\n")
        with pytest.raises(ParseError):
            load_binding(str(path))

    def test_bad_constant(self, tmp_path):
        path = tmp_path / "binding.txt"
        path.write_text("a0 = const one\n")
        with pytest.raises(ParseError):
            load_binding(str(path))


class TestLoadOperator:
    def test_yaml_operator(self, tmp_path):
        path = tmp_path / "op.yaml"
        path.write_text("variable: y\ncoefficients:\n  - '1'\n  - '0'\n  - x\n")
        op = load_operator(str(path))
        assert op.order == 2
        assert op.coeffs[2] == X

    def test_too_few_coefficients(self, tmp_path):
        path = tmp_path / "op.yaml"
        path.write_text("coefficients: ['1']\n")
        with pytest.raises(ParseError):
            load_operator(str(path))


class TestWriteTrajectory:
    def test_header_and_rows(self, tmp_path):
        grid = np.linspace(0.0, 1.0, 5)
        traj = Trajectory.from_samples("w", grid, [grid, np.ones_like(grid)])
        path = write_trajectory_csv(traj, str(tmp_path / "out" / "traj.csv"))
        lines = path.read_text().splitlines()
        assert lines[0] == "x, v0, v1"
        assert len(lines) == 6
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert np.allclose(data[:, 0], grid)
        assert np.allclose(data[:, 2], 1.0)
