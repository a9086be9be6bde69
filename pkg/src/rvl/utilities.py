import re
from pathlib import Path
from typing import Dict

import numpy as np
import yaml

from .errors import ParseError
from .expr import DEFAULT_SYMBOLS, Expr, SymbolTable, parse
from .log import logger
from .services.numeric import (
    CoefficientBinding, ConstantCoefficient, SymbolicCoefficient, TabulatedCoefficient, Trajectory,
)
from .types import LinearOperator


_ASSIGNMENT = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+?)\s*$")


def _assignments(path: Path):
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = _ASSIGNMENT.match(line)
        if match is None:
            raise ParseError(f"{path}:{number}: expected 'NAME = value'", 0)
        yield number, match.group(1), match.group(2)


def load_alphas(alphas_filepath: str, symbols: SymbolTable = DEFAULT_SYMBOLS) -> Dict[str, Expr]:
    """Alpha table with lines `aJ = <sexpr>`."""
    path = Path(alphas_filepath)
    if not path.exists():
        raise FileNotFoundError(f"Alpha table not found: {alphas_filepath}")
    table: Dict[str, Expr] = {}
    for number, name, text in _assignments(path):
        if not re.fullmatch(r"a\d+", name):
            raise ParseError(f"{path}:{number}: '{name}' is not an alpha (a0, a1, ...)", 0)
        try:
            table[name] = parse(text, symbols)
        except ParseError as e:
            logger.error(f"Error in alpha table {path} line {number}: {e}")
            raise
    logger.info(f"Loaded {len(table)} alpha bindings from {path}")
    return table


def load_table(table_filepath: Path) -> TabulatedCoefficient:
    """Two-column CSV `x, value`; a non-numeric first line is a header."""
    first = table_filepath.read_text(encoding="utf-8").splitlines()[0]
    header = not re.match(r"^\s*[-+.\d]", first)
    data = np.loadtxt(table_filepath, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    if data.shape[1] != 2 or data.shape[0] < 3:
        raise ParseError(f"{table_filepath}: expected at least three rows of 'x, value'", 0)
    return TabulatedCoefficient(x=data[:, 0], values=data[:, 1])


def load_binding(binding_filepath: str, symbols: SymbolTable = DEFAULT_SYMBOLS) -> CoefficientBinding:
    """Binding file with lines `NAME = const <decimal>`, `NAME = table <csv>` or `NAME = expr <sexpr>`."""
    path = Path(binding_filepath)
    if not path.exists():
        raise FileNotFoundError(f"Binding file not found: {binding_filepath}")
    entries = {}
    for number, name, text in _assignments(path):
        kind, _, value = text.partition(" ")
        value = value.strip()
        match kind:
            case "const":
                try:
                    entries[name] = ConstantCoefficient(value=float(value))
                except ValueError as e:
                    raise ParseError(f"{path}:{number}: not a decimal: '{value}'", 0) from e
            case "table":
                entries[name] = load_table(path.parent / value)
            case "expr":
                entries[name] = SymbolicCoefficient(expr=parse(value, symbols))
            case _:
                raise ParseError(f"{path}:{number}: unknown binding kind '{kind}' (const, table or expr)", 0)
    return CoefficientBinding(entries=entries)


def load_operator(operator_filepath: str, symbols: SymbolTable = DEFAULT_SYMBOLS) -> LinearOperator:
    """YAML operator file: `variable: y` and `coefficients: [<sexpr>, ...]`, r0 first."""
    path = Path(operator_filepath)
    if not path.exists():
        raise FileNotFoundError(f"Operator file not found: {operator_filepath}")
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    variable = str(data.get("variable", "y"))
    coefficients = data.get("coefficients")
    if not isinstance(coefficients, list) or len(coefficients) < 2:
        raise ParseError(f"{path}: 'coefficients' must list at least r0 and r1", 0)
    return LinearOperator(coeffs=[parse(str(c), symbols) for c in coefficients], variable=variable)


def write_trajectory_csv(traj: Trajectory, out_filepath: str) -> Path:
    """CSV with header `x, v0, v1, ...`, one row per grid point."""
    path = Path(out_filepath)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ", ".join(["x"] + [f"v{k}" for k in range(traj.order)])
    rows = np.column_stack([traj.grid, traj.values])
    np.savetxt(path, rows, delimiter=", ", header=header, comments="", fmt="%.12e")
    logger.info(f"Trajectory with {len(traj.grid)} samples written to {path}")
    return path
