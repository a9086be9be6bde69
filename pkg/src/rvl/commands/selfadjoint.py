from typing import List, Optional

from ..errors import ArityError
from ..expr import render
from ..services.selfadjoint import (
    adjoint, fourth_order_condition_residuals, is_self_adjoint, lagrange_identity_check, recurrence_audit,
)
from ..settings import RvlSettings
from ..types import CommandReport, RunConfig
from ..utilities import load_operator
from .common import failure


class SelfAdjointCommand:
    def __init__(self, settings: RvlSettings):
        self.settings = settings

    def __call__(
        self,
        config: RunConfig,
        operator_path: Optional[str] = None,
        recurrence: Optional[int] = None,
        forms: tuple[str, ...] = ("recurrence", "closed"),
    ) -> CommandReport:
        return self.check(config, operator_path, recurrence, forms)

    def _operator_lines(self, operator_path: str, fmt: str) -> List[str]:
        op = load_operator(operator_path)
        self_adjoint = is_self_adjoint(op)
        lines = [
            f"operator: {render(op.apply(), fmt)}",
            f"self-adjoint: {'yes' if self_adjoint else 'no'}",
            f"lagrange identity: {'yes' if lagrange_identity_check(op) else 'no'}",
        ]
        if not self_adjoint:
            lines.append(f"adjoint: {render(adjoint(op).apply(), fmt)}")
        if op.order == 4:
            for label, residual in fourth_order_condition_residuals(op).items():
                lines.append(f"{label}: {render(residual, 'sexpr')}")
        return lines

    def check(
        self,
        config: RunConfig,
        operator_path: Optional[str] = None,
        recurrence: Optional[int] = None,
        forms: tuple[str, ...] = ("recurrence", "closed"),
    ) -> CommandReport:
        try:
            if operator_path is None and recurrence is None:
                raise ArityError("selfadjoint needs an operator file or --recurrence n=K")
            lines: List[str] = []
            if operator_path is not None:
                lines.extend(self._operator_lines(operator_path, config.format))
            if recurrence is not None:
                if recurrence < 1 or 2 * recurrence > self.settings.RVL_MAX_ORDER + 1:
                    raise ArityError(f"n={recurrence} is outside 1..{(self.settings.RVL_MAX_ORDER + 1) // 2}")
                for form in forms:
                    report = recurrence_audit(recurrence, form)
                    lines.append(f"form: {form} (n={recurrence})")
                    lines.extend(report.lines())
            return CommandReport(text="\n".join(lines))
        except Exception as e:
            return failure(e)
