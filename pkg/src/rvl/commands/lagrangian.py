from typing import List

from ..errors import PolicyRefusal
from ..expr import from_potential, render, to_potential
from ..log import logger
from ..services.chain import build_chain_equation
from ..services.lagrangian import (
    POTENTIAL, general_odd_lagrangian, reduce_gauge, riccati3_lagrangian, riccati_lagrangian, same_dynamics,
    verify_eom,
)
from ..settings import RvlSettings
from ..types import CommandReport, Lagrangian, RunConfig
from .common import alphas_for, check_order, failure


class LagrangianCommand:
    def __init__(self, settings: RvlSettings):
        self.settings = settings

    def __call__(self, config: RunConfig, reduce: bool = False) -> CommandReport:
        return self.build(config, reduce)

    def _lagrangian(self, order: int, alphas) -> Lagrangian:
        if order % 2 == 0:
            raise PolicyRefusal(
                f"Order {order} is even: Lagrangians are built only for odd-order chain equations, "
                f"whose linear counterparts have even order"
            )
        if order == 1:
            return riccati_lagrangian(alphas)
        if order == 3:
            return riccati3_lagrangian(alphas)
        return general_odd_lagrangian((order + 1) // 2, alphas)

    def _reduced_lines(self, lagrangian: Lagrangian, fmt: str) -> List[str]:
        name = lagrangian.variable
        in_potential = Lagrangian.of(to_potential(lagrangian.expr, name, POTENTIAL), POTENTIAL)
        reduced = reduce_gauge(in_potential)
        unchanged = same_dynamics(in_potential, reduced)
        return [
            f"reduced: {render(from_potential(reduced.expr, name, POTENTIAL), fmt)}",
            f"gauge: order {in_potential.order} -> {reduced.order} in {POTENTIAL}, "
            f"dynamics {'unchanged' if unchanged else 'CHANGED'}",
        ]

    def build(self, config: RunConfig, reduce: bool = False) -> CommandReport:
        try:
            check_order(config.order, self.settings)
            alphas = alphas_for(config.order, config.alphas_path)
            lagrangian = self._lagrangian(config.order, alphas)
            lines = [f"L = {render(lagrangian.expr, config.format)}"]
            if reduce:
                lines.extend(self._reduced_lines(lagrangian, config.format))

            verification = verify_eom(lagrangian, build_chain_equation(config.order, alphas).lhs)
            lines.append(f"verified: {'yes' if verification.verified else 'no'}")
            lines.extend(verification.lines())
            if verification.verified or lagrangian.waived:
                return CommandReport(text="\n".join(lines))
            logger.error(f"Euler-Lagrange expression of the order-{config.order} Lagrangian does not match the chain equation")
            return CommandReport(text="\n".join(lines), exit_code=4)
        except Exception as e:
            return failure(e)
