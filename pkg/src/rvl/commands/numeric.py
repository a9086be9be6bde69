from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from ..errors import ArityError, BlowUpError, PolicyRefusal
from ..log import logger
from ..services.chain import build_chain_equation, linearize
from ..services.lagrangian import (
    ansatz_lagrangian, general_odd_lagrangian, riccati3_lagrangian, riccati_lagrangian,
)
from ..services.numeric import (
    CoefficientBinding, Trajectory, cole_hopf_consistency, convergence_order, first_variation_residual,
    integrate, polynomial_bump, uniform_grid,
)
from ..services.selfadjoint import second_order_multiplier
from ..settings import RvlSettings
from ..types import CommandReport, Lagrangian, RunConfig
from ..utilities import load_binding, write_trajectory_csv
from .common import check_order, failure


Subcommand = Literal["riccati", "colehopf", "variation"]


class NumericCommand:
    def __init__(self, settings: RvlSettings):
        self.settings = settings

    def __call__(
        self,
        config: RunConfig,
        subcommand: Subcommand,
        constants: Optional[Dict[str, float]] = None,
        init: Optional[Sequence[float]] = None,
        at: Optional[float] = None,
        form: Literal["riccati", "linear"] = "riccati",
        perturb: float = 0.0,
        convergence: bool = False,
    ) -> CommandReport:
        try:
            check_order(config.order, self.settings)
            binding = self._binding(config, constants or {})
            match subcommand:
                case "riccati":
                    return self.riccati(config, binding, init, at, convergence)
                case "colehopf":
                    return self.colehopf(config, binding, init)
                case "variation":
                    return self.variation(config, binding, init, form, perturb)
                case _:
                    raise ArityError(f"Unknown numeric subcommand '{subcommand}'")
        except Exception as e:
            return failure(e)

    def _binding(self, config: RunConfig, constants: Dict[str, float]) -> CoefficientBinding:
        """Alphas default to 0 and the integration constant a to 1; options and then the binding file override."""
        names = [f"a{j}" for j in range(config.order + 1)]
        unknown = sorted(set(constants) - set(names))
        if unknown:
            raise ArityError(f"Order {config.order} has alphas {', '.join(names)}; got {', '.join(unknown)}")
        values = {name: 0.0 for name in names} | {"a": 1.0} | constants
        binding = CoefficientBinding.constants(**values)
        if config.alphas_path:
            binding = binding.merged(load_binding(config.alphas_path))
        return binding

    def _grid(self, config: RunConfig, step: Optional[float] = None) -> np.ndarray:
        start, stop = config.x_range
        return uniform_grid(start, stop, step or config.step)

    def _init(self, init: Optional[Sequence[float]], count: int, default: Sequence[float]) -> List[float]:
        if init is None:
            return list(default)
        if len(init) != count:
            raise ArityError(f"--init needs {count} values, got {len(init)}")
        return list(init)

    def _finish(self, lines: List[str], traj: Trajectory, config: RunConfig, exit_code: int = 0) -> CommandReport:
        if config.out:
            path = write_trajectory_csv(traj, config.out)
            lines.append(f"csv: {path}")
        if traj.truncated:
            lines.extend(f"event: {event}" for event in traj.events)
            error = BlowUpError(traj.events[0])
            logger.error(f"Numeric run truncated: {error}")
            return CommandReport(text="\n".join(lines), exit_code=error.exit_code)
        return CommandReport(text="\n".join(lines), exit_code=exit_code)

    def riccati(
        self,
        config: RunConfig,
        binding: CoefficientBinding,
        init: Optional[Sequence[float]],
        at: Optional[float],
        convergence: bool,
    ) -> CommandReport:
        eq = build_chain_equation(config.order)
        start = self._init(init, config.order, [0.0] * config.order)

        def run(step: Optional[float] = None) -> Trajectory:
            return integrate(
                eq.lhs, eq.variable, binding, start, self._grid(config, step), self.settings.RVL_BLOWUP_THRESHOLD,
            )

        traj = run()
        name = eq.variable
        lines = [f"steps: {len(traj.grid) - 1}", f"{name}({traj.grid[-1]:.6g}) = {traj.jet(0)[-1]:.12g}"]
        if at is not None:
            if not traj.grid[0] <= at <= traj.grid[-1]:
                raise ArityError(f"--at {at} lies outside the integrated range [{traj.grid[0]:.6g}, {traj.grid[-1]:.6g}]")
            lines.append(f"{name}({at:.6g}) = {traj.value_at(at):.12g}")
        if convergence and not traj.truncated:
            target = traj.grid[-1]
            observed = convergence_order(lambda h: run(h).value_at(target), config.step)
            lines.append(f"convergence order: {observed:.2f}")
        return self._finish(lines, traj, config)

    def colehopf(self, config: RunConfig, binding: CoefficientBinding, init: Optional[Sequence[float]]) -> CommandReport:
        op = linearize(build_chain_equation(config.order))
        start = self._init(init, op.order, [1.0] + [0.0] * (op.order - 1))
        y_traj = integrate(
            op.apply(), op.variable, binding, start, self._grid(config), self.settings.RVL_BLOWUP_THRESHOLD,
        )
        if y_traj.truncated:
            return self._finish([f"steps: {len(y_traj.grid) - 1}"], y_traj, config)

        report = cole_hopf_consistency(
            y_traj, op, binding, self.settings.RVL_WINDOW_THRESHOLD, self.settings.RVL_BLOWUP_THRESHOLD,
        )
        passed = report.deviation < self.settings.RVL_CONSISTENCY_TOLERANCE
        lines = [
            f"window: [{report.window[0]:.6g}, {report.window[1]:.6g}]",
            f"deviation: {report.deviation:.3e}",
            f"verdict: {'PASS' if passed else 'FAIL'}",
        ]
        return self._finish(lines, report.omega, config, exit_code=0 if passed else 4)

    def _variation_pair(self, order: int, form: str) -> Tuple[Lagrangian, str, Sequence[float]]:
        """Lagrangian, the variable integrated for it, and default initial data."""
        if order % 2 == 0:
            raise PolicyRefusal(f"Order {order} is even: no Lagrangian is built for it")
        eq = build_chain_equation(order)
        if form == "linear":
            op = linearize(eq)
            if order == 1:
                op = op.scale(second_order_multiplier(eq.alphas[1]))
            return ansatz_lagrangian(op, waive=True), op.variable, [1.0] + [0.0] * order
        if order == 1:
            lagrangian = riccati_lagrangian()
        elif order == 3:
            lagrangian = riccati3_lagrangian()
        else:
            lagrangian = general_odd_lagrangian((order + 1) // 2)
        return lagrangian, eq.variable, [0.0] * order

    def _with_drift(self, traj: Trajectory, perturb: float) -> Trajectory:
        """v + perturb*(x - x0): no longer a solution for perturb != 0."""
        columns = [traj.jet(k) for k in range(traj.order + 2)]
        columns[0] = columns[0] + perturb * (traj.grid - traj.grid[0])
        columns[1] = columns[1] + perturb
        return Trajectory.from_samples(traj.variable, traj.grid, columns)

    def variation(
        self,
        config: RunConfig,
        binding: CoefficientBinding,
        init: Optional[Sequence[float]],
        form: str,
        perturb: float,
    ) -> CommandReport:
        lagrangian, variable, default = self._variation_pair(config.order, form)
        if form == "linear":
            eq_expr = linearize(build_chain_equation(config.order)).apply()
        else:
            eq_expr = build_chain_equation(config.order).lhs
        start = self._init(init, len(default), default)
        traj = integrate(eq_expr, variable, binding, start, self._grid(config), self.settings.RVL_BLOWUP_THRESHOLD)
        if traj.truncated:
            return self._finish([f"steps: {len(traj.grid) - 1}"], traj, config)
        if perturb:
            logger.info(f"Adding the drift {perturb}*(x - x0) to the integrated {variable}")
            traj = self._with_drift(traj, perturb)

        span = traj.grid[-1] - traj.grid[0]
        bump = polynomial_bump(traj.grid[0] + span / 4, traj.grid[-1] - span / 4, smoothness=config.order + 2)
        ratio = first_variation_residual(lagrangian, binding, traj, bump, config.epsilon)
        passed = ratio < self.settings.RVL_STATIONARITY_TOLERANCE
        lines = [
            f"variable: {variable}",
            f"ratio: {ratio:.3e}",
            f"verdict: {'PASS' if passed else 'FAIL'}",
        ]
        return self._finish(lines, traj, config, exit_code=0 if passed else 4)
