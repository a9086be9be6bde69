from ..expr import is_zero, render
from ..services.chain import build_chain_equation, delinearize, linearization_certificate, linearize
from ..settings import RvlSettings
from ..types import CommandReport, RunConfig
from .common import alphas_for, check_order, failure


class LinearizeCommand:
    def __init__(self, settings: RvlSettings):
        self.settings = settings

    def __call__(self, config: RunConfig, round_trip: bool = False) -> CommandReport:
        return self.linearize(config, round_trip)

    def linearize(self, config: RunConfig, round_trip: bool = False) -> CommandReport:
        try:
            check_order(config.order, self.settings)
            eq = build_chain_equation(config.order, alphas_for(config.order, config.alphas_path))
            op = linearize(eq)
            lines = [f"{render(op.apply(), config.format)} = 0"]
            if not round_trip:
                return CommandReport(text="\n".join(lines))

            certificate = linearization_certificate(eq)
            restored = delinearize(op)
            lines.append(f"certificate: {render(certificate, 'sexpr')}")
            lines.append(f"round-trip: {'yes' if is_zero(restored.lhs - eq.lhs) else 'no'}")
            ok = is_zero(certificate) and is_zero(restored.lhs - eq.lhs)
            return CommandReport(text="\n".join(lines), exit_code=0 if ok else 4)
        except Exception as e:
            return failure(e)
