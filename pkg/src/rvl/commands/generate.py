from ..expr import render
from ..services.chain import build_chain_equation
from ..settings import RvlSettings
from ..types import CommandReport, RunConfig
from .common import alphas_for, check_order, failure


class GenerateCommand:
    def __init__(self, settings: RvlSettings):
        self.settings = settings

    def __call__(self, config: RunConfig) -> CommandReport:
        return self.generate(config)

    def generate(self, config: RunConfig) -> CommandReport:
        try:
            check_order(config.order, self.settings)
            eq = build_chain_equation(config.order, alphas_for(config.order, config.alphas_path))
            return CommandReport(text=f"{render(eq.lhs, config.format)} = 0")
        except Exception as e:
            return failure(e)
