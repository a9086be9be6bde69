# Command handlers behind the rvl CLI

from .generate import GenerateCommand
from .linearize import LinearizeCommand
from .selfadjoint import SelfAdjointCommand
from .lagrangian import LagrangianCommand
from .numeric import NumericCommand

__all__ = [
    "GenerateCommand",
    "LinearizeCommand",
    "SelfAdjointCommand",
    "LagrangianCommand",
    "NumericCommand"
]
