from typing import List, Optional

from pydantic import ValidationError

from ..errors import OrderError, RvlError
from ..expr import Expr
from ..log import logger
from ..services.chain import bind_alphas
from ..settings import RvlSettings
from ..types import CommandReport
from ..utilities import load_alphas


def check_order(order: int, settings: RvlSettings) -> None:
    if order < 1:
        raise OrderError(f"--order must be a positive integer, got {order}")
    if order > settings.RVL_MAX_ORDER:
        raise OrderError(f"--order {order} exceeds RVL_MAX_ORDER={settings.RVL_MAX_ORDER}")
    if order > settings.RVL_WARN_ORDER:
        logger.warning(f"Order {order} is above {settings.RVL_WARN_ORDER}; term counts grow combinatorially")


def alphas_for(order: int, alphas_path: Optional[str]) -> List[Expr]:
    """Fully symbolic alphas, with the entries of an alpha table substituted in when given."""
    table = load_alphas(alphas_path) if alphas_path else None
    return bind_alphas(order, table)


def failure(error: Exception) -> CommandReport:
    if isinstance(error, RvlError):
        return CommandReport(text=f"error: {error}", exit_code=error.exit_code, error=True)
    if isinstance(error, (ValidationError, FileNotFoundError)):
        return CommandReport(text=f"error: {error}", exit_code=2, error=True)
    raise error
