import logging
import os
import sys


class LevelFormatter(logging.Formatter):
    """`HH:MM:SS │ LEVEL │ message`, the level tinted when stderr is a terminal."""

    TINTS = {
        logging.DEBUG: '\033[2m',
        logging.INFO: '\033[32m',
        logging.WARNING: '\033[33m',
        logging.ERROR: '\033[1;31m',
        logging.CRITICAL: '\033[1;35m',
    }
    RESET = '\033[0m'

    def __init__(self, tinted: bool):
        super().__init__('%(asctime)s │ %(tag)s │ %(message)s', datefmt='%H:%M:%S')
        self.tinted = tinted

    def format(self, record: logging.LogRecord) -> str:
        tag = f"{record.levelname:<8}"
        if self.tinted:
            tag = f"{self.TINTS.get(record.levelno, '')}{tag}{self.RESET}"
        record.tag = tag
        return super().format(record)


def _tinted(stream) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def configure_logging(level: str = "INFO") -> None:
    """Apply RVL_LOG_LEVEL; unknown names fall back to INFO with a warning."""
    resolved = logging.getLevelName(level.upper())
    if not isinstance(resolved, int):
        logger.setLevel(logging.INFO)
        logger.warning(f"Unknown log level '{level}', using INFO")
        return
    logger.setLevel(resolved)


handler = logging.StreamHandler(sys.stderr)
handler.setFormatter(LevelFormatter(tinted=_tinted(sys.stderr)))

logger = logging.getLogger('rvl')
logger.setLevel(logging.INFO)
logger.addHandler(handler)
logger.propagate = False
