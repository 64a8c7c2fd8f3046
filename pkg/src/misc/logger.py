import sys

from loguru import logger

LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan> - {message}"


def setup_logging(level: str = "WARNING") -> None:
    """
    Route diagnostics to stderr at the requested level.

    Args:
        level: loguru level name (DEBUG, INFO, WARNING, ...)
    """
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)
