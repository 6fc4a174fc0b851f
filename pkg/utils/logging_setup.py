import sys

from loguru import logger


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """
    Route all log output to the error stream.

    Args:
        verbose (bool): Emit debug messages
        quiet (bool): Only emit warnings and errors
    """
    level = "INFO"
    if verbose:
        level = "DEBUG"
    elif quiet:
        level = "WARNING"

    logger.remove()
    logger.add(
        sys.stderr,
        level=level,
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {message}",
    )
