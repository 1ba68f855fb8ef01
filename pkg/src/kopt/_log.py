import logging

from rich.console import Console
from rich.logging import RichHandler

_ROOT = "kopt"


def configure_logging(level: str | int = "WARNING") -> logging.Logger:
    """Route the package's log records to a rich handler on stderr.

    Calling this again only changes the level; it never stacks handlers.
    """
    logger = logging.getLogger(_ROOT)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(
            console=Console(stderr=True),
            show_path=False,
            rich_tracebacks=True,
        )
        handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
        logger.addHandler(handler)
    logger.setLevel(level.upper() if isinstance(level, str) else level)
    logger.propagate = False
    return logger
