"""Logging configuration."""

import logging
import sys
from pathlib import Path
from typing import List, Optional

FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DATEFMT = "%Y-%m-%d %H:%M:%S"
PACKAGE = "wdckit"


def setup_logging(
    verbose: bool = False,
    log_file: Optional[Path] = None,
) -> None:
    """
    Configure logging for the command-line tool.

    The package logger runs at DEBUG with verbose, INFO otherwise; everything
    else stays at WARNING. Numeric RuntimeWarnings from numpy and scipy are
    routed through the "py.warnings" logger.

    Args:
        verbose: Enable DEBUG level logging for wdckit modules.
        log_file: Optional file path for logging.
    """
    formatter = logging.Formatter(FORMAT, DATEFMT)
    handlers: List[logging.Handler] = []

    # reports own stdout
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    handlers.append(console_handler)

    if log_file:
        log_file = Path(log_file).expanduser()
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    logging.basicConfig(level=logging.WARNING, handlers=handlers, force=True)
    logging.getLogger(PACKAGE).setLevel(logging.DEBUG if verbose else logging.INFO)
    logging.captureWarnings(True)

    for noisy in ("matplotlib", "PIL"):
        logging.getLogger(noisy).setLevel(logging.WARNING)
