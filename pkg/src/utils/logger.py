"""Logger module for TensorMLTI"""

import logging
from datetime import datetime
from pathlib import Path
from typing import Optional

import colorlog

ROOT_LOGGER = "src"

FMT = "%(asctime)s | %(levelname)-8s | %(name)s:%(lineno)d | %(message)s"
DATE_FMT = "%Y-%m-%d %H:%M:%S"


class ColorFormatter(colorlog.ColoredFormatter):
    """Console formatter with per-level colours"""

    def __init__(self):
        super().__init__(
            "%(log_color)s" + FMT,
            DATE_FMT,
            log_colors={
                "DEBUG": "cyan",
                "INFO": "green",
                "WARNING": "yellow",
                "ERROR": "red",
                "CRITICAL": "red,bg_white",
            },
        )


def setup_logger(
    name: str = ROOT_LOGGER, level: str = "INFO", log_dir: Optional[str] = None
) -> logging.Logger:
    """Setup logger with console and optional file handlers"""

    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    # repeated CLI invocations in one process must not stack handlers
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console_handler = logging.StreamHandler()
    console_handler.setLevel(level.upper())
    console_handler.setFormatter(ColorFormatter())
    logger.addHandler(console_handler)

    if log_dir:
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        file_handler = logging.FileHandler(log_path / f"mlti_{timestamp}.log", encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(FMT, DATE_FMT))
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger
