# app/logging_config.py

import logging

from app.config import get_settings

logger = logging.getLogger("test_spaces")

if not logger.handlers:
    _handler = logging.StreamHandler()
    _handler.setFormatter(logging.Formatter("%(asctime)s %(name)s %(levelname)s %(message)s"))
    logger.addHandler(_handler)
    logger.setLevel(get_settings().log_level.upper())
    logger.propagate = False


def get_logger(name: str) -> logging.Logger:
    """Returns a child of the package logger, e.g. get_logger('polytope')."""
    return logger.getChild(name)
