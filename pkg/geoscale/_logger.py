"""Package logger; silent until configured."""

import logging

module_name = "geoscale"
logger = logging.getLogger(module_name)
logger.addHandler(logging.NullHandler())

_format = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def use_basic_config(level=logging.INFO, format=_format) -> None:
    """Send package log messages to stderr.

    Nothing is shown by default. Calling this shows the per-stage counts
    and timings of detection runs. ``level`` is a number or a level name
    such as "DEBUG"; calling again only changes the level.
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            raise ValueError(f"invalid log level: {level!r}")
    logger.setLevel(level)
    if not any(h.name == module_name for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.name = module_name
        handler.setFormatter(logging.Formatter(format))
        logger.addHandler(handler)


def class_logger(obj) -> logging.Logger:
    """Return a logger named after the class of obj, sharing our handlers."""
    log = logging.getLogger(obj.__class__.__name__)
    log.handlers = logger.handlers
    log.setLevel(logger.level)
    return log
