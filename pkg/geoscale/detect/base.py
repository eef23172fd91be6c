"""Exceptions and the base class shared by detection components."""

import time
from concurrent.futures import ThreadPoolExecutor

from .._logger import class_logger

__all__ = [
    "GeoscaleError",
    "CorpusError",
    "ConfigError",
    "InputParseError",
    "Component",
    "map_workers",
]


class GeoscaleError(Exception):
    pass


class CorpusError(GeoscaleError, ValueError):
    pass


class ConfigError(GeoscaleError, ValueError):
    pass


class InputParseError(GeoscaleError, ValueError):
    """Raised when an input line cannot be parsed."""

    def __init__(self, msg, lineno=None, fname=None) -> None:
        self.lineno = lineno
        self.fname = fname
        location = ""
        if fname is not None:
            location += f"{fname}:"
        if lineno is not None:
            location += f"line {lineno}:"
        if location:
            msg = location + " " + msg
        GeoscaleError.__init__(self, msg)


class Component:
    """Base for stateful pipeline pieces with their own logger and timers."""

    def __init__(self) -> None:
        self._logger = class_logger(self)
        self.timings = {}

    def __repr__(self) -> str:
        return "<" + self.__class__.__name__ + ">"

    def _timed(self, stage, func, *args, **kwargs):
        """Run func and store its wall-clock time under stage."""
        start = time.perf_counter()
        result = func(*args, **kwargs)
        self.timings[stage] = time.perf_counter() - start
        self._logger.debug("%s: %.3f s", stage, self.timings[stage])
        return result


def map_workers(func, items, threads=1) -> list:
    """Apply func to each item with at most ``threads`` worker threads.

    Results keep the order of items, so output does not depend on the
    number of workers.
    """
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))
