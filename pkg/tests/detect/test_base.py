import threading
import time

import pytest

from geoscale.detect.base import ConfigError, InputParseError, map_workers


def test_map_workers_order():
    def slow_square(x):
        # later items finish first
        time.sleep(0.002 * (10 - x))
        return x * x

    expected = [x * x for x in range(10)]
    assert map_workers(slow_square, range(10)) == expected
    assert map_workers(slow_square, range(10), threads=4) == expected
    assert map_workers(slow_square, [], threads=4) == []


def test_map_workers_threads():
    seen = set()

    def record(x):
        seen.add(threading.get_ident())
        time.sleep(0.01)
        return x

    map_workers(record, range(8), threads=1)
    assert seen == {threading.get_ident()}
    with pytest.raises(ZeroDivisionError):
        map_workers(lambda x: 1 / x, [1, 0, 2], threads=2)


def test_errors():
    err = InputParseError("missing 'text'", lineno=3, fname="a.jsonl")
    assert str(err) == "a.jsonl:line 3: missing 'text'"
    assert isinstance(ConfigError("x"), ValueError)
