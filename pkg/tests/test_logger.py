import logging

import pytest

from geoscale._logger import class_logger, logger, module_name, use_basic_config


class Probe:
    pass


def test_use_basic_config():
    use_basic_config("debug")
    use_basic_config(logging.WARNING)
    named = [h for h in logger.handlers if h.name == module_name]
    assert len(named) == 1
    assert logger.level == logging.WARNING
    log = class_logger(Probe())
    assert log.name == "Probe"
    assert log.level == logging.WARNING
    assert log.handlers is logger.handlers
    with pytest.raises(ValueError, match="invalid log level"):
        use_basic_config("loud")
    logger.removeHandler(named[0])
    logger.setLevel(logging.NOTSET)
