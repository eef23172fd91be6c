from geoscale._logger import class_logger


class LineIO:
    """Generic line-oriented file object."""

    closed = None

    def __init__(self) -> None:
        self.log = class_logger(self)
        self.closed = True
