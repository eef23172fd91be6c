"""Line readers for record corpora and flat config files."""

import json

import pandas as pd

from geoscale.detect.base import ConfigError, InputParseError
from geoscale.detect.record import Record

from . import LineIO

__all__ = ["conv", "conv_list", "LineReader", "RecordReader", "ConfigReader"]

_true_words = frozenset(("t", "true", "yes", "on", "1"))
_false_words = frozenset(("f", "false", "no", "off", "0"))


def _to_bool(item):
    word = item.lower()
    if word in _true_words:
        return True
    if word in _false_words:
        return False
    raise ValueError(word)


# format code -> converter of a stripped, non-blank item
_converters = {"s": str, "i": int, "f": float, "b": _to_bool}


def conv(item, fmt, on_blank=None):
    """Convert a config value to a Python value.

    Parameters
    ----------
    item : str
        Raw value text; surrounding blanks are ignored.
    fmt : str
        One letter: 's' for string, 'i' for int, 'f' for float, or 'b'
        for bool (true/false, yes/no, on/off, 1/0).
    on_blank : None, or a default value
        Returned (converted with fmt) when item is blank; None otherwise.

    Raises
    ------
    ValueError
        If fmt is unknown or item cannot be converted.

    """
    try:
        convert = _converters[fmt]
    except KeyError:
        raise ValueError(f"unknown format code {fmt!r}") from None
    item = item.strip()
    if item == "":
        if on_blank is None:
            return None
        item = str(on_blank).strip()
    try:
        return convert(item)
    except ValueError:
        raise ValueError(f"cannot convert {item!r} to fmt code {fmt!r}") from None


def conv_list(item, fmt):
    """Convert a comma separated item; fmt may end with '*'.

    A blank item gives an empty tuple.
    """
    fmt = fmt.rstrip("*")
    return tuple(
        conv(part, fmt) for part in item.split(",") if part.strip() != ""
    )


class LineReader(LineIO):
    """Reader over the lines of a UTF-8 file, tracking the line number.

    ``fname`` may be a path or an open text file object.
    """

    lines = None  # raw lines, newlines kept
    lineno = None  # 1-based number of the line being parsed; 0 before

    def __init__(self, fname) -> None:
        LineIO.__init__(self)
        if hasattr(fname, "upper") or hasattr(fname, "__fspath__"):
            with open(fname, encoding="utf-8") as fp:
                self.lines = fp.readlines()
            self.fname = str(fname)
        elif hasattr(fname, "readlines"):
            self.lines = fname.readlines()
            self.fname = getattr(fname, "name", None)
        else:
            raise TypeError(
                f"'fname' does not appear to be a file name or object: {fname!r}",
            )
        self.log.debug("%d lines from %s", len(self.lines), self.fname or "stream")
        self.lineno = 0
        self.closed = False

    def __len__(self) -> int:
        return len(self.lines)

    def content_lines(self, comment=None):
        """Yield stripped non-blank lines, setting lineno as it goes.

        Text after the comment character, if given, is discarded.
        """
        for self.lineno, line in enumerate(self.lines, start=1):
            if comment is not None:
                line = line.split(comment, 1)[0]
            line = line.strip()
            if line:
                yield line

    def error(self, msg):
        """InputParseError located at the current line."""
        return InputParseError(msg, lineno=self.lineno, fname=self.fname)


def parse_timestamp(value) -> float:
    """Seconds since the epoch from a number or an ISO-8601 string.

    Strings without a zone are taken as UTC.
    """
    if isinstance(value, bool):
        raise ValueError(f"invalid 'ts': {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValueError(f"invalid 'ts': {value!r}")
    ts = pd.Timestamp(value)
    if ts.tzinfo is None:
        ts = ts.tz_localize("UTC")
    return float(ts.tz_convert("UTC").value // 10**9)


class RecordReader(LineReader):
    """JSON-lines corpus reader.

    Each non-blank line is an object with keys id, user, ts, lat, lon and
    text. ``ts`` is epoch seconds or an ISO-8601 string.

    Examples
    --------
    >>> from io import StringIO
    >>> line = '{"id": "1", "user": "u", "ts": 0, "lat": 1, "lon": 2, "text": "a"}'
    >>> RecordReader(StringIO(line)).read()[0].lat
    1.0

    """

    _required = ("id", "user", "ts", "lat", "lon", "text")

    def read(self) -> list:
        records = [self._parse(line) for line in self.content_lines()]
        self.log.info("read %d records from %d lines", len(records), len(self))
        return records

    def _parse(self, line) -> Record:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise self.error(f"malformed JSON: {err.msg}") from err
        if not isinstance(obj, dict):
            raise self.error(f"expected an object, found {type(obj).__name__}")
        missing = [k for k in self._required if k not in obj]
        if missing:
            raise self.error(f"missing keys: {', '.join(missing)}")
        try:
            lat = float(obj["lat"])
            lon = float(obj["lon"])
            if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                raise ValueError(f"invalid 'lat, lon': {(lat, lon)!r}")
            timestamp = parse_timestamp(obj["ts"])
        except (TypeError, ValueError) as err:
            raise self.error(str(err)) from err
        text = obj["text"]
        if not isinstance(text, str):
            raise self.error(f"invalid 'text': {text!r}")
        return Record(
            id=str(obj["id"]),
            user=str(obj["user"]),
            timestamp=timestamp,
            lat=lat,
            lon=lon,
            text=text,
        )


class ConfigReader(LineReader):
    """Flat ``key = value`` reader; '#' starts a comment."""

    def read(self, formats) -> dict:
        """Read and convert values.

        Parameters
        ----------
        formats : dict
            key -> conv format code; a trailing '*' marks a list.

        Raises
        ------
        ConfigError
            For unknown keys, lines without '=' or values that do not
            convert.

        """
        values = {}
        for line in self.content_lines(comment="#"):
            where = f"{self.fname or '<config>'}:line {self.lineno}"
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep:
                raise ConfigError(f"{where}: expected 'key = value', found {line!r}")
            if key not in formats:
                raise ConfigError(f"{where}: unknown config key {key!r}")
            fmt = formats[key]
            try:
                if fmt.endswith("*"):
                    values[key] = conv_list(value, fmt)
                else:
                    values[key] = conv(value, fmt)
            except ValueError as err:
                raise ConfigError(f"{where}: {key}: {err}") from err
            self.log.debug("%s: %s = %r", where, key, values[key])
        return values
