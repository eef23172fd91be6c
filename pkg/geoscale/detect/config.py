"""Detection configuration."""

from __future__ import annotations

import math

from .base import ConfigError
from .text import load_stop_words

__all__ = ["DetectionConfig"]


def _positive_float(name, value):
    try:
        value = float(value)
        assert math.isfinite(value) and value > 0
    except (TypeError, ValueError, AssertionError):
        raise ConfigError(f"invalid '{name}': {value!r}")
    return value


def _positive_int(name, value):
    try:
        assert not isinstance(value, bool)
        if isinstance(value, float):
            assert value.is_integer()
        value = int(value)
        assert value > 0
    except (TypeError, ValueError, AssertionError):
        raise ConfigError(f"invalid '{name}': {value!r}")
    return value


class DetectionConfig:
    """Parameters of both detectors, the term filter and post-processing.

    Values are validated on assignment and the object is frozen once
    constructed; use :meth:`replace` to derive a modified copy.

    Example:
    -------
    >>> cfg = DetectionConfig(T_t=15, n_scale=3)
    >>> cfg.replace(delta_d=200).delta_d
    200.0

    """

    # name -> conv format code; a trailing '*' marks a comma separated list
    _formats = {
        "T_t": "f",
        "T_d": "f",
        "delta_t": "f",
        "delta_d": "f",
        "n_scale": "i",
        "min_term_support": "i",
        "l_filter": "b",
        "l_filter_probes": "f*",
        "l_filter_threshold": "f",
        "min_cluster_records": "i",
        "min_cluster_users": "i",
        "max_single_user_fraction": "f",
        "blacklist_terms": "s*",
        "stop_words": "s*",
        "min_term_len": "i",
        "max_term_len": "i",
        "chi2_bins": "i",
        "chi2_alpha": "f",
        "envelope_sims": "i",
        "threads": "i",
    }

    _defaults = {
        "T_t": 30.0,
        "T_d": 100.0,
        "delta_t": 30.0,
        "delta_d": 100.0,
        "n_scale": 4,
        "min_term_support": 5,
        "l_filter": True,
        "l_filter_probes": (0.2, 0.4, 0.6, 0.8, 1.0),
        "l_filter_threshold": 0.5,
        "min_cluster_records": 3,
        "min_cluster_users": 3,
        "max_single_user_fraction": 0.5,
        "blacklist_terms": (),
        "stop_words": None,  # bundled list
        "min_term_len": 3,
        "max_term_len": 30,
        "chi2_bins": 12,
        "chi2_alpha": 0.05,
        "envelope_sims": 0,
        "threads": 1,
    }

    _frozen = False

    def __init__(self, **kwargs) -> None:
        unknown = set(kwargs) - set(self._formats)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)!r}")
        for name, default in self._defaults.items():
            setattr(self, name, kwargs.get(name, default))
        if self.min_term_len > self.max_term_len:
            raise ConfigError(
                f"invalid 'min_term_len': {self.min_term_len!r} "
                f"exceeds 'max_term_len' {self.max_term_len!r}",
            )
        self._frozen = True

    def __setattr__(self, name, value) -> None:
        if self._frozen and not name.startswith("_"):
            raise AttributeError(
                f"{self.__class__.__name__} is frozen; use replace({name}=...)",
            )
        object.__setattr__(self, name, value)

    def __repr__(self) -> str:
        changed = [
            f"{k}={getattr(self, k)!r}"
            for k in self._formats
            if k != "stop_words" and getattr(self, k) != self._defaults[k]
        ]
        return f"<{self.__class__.__name__}: {', '.join(changed) or 'defaults'}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DetectionConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def replace(self, **changes) -> DetectionConfig:
        """Return a validated copy with some values changed."""
        values = {k: getattr(self, k) for k in self._formats}
        values.update(changes)
        return self.__class__(**values)

    def to_dict(self) -> dict:
        """JSON-ready snapshot of every field."""
        res = {}
        for name, fmt in self._formats.items():
            value = getattr(self, name)
            if fmt.endswith("*"):
                value = sorted(value) if name == "stop_words" else list(value)
            res[name] = value
        return res

    @classmethod
    def from_file(cls, fname, **overrides) -> DetectionConfig:
        """Read a flat ``key = value`` file; overrides take precedence."""
        from ..io.textfile import ConfigReader

        values = ConfigReader(fname).read(cls._formats)
        values.update(overrides)
        return cls(**values)

    # locality thresholds of the baseline detector

    @property
    def T_t(self):
        """Temporal threshold in minutes."""
        return self._T_t

    @T_t.setter
    def T_t(self, value) -> None:
        self._T_t = _positive_float("T_t", value)

    @property
    def T_d(self):
        """Spatial threshold in meters."""
        return self._T_d

    @T_d.setter
    def T_d(self, value) -> None:
        self._T_d = _positive_float("T_d", value)

    # resolutions of the multiscale detector

    @property
    def delta_t(self):
        """Initial temporal resolution in minutes."""
        return self._delta_t

    @delta_t.setter
    def delta_t(self, value) -> None:
        self._delta_t = _positive_float("delta_t", value)

    @property
    def delta_d(self):
        """Initial spatial resolution (grid cell size) in meters."""
        return self._delta_d

    @delta_d.setter
    def delta_d(self, value) -> None:
        self._delta_d = _positive_float("delta_d", value)

    @property
    def n_scale(self):
        """Number of spatial scales; checked against its bound at run time."""
        return self._n_scale

    @n_scale.setter
    def n_scale(self, value) -> None:
        self._n_scale = _positive_int("n_scale", value)

    # term filter

    @property
    def min_term_support(self):
        """Minimum number of records containing a term."""
        return self._min_term_support

    @min_term_support.setter
    def min_term_support(self, value) -> None:
        self._min_term_support = _positive_int("min_term_support", value)

    @property
    def l_filter(self):
        """Apply the standardized K-function filter on top of support."""
        return self._l_filter

    @l_filter.setter
    def l_filter(self, value) -> None:
        if not isinstance(value, bool):
            raise ConfigError(f"invalid 'l_filter': {value!r}")
        self._l_filter = value

    @property
    def l_filter_probes(self):
        """Probe distances in km, strictly increasing."""
        return self._l_filter_probes

    @l_filter_probes.setter
    def l_filter_probes(self, value) -> None:
        try:
            probes = tuple(_positive_float("l_filter_probes", v) for v in value)
            assert len(probes) > 0
            assert all(a < b for a, b in zip(probes, probes[1:]))
        except (TypeError, AssertionError):
            raise ConfigError(f"invalid 'l_filter_probes': {value!r}")
        self._l_filter_probes = probes

    @property
    def l_filter_threshold(self):
        """Minimum mean L value over the probes for a valid term."""
        return self._l_filter_threshold

    @l_filter_threshold.setter
    def l_filter_threshold(self, value) -> None:
        self._l_filter_threshold = _positive_float("l_filter_threshold", value)

    # post-processing

    @property
    def min_cluster_records(self):
        return self._min_cluster_records

    @min_cluster_records.setter
    def min_cluster_records(self, value) -> None:
        self._min_cluster_records = _positive_int("min_cluster_records", value)

    @property
    def min_cluster_users(self):
        return self._min_cluster_users

    @min_cluster_users.setter
    def min_cluster_users(self, value) -> None:
        self._min_cluster_users = _positive_int("min_cluster_users", value)

    @property
    def max_single_user_fraction(self):
        """Largest allowed share of a cluster's records from one user."""
        return self._max_single_user_fraction

    @max_single_user_fraction.setter
    def max_single_user_fraction(self, value) -> None:
        value = _positive_float("max_single_user_fraction", value)
        if value > 1:
            raise ConfigError(f"invalid 'max_single_user_fraction': {value!r}")
        self._max_single_user_fraction = value

    @property
    def blacklist_terms(self):
        """Clusters whose top terms hit one of these are dropped."""
        return self._blacklist_terms

    @blacklist_terms.setter
    def blacklist_terms(self, value) -> None:
        if isinstance(value, str):
            raise ConfigError(f"invalid 'blacklist_terms': {value!r}")
        self._blacklist_terms = tuple(str(v).lower() for v in value)

    # tokenization

    @property
    def stop_words(self):
        return self._stop_words

    @stop_words.setter
    def stop_words(self, value) -> None:
        if value is None:
            value = load_stop_words()
        elif isinstance(value, str):
            raise ConfigError(f"invalid 'stop_words': {value!r}")
        self._stop_words = frozenset(str(v).lower() for v in value)

    @property
    def min_term_len(self):
        return self._min_term_len

    @min_term_len.setter
    def min_term_len(self, value) -> None:
        self._min_term_len = _positive_int("min_term_len", value)

    @property
    def max_term_len(self):
        return self._max_term_len

    @max_term_len.setter
    def max_term_len(self, value) -> None:
        self._max_term_len = _positive_int("max_term_len", value)

    # temporal noise test and Monte-Carlo envelopes

    @property
    def chi2_bins(self):
        return self._chi2_bins

    @chi2_bins.setter
    def chi2_bins(self, value) -> None:
        value = _positive_int("chi2_bins", value)
        if value < 2:
            raise ConfigError(f"invalid 'chi2_bins': {value!r}")
        self._chi2_bins = value

    @property
    def chi2_alpha(self):
        return self._chi2_alpha

    @chi2_alpha.setter
    def chi2_alpha(self, value) -> None:
        value = _positive_float("chi2_alpha", value)
        if value >= 1:
            raise ConfigError(f"invalid 'chi2_alpha': {value!r}")
        self._chi2_alpha = value

    @property
    def envelope_sims(self):
        """Number of CSR simulations per envelope; 0 disables envelopes."""
        return self._envelope_sims

    @envelope_sims.setter
    def envelope_sims(self, value) -> None:
        if value != 0:
            value = _positive_int("envelope_sims", value)
        self._envelope_sims = int(value)

    @property
    def threads(self):
        """Worker cap for parallel sections."""
        return self._threads

    @threads.setter
    def threads(self, value) -> None:
        self._threads = _positive_int("threads", value)
