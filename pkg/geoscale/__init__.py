"""geoscale: multiscale event detection from geotagged short texts."""

from ._logger import use_basic_config
from ._version import __version__
