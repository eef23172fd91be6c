"""Spatial discretization, inter-cell distances and the scale model."""

from __future__ import annotations

import math

import numpy as np
from scipy import spatial

from .._logger import logger
from .base import ConfigError

__all__ = [
    "EARTH_RADIUS",
    "SAME_CELL",
    "Projection",
    "Grid",
    "ScaleBoundaries",
    "assign_cell",
    "spatial_scale_of",
    "temporal_scale_for",
    "nscale_upper_bound",
    "check_nscale",
]

EARTH_RADIUS = 6371008.8  # mean radius, meters
SAME_CELL = 0


class Projection:
    """Equirectangular projection of a bounding box to meters.

    The x axis is scaled by the cosine of the box's mean latitude. A
    planar box is already Euclidean (kilometres) and is only rescaled.
    """

    def __init__(self, box) -> None:
        self.box = box
        if box.planar:
            self.ky = self.kx = 1000.0
        else:
            mean_lat = math.radians(0.5 * (box.lat_min + box.lat_max))
            self.ky = math.radians(1.0) * EARTH_RADIUS
            self.kx = self.ky * math.cos(mean_lat)

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: kx={self.kx:.3f}, ky={self.ky:.3f}>"

    @property
    def width(self):
        """East-west extent in meters."""
        return (self.box.lon_max - self.box.lon_min) * self.kx

    @property
    def height(self):
        """North-south extent in meters."""
        return (self.box.lat_max - self.box.lat_min) * self.ky

    @property
    def area_km2(self):
        return self.width * self.height * 1e-6

    def to_xy(self, lat, lon):
        """Meters east and north of the box's bottom-left corner."""
        x = (np.asarray(lon, dtype=float) - self.box.lon_min) * self.kx
        y = (np.asarray(lat, dtype=float) - self.box.lat_min) * self.ky
        return x, y

    def distance(self, lat1, lon1, lat2, lon2):
        x1, y1 = self.to_xy(lat1, lon1)
        x2, y2 = self.to_xy(lat2, lon2)
        return np.hypot(x2 - x1, y2 - y1)


class Grid:
    """Regular grid of delta_d cells over a bounding box.

    Cells are half-open on their upper edges; points on the box's top or
    right edge belong to the last row or column.
    """

    def __init__(self, box, delta_d) -> None:
        if not delta_d > 0:
            raise ValueError(f"invalid 'delta_d': {delta_d!r}")
        self.box = box
        self.delta_d = float(delta_d)
        self.projection = Projection(box)
        self.n_cols = max(1, math.ceil(self.projection.width / self.delta_d - 1e-9))
        self.n_rows = max(1, math.ceil(self.projection.height / self.delta_d - 1e-9))

    @classmethod
    def from_box(cls, box, delta_d) -> Grid:
        return cls(box, delta_d)

    def __repr__(self) -> str:
        return (
            f"<{self.__class__.__name__}: n_rows={self.n_rows}, "
            f"n_cols={self.n_cols}, delta_d={self.delta_d}>"
        )

    @property
    def shape(self):
        """Grid shape: (n_rows, n_cols)."""
        return (self.n_rows, self.n_cols)

    @property
    def n_cells(self):
        return self.n_rows * self.n_cols

    @property
    def l_d(self):
        """Number of cells along the longest dimension."""
        return max(self.n_rows, self.n_cols)

    def flat_index(self, row, col):
        return np.asarray(row) * self.n_cols + np.asarray(col)

    def row_col(self, cell):
        return divmod(int(cell), self.n_cols)

    def assign_cells(self, lat, lon) -> np.ndarray:
        """Flat cell index for arrays of in-box points."""
        lat = np.asarray(lat, dtype=float)
        lon = np.asarray(lon, dtype=float)
        box = self.box
        outside = (
            (lat < box.lat_min) | (lat > box.lat_max)
            | (lon < box.lon_min) | (lon > box.lon_max)
        )
        if np.any(outside):
            idx = int(np.flatnonzero(outside)[0])
            raise ValueError(
                f"invalid point: ({float(lat.flat[idx])!r}, {float(lon.flat[idx])!r}) "
                "is outside the grid box",
            )
        x, y = self.projection.to_xy(lat, lon)
        # rounding guard so a point exactly k cells away lands in cell k
        col = np.floor(x / self.delta_d + 1e-9).astype(int)
        row = np.floor(y / self.delta_d + 1e-9).astype(int)
        col = np.clip(col, 0, self.n_cols - 1)
        row = np.clip(row, 0, self.n_rows - 1)
        return self.flat_index(row, col)

    def cell_center(self, cell):
        """Cell center (x, y) in meters from the box origin."""
        row, col = np.divmod(np.asarray(cell), self.n_cols)
        return (col + 0.5) * self.delta_d, (row + 0.5) * self.delta_d

    def cell_distance(self, a, b):
        """Center-to-center distance in meters; 0 iff a == b."""
        ax, ay = self.cell_center(a)
        bx, by = self.cell_center(b)
        return np.hypot(bx - ax, by - ay)


def assign_cell(grid, lat, lon):
    """Return the (row, col) of the cell containing an in-box point."""
    return grid.row_col(grid.assign_cells([lat], [lon])[0])


class ScaleBoundaries:
    """Log-equispaced distance bins defining the spatial scales.

    boundaries[0] is d_min and boundaries[n_scale] is d_max.
    """

    def __init__(self, n_scale, d_min, d_max) -> None:
        if n_scale < 1:
            raise ValueError(f"invalid 'n_scale': {n_scale!r}")
        if not 0 < d_min <= d_max:
            raise ValueError(f"invalid 'd_min, d_max': {(d_min, d_max)!r}")
        self.n_scale = int(n_scale)
        self.d_min = float(d_min)
        self.d_max = float(d_max)
        self.boundaries = np.geomspace(self.d_min, self.d_max, self.n_scale + 1)
        self.boundaries[0] = self.d_min
        self.boundaries[-1] = self.d_max

    def __repr__(self) -> str:
        return (
            f"<{self.__class__.__name__}: n_scale={self.n_scale}, "
            f"d_min={self.d_min:.1f}, d_max={self.d_max:.1f}>"
        )

    @classmethod
    def from_cells(cls, grid, cells, n_scale) -> ScaleBoundaries:
        """Bins from distances between distinct occupied cell centers."""
        occupied = np.unique(np.asarray(cells))
        if occupied.size < 2:
            logger.debug("fewer than two occupied cells; using delta_d bounds")
            return cls(n_scale, grid.delta_d, grid.delta_d)
        xy = np.column_stack(grid.cell_center(occupied))
        dist, _ = spatial.cKDTree(xy).query(xy, k=2)
        d_min = float(dist[:, 1].min())
        try:
            hull = spatial.ConvexHull(xy)
            d_max = float(spatial.distance.pdist(xy[hull.vertices]).max())
        except spatial.QhullError:
            # collinear occupied cells
            d_max = float(spatial.distance.pdist(xy).max())
        return cls(n_scale, d_min, d_max)

    def to_dict(self) -> dict:
        return {
            "n_scale": self.n_scale,
            "d_min": self.d_min,
            "d_max": self.d_max,
            "boundaries": self.boundaries.tolist(),
        }


def spatial_scale_of(boundaries, d) -> int:
    """Spatial scale of a center distance, 1 coarsest to n_scale finest.

    Returns SAME_CELL for d == 0. Distances outside [d_min, d_max] are
    clamped to the finest or coarsest scale.
    """
    if d < 0:
        raise ValueError(f"invalid 'd': {d!r}")
    if d == 0:
        return SAME_CELL
    n = boundaries.n_scale
    k = int(np.searchsorted(boundaries.boundaries, d, side="left"))
    k = min(max(k, 1), n)
    return n + 1 - k


def temporal_scale_for(n_scale, S_s) -> int:
    """Temporal scale paired inversely with a spatial scale."""
    if not 1 <= S_s <= n_scale:
        raise ValueError(f"invalid 'S_s': {S_s!r} for n_scale={n_scale!r}")
    return n_scale + 1 - S_s


def nscale_upper_bound(l_d, l_t) -> int:
    """Largest meaningful number of scales for l_d cells and l_t bins."""
    if l_d < 1 or l_t < 1:
        raise ValueError(f"invalid 'l_d, l_t': {(l_d, l_t)!r}")
    return math.ceil(min(math.log2(l_d), math.log2(l_t)) - 1e-12)


def check_nscale(n_scale, l_d, l_t) -> None:
    """Reject an n_scale above its bound before any compute.

    A single-cell grid is exempt for n_scale=1: every pair is same-cell
    and no wavelet level is used.
    """
    bound = nscale_upper_bound(l_d, l_t)
    if n_scale > bound and not (l_d == 1 and n_scale == 1):
        raise ConfigError(
            f"invalid 'n_scale': {n_scale!r} exceeds upper bound {bound} "
            f"(l_d={l_d}, l_t={l_t})",
        )
