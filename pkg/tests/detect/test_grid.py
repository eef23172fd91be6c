import math

import numpy as np
import pytest
from numpy import testing

from geoscale.detect.base import ConfigError
from geoscale.detect.grid import (
    EARTH_RADIUS,
    SAME_CELL,
    Grid,
    Projection,
    ScaleBoundaries,
    assign_cell,
    check_nscale,
    nscale_upper_bound,
    spatial_scale_of,
    temporal_scale_for,
)
from geoscale.detect.record import BoundingBox

PLANE = BoundingBox(0.0, 0.0, 10.0, 10.0, planar=True)


def test_projection_planar():
    proj = Projection(PLANE)
    x, y = proj.to_xy(1.0, 2.0)
    assert (x, y) == (2000.0, 1000.0)
    assert proj.width == proj.height == 10000.0
    assert proj.area_km2 == pytest.approx(100.0)
    assert proj.distance(0.0, 0.0, 3.0, 4.0) == pytest.approx(5000.0)


def test_projection_nyc():
    box = BoundingBox.NYC
    proj = Projection(box)
    deg = math.radians(1.0) * EARTH_RADIUS
    # 0.001 degrees of latitude is about 111 m
    assert proj.distance(40.7, -74.0, 40.701, -74.0) == pytest.approx(0.001 * deg)
    mean_lat = math.radians(0.5 * (box.lat_min + box.lat_max))
    expected = 0.0015 * deg * math.cos(mean_lat)
    assert proj.distance(40.7, -74.0, 40.7, -73.9985) == pytest.approx(expected)
    assert 120 < expected < 135


def test_grid_nyc_dimensions():
    box = BoundingBox.NYC
    grid = Grid.from_box(box, 100.0)
    deg = math.radians(1.0) * EARTH_RADIUS
    mean_lat = math.radians(0.5 * (box.lat_min + box.lat_max))
    height = (box.lat_max - box.lat_min) * deg
    width = (box.lon_max - box.lon_min) * deg * math.cos(mean_lat)
    assert grid.shape == (math.ceil(height / 100.0), math.ceil(width / 100.0))
    assert grid.l_d == max(grid.shape)
    assert 400 < grid.n_rows < 500
    assert 400 < grid.n_cols < 500


def test_grid_planar():
    grid = Grid(PLANE, 1000.0)
    assert grid.shape == (10, 10)
    assert grid.n_cells == 100
    assert grid.l_d == 10
    assert Grid(PLANE, 3000.0).shape == (4, 4)
    assert Grid(BoundingBox(0, 0, 1, 16, planar=True), 1000.0).shape == (1, 16)
    assert Grid(PLANE, 50000.0).shape == (1, 1)
    with pytest.raises(ValueError):
        Grid(PLANE, 0.0)


def test_assign_cell():
    grid = Grid(PLANE, 1000.0)
    assert assign_cell(grid, 0.0, 0.0) == (0, 0)
    # exactly one delta_d east lands in the next cell
    assert assign_cell(grid, 0.0, 1.0) == (0, 1)
    assert assign_cell(grid, 2.5, 0.999) == (2, 0)
    # top-right corner belongs to the last cell
    assert assign_cell(grid, 10.0, 10.0) == (9, 9)
    cells = grid.assign_cells([0.0, 5.5, 10.0], [0.0, 3.2, 10.0])
    testing.assert_array_equal(cells, [0, 53, 99])
    with pytest.raises(ValueError, match="outside the grid box"):
        assign_cell(grid, 10.5, 1.0)


def test_assign_cell_geographic():
    box = BoundingBox.NYC
    grid = Grid(box, 100.0)
    assert assign_cell(grid, box.lat_min, box.lon_min) == (0, 0)
    lon = box.lon_min + 100.0 / grid.projection.kx
    assert assign_cell(grid, box.lat_min, lon) == (0, 1)
    with pytest.raises(ValueError):
        assign_cell(grid, 0.0, 0.0)


def test_cell_distance():
    grid = Grid(PLANE, 1000.0)
    assert grid.cell_distance(0, 0) == 0.0
    assert grid.cell_distance(0, 1) == pytest.approx(1000.0)
    assert grid.cell_distance(0, 11) == pytest.approx(1000.0 * math.sqrt(2))
    assert grid.cell_distance(11, 0) == grid.cell_distance(0, 11)
    assert grid.cell_center(0) == (500.0, 500.0)
    testing.assert_allclose(grid.cell_center([9, 99]), [[9500, 9500], [500, 9500]])


def test_scale_boundaries():
    sb = ScaleBoundaries(4, 1.0, 16.0)
    testing.assert_allclose(sb.boundaries, [1, 2, 4, 8, 16], rtol=1e-12)
    assert sb.boundaries[0] == 1.0
    assert sb.boundaries[-1] == 16.0
    ratios = sb.boundaries[1:] / sb.boundaries[:-1]
    testing.assert_allclose(ratios, ratios[0], rtol=1e-9)
    assert sb.to_dict()["n_scale"] == 4
    with pytest.raises(ValueError):
        ScaleBoundaries(0, 1.0, 2.0)
    with pytest.raises(ValueError):
        ScaleBoundaries(2, 3.0, 2.0)


def test_scale_boundaries_from_cells():
    grid = Grid(PLANE, 1000.0)
    # occupied cells 0, 1 and 99, with a duplicate
    sb = ScaleBoundaries.from_cells(grid, [0, 1, 99, 1], 3)
    assert sb.d_min == pytest.approx(1000.0)
    assert sb.d_max == pytest.approx(9000.0 * math.sqrt(2))
    # collinear cells fall back to all pairs
    sb = ScaleBoundaries.from_cells(grid, [0, 1, 2, 5], 2)
    assert sb.d_min == pytest.approx(1000.0)
    assert sb.d_max == pytest.approx(5000.0)
    sb = ScaleBoundaries.from_cells(grid, [7, 7], 1)
    assert sb.d_min == sb.d_max == 1000.0


def test_spatial_scale_of():
    sb = ScaleBoundaries(4, 1.0, 16.0)
    assert spatial_scale_of(sb, 0.0) == SAME_CELL
    assert spatial_scale_of(sb, 3.0) == 3
    assert spatial_scale_of(sb, 4.0) == 3
    assert spatial_scale_of(sb, 16.0) == 1
    assert spatial_scale_of(sb, 1.0) == 4
    # clamped outside [d_min, d_max]
    assert spatial_scale_of(sb, 0.5) == 4
    assert spatial_scale_of(sb, 100.0) == 1
    with pytest.raises(ValueError):
        spatial_scale_of(sb, -1.0)
    # monotone non-increasing
    scales = [spatial_scale_of(sb, d) for d in np.linspace(0.1, 20, 200)]
    assert all(a >= b for a, b in zip(scales, scales[1:]))


def test_temporal_scale_for():
    assert [temporal_scale_for(4, s) for s in (1, 2, 3, 4)] == [4, 3, 2, 1]
    assert temporal_scale_for(1, 1) == 1
    for s in range(1, 6):
        assert temporal_scale_for(5, temporal_scale_for(5, s)) == s
    with pytest.raises(ValueError):
        temporal_scale_for(4, 5)
    with pytest.raises(ValueError):
        temporal_scale_for(4, 0)


def test_nscale_upper_bound():
    assert nscale_upper_bound(10, 64) == 4
    assert nscale_upper_bound(1, 1) == 0
    assert nscale_upper_bound(16, 16) == 4
    assert nscale_upper_bound(17, 48) == 5
    with pytest.raises(ValueError):
        nscale_upper_bound(0, 4)


def test_check_nscale():
    check_nscale(4, 10, 64)
    with pytest.raises(ConfigError, match="exceeds upper bound 4"):
        check_nscale(5, 10, 64)
    # a single cell only ever pairs records in the same cell
    check_nscale(1, 1, 48)
    with pytest.raises(ConfigError):
        check_nscale(2, 1, 48)
    with pytest.raises(ConfigError):
        check_nscale(1, 4, 1)
