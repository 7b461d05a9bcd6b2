"""Tests for the independent-cell log-odds occupancy grid."""

import math

import numpy as np

from prfmap.baseline import (
    BaselineParams,
    OccupancyGrid,
    build_occupancy_grid,
    grid_update_laser,
    grid_update_sonar,
)
from prfmap.geometry import GridSpec, Rect
from prfmap.sensors import LaserObs, SonarObs


def grid_4x3() -> GridSpec:
    return GridSpec(Rect(0.0, 0.0, 4.0, 3.0), 1.0)


def test_fresh_grid_is_maximum_uncertainty():
    g = OccupancyGrid(grid_4x3())
    assert np.all(g.logodds == 0.0)
    assert np.all(g.probability() == 0.5)


def test_laser_frees_traversed_cells_and_occupies_impact_cell():
    g = OccupancyGrid(grid_4x3())
    # Beam east from (0.5, 1.5), reading 2.9: crosses cells (0..2, 1),
    # impact falls in cell (2, 1).
    obs = LaserObs(0.5, 1.5, 0.0, 0.0, 2.9, 8.0, False)
    grid_update_laser(g, obs)
    p = BaselineParams()
    assert g.logodds[1, 0] == -p.laser_free
    assert g.logodds[1, 1] == -p.laser_free
    assert g.logodds[1, 2] == p.laser_occupied
    assert g.logodds[1, 3] == 0.0
    assert np.all(g.logodds[0, :] == 0.0) and np.all(g.logodds[2, :] == 0.0)


def test_max_range_laser_frees_every_cell_it_crosses():
    g = OccupancyGrid(grid_4x3())
    obs = LaserObs(0.5, 1.5, 0.0, 0.0, 3.4, 8.0, True)
    grid_update_laser(g, obs)
    p = BaselineParams()
    assert np.all(g.logodds[1, :] == -p.laser_free)


def test_updates_are_additive():
    g = OccupancyGrid(grid_4x3())
    obs = LaserObs(0.5, 1.5, 0.0, 0.0, 2.9, 8.0, False)
    for _ in range(3):
        grid_update_laser(g, obs)
    p = BaselineParams()
    assert g.logodds[1, 2] == 3 * p.laser_occupied
    assert g.logodds[1, 0] == -3 * p.laser_free
    assert g.probability()[1, 2] == 1.0 / (1.0 + math.exp(-3 * p.laser_occupied))


def test_order_independence():
    lasers = [LaserObs(0.5, 1.5, 0.0, 0.0, 2.9, 8.0, False),
              LaserObs(0.5, 0.5, 0.0, 0.3, 2.0, 8.0, False),
              LaserObs(3.5, 2.5, math.pi, 0.0, 3.0, 8.0, True)]
    sonars = [SonarObs(2.0, 1.5, 0.0, 0.0, 0.3, 1.2, 3.5, False),
              SonarObs(1.0, 1.0, 1.0, 0.0, 0.3, 2.0, 3.5, True)]
    a = build_occupancy_grid(grid_4x3(), lasers, sonars)
    b = build_occupancy_grid(grid_4x3(), list(reversed(lasers)),
                             list(reversed(sonars)))
    assert np.array_equal(a.logodds, b.logodds)


def test_sonar_frees_cone_interior_and_occupies_impact_arc():
    grid = GridSpec(Rect(0.0, 0.0, 4.0, 3.0), 0.25)
    g = OccupancyGrid(grid)
    # Ping east from (0.5, 1.5), reading 2.0, 20 degree half-angle.
    obs = SonarObs(0.5, 1.5, 0.0, 0.0, math.radians(20.0), 2.0, 3.5, False)
    grid_update_sonar(g, obs)
    p = BaselineParams()

    def cell_at(x, y):
        return g.logodds[int(y / 0.25), int(x / 0.25)]

    assert cell_at(1.6, 1.6) == -p.sonar_free        # interior, short of reading
    assert cell_at(2.55, 1.6) == p.sonar_occupied    # on the 2.0 m arc
    assert cell_at(3.3, 1.6) == 0.0                  # beyond the arc
    assert cell_at(1.6, 0.3) == 0.0                  # outside the cone angle
    assert cell_at(0.3, 1.6) == 0.0                  # behind the apex


def test_max_range_sonar_frees_whole_cone_no_arc():
    grid = GridSpec(Rect(0.0, 0.0, 4.0, 3.0), 0.25)
    g = OccupancyGrid(grid)
    obs = SonarObs(0.5, 1.5, 0.0, 0.0, math.radians(20.0), 3.0, 3.5, True)
    grid_update_sonar(g, obs)
    assert np.all(g.logodds <= 0.0)
    assert g.logodds.min() == -BaselineParams().sonar_free
    # The cell just inside the reading distance is freed, not marked.
    assert g.logodds[6, 11] == -BaselineParams().sonar_free


def test_sonar_respects_heading_plus_bearing():
    grid = GridSpec(Rect(0.0, 0.0, 4.0, 3.0), 0.25)
    a = OccupancyGrid(grid)
    b = OccupancyGrid(grid)
    half = math.radians(15.0)
    grid_update_sonar(a, SonarObs(2.0, 1.5, 0.3, 0.4, half, 1.0, 3.5, False))
    grid_update_sonar(b, SonarObs(2.0, 1.5, 0.7, 0.0, half, 1.0, 3.5, False))
    assert np.array_equal(a.logodds, b.logodds)


def test_custom_params_scale_increments():
    g = OccupancyGrid(grid_4x3())
    params = BaselineParams(laser_occupied=1.0, laser_free=0.2)
    grid_update_laser(g, LaserObs(0.5, 1.5, 0.0, 0.0, 2.9, 8.0, False), params)
    assert g.logodds[1, 2] == 1.0
    assert g.logodds[1, 0] == -0.2


def test_beam_leaving_the_window_is_clipped():
    g = OccupancyGrid(grid_4x3())
    # Beam pointing west exits the window after cell (0, 1).
    grid_update_laser(g, LaserObs(0.5, 1.5, math.pi, 0.0, 5.0, 8.0, True))
    assert g.logodds[1, 0] == -BaselineParams().laser_free
    assert np.count_nonzero(g.logodds) == 1
