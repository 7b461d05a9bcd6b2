"""Log-odds occupancy-grid mapping (the classical comparison baseline).

Each cell carries an independent log-odds of occupancy, starting at 0
(probability one half).  Observations apply additive inverse-sensor-model
updates: a laser beam frees the cells it traverses and marks its impact
cell occupied; a sonar ping frees the cone interior short of the reading
and marks the impact arc occupied.  Because the updates are independent
additive constants per cell, the final grid does not depend on
observation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GridSpec, Point2, Segment, grid_trace_segment, unit_vector
from .sensors import LaserObs, SonarObs, beam_direction


@dataclass(frozen=True)
class BaselineParams:
    """Inverse-sensor-model increments (log-odds units)."""
    laser_occupied: float = 0.4
    laser_free: float = 0.4
    sonar_occupied: float = 0.15
    sonar_free: float = 0.15
    # half-thickness of the sonar impact arc band, in meters
    sonar_arc_halfwidth: float = 0.05


class OccupancyGrid:
    """Independent-cell log-odds raster over a GridSpec."""

    def __init__(self, grid: GridSpec):
        self.grid = grid
        self.logodds = np.zeros((grid.ny, grid.nx), dtype=np.float64)

    def probability(self) -> np.ndarray:
        """Per-cell occupancy probability (sigmoid of the log-odds)."""
        return 1.0 / (1.0 + np.exp(-self.logodds))


def grid_update_laser(g: OccupancyGrid, o: LaserObs,
                      params: BaselineParams | None = None) -> None:
    p = params if params is not None else BaselineParams()
    origin = Point2(o.x, o.y)
    ux, uy = beam_direction(o.heading, o.bearing)
    end = Point2(o.x + o.range * ux, o.y + o.range * uy)
    cells = grid_trace_segment(Segment(origin, end), g.grid)
    if not cells:
        return
    if o.is_max_range:
        for ix, iy in cells:
            g.logodds[iy, ix] -= p.laser_free
        return
    for ix, iy in cells[:-1]:
        g.logodds[iy, ix] -= p.laser_free
    ix, iy = cells[-1]
    g.logodds[iy, ix] += p.laser_occupied


def grid_update_sonar(g: OccupancyGrid, o: SonarObs,
                      params: BaselineParams | None = None) -> None:
    p = params if params is not None else BaselineParams()
    grid = g.grid
    heading = o.heading + o.bearing
    cos_half = math.cos(o.half_angle)
    ux, uy = unit_vector(heading)
    reach = o.range + (0.0 if o.is_max_range else p.sonar_arc_halfwidth)
    x0, y0 = o.x - reach, o.y - reach
    x1, y1 = o.x + reach, o.y + reach
    for ix, iy in grid.cells_in_bbox(x0, y0, x1, y1):
        r = grid.cell_rect(ix, iy)
        cx = 0.5 * (r.xmin + r.xmax) - o.x
        cy = 0.5 * (r.ymin + r.ymax) - o.y
        d = math.hypot(cx, cy)
        if d == 0.0 or d > reach:
            continue
        if (cx * ux + cy * uy) / d < cos_half:
            continue
        if o.is_max_range or d < o.range - p.sonar_arc_halfwidth:
            g.logodds[iy, ix] -= p.sonar_free
        elif abs(d - o.range) <= p.sonar_arc_halfwidth:
            g.logodds[iy, ix] += p.sonar_occupied


def build_occupancy_grid(grid: GridSpec, lasers, sonars,
                         params: BaselineParams | None = None) -> OccupancyGrid:
    """Grid from scratch over all observations (order-independent)."""
    g = OccupancyGrid(grid)
    p = params if params is not None else BaselineParams()
    for o in lasers:
        grid_update_laser(g, o, p)
    for o in sonars:
        grid_update_sonar(g, o, p)
    return g
