"""Range-sensor observation models over polygonal colorings.

Three observation families condition the coloring posterior:

* laser beams — a narrow ray whose likelihood depends only on the distance
  from the sensor to the first edge along the beam (Gaussian measurement
  noise mixed with a uniform outlier term and a max-range point mass);
* sonar cones — a wide field of view whose visible faces and corners each
  get a logistic *independent return probability*, combined depth-first
  into exclusive return probabilities that weight a Gaussian mixture over
  the reading, plus an outlier component (uniform + truncated exponential
  + max-range point mass);
* point color measurements — a Gaussian reading of a per-color mean at a
  fixed location.

Any observation model reports -inf when its sensor sits in occupied
(black) space.

:class:`ObservationCache` binds a set of laser and sonar observations to a
chain: it keeps every observation's log likelihood cached, indexes each
observation in the grid cells overlapping its current *sensitivity extent*
(beam up to the impact point; cone up to the farthest contact), and on each
proposed edit recomputes only the observations whose extent the edit
touches or whose sensor position changed color.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coloring import BLACK, Coloring, changed_mask
from .geometry import (
    ZERO_WIDTH_FACE_TOL,
    Cone,
    Point2,
    Segment,
    VisibleFeature,
    grid_trace_segment,
    ray_rect_exit,
    unit_vector,
    visibility_sweep,
)
from .grid_index import cone_cells

_SQRT_2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# observation and parameter records


@dataclass(frozen=True)
class LaserObs:
    """One laser beam: sensor pose, beam bearing, and the range reading.

    ``t`` is a free-form timestamp carried through logs; the likelihood
    never reads it.
    """
    x: float
    y: float
    heading: float
    bearing: float
    range: float
    max_range: float
    is_max_range: bool = False
    t: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.range <= self.max_range):
            raise ValueError(f"laser range {self.range} outside (0, {self.max_range}]")


@dataclass(frozen=True)
class SonarObs:
    """One sonar ping: pose, cone geometry, and the range reading.

    ``t`` is a free-form timestamp carried through logs; the likelihood
    never reads it.
    """
    x: float
    y: float
    heading: float
    bearing: float
    half_angle: float
    range: float
    max_range: float
    is_max_range: bool = False
    t: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.range <= self.max_range):
            raise ValueError(f"sonar range {self.range} outside (0, {self.max_range}]")
        if not (0.0 < self.half_angle < math.pi / 2):
            raise ValueError("sonar half_angle must be in (0, pi/2)")


@dataclass(frozen=True)
class PointColorObs:
    """A scalar reading whose mean depends on the color at a fixed point."""
    x: float
    y: float
    value: float
    mu_black: float
    mu_white: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class LaserParams:
    """Laser mixture: Gaussian + uniform outlier + max-range point mass.

    The Gaussian's standard deviation is ``sigma_frac`` of the predicted
    distance with a floor of ``sigma_floor`` (beam rangefinders have
    roughly proportional error with a small absolute minimum).
    """
    sigma_frac: float = 0.01
    sigma_floor: float = 0.01
    w_gauss: float = 0.9
    w_uniform: float = 0.05
    w_maxrange: float = 0.05

    def __post_init__(self):
        if self.sigma_frac < 0 or self.sigma_floor <= 0:
            raise ValueError("sigma_frac must be >= 0 and sigma_floor > 0")
        w = (self.w_gauss, self.w_uniform, self.w_maxrange)
        if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-9:
            raise ValueError("mixture weights must be nonnegative and sum to 1")

    def sigma(self, predicted: float) -> float:
        return max(self.sigma_frac * predicted, self.sigma_floor)


@dataclass(frozen=True)
class SonarParams:
    """Logistic return models plus the reading mixture for sonar.

    Independent return probabilities are logistic in pose-relative feature
    coordinates.  Corners: ``corner_intercept + corner_distance_slope * d``.
    Faces: ``face_intercept + face_distance_slope * d +
    face_projection_slope * projection_angle + face_subtended_slope *
    subtended_angle`` (angles in radians; a square-on face has projection
    angle pi/2).  Defaults put a perpendicular face at 1 m subtending 10
    degrees near q = 0.95, dropping through 0.5 when the face is tilted 60
    degrees away from square-on, and a corner at 1 m near q = 0.5.

    The outlier component (weight = probability no feature returned) mixes
    a uniform density on (0, max_range], an exponential with rate
    ``outlier_rate`` truncated to the same interval, and a point mass at
    max range that applies to max-range-flagged readings.
    """
    corner_intercept: float = 0.8
    corner_distance_slope: float = -0.8
    face_intercept: float = -1.543
    face_distance_slope: float = -0.8
    face_projection_slope: float = 2.81
    face_subtended_slope: float = 5.0
    sigma: float = 0.03
    w_uniform: float = 0.3
    w_exponential: float = 0.3
    w_maxrange: float = 0.4
    outlier_rate: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0 or self.outlier_rate <= 0:
            raise ValueError("sigma and outlier_rate must be positive")
        w = (self.w_uniform, self.w_exponential, self.w_maxrange)
        if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-9:
            raise ValueError("outlier weights must be nonnegative and sum to 1")

    def independent_return_probability(self, f: VisibleFeature) -> float:
        if f.kind == "corner":
            g = self.corner_intercept + self.corner_distance_slope * f.depth
        else:
            g = (self.face_intercept
                 + self.face_distance_slope * f.depth
                 + self.face_projection_slope * f.projection_angle
                 + self.face_subtended_slope * f.subtended_angle)
        return 1.0 / (1.0 + math.exp(-g))


# ---------------------------------------------------------------------------
# scalar density helpers


def _gauss_pdf(x: float, mu: float, sigma: float) -> float:
    z = (x - mu) / sigma
    return math.exp(-0.5 * z * z) / (sigma * _SQRT_2PI)


def beam_direction(heading: float, bearing: float) -> tuple[float, float]:
    return unit_vector(heading + bearing)


def laser_true_distance(col: Coloring, origin: Point2,
                        direction: tuple[float, float],
                        max_range: float) -> tuple[float, int | None]:
    """Predicted impact distance for a beam and the edge hit, if any.

    The beam is cast against the coloring's edges; with no hit the window
    exit distance stands in, capped at ``max_range`` (the window boundary
    itself is a viewing frame, not an obstacle).
    """
    exit_cap = min(ray_rect_exit(origin, direction, col.window), max_range)
    hit = col.index.ray_cast(origin, direction, exit_cap, col.segment_of)
    if hit is None:
        return exit_cap, None
    return hit[0], hit[1]


def laser_log_likelihood(o: LaserObs, col: Coloring, p: LaserParams) -> float:
    origin = Point2(o.x, o.y)
    if col.color_at(origin) == BLACK:
        return -math.inf
    d_star, _ = laser_true_distance(col, origin, beam_direction(o.heading, o.bearing),
                                    o.max_range)
    return _laser_density_log(o.range, o.is_max_range, d_star, o.max_range, p)


def _laser_density_log(r: float, flagged: bool, d_star: float,
                       max_range: float, p: LaserParams) -> float:
    dens = (p.w_gauss * _gauss_pdf(r, d_star, p.sigma(d_star))
            + p.w_uniform / max_range)
    if flagged:
        dens += p.w_maxrange
    return math.log(dens)


# ---------------------------------------------------------------------------
# sonar model


def sonar_cone(o: SonarObs) -> Cone:
    return Cone(Point2(o.x, o.y), o.heading + o.bearing, o.half_angle, o.max_range)


def _candidate_segments(col: Coloring, cone: Cone):
    cells = cone_cells(col.grid, cone.apex, cone.heading, cone.half_angle,
                       cone.max_range)
    return [(eid, col.segment_of(eid)) for eid in sorted(col.index.edges_in_cells(cells))]


def return_probabilities(features: list[VisibleFeature],
                         params: SonarParams) -> list[tuple[VisibleFeature, float, float]]:
    """Attach (independent q, exclusive r) to depth-sorted features.

    The exclusive return probability discounts each feature by the chance
    that no *closer* feature already produced the return:
    ``r_f = q_f * prod_(g closer) (1 - r_g)``, so the r values always sum
    to at most 1.
    """
    out = []
    none_closer = 1.0
    for f in features:
        q = params.independent_return_probability(f)
        r = q * none_closer
        none_closer *= 1.0 - q
        out.append((f, q, r))
    return out


def sonar_features(o: SonarObs, col: Coloring,
                   params: SonarParams) -> list[tuple[VisibleFeature, float, float]]:
    """Visible features in the cone with their return probabilities."""
    cone = sonar_cone(o)
    feats = visibility_sweep(_candidate_segments(col, cone), cone)
    return return_probabilities(feats, params)


def _sonar_density_log(r: float, flagged: bool,
                       triples: list[tuple[VisibleFeature, float, float]],
                       max_range: float, p: SonarParams) -> float:
    dens = 0.0
    total_r = 0.0
    for f, _, rf in triples:
        dens += rf * _gauss_pdf(r, f.depth, p.sigma)
        total_r += rf
    outlier = p.w_uniform / max_range
    rate = p.outlier_rate
    outlier += (p.w_exponential * rate * math.exp(-rate * r)
                / -math.expm1(-rate * max_range))
    if flagged:
        outlier += p.w_maxrange
    dens += (1.0 - total_r) * outlier
    return math.log(dens) if dens > 0.0 else -math.inf


def sonar_log_likelihood(o: SonarObs, col: Coloring, p: SonarParams) -> float:
    if col.color_at(Point2(o.x, o.y)) == BLACK:
        return -math.inf
    triples = sonar_features(o, col, p)
    return _sonar_density_log(o.range, o.is_max_range, triples, o.max_range, p)


def point_log_likelihood(o: PointColorObs, col: Coloring) -> float:
    mu = o.mu_black if col.color_at(Point2(o.x, o.y)) == BLACK else o.mu_white
    z = (o.value - mu) / o.sigma
    return -0.5 * z * z


# ---------------------------------------------------------------------------
# sensitivity extents

# Tolerance for "the edit touches this extent": changed segments within
# this distance of a beam, or protruding this far into a cone, trigger a
# recompute.  It only needs to absorb floating-point slack (an impact point
# reconstructed from a ray parameter sits within ~1e-12 of its edge).
_TOUCH_EPS = 1e-9


def _sector_cells_with_distance(grid, apex: Point2, heading: float,
                                half_angle: float, radius: float):
    """(cell, apex distance) pairs for cells conservatively meeting a sector.

    Same test as :func:`cone_cells` but also reporting each cell's nearest
    distance to the apex, so truncating the sector to a smaller radius is a
    cheap filter instead of a rescan.
    """
    ux_lo, uy_lo = unit_vector(heading - half_angle)
    ux_hi, uy_hi = unit_vector(heading + half_angle)
    out = []
    for (ix, iy) in grid.cells_in_bbox(apex.x - radius, apex.y - radius,
                                       apex.x + radius, apex.y + radius):
        r = grid.cell_rect(ix, iy)
        nx = min(max(apex.x, r.xmin), r.xmax)
        ny = min(max(apex.y, r.ymin), r.ymax)
        d2 = (nx - apex.x) ** 2 + (ny - apex.y) ** 2
        if d2 > radius * radius:
            continue
        corners = ((r.xmin, r.ymin), (r.xmin, r.ymax), (r.xmax, r.ymin), (r.xmax, r.ymax))
        if all(ux_lo * (cy - apex.y) - uy_lo * (cx - apex.x) < 0.0 for cx, cy in corners):
            continue
        if all(ux_hi * (cy - apex.y) - uy_hi * (cx - apex.x) > 0.0 for cx, cy in corners):
            continue
        out.append(((ix, iy), math.sqrt(d2)))
    return out


# ---------------------------------------------------------------------------
# vectorized touch tests for pruning candidate recomputes


def _point_seg_dist_batch(px: np.ndarray, py: np.ndarray, seg: Segment) -> np.ndarray:
    ax, ay = seg.a
    bx, by = seg.b
    ex, ey = bx - ax, by - ay
    L2 = ex * ex + ey * ey
    if L2 == 0.0:
        return np.hypot(px - ax, py - ay)
    t = np.clip(((px - ax) * ex + (py - ay) * ey) / L2, 0.0, 1.0)
    return np.hypot(px - (ax + t * ex), py - (ay + t * ey))


def _seg_batch_min_dist(ax, ay, bx, by, seg: Segment) -> np.ndarray:
    """Min distance between segments (a[i], b[i]) and a fixed segment."""
    sax, say = seg.a
    sbx, sby = seg.b

    def orient(ox, oy, px_, py_, qx, qy):
        return (px_ - ox) * (qy - oy) - (py_ - oy) * (qx - ox)

    d1 = orient(sax, say, sbx, sby, ax, ay)
    d2 = orient(sax, say, sbx, sby, bx, by)
    d3 = orient(ax, ay, bx, by, np.float64(sax), np.float64(say))
    d4 = orient(ax, ay, bx, by, np.float64(sbx), np.float64(sby))
    proper = ((d1 > 0) != (d2 > 0)) & ((d3 > 0) != (d4 > 0)) \
        & (d1 != 0) & (d2 != 0) & (d3 != 0) & (d4 != 0)

    d = np.minimum(
        np.minimum(_point_seg_dist_batch(ax, ay, seg),
                   _point_seg_dist_batch(bx, by, seg)),
        np.minimum(_endpoint_to_batch_dist(sax, say, ax, ay, bx, by),
                   _endpoint_to_batch_dist(sbx, sby, ax, ay, bx, by)))
    d[proper] = 0.0
    return d


def _endpoint_to_batch_dist(px, py, ax, ay, bx, by) -> np.ndarray:
    ex, ey = bx - ax, by - ay
    L2 = ex * ex + ey * ey
    t = np.where(L2 > 0.0, ((px - ax) * ex + (py - ay) * ey) / np.where(L2 > 0, L2, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.hypot(px - (ax + t * ex), py - (ay + t * ey))


# ---------------------------------------------------------------------------
# the incremental observation cache


class ObservationCache:
    """Caches per-observation log likelihoods with dynamic grid indexing.

    Implements the chain's Likelihood protocol: ``delta_for_edit`` stages
    recomputes for the observations an applied edit could affect — those
    indexed in grid cells the changed segments touch, plus those whose
    sensor position changed color — and ``commit``/``rollback`` finalize
    or discard the staging.  The construction-time coloring must give every
    sensor a free (white) position.
    """

    def __init__(self, col: Coloring, lasers: list[LaserObs],
                 sonars: list[SonarObs],
                 laser_params: LaserParams | None = None,
                 sonar_params: SonarParams | None = None):
        self.lp = laser_params if laser_params is not None else LaserParams()
        self.sp = sonar_params if sonar_params is not None else SonarParams()
        self.grid = col.grid
        self.obs: list[LaserObs | SonarObs] = list(lasers) + list(sonars)
        n = len(self.obs)
        self.n_laser = len(lasers)
        self.sx = np.array([o.x for o in self.obs], dtype=np.float64)
        self.sy = np.array([o.y for o in self.obs], dtype=np.float64)
        self.sensor_black = np.zeros(n, dtype=bool)
        self.ll = np.zeros(n, dtype=np.float64)

        # laser geometry
        self.dirx = np.zeros(n)
        self.diry = np.zeros(n)
        self.exit_cap = np.zeros(n)
        self.impact_x = np.zeros(n)
        self.impact_y = np.zeros(n)
        for i, o in enumerate(lasers):
            ux, uy = beam_direction(o.heading, o.bearing)
            self.dirx[i], self.diry[i] = ux, uy
            self.exit_cap[i] = min(ray_rect_exit(Point2(o.x, o.y), (ux, uy), col.window),
                                   o.max_range)

        # sonar geometry: fixed wedge vectors plus full-range cell scans
        self.ulox = np.zeros(n)
        self.uloy = np.zeros(n)
        self.uhix = np.zeros(n)
        self.uhiy = np.zeros(n)
        self.trunc_radius = np.zeros(n)
        self._full_cells: list[list[tuple[tuple[int, int], float]] | None] = [None] * n
        for j, o in enumerate(sonars):
            i = self.n_laser + j
            c = sonar_cone(o)
            self.ulox[i], self.uloy[i] = unit_vector(c.heading - c.half_angle)
            self.uhix[i], self.uhiy[i] = unit_vector(c.heading + c.half_angle)
            self._full_cells[i] = _sector_cells_with_distance(
                self.grid, c.apex, c.heading, c.half_angle, c.max_range)

        self._cells: dict[tuple[int, int], set[int]] = {}
        self._obs_cells: list[list[tuple[int, int]]] = [[] for _ in range(n)]

        if bool(col.colors_at(self.sx, self.sy).any()):
            raise ValueError("every sensor position must start in free space")
        for i in range(n):
            ll, ext = self._evaluate(i, col, False)
            if ll == -math.inf:
                raise ValueError(f"observation {i} starts with zero likelihood")
            self.ll[i] = ll
            self._set_extent(i, ext)
            self._reindex(i, self._extent_cells(i))
        self._total = float(self.ll.sum())
        self._staged: list[tuple[int, float, float]] | None = None
        self._staged_flips: np.ndarray | None = None
        self._staged_delta = 0.0

    # -- protocol ---------------------------------------------------------

    def log_likelihood(self) -> float:
        return self._total

    def delta_for_edit(self, col: Coloring, result) -> float | None:
        delta_segs = result.delta_segments
        flipped = self._flipped_sensors(col, result)
        touched = self._touched_observations(delta_segs)
        affected = np.union1d(flipped, touched) if len(flipped) else touched
        flipset = set(int(i) for i in flipped)
        staged = []
        delta = 0.0
        for i in affected:
            i = int(i)
            ll, ext = self._evaluate(i, col, i in flipset)
            staged.append((i, ll, ext))
            delta += ll - self.ll[i]
        self._staged = staged
        self._staged_flips = flipped
        self._staged_delta = delta
        return delta

    def commit(self) -> None:
        assert self._staged is not None
        for i, ll, ext in self._staged:
            self.ll[i] = ll
            self._set_extent(i, ext)
            self._reindex(i, self._extent_cells(i))
        if len(self._staged_flips):
            self.sensor_black[self._staged_flips] ^= True
        self._total += self._staged_delta
        self._staged = None
        self._staged_flips = None

    def rollback(self) -> None:
        self._staged = None
        self._staged_flips = None

    # -- full recompute (oracle hook) -------------------------------------

    def recompute_total(self, col: Coloring) -> float:
        """From-scratch total log likelihood of the current coloring."""
        total = 0.0
        for i, o in enumerate(self.obs):
            if i < self.n_laser:
                total += laser_log_likelihood(o, col, self.lp)
            else:
                total += sonar_log_likelihood(o, col, self.sp)
        return total

    # -- internals --------------------------------------------------------

    def _flipped_sensors(self, col: Coloring, result) -> np.ndarray:
        x0, y0, x1, y1 = result.region
        cand = np.nonzero((self.sx >= x0) & (self.sx <= x1)
                          & (self.sy >= y0) & (self.sy <= y1))[0]
        if len(cand) == 0:
            return cand
        chg = changed_mask(col.anchor, self.sx[cand], self.sy[cand],
                           result.delta_segments, result.anchor_flipped)
        return cand[chg]

    def _touched_observations(self, delta_segs) -> np.ndarray:
        cand: set[int] = set()
        for seg in delta_segs:
            for cell in grid_trace_segment(seg, self.grid):
                got = self._cells.get(cell)
                if got:
                    cand |= got
        if not cand:
            return np.empty(0, dtype=np.intp)
        idx = np.fromiter(cand, dtype=np.intp, count=len(cand))
        keep = np.zeros(len(idx), dtype=bool)
        laser_sel = idx < self.n_laser
        li = idx[laser_sel]
        if len(li):
            hit = np.zeros(len(li), dtype=bool)
            for seg in delta_segs:
                d = _seg_batch_min_dist(self.sx[li], self.sy[li],
                                        self.impact_x[li], self.impact_y[li], seg)
                hit |= d <= _TOUCH_EPS
            keep[laser_sel] = hit
        si = idx[~laser_sel]
        if len(si):
            hit = np.zeros(len(si), dtype=bool)
            ax, ay = self.sx[si], self.sy[si]
            rad = self.trunc_radius[si] + _TOUCH_EPS
            for seg in delta_segs:
                d = _point_seg_dist_batch(ax, ay, seg)
                near = d <= rad
                # clearly outside either bounding half-plane of the wedge
                pax, pay = seg.a.x - ax, seg.a.y - ay
                pbx, pby = seg.b.x - ax, seg.b.y - ay
                lo_a = self.ulox[si] * pay - self.uloy[si] * pax
                lo_b = self.ulox[si] * pby - self.uloy[si] * pbx
                hi_a = self.uhix[si] * pay - self.uhiy[si] * pax
                hi_b = self.uhix[si] * pby - self.uhiy[si] * pbx
                outside = ((lo_a < 0) & (lo_b < 0)) | ((hi_a > 0) & (hi_b > 0))
                hit |= near & ~outside
            keep[~laser_sel] = hit
        return np.sort(idx[keep])

    def _evaluate(self, i: int, col: Coloring, color_flipped: bool):
        """(log likelihood, new extent scalar) for observation i on col."""
        o = self.obs[i]
        black = bool(self.sensor_black[i]) ^ color_flipped
        if i < self.n_laser:
            if black:
                return -math.inf, 0.0
            origin = Point2(o.x, o.y)
            exit_cap = self.exit_cap[i]
            hit = col.index.ray_cast(origin, (self.dirx[i], self.diry[i]),
                                     exit_cap, col.segment_of)
            d_star = exit_cap if hit is None else hit[0]
            ll = _laser_density_log(o.range, o.is_max_range, d_star,
                                    o.max_range, self.lp)
            return ll, d_star
        if black:
            return -math.inf, o.max_range
        cone = sonar_cone(o)
        cand = col.index.edges_in_cells(c for c, _ in self._full_cells[i])
        segs = [(eid, col.segment_of(eid)) for eid in sorted(cand)]
        feats = visibility_sweep(segs, cone)
        triples = return_probabilities(feats, self.sp)
        ll = _sonar_density_log(o.range, o.is_max_range, triples,
                                o.max_range, self.sp)
        radius = _sweep_contact_radius_points(triples, cone)
        return ll, radius

    def _set_extent(self, i: int, ext: float) -> None:
        if i < self.n_laser:
            self.impact_x[i] = self.sx[i] + ext * self.dirx[i]
            self.impact_y[i] = self.sy[i] + ext * self.diry[i]
        else:
            self.trunc_radius[i] = ext

    def _extent_cells(self, i: int) -> list[tuple[int, int]]:
        if i < self.n_laser:
            seg = Segment(Point2(self.sx[i], self.sy[i]),
                          Point2(self.impact_x[i], self.impact_y[i]))
            return grid_trace_segment(seg, self.grid)
        r = self.trunc_radius[i]
        return [c for c, dmin in self._full_cells[i] if dmin <= r]

    def _reindex(self, i: int, cells: list[tuple[int, int]]) -> None:
        for c in self._obs_cells[i]:
            bucket = self._cells[c]
            bucket.discard(i)
            if not bucket:
                del self._cells[c]
        self._obs_cells[i] = cells
        for c in cells:
            self._cells.setdefault(c, set()).add(i)


def _sweep_contact_radius_points(triples, cone: Cone) -> float:
    """Sensitivity radius of a cone given its visible features.

    Full angular coverage by faces bounds sensitivity at the farthest
    visible point; any gap leaves it at max range.  The gap tolerance must
    not exceed the width below which the sweep suppresses faces: a crack
    wider than the suppression threshold can host a reportable face, so it
    must force max-range sensitivity.
    """
    tol = ZERO_WIDTH_FACE_TOL
    intervals = sorted((f.angle_lo, f.angle_hi) for f, _, _ in triples
                       if f.kind == "face")
    reach = -cone.half_angle
    for lo, hi in intervals:
        if lo > reach + tol:
            return cone.max_range
        reach = max(reach, hi)
    if reach < cone.half_angle - tol:
        return cone.max_range
    farthest = 0.0
    ax, ay = cone.apex
    for f, _, _ in triples:
        for pt in (f.point_a, f.point_b):
            farthest = max(farthest, math.hypot(pt.x - ax, pt.y - ay))
    return min(farthest + _TOUCH_EPS, cone.max_range)


# ---------------------------------------------------------------------------
# point-color observations


class PointColorLikelihood:
    """Likelihood-protocol adapter for Gaussian point-color observations."""

    def __init__(self, col: Coloring, observations: list[PointColorObs]):
        self.obs = list(observations)
        self.qx = np.array([o.x for o in self.obs], dtype=np.float64)
        self.qy = np.array([o.y for o in self.obs], dtype=np.float64)
        self.term_white = np.array(
            [-0.5 * ((o.value - o.mu_white) / o.sigma) ** 2 for o in self.obs])
        self.term_black = np.array(
            [-0.5 * ((o.value - o.mu_black) / o.sigma) ** 2 for o in self.obs])
        self.black = col.colors_at(self.qx, self.qy).astype(bool)
        self._total = float(np.where(self.black, self.term_black,
                                     self.term_white).sum())
        self._staged_idx: np.ndarray | None = None
        self._staged_delta = 0.0

    def log_likelihood(self) -> float:
        return self._total

    def delta_for_edit(self, col: Coloring, result) -> float | None:
        x0, y0, x1, y1 = result.region
        cand = np.nonzero((self.qx >= x0) & (self.qx <= x1)
                          & (self.qy >= y0) & (self.qy <= y1))[0]
        if len(cand):
            chg = changed_mask(col.anchor, self.qx[cand], self.qy[cand],
                               result.delta_segments, result.anchor_flipped)
            cand = cand[chg]
        old = np.where(self.black[cand], self.term_black[cand], self.term_white[cand])
        new = np.where(self.black[cand], self.term_white[cand], self.term_black[cand])
        self._staged_idx = cand
        self._staged_delta = float((new - old).sum())
        return self._staged_delta

    def commit(self) -> None:
        assert self._staged_idx is not None
        self.black[self._staged_idx] ^= True
        self._total += self._staged_delta
        self._staged_idx = None

    def rollback(self) -> None:
        self._staged_idx = None


class CompositeLikelihood:
    """Sum of several likelihood components sharing one coloring.

    Stages each part in order; if any part reports an impossible post
    state (None), already-staged parts are rolled back so every part sees
    exactly one commit or rollback per staged edit.
    """

    def __init__(self, parts: list):
        self.parts = list(parts)

    def log_likelihood(self) -> float:
        return sum(p.log_likelihood() for p in self.parts)

    def delta_for_edit(self, col: Coloring, result) -> float | None:
        total = 0.0
        for i, part in enumerate(self.parts):
            d = part.delta_for_edit(col, result)
            if d is None:
                for done in self.parts[:i]:
                    done.rollback()
                return None
            total += d
        return total

    def commit(self) -> None:
        for p in self.parts:
            p.commit()

    def rollback(self) -> None:
        for p in self.parts:
            p.rollback()
