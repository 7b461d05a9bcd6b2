"""Chain mechanics: determinism, incremental trackers, annealing, accumulators."""

import math

import numpy as np

from prfmap.coloring import Coloring
from prfmap.geometry import GridSpec, Rect
from prfmap.moves import MoveParams
from prfmap.prior import (PriorParams, expected_edge_count_unit_square,
                          log_prior_from_stats)
from prfmap.sampler import (OccupancyAccumulator, PointColorTracker,
                            RasterTracker, Sampler, all_white_cells, anneal,
                            run_chain)

UNIT = Rect(0.0, 0.0, 1.0, 1.0)


def make_sampler(seed, p=0.5, temperature=1.0, likelihood=None):
    col = Coloring.empty(UNIT)
    return Sampler(col, PriorParams(intensity=p), MoveParams(),
                   np.random.default_rng(seed), likelihood=likelihood,
                   temperature=temperature)


def test_same_seed_same_trajectory():
    def trace(seed):
        s = make_sampler(seed)
        snap = []
        for i in range(20_000):
            s.step()
            if i % 500 == 499:
                snap.append((s.col.n_edges, round(s.log_prior, 12)))
        return snap, s.col.geometry_signature(), s.log_prior

    t1 = trace(40)
    t2 = trace(40)
    assert t1 == t2
    t3 = trace(41)
    assert t3[0] != t1[0]


def test_tally_accounting():
    s = make_sampler(8)
    n = 30_000
    for _ in range(n):
        s.step()
    st = s.stats
    assert st.proposals == n
    assert st.accepted <= st.applied <= st.proposals
    assert sum(t.applied for t in st.by_kind.values()) == st.applied
    assert sum(t.accepted for t in st.by_kind.values()) == st.accepted
    for t in st.by_kind.values():
        assert t.accepted <= t.applied <= t.proposed


def test_incremental_log_prior_matches_recomputed_stats():
    s = make_sampler(3)
    for i in range(30_000):
        s.step()
        if i % 5_000 == 4_999:
            s.col.validate()
            assert s.log_prior == log_prior_from_stats(s.col.stats, s.prior_params)


def test_point_tracker_matches_recompute():
    s = make_sampler(14)
    rng = np.random.default_rng(0)
    xs = rng.random(300)
    ys = rng.random(300)
    tracker = PointColorTracker(s.col, xs, ys)
    s.listeners.append(tracker)
    for i in range(30_000):
        s.step()
        if i % 3_000 == 2_999:
            np.testing.assert_array_equal(tracker.colors, s.col.colors_at(xs, ys))


def test_raster_tracker_matches_recompute():
    s = make_sampler(15)
    grid = GridSpec(UNIT, 0.1)
    tracker = RasterTracker(s.col, grid)
    s.listeners.append(tracker)
    for i in range(30_000):
        s.step()
        if i % 3_000 == 2_999:
            fresh = RasterTracker(s.col, grid)
            np.testing.assert_array_equal(tracker.colors, fresh.colors)


def test_prior_chain_edge_count_smoke():
    s = make_sampler(7, p=0.25)
    vals = []
    run_chain(s, 500_000, burn_in=100_000, sample_every=50,
              on_sample=lambda smp, i: vals.append(smp.col.n_edges))
    mean = float(np.mean(vals))
    target = expected_edge_count_unit_square(0.25)
    assert abs(mean - target) / target < 0.25


def test_anneal_without_data_empties_the_graph():
    col = Coloring.from_rectangles(UNIT, [Rect(0.3, 0.3, 0.7, 0.7)],
                                   clearance=0.02)
    s = Sampler(col, PriorParams(intensity=0.1), MoveParams(),
                np.random.default_rng(5))
    start = s.map_score()
    res = anneal(s, 60_000, t_start=1.0, t_end=0.01)
    assert res.best_score >= start
    assert res.best_coloring.n_edges == 0
    assert res.best_score == 0.0


def test_run_chain_zero_budget_no_ticks():
    s = make_sampler(1)
    ticks = []
    run_chain(s, 0, burn_in=0, sample_every=1,
              on_sample=lambda smp, i: ticks.append(i))
    assert ticks == []
    assert s.col.n_edges == 0


class _VetoLikelihood:
    """Rejects every edit; counts protocol calls."""

    def __init__(self):
        self.deltas = 0
        self.commits = 0
        self.rollbacks = 0

    def log_likelihood(self):
        return 0.0

    def delta_for_edit(self, col, result):
        self.deltas += 1
        return None

    def commit(self):
        self.commits += 1

    def rollback(self):
        self.rollbacks += 1


class _NeutralLikelihood(_VetoLikelihood):
    def delta_for_edit(self, col, result):
        self.deltas += 1
        return 0.0


def test_vetoing_likelihood_freezes_state():
    lik = _VetoLikelihood()
    s = make_sampler(9, likelihood=lik)
    sig0 = s.col.geometry_signature()
    for _ in range(5_000):
        s.step()
    assert s.stats.accepted == 0
    assert s.col.geometry_signature() == sig0
    assert lik.deltas == s.stats.applied
    assert lik.commits == 0 and lik.rollbacks == 0


def test_neutral_likelihood_call_balance():
    lik = _NeutralLikelihood()
    s = make_sampler(9, likelihood=lik)
    for _ in range(5_000):
        s.step()
    assert lik.deltas == s.stats.applied
    assert lik.commits == s.stats.accepted
    assert lik.rollbacks == s.stats.applied - s.stats.accepted
    assert s.stats.accepted > 0


def test_accumulator_merge_commutes():
    grid = GridSpec(UNIT, 0.25)
    rng = np.random.default_rng(2)

    def filled(seed, k):
        acc = OccupancyAccumulator(grid)
        r = np.random.default_rng(seed)
        for _ in range(k):
            acc.add(r.integers(0, 2, size=(grid.ny, grid.nx), dtype=np.int64),
                    r.integers(0, 2, size=(grid.ny, grid.nx)) > 0)
        return acc

    ab = filled(1, 5).merge(filled(2, 3))
    ba = filled(2, 3).merge(filled(1, 5))
    np.testing.assert_array_equal(ab.black, ba.black)
    np.testing.assert_array_equal(ab.white_cells, ba.white_cells)
    assert ab.samples == ba.samples == 8
    assert (ab.black <= ab.samples).all()
    assert (ab.white_cells <= ab.samples).all()
    del rng


def test_all_white_cells_against_geometry():
    win = Rect(0.0, 0.0, 4.0, 4.0)
    col = Coloring.from_rectangles(win, [Rect(1.0, 1.0, 2.0, 2.0)])
    grid = GridSpec(win, 0.25)
    aw = all_white_cells(col, grid)
    # interior of the black rectangle: never all-white
    assert not aw[5, 5]
    # cell crossed by the rectangle boundary: not all-white even though white outside
    assert not aw[4, 4]
    # far corner: all-white
    assert aw[14, 14]
    # empty coloring: everything all-white
    empty = Coloring.empty(win)
    assert all_white_cells(empty, grid).all()
