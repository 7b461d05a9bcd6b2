"""Prior over polygonal colorings.

The unnormalized log density of a configuration with edge set E and vertex
set V is

    |E| log p  -  sum_e log|e|  +  sum_v log sin(phi_v)  -  2 p sum_e |e|

with p the line intensity, |e| edge lengths, and phi_v the corner angle at
each vertex (between the two incident edges at interior vertices; between
the edge and the window side at boundary vertices).  The empty coloring has
log density 0.  Densities are taken with respect to Lebesgue measure on
unordered vertex coordinates — for a boundary pair this is the standard
kinematic measure of lines, which is what fixes the closed forms below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coloring import Coloring, PriorStats


@dataclass(frozen=True)
class PriorParams:
    intensity: float = 0.1

    def __post_init__(self):
        if not (self.intensity > 0.0):
            raise ValueError(f"intensity must be positive, got {self.intensity}")


def log_reference_mass(stats: PriorStats, params: PriorParams) -> float:
    """Log of the combinatorial/geometric factor: |E| log p − Σ log|e| + Σ log sin.

    This factor plays the role of a reference measure over graph shapes; it
    is never tempered during annealing (only the energy below is), which is
    what makes the zero-energy empty coloring the optimization target rather
    than degenerate short-edge clusters that the 1/|e| factor rewards.
    """
    p = params.intensity
    return (stats.n_edges * math.log(p)
            - stats.sum_log_length
            + stats.sum_log_sin)


def energy(stats: PriorStats, params: PriorParams) -> float:
    """Non-negative potential 2p Σ|e|; zero exactly for the empty coloring."""
    return 2.0 * params.intensity * stats.total_length


def log_prior_from_stats(stats: PriorStats, params: PriorParams) -> float:
    return log_reference_mass(stats, params) - energy(stats, params)


def log_prior(coloring: Coloring, params: PriorParams) -> float:
    return log_prior_from_stats(coloring.stats, params)


def expected_edge_count_unit_square(p: float) -> float:
    """Mean number of edges under the prior on the unit square window."""
    return 4.0 * p + 4.0 * math.pi * p * p


def same_color_probability(p: float, d: float) -> float:
    """Probability two points at distance d share a color.

    The number of boundaries crossed by a length-d segment is Poisson with
    mean 2 p d; the points agree when that count is even.
    """
    return 0.5 * (1.0 + math.exp(-4.0 * p * d))


def mean_crossings(p: float, d: float) -> float:
    """Expected color-boundary crossings along a segment of length d."""
    return 2.0 * p * d
