"""Chain moves: reversible edits of a polygonal coloring.

Every move kind builds a Proposal holding the Edit plus log forward and
reverse proposal densities.  Densities are with respect to Lebesgue measure
on unordered configurations — the same base measure as the prior — so a move
that draws ordered tuples multiplies by the number of ordered draws mapping
to the same unordered result (6 for a triangle's vertex triple, 2 for a
boundary point pair).  Discrete choices (components, vertices, edges,
reconnection patterns) contribute plain probabilities.  The kind-selection
weight is folded into both densities.

Kinds come in inverse pairs: birth/death of triangles, boundary wedges and
chords, kink insertion/removal, and the self-inverse relocation, slide and
recoloring moves.  ``build_inverse`` reconstructs, from the post state and
the apply result, the exact proposal that undoes an applied edit; tests use
it to verify that forward and reverse densities agree and that applying the
inverse restores the original configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .coloring import BOUNDARY, INTERIOR, ApplyResult, Coloring, Edit
from .geometry import (
    Point2,
    Segment,
    boundary_arclength,
    boundary_point,
    grid_trace_segment,
    shorter_arc_chain,
)

KIND_ORDER = (
    "triangle_birth", "triangle_death",
    "wedge_birth", "wedge_death",
    "chord_birth", "chord_death",
    "kink_birth", "kink_death",
    "relocate",
    "boundary_slide",
    "edge_slide",
    "recolor_pair",
    "recolor_local",
)

INVERSE_KIND = {
    "triangle_birth": "triangle_death", "triangle_death": "triangle_birth",
    "wedge_birth": "wedge_death", "wedge_death": "wedge_birth",
    "chord_birth": "chord_death", "chord_death": "chord_birth",
    "kink_birth": "kink_death", "kink_death": "kink_birth",
    "relocate": "relocate",
    "boundary_slide": "boundary_slide",
    "edge_slide": "edge_slide",
    "recolor_pair": "recolor_pair",
    "recolor_local": "recolor_local",
}


def default_weights() -> dict[str, float]:
    w = {
        "triangle_birth": 0.08, "triangle_death": 0.08,
        "wedge_birth": 0.08, "wedge_death": 0.08,
        "chord_birth": 0.08, "chord_death": 0.08,
        "kink_birth": 0.08, "kink_death": 0.08,
        "relocate": 0.10,
        "boundary_slide": 0.05,
        "edge_slide": 0.10,
        "recolor_pair": 0.03,
        "recolor_local": 0.08,
    }
    assert abs(sum(w.values()) - 1.0) < 1e-12
    return w


@dataclass(frozen=True)
class MoveParams:
    """Tunable proposal parameters.

    relocate_radius: disk radius for interior vertex relocation.
    boundary_slide_delta: half-width of the arc-length slide interval.
    kink_area: area of the rectangle around an edge in which a new kink
        vertex is placed (width scales as kink_area / edge length).
    weights: kind-selection probabilities; inverse pairs should get equal
        weight (unequal weights are correct but slow mixing).
    """
    relocate_radius: float = 0.25
    boundary_slide_delta: float = 0.25
    kink_area: float = 0.25
    weights: dict[str, float] = field(default_factory=default_weights)

    def log_weight(self, kind: str) -> float:
        w = self.weights.get(kind, 0.0)
        return math.log(w) if w > 0.0 else -math.inf


@dataclass(frozen=True)
class Proposal:
    kind: str
    edit: Edit
    log_forward: float
    log_reverse: float


# ---------------------------------------------------------------------------
# component enumeration


def list_triangles(col: Coloring) -> list[tuple[int, int, int]]:
    """Interior 3-cycles as sorted vertex triples, canonically ordered."""
    out = []
    for v in sorted(col.interior_ids):
        nbrs = col.neighbors(v)
        if len(nbrs) != 2:
            continue
        w1, w2 = nbrs
        if w1 <= v or w2 <= v:
            continue
        if col.vertices[w1].kind != INTERIOR or col.vertices[w2].kind != INTERIOR:
            continue
        if w2 in col.neighbors(w1):
            out.append(tuple(sorted((v, w1, w2))))
    return out


def list_wedges(col: Coloring) -> list[int]:
    """Apex vertex ids of boundary wedges (interior, both neighbors boundary)."""
    out = []
    for v in sorted(col.interior_ids):
        nbrs = col.neighbors(v)
        if len(nbrs) == 2 and all(col.vertices[w].kind == BOUNDARY for w in nbrs):
            out.append(v)
    return out


def list_chords(col: Coloring) -> list[int]:
    """Edge ids whose both endpoints are boundary vertices."""
    out = []
    for eid in sorted(col.edge_ids):
        v1, v2 = col.edges[eid]
        if col.vertices[v1].kind == BOUNDARY and col.vertices[v2].kind == BOUNDARY:
            out.append(eid)
    return out


def _arc_closure(col: Coloring, p1: Point2, p2: Point2) -> tuple[Segment, ...]:
    chain, _ = shorter_arc_chain(col.window, p1, p2)
    return tuple(Segment(a, b) for a, b in zip(chain, chain[1:]))


def _triangle_edges(col: Coloring, tri: tuple[int, int, int]) -> tuple[int, ...]:
    v1, v2, v3 = tri
    eids = []
    for eid in self_edges(col, v1) + self_edges(col, v2):
        a, b = col.edges[eid]
        if {a, b} <= set(tri) and eid not in eids:
            eids.append(eid)
    return tuple(sorted(eids))


def self_edges(col: Coloring, vid: int) -> list[int]:
    return list(col.vertices[vid].edges)


def _edge_between(col: Coloring, a: int, b: int) -> int | None:
    for eid in col.vertices[a].edges:
        if col.other_endpoint(eid, a) == b:
            return eid
    return None


# ---------------------------------------------------------------------------
# proposers


def propose_triangle_birth(col: Coloring, rng: np.random.Generator,
                           mp: MoveParams) -> Proposal | None:
    w = col.window
    pts = [Point2(w.xmin + rng.random() * w.width, w.ymin + rng.random() * w.height)
           for _ in range(3)]
    edit = Edit(
        new_vertices=tuple((-(i + 1), p.x, p.y, INTERIOR) for i, p in enumerate(pts)),
        added_edges=((-1, -2), (-2, -3), (-3, -1)))
    log_f = (mp.log_weight("triangle_birth") + math.log(6.0)
             - 3.0 * math.log(w.area))
    n_tri_post = len(list_triangles(col)) + 1
    log_r = mp.log_weight("triangle_death") - math.log(n_tri_post)
    return Proposal("triangle_birth", edit, log_f, log_r)


def propose_triangle_death(col: Coloring, rng: np.random.Generator,
                           mp: MoveParams) -> Proposal | None:
    tris = list_triangles(col)
    if not tris:
        return None
    tri = tris[int(rng.integers(len(tris)))]
    edit = Edit(removed_edges=_triangle_edges(col, tri))
    log_f = mp.log_weight("triangle_death") - math.log(len(tris))
    log_r = (mp.log_weight("triangle_birth") + math.log(6.0)
             - 3.0 * math.log(col.window.area))
    return Proposal("triangle_death", edit, log_f, log_r)


def propose_wedge_birth(col: Coloring, rng: np.random.Generator,
                        mp: MoveParams) -> Proposal | None:
    w = col.window
    P = w.perimeter
    b1 = boundary_point(w, rng.random() * P)
    b2 = boundary_point(w, rng.random() * P)
    apex = Point2(w.xmin + rng.random() * w.width, w.ymin + rng.random() * w.height)
    if b1 == b2:
        return None
    edit = Edit(
        new_vertices=((-1, b1.x, b1.y, BOUNDARY), (-2, apex.x, apex.y, INTERIOR),
                      (-3, b2.x, b2.y, BOUNDARY)),
        added_edges=((-1, -2), (-2, -3)),
        closure=_arc_closure(col, b1, b2))
    log_f = (mp.log_weight("wedge_birth") + math.log(2.0)
             - 2.0 * math.log(P) - math.log(w.area))
    log_r = mp.log_weight("wedge_death") - math.log(len(list_wedges(col)) + 1)
    return Proposal("wedge_birth", edit, log_f, log_r)


def propose_wedge_death(col: Coloring, rng: np.random.Generator,
                        mp: MoveParams) -> Proposal | None:
    wedges = list_wedges(col)
    if not wedges:
        return None
    apex = wedges[int(rng.integers(len(wedges)))]
    e1, e2 = col.vertices[apex].edges
    b1 = col.vertices[col.other_endpoint(e1, apex)].point
    b2 = col.vertices[col.other_endpoint(e2, apex)].point
    edit = Edit(removed_edges=tuple(sorted((e1, e2))),
                closure=_arc_closure(col, b1, b2))
    w = col.window
    log_f = mp.log_weight("wedge_death") - math.log(len(wedges))
    log_r = (mp.log_weight("wedge_birth") + math.log(2.0)
             - 2.0 * math.log(w.perimeter) - math.log(w.area))
    return Proposal("wedge_death", edit, log_f, log_r)


def propose_chord_birth(col: Coloring, rng: np.random.Generator,
                        mp: MoveParams) -> Proposal | None:
    w = col.window
    P = w.perimeter
    b1 = boundary_point(w, rng.random() * P)
    b2 = boundary_point(w, rng.random() * P)
    if b1 == b2:
        return None
    edit = Edit(
        new_vertices=((-1, b1.x, b1.y, BOUNDARY), (-2, b2.x, b2.y, BOUNDARY)),
        added_edges=((-1, -2),),
        closure=_arc_closure(col, b1, b2))
    log_f = mp.log_weight("chord_birth") + math.log(2.0) - 2.0 * math.log(P)
    log_r = mp.log_weight("chord_death") - math.log(len(list_chords(col)) + 1)
    return Proposal("chord_birth", edit, log_f, log_r)


def propose_chord_death(col: Coloring, rng: np.random.Generator,
                        mp: MoveParams) -> Proposal | None:
    chords = list_chords(col)
    if not chords:
        return None
    eid = chords[int(rng.integers(len(chords)))]
    v1, v2 = col.edges[eid]
    edit = Edit(removed_edges=(eid,),
                closure=_arc_closure(col, col.vertices[v1].point,
                                     col.vertices[v2].point))
    log_f = mp.log_weight("chord_death") - math.log(len(chords))
    log_r = (mp.log_weight("chord_birth") + math.log(2.0)
             - 2.0 * math.log(col.window.perimeter))
    return Proposal("chord_death", edit, log_f, log_r)


def _in_kink_rect(v: Point2, a: Point2, b: Point2, area: float) -> bool:
    """Is v inside the kink-placement rectangle of edge a-b?"""
    ex, ey = b.x - a.x, b.y - a.y
    L2 = ex * ex + ey * ey
    if L2 == 0.0:
        return False
    L = math.sqrt(L2)
    t = ((v.x - a.x) * ex + (v.y - a.y) * ey) / L2
    if t < 0.0 or t > 1.0:
        return False
    perp = abs((v.x - a.x) * ey - (v.y - a.y) * ex) / L
    return perp <= 0.5 * area / L


def propose_kink_birth(col: Coloring, rng: np.random.Generator,
                       mp: MoveParams) -> Proposal | None:
    if len(col.edge_ids) == 0:
        return None
    eid = col.edge_ids.pick(rng)
    seg = col.segment_of(eid)
    a, b = seg
    ex, ey = b.x - a.x, b.y - a.y
    L = math.hypot(ex, ey)
    t = rng.random()
    off = (rng.random() - 0.5) * mp.kink_area / L
    # unit normal of the edge
    nx, ny = -ey / L, ex / L
    u = Point2(a.x + t * ex + off * nx, a.y + t * ey + off * ny)
    v1, v2 = col.edges[eid]
    edit = Edit(removed_edges=(eid,),
                new_vertices=((-1, u.x, u.y, INTERIOR),),
                added_edges=((v1, -1), (-1, v2)))
    log_f = (mp.log_weight("kink_birth") - math.log(len(col.edge_ids))
             - math.log(mp.kink_area))
    log_r = mp.log_weight("kink_death") - math.log(len(col.interior_ids) + 1)
    return Proposal("kink_birth", edit, log_f, log_r)


def propose_kink_death(col: Coloring, rng: np.random.Generator,
                       mp: MoveParams) -> Proposal | None:
    if len(col.interior_ids) == 0:
        return None
    vid = col.interior_ids.pick(rng)
    e1, e2 = col.vertices[vid].edges
    a = col.other_endpoint(e1, vid)
    b = col.other_endpoint(e2, vid)
    if _edge_between(col, a, b) is not None:
        return None  # would duplicate an existing edge (e.g. a triangle side)
    pa = col.vertices[a].point
    pb = col.vertices[b].point
    if not _in_kink_rect(col.vertices[vid].point, pa, pb, mp.kink_area):
        return None  # outside the support of the reverse kink placement
    edit = Edit(removed_edges=tuple(sorted((e1, e2))), added_edges=((a, b),))
    log_f = mp.log_weight("kink_death") - math.log(len(col.interior_ids))
    log_r = (mp.log_weight("kink_birth") - math.log(len(col.edge_ids) - 1)
             - math.log(mp.kink_area))
    return Proposal("kink_death", edit, log_f, log_r)


def propose_relocate(col: Coloring, rng: np.random.Generator,
                     mp: MoveParams) -> Proposal | None:
    if len(col.interior_ids) == 0:
        return None
    vid = col.interior_ids.pick(rng)
    v = col.vertices[vid]
    r = mp.relocate_radius * math.sqrt(rng.random())
    ang = rng.random() * 2.0 * math.pi
    new = Point2(v.x + r * math.cos(ang), v.y + r * math.sin(ang))
    edit = Edit(moved=((vid, new.x, new.y),))
    dens = (mp.log_weight("relocate") - math.log(len(col.interior_ids))
            - math.log(math.pi * mp.relocate_radius ** 2))
    return Proposal("relocate", edit, dens, dens)


def propose_boundary_slide(col: Coloring, rng: np.random.Generator,
                           mp: MoveParams) -> Proposal | None:
    if len(col.boundary_ids) == 0:
        return None
    vid = col.boundary_ids.pick(rng)
    v = col.vertices[vid]
    s = boundary_arclength(col.window, v.point)
    s2 = (s + (rng.random() * 2.0 - 1.0) * mp.boundary_slide_delta) % col.window.perimeter
    new = boundary_point(col.window, s2)
    # The recolored sliver is bounded by the old edge, the new edge, and the
    # boundary arc the vertex slid along; close the loop along that arc so the
    # anchor-flip parity test sees a closed curve.
    edit = Edit(moved=((vid, new.x, new.y),),
                closure=_arc_closure(col, v.point, new))
    dens = (mp.log_weight("boundary_slide") - math.log(len(col.boundary_ids))
            - math.log(2.0 * mp.boundary_slide_delta))
    return Proposal("boundary_slide", edit, dens, dens)


def propose_edge_slide(col: Coloring, rng: np.random.Generator,
                       mp: MoveParams) -> Proposal | None:
    if len(col.interior_ids) == 0:
        return None
    vid = col.interior_ids.pick(rng)
    v = col.vertices[vid]
    j = int(rng.integers(2))
    eid = v.edges[j]
    w = col.vertices[col.other_endpoint(eid, vid)]
    ex, ey = v.x - w.x, v.y - w.y  # from the fixed endpoint toward v
    L = math.hypot(ex, ey)
    t = rng.random() * 1.5 - 0.5  # in [-1/2, 1]
    new = Point2(v.x + t * ex, v.y + t * ey)
    L2 = (1.0 + t) * L
    edit = Edit(moved=((vid, new.x, new.y),))
    base = mp.log_weight("edge_slide") - math.log(len(col.interior_ids)) - math.log(2.0)
    log_f = base - math.log(1.5 * L)
    log_r = base - math.log(1.5 * L2)
    return Proposal("edge_slide", edit, log_f, log_r)


def _pair_targets(col: Coloring, e1: int, e2: int, psi: int):
    a, b = col.edges[e1]
    c, d = col.edges[e2]
    if len({a, b, c, d}) != 4:
        return None
    if psi == 0:
        return ((a, c), (b, d))
    return ((a, d), (b, c))


def propose_recolor_pair(col: Coloring, rng: np.random.Generator,
                         mp: MoveParams) -> Proposal | None:
    n = len(col.edge_ids)
    if n < 2:
        return None
    e1 = col.edge_ids.pick(rng)
    e2 = col.edge_ids.pick(rng)
    while e2 == e1:
        e2 = col.edge_ids.pick(rng)
    psi = int(rng.integers(2))
    added = _pair_targets(col, e1, e2, psi)
    if added is None:
        return None
    for x, y in added:
        if _edge_between(col, x, y) is not None:
            return None
    edit = Edit(removed_edges=tuple(sorted((e1, e2))), added_edges=added)
    dens = (mp.log_weight("recolor_pair") - math.log(n) - math.log(n - 1))
    return Proposal("recolor_pair", edit, dens, dens)


def _virtual_co_size(col: Coloring, seg: Segment, removed: set[int],
                     partner_cells: set[tuple[int, int]] | None):
    """Co-occupant count of a not-yet-inserted edge, and its cell set."""
    cells = set(grid_trace_segment(seg, col.grid))
    occupants = col.index.edges_in_cells(cells) - removed
    n = len(occupants)
    if partner_cells is not None and cells & partner_cells:
        n += 1
    return n, cells


def propose_recolor_local(col: Coloring, rng: np.random.Generator,
                          mp: MoveParams) -> Proposal | None:
    n = len(col.edge_ids)
    if n < 2:
        return None
    e1 = col.edge_ids.pick(rng)
    co1 = col.co_occupant_edges(e1)
    if not co1:
        return None
    e2 = co1[int(rng.integers(len(co1)))]
    co2 = col.co_occupant_edges(e2)
    psi = int(rng.integers(2))
    added = _pair_targets(col, e1, e2, psi)
    if added is None:
        return None
    for x, y in added:
        if _edge_between(col, x, y) is not None:
            return None
    edit = Edit(removed_edges=tuple(sorted((e1, e2))), added_edges=added)

    def pos(vid):
        return col.vertices[vid].point

    f1 = Segment(pos(added[0][0]), pos(added[0][1]))
    f2 = Segment(pos(added[1][0]), pos(added[1][1]))
    removed = {e1, e2}
    n1, cells1 = _virtual_co_size(col, f1, removed, None)
    n2, cells2 = _virtual_co_size(col, f2, removed, cells1)
    if not (cells1 & cells2):
        return None  # the new pair would not co-occupy; reverse impossible
    n1 += 1  # f2 shares a cell with f1 (just established)
    log_f = (mp.log_weight("recolor_local") - math.log(n) - math.log(2.0)
             + math.log(1.0 / len(co1) + 1.0 / len(co2)))
    log_r = (mp.log_weight("recolor_local") - math.log(n) - math.log(2.0)
             + math.log(1.0 / n1 + 1.0 / n2))
    return Proposal("recolor_local", edit, log_f, log_r)


PROPOSERS = {
    "triangle_birth": propose_triangle_birth,
    "triangle_death": propose_triangle_death,
    "wedge_birth": propose_wedge_birth,
    "wedge_death": propose_wedge_death,
    "chord_birth": propose_chord_birth,
    "chord_death": propose_chord_death,
    "kink_birth": propose_kink_birth,
    "kink_death": propose_kink_death,
    "relocate": propose_relocate,
    "boundary_slide": propose_boundary_slide,
    "edge_slide": propose_edge_slide,
    "recolor_pair": propose_recolor_pair,
    "recolor_local": propose_recolor_local,
}


def pick_kind(rng: np.random.Generator, mp: MoveParams) -> str:
    r = rng.random() * sum(mp.weights.get(k, 0.0) for k in KIND_ORDER)
    acc = 0.0
    for k in KIND_ORDER:
        acc += mp.weights.get(k, 0.0)
        if r < acc:
            return k
    return KIND_ORDER[-1]


def propose(col: Coloring, rng: np.random.Generator,
            mp: MoveParams) -> Proposal | None:
    kind = pick_kind(rng, mp)
    return PROPOSERS[kind](col, rng, mp)


# ---------------------------------------------------------------------------
# inverse construction (used by reversibility tests)


def build_inverse(post: Coloring, prop: Proposal, result: ApplyResult,
                  mp: MoveParams) -> Proposal:
    """Proposal that undoes an applied one, densities recomputed from post."""
    kind = prop.kind
    token = result.token
    if kind in ("triangle_birth", "wedge_birth", "chord_birth"):
        return _inverse_birth(post, prop, result, mp)
    if kind in ("triangle_death", "wedge_death", "chord_death"):
        return _inverse_death(post, prop, result, mp)
    if kind == "kink_birth":
        (eid_rm, v1, v2) = token.removed_edge_records[0]
        edit = Edit(removed_edges=tuple(sorted(result.added_edge_ids)),
                    added_edges=((v1, v2),))
        log_f = mp.log_weight("kink_death") - math.log(len(post.interior_ids))
        log_r = (mp.log_weight("kink_birth") - math.log(len(post.edge_ids) - 1)
                 - math.log(mp.kink_area))
        return Proposal("kink_death", edit, log_f, log_r)
    if kind == "kink_death":
        (vid, x, y, vkind) = token.deleted_vertex_records[0]
        (new_eid,) = result.added_edge_ids
        a, b = post.edges[new_eid]
        edit = Edit(removed_edges=(new_eid,),
                    new_vertices=((-1, x, y, vkind),),
                    added_edges=((a, -1), (-1, b)))
        log_f = (mp.log_weight("kink_birth") - math.log(len(post.edge_ids))
                 - math.log(mp.kink_area))
        log_r = mp.log_weight("kink_death") - math.log(len(post.interior_ids) + 1)
        return Proposal("kink_birth", edit, log_f, log_r)
    if kind in ("relocate", "boundary_slide", "edge_slide"):
        (vid, ox, oy) = token.moved_old[0]
        edit = Edit(moved=((vid, ox, oy),))
        if kind == "relocate":
            dens = (mp.log_weight("relocate") - math.log(len(post.interior_ids))
                    - math.log(math.pi * mp.relocate_radius ** 2))
            return Proposal(kind, edit, dens, dens)
        if kind == "boundary_slide":
            cur = post.vertices[vid].point
            edit = Edit(moved=((vid, ox, oy),),
                        closure=_arc_closure(post, cur, Point2(ox, oy)))
            dens = (mp.log_weight("boundary_slide") - math.log(len(post.boundary_ids))
                    - math.log(2.0 * mp.boundary_slide_delta))
            return Proposal(kind, edit, dens, dens)
        # edge_slide: lengths from the post and restored positions; the slid
        # edge is the incident edge collinear with the motion (smallest cross)
        v = post.vertices[vid]
        best = None
        for eid in v.edges:
            wpt = post.vertices[post.other_endpoint(eid, vid)].point
            cur = math.hypot(v.x - wpt.x, v.y - wpt.y)
            old = math.hypot(ox - wpt.x, oy - wpt.y)
            cross = abs((v.x - wpt.x) * (oy - wpt.y) - (v.y - wpt.y) * (ox - wpt.x))
            score = cross / max(cur * old, 1e-300)
            if best is None or score < best[0]:
                best = (score, cur, old)
        assert best is not None and best[0] < 1e-6, \
            "slide inverse: no collinear incident edge"
        _, L_post, L_pre = best
        base = (mp.log_weight("edge_slide") - math.log(len(post.interior_ids))
                - math.log(2.0))
        return Proposal(kind, edit, base - math.log(1.5 * L_post),
                        base - math.log(1.5 * L_pre))
    if kind in ("recolor_pair", "recolor_local"):
        recs = token.removed_edge_records
        edit = Edit(removed_edges=tuple(sorted(result.added_edge_ids)),
                    added_edges=tuple((v1, v2) for _, v1, v2 in recs))
        n = len(post.edge_ids)
        if kind == "recolor_pair":
            dens = mp.log_weight("recolor_pair") - math.log(n) - math.log(n - 1)
            return Proposal(kind, edit, dens, dens)
        f1, f2 = result.added_edge_ids
        co_f1 = post.co_occupant_edges(f1)
        co_f2 = post.co_occupant_edges(f2)
        assert f2 in co_f1 and f1 in co_f2
        log_f = (mp.log_weight("recolor_local") - math.log(n) - math.log(2.0)
                 + math.log(1.0 / len(co_f1) + 1.0 / len(co_f2)))
        removed = set(result.added_edge_ids)
        g1 = Segment(post.vertices[recs[0][1]].point, post.vertices[recs[0][2]].point)
        g2 = Segment(post.vertices[recs[1][1]].point, post.vertices[recs[1][2]].point)
        n1, cells1 = _virtual_co_size(post, g1, removed, None)
        n2, cells2 = _virtual_co_size(post, g2, removed, cells1)
        assert cells1 & cells2, "original pair no longer co-occupies"
        n1 += 1
        log_r = (mp.log_weight("recolor_local") - math.log(n) - math.log(2.0)
                 + math.log(1.0 / n1 + 1.0 / n2))
        return Proposal(kind, edit, log_f, log_r)
    raise ValueError(f"unknown kind {kind}")


def _inverse_birth(post: Coloring, prop: Proposal, result: ApplyResult,
                   mp: MoveParams) -> Proposal:
    kind = INVERSE_KIND[prop.kind]  # the matching death
    edit = Edit(removed_edges=tuple(sorted(result.added_edge_ids)),
                closure=prop.edit.closure)
    w = post.window
    if kind == "triangle_death":
        log_f = mp.log_weight(kind) - math.log(len(list_triangles(post)))
        log_r = (mp.log_weight("triangle_birth") + math.log(6.0)
                 - 3.0 * math.log(w.area))
    elif kind == "wedge_death":
        log_f = mp.log_weight(kind) - math.log(len(list_wedges(post)))
        log_r = (mp.log_weight("wedge_birth") + math.log(2.0)
                 - 2.0 * math.log(w.perimeter) - math.log(w.area))
    else:
        log_f = mp.log_weight(kind) - math.log(len(list_chords(post)))
        log_r = (mp.log_weight("chord_birth") + math.log(2.0)
                 - 2.0 * math.log(w.perimeter))
    return Proposal(kind, edit, log_f, log_r)


def _inverse_death(post: Coloring, prop: Proposal, result: ApplyResult,
                   mp: MoveParams) -> Proposal:
    kind = INVERSE_KIND[prop.kind]  # the matching birth
    token = result.token
    tmp_of = {}
    new_vertices = []
    for i, (vid, x, y, vkind) in enumerate(token.deleted_vertex_records):
        tmp = -(i + 1)
        tmp_of[vid] = tmp
        new_vertices.append((tmp, x, y, vkind))
    added = []
    for _, v1, v2 in token.removed_edge_records:
        added.append((tmp_of.get(v1, v1), tmp_of.get(v2, v2)))
    edit = Edit(new_vertices=tuple(new_vertices), added_edges=tuple(added),
                closure=prop.edit.closure)
    w = post.window
    if kind == "triangle_birth":
        log_f = (mp.log_weight(kind) + math.log(6.0) - 3.0 * math.log(w.area))
        log_r = mp.log_weight("triangle_death") - math.log(len(list_triangles(post)) + 1)
    elif kind == "wedge_birth":
        log_f = (mp.log_weight(kind) + math.log(2.0)
                 - 2.0 * math.log(w.perimeter) - math.log(w.area))
        log_r = mp.log_weight("wedge_death") - math.log(len(list_wedges(post)) + 1)
    else:
        log_f = mp.log_weight(kind) + math.log(2.0) - 2.0 * math.log(w.perimeter)
        log_r = mp.log_weight("chord_death") - math.log(len(list_chords(post)) + 1)
    return Proposal(kind, edit, log_f, log_r)
