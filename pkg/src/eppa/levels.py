"""Level-by-level elimination of short non-metric cycles.

Level i+1 replaces every vertex x of level i by one copy per 0/1-valuation of
the bad sets through x, where a bad set is an (i+1)-element vertex set whose
induced subgraph is a non-metric cycle.  Edges survive between copies that
agree on every shared bad set, except across the cycle's long edge where they
must disagree.  Walking any bad cycle then forces a bit to both flip and stay
equal, so level i+1 induces no non-metric cycle on i+1 or fewer vertices,
while a fixed copy of the original space and the extendability of its partial
automorphisms are both carried upward.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

import numpy as np

from .completion import CycleWitness, find_induced_nonmetric_cycles
from .errors import GraphFormatError, InvalidMap, NotAMetricSpace, VertexCapExceeded
from .graphs import EdgeLabelledGraph, PartialMap, check_map, induced_subgraph, is_metric_space


@dataclass(frozen=True)
class BadSet:
    """A vertex set inducing a non-metric cycle, with the full witness and
    the (unique) long edge."""

    members: frozenset[str]
    long_edge: tuple[str, str]
    cycle: CycleWitness

    def sort_key(self) -> tuple[str, ...]:
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class LevelGraph:
    """One level of the construction tower.

    `bad_sets` are the bad sets of the level below that this level's
    valuations range over (empty at the base level), and `projection` maps
    every vertex to the one below it (empty at the base level).
    `base_embedding` places the original space inside this level.
    """

    graph: EdgeLabelledGraph
    level: int
    base_embedding: PartialMap
    projection: Mapping[str, str]
    bad_sets: tuple[BadSet, ...]

    def bad_set_index(self) -> dict[frozenset[str], int]:
        return {m.members: j for j, m in enumerate(self.bad_sets)}

    def membership(self) -> dict[str, tuple[int, ...]]:
        """Vertex of the level below -> indices of the bad sets through it."""
        below: dict[str, list[int]] = {}
        for j, m in enumerate(self.bad_sets):
            for x in m.members:
                below.setdefault(x, []).append(j)
        return {x: tuple(js) for x, js in below.items()}


def bad_sets(g: EdgeLabelledGraph, cycle_size: int) -> tuple[BadSet, ...]:
    """All vertex sets of the given size on which g induces a non-metric
    cycle, in canonical order."""
    out = []
    for w in find_induced_nonmetric_cycles(g, cycle_size):
        out.append(BadSet(members=frozenset(w.vertices), long_edge=w.long_edge, cycle=w))
    return tuple(out)


def level_vertex_id(base: str, bits: Iterable[int]) -> str:
    return base + ";" + "".join("01"[b] for b in bits)


def parse_level_vertex(vid: str) -> tuple[str, str]:
    base, sep, bits = vid.rpartition(";")
    if not sep or not base or any(c not in "01" for c in bits):
        raise GraphFormatError(f"not a valuation vertex id: {vid!r}")
    return base, bits


def anchor_valuations(
    g: EdgeLabelledGraph, copy_vertices: Iterable[str], bad: tuple[BadSet, ...]
) -> dict[tuple[BadSet, str], int]:
    """Fixed valuation bits for the embedded copy, keyed (bad set, vertex).

    The copy is complete and metric, so it meets each bad cycle in at most
    one edge; across the long edge the bits must differ (smaller name gets
    0), anywhere else they are 0.
    """
    copy = set(copy_vertices)
    anchors: dict[tuple[BadSet, str], int] = {}
    for m in bad:
        hit = sorted(m.members & copy)
        if not hit:
            continue
        if len(hit) > 2:
            raise NotAMetricSpace(
                f"embedded copy meets bad set {sorted(m.members)} in {len(hit)} vertices"
            )
        if len(hit) == 2 and g.label(hit[0], hit[1]) is None:
            raise NotAMetricSpace(
                f"embedded copy meets bad set {sorted(m.members)} in a non-edge"
            )
        if tuple(hit) == tuple(sorted(m.long_edge)):
            anchors[(m, hit[0])] = 0
            anchors[(m, hit[1])] = 1
        else:
            for x in hit:
                anchors[(m, x)] = 0
    return anchors


def build_next_level(
    prev: LevelGraph,
    a_i: Iterable[str] | None = None,
    vertex_cap: int = 200_000,
) -> LevelGraph:
    """Expand a level by 0/1-valuations of its bad sets of the next size up.

    The result induces no non-metric cycle on at most level+1 vertices and
    carries a copy of the original space at anchored valuations.  `a_i`, if
    given, must name the embedded copy (the image of `prev.base_embedding`).
    """
    g = prev.graph
    copy_vertices = tuple(prev.base_embedding.image())
    if a_i is not None and sorted(a_i) != list(copy_vertices):
        raise InvalidMap("a_i does not match the embedded copy of this level")
    copy = induced_subgraph(g, copy_vertices)
    if not is_metric_space(copy):
        raise NotAMetricSpace("embedded copy is not a metric space")
    bad = bad_sets(g, prev.level + 1)
    member_idx: dict[str, tuple[int, ...]] = {x: () for x in g.vertices}
    for j, m in enumerate(bad):
        for x in m.members:
            member_idx[x] = member_idx[x] + (j,)

    needed = sum(1 << len(member_idx[x]) for x in g.vertices)
    if needed > vertex_cap:
        raise VertexCapExceeded(
            f"level {prev.level + 1} (valuation expansion)", needed, vertex_cap
        )

    vertex_ids: dict[str, list[tuple[str, tuple[int, ...]]]] = {}
    projection: dict[str, str] = {}
    for x in g.vertices:
        copies = []
        for bits in product((0, 1), repeat=len(member_idx[x])):
            vid = level_vertex_id(x, bits)
            copies.append((vid, bits))
            projection[vid] = x
        vertex_ids[x] = copies

    edges = []
    for x, y, d in g.edges():
        jx, jy = member_idx[x], member_idx[y]
        jy_set = set(jy)
        shared = [j for j in jx if j in jy_set]
        pos_x = {j: p for p, j in enumerate(jx)}
        pos_y = {j: p for p, j in enumerate(jy)}
        want_diff = [
            (pos_x[j], pos_y[j], bad[j].long_edge == ((x, y) if x < y else (y, x)))
            for j in shared
        ]
        for vx, bx in vertex_ids[x]:
            for vy, by in vertex_ids[y]:
                ok = True
                for px, py, diff in want_diff:
                    if (bx[px] != by[py]) != diff:
                        ok = False
                        break
                if ok:
                    edges.append((vx, vy, d))

    graph = EdgeLabelledGraph(projection.keys(), edges)

    anchors = anchor_valuations(g, copy_vertices, bad)
    embedding = {}
    for a, x in prev.base_embedding.items():
        bits = tuple(anchors[(bad[j], x)] for j in member_idx[x])
        embedding[a] = level_vertex_id(x, bits)
    return LevelGraph(
        graph=graph,
        level=prev.level + 1,
        base_embedding=PartialMap(embedding),
        projection=projection,
        bad_sets=bad,
    )


def project_map(nxt: LevelGraph, phi: PartialMap) -> PartialMap:
    """Push a partial map of this level down to the level below."""
    return PartialMap(
        {nxt.projection[u]: nxt.projection[v] for u, v in phi.items()}
    )


def compute_flip_set(
    prev: LevelGraph, nxt: LevelGraph, phi: PartialMap, hat_phi: PartialMap
) -> frozenset[BadSet]:
    """Bad sets whose valuation the lifted automorphism must invert.

    `phi` is a partial automorphism of the embedded copy at level `nxt` and
    `hat_phi` an automorphism of `prev` (the level below) extending its
    projection.  A bad set flips when some vertex of it carries an anchored
    copy mapped by `phi` whose bit disagrees with the bit of the image vertex
    at the image bad set; the construction guarantees all witnesses of one
    bad set agree, which is re-checked here.
    """
    if sorted(hat_phi.domain()) != list(prev.graph.vertices):
        raise InvalidMap("expected a total automorphism of the level below")
    index_of = nxt.bad_set_index()
    bit_at: dict[tuple[str, int], int] = {}
    member = nxt.membership()
    dom_by_base: dict[str, str] = {}
    for u in phi.domain():
        base, bits = parse_level_vertex(u)
        dom_by_base[base] = u
        for p, j in enumerate(member.get(base, ())):
            bit_at[(base, j)] = int(bits[p])
    image_bits: dict[tuple[str, int], int] = {}
    for u in phi.domain():
        v = phi[u]
        base, bits = parse_level_vertex(v)
        for p, j in enumerate(member.get(base, ())):
            image_bits[(base, j)] = int(bits[p])

    flips: set[BadSet] = set()
    for j, m in enumerate(nxt.bad_sets):
        target_members = frozenset(hat_phi[x] for x in m.members)
        jt = index_of.get(target_members)
        if jt is None:
            raise InvalidMap(
                f"automorphism of the lower level does not map bad set "
                f"{sorted(m.members)} to a bad set"
            )
        verdicts = []
        for x in sorted(m.members):
            u = dom_by_base.get(x)
            if u is None:
                continue
            y = parse_level_vertex(phi[u])[0]
            if y != hat_phi[x]:
                raise InvalidMap("lower-level automorphism does not extend the projection")
            verdicts.append(bit_at[(x, j)] != image_bits[(y, jt)])
        if not verdicts:
            continue
        if len(set(verdicts)) != 1:
            raise InvalidMap(
                f"inconsistent flip evidence on bad set {sorted(m.members)}"
            )
        if verdicts[0]:
            flips.add(m)
    return frozenset(flips)


def lift_automorphism(
    prev: LevelGraph,
    nxt: LevelGraph,
    hat_phi: PartialMap,
    flips: frozenset[BadSet] = frozenset(),
) -> PartialMap:
    """Lift an automorphism of the level below, inverting the given bad sets.

    The result moves each valuation copy of x to a valuation copy of
    hat_phi(x), transporting every bit to the image bad set and inverting it
    exactly on the flip set.  The lift is verified to be an automorphism that
    commutes with the projection before it is returned.
    """
    if sorted(hat_phi.domain()) != list(prev.graph.vertices):
        raise InvalidMap("expected a total automorphism of the level below")
    if not _automorphism_ok(prev.graph, hat_phi):
        raise InvalidMap("map of the level below is not an automorphism")
    index_of = nxt.bad_set_index()
    member = nxt.membership()
    target_index: dict[int, int] = {}
    flip_index: set[int] = set()
    for j, m in enumerate(nxt.bad_sets):
        jt = index_of.get(frozenset(hat_phi[x] for x in m.members))
        if jt is None:
            raise InvalidMap(
                f"automorphism of the lower level does not map bad set "
                f"{sorted(m.members)} to a bad set"
            )
        target_index[j] = jt
        if m in flips:
            flip_index.add(j)

    table: dict[str, str] = {}
    for vid in nxt.graph.vertices:
        base, bits = parse_level_vertex(vid)
        y = hat_phi[base]
        out_bits: dict[int, int] = {}
        for p, j in enumerate(member.get(base, ())):
            out_bits[target_index[j]] = int(bits[p]) ^ (j in flip_index)
        new_bits = tuple(out_bits[j] for j in member.get(y, ()))
        table[vid] = level_vertex_id(y, new_bits)
    theta = PartialMap(table)

    for vid, target in table.items():
        if nxt.projection[target] != hat_phi[nxt.projection[vid]]:
            raise InvalidMap("lift does not commute with the projection")
    if not _automorphism_ok(nxt.graph, theta):
        raise InvalidMap("lift is not an automorphism")
    return theta


def _automorphism_ok(g: EdgeLabelledGraph, f: PartialMap) -> bool:
    """Automorphism test, via a dense permutation check when available."""
    if len(f) != len(g) or set(f.image()) != set(g.vertices):
        return False
    dense = g.dense_matrix()
    if dense is None:
        return check_map(f, g, g, "automorphism")
    index, mat, _ = dense
    perm = np.fromiter((index[f[v]] for v in g.vertices), dtype=np.intp, count=len(g))
    return bool(np.array_equal(mat[perm][:, perm], mat))
