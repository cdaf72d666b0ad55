"""Shortest-path completion and non-metric cycle detection.

A cycle is non-metric when one of its edges (necessarily unique) is strictly
longer than the sum of all the others.  Completing a connected graph by
shortest-path distances always yields a metric space; it agrees with the
original labels exactly when no induced non-metric cycle is present, and it
never loses automorphisms.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExhausted, DisconnectedGraph
from .graphs import EdgeLabelledGraph

# Below this size the pure-Fraction Dijkstra is fast enough and simpler.
_EXACT_LIMIT = 64


@dataclass(frozen=True, slots=True)
class CycleWitness:
    """A concrete non-metric cycle: the vertex order, its long edge, and by
    how much the long edge beats the rest (deficit > 0)."""

    vertices: tuple[str, ...]
    long_edge: tuple[str, str]
    deficit: Fraction

    def check(self, g: EdgeLabelledGraph) -> bool:
        """Re-verify this witness against a graph."""
        vs = self.vertices
        n = len(vs)
        if n < 3 or len(set(vs)) != n:
            return False
        labels = []
        for i, u in enumerate(vs):
            v = vs[(i + 1) % n]
            label = g.label(u, v)
            if label is None:
                return False
            labels.append(((u, v) if u < v else (v, u), label))
        table = dict(labels)
        if tuple(sorted(self.long_edge)) != self.long_edge or self.long_edge not in table:
            return False
        long_label = table[self.long_edge]
        rest = sum(label for edge, label in labels) - long_label
        return long_label - rest == self.deficit and self.deficit > 0


def is_connected(g: EdgeLabelledGraph) -> bool:
    if not g.vertices:
        raise ValueError("connectivity of the empty graph is undefined")
    seen = {g.vertices[0]}
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in g.adjacency(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(g.vertices)


def _dijkstra_exact(g: EdgeLabelledGraph, source: str) -> dict[str, Fraction]:
    dist: dict[str, Fraction] = {source: Fraction(0)}
    done: set[str] = set()
    heap: list[tuple[Fraction, str]] = [(Fraction(0), source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, label in g.adjacency(u).items():
            nd = d + label
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def _all_pairs_dense(g: EdgeLabelledGraph) -> dict[tuple[str, str], Fraction] | None:
    """Exact all-pairs distances via float64 Floyd-Warshall on scaled ints.

    Scaled labels are integers; every path sum stays far below 2**53, so the
    float arithmetic is exact.  Returns None when the graph has no dense view
    or the magnitude guard fails, in which case the caller falls back to the
    per-source exact Dijkstra.
    """
    dense = g.dense_matrix()
    if dense is None:
        return None
    index, mat, scale = dense
    n = len(g.vertices)
    top = int(mat.max(initial=0))
    if top and top > (1 << 52) // max(n, 2):
        return None
    dist = mat.astype(np.float64)
    dist[dist < 0] = np.inf
    buf = np.empty_like(dist)
    for z in range(n):
        np.add(dist[:, z, None], dist[None, z, :], out=buf)
        np.minimum(dist, buf, out=dist)
    verts = g.vertices
    cache: dict[int, Fraction] = {}
    out: dict[tuple[str, str], Fraction] = {}
    for i, u in enumerate(verts):
        row = dist[i]
        for j in range(i + 1, n):
            w = int(row[j])
            label = cache.get(w)
            if label is None:
                label = cache[w] = Fraction(w, scale)
            out[(u, verts[j])] = label
    return out


def shortest_path_completion(g: EdgeLabelledGraph) -> EdgeLabelledGraph:
    """Complete graph on the same vertices, labelled by path-length distance.

    Requires a connected, non-empty graph.  Existing labels can only shrink
    (they shrink exactly on edges involved in non-metric cycles); the result
    is always a metric space.
    """
    if not is_connected(g):
        raise DisconnectedGraph("shortest-path completion needs a connected graph")
    verts = g.vertices
    if len(verts) > _EXACT_LIMIT:
        table = _all_pairs_dense(g)
        if table is not None:
            return EdgeLabelledGraph(verts, [(u, v, d) for (u, v), d in table.items()])
    edges = []
    for i, u in enumerate(verts):
        dist = _dijkstra_exact(g, u)
        for v in verts[i + 1 :]:
            edges.append((u, v, dist[v]))
    return EdgeLabelledGraph(verts, edges)


def _cycle_witness(path: list[str], long_edge: tuple[str, str], deficit: Fraction) -> CycleWitness:
    return CycleWitness(vertices=tuple(path), long_edge=long_edge, deficit=deficit)


def find_induced_nonmetric_cycles(g: EdgeLabelledGraph, size: int) -> list[CycleWitness]:
    """All vertex sets of the given size on which g induces a non-metric cycle.

    Enumeration is anchored at the long edge: for each edge, depth-first
    search for the unique short path that would close an induced cycle with a
    strictly smaller total.  Each qualifying set is found exactly once; the
    result is sorted by vertex set.  Exhaustive, no budget.
    """
    if size < 3:
        raise ValueError("cycles have at least 3 vertices")
    spectrum = g.spectrum()
    if not spectrum:
        return []
    smallest = spectrum[0]
    need = size - 1  # edges on the short side
    found: list[tuple[tuple[str, ...], CycleWitness]] = []

    for u, v, long_label in g.edges():
        if long_label <= need * smallest:
            continue
        adj_v = g.adjacency(v)
        path = [u]
        on_path = {u}

        def grow(last: str, total: Fraction, used: int) -> None:
            remaining = need - used
            if remaining == 1:
                closing = adj_v.get(last)
                if closing is not None and total + closing < long_label:
                    cycle = path + [v]
                    deficit = long_label - (total + closing)
                    found.append((tuple(sorted(cycle)), _cycle_witness(cycle, (u, v), deficit)))
                return
            floor = (remaining - 1) * smallest
            for label, bucket in g.neighbors_by_label(last).items():
                if total + label + floor >= long_label:
                    continue
                for w in bucket:
                    if w == v or w in on_path:
                        continue
                    # induced: w may touch the path only at its predecessor,
                    # and may touch v only as the final intermediate
                    row = g.adjacency(w)
                    if remaining > 2 and v in row:
                        continue
                    ok = True
                    for p in path:
                        if p != last and p in row:
                            ok = False
                            break
                    if not ok:
                        continue
                    path.append(w)
                    on_path.add(w)
                    grow(w, total + label, used + 1)
                    path.pop()
                    on_path.remove(w)

        grow(u, Fraction(0), 0)

    found.sort(key=lambda pair: pair[0])
    return [witness for _, witness in found]


def has_nonmetric_cycle_up_to(
    g: EdgeLabelledGraph, max_vertices: int, budget: int = 10_000_000
) -> CycleWitness | None:
    """First non-metric cycle (not necessarily induced) with at most the given
    number of vertices, or None when there is none.

    The search walks short paths out of each candidate long edge, cheapest
    labels first, and counts every extension against the budget; running out
    raises BudgetExhausted rather than reporting a false absence.
    """
    if max_vertices < 3:
        raise ValueError("cycles have at least 3 vertices")
    spectrum = g.spectrum()
    if not spectrum:
        return None
    smallest = spectrum[0]
    steps = max_vertices - 1
    remaining = budget

    for u, v, long_label in g.edges():
        if long_label <= 2 * smallest:
            continue
        adj_v = g.adjacency(v)
        path = [u]
        on_path = {u}

        def walk(last: str, total: Fraction) -> CycleWitness | None:
            nonlocal remaining
            if remaining <= 0:
                raise BudgetExhausted(
                    f"cycle search budget {budget} exhausted at edge ({u!r}, {v!r})"
                )
            remaining -= 1
            if len(path) >= 2:
                closing = adj_v.get(last)
                if closing is not None and total + closing < long_label:
                    return _cycle_witness(path + [v], (u, v), long_label - (total + closing))
            if len(path) >= steps:
                return None
            for label, bucket in g.neighbors_by_label(last).items():
                if total + label + smallest >= long_label:
                    continue
                for w in bucket:
                    if w == v or w in on_path:
                        continue
                    path.append(w)
                    on_path.add(w)
                    got = walk(w, total + label)
                    if got is not None:
                        return got
                    path.pop()
                    on_path.remove(w)
            return None

        got = walk(u, Fraction(0))
        if got is not None:
            return got
    return None
