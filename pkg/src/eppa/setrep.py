"""Set representation: one-step extension of all partial automorphisms.

Every vertex x of a finite edge-labelled graph A receives a k-element token
set psi(x) such that psi(x) and psi(y) share exactly idx(d(x,y)) tokens,
where idx numbers A's distinct labels in ascending order starting at 1 (and
non-adjacent vertices share nothing).  The derived graph B has all k-element
subsets of the token universe as vertices, two subsets being joined by the
i-th smallest label of A exactly when they share i tokens.  Then psi embeds A
into B, and any partial automorphism of the copy extends to an automorphism
of B induced by a permutation of the tokens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .errors import GraphFormatError, InvalidMap, UnknownVertex, VertexCapExceeded
from .graphs import (
    EdgeLabelledGraph,
    PartialMap,
    check_vertex_name,
    is_partial_automorphism,
)

# Token syntax.  Pair tokens "(x,y)#i" are shared by psi(x) and psi(y);
# padding tokens "x!t" are private to psi(x).  Unambiguous because the
# characters ( ) , # ! | { } are reserved in input vertex names.


def pair_token(x: str, y: str, i: int) -> str:
    if x > y:
        x, y = y, x
    return f"({x},{y})#{i}"


def padding_token(x: str, t: int) -> str:
    # slots are numbered from 1
    return f"{x}!{t}"


def parse_token(token: str) -> tuple[str, str, int] | tuple[str, int]:
    """(x, y, i) for a pair token, (x, t) for a padding token."""
    if token.startswith("("):
        body, _, tail = token.rpartition(")#")
        x, _, y = body[1:].partition(",")
        if not (x and y and tail.isdigit()):
            raise GraphFormatError(f"malformed pair token {token!r}")
        return x, y, int(tail)
    head, bang, tail = token.rpartition("!")
    if not (bang and head and tail.isdigit()):
        raise GraphFormatError(f"malformed token {token!r}")
    return head, int(tail)


def token_sort_key(token: str) -> tuple[int, str, str, int]:
    """Fixed linear order on tokens: pair tokens first, then padding, each
    block ordered by the named vertices and the running index."""
    parsed = parse_token(token)
    if len(parsed) == 3:
        x, y, i = parsed
        return (0, x, y, i)
    x, t = parsed
    return (1, x, "", t)


def subset_id(tokens: Iterable[str]) -> str:
    return "{" + "|".join(sorted(tokens, key=token_sort_key)) + "}"


def parse_subset_id(vertex: str) -> frozenset[str]:
    if not (vertex.startswith("{") and vertex.endswith("}")) or len(vertex) < 3:
        raise GraphFormatError(f"not a token-subset vertex id: {vertex!r}")
    tokens = vertex[1:-1].split("|")
    out = frozenset(tokens)
    if len(out) != len(tokens):
        raise GraphFormatError(f"repeated token in vertex id {vertex!r}")
    return out


@dataclass(frozen=True)
class SetAssignment:
    """A token-set assignment for the vertices of `graph`.

    `psi` maps each vertex to a frozenset of token strings and `universe` is
    their union in token order.  `problems()` lists every violated condition;
    a clean assignment guarantees the subset construction embeds the graph.
    """

    graph: EdgeLabelledGraph
    k: int
    psi: Mapping[str, frozenset[str]]
    universe: tuple[str, ...]

    def problems(self) -> list[str]:
        a = self.graph
        idx = spectrum_index(a)
        out: list[str] = []
        if self.k < 1:
            out.append(f"k = {self.k} < 1")
        if sorted(self.psi) != list(a.vertices):
            out.append("psi is not defined on exactly the graph's vertices")
            return out
        union: set[str] = set()
        owners: dict[str, list[str]] = {}
        for x in a.vertices:
            tokens = self.psi[x]
            if len(tokens) != self.k:
                out.append(f"|psi({x})| = {len(tokens)} != k = {self.k}")
            union.update(tokens)
            for token in tokens:
                owners.setdefault(token, []).append(x)
        if tuple(sorted(union, key=token_sort_key)) != self.universe:
            out.append("universe is not the sorted union of the psi sets")
        for token, who in owners.items():
            try:
                parsed = parse_token(token)
            except GraphFormatError:
                out.append(f"token {token!r} matches neither token syntax")
                continue
            if len(parsed) == 3:
                x, y, i = parsed
                d = a.label(x, y) if (x in a and y in a) else None
                if d is None or not 1 <= i <= idx[d] or x >= y:
                    out.append(f"pair token {token!r} does not match an edge slot")
                elif set(who) != {x, y}:
                    out.append(f"pair token {token!r} not owned by exactly {x!r} and {y!r}")
            else:
                x, t = parsed
                if x not in a or t < 1:
                    out.append(f"padding token {token!r} names an unknown vertex or slot")
                elif who != [x]:
                    out.append(f"padding token {token!r} not private to {x!r}")
        for x, y, d in a.edges():
            need = frozenset(pair_token(x, y, i) for i in range(1, idx[d] + 1))
            got = self.psi[x] & self.psi[y]
            if got != need:
                out.append(f"psi({x}) and psi({y}) share {sorted(got)}, expected {sorted(need)}")
        for x, y in combinations(a.vertices, 2):
            if a.label(x, y) is None and self.psi[x] & self.psi[y]:
                out.append(f"non-adjacent {x!r}, {y!r} share tokens")
        return out

    def check(self) -> bool:
        return not self.problems()


def spectrum_index(a: EdgeLabelledGraph) -> dict[Fraction, int]:
    """Label -> 1-based rank in the ascending spectrum."""
    return {s: j for j, s in enumerate(a.spectrum(), start=1)}


def token_load(a: EdgeLabelledGraph, x: str) -> int:
    """Number of pair tokens psi(x) must carry."""
    idx = spectrum_index(a)
    return sum(idx[d] for d in a.adjacency(x).values())


def build_set_assignment(a: EdgeLabelledGraph) -> SetAssignment:
    """Canonical assignment with k one above the heaviest pair-token load.

    The extra padding slot keeps psi injective even when two vertices would
    otherwise share their full token sets (e.g. a two-vertex graph).
    """
    for x in a.vertices:
        check_vertex_name(x)
    idx = spectrum_index(a)
    loads = {x: token_load(a, x) for x in a.vertices}
    k = 1 + max(loads.values(), default=0)
    psi: dict[str, frozenset[str]] = {}
    for x in a.vertices:
        tokens = [
            pair_token(x, y, i)
            for y, d in a.adjacency(x).items()
            for i in range(1, idx[d] + 1)
        ]
        tokens.extend(padding_token(x, t) for t in range(1, k - loads[x] + 1))
        psi[x] = frozenset(tokens)
    universe = tuple(sorted(set().union(*psi.values()), key=token_sort_key))
    return SetAssignment(graph=a, k=k, psi=psi, universe=universe)


def build_eppa_graph(
    a: EdgeLabelledGraph,
    sa: SetAssignment | None = None,
    vertex_cap: int = 200_000,
) -> tuple[EdgeLabelledGraph, PartialMap]:
    """The k-subset graph over the token universe plus the embedding of A.

    Every partial automorphism of the embedded copy extends to an
    automorphism of the result (see `extend_by_permutation`).
    """
    if len(a) == 0:
        raise GraphFormatError("need at least one vertex")
    if sa is None:
        sa = build_set_assignment(a)
    elif sa.graph != a:
        raise InvalidMap("set assignment was built for a different graph")
    problems = sa.problems()
    if problems:
        raise GraphFormatError("set assignment is invalid: " + "; ".join(problems[:3]))
    universe = sa.universe
    m, k = len(universe), sa.k
    count = math.comb(m, k)
    if count > vertex_cap:
        raise VertexCapExceeded("level 2 (set representation)", count, vertex_cap)
    spectrum = a.spectrum()
    n = len(spectrum)

    # subsets as bitmasks over the universe for fast intersection sizes
    subsets = list(combinations(range(m), k))
    ids = [subset_id(universe[p] for p in positions) for positions in subsets]
    masks = [sum(1 << p for p in positions) for positions in subsets]
    edges = []
    for ia in range(count):
        mask_a, id_a = masks[ia], ids[ia]
        for ib in range(ia + 1, count):
            c = (mask_a & masks[ib]).bit_count()
            if 1 <= c <= n:
                edges.append((id_a, ids[ib], spectrum[c - 1]))
    b = EdgeLabelledGraph(ids, edges)
    embedding = PartialMap({x: subset_id(sa.psi[x]) for x in a.vertices})
    return b, embedding


def extend_by_permutation(
    a: EdgeLabelledGraph,
    sa: SetAssignment,
    phi: PartialMap,
    coherent: bool = True,
) -> PartialMap:
    """Token permutation inducing an automorphism of the subset graph that
    extends the given partial automorphism of A.

    Shared pair tokens are transported along phi first; each mapped vertex
    then has its leftover tokens matched against the leftovers of its image,
    and finally the untouched remainder of the universe is matched with
    itself.  With `coherent` the two matching stages pair tokens in the fixed
    token order on both sides, which makes extension commute with
    composition; otherwise the image side is deliberately taken in reverse
    order, which in general breaks that (see the composition tests).
    """
    for x in phi.domain():
        if x not in a:
            raise UnknownVertex(f"unknown vertex {x!r}")
    for x in phi.image():
        if x not in a:
            raise UnknownVertex(f"unknown vertex {x!r}")
    if not is_partial_automorphism(phi, a):
        raise InvalidMap("map does not preserve distances on its domain")
    idx = spectrum_index(a)
    pi: dict[str, str] = {}
    hit: set[str] = set()

    # shared tokens of mapped pairs travel with their endpoints
    dom = phi.domain()
    for x, y in combinations(dom, 2):
        d = a.label(x, y)
        if d is None:
            continue
        for i in range(1, idx[d] + 1):
            src, dst = pair_token(x, y, i), pair_token(phi[x], phi[y], i)
            pi[src] = dst
            hit.add(dst)

    def match(sources: list[str], targets: list[str]) -> None:
        if len(sources) != len(targets):
            raise InvalidMap(
                f"leftover token counts differ ({len(sources)} vs {len(targets)})"
            )
        if not coherent:
            targets = targets[::-1]
        for src, dst in zip(sources, targets):
            pi[src] = dst
            hit.add(dst)

    # per-vertex leftovers: image sets of distinct mapped vertices are
    # disjoint outside the tokens already placed above
    for x in dom:
        sources = sorted((t for t in sa.psi[x] if t not in pi), key=token_sort_key)
        targets = sorted((t for t in sa.psi[phi[x]] if t not in hit), key=token_sort_key)
        match(sources, targets)

    rest_src = sorted((t for t in sa.universe if t not in pi), key=token_sort_key)
    rest_dst = sorted((t for t in sa.universe if t not in hit), key=token_sort_key)
    match(rest_src, rest_dst)
    return PartialMap(pi)


def subset_automorphism(pi: PartialMap, b: EdgeLabelledGraph) -> PartialMap:
    """Automorphism of the subset graph induced by a token permutation."""
    table = {}
    for vertex in b.vertices:
        tokens = parse_subset_id(vertex)
        image = subset_id(pi[t] for t in tokens)
        if image not in b:
            raise InvalidMap(f"token permutation leaves the graph at {vertex!r}")
        table[vertex] = image
    return PartialMap(table)
