"""Brute-force verification, independent of the construction code.

Everything here re-derives its verdicts from first principles: distance
preservation, automorphism checks, and the enumeration of partial isometries
are all implemented locally rather than calling the pipeline's helpers, so a
bug in the construction cannot silently vouch for itself.  `cross_check`
re-validates every stored layer of a witness; `verify_eppa` brute-forces the
extension property itself on small spaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Iterator

import numpy as np

from .completion import has_nonmetric_cycle_up_to, shortest_path_completion
from .errors import BudgetExhausted, EppaError, UnknownVertex
from .graphs import EdgeLabelledGraph, PartialMap, induced_subgraph
from .levels import parse_level_vertex
from .pipeline import Witness, extend_isometry
from .setrep import parse_subset_id, token_sort_key


@dataclass(frozen=True)
class CheckResult:
    """One named verdict; failing checks carry a concrete counterexample
    (a map or a cycle witness)."""

    name: str
    passed: bool
    detail: str = ""
    skipped: bool = False
    counterexample: object | None = None


@dataclass
class VerificationReport:
    """Verdicts plus bookkeeping: how much was examined and whether any
    search gave up on its node budget rather than finishing."""

    results: list[CheckResult] = field(default_factory=list)
    totals: dict[str, int] = field(default_factory=dict)
    budget_exhausted: bool = False

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results if not r.skipped)

    def add(
        self,
        name: str,
        passed: bool,
        detail: str = "",
        skipped: bool = False,
        counterexample: object | None = None,
    ) -> None:
        self.results.append(CheckResult(name, passed, detail, skipped, counterexample))

    def count(self, key: str, amount: int = 1) -> None:
        self.totals[key] = self.totals.get(key, 0) + amount

    def summary(self) -> str:
        lines = []
        for r in self.results:
            mark = "SKIP" if r.skipped else ("ok" if r.passed else "FAIL")
            lines.append(f"[{mark:>4}] {r.name}" + (f": {r.detail}" if r.detail else ""))
        for key in sorted(self.totals):
            lines.append(f"examined {key}: {self.totals[key]}")
        if self.budget_exhausted:
            lines.append("search budget exhausted: results above are incomplete")
        verdict = "PASS" if self.ok else "FAIL"
        lines.append(f"overall: {verdict}")
        return "\n".join(lines)


# -- independent primitives -------------------------------------------------


def _distances_ok(f: PartialMap, g: EdgeLabelledGraph) -> bool:
    pairs = f.items()
    for i, (u, fu) in enumerate(pairs):
        for v, fv in pairs[i + 1 :]:
            if g.label(u, v) != g.label(fu, fv):
                return False
    return True


def _is_full_isometry(f: PartialMap, g: EdgeLabelledGraph) -> bool:
    if len(f) != len(g) or set(f.domain()) != set(g.vertices):
        return False
    if set(f.image()) != set(g.vertices):
        return False
    return _distances_ok(f, g)


def _enumerate_partial_isometries(
    g: EdgeLabelledGraph, domain_pool: Iterable[str], max_size: int
) -> Iterator[PartialMap]:
    """All distance-preserving injective maps with domain and image inside
    the pool, the empty map first, then by domain size."""
    pool = sorted(domain_pool)
    yield PartialMap({})
    for size in range(1, max_size + 1):
        for dom in combinations(pool, size):
            for img in permutations(pool, size):
                f = dict(zip(dom, img))
                ok = True
                for u, v in combinations(dom, 2):
                    if g.label(u, v) != g.label(f[u], f[v]):
                        ok = False
                        break
                if ok:
                    yield PartialMap(f)


def _label_signature(g: EdgeLabelledGraph, v: str):
    return tuple(sorted(g.adjacency(v).values()))


def search_extension(
    b: EdgeLabelledGraph, phi: PartialMap, budget: int = 10_000_000
) -> PartialMap | None:
    """Backtracking search for a full isometry of b extending phi.

    Maintains forward-checked candidate sets per unassigned vertex, branches
    on the smallest unassigned vertex (preferring forced, single-candidate
    ones) and tries images in sorted order; since forced moves are shared by
    every completion, a successful search still returns the lexicographically
    least extension.  Every attempted assignment counts against the budget;
    exceeding it raises BudgetExhausted instead of guessing.
    """
    for v in list(phi.domain()) + list(phi.image()):
        if v not in b:
            raise UnknownVertex(f"unknown vertex {v!r}")
    if not _distances_ok(phi, b):
        return None

    verts = list(b.vertices)
    assigned: dict[str, str] = dict(phi.items())
    used: set[str] = set(phi.image())
    signature = {v: _label_signature(b, v) for v in verts}
    cand: dict[str, set[str]] = {}
    for v in verts:
        if v in assigned:
            continue
        opts = {
            w
            for w in verts
            if w not in used
            and signature[w] == signature[v]
            and all(b.label(v, u) == b.label(w, img) for u, img in assigned.items())
        }
        if not opts:
            return None
        cand[v] = opts

    spent = 0
    trail: list[tuple[str, str]] = []

    def undo(mark: int) -> None:
        while len(trail) > mark:
            u, lost = trail.pop()
            cand[u].add(lost)

    def place() -> bool:
        nonlocal spent
        pick = None
        for v in verts:
            if v in assigned:
                continue
            k = len(cand[v])
            if k == 0:
                return False
            if k == 1:
                pick = v
                break
            if pick is None:
                pick = v
        if pick is None:
            return True
        v = pick
        opts_v = cand.pop(v)
        for w in sorted(opts_v):
            spent += 1
            if spent > budget:
                cand[v] = opts_v
                raise BudgetExhausted(f"extension search budget {budget} exhausted")
            assigned[v] = w
            used.add(w)
            mark = len(trail)
            alive = True
            for u, opts in cand.items():
                lab = b.label(u, v)
                dead = [w2 for w2 in opts if w2 == w or b.label(w2, w) != lab]
                for w2 in dead:
                    opts.remove(w2)
                    trail.append((u, w2))
                if not opts:
                    alive = False
                    break
            if alive and place():
                return True
            undo(mark)
            del assigned[v]
            used.discard(w)
        cand[v] = opts_v
        return False

    if not place():
        return None
    return PartialMap(assigned)


def naive_extension_exists(b: EdgeLabelledGraph, phi: PartialMap) -> bool:
    """Oracle for tiny graphs: try all vertex permutations."""
    if len(b) > 8:
        raise ValueError("oracle is factorial; use search_extension instead")
    verts = list(b.vertices)
    want = dict(phi.items())
    for perm in permutations(verts):
        f = dict(zip(verts, perm))
        if any(f[u] != img for u, img in want.items()):
            continue
        if _distances_ok(PartialMap(f), b):
            return True
    return False


def verify_eppa(
    b: EdgeLabelledGraph,
    copy_vertices: Iterable[str],
    budget: int = 10_000_000,
    max_domain: int | None = None,
) -> VerificationReport:
    """Check that every partial isometry of the copy extends to b.

    Enumerates every distance-preserving injective map within the copy and
    searches for a total automorphism of b extending each; one check per
    map.  Running out of search budget is a report state (the remaining maps
    are not examined), never a failure verdict.  Enumeration and search are
    both local to this module.
    """
    copy = sorted(copy_vertices)
    for v in copy:
        if v not in b:
            raise UnknownVertex(f"unknown vertex {v!r}")
    limit = len(copy) if max_domain is None else max_domain
    report = VerificationReport()
    for j, phi in enumerate(_enumerate_partial_isometries(b, copy, limit)):
        shown = dict(phi.items())
        try:
            found = search_extension(b, phi, budget=budget)
        except BudgetExhausted as exc:
            report.add(f"extends-{j}", False, f"{exc} on {shown}", skipped=True,
                       counterexample=phi)
            report.budget_exhausted = True
            break
        report.count("partial_maps")
        if found is None:
            report.add(f"extends-{j}", False, f"no extension of {shown}",
                       counterexample=phi)
        else:
            report.add(f"extends-{j}", True)
            report.count("extensions_found")
    return report


# -- witness cross-checking -------------------------------------------------


def _check_metric(report: VerificationReport, g: EdgeLabelledGraph, name: str) -> None:
    verts = g.vertices
    for u, v in combinations(verts, 2):
        if g.label(u, v) is None:
            report.add(name, False, f"missing distance between {u!r} and {v!r}")
            return
    n = len(verts)
    dense = g.dense_matrix() if n > 64 else None
    if dense is not None:
        # complete by the check above, so no -1 entries remain off-diagonal
        _, mat, _ = dense
        for k in range(n):
            viol = mat > mat[:, k, None] + mat[None, k, :]
            if viol.any():
                i, j = map(int, np.argwhere(viol)[0])
                bad = (verts[i], verts[j], verts[k])
                report.add(name, False,
                           f"triangle inequality fails on {bad[0]!r},{bad[1]!r},{bad[2]!r}",
                           counterexample=bad)
                return
        report.add(name, True)
        return
    for u, v, w in combinations(verts, 3):
        duv, duw, dvw = g.label(u, v), g.label(u, w), g.label(v, w)
        if duv > duw + dvw or duw > duv + dvw or dvw > duv + duw:
            report.add(name, False, f"triangle inequality fails on {u!r},{v!r},{w!r}",
                       counterexample=(u, v, w))
            return
    report.add(name, True)


def _check_subset_level(report: VerificationReport, w: Witness) -> None:
    lvl = w.levels[0]
    g = lvl.graph
    sa = w.set_assignment
    if sa is not None:
        problems = sa.problems()
        report.add("token-assignment", not problems, "; ".join(problems[:3]))
        expected = sorted(
            ("{" + "|".join(sorted(c, key=token_sort_key)) + "}")
            for c in combinations(sa.universe, sa.k)
        )
        report.add(
            "subset-vertices",
            list(g.vertices) == expected,
            "vertex set is not all k-subsets of the universe" if list(g.vertices) != expected else "",
        )
    spectrum = w.input.spectrum()
    n = len(spectrum)
    bad = None
    bad_pair = None
    bit_of: dict[str, int] = {}
    mask: dict[str, int] = {}
    for vid in g.vertices:
        m = 0
        for t in parse_subset_id(vid):
            m |= 1 << bit_of.setdefault(t, len(bit_of))
        mask[vid] = m
    for u, v in combinations(g.vertices, 2):
        shared = (mask[u] & mask[v]).bit_count()
        want = spectrum[shared - 1] if 1 <= shared <= n else None
        if g.label(u, v) != want:
            bad = f"{u!r} ~ {v!r}: shares {shared}, label {g.label(u, v)}, expected {want}"
            bad_pair = (u, v)
            break
    report.add("subset-edge-rule", bad is None, bad or "", counterexample=bad_pair)
    emb = lvl.base_embedding
    ok = set(emb.domain()) == set(w.input.vertices) and all(v in g for v in emb.image())
    if ok and sa is not None:
        ok = all(parse_subset_id(emb[x]) == frozenset(sa.psi[x]) for x in w.input.vertices)
    report.add("subset-embedding", ok)


def _expected_anchor_bit(m, x: str, copy: set[str]) -> int:
    """Anchor rule, restated locally: across the long edge the smaller name
    gets 0 and the larger 1; any other contact with the copy gets 0."""
    hit = sorted(m.members & copy)
    if tuple(hit) == m.long_edge:
        return 0 if x == hit[0] else 1
    return 0


def _check_transition(report: VerificationReport, w: Witness, idx: int) -> None:
    below, lvl = w.levels[idx - 1], w.levels[idx]
    tag = f"level-{lvl.level}"
    from .levels import bad_sets  # thin wrapper over the cycle finder

    expected_bad = bad_sets(below.graph, lvl.level)
    if expected_bad != lvl.bad_sets:
        report.add(f"{tag}-bad-sets", False, "stored bad sets differ from recomputation")
        return
    report.add(f"{tag}-bad-sets", True, f"{len(expected_bad)} bad sets")

    member: dict[str, list[int]] = {x: [] for x in below.graph.vertices}
    for j, m in enumerate(lvl.bad_sets):
        for x in m.members:
            member[x].append(j)

    # vertex table: every (base, bits) combination exactly once, projection agrees
    want_ids = set()
    for x in below.graph.vertices:
        k = len(member[x])
        for mask in range(1 << k):
            bits = "".join("01"[(mask >> p) & 1] for p in range(k))
            want_ids.add(f"{x};{bits}")
    got_ids = set(lvl.graph.vertices)
    report.add(f"{tag}-vertices", got_ids == want_ids,
               "" if got_ids == want_ids else "vertex set differs from expansion")
    proj_ok = set(lvl.projection) == got_ids and all(
        lvl.projection[vid] == parse_level_vertex(vid)[0] for vid in lvl.graph.vertices
    )
    report.add(f"{tag}-projection", proj_ok)

    # edge rule, both directions, re-derived from the ids alone
    bad_edge = None
    bad_pair = None
    verts = list(lvl.graph.vertices)
    bits_of = {vid: parse_level_vertex(vid)[1] for vid in verts}
    pos = {x: {j: p for p, j in enumerate(member[x])} for x in below.graph.vertices}
    for u, v in combinations(verts, 2):
        xu, xv = lvl.projection[u], lvl.projection[v]
        d = below.graph.label(xu, xv)
        want = d
        if d is not None:
            for j in member[xu]:
                if j not in pos[xv]:
                    continue
                m = lvl.bad_sets[j]
                diff = bits_of[u][pos[xu][j]] != bits_of[v][pos[xv][j]]
                long = m.long_edge == ((xu, xv) if xu < xv else (xv, xu))
                if diff != long:
                    want = None
                    break
        if lvl.graph.label(u, v) != want:
            bad_edge = f"{u!r} ~ {v!r}: label {lvl.graph.label(u, v)}, expected {want}"
            bad_pair = (u, v)
            break
    report.add(f"{tag}-edge-rule", bad_edge is None, bad_edge or "", counterexample=bad_pair)

    # anchored copy: bits follow the anchor rules, base vertices line up
    copy_below = set(below.base_embedding.image())
    emb_ok = set(lvl.base_embedding.domain()) == set(w.input.vertices)
    if emb_ok:
        for a in w.input.vertices:
            vid = lvl.base_embedding[a]
            base, bits = parse_level_vertex(vid)
            if base != below.base_embedding[a] or len(bits) != len(member[base]):
                emb_ok = False
                break
            for p, j in enumerate(member[base]):
                if int(bits[p]) != _expected_anchor_bit(lvl.bad_sets[j], base, copy_below):
                    emb_ok = False
                    break
            if not emb_ok:
                break
    report.add(f"{tag}-anchors", emb_ok)

    try:
        cycle = has_nonmetric_cycle_up_to(lvl.graph, lvl.level, budget=w.config.search_budget)
    except BudgetExhausted as exc:
        report.budget_exhausted = True
        report.add(f"{tag}-no-short-bad-cycles", False, str(exc), skipped=True)
    else:
        report.add(
            f"{tag}-no-short-bad-cycles",
            cycle is None,
            "" if cycle is None else f"non-metric cycle on {cycle.vertices}",
            counterexample=cycle,
        )


def cross_check(w: Witness, budget: int = 10_000_000, search_limit: int = 150) -> VerificationReport:
    """Re-derive and re-verify every stored layer of a witness.

    Structure is checked unconditionally; the brute-force extension search
    over all partial isometries of the copy also runs when the final space
    has at most `search_limit` vertices, otherwise that step is reported as
    skipped.
    """
    report = VerificationReport()
    _check_metric(report, w.input, "input-metric")

    if w.levels:
        if w.set_assignment is not None:
            _check_subset_level(report, w)
        for idx in range(1, len(w.levels)):
            _check_transition(report, w, idx)
            report.count("level_transitions_checked")
        top = w.levels[-1]
        try:
            cycle = has_nonmetric_cycle_up_to(top.graph, w.n, budget=budget) if w.n >= 3 else None
        except BudgetExhausted as exc:
            report.budget_exhausted = True
            report.add("top-level-no-bad-cycles", False, str(exc), skipped=True)
        else:
            report.add(
                "top-level-no-bad-cycles",
                cycle is None,
                "" if cycle is None else f"non-metric cycle on {cycle.vertices}",
                counterexample=cycle,
            )

        comp = set(w.component)
        seeds = set(top.base_embedding.image())
        frontier = list(seeds)
        seen = set(seeds)
        while frontier:
            u = frontier.pop()
            for v in top.graph.adjacency(u):
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
        report.add("component", seen == comp,
                   "" if seen == comp else "stored component differs from reachability")
        rebuilt = shortest_path_completion(induced_subgraph(top.graph, w.component))
        report.add("final-completion", rebuilt == w.final,
                   "" if rebuilt == w.final else "stored final differs from recompletion")
    else:
        report.add("trivial-tower", len(w.input) == 1 and w.final == w.input)

    _check_metric(report, w.final, "final-metric")

    emb = w.final_embedding
    emb_ok = set(emb.domain()) == set(w.input.vertices) and all(v in w.final for v in emb.image())
    if emb_ok:
        for x, y, d in w.input.edges():
            if w.final.label(emb[x], emb[y]) != d:
                emb_ok = False
                break
    report.add("copy-distances", emb_ok)

    copy = [emb[x] for x in w.input.vertices]
    if len(w.final) <= search_limit:
        sub = verify_eppa(w.final, copy, budget=budget)
        report.count("partial_maps_searched", sub.totals.get("partial_maps", 0))
        offender = next(
            (r.counterexample for r in sub.results if not r.passed and not r.skipped), None
        )
        if offender is not None:
            report.add(
                "extension-property-search", False,
                f"no extension for {dict(offender.items())}", counterexample=offender,
            )
        elif sub.budget_exhausted:
            report.budget_exhausted = True
            report.add(
                "extension-property-search", False,
                "search budget exhausted before finishing", skipped=True,
            )
        else:
            report.add("extension-property-search", True)
    else:
        report.add(
            "extension-property-search", True,
            f"final space has {len(w.final)} vertices > {search_limit}", skipped=True,
        )

    if w.set_assignment is not None and w.levels:
        replay_ok = True
        detail = ""
        offender = None
        for phi in _enumerate_partial_isometries(w.input, w.input.vertices, len(w.input)):
            try:
                theta = extend_isometry(w, phi)
            except EppaError as exc:
                replay_ok = False
                detail = f"replay raised for {dict(phi.items())}: {exc}"
                offender = phi
                break
            report.count("partial_maps_replayed")
            target = {emb[x]: emb[phi[x]] for x in phi.domain()}
            if not _is_full_isometry(theta, w.final) or any(
                theta[u] != v for u, v in target.items()
            ):
                replay_ok = False
                detail = f"replay failed for {dict(phi.items())}"
                offender = phi
                break
        report.add("extension-replay", replay_ok, detail, counterexample=offender)
    return report
