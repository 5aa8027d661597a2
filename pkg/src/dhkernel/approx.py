"""Approximate DH-modulator pipeline.

Small-obstruction-free graphs have O(n^3) maximal bicliques, and every
connected DH graph has a biclique that is a balanced vertex separator.
Recursively extracting (biclique, extra-set) separators decomposes the
graph into a DH part plus bicliques; each biclique is then absorbed by
solving a vertex multicut on a controlled instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional

from .graph import Graph, components, is_biclique
from .lp import (
    FractionalSolution,
    TerminalPairs,
    _dijkstra_with_endpoints,
    _min_vertex_cut,
    double_on_dh_part,
    heavy_vertices,
    round_multicut,
    solve_dhd_lp,
)
from .obstructions import (
    find_small_obstruction,
    greedy_obstruction_packing,
    is_distance_hereditary,
)
from .splitdec import canonical_decomposition


@dataclass(frozen=True)
class Decomposition3:
    dh_part: tuple[int, ...]
    bicliques: tuple[tuple[int, ...], ...]
    extra: tuple[int, ...]


def _common_neighbors(g: Graph, vs: Iterable[int]) -> set[int]:
    vs = list(vs)
    out = set(g.neighbors(vs[0]))
    for v in vs[1:]:
        out &= g.neighbors(v)
    return out


def _closure(g: Graph, a: set[int], b: set[int]) -> frozenset[int]:
    """Grow a biclique pair to a maximal cross-intersecting pair, then to
    a set-maximal biclique (repartitions allowed via is_biclique)."""
    while True:
        a2 = _common_neighbors(g, b)
        b2 = _common_neighbors(g, a2)
        if a2 == a and b2 == b:
            break
        a, b = a2, b2
    k = set(a) | set(b)
    grown = True
    while grown:
        grown = False
        for u in sorted(set(g.vertices) - k):
            if is_biclique(g, k | {u}) is not None:
                k.add(u)
                grown = True
    return frozenset(k)


def maximal_bicliques(g: Graph) -> list[tuple[int, ...]]:
    """All maximal bicliques of a small-obstruction-free graph.

    Per-vertex enumeration: the trivial seed ({v}, N(v)) plus one seed
    per distinct trace of a distance-2 vertex on N(v); traces do not
    cross in small-obstruction-free graphs, which caps the count at
    (n^3 + 5n)/6.
    """
    guard = find_small_obstruction(g)
    if guard is not None:
        raise ValueError(f"graph has a small obstruction {guard.kind} at {guard.vertices}")
    n = g.n
    found: set[frozenset[int]] = set()
    for v in sorted(g.vertices):
        n1 = set(g.neighbors(v))
        if not n1:
            continue
        found.add(_closure(g, {v}, set(n1)))
        closed = n1 | {v}
        traces: dict[frozenset[int], set[int]] = {}
        for w in sorted(g.vertices):
            if w in closed:
                continue
            tr = g.neighbors(w) & n1
            if tr:
                traces.setdefault(frozenset(tr), set()).add(w)
        for tr, group in traces.items():
            found.add(_closure(g, {v} | group, set(tr)))
    # filter to set-maximal, require both parts nonempty
    cands = sorted((set(k) for k in found if len(k) >= 2 and is_biclique(g, k)), key=lambda s: (-len(s), sorted(s)))
    out: list[tuple[int, ...]] = []
    for k in cands:
        if not any(k < set(o) or k == set(o) for o in out):
            out.append(tuple(sorted(k)))
    bound = (n ** 3 + 5 * n) // 6
    if len(out) > bound:
        raise AssertionError("maximal biclique count exceeds the (n^3+5n)/6 bound")
    return sorted(out)


def dh_biclique_separator(h: Graph) -> tuple[tuple[int, ...], tuple[tuple[int, ...], tuple[int, ...]]]:
    """A biclique of a connected DH graph whose removal is 2/3-balanced.

    Orient each marked edge of the canonical decomposition towards any
    side keeping a component larger than n/2 after removing that edge's
    attachment biclique; an unoriented edge yields its biclique directly,
    otherwise the sink bag is a star with unmarked center and the center
    plus all cross attachments work.
    """
    if h.n < 2 or not h.is_connected():
        raise ValueError("need a connected graph on >= 2 vertices")
    if not is_distance_hereditary(h):
        raise ValueError("dh_biclique_separator requires a DH graph")
    d = canonical_decomposition(h)
    n = h.n
    if len(d.bags) == 1:
        k = tuple(sorted(h.vertices))
        return k, is_biclique(h, k)

    def attachments(m1: int, m2: int) -> tuple[set[int], set[int]]:
        u1, u2 = d.split_sides(m1, m2)
        r1 = {u for u in u1 if g_nb[u] & u2}
        r2 = {u for u in u2 if g_nb[u] & u1}
        return r1, r2

    g_nb = {v: h.neighbors(v) for v in h.vertices}
    orient: dict[tuple[int, int], Optional[int]] = {}
    attach: dict[tuple[int, int], tuple[set[int], set[int]]] = {}
    for m1, m2 in d.marked_edges:
        r1, r2 = attachments(m1, m2)
        attach[(m1, m2)] = (r1, r2)
        u1, u2 = d.split_sides(m1, m2)
        k_e = r1 | r2
        direction = None
        for side, marker in ((u2, m2), (u1, m1)):
            rest = side - k_e
            big = False
            todo = set(rest)
            while todo:
                comp = h.component_of(next(iter(sorted(todo))), rest)
                todo -= comp
                if 2 * len(comp) > n:
                    big = True
                    break
            if big:
                direction = marker  # big component lives beyond `marker`
                break
        orient[(m1, m2)] = direction

    for m1, m2 in d.marked_edges:
        if orient[(m1, m2)] is None:
            r1, r2 = attach[(m1, m2)]
            k = tuple(sorted(r1 | r2))
            _assert_balanced(h, k)
            return k, (tuple(sorted(r1)), tuple(sorted(r2)))

    # every edge oriented: walk to the sink bag
    out_edge: dict[int, tuple[int, int]] = {}
    for (m1, m2), towards in orient.items():
        src = d.bag_index[m1] if towards == m2 else d.bag_index[m2]
        if src in out_edge:
            raise AssertionError("bag with two outward-oriented marked edges")
        out_edge[src] = (m1, m2)
    cur = 0
    seen = set()
    while cur in out_edge:
        if cur in seen:
            raise AssertionError("orientation walk cycled")
        seen.add(cur)
        m1, m2 = out_edge[cur]
        cur = d.bag_index[m2] if d.bag_index[m1] == cur else d.bag_index[m1]
    sink = d.bags[cur]
    if sink.kind != "star" or sink.center is None or sink.center < 0:
        raise AssertionError("sink bag must be a star with unmarked center")
    center = sink.center
    k = {center}
    for j, (m_here, m_there) in d.bag_tree[cur]:
        pair = tuple(sorted((m_here, m_there)))
        r1, r2 = attach[pair]
        u1, u2 = d.split_sides(pair[0], pair[1])
        # attachment on the far side of each incident marked edge
        far = r1 if center in u2 else r2
        k |= far
    k = tuple(sorted(k))
    _assert_balanced(h, k)
    return k, ((center,), tuple(v for v in k if v != center))


def _assert_balanced(h: Graph, cut: Iterable[int]):
    cut = set(cut)
    rest = set(h.vertices) - cut
    todo = set(rest)
    while todo:
        comp = h.component_of(min(todo), rest)
        todo -= comp
        if 3 * len(comp) > 2 * h.n:
            raise AssertionError("separator is not 2/3-balanced")


def beta_cap(k: int) -> int:
    """Budget for the non-biclique side of a balanced separator."""
    return 4 * max(k, 1) * math.ceil(math.sqrt(math.log2(k + 2)))


def _balanced_separator_of(h: Graph, limit: int) -> Optional[set[int]]:
    """Balanced vertex separator of size <= limit.

    Exhaustive lexicographic search on small graphs, otherwise repeated
    minimum vertex cuts between BFS-antipodal pairs of the biggest
    component.
    """
    n = h.n

    def balanced(cut: set[int]) -> bool:
        rest = set(h.vertices) - cut
        todo = set(rest)
        while todo:
            comp = h.component_of(min(todo), rest)
            todo -= comp
            if 3 * len(comp) > 2 * n:
                return False
        return True

    if balanced(set()):
        return set()
    if n <= 16:
        verts = sorted(h.vertices)
        for size in range(1, min(limit, n) + 1):
            for cut in combinations(verts, size):
                if balanced(set(cut)):
                    return set(cut)
        return None
    cut: set[int] = set()
    while not balanced(cut) and len(cut) <= limit:
        rest = set(h.vertices) - cut
        biggest: set[int] = set()
        todo = set(rest)
        while todo:
            comp = h.component_of(min(todo), rest)
            todo -= comp
            if len(comp) > len(biggest):
                biggest = comp
        sub = h.induced(biggest)
        s = min(biggest)
        d1 = sub.bfs_distances(s)
        far = max(d1, key=lambda v: (d1[v], v))
        d2 = sub.bfs_distances(far)
        far2 = max(d2, key=lambda v: (d2[v], v))
        if far == far2 or sub.adjacent(far, far2):
            cut.add(min(far, far2))
        else:
            cut |= _min_vertex_cut(sub, far, far2, set())
    return cut if len(cut) <= limit and balanced(cut) else None


def find_balanced_separator(g: Graph, k: int, limit: Optional[int] = None):
    """(K, X) with K a maximal biclique or empty, X small, K+X a balanced
    separator; None certifies no size-k modulator under the sub-solver's
    guarantee.  Bicliques are tried by descending size, then lex."""
    if not g.is_connected():
        raise ValueError("find_balanced_separator needs a connected graph")
    if limit is None:
        limit = beta_cap(k)
    n = g.n
    candidates = sorted(maximal_bicliques(g), key=lambda t: (-len(t), t))
    candidates.append(())
    for kset in candidates:
        cut = set(kset)
        rest = set(g.vertices) - cut
        comps = []
        todo = set(rest)
        while todo:
            comp = g.component_of(min(todo), rest)
            todo -= comp
            comps.append(comp)
        big = [c for c in comps if 3 * len(c) > 2 * n]
        if not big:
            return tuple(sorted(kset)), ()
        x = _balanced_separator_of(g.induced(big[0]), limit)
        if x is not None and len(x) <= limit:
            return tuple(sorted(kset)), tuple(sorted(x))
    return None


def decompose(g: Graph, k: int, limit: Optional[int] = None) -> Optional[Decomposition3]:
    """Recursive separator extraction: V = D + K_l + ... + K_1 + X with
    g[D] distance-hereditary and every K_i a biclique."""
    dh_part: set[int] = set()
    bicliques: list[tuple[int, ...]] = []
    extra: set[int] = set()
    depth_cap = math.ceil(math.log(max(g.n, 2), 1.5)) + 1
    stack = [(tuple(c), 0) for c in components(g)]
    while stack:
        comp, depth = stack.pop()
        if depth > depth_cap:
            raise AssertionError("separator recursion exceeded the balance depth bound")
        h = g.induced(comp)
        if is_distance_hereditary(h):
            dh_part |= set(comp)
            continue
        hit = find_balanced_separator(h, k, limit)
        if hit is None:
            return None
        kset, x = hit
        if kset:
            bicliques.append(kset)
        extra |= set(x)
        rest = set(comp) - set(kset) - set(x)
        todo = set(rest)
        while todo:
            piece = h.component_of(min(todo), rest)
            todo -= piece
            stack.append((tuple(sorted(piece)), depth + 1))
    return Decomposition3(tuple(sorted(dh_part)), tuple(bicliques), tuple(sorted(extra)))


def controlled_modulator(
    g: Graph, d: Iterable[int], k: Iterable[int], x: FractionalSolution
) -> tuple[int, ...]:
    """DH-modulator of a controlled graph (DH part d, biclique k) from a
    feasible sub-1/20 fractional solution: double on the DH side, cut all
    pairs at weighted distance >= 1, round the multicut."""
    d, kset = set(d), set(k)
    if d | kset != set(g.vertices) or d & kset:
        raise ValueError("(d,k) must partition the controlled graph")
    if is_biclique(g, kset) is None:
        raise ValueError("k side must be a biclique")
    if not is_distance_hereditary(g.induced(d)):
        raise ValueError("d side must induce a DH graph")
    x2 = double_on_dh_part(x, d, kset)
    gd = g.induced(d)
    pairs = []
    one = Fraction(1)
    for s in sorted(d):
        dist, _ = _dijkstra_with_endpoints(gd, x2.weights, s, set())
        for t in sorted(d):
            if t <= s:
                continue
            if t not in dist or dist[t] >= one:
                pairs.append((s, t))
    cut = round_multicut(gd, TerminalPairs.of(pairs), x2.restrict(d))
    if not is_distance_hereditary(g.delete_vertices(cut)):
        raise AssertionError("controlled modulator failed to hit every long hole")
    return cut


def approx_modulator(g: Graph, k: int, arithmetic: str = "auto", stats: Optional[dict] = None):
    """DH-modulator S with g-S distance-hereditary, or None certifying a
    NO at parameter k: obstruction packing, LP heavy-vertex peel,
    separator decomposition, then one controlled instance per biclique.
    A caller-supplied stats dict receives the per-stage sizes."""
    if stats is None:
        stats = {}
    if k < 0:
        return None
    packing = greedy_obstruction_packing(g, k)
    stats["packing"] = len(packing)
    if len(packing) > k:
        return None
    s: set[int] = {v for o in packing for v in o.vertices}
    g1 = g.delete_vertices(s)
    x = solve_dhd_lp(g1, arithmetic)
    stats["lpValue"] = str(x.total)
    stats["lpRounds"] = x.meta.get("iterations")
    if x.total > k:
        return None
    heavy = heavy_vertices(x, Fraction(1, 20))
    stats["heavy"] = len(heavy)
    if len(heavy) > 20 * k:
        return None
    s |= set(heavy)
    g2 = g1.delete_vertices(heavy)
    x2 = x.restrict(g2.vertices)
    dec = decompose(g2, k)
    if dec is None:
        return None
    stats["ell"] = len(dec.bicliques)
    stats["extra"] = len(dec.extra)
    s |= set(dec.extra)
    cur = set(dec.dh_part)
    multicut_sizes = []
    for kset in dec.bicliques:
        piece = cur | set(kset)
        gi = g2.induced(piece)
        xi = x2.restrict(piece)
        cut = controlled_modulator(gi, cur, kset, xi)
        multicut_sizes.append(len(cut))
        s |= set(cut)
        cur = piece - set(cut)
    stats["controlledCuts"] = multicut_sizes
    if not is_distance_hereditary(g.delete_vertices(s)):
        raise AssertionError("approx modulator output is not a DH-modulator")
    return tuple(sorted(s))
