"""Distance-hereditary recognition and obstruction certificates.

The obstructions are the house, the gem, the domino and induced cycles
(holes) of length at least 5; a graph is distance-hereditary iff it
contains none of them.  Recognition itself goes through twin/pendant
pruning, which is linear-ish and also yields the insertion order used
by the split-decomposition builder.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .graph import Graph, components

HOUSE = "house"
GEM = "gem"
DOMINO = "domino"
HOLE = "hole"

FLOAT_EPS = 1e-9


@dataclass(frozen=True)
class Obstruction:
    kind: str
    vertices: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.vertices)

    def validate(self, g: Graph) -> bool:
        """Re-check the certificate by direct induced-pattern matching."""
        vs = self.vertices
        if len(set(vs)) != len(vs) or not all(g.has_vertex(v) for v in vs):
            return False
        kind = _classify_obstruction(g, vs)
        return kind == self.kind


def _induced_degrees(g: Graph, vs: Sequence[int]) -> list[int]:
    vset = set(vs)
    return sorted(len(g.neighbors(v) & vset) for v in vs)


def _is_induced_cycle(g: Graph, vs: Sequence[int]) -> bool:
    vset = set(vs)
    if len(vs) < 3:
        return False
    for v in vs:
        if len(g.neighbors(v) & vset) != 2:
            return False
    # 2-regular and connected => single cycle
    return len(g.component_of(vs[0], vset)) == len(vs)


def _has_triangle(g: Graph, vs: Sequence[int]) -> bool:
    vset = set(vs)
    for v in vs:
        nb = g.neighbors(v) & vset
        for u in nb:
            if u > v and g.neighbors(u) & nb:
                return True
    return False


def _classify5(g: Graph, vs: Sequence[int]) -> Optional[str]:
    """Which of C5/house/gem does the 5-set induce, if any.

    The degree-sequence tests are exact: [2,2,2,3,3] with a triangle
    forces the house (K_{2,3} is the only other candidate and is
    triangle-free), and [2,2,3,3,4] forces the gem (remove the
    universal vertex: 3 edges with degrees [1,1,2,2] must be P4).
    """
    vset = set(vs)
    degs = _induced_degrees(g, vs)
    if degs == [2, 2, 2, 2, 2]:
        return HOLE if _is_induced_cycle(g, vs) else None
    if degs == [2, 2, 2, 3, 3]:
        return HOUSE if _has_triangle(g, vs) else None
    if degs == [2, 2, 3, 3, 4]:
        apex = next(v for v in vs if len(g.neighbors(v) & vset) == 4)
        rest = [v for v in vs if v != apex]
        rest_degs = sorted(len(g.neighbors(v) & set(rest)) for v in rest)
        return GEM if rest_degs == [1, 1, 2, 2] else None
    return None


def _classify6(g: Graph, vs: Sequence[int]) -> Optional[str]:
    """C6 or domino on a 6-set.  The domino is the unique triangle-free
    graph with degrees [2,2,2,2,3,3] whose two degree-3 vertices are
    adjacent (it is C6 plus one long chord)."""
    vset = set(vs)
    degs = _induced_degrees(g, vs)
    if degs == [2, 2, 2, 2, 2, 2]:
        return HOLE if _is_induced_cycle(g, vs) else None
    if degs == [2, 2, 2, 2, 3, 3]:
        if _has_triangle(g, vs):
            return None
        d3 = [v for v in vs if len(g.neighbors(v) & vset) == 3]
        return DOMINO if g.adjacent(d3[0], d3[1]) else None
    return None


def _classify_obstruction(g: Graph, vs: Sequence[int]) -> Optional[str]:
    if len(vs) == 5:
        return _classify5(g, vs)
    if len(vs) == 6:
        return _classify6(g, vs)
    if len(vs) >= 7:
        return HOLE if _is_induced_cycle(g, tuple(vs)) else None
    return None


# -- recognition by pruning ------------------------------------------------


def pruning_sequence(g: Graph, order: str = "asc"):
    """Greedy twin/pendant pruning of a connected graph.

    Returns (ok, steps) where steps is a list of (vertex, reason, witness)
    in deletion order, down to a single remaining vertex.  reason is one
    of 'pendant', 'true_twin', 'false_twin'; witness is the surviving
    neighbor/partner.  ok is False when pruning gets stuck, which for
    connected inputs happens iff the graph is not distance-hereditary.
    Greedy pruning is order-independent in its verdict because deleting
    a pendant or twin of a DH graph leaves a DH graph.
    """
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    steps = []
    reverse = order == "desc"
    while len(adj) > 1:
        victim = None
        scan = sorted(adj, reverse=reverse)
        open_key: dict[frozenset, int] = {}
        closed_key: dict[frozenset, int] = {}
        for v in scan:
            if len(adj[v]) == 1:
                victim = (v, "pendant", next(iter(adj[v])))
                break
            k_open = frozenset(adj[v])
            if k_open in open_key:
                victim = (v, "false_twin", open_key[k_open])
                break
            open_key[k_open] = v
            k_closed = frozenset(adj[v] | {v})
            if k_closed in closed_key:
                victim = (v, "true_twin", closed_key[k_closed])
                break
            closed_key[k_closed] = v
        if victim is None:
            return False, steps
        v = victim[0]
        for w in adj[v]:
            adj[w].discard(v)
        del adj[v]
        steps.append(victim)
    return True, steps


def is_distance_hereditary(g: Graph, order: str = "asc") -> bool:
    """True iff every component prunes down to a single vertex."""
    for comp in components(g):
        if len(comp) == 1:
            continue
        ok, _ = pruning_sequence(g.induced(comp), order=order)
        if not ok:
            return False
    return True


# -- small-obstruction scan ------------------------------------------------


def find_small_obstruction(g: Graph) -> Optional[Obstruction]:
    """Lexicographically least vertex set inducing a small obstruction.

    Subsets of size 5 and 6 are explored in lex order by a DFS over
    sorted vertex ids.  Pruning uses facts true of every pattern:
    minimum degree 2, independence number at most 3 (at most 2 for the
    5-vertex patterns), no K4, and triangles only in house/gem.
    """
    verts = [v for v in g.vertices if g.degree(v) >= 2]
    nb = {v: g.neighbors(v) for v in verts}
    nv = len(verts)

    def extend(chosen: list[int], start: int, edge_cnt: int) -> Optional[tuple[int, ...]]:
        depth = len(chosen)
        if depth == 5:
            kind = _classify5(g, chosen)
            if kind is not None:
                return tuple(chosen)
            if _has_triangle(g, chosen):
                return None  # 6-patterns are triangle-free
            if edge_cnt < 3:
                return None  # C6/domino minus a vertex has >= 3 edges
        if depth == 6:
            return tuple(chosen) if _classify6(g, chosen) is not None else None
        for i in range(start, nv):
            w = verts[i]
            new_edges = sum(1 for u in chosen if u in nb[w])
            if depth >= 3 and edge_cnt + new_edges == 0:
                continue  # alpha(pattern) <= 3
            if depth == 5 and new_edges > 3:
                continue  # C6/domino have max degree 3
            if new_edges >= 3:
                # no pattern contains K4: prune if w closes one
                sub = [u for u in chosen if u in nb[w]]
                if any(
                    g.adjacent(a, b) and (nb[a] & nb[b] & set(sub))
                    for ai, a in enumerate(sub)
                    for b in sub[ai + 1:]
                ):
                    continue
            chosen.append(w)
            hit = extend(chosen, i + 1, edge_cnt + new_edges)
            if hit is not None:
                chosen.pop()
                return hit
            chosen.pop()
        return None

    found = extend([], 0, 0)
    if found is None:
        return None
    kind = _classify_obstruction(g, found)
    if kind == HOLE:
        return Obstruction(HOLE, found)
    return Obstruction(kind, found)


# -- long holes ------------------------------------------------------------


def _induced_paths(g: Graph, length: int):
    """Yield induced paths on `length` vertices, each once (ends ordered)."""
    verts = sorted(g.vertices)
    nb = {v: g.neighbors(v) for v in verts}

    def grow(path: list[int]):
        if len(path) == length:
            if path[0] < path[-1]:
                yield tuple(path)
            return
        last = path[-1]
        banned = set()
        for u in path[:-1]:
            banned |= nb[u]
        for w in sorted(nb[last]):
            if w in path or w in banned:
                continue
            path.append(w)
            yield from grow(path)
            path.pop()

    for s in verts:
        yield from grow([s])


def _shortcut_path(g: Graph, path: list[int]) -> list[int]:
    """Greedy chord shortcutting: keep jumping to the farthest neighbor."""
    out = [path[0]]
    i = 0
    while i < len(path) - 1:
        nb = g.neighbors(path[i])
        j = max(jj for jj in range(i + 1, len(path)) if path[jj] in nb)
        out.append(path[j])
        i = j
    return out


def _vertex_dijkstra(g: Graph, weights, source: int, target: int, allowed: set[int]):
    """Min total weight over internal vertices of a source->target path.

    Endpoint weights are excluded (callers account for them).  Returns
    (dist, path) or None when target is unreachable.
    """
    zero = 0 if not isinstance(next(iter(weights.values()), Fraction(0)), float) else 0.0
    dist = {source: zero}
    prev: dict[int, int] = {}
    heap = [(zero, source)]
    done: set[int] = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == target:
            path = [u]
            while path[-1] != source:
                path.append(prev[path[-1]])
            return d, path[::-1]
        for w in sorted(g.neighbors(u)):
            if w not in allowed or w in done:
                continue
            step = weights.get(w, zero) if w != target else zero
            alt = d + step
            if w not in dist or alt < dist[w]:
                dist[w] = alt
                prev[w] = u
                heapq.heappush(heap, (alt, w))
    return None


def weighted_long_hole(g: Graph, weights, d: int, bound) -> Optional[Obstruction]:
    """Find an induced cycle H with |V(H)| >= d and weight(H) < bound.

    Scans induced paths P on d-1 vertices; after removing the internal
    vertices of P and all their neighbors (keeping the ends s,t), a
    weighted shortest s-t path closes an induced cycle of length >= d.
    Rational weights compare exactly; floats use a 1e-9 slack.
    """
    if d < 4:
        raise ValueError("weighted_long_hole requires d >= 4")
    if g.n < d:
        return None
    exact = not any(isinstance(w, float) for w in weights.values())
    vset = set(g.vertices)

    def weight_of(vs) -> object:
        total = Fraction(0) if exact else 0.0
        for v in vs:
            total += weights.get(v, 0)
        return total

    for path in _induced_paths(g, d - 1):
        s, t = path[0], path[-1]
        internal = path[1:-1]
        removed = set(internal)
        for u in internal:
            removed |= g.neighbors(u)
        removed -= {s, t}
        allowed = vset - removed
        hit = _vertex_dijkstra(g, weights, s, t, allowed)
        if hit is None:
            continue
        _, sp = hit
        sp = _shortcut_path(g.induced(allowed), sp)
        cycle = list(path) + sp[1:-1][::-1]
        total = weight_of(cycle)
        ok = total < bound if exact else total < bound - FLOAT_EPS
        if not ok:
            continue
        cyc = tuple(sorted(cycle))
        if not _is_induced_cycle(g, cyc) or len(cyc) < d:
            raise AssertionError("long-hole construction produced a bad cycle")
        return Obstruction(HOLE, cyc)
    return None


def find_any_obstruction(g: Graph) -> Optional[Obstruction]:
    """Some obstruction certificate, or None iff g is distance-hereditary.

    A graph with no small obstruction is non-DH iff it has a hole of
    length >= 7, so the small scan plus the d=7 hole search is complete.
    """
    small = find_small_obstruction(g)
    if small is not None:
        return small
    if is_distance_hereditary(g):
        return None
    ones = {v: Fraction(1) for v in g.vertices}
    hole = weighted_long_hole(g, ones, 7, Fraction(g.n + 1))
    if hole is None:
        raise AssertionError("non-DH graph without small obstruction must have a long hole")
    return hole


def obstruction_through_path(g: Graph, p: Sequence[int], v: int) -> Obstruction:
    """Obstruction inside G[V(p) + v] containing v.

    Requires p to be an induced path on >= 4 vertices with v adjacent to
    both ends and v not on p.  If two consecutive v-neighbors on p are
    >= 3 apart the enclosed hole is returned directly; otherwise the
    pattern lives in a 6-vertex window around the first attachment.
    """
    p = list(p)
    if len(p) < 4:
        raise ValueError("path must have length >= 3 (>= 4 vertices)")
    pset = set(p)
    if v in pset or not g.adjacent(v, p[0]) or not g.adjacent(v, p[-1]):
        raise ValueError("v must avoid p and see both ends")
    for i in range(len(p) - 1):
        if not g.adjacent(p[i], p[i + 1]):
            raise ValueError("p is not a path")
        for j in range(i + 2, len(p)):
            if g.adjacent(p[i], p[j]):
                raise ValueError("p is not induced")
    nbr_idx = [i for i, u in enumerate(p) if g.adjacent(v, u)]
    for a, b in zip(nbr_idx, nbr_idx[1:]):
        if b - a >= 3:
            hole = tuple(sorted([v] + p[a:b + 1]))
            return Obstruction(HOLE, hole)
    # all gaps <= 2: some pattern sits in v plus five path vertices
    i0 = nbr_idx[0]
    window = [v] + p[i0:i0 + 5]
    sub = g.induced(window)
    hit = find_small_obstruction(sub)
    if hit is None or v not in hit.vertices:
        for size in (5, 6):
            from itertools import combinations
            for vs in combinations(sorted(window), size):
                if v in vs and _classify_obstruction(g, vs):
                    return Obstruction(_classify_obstruction(g, vs), tuple(vs))
        raise AssertionError("a closing vertex over an induced path must trap an obstruction")
    return hit


def greedy_obstruction_packing(g: Graph, k: int) -> list[Obstruction]:
    """Maximal vertex-disjoint small obstructions, greedily; stops once
    k+1 are found (that already certifies a NO-instance)."""
    packing: list[Obstruction] = []
    cur = g
    while len(packing) <= k:
        obs = find_small_obstruction(cur)
        if obs is None:
            break
        packing.append(obs)
        cur = cur.delete_vertices(obs.vertices)
    return packing
