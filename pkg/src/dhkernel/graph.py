"""Simple undirected graphs with stable integer vertex ids.

Vertices keep their ids across deletions (no renumbering), which the
reduction rules rely on for bookkeeping and reporting.  All set-valued
results are returned sorted for determinism.
"""

from __future__ import annotations

from typing import Iterable, Optional


class Graph:
    """Immutable simple graph: no loops, no parallel edges."""

    __slots__ = ("_adj",)

    def __init__(self, vertices: Iterable[int] = (), edges: Iterable[tuple[int, int]] = ()):
        adj: dict[int, set[int]] = {int(v): set() for v in vertices}
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u not in adj or v not in adj:
                raise ValueError(f"edge ({u},{v}) references unknown vertex")
            adj[u].add(v)
            adj[v].add(u)
        self._adj = {v: frozenset(nb) for v, nb in adj.items()}

    # -- basic queries -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return sum(len(nb) for nb in self._adj.values()) // 2

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self._adj))

    def has_vertex(self, v: int) -> bool:
        return v in self._adj

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def adjacent(self, u: int, v: int) -> bool:
        return v in self._adj[u]

    def edges(self) -> tuple[tuple[int, int], ...]:
        out = []
        for v in sorted(self._adj):
            for w in self._adj[v]:
                if v < w:
                    out.append((v, w))
        return tuple(sorted(out))

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    # -- derived graphs (ids survive) ----------------------------------

    def delete_vertices(self, drop: Iterable[int]) -> "Graph":
        drop = set(drop)
        keep = [v for v in self._adj if v not in drop]
        return Graph(keep, [(u, w) for u, w in self.edges() if u not in drop and w not in drop])

    def delete_vertex(self, v: int) -> "Graph":
        return self.delete_vertices((v,))

    def induced(self, keep: Iterable[int]) -> "Graph":
        keep = set(keep)
        if not keep <= set(self._adj):
            raise ValueError("induced() got vertices outside the graph")
        return Graph(keep, [(u, w) for u, w in self.edges() if u in keep and w in keep])

    def with_vertex(self, v: int, nbrs: Iterable[int]) -> "Graph":
        nbrs = set(nbrs)
        if v in self._adj:
            raise ValueError(f"vertex {v} already present")
        edges = list(self.edges()) + [(v, w) for w in nbrs]
        return Graph(list(self._adj) + [v], edges)

    def with_edges(self, pairs: Iterable[tuple[int, int]]) -> "Graph":
        return Graph(self._adj, list(self.edges()) + [p for p in pairs])

    def without_edges(self, pairs: Iterable[tuple[int, int]]) -> "Graph":
        ban = {(min(u, v), max(u, v)) for u, v in pairs}
        return Graph(self._adj, [e for e in self.edges() if e not in ban])

    # -- traversal helpers ---------------------------------------------

    def component_of(self, v: int, allowed: Optional[set[int]] = None) -> set[int]:
        """Vertices reachable from v, optionally restricted to `allowed`."""
        if allowed is not None and v not in allowed:
            return set()
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in seen and (allowed is None or w in allowed):
                    seen.add(w)
                    stack.append(w)
        return seen

    def connected(self, u: int, v: int, removed: Iterable[int] = ()) -> bool:
        removed = set(removed)
        if u in removed or v in removed:
            return False
        allowed = set(self._adj) - removed
        return v in self.component_of(u, allowed)

    def bfs_distances(self, source: int, allowed: Optional[set[int]] = None) -> dict[int, int]:
        dist = {source: 0}
        frontier = [source]
        while frontier:
            nxt = []
            for u in frontier:
                for w in self._adj[u]:
                    if w not in dist and (allowed is None or w in allowed):
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        return dist

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        v0 = next(iter(self._adj))
        return len(self.component_of(v0)) == self.n


def components(g: Graph) -> list[tuple[int, ...]]:
    """Connected components, each sorted, ordered by least vertex id."""
    seen: set[int] = set()
    out = []
    for v in sorted(g.vertices):
        if v in seen:
            continue
        comp = g.component_of(v)
        seen |= comp
        out.append(tuple(sorted(comp)))
    return out


def twin_classes(g: Graph) -> list[tuple[int, ...]]:
    """Partition into maximal twin sets (true and false twins merged).

    u and v are twins iff N(u)\\{v} = N(v)\\{u}.  Non-adjacent twins share
    N(.), adjacent ones share N[.]; the two groupings never chain through
    a common vertex inconsistently, so union-find over both keys gives
    the equivalence classes.
    """
    parent = {v: v for v in g.vertices}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    open_key: dict[frozenset[int], int] = {}
    closed_key: dict[frozenset[int], int] = {}
    for v in sorted(g.vertices):
        nb = g.neighbors(v)
        k_open = nb
        if k_open in open_key:
            union(open_key[k_open], v)
        else:
            open_key[k_open] = v
        k_closed = nb | {v}
        if k_closed in closed_key:
            union(closed_key[k_closed], v)
        else:
            closed_key[k_closed] = v

    classes: dict[int, list[int]] = {}
    for v in sorted(g.vertices):
        classes.setdefault(find(v), []).append(v)
    return [tuple(sorted(vs)) for _, vs in sorted(classes.items())]


def _lex_least_union(comps: list[tuple[int, ...]]) -> tuple[int, ...]:
    """Lexicographically least nonempty proper union of the given blocks.

    Blocks are the complement components of a biclique candidate; any
    proper union is a valid side A.  The optimum always contains the
    block with the global minimum and greedily absorbs the next block
    while its minimum undercuts the current maximum.
    """
    blocks = sorted(comps, key=min)
    best = list(blocks[0])
    chain = [tuple(sorted(best))]
    for blk in blocks[1:]:
        if min(blk) < max(best):
            best = sorted(set(best) | set(blk))
            chain.append(tuple(best))
        else:
            break
    total = sum(len(b) for b in blocks)
    for cand in reversed(chain):
        if len(cand) < total:
            return cand
    raise AssertionError("no proper union exists")


def is_biclique(g: Graph, k: Iterable[int]) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Bipartition (A,B) with A complete to B, or None.

    Edges inside A or B are allowed, so k is a biclique iff the
    complement of g[k] is disconnected.  Returns the lexicographically
    least valid A (with B = k \\ A).
    """
    k = sorted(set(k))
    if not k:
        raise ValueError("is_biclique: empty vertex set")
    if len(k) == 1:
        return None
    idx = {v: i for i, v in enumerate(k)}
    comp_adj: dict[int, set[int]] = {v: set() for v in k}
    for i, u in enumerate(k):
        nb = g.neighbors(u)
        for w in k[i + 1:]:
            if w not in nb:
                comp_adj[u].add(w)
                comp_adj[w].add(u)
    seen: set[int] = set()
    blocks: list[tuple[int, ...]] = []
    for v in k:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in comp_adj[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        blocks.append(tuple(sorted(comp)))
    if len(blocks) < 2:
        return None
    a = _lex_least_union(blocks)
    b = tuple(v for v in k if v not in set(a))
    return a, b


def is_split(g: Graph, a: Iterable[int], b: Iterable[int]) -> bool:
    """True iff (a,b) is a split: both sides >= 2, cross edges complete
    between the attachment sets N(b)∩a and N(a)∩b."""
    a, b = set(a), set(b)
    if a & b or a | b != set(g.vertices):
        raise ValueError("is_split: (a,b) must partition V(g)")
    if len(a) < 2 or len(b) < 2:
        return False
    a_att = {u for u in a if g.neighbors(u) & b}
    b_att = {w for w in b if g.neighbors(w) & a}
    return all(g.adjacent(u, w) for u in a_att for w in b_att)
