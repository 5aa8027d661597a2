"""Canonical split decompositions of connected distance-hereditary graphs.

A decomposition is a marked graph: bag-internal (unmarked) edges plus a
matching of marked edges between marker vertices.  Graph vertices keep
their own ids; markers get fresh negative ids.  Construction is
vertex-incremental along a reversed pruning sequence: every step adds a
pendant or a twin of an existing vertex, which needs only a local bag
update followed by re-canonicalization (merging any marked edge whose
recomposition would stay a star or complete bag).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .graph import Graph
from .obstructions import pruning_sequence

STAR = "star"
COMPLETE = "complete"
PRIME = "prime"

FULLY = "fully"
SINGLY = "singly"
PARTIALLY = "partially"

EXTENDS_AT_BAG = "extends_at_bag"
EXTENDS_AT_EDGE = "extends_at_marked_edge"
NOT_DH = "not_distance_hereditary"


class NotDistanceHereditaryError(ValueError):
    pass


@dataclass(frozen=True)
class Bag:
    members: tuple[int, ...]
    kind: str
    center: Optional[int]  # set for star bags, may be a marker

    @property
    def unmarked(self) -> tuple[int, ...]:
        return tuple(v for v in self.members if v >= 0)


@dataclass(frozen=True)
class InsertionVerdict:
    outcome: str
    bag: Optional[tuple[int, ...]] = None  # members of the locus bag
    edge: Optional[tuple[int, int]] = None  # the locus marked edge


def _bag_kind(members: Iterable[int], adj: dict[int, set[int]]) -> tuple[str, Optional[int]]:
    members = sorted(members)
    k = len(members)
    if k <= 2:
        return COMPLETE, None
    degs = {v: len(adj[v] & set(members)) for v in members}
    if all(d == k - 1 for d in degs.values()):
        return COMPLETE, None
    centers = [v for v in members if degs[v] == k - 1]
    if len(centers) == 1 and all(degs[v] == 1 for v in members if v != centers[0]):
        return STAR, centers[0]
    return PRIME, None


class SplitDecomposition:
    """Finished decompositions are read-only; mutation happens only in
    the module-private builder below."""

    def __init__(self, adj: dict[int, set[int]], match: dict[int, int]):
        self.adj = {v: frozenset(nb) for v, nb in adj.items()}
        self.match = dict(match)
        self._graph: Optional[Graph] = None
        self._build_bags()

    @property
    def graph(self) -> Graph:
        if self._graph is None:
            self._graph = recompose(self)
        return self._graph

    def _build_bags(self):
        seen: set[int] = set()
        raw: list[list[int]] = []
        adj = self.adj
        for v in sorted(adj):
            if v in seen:
                continue
            comp = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            raw.append(sorted(comp))
        raw.sort()
        mutable = {v: set(nb) for v, nb in adj.items()}
        bags = []
        for members in raw:
            kind, center = _bag_kind(members, mutable)
            bags.append(Bag(tuple(members), kind, center))
        self.bags: tuple[Bag, ...] = tuple(bags)
        self.bag_index: dict[int, int] = {}
        for i, b in enumerate(self.bags):
            for v in b.members:
                self.bag_index[v] = i
        tree: dict[int, list[tuple[int, tuple[int, int]]]] = {i: [] for i in range(len(bags))}
        for m1, m2 in sorted((a, b) for a, b in self.match.items() if a < b):
            i, j = self.bag_index[m1], self.bag_index[m2]
            tree[i].append((j, (m1, m2)))
            tree[j].append((i, (m2, m1)))
        self.bag_tree: dict[int, list[tuple[int, tuple[int, int]]]] = tree

    # -- basic views ----------------------------------------------------

    @property
    def unmarked(self) -> tuple[int, ...]:
        return tuple(sorted(v for v in self.adj if v >= 0))

    @property
    def marked_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((a, b) for a, b in self.match.items() if a < b))

    def bag_of(self, v: int) -> int:
        return self.bag_index[v]

    def leaf_bags(self) -> list[int]:
        return [i for i in range(len(self.bags)) if len(self.bag_tree[i]) == 1]

    def tree_side(self, m1: int, m2: int) -> set[int]:
        """Bags in the component of the bag tree on m2's side of (m1,m2)."""
        start = self.bag_index[m2]
        seen = {start}
        stack = [start]
        while stack:
            b = stack.pop()
            for nb, (a_here, a_there) in self.bag_tree[b]:
                if {a_here, a_there} == {m1, m2}:
                    continue
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return seen

    def split_sides(self, m1: int, m2: int) -> tuple[set[int], set[int]]:
        """Unmarked vertices on each side of a marked edge (m1 side, m2 side)."""
        side2 = self.tree_side(m1, m2)
        u1, u2 = set(), set()
        for i, b in enumerate(self.bags):
            tgt = u2 if i in side2 else u1
            tgt.update(b.unmarked)
        return u1, u2


def recompose(d: SplitDecomposition) -> Graph:
    """Recompose all marked edges; the result is the represented graph."""
    adj = {v: set(nb) for v, nb in d.adj.items()}
    for m1, m2 in d.marked_edges:
        a_side = adj[m1] - {m2}
        b_side = adj[m2] - {m1}
        for a in a_side:
            adj[a].discard(m1)
        for b in b_side:
            adj[b].discard(m2)
        for a in a_side:
            for b in b_side:
                adj[a].add(b)
                adj[b].add(a)
        del adj[m1], adj[m2]
    verts = sorted(adj)
    edges = [(u, w) for u in verts for w in adj[u] if u < w]
    assert all(v >= 0 for v in verts)
    return Graph(verts, edges)


# -- incremental construction ----------------------------------------------


class _Builder:
    def __init__(self, v0: int):
        self.adj: dict[int, set[int]] = {v0: set()}
        self.match: dict[int, int] = {}
        self._next = -1

    def _marker(self) -> int:
        m = self._next
        self._next -= 1
        self.adj[m] = set()
        return m

    def _edge(self, a: int, b: int):
        self.adj[a].add(b)
        self.adj[b].add(a)

    def _bag_members(self, v: int) -> set[int]:
        comp = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in self.adj[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        return comp

    def _replace_by_marker(self, u: int) -> int:
        m = self._next
        self._next -= 1
        self.adj[m] = self.adj.pop(u)
        for w in self.adj[m]:
            self.adj[w].discard(u)
            self.adj[w].add(m)
        return m

    def _recompose_edge(self, m1: int, m2: int):
        a_side = self.adj[m1] - {m2}
        b_side = self.adj[m2] - {m1}
        for a in a_side:
            self.adj[a].discard(m1)
        for b in b_side:
            self.adj[b].discard(m2)
        for a in a_side:
            for b in b_side:
                self._edge(a, b)
        del self.adj[m1], self.adj[m2]
        del self.match[m1], self.match[m2]

    def _normalize(self):
        """Merge every marked edge whose recomposition stays canonical:
        two complete bags, a star leaf matched to a star center, or any
        degenerate bag with at most 2 vertices."""
        while True:
            merged = False
            for m1, m2 in sorted((a, b) for a, b in self.match.items() if a < b):
                b1 = self._bag_members(m1)
                b2 = self._bag_members(m2)
                if len(b1) <= 2 or len(b2) <= 2:
                    self._recompose_edge(m1, m2)
                    merged = True
                    break
                k1, c1 = _bag_kind(b1, self.adj)
                k2, c2 = _bag_kind(b2, self.adj)
                if k1 == COMPLETE and k2 == COMPLETE:
                    self._recompose_edge(m1, m2)
                    merged = True
                    break
                if k1 == STAR and k2 == STAR:
                    if (c1 != m1 and c2 == m2) or (c2 != m2 and c1 == m1):
                        self._recompose_edge(m1, m2)
                        merged = True
                        break
            if not merged:
                return

    def insert(self, v: int, reason: str, u: int):
        """Add v as pendant on / twin of the existing vertex u."""
        if len(self.adj) == 1:
            self.adj[v] = set()
            self._edge(u, v)
            return
        bag = self._bag_members(u)
        kind, center = _bag_kind(bag, self.adj)
        if reason == "pendant":
            if kind == STAR and center == u:
                self.adj[v] = set()
                self._edge(u, v)
            else:
                m = self._replace_by_marker(u)
                mp = self._marker()
                self.adj[u] = set()
                self.adj[v] = set()
                self._edge(u, v)
                self._edge(u, mp)
                self.match[m] = mp
                self.match[mp] = m
        elif reason == "false_twin":
            if kind == STAR and center is not None and center != u:
                self.adj[v] = set()
                self._edge(center, v)
            else:
                m = self._replace_by_marker(u)
                mp = self._marker()
                self.adj[u] = set()
                self.adj[v] = set()
                self._edge(mp, u)
                self._edge(mp, v)
                self.match[m] = mp
                self.match[mp] = m
        elif reason == "true_twin":
            if kind == COMPLETE:
                self.adj[v] = set()
                for w in sorted(bag):
                    self._edge(v, w)
            else:
                m = self._replace_by_marker(u)
                mp = self._marker()
                self.adj[u] = set()
                self.adj[v] = set()
                self._edge(u, v)
                self._edge(mp, u)
                self._edge(mp, v)
                self.match[m] = mp
                self.match[mp] = m
        else:
            raise ValueError(f"unknown insertion reason {reason!r}")
        self._normalize()

    def freeze(self) -> SplitDecomposition:
        return SplitDecomposition(self.adj, self.match)


def canonical_decomposition(h: Graph, order: str = "asc") -> SplitDecomposition:
    """Canonical split decomposition of a connected DH graph.

    Raises NotDistanceHereditaryError when pruning gets stuck, which for
    a connected input certifies a DH obstruction exists.
    """
    if h.n == 0:
        raise ValueError("empty graph has no decomposition")
    if not h.is_connected():
        raise ValueError("canonical_decomposition requires a connected graph")
    ok, steps = pruning_sequence(h, order=order)
    if not ok:
        raise NotDistanceHereditaryError("input graph is not distance-hereditary")
    deleted = {v for v, _, _ in steps}
    survivor = next(v for v in h.vertices if v not in deleted)
    builder = _Builder(survivor)
    for v, reason, witness in reversed(steps):
        builder.insert(v, reason, witness)
    d = builder.freeze()
    if any(b.kind == PRIME for b in d.bags):
        raise AssertionError("DH decomposition produced a prime bag")
    return d


def check_canonical(d: SplitDecomposition) -> bool:
    """Structural validity plus the two canonicality prohibitions
    (no complete-complete marked edge, no star-leaf to star-center)."""
    markers = {v for v in d.adj if v < 0}
    if set(d.match) != markers:
        return False
    for a, b in d.match.items():
        if d.match.get(b) != a or a == b:
            return False
    # bag tree must be a tree over the bags
    if len(d.marked_edges) != len(d.bags) - 1:
        return False
    if d.bags:
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j, _ in d.bag_tree[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != len(d.bags):
            return False
    for bag in d.bags:
        if len(bag.members) < 3 and len(d.bags) > 1:
            return False
        if bag.kind == PRIME and len(bag.members) < 5:
            return False
    for m1, m2 in d.marked_edges:
        b1 = d.bags[d.bag_index[m1]]
        b2 = d.bags[d.bag_index[m2]]
        if b1.kind == COMPLETE and b2.kind == COMPLETE:
            return False
        if b1.kind == STAR and b2.kind == STAR:
            leaf1 = b1.center != m1
            leaf2 = b2.center != m2
            if (leaf1 and not leaf2) or (leaf2 and not leaf1):
                return False
    return True


# -- accessibility and insertion classification -----------------------------


def _steiner_bags(d: SplitDecomposition, s: set[int]) -> set[int]:
    """Bag ids of D(S): the minimal subtree spanning all bags meeting s."""
    touched = {d.bag_index[v] for v in s}
    if len(d.bags) == 1:
        return {0}
    alive = set(range(len(d.bags)))
    degree = {i: len(d.bag_tree[i]) for i in alive}
    leaves = [i for i in alive if degree[i] <= 1 and i not in touched]
    while leaves:
        leaf = leaves.pop()
        if leaf in touched or leaf not in alive:
            continue
        if degree[leaf] > 1:
            continue
        alive.discard(leaf)
        for j, _ in d.bag_tree[leaf]:
            if j in alive:
                degree[j] -= 1
                if degree[j] <= 1 and j not in touched:
                    leaves.append(j)
    return alive


def _accessible_map(d: SplitDecomposition, s: set[int], ds_bags: set[int]) -> dict[int, bool]:
    """Accessibility of every vertex in the D(S) bags with respect to s."""
    side_has_s: dict[int, bool] = {}
    for m1, m2 in d.marked_edges:
        side2 = d.tree_side(m1, m2)
        has2 = any(set(d.bags[i].unmarked) & s for i in side2)
        side_has_s[m1] = has2  # beyond m1 means across to m2's side
        side1 = set(range(len(d.bags))) - side2
        has1 = any(set(d.bags[i].unmarked) & s for i in side1)
        side_has_s[m2] = has1
    acc = {}
    for i in ds_bags:
        for v in d.bags[i].members:
            if v >= 0:
                acc[v] = v in s
            else:
                acc[v] = side_has_s[v]
    return acc


def accessibility(d: SplitDecomposition, s: Iterable[int], bag_id: int) -> str:
    """Classify one bag of D(S) as fully/singly/partially accessible."""
    s = set(s)
    ds = _steiner_bags(d, s)
    if bag_id not in ds:
        raise ValueError("bag is not part of D(S)")
    acc = _accessible_map(d, s, ds)
    bag = d.bags[bag_id]
    flags = [acc[v] for v in bag.members]
    if all(flags):
        return FULLY
    if bag.kind == STAR and sum(flags) == 2 and acc[bag.center]:
        return SINGLY
    return PARTIALLY


def classify_insertion(d: SplitDecomposition, s: Iterable[int]) -> InsertionVerdict:
    """Decide whether and where a new vertex with neighborhood s attaches.

    The distance-hereditary verdict itself is decided by pruning the
    recomposed graph plus the new vertex, which is exact by definition.
    The locus follows the accessibility characterization: the unique
    partially accessible bag of D(S) when one exists, otherwise a marked
    edge selected by the star-orientation clause.  The published clause
    is ambiguous for a star whose center marker is an endpoint of the
    candidate edge, so both readings are tried before falling back to
    the edge at a singly accessible bag's center.
    """
    s = set(s)
    if not s or not s <= set(d.unmarked):
        raise ValueError("s must be a nonempty set of unmarked vertices")
    g = d.graph
    probe = max(g.vertices) + 1
    ok, _ = pruning_sequence(g.with_vertex(probe, s))
    if not ok:
        return InsertionVerdict(NOT_DH)

    ds = _steiner_bags(d, s)
    acc = _accessible_map(d, s, ds)

    def bag_state(i: int) -> str:
        bag = d.bags[i]
        flags = [acc[v] for v in bag.members]
        if all(flags):
            return FULLY
        if bag.kind == STAR and sum(flags) == 2 and acc[bag.center]:
            return SINGLY
        return PARTIALLY

    states = {i: bag_state(i) for i in ds}
    partials = sorted(i for i, st in states.items() if st == PARTIALLY)
    if len(partials) > 1:
        raise AssertionError("DH insertion with two partially accessible bags")
    if partials:
        return InsertionVerdict(EXTENDS_AT_BAG, bag=d.bags[partials[0]].members)

    inner_edges = [
        (m1, m2)
        for m1, m2 in d.marked_edges
        if d.bag_index[m1] in ds and d.bag_index[m2] in ds
    ]
    if not inner_edges:
        only = next(iter(ds))
        return InsertionVerdict(EXTENDS_AT_BAG, bag=d.bags[only].members)

    def oriented_towards(i: int, target_bags: set[int]) -> bool:
        bag = d.bags[i]
        if bag.kind != STAR or bag.center is None or bag.center >= 0:
            return False
        c = bag.center
        return target_bags <= d.tree_side(c, d.match[c])

    def edge_fits(m1: int, m2: int, incident_counts: bool) -> bool:
        ends = {d.bag_index[m1], d.bag_index[m2]}
        for i in ds:
            bag = d.bags[i]
            if bag.kind != STAR:
                continue
            c = bag.center
            if c is not None and c < 0 and {c, d.match[c]} == {m1, m2}:
                oriented = incident_counts
            else:
                oriented = oriented_towards(i, ends)
            if oriented != (states[i] == FULLY):
                return False
        return True

    for incident_counts in (True, False):
        for m1, m2 in inner_edges:
            if edge_fits(m1, m2, incident_counts):
                return InsertionVerdict(EXTENDS_AT_EDGE, edge=(min(m1, m2), max(m1, m2)))
    for i in sorted(ds):
        bag = d.bags[i]
        if states[i] == SINGLY and bag.center is not None and bag.center < 0:
            c = bag.center
            m1, m2 = sorted((c, d.match[c]))
            if d.bag_index[d.match[c]] in ds:
                return InsertionVerdict(EXTENDS_AT_EDGE, edge=(m1, m2))
    return InsertionVerdict(EXTENDS_AT_EDGE, edge=inner_edges[0])


def insert_vertex(d: SplitDecomposition, v: int, s: Iterable[int]) -> SplitDecomposition:
    """Canonical decomposition of recompose(d) plus v adjacent to s."""
    s = set(s)
    verdict = classify_insertion(d, s)
    if verdict.outcome == NOT_DH:
        raise NotDistanceHereditaryError("insertion would break distance-heredity")
    g = recompose(d)
    if g.has_vertex(v):
        raise ValueError(f"vertex {v} already present")
    return canonical_decomposition(g.with_vertex(v, s))


# -- debug serialization and order-invariant hashing ------------------------


def _bag_label(d: SplitDecomposition, i: int) -> str:
    bag = d.bags[i]
    if bag.kind == STAR:
        c = bag.center
        cdesc = f"v{c}" if c >= 0 else "marked"
        head = f"star(center={cdesc})"
    else:
        head = bag.kind
    um = ",".join(str(v) for v in bag.unmarked)
    return f"{head} unmarked=[{um}]"


def format_tree(d: SplitDecomposition) -> str:
    """Deterministic text rendering of the bag tree (golden-file aid)."""
    if not d.bags:
        return "(empty)\n"
    root = d.bag_index[min(d.unmarked)]
    lines: list[str] = []

    def walk(i: int, parent: int, depth: int, via: str):
        prefix = "  " * depth
        tag = f" <-{via}" if via else ""
        lines.append(f"{prefix}bag {_bag_label(d, i)}{tag}")
        kids = []
        for j, (m_here, m_there) in d.bag_tree[i]:
            if j != parent:
                role_here = _marker_role(d, i, m_here)
                role_there = _marker_role(d, j, m_there)
                kids.append((d.bags[j].unmarked or (10 ** 9,), j, f"{role_here}:{role_there}"))
        for _, j, via2 in sorted(kids):
            walk(j, i, depth + 1, via2)

    walk(root, -1, 0, "")
    return "\n".join(lines) + "\n"


def _marker_role(d: SplitDecomposition, bag_id: int, m: int) -> str:
    bag = d.bags[bag_id]
    if bag.kind == STAR:
        return "center" if bag.center == m else "leaf"
    return "member"


def tree_hash(d: SplitDecomposition) -> str:
    """Insertion-order-invariant fingerprint of the decomposition.

    Encodes, per bag, its kind, its unmarked graph vertices, where an
    unmarked center sits, and for each tree edge the marker roles on
    both sides; marker ids themselves never enter the hash.
    """
    if not d.bags:
        return "empty"
    root = d.bag_index[min(d.unmarked)]

    def node(i: int, parent: int) -> str:
        bag = d.bags[i]
        if bag.kind == STAR and bag.center is not None and bag.center >= 0:
            cdesc = f"u{bag.center}"
        elif bag.kind == STAR:
            cdesc = "m"
        else:
            cdesc = "-"
        kids = []
        for j, (m_here, m_there) in d.bag_tree[i]:
            if j != parent:
                kids.append(f"{_marker_role(d, i, m_here)}>{_marker_role(d, j, m_there)}" + node(j, i))
        kids.sort()
        um = ",".join(str(v) for v in bag.unmarked)
        return f"({bag.kind}|{cdesc}|{um}|{';'.join(kids)})"

    return node(root, -1)
