"""Edge-list parsing/serialization and reproducible instance generation.

Format: a header line ``p <n> <m>`` followed by m lines ``e <u> <v>``
with 1-based vertex ids; ``c ...`` comment lines and blank lines are
ignored.  Emission renumbers vertices densely to 1..n, so emit(parse(t))
is canonical and parse(emit(g)) is the identity on parsed graphs.
"""

from __future__ import annotations

import random

from .driver import Instance
from .graph import Graph


class ParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_graph(text: str) -> Graph:
    n = m = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        toks = line.split()
        if toks[0] == "p":
            if n is not None:
                raise ParseError("duplicate header", lineno)
            if len(toks) != 3:
                raise ParseError("header must be 'p <n> <m>'", lineno)
            try:
                n, m = int(toks[1]), int(toks[2])
            except ValueError:
                raise ParseError("header fields must be integers", lineno) from None
            if n < 0 or m < 0:
                raise ParseError("negative sizes in header", lineno)
        elif toks[0] == "e":
            if n is None:
                raise ParseError("edge before header", lineno)
            if len(toks) != 3:
                raise ParseError("edge line must be 'e <u> <v>'", lineno)
            try:
                u, v = int(toks[1]), int(toks[2])
            except ValueError:
                raise ParseError("edge endpoints must be integers", lineno) from None
            if u == v:
                raise ParseError(f"self-loop at vertex {u}", lineno)
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"vertex id out of range 1..{n}", lineno)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ParseError(f"duplicate edge {key}", lineno)
            seen.add(key)
            edges.append(key)
        else:
            raise ParseError(f"unknown line type {toks[0]!r}", lineno)
    if n is None:
        raise ParseError("missing header", 1)
    if m != len(edges):
        raise ParseError(f"header promised {m} edges, found {len(edges)}", 1)
    return Graph(range(1, n + 1), edges)


def emit_graph(g: Graph) -> str:
    rank = {v: i + 1 for i, v in enumerate(g.vertices)}
    lines = [f"p {g.n} {g.m}"]
    for u, v in sorted((rank[a], rank[b]) for a, b in g.edges()):
        lines.append(f"e {min(u, v)} {max(u, v)}")
    return "\n".join(lines) + "\n"


# -- instance generation -----------------------------------------------------

GADGETS = {
    "house": (5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]),
    "gem": (5, [(0, 1), (1, 2), (2, 3), (4, 0), (4, 1), (4, 2), (4, 3)]),
    "domino": (6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]),
    "c5": (5, [(i, (i + 1) % 5) for i in range(5)]),
    "c6": (6, [(i, (i + 1) % 6) for i in range(6)]),
    "c7": (7, [(i, (i + 1) % 7) for i in range(7)]),
    "c8": (8, [(i, (i + 1) % 8) for i in range(8)]),
}


def _grow_dh(rng: random.Random, n: int) -> Graph:
    """Connected DH graph on 1..n grown by pendant/twin additions."""
    adj: dict[int, set[int]] = {1: set()}
    for v in range(2, n + 1):
        anchor = rng.randint(1, v - 1)
        op = rng.choice(("pendant", "pendant", "true_twin", "false_twin"))
        if op == "pendant":
            nbrs = {anchor}
        elif op == "true_twin":
            nbrs = set(adj[anchor]) | {anchor}
        else:
            nbrs = set(adj[anchor]) or {anchor}
        adj[v] = set()
        for w in nbrs:
            adj[v].add(w)
            adj[w].add(v)
    return Graph(range(1, n + 1), [(u, w) for u in adj for w in adj[u] if u < w])


def generate_instance(
    seed: int,
    profile: str,
    n: int = 30,
    k: int = 2,
    p: float = 0.3,
) -> Instance:
    """Reproducible pseudo-random instance.

    dh-pure: connected DH graph, budget k as given.
    dh-plus-planted: DH base plus k obstruction gadgets, each attached to
    the base by a single edge; gadget blocks are vertex-disjoint, so the
    exact optimum is the number of gadgets.
    dense-noise: Bernoulli(p) edges.
    """
    rng = random.Random(seed)
    if profile == "dh-pure":
        return Instance(_grow_dh(rng, n), k)
    if profile == "dh-plus-planted":
        g = _grow_dh(rng, n)
        next_id = n + 1
        names = sorted(GADGETS)
        for _ in range(k):
            size, tmpl = GADGETS[rng.choice(names)]
            ids = list(range(next_id, next_id + size))
            next_id += size
            verts = list(g.vertices) + ids
            edges = list(g.edges()) + [(ids[a], ids[b]) for a, b in tmpl]
            edges.append((rng.randint(1, n), ids[0]))
            g = Graph(verts, edges)
        return Instance(g, k)
    if profile == "dense-noise":
        edges = [
            (u, v)
            for u in range(1, n + 1)
            for v in range(u + 1, n + 1)
            if rng.random() < p
        ]
        return Instance(Graph(range(1, n + 1), edges), k)
    raise ValueError(f"unknown profile {profile!r}")
