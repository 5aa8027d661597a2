"""Shared fixture builders for the reduction-rule and acceptance tests.

Chain fixtures glue segments whose canonical decompositions are known
shapes: paths give unmarked-center separator runs, twin-pair groups give
separator hubs with 2-element eta sets, and bipartite half-graphs give
runs of non-separator (forward/backward star) bags.  Attaching the
modulator at the two chain ends keeps it good by construction (verified
by assertion wherever used).
"""

from __future__ import annotations

import random

from dhkernel.graph import Graph

from oracles import random_dh_graph


def path_seg(m, start):
    ids = list(range(start, start + m))
    return ids, [(ids[i], ids[i + 1]) for i in range(m - 1)], [ids[0]], [ids[-1]]


def pair_seg(start, clique=False):
    ids = [start, start + 1]
    return ids, ([(start, start + 1)] if clique else []), ids, ids


def half_graph_seg(t, start):
    left = [start + 2 * i for i in range(t)]
    right = [start + 2 * i + 1 for i in range(t)]
    edges = [(left[i], right[j]) for i in range(t) for j in range(i, t)]
    return left + right, edges, [left[0], right[0]], [left[-1], right[-1]]


def attach_chain(segments):
    """Join consecutive segments by a complete join of their anchors."""
    verts, edges = [], []
    for v, e, _, _ in segments:
        verts += v
        edges += e
    for (_, _, _, r), (_, _, l, _) in zip(segments, segments[1:]):
        edges += [(a, b) for a in r for b in l]
    return Graph(verts, edges), segments[0][2], segments[-1][3]


def chain_with_modulator(segments, extra_s_edges=()):
    """Chain graph plus two modulator vertices at the two ends."""
    g, la, ra = attach_chain(segments)
    a = max(g.vertices) + 1
    b = a + 1
    g = g.with_vertex(a, la).with_vertex(b, ra)
    for u, v in extra_s_edges:
        g = g.with_edges([(u, v)])
    return g, {a, b}


def rule7_fixture(seg_len=14):
    return chain_with_modulator([path_seg(seg_len, 0)])

def rule7_eta_fixture():
    # the first firing quintuple has eta sizes (1,2,1,1,1): the second
    # separator's pair gets trimmed down to the third's singleton
    segs = [path_seg(5, 0), pair_seg(20), path_seg(7, 30)]
    return chain_with_modulator(segs)


def rule8_fixture(t=14):
    return chain_with_modulator([half_graph_seg(t, 0)])


def rule6_fixture():
    return chain_with_modulator(
        [path_seg(6, 0), half_graph_seg(5, 10), path_seg(6, 40)]
    )


def random_modulator_fixture(rng: random.Random, n_lo=6, n_hi=14, attach_p=0.3):
    """Random DH graph plus 1-2 attachment vertices; returns (g, s) with
    no goodness guarantee (caller filters)."""
    base = random_dh_graph(rng, rng.randint(n_lo, n_hi))
    s = set()
    g = base
    a_n = [v for v in base.vertices if rng.random() < attach_p]
    if a_n:
        g = g.with_vertex(99, a_n)
        s.add(99)
    if rng.random() < 0.5:
        b_n = [v for v in base.vertices if rng.random() < attach_p * 0.7]
        if b_n:
            g = g.with_vertex(98, b_n)
            s.add(98)
    return g, s


def planted_instance(rng: random.Random, n_base=8, gadgets=1, decorations=0):
    """DH base + vertex-disjoint obstruction gadgets, each glued to the
    base by one edge; exact optimum equals the number of gadgets."""
    from oracles import (
        cycle_graph,
        domino_graph,
        gem_graph,
        house_graph,
    )

    g = random_dh_graph(rng, n_base)
    nid = n_base
    makers = [house_graph, gem_graph, domino_graph, lambda: cycle_graph(5), lambda: cycle_graph(6), lambda: cycle_graph(7)]
    for _ in range(gadgets):
        gad = rng.choice(makers)()
        ids = {v: nid + i for i, v in enumerate(gad.vertices)}
        nid += gad.n
        verts = list(g.vertices) + sorted(ids.values())
        edges = list(g.edges()) + [(ids[u], ids[v]) for u, v in gad.edges()]
        edges.append((rng.randrange(n_base), min(ids.values())))
        g = Graph(verts, edges)
    for _ in range(decorations):
        anchor = rng.choice(g.vertices)
        g = g.with_vertex(nid, [anchor])
        nid += 1
    return g
