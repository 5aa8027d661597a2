"""Upgrading a DH-modulator to a good one.

A modulator S is good when every obstruction meets it in at least two
vertices, equivalently G[(V\\S) + v] is DH for each v in S.  Per vertex:
greedily hit all small obstructions through v (a flower of k+1 of them
pairwise meeting only in v forces v into every solution), then hit the
long holes through v with a rounded vertex multicut whose terminal pairs
are the v-neighbors at distance >= 3 elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .graph import Graph
from .lp import TerminalPairs, round_multicut, solve_multicut_lp
from .obstructions import Obstruction, find_small_obstruction, is_distance_hereditary


@dataclass(frozen=True)
class FlowerCertificate:
    """k+1 small obstructions whose pairwise intersection is exactly {v}."""

    vertex: int
    petals: tuple[Obstruction, ...]


class ForcedVertex:
    """Marker: every modulator of size <= k must contain the vertex."""

    def __init__(self, vertex: int):
        self.vertex = vertex

    def __repr__(self):
        return f"ForcedVertex({self.vertex})"


@dataclass(frozen=True)
class GoodModulatorResult:
    graph: Graph
    budget: int
    modulator: tuple[int, ...]
    forced: tuple[int, ...]


def small_obs_hit_or_flower(
    hv: Graph, v: int, k: int
) -> Union[FlowerCertificate, tuple[int, ...]]:
    """Either a flower of k+1 small obstructions at v, or T_v of size
    <= 5k with hv - T_v free of small obstructions.

    Greedy: each found obstruction contributes its <= 5 non-v vertices
    to T_v and is removed from the working graph, so successive petals
    are disjoint outside v by construction.
    """
    if not is_distance_hereditary(hv.delete_vertex(v)):
        raise ValueError("small_obs_hit_or_flower requires hv - v to be DH")
    t_v: set[int] = set()
    petals: list[Obstruction] = []
    cur = hv
    while True:
        obs = find_small_obstruction(cur)
        if obs is None:
            return tuple(sorted(t_v))
        if v not in obs.vertices:
            raise AssertionError("small obstruction avoiding v contradicts hv - v being DH")
        petals.append(obs)
        if len(petals) >= k + 1:
            return FlowerCertificate(v, tuple(petals))
        others = [u for u in obs.vertices if u != v]
        t_v.update(others)
        cur = cur.delete_vertices(others)


def hole_hitting_at_vertex(
    g: Graph, v: int, k: int, arithmetic: str = "auto"
) -> Union[tuple[int, ...], ForcedVertex]:
    """Hitting set for the long holes through v, or ForcedVertex.

    Terminal pairs are v-neighbors at distance >= 3 in g - v; a vertex
    multicut for them is exactly a hitting set for induced cycles of
    length >= 5 through v, and its LP value exceeding k forces v.
    """
    if find_small_obstruction(g) is not None:
        raise ValueError("hole_hitting_at_vertex requires a small-obstruction-free graph")
    gv = g.delete_vertex(v)
    if not is_distance_hereditary(gv):
        raise ValueError("hole_hitting_at_vertex requires g - v to be DH")
    nbrs = sorted(g.neighbors(v))
    pairs = []
    for i, s in enumerate(nbrs):
        dist = gv.bfs_distances(s)
        for t in nbrs[i + 1:]:
            if dist.get(t, 10 ** 9) >= 3:
                pairs.append((s, t))
    if not pairs:
        return ()
    terms = TerminalPairs.of(pairs)
    x = solve_multicut_lp(gv, terms, arithmetic)
    if x.total > k:
        return ForcedVertex(v)
    cut = round_multicut(gv, terms, x)
    if not is_distance_hereditary(g.delete_vertices(cut)):
        raise AssertionError("multicut failed to hit every long hole through v")
    return cut


def good_modulator(
    g: Graph, k: int, s: Iterable[int], arithmetic: str = "auto"
) -> Optional[GoodModulatorResult]:
    """Equivalent instance (G-U, k-|U|) with a good DH-modulator S'.

    Forced vertices (flower or multicut-LP evidence) are deleted on the
    spot with the budget decremented; every surviving v in S contributes
    its small-obstruction hitting set T_v and hole hitting set X_v.
    Returns None when more vertices are forced than the budget allows.
    """
    s = set(s)
    if not is_distance_hereditary(g.delete_vertices(s)):
        raise ValueError("s must be a DH-modulator of g")
    cur = g
    k_cur = k
    forced: list[int] = []
    extras: set[int] = set()
    for v in sorted(s):
        rest = (set(cur.vertices) - s) | {v}
        hv = cur.induced(rest)
        hit = small_obs_hit_or_flower(hv, v, k_cur)
        if isinstance(hit, FlowerCertificate):
            forced.append(v)
            cur = cur.delete_vertex(v)
            k_cur -= 1
            if k_cur < 0:
                return None
            continue
        t_v = set(hit)
        hv2 = hv.delete_vertices(t_v)
        hole_hit = hole_hitting_at_vertex(hv2, v, k_cur, arithmetic)
        if isinstance(hole_hit, ForcedVertex):
            forced.append(v)
            cur = cur.delete_vertex(v)
            k_cur -= 1
            if k_cur < 0:
                return None
            continue
        extras |= t_v | set(hole_hit)
    modulator = tuple(sorted((s - set(forced)) | extras))
    result = GoodModulatorResult(cur, k_cur, modulator, tuple(sorted(forced)))
    _assert_good(result)
    return result


def _assert_good(res: GoodModulatorResult):
    g = res.graph
    mod = set(res.modulator)
    rest = set(g.vertices) - mod
    if not is_distance_hereditary(g.induced(rest)):
        raise AssertionError("good-modulator output is not even a modulator")
    for v in sorted(mod):
        if not is_distance_hereditary(g.induced(rest | {v})):
            raise AssertionError(f"modulator vertex {v} is still in a private obstruction")


def is_good_modulator(g: Graph, s: Iterable[int]) -> bool:
    """Defining check: G[(V\\S) + v] is DH for every v in S, and S is a
    modulator."""
    s = set(s)
    rest = set(g.vertices) - s
    if not is_distance_hereditary(g.induced(rest)):
        return False
    return all(is_distance_hereditary(g.induced(rest | {v})) for v in sorted(s))
