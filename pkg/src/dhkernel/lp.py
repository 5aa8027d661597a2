"""Cutting-plane LP engine for the deletion relaxation and vertex multicut.

Both relaxations are covering LPs (min sum x, x(H) >= 1 over a family of
vertex sets).  The restricted LP is solved through its packing dual with
a dense simplex under Bland's rule, so the whole pipeline is exact over
rationals; float mode with a small feasibility slack kicks in for larger
instances.  Violated rows come from the long-hole oracle or weighted
shortest paths.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .graph import Graph
from .obstructions import FLOAT_EPS, weighted_long_hole

EXACT_LIMIT = 64  # vertices; beyond this "auto" arithmetic switches to float


@dataclass
class FractionalSolution:
    weights: dict[int, object]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for v, w in self.weights.items():
            if w < 0:
                raise ValueError(f"negative weight at vertex {v}")

    @property
    def total(self):
        vals = list(self.weights.values())
        if not vals:
            return Fraction(0)
        start = 0.0 if any(isinstance(w, float) for w in vals) else Fraction(0)
        return sum(vals, start)

    def value(self, v: int):
        return self.weights.get(v, 0)

    def restrict(self, keep: Iterable[int]) -> "FractionalSolution":
        keep = set(keep)
        return FractionalSolution({v: w for v, w in self.weights.items() if v in keep})


@dataclass(frozen=True)
class TerminalPairs:
    pairs: tuple[tuple[int, int], ...]

    @staticmethod
    def of(pairs: Iterable[tuple[int, int]]) -> "TerminalPairs":
        norm = set()
        for s, t in pairs:
            if s == t:
                raise ValueError("terminal pair (v,v) is not allowed")
            norm.add((min(s, t), max(s, t)))
        return TerminalPairs(tuple(sorted(norm)))

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


# -- dense simplex on the packing dual --------------------------------------


def _simplex_packing(rows: list[int], cols: list[frozenset[int]], exact: bool):
    """max sum(y) s.t. for each row v: sum over cols containing v of y <= 1.

    Returns (objective, duals) where duals[v] is the optimal covering
    solution of the primal LP.  Bland's rule keeps it finite and fully
    deterministic.
    """
    one = Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    tol = zero if exact else 1e-12
    m, n = len(rows), len(cols)
    ridx = {v: i for i, v in enumerate(rows)}
    # tableau rows: n structural + m slack + rhs
    T = []
    for i, v in enumerate(rows):
        row = [one if v in c else zero for c in cols]
        row += [one if j == i else zero for j in range(m)]
        row.append(one)
        T.append(row)
    cost = [one] * n + [zero] * m + [zero]
    basis = list(range(n, n + m))

    while True:
        enter = next((j for j in range(n + m) if cost[j] > tol), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > tol:
                key = (T[i][-1] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise ArithmeticError("packing LP is unbounded (bad input)")
        piv = best[1]
        pv = T[piv][enter]
        T[piv] = [x / pv for x in T[piv]]
        for i in range(m):
            if i != piv and T[i][enter] != zero:
                f = T[i][enter]
                T[i] = [x - f * y for x, y in zip(T[i], T[piv])]
        f = cost[enter]
        if f != zero:
            cost = [cj - f * tj for cj, tj in zip(cost, T[piv])]
        basis[piv] = enter

    duals = {v: -cost[n + ridx[v]] for v in rows}
    objective = -cost[-1]
    return objective, duals


def _solve_covering(vertices, constraint_sets, exact: bool):
    """min sum x, x >= 0, sum_{v in C} x_v >= 1 per C; solved via the dual."""
    if not constraint_sets:
        return {v: Fraction(0) if exact else 0.0 for v in vertices}
    obj, duals = _simplex_packing(list(vertices), constraint_sets, exact)
    x = {v: duals[v] for v in vertices}
    primal_total = sum(x.values())
    slack = 0 if exact else 1e-7
    # strong duality certifies optimality of the restricted LP
    if abs(primal_total - obj) > slack:
        raise ArithmeticError("simplex lost strong duality")
    for c in constraint_sets:
        if sum(x[v] for v in c) < 1 - slack:
            raise ArithmeticError("simplex produced an infeasible covering solution")
    return x


def _pick_exact(g: Graph, arithmetic: str) -> bool:
    if arithmetic == "exact":
        return True
    if arithmetic == "float":
        return False
    return g.n <= EXACT_LIMIT


# -- the two relaxations -----------------------------------------------------


def solve_dhd_lp(g: Graph, arithmetic: str = "auto", trace: bool = False) -> FractionalSolution:
    """Optimal fractional solution to min sum x with x(H) >= 1 for every
    induced cycle H of length >= 7, by row generation around the
    long-hole separation oracle.  Requires a small-obstruction-free g.
    With trace=True the solution's meta carries one text line per
    separation round (iteration, violated-row size, objective)."""
    exact = _pick_exact(g, arithmetic)
    verts = list(g.vertices)
    zero = Fraction(0) if exact else 0.0
    x = {v: zero for v in verts}
    holes: list[frozenset[int]] = []
    bound = Fraction(1) if exact else 1.0
    iterations = 0
    lines: list[str] = []
    while True:
        viol = weighted_long_hole(g, x, 7, bound)
        if viol is None:
            break
        row = frozenset(viol.vertices)
        if row in holes:
            raise ArithmeticError("separation oracle repeated a satisfied row")
        holes.append(row)
        x = _solve_covering(verts, holes, exact)
        iterations += 1
        if trace:
            obj = sum(x.values())
            lines.append(f"iter={iterations} rowSize={len(row)} objective={obj}")
    meta = {"iterations": iterations, "rows": len(holes), "exact": exact}
    if trace:
        meta["trace"] = lines
    return FractionalSolution(dict(x), meta=meta)


def heavy_vertices(x: FractionalSolution, tau) -> tuple[int, ...]:
    """Vertices with weight >= tau; |result| * tau can never exceed the
    total weight (checked)."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    heavy = tuple(sorted(v for v, w in x.weights.items() if w >= tau))
    total = x.total
    if len(heavy) * tau > total + (0 if isinstance(total, Fraction) else FLOAT_EPS):
        raise AssertionError("heavy-vertex bound violated")
    return heavy


def _dijkstra_with_endpoints(g: Graph, weights, source: int, banned: set[int]):
    """Distances d(v) = min over source->v paths of the full vertex-weight
    sum (both endpoints included).  Returns (dist, prev)."""
    zero = Fraction(0)
    dist = {source: weights.get(source, zero)}
    prev: dict[int, int] = {}
    heap = [(dist[source], source)]
    done: set[int] = set()
    while heap:
        dv, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for w in sorted(g.neighbors(u)):
            if w in banned or w in done:
                continue
            alt = dv + weights.get(w, zero)
            if w not in dist or alt < dist[w]:
                dist[w] = alt
                prev[w] = u
                heapq.heappush(heap, (alt, w))
    return dist, prev


def solve_multicut_lp(g: Graph, t: TerminalPairs, arithmetic: str = "auto") -> FractionalSolution:
    """Optimal fractional vertex multicut: x(P) >= 1 over every terminal
    path, terminals deletable.  Separation is a weighted shortest path."""
    exact = _pick_exact(g, arithmetic)
    verts = list(g.vertices)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    x = {v: zero for v in verts}
    rows: list[frozenset[int]] = []
    iterations = 0
    while True:
        violated = None
        for s, tt in t:
            if not (g.has_vertex(s) and g.has_vertex(tt)):
                raise ValueError("terminal outside graph")
            dist, prev = _dijkstra_with_endpoints(g, x, s, set())
            if tt not in dist:
                continue
            total = dist[tt]
            hit = total < one if exact else total < one - FLOAT_EPS
            if hit:
                path = [tt]
                while path[-1] != s:
                    path.append(prev[path[-1]])
                violated = frozenset(path)
                break
        if violated is None:
            break
        if violated in rows:
            raise ArithmeticError("multicut separation repeated a satisfied row")
        rows.append(violated)
        x = _solve_covering(verts, rows, exact)
        iterations += 1
    return FractionalSolution(
        dict(x), meta={"iterations": iterations, "rows": len(rows), "exact": exact}
    )


# -- rounding ----------------------------------------------------------------


def _min_vertex_cut(g: Graph, s: int, t: int, removed: set[int]) -> set[int]:
    """Small min vertex cut between nonadjacent s,t (unit node capacities,
    node-splitting BFS max-flow); falls back to an endpoint when adjacent."""
    if g.adjacent(s, t):
        return {min(s, t)}
    allowed = set(g.vertices) - removed
    # node-split digraph: v_in=(v,0), v_out=(v,1)
    cap: dict[tuple, dict[tuple, int]] = {}

    def add(u, v, c):
        cap.setdefault(u, {})[v] = cap.setdefault(u, {}).get(v, 0) + c
        cap.setdefault(v, {}).setdefault(u, 0)

    big = len(allowed) + 1
    for v in allowed:
        add((v, 0), (v, 1), big if v in (s, t) else 1)
        for w in g.neighbors(v):
            if w in allowed:
                add((v, 1), (w, 0), big)
    src, snk = (s, 0), (t, 1)
    flow = 0
    while True:
        parent = {src: None}
        q = [src]
        while q and snk not in parent:
            u = q.pop(0)
            for v, c in cap.get(u, {}).items():
                if c > 0 and v not in parent:
                    parent[v] = u
                    q.append(v)
        if snk not in parent:
            break
        v = snk
        while parent[v] is not None:
            u = parent[v]
            cap[u][v] -= 1
            cap[v][u] += 1
            v = u
        flow += 1
    # min cut = split-arcs crossing the reachable side
    reach = {src}
    q = [src]
    while q:
        u = q.pop(0)
        for v, c in cap.get(u, {}).items():
            if c > 0 and v not in reach:
                reach.add(v)
                q.append(v)
    cut = {v for v in allowed if (v, 0) in reach and (v, 1) not in reach}
    if not cut:
        cut = {min(s, t)}
    return cut


def round_multicut(g: Graph, t: TerminalPairs, x: FractionalSolution) -> tuple[int, ...]:
    """Integral vertex multicut by ball growing at radius 1/2.

    For each still-connected pair, vertices whose distance interval
    [d(v)-x_v, d(v)) straddles 1/2 form a cut separating the pair
    whenever x is feasible; a reachability post-check with min-cut
    repair makes validity unconditional.
    """
    exact = not any(isinstance(w, float) for w in x.weights.values())
    half = Fraction(1, 2) if exact else 0.5
    cut: set[int] = set()
    for s, tt in t:
        if s in cut or tt in cut:
            continue
        if not g.connected(s, tt, removed=cut):
            continue
        weights = x.weights
        ds = weights.get(s, Fraction(0))
        if ds >= half:
            cut.add(s)
            continue
        dist, _ = _dijkstra_with_endpoints(g, weights, s, cut)
        ball_cut = {
            v
            for v, dv in dist.items()
            if dv >= half and dv - weights.get(v, Fraction(0)) < half
        }
        cut |= ball_cut
        if g.connected(s, tt, removed=cut):
            cut |= _min_vertex_cut(g, s, tt, cut)
    # unconditional repair: the returned set must disconnect every pair
    for s, tt in t:
        if s in cut or tt in cut:
            continue
        while g.connected(s, tt, removed=cut):
            cut |= _min_vertex_cut(g, s, tt, cut)
    for s, tt in t:
        assert s in cut or tt in cut or not g.connected(s, tt, removed=cut)
    return tuple(sorted(cut))


def double_on_dh_part(x: FractionalSolution, d: Iterable[int], k: Iterable[int]) -> FractionalSolution:
    """Zero out the biclique side and double the DH side; keeps
    feasibility for the controlled graph and every value below 1/10."""
    d, k = set(d), set(k)
    twentieth = Fraction(1, 20)
    for v, w in x.weights.items():
        if w >= twentieth:
            raise ValueError(f"weight at {v} is >= 1/20; doubling would not stay feasible")
    out: dict[int, object] = {}
    for v in d:
        out[v] = 2 * x.weights.get(v, Fraction(0))
    for v in k:
        out[v] = Fraction(0) if not isinstance(x.weights.get(v, 0), float) else 0.0
    res = FractionalSolution(out)
    tenth = Fraction(1, 10)
    assert all(w < tenth for w in out.values())
    assert res.total <= 2 * x.total
    return res
