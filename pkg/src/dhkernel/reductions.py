"""Reduction rules 1-8 with the red/blue bag coloring machinery.

The twin rule (1) and component rule (2) act directly on the graph and
modulator; rules 3-8 act on the canonical split decomposition of one
non-trivial component of G-S, guided by which bags or marked edges
accommodate each modulator vertex (the S-affected loci) and by the
red/blue coloring that isolates long unaffected bag chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Optional

from .graph import Graph, components, twin_classes
from .obstructions import _classify5
from .splitdec import (
    COMPLETE,
    EXTENDS_AT_BAG,
    NOT_DH,
    STAR,
    SplitDecomposition,
    canonical_decomposition,
    classify_insertion,
)

RED = "red"
BLUE = "blue"

DEFAULT_RULE_ORDER = ("2", "3", "4", "5", "6", "7", "8", "1")


# -- twin rule (1) -----------------------------------------------------------


def _mark_class(marked: set[int], cls: list[int], quota: int):
    have = sum(1 for w in cls if w in marked)
    for w in sorted(cls):
        if have >= quota:
            break
        if w not in marked:
            marked.add(w)
            have += 1


def rule_twin(g: Graph, k: int, s: Iterable[int]) -> Optional[Graph]:
    """Keep k+1 representatives per small-trace class of each twin set of
    G-S (plus the house/gem classes over size-4 traces) and delete one
    surplus vertex."""
    s = sorted(set(s))
    rest = [v for v in g.vertices if v not in set(s)]
    gs = g.induced(rest)
    m = min(len(s), 3)
    for wset in twin_classes(gs):
        w_list = list(wset)
        marked: set[int] = set()
        for sprime in combinations(s, m):
            classes: dict[frozenset[int], list[int]] = {}
            for w in w_list:
                tr = frozenset(g.neighbors(w) & set(sprime))
                classes.setdefault(tr, []).append(w)
            for tr in sorted(classes, key=sorted):
                _mark_class(marked, classes[tr], k + 1)
        if len(s) >= 4:
            for sprime in combinations(s, 4):
                sub = g.induced(sprime)
                if sub.m < 3:
                    continue  # house/gem minus a vertex has >= 3 edges
                classes = {}
                for w in w_list:
                    tr = frozenset(g.neighbors(w) & set(sprime))
                    classes.setdefault(tr, []).append(w)
                for tr in sorted(classes, key=sorted):
                    probe = classes[tr][0]
                    kind = _classify5(g, list(sprime) + [probe])
                    if kind in ("house", "gem"):
                        _mark_class(marked, classes[tr], k + 1)
        unmarked = [w for w in w_list if w not in marked]
        if unmarked:
            return g.delete_vertex(min(unmarked))
    return None


def twin_set_bound(k: int, s_size: int) -> int:
    """Closed-form cap on a twin set of G-S after exhausting rule 1."""
    if s_size <= 3:
        return 8 * (k + 1)
    return 8 * (k + 1) * comb(s_size, 3) + 16 * (k + 1) * (
        comb(4 * k, 4)
        + comb(4 * k, 3) * comb(s_size, 1)
        + comb(4 * k, 2) * comb(s_size, 2)
        + comb(4 * k, 1) * comb(s_size, 3)
    )


# -- component rule (2) ------------------------------------------------------


def rule_components(g: Graph, k: int, s: Iterable[int]) -> Optional[Graph]:
    """Mark k+2 non-trivial components per witnessing modulator pair and
    clear all edges of one unmarked component."""
    s = sorted(set(s))
    rest = [v for v in g.vertices if v not in set(s)]
    comps = [c for c in components(g.induced(rest)) if len(c) >= 2]
    if not comps:
        return None
    nbhd = {
        (v, ci): g.neighbors(v) & set(c)
        for v in s
        for ci, c in enumerate(comps)
    }
    marked: set[int] = set()
    for v, w in combinations(s, 2):
        quota = k + 2
        have = 0
        for ci, c in enumerate(comps):
            if have >= quota:
                break
            if ci in marked:
                continue
            nv, nw = nbhd[(v, ci)], nbhd[(w, ci)]
            if nv and nw and nv != nw:
                marked.add(ci)
                have += 1
    for ci, c in enumerate(comps):
        if ci in marked:
            continue
        witnessed = any(
            nbhd[(v, ci)] and nbhd[(w, ci)] and nbhd[(v, ci)] != nbhd[(w, ci)]
            for v, w in combinations(s, 2)
        )
        if witnessed:
            inner = [(u, w) for u, w in g.edges() if u in set(c) and w in set(c)]
            return g.without_edges(inner)
    return None


# -- degree-one rule (3) -----------------------------------------------------


def rule_degree_one(g: Graph) -> Optional[Graph]:
    for v in g.vertices:
        if g.degree(v) <= 1:
            return g.delete_vertex(v)
    return None


# -- decomposition annotation ------------------------------------------------


@dataclass
class AnnotatedDecomposition:
    component: tuple[int, ...]
    decomposition: SplitDecomposition
    locus: dict[int, tuple]  # modulator vertex -> ("bag", bag_id) | ("edge", pair)
    affected_bags: frozenset[int]
    affected_edges: frozenset[tuple[int, int]]
    colors: dict[int, str]
    red: frozenset[int]
    q: frozenset[int]


def color_and_annotate(d: SplitDecomposition, g: Graph, s: Iterable[int]) -> AnnotatedDecomposition:
    """Compute S-affected loci via the insertion classifier and the
    red/blue coloring: red bags are the affected ones, their edge
    endpoints, neighbors of affected leaf bags, and branch bags."""
    comp = set(d.unmarked)
    locus: dict[int, tuple] = {}
    a_bags: set[int] = set()
    a_edges: set[tuple[int, int]] = set()
    for v in sorted(set(s)):
        sv = g.neighbors(v) & comp
        if not sv:
            continue
        verdict = classify_insertion(d, sv)
        if verdict.outcome == NOT_DH:
            raise AssertionError("modulator vertex insertion rejected; s is not good here")
        if verdict.outcome == EXTENDS_AT_BAG:
            bid = d.bag_index[verdict.bag[0]]
            locus[v] = ("bag", bid)
            a_bags.add(bid)
        else:
            locus[v] = ("edge", verdict.edge)
            a_edges.add(verdict.edge)

    nbags = len(d.bags)
    tree = d.bag_tree
    leaf = {i for i in range(nbags) if len(tree[i]) == 1}

    def branch(i: int) -> bool:
        big = 0
        for _, (m_here, m_there) in tree[i]:
            if len(d.tree_side(m_here, m_there)) >= 2:
                big += 1
        return big >= 3

    colors = {}
    edge_end_bags = {d.bag_index[m] for e in a_edges for m in e}
    for i in range(nbags):
        red = i in a_bags or i in edge_end_bags
        if not red:
            for j, _ in tree[i]:
                if j in leaf and j in a_bags:
                    red = True
                    break
        if not red and branch(i):
            red = True
        colors[i] = RED if red else BLUE
    red_set = frozenset(i for i in range(nbags) if colors[i] == RED)
    q_set = frozenset(
        i
        for i in leaf
        if colors[i] == BLUE and any(j in red_set for j, _ in tree[i])
    )
    return AnnotatedDecomposition(
        component=tuple(sorted(comp)),
        decomposition=d,
        locus=locus,
        affected_bags=frozenset(a_bags),
        affected_edges=frozenset(a_edges),
        colors=colors,
        red=red_set,
        q=q_set,
    )


def annotate_components(g: Graph, s: Iterable[int]) -> list[AnnotatedDecomposition]:
    s = set(s)
    rest = [v for v in g.vertices if v not in s]
    out = []
    for comp in components(g.induced(rest)):
        if len(comp) < 2:
            continue
        d = canonical_decomposition(g.induced(comp))
        out.append(color_and_annotate(d, g, s))
    return out


# -- leaf-star rule (4) ------------------------------------------------------


def rule_leaf_star(ann: AnnotatedDecomposition, g: Graph) -> Optional[Graph]:
    """An unaffected leaf bag whose unaffected star neighbor separates
    only it from the rest loses that neighbor's unmarked vertices."""
    d = ann.decomposition
    tree = d.bag_tree
    for b in sorted(i for i in range(len(d.bags)) if len(tree[i]) == 1):
        if b in ann.affected_bags:
            continue
        (bp, (m_b, m_bp)), = tree[b]
        pair = (min(m_b, m_bp), max(m_b, m_bp))
        if bp in ann.affected_bags or pair in ann.affected_edges:
            continue
        if len(tree[bp]) != 2:
            continue  # D - V(B') must leave exactly two components
        bag_bp = d.bags[bp]
        if bag_bp.kind != STAR or bag_bp.center != m_bp:
            continue  # center of B' must be adjacent to B
        doomed = bag_bp.unmarked
        if not doomed:
            raise AssertionError("canonical star bag without unmarked leaves")
        return g.delete_vertices(doomed)
    return None


# -- flip rule (5) -----------------------------------------------------------


def _bag_count(g: Graph, verts: set[int]) -> int:
    total = 0
    sub = g.induced(verts)
    for comp in components(sub):
        if len(comp) == 1:
            total += 1
        else:
            total += len(canonical_decomposition(sub.induced(comp)).bags)
    return total


def rule_flip_twins(g: Graph, s: Iterable[int]) -> Optional[Graph]:
    """Flip the internal adjacency of a twin set of G inside one
    component of G-S when that strictly lowers the bag count."""
    s = set(s)
    rest = [v for v in g.vertices if v not in s]
    gs = g.induced(rest)
    g_classes = twin_classes(g)
    for comp in components(gs):
        if len(comp) < 2:
            continue
        cset = set(comp)
        for cls in g_classes:
            a = [v for v in cls if v in cset]
            if len(a) < 2:
                continue
            before = _bag_count(g, cset)
            flips = []
            for u, w in combinations(sorted(a), 2):
                flips.append((u, w))
            present = {e for e in g.edges() if e[0] in set(a) and e[1] in set(a)}
            add = [e for e in flips if e not in present]
            drop = [e for e in flips if e in present]
            flipped = g.without_edges(drop).with_edges(add)
            after = _bag_count(flipped, cset)
            if after < before:
                return flipped
    return None


# -- separator-bag machinery (rules 6-8) -------------------------------------


@dataclass
class SeparatorBagContext:
    ann: AnnotatedDecomposition
    spine: tuple[int, ...]  # bag ids along the blue chain
    separators: tuple[int, ...]  # indices into spine
    eta: dict[int, tuple[int, ...]] = field(default_factory=dict)
    leaf_of: dict[int, int] = field(default_factory=dict)  # spine idx -> leaf bag id
    chain_bags: frozenset[int] = frozenset()  # spine plus attached leaf bags


def build_separator_contexts(ann: AnnotatedDecomposition) -> list[SeparatorBagContext]:
    """Extract the spine, separator bags and eta sets of every blue
    component with exactly two red attachments; malformed components
    (still reducible by earlier rules) are skipped."""
    d = ann.decomposition
    tree = d.bag_tree
    n = len(d.bags)
    alive = [i for i in range(n) if i not in ann.red and i not in ann.q]
    seen: set[int] = set()
    out = []
    for start in sorted(alive):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            b = stack.pop()
            for j, _ in tree[b]:
                if j in set(alive) and j not in comp:
                    comp.add(j)
                    stack.append(j)
        seen |= comp
        anchors = []
        for b in sorted(comp):
            for j, _ in tree[b]:
                if j in ann.red:
                    anchors.append(b)
        if len(anchors) != 2:
            continue
        spine = _tree_path(tree, anchors[0], anchors[1], comp)
        if spine is None:
            continue
        spine_set = set(spine)
        leaf_of: dict[int, int] = {}
        ok = True
        for idx, b in enumerate(spine):
            offs = [j for j, _ in tree[b] if j in comp and j not in spine_set]
            if not offs:
                continue
            if len(offs) > 1 or len(tree[offs[0]]) != 1:
                ok = False
                break
            leaf_of[idx] = offs[0]
        if not ok or len(spine_set) + len(leaf_of) != len(comp):
            continue
        separators = []
        eta: dict[int, tuple[int, ...]] = {}
        for idx in range(1, len(spine) - 1):
            b = spine[idx]
            bag = d.bags[b]
            if bag.kind != STAR or bag.center is None:
                continue
            c = bag.center
            if c >= 0:
                towards = None
            else:
                towards = d.bag_index[d.match[c]]
            if towards in (spine[idx - 1], spine[idx + 1]):
                continue
            separators.append(idx)
            if idx in leaf_of:
                eta[idx] = d.bags[leaf_of[idx]].unmarked
            else:
                if c < 0:
                    raise AssertionError("separator center marked but no leaf bag found")
                eta[idx] = (c,)
            if not eta[idx]:
                raise AssertionError("empty eta at a separator bag")
        out.append(
            SeparatorBagContext(
                ann=ann,
                spine=tuple(spine),
                separators=tuple(separators),
                eta=eta,
                leaf_of=leaf_of,
                chain_bags=frozenset(comp),
            )
        )
    return out


def _tree_path(tree, a, b, allowed) -> Optional[list[int]]:
    if a == b:
        return [a]
    prev = {a: None}
    queue = [a]
    while queue:
        u = queue.pop(0)
        for j, _ in tree[u]:
            if j in allowed and j not in prev:
                prev[j] = u
                queue.append(j)
                if j == b:
                    queue = []
                    break
    if b not in prev:
        return None
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def rule_separator_bags(ctx: SeparatorBagContext, g: Graph) -> Optional[Graph]:
    """Four consecutive separator bags: clear the unmarked vertices of a
    bag strictly between the middle two."""
    d = ctx.ann.decomposition
    seps = ctx.separators
    for i in range(len(seps) - 3):
        a1, a2, a3, a4 = seps[i: i + 4]
        for z in range(a2 + 1, a3):
            doomed = d.bags[ctx.spine[z]].unmarked
            if doomed:
                return g.delete_vertices(doomed)
    return None


def _edge_between(d: SplitDecomposition, b1: int, b2: int) -> tuple[int, int]:
    for j, (m_here, m_there) in d.bag_tree[b1]:
        if j == b2:
            return m_here, m_there
    raise AssertionError("bags are not adjacent")


def rule_contract_separators(ctx: SeparatorBagContext, g: Graph) -> Optional[Graph]:
    """Five consecutive separator bags with the middle three contiguous:
    drop the middle one (plus its leaf bag), bridge its neighbors'
    attachment sets, and equalize eta of the second bag downward."""
    d = ctx.ann.decomposition
    seps = ctx.separators
    for i in range(len(seps) - 4):
        a1, a2, a3, a4, a5 = seps[i: i + 5]
        if a3 != a2 + 1 or a4 != a3 + 1:
            continue  # rule 6 still has work to do in between
        b2, b3, b4 = ctx.spine[a2], ctx.spine[a3], ctx.spine[a4]
        m2, m3l = _edge_between(d, b2, b3)
        m3r, m4 = _edge_between(d, b3, b4)
        left_u, left_rest = d.split_sides(m2, m3l)
        right_rest, right_u = d.split_sides(m3r, m4)
        p_side = {u for u in left_u if g.neighbors(u) & left_rest}
        q_side = {u for u in right_u if g.neighbors(u) & right_rest}
        doomed = set(d.bags[b3].unmarked)
        if a3 in ctx.leaf_of:
            doomed |= set(d.bags[ctx.leaf_of[a3]].unmarked)
        eta2 = list(ctx.eta[a2])
        eta3 = ctx.eta[a3]
        if len(eta2) > len(eta3):
            doomed |= set(eta2[len(eta3):])  # keep the lex-least survivors
        bridge = [(u, w) for u in sorted(p_side) for w in sorted(q_side)]
        out = g.with_edges(bridge).delete_vertices(doomed)
        return out
    return None


def rule_unaffected_run(ctx: SeparatorBagContext, g: Graph, k: int) -> Optional[Graph]:
    """A run of 5k+10 interior non-separator bags: keep k+1 bags of each
    of the three types and delete one unmarked bag's vertices."""
    d = ctx.ann.decomposition
    m = len(ctx.spine)
    run_len = 5 * k + 10
    sep_set = set(ctx.separators)
    for a in range(1, m - run_len):
        idxs = list(range(a, a + run_len))
        if any(j in sep_set for j in idxs):
            continue
        quota = {"complete": k + 1, "fwd": k + 1, "bwd": k + 1}
        unmarked_bag = None
        for j in idxs:
            b = ctx.spine[j]
            bag = d.bags[b]
            if bag.kind == COMPLETE:
                t = "complete"
            else:
                c = bag.center
                towards = d.bag_index[d.match[c]] if (c is not None and c < 0) else None
                if towards == ctx.spine[j + 1]:
                    t = "fwd"
                elif towards == ctx.spine[j - 1]:
                    t = "bwd"
                else:
                    raise AssertionError("non-separator star bag points off the spine")
            if quota[t] > 0:
                quota[t] -= 1
            elif unmarked_bag is None:
                unmarked_bag = b
        if unmarked_bag is not None:
            doomed = d.bags[unmarked_bag].unmarked
            if doomed:
                return g.delete_vertices(doomed)
    return None


# -- bounds ------------------------------------------------------------------


@dataclass
class BoundReport:
    ok: bool
    component_bags: list[tuple[tuple[int, ...], int, int]]  # (component, bags, cap)
    chain_lengths: list[tuple[int, int]]  # (bags in blue component, cap)
    twin_sets: list[tuple[int, int]]  # (size, cap)
    nontrivial_components: tuple[int, int]  # (count, cap)
    red_counts: list[tuple[int, int, int]] = field(default_factory=list)  # (|R|, |R|+|Q|, |s|)
    diagnostics: list[str] = field(default_factory=list)


def check_component_bounds(g: Graph, s: Iterable[int], k: int) -> BoundReport:
    """Assert the literal size bounds on an irreducible instance: bag
    and blue-chain counts, twin-set sizes, component counts, red-bag
    counts, one blue leaf bag per bag, and two red attachments per blue
    chain."""
    s = sorted(set(s))
    s_size = len(s)
    rest = [v for v in g.vertices if v not in set(s)]
    gs = g.induced(rest)
    diags: list[str] = []
    comp_rows = []
    chain_rows = []
    red_rows = []
    bag_cap = 3 * s_size * (20 * k + 54)
    chain_cap = 20 * k + 52
    anns = annotate_components(g, s)
    for ann in anns:
        nb = len(ann.decomposition.bags)
        comp_rows.append((ann.component, nb, bag_cap))
        if nb > bag_cap:
            diags.append(f"component {ann.component[:6]}... has {nb} bags > {bag_cap}")
        tree = ann.decomposition.bag_tree
        red_rows.append((len(ann.red), len(ann.red | ann.q), s_size))
        if len(ann.red) > 3 * s_size:
            diags.append(f"{len(ann.red)} red bags > 3|S| = {3 * s_size}")
        if len(ann.red | ann.q) > 6 * s_size:
            diags.append(f"{len(ann.red | ann.q)} red+q bags > 6|S| = {6 * s_size}")
        leaf = {i for i in range(nb) if len(tree[i]) == 1}
        for i in range(nb):
            blue_leaves = sum(
                1 for j, _ in tree[i] if j in leaf and ann.colors[j] == BLUE
            )
            if blue_leaves > 1:
                diags.append(f"bag {i} has {blue_leaves} adjacent blue leaf bags")
        alive = [i for i in range(nb) if i not in ann.red and i not in ann.q]
        seen: set[int] = set()
        for start in alive:
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                b = stack.pop()
                for j, _ in tree[b]:
                    if j in set(alive) and j not in comp:
                        comp.add(j)
                        stack.append(j)
            seen |= comp
            chain_rows.append((len(comp), chain_cap))
            if len(comp) > chain_cap:
                diags.append(f"blue chain with {len(comp)} bags > {chain_cap}")
            red_touch = sum(
                1 for b in comp for j, _ in tree[b] if j in ann.red
            )
            if red_touch != 2:
                diags.append(f"blue chain touches {red_touch} red bags, expected 2")
    twin_rows = []
    cap_twin = twin_set_bound(k, s_size)
    for cls in twin_classes(gs):
        twin_rows.append((len(cls), cap_twin))
        if len(cls) > cap_twin:
            diags.append(f"twin set of size {len(cls)} > {cap_twin}")
    ntc = sum(1 for c in components(gs) if len(c) >= 2)
    cc_cap = (k + 2) * s_size * s_size
    if s_size and ntc > cc_cap:
        diags.append(f"{ntc} non-trivial components > {cc_cap}")
    return BoundReport(
        ok=not diags,
        component_bags=comp_rows,
        chain_lengths=chain_rows,
        twin_sets=twin_rows,
        nontrivial_components=(ntc, cc_cap),
        red_counts=red_rows,
        diagnostics=diags,
    )


# -- the loop ----------------------------------------------------------------


def apply_rule(name: str, g: Graph, k: int, s: set[int]) -> Optional[Graph]:
    """Try one rule everywhere; the first mutation wins."""
    if name == "1":
        return rule_twin(g, k, s)
    if name == "2":
        return rule_components(g, k, s)
    if name == "3":
        return rule_degree_one(g)
    if name == "5":
        return rule_flip_twins(g, s)
    if name in ("4", "6", "7", "8"):
        for ann in annotate_components(g, s):
            if name == "4":
                r = rule_leaf_star(ann, g)
                if r is not None:
                    return r
                continue
            for ctx in build_separator_contexts(ann):
                if name == "6":
                    r = rule_separator_bags(ctx, g)
                elif name == "7":
                    r = rule_contract_separators(ctx, g)
                else:
                    r = rule_unaffected_run(ctx, g, k)
                if r is not None:
                    return r
        return None
    raise ValueError(f"unknown rule {name!r}")


def total_bags(g: Graph, s: Iterable[int]) -> int:
    s = set(s)
    rest = [v for v in g.vertices if v not in s]
    gs = g.induced(rest)
    bags = 0
    for comp in components(gs):
        if len(comp) == 1:
            bags += 1
        else:
            bags += len(canonical_decomposition(gs.induced(comp)).bags)
    return bags


def run_reduction_loop(
    g: Graph,
    k: int,
    s: Iterable[int],
    order: tuple[str, ...] = DEFAULT_RULE_ORDER,
) -> tuple[Graph, set[int], dict]:
    """Apply the rules to a global fixpoint (first applicable in `order`
    wins, then restart).  Every rule preserves instance equivalence and
    the goodness of s; the budget k never changes."""
    s = set(s)
    stats = {
        r: {"applications": 0, "vertices_removed": 0, "edges_delta": 0, "bags_removed": 0}
        for r in order
    }
    bags_before = total_bags(g, s)
    while True:
        fired = False
        for name in order:
            out = apply_rule(name, g, k, s)
            if out is None:
                continue
            s2 = s & set(out.vertices)
            bags_after = total_bags(out, s2)
            stats[name]["applications"] += 1
            stats[name]["vertices_removed"] += g.n - out.n
            stats[name]["edges_delta"] += out.m - g.m
            stats[name]["bags_removed"] += bags_before - bags_after
            g = out
            s = s2
            bags_before = bags_after
            fired = True
            break
        if not fired:
            return g, s, stats
