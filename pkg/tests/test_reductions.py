import random


from dhkernel.driver import Instance, solve_exact
from dhkernel.goodmod import is_good_modulator
from dhkernel.graph import Graph, components
from dhkernel.obstructions import is_distance_hereditary
from dhkernel.reductions import (
    annotate_components,
    apply_rule,
    build_separator_contexts,
    check_component_bounds,
    color_and_annotate,
    rule_components,
    rule_contract_separators,
    rule_degree_one,
    rule_flip_twins,
    rule_leaf_star,
    rule_separator_bags,
    rule_twin,
    rule_unaffected_run,
    run_reduction_loop,
    twin_set_bound,
)
from dhkernel.splitdec import canonical_decomposition

from fixtures import (
    chain_with_modulator,
    pair_seg,
    path_seg,
    random_modulator_fixture,
    rule6_fixture,
    rule7_eta_fixture,
    rule7_fixture,
    rule8_fixture,
)
from oracles import cycle_graph, path_graph


def verdicts_agree(g1, k1, g2, k2):
    return (solve_exact(Instance(g1, k1)) is not None) == (
        solve_exact(Instance(g2, k2)) is not None
    )


class TestRuleTwin:
    def test_small_class_untouched(self):
        # twin classes within the k+1 quota (s empty) are fully markable
        g = Graph(range(3), [(0, 2), (1, 2)])  # star: 2 twin leaves, k+1 = 2
        assert rule_twin(g, 1, set()) is None

    def test_large_twin_class_shrinks(self):
        hub = 50
        leaves = list(range(20))
        g = Graph(leaves + [hub], [(v, hub) for v in leaves])
        out = rule_twin(g, 1, set())
        assert out is not None and out.n == g.n - 1

    def test_empty_s_keeps_k_plus_one(self):
        # 50 true twins (K50), s empty, k=1: reduces while |W| > 2
        g = Graph(range(10), [(i, j) for i in range(10) for j in range(i + 1, 10)])
        cur, k = g, 1
        while True:
            out = rule_twin(cur, k, set())
            if out is None:
                break
            cur = out
        assert cur.n == k + 1

    def test_safety_random(self):
        rng = random.Random(71)
        done = applied = 0
        while done < 60:
            g, s = random_modulator_fixture(rng, 5, 10)
            if not s or not is_distance_hereditary(g.delete_vertices(s)):
                continue
            k = rng.randint(0, 3)
            out = rule_twin(g, k, s)
            done += 1
            if out is None:
                continue
            applied += 1
            assert verdicts_agree(g, k, out, k)
        assert applied >= 5

    def test_twin_bound_formula(self):
        assert twin_set_bound(1, 0) == 16
        assert twin_set_bound(1, 3) == 16
        assert twin_set_bound(0, 10) > 0


class TestRuleComponents:
    def make_p3_components(self, count, k):
        verts = [0, 1]
        edges = []
        for i in range(count):
            base = 10 * (i + 1)
            verts += [base, base + 1, base + 2]
            edges += [(base, base + 1), (base + 1, base + 2)]
            edges += [(0, base), (1, base + 2)]
        return Graph(verts, edges), {0, 1}

    def test_all_trivial_none(self):
        g = Graph([0, 1, 2, 3], [(0, 2), (1, 3)])
        assert rule_components(g, 1, {0, 1}) is None

    def test_many_witnessed_components_cleared(self):
        k = 1
        g, s = self.make_p3_components(k + 3, k)
        assert is_good_modulator(g, s)
        out = rule_components(g, k, s)
        assert out is not None
        assert out.n == g.n and out.m < g.m  # edges cleared, vertices kept
        assert verdicts_agree(g, k, out, k)
        assert is_good_modulator(out, s)

    def test_within_quota_none(self):
        k = 2
        g, s = self.make_p3_components(k + 2, k)
        assert rule_components(g, k, s) is None


class TestRuleDegreeOne:
    def test_isolated(self):
        g = Graph([5, 6], [])
        out = rule_degree_one(g)
        assert out is not None and out.vertices == (6,)

    def test_pendant_on_c7(self):
        g = cycle_graph(7).with_vertex(9, [0])
        out = rule_degree_one(g)
        assert out is not None and not out.has_vertex(9)

    def test_two_regular_none(self):
        assert rule_degree_one(cycle_graph(6)) is None


class TestRuleLeafStar:
    def test_fires_on_found_fixture(self):
        base = Graph(
            range(9),
            [(0, 1), (0, 5), (1, 2), (1, 6), (1, 8), (2, 3), (2, 7), (3, 4), (4, 7), (5, 6), (5, 8)],
        )
        g = base.with_vertex(99, [2, 4])
        s = {99}
        assert is_good_modulator(g, s)
        anns = annotate_components(g, s)
        fired = None
        for ann in anns:
            fired = rule_leaf_star(ann, g)
            if fired is not None:
                break
        assert fired is not None
        assert verdicts_agree(g, 2, fired, 2)

    def test_affected_neighbor_blocks(self):
        # single star: every bag is affected or the decomposition is one bag
        g = path_graph(3).with_vertex(9, [0, 1, 2])
        ann = annotate_components(g, {9})[0]
        assert rule_leaf_star(ann, g) is None

    def test_single_bag_none(self):
        g = Graph(range(4), [(0, 1), (0, 2), (0, 3)]).with_vertex(9, [1])
        ann = annotate_components(g, {9})[0]
        assert rule_leaf_star(ann, g) is None

    def test_safety_random(self):
        rng = random.Random(73)
        applied = 0
        trials = 0
        while applied < 12 and trials < 4000:
            trials += 1
            g, s = random_modulator_fixture(rng)
            if not s or not is_good_modulator(g, s):
                continue
            out = None
            for ann in annotate_components(g, s):
                out = rule_leaf_star(ann, g)
                if out is not None:
                    break
            if out is None:
                continue
            applied += 1
            k = rng.randint(0, 2)
            assert verdicts_agree(g, k, out, k)
        assert applied >= 12


class TestRuleFlipTwins:
    def test_flip_merges_bags(self):
        # complete bag of G-twins hanging off a star center: flipping the
        # triangle into an independent set merges it into the star
        hub = 0
        tw = [1, 2, 3]
        g = Graph(
            [hub] + tw + [4],
            [(hub, t) for t in tw] + [(1, 2), (1, 3), (2, 3), (hub, 4)],
        )
        out = rule_flip_twins(g, set())
        assert out is not None
        assert out.m < g.m

    def test_singleton_class_none(self):
        g = path_graph(4)
        assert rule_flip_twins(g, set()) is None

    def test_increase_guard(self):
        # star leaves: flipping them to a clique would not reduce bags
        g = Graph(range(4), [(0, 1), (0, 2), (0, 3)])
        assert rule_flip_twins(g, set()) is None

    def test_safety_random(self):
        rng = random.Random(79)
        applied = 0
        trials = 0
        while applied < 10 and trials < 3000:
            trials += 1
            g, s = random_modulator_fixture(rng, 5, 10, 0.25)
            if not s or not is_good_modulator(g, s):
                continue
            out = rule_flip_twins(g, s)
            if out is None:
                continue
            applied += 1
            k = rng.randint(0, 2)
            assert verdicts_agree(g, k, out, k)
            assert is_good_modulator(out, s)
        assert applied >= 10


class TestColoring:
    def test_no_s_no_affected(self):
        g, s = rule7_fixture(8)
        rest = sorted(set(g.vertices) - s)
        d = canonical_decomposition(g.induced(rest))
        ann = color_and_annotate(d, g.induced(rest), set())
        assert not ann.affected_bags and not ann.affected_edges

    def test_attachment_reddens_locus(self):
        g, s = rule7_fixture(10)
        ann = annotate_components(g, s)[0]
        assert ann.red
        for v in s:
            assert v in ann.locus

    def test_branch_bag_red(self):
        # spider: three long legs from one center vertex
        legs = []
        verts = [0]
        edges = []
        nid = 1
        for _ in range(3):
            ids = list(range(nid, nid + 3))
            nid += 3
            verts += ids
            edges += [(0, ids[0]), (ids[0], ids[1]), (ids[1], ids[2])]
        g = Graph(verts, edges)
        d = canonical_decomposition(g)
        ann = color_and_annotate(d, g, set())
        center_bag = d.bag_index[0]
        assert ann.colors[center_bag] == "red"


class TestRule6:
    def test_fires_on_sandwich(self):
        g, s = rule6_fixture()
        assert is_good_modulator(g, s)
        fired = None
        for ann in annotate_components(g, s):
            for ctx in build_separator_contexts(ann):
                fired = rule_separator_bags(ctx, g)
                if fired is not None:
                    break
        assert fired is not None
        for k in (0, 1, 2):
            assert verdicts_agree(g, k, fired, k)

    def test_three_separators_none(self):
        g, s = chain_with_modulator([path_seg(5, 0)])
        for ann in annotate_components(g, s):
            for ctx in build_separator_contexts(ann):
                assert rule_separator_bags(ctx, g) is None


class TestRule7:
    def test_fires_on_long_path(self):
        g, s = rule7_fixture()
        fired = None
        for ann in annotate_components(g, s):
            for ctx in build_separator_contexts(ann):
                fired = rule_contract_separators(ctx, g)
        assert fired is not None
        for k in (0, 1, 2):
            assert verdicts_agree(g, k, fired, k)
        assert is_good_modulator(fired, s)

    def test_eta_trim(self):
        g, s = rule7_eta_fixture()
        assert is_good_modulator(g, s)
        fired = None
        for ann in annotate_components(g, s):
            for ctx in build_separator_contexts(ann):
                assert any(len(e) > 1 for e in ctx.eta.values())
                fired = rule_contract_separators(ctx, g)
        assert fired is not None
        # eta deletion plus the trim: two vertices gone, not one
        assert g.n - fired.n == 2
        for k in (0, 1, 2):
            assert verdicts_agree(g, k, fired, k)

    def test_short_chain_none(self):
        g, s = chain_with_modulator([path_seg(6, 0)])
        for ann in annotate_components(g, s):
            for ctx in build_separator_contexts(ann):
                assert rule_contract_separators(ctx, g) is None


class TestRule8:
    def test_fires_on_half_graph(self):
        g, s = rule8_fixture()
        assert is_good_modulator(g, s)
        fired = None
        for ann in annotate_components(g, s):
            for ctx in build_separator_contexts(ann):
                fired = rule_unaffected_run(ctx, g, 0)
        assert fired is not None
        for k in (0, 1):
            assert verdicts_agree(g, k, fired, k)

    def test_short_run_none(self):
        g, s = rule8_fixture(4)
        for ann in annotate_components(g, s):
            for ctx in build_separator_contexts(ann):
                assert rule_unaffected_run(ctx, g, 0) is None


class TestLoopAndBounds:
    def test_loop_terminates_and_shrinks(self):
        g, s = rule7_fixture(20)
        k = 1
        g2, s2, stats = run_reduction_loop(g, k, s)
        assert g2.n <= g.n
        assert sum(r["applications"] for r in stats.values()) > 0
        assert is_good_modulator(g2, s2)
        bounds = check_component_bounds(g2, s2, k)
        assert bounds.ok, bounds.diagnostics

    def test_loop_equivalence(self):
        rng = random.Random(83)
        done = 0
        while done < 10:
            g, s = random_modulator_fixture(rng, 6, 12)
            if not s or not is_good_modulator(g, s):
                continue
            k = rng.randint(0, 2)
            g2, s2, _ = run_reduction_loop(g, k, s)
            assert verdicts_agree(g, k, g2, k)
            done += 1

    def test_bound_violation_detected(self):
        # unreduced long chain: blue path exceeds 20k+52 for k=0
        g, s = rule7_fixture(80)
        report = check_component_bounds(g, s, 0)
        assert not report.ok
        assert report.diagnostics

    def test_termination_metric(self):
        # every applied rule decreases (n, total bags, m) lexicographically
        rng = random.Random(89)
        done = 0
        while done < 8:
            g, s = random_modulator_fixture(rng, 6, 11)
            if not s or not is_good_modulator(g, s):
                continue
            done += 1
            k = 1
            cur = g
            seen = set()
            while True:
                key = (cur.vertices, cur.edges())
                assert key not in seen
                seen.add(key)
                out = None
                for name in ("2", "3", "4", "5", "6", "7", "8", "1"):
                    out = apply_rule(name, cur, k, s & set(cur.vertices))
                    if out is not None:
                        break
                if out is None:
                    break
                before = _metric(cur, s)
                after = _metric(out, s)
                assert after < before
                cur = out


def _metric(g, s):
    rest = sorted(set(g.vertices) - s)
    gs = g.induced(rest)
    bags = 0
    for comp in components(gs):
        if len(comp) == 1:
            bags += 1
        else:
            bags += len(canonical_decomposition(gs.induced(comp)).bags)
    return (g.n, bags, g.m)


class TestRule6AdjacentSeparators:
    def test_adjacent_middle_separators_none(self):
        # path chains have all-adjacent separators: nothing between a2,a3
        g, s = rule7_fixture(14)
        for ann in annotate_components(g, s):
            for ctx in build_separator_contexts(ann):
                assert len(ctx.separators) >= 4
                assert rule_separator_bags(ctx, g) is None


class TestKernelizeDhComponents:
    def test_disconnected_dh_side_component(self):
        from dhkernel.driver import Instance, kernelize, verify_equivalence
        from fixtures import attach_chain, pair_seg

        # gadget component plus a large irreducible-ish DH side component
        segs = [pair_seg(100 + 4 * i, clique=True) for i in range(10)]
        side, _, _ = attach_chain(segs)
        gadget = cycle_graph(7)
        g = Graph(
            list(gadget.vertices) + list(side.vertices),
            list(gadget.edges()) + list(side.edges()),
        )
        inst = Instance(g, 1)
        out, report = kernelize(inst)
        assert report.verdict == "yes"
        assert verify_equivalence(inst, out)
        assert out.graph.n <= g.n


class TestRuleTwinPhaseTwo:
    def test_gem_apex_class_fires(self):
        # P4 in the modulator, apex class of size k+3: each apex plus the
        # P4 induces a gem; the size-4 trace marking keeps k+1, one goes
        k = 1
        s = [0, 1, 2, 3]
        apexes = list(range(10, 10 + k + 3))
        edges = [(0, 1), (1, 2), (2, 3)]
        edges += [(a, v) for a in apexes for v in s]
        g = Graph(s + apexes, edges)
        assert is_distance_hereditary(g.delete_vertices(s))
        out = rule_twin(g, k, set(s))
        assert out is not None and out.n == g.n - 1
        assert verdicts_agree(g, k, out, k)

    def test_phase_two_repeated_to_fixpoint(self):
        k = 0
        s = [0, 1, 2, 3]
        apexes = list(range(10, 16))
        edges = [(0, 1), (1, 2), (2, 3)]
        edges += [(a, v) for a in apexes for v in s]
        g = Graph(s + apexes, edges)
        cur = g
        while True:
            out = rule_twin(cur, k, set(s))
            if out is None:
                break
            assert verdicts_agree(cur, k, out, k)
            cur = out
        # k+1 survivors in the apex class
        assert cur.n == len(s) + k + 1
