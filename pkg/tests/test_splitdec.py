import random

import pytest

from dhkernel.graph import Graph
from dhkernel.obstructions import is_distance_hereditary
from dhkernel.splitdec import (
    COMPLETE,
    EXTENDS_AT_BAG,
    EXTENDS_AT_EDGE,
    NOT_DH,
    STAR,
    NotDistanceHereditaryError,
    accessibility,
    canonical_decomposition,
    check_canonical,
    classify_insertion,
    format_tree,
    insert_vertex,
    recompose,
    tree_hash,
)

from oracles import complete_graph, cycle_graph, path_graph, random_dh_graph, star_graph


class TestCanonicalDecomposition:
    def test_k5_single_complete_bag(self):
        d = canonical_decomposition(complete_graph(5))
        assert len(d.bags) == 1
        assert d.bags[0].kind == COMPLETE
        assert d.bags[0].members == (0, 1, 2, 3, 4)

    def test_star_single_bag_with_hub_center(self):
        d = canonical_decomposition(star_graph(4))
        assert len(d.bags) == 1
        assert d.bags[0].kind == STAR
        assert d.bags[0].center == 0

    def test_p4_two_star_bags(self):
        d = canonical_decomposition(path_graph(4))
        assert len(d.bags) == 2
        assert all(b.kind == STAR for b in d.bags)
        # centers are the middle path vertices, adjacent to the markers
        centers = sorted(b.center for b in d.bags)
        assert centers == [1, 2]
        for b in d.bags:
            assert len(b.members) == 3
        assert recompose(d) == path_graph(4)

    def test_c4_two_center_linked_stars(self):
        # derived fixture: exhaustive split search on C4 gives two star
        # bags joined center-to-center, not a single complete bag
        d = canonical_decomposition(cycle_graph(4))
        assert len(d.bags) == 2
        assert all(b.kind == STAR for b in d.bags)
        for b in d.bags:
            assert b.center < 0  # both centers are markers
        assert recompose(d) == cycle_graph(4)

    def test_two_vertex_graph(self):
        g = Graph([4, 9], [(4, 9)])
        d = canonical_decomposition(g)
        assert len(d.bags) == 1 and d.bags[0].kind == COMPLETE

    def test_single_vertex(self):
        d = canonical_decomposition(Graph([3]))
        assert len(d.bags) == 1

    def test_rejects_non_dh(self):
        with pytest.raises(NotDistanceHereditaryError):
            canonical_decomposition(cycle_graph(5))

    def test_rejects_disconnected(self):
        with pytest.raises(ValueError):
            canonical_decomposition(Graph([0, 1]))

    def test_round_trip_random(self):
        rng = random.Random(13)
        for _ in range(300):
            g = random_dh_graph(rng, rng.randint(1, 40))
            d = canonical_decomposition(g)
            assert check_canonical(d)
            assert recompose(d) == g
            assert all(b.kind in (STAR, COMPLETE) for b in d.bags)

    def test_order_independence_hash(self):
        rng = random.Random(29)
        for _ in range(120):
            g = random_dh_graph(rng, rng.randint(2, 30))
            d1 = canonical_decomposition(g, order="asc")
            d2 = canonical_decomposition(g, order="desc")
            assert tree_hash(d1) == tree_hash(d2)


class TestRecompose:
    def test_k3_identity(self):
        d = canonical_decomposition(complete_graph(3))
        assert recompose(d) == complete_graph(3)

    def test_c4_round_trip(self):
        d = canonical_decomposition(cycle_graph(4))
        assert recompose(d) == cycle_graph(4)


class TestCheckCanonical:
    def test_constructor_output_passes(self):
        rng = random.Random(37)
        for _ in range(50):
            d = canonical_decomposition(random_dh_graph(rng, rng.randint(1, 25)))
            assert check_canonical(d)

    def test_two_adjacent_complete_bags_fail(self):
        from dhkernel.splitdec import SplitDecomposition

        adj = {0: {1, -1}, 1: {0, -1}, -1: {0, 1}, 2: {3, -2}, 3: {2, -2}, -2: {2, 3}}
        match = {-1: -2, -2: -1}
        d = SplitDecomposition(adj, match)
        assert not check_canonical(d)

    def test_leaf_to_center_fails(self):
        from dhkernel.splitdec import SplitDecomposition

        # star (center 0, leaves 1 and -1) with -1 matched to the center
        # marker -2 of a second star (leaves 2, 3)
        adj = {0: {1, -1}, 1: {0}, -1: {0}, -2: {2, 3}, 2: {-2}, 3: {-2}}
        match = {-1: -2, -2: -1}
        d = SplitDecomposition(adj, match)
        assert not check_canonical(d)


class TestClassifyInsertion:
    def test_universal_vertex_on_complete_bag(self):
        d = canonical_decomposition(complete_graph(4))
        v = classify_insertion(d, {0, 1, 2, 3})
        assert v.outcome == EXTENDS_AT_BAG
        assert v.bag == (0, 1, 2, 3)

    def test_p6_both_ends_rejected(self):
        # derived: P6 plus a vertex adjacent to both ends is C7, not DH
        g = path_graph(6)
        assert not is_distance_hereditary(g.with_vertex(9, [0, 5]))
        d = canonical_decomposition(g)
        assert classify_insertion(d, {0, 5}).outcome == NOT_DH

    def test_pendant_on_p4_is_fine(self):
        g = path_graph(4)
        assert is_distance_hereditary(g.with_vertex(9, [0]))
        d = canonical_decomposition(g)
        v = classify_insertion(d, {0})
        assert v.outcome in (EXTENDS_AT_BAG, EXTENDS_AT_EDGE)

    def test_agrees_with_dh_check_random(self):
        rng = random.Random(53)
        for _ in range(250):
            g = random_dh_graph(rng, rng.randint(2, 14))
            d = canonical_decomposition(g)
            nset = [v for v in g.vertices if rng.random() < 0.45]
            if not nset:
                nset = [rng.choice(g.vertices)]
            h = g.with_vertex(99, nset)
            verdict = classify_insertion(d, set(nset))
            assert (verdict.outcome != NOT_DH) == is_distance_hereditary(h)


class TestAccessibility:
    def test_complete_bag_fully(self):
        d = canonical_decomposition(complete_graph(4))
        assert accessibility(d, {0, 1, 2, 3}, 0) == "fully"

    def test_one_leaf_partial(self):
        d = canonical_decomposition(star_graph(4))
        assert accessibility(d, {1}, 0) == "partially"

    def test_singly_accessible_fixture(self):
        # derived two-bag fixture: P4 with s touching one inner vertex
        # and the far end; the near star bag is singly accessible
        g = path_graph(4)
        d = canonical_decomposition(g)
        bag_of_1 = d.bag_index[1]
        state = accessibility(d, {1, 3}, bag_of_1)
        assert state == "singly"


class TestInsertVertex:
    def test_twin_into_complete_bag(self):
        d = canonical_decomposition(complete_graph(4))
        d2 = insert_vertex(d, 7, {0, 1, 2, 3})
        assert len(d2.bags) == 1 and d2.bags[0].members == (0, 1, 2, 3, 7)

    def test_pendant_on_star_leaf(self):
        d = canonical_decomposition(star_graph(3))
        d2 = insert_vertex(d, 9, {1})
        assert recompose(d2) == star_graph(3).with_vertex(9, [1])
        assert check_canonical(d2)

    def test_rejects_not_dh(self):
        d = canonical_decomposition(path_graph(6))
        with pytest.raises(NotDistanceHereditaryError):
            insert_vertex(d, 9, {0, 5})

    def test_insert_matches_rebuild_random(self):
        rng = random.Random(61)
        done = 0
        while done < 120:
            g = random_dh_graph(rng, rng.randint(2, 16))
            nset = {v for v in g.vertices if rng.random() < 0.4} or {g.vertices[0]}
            if not is_distance_hereditary(g.with_vertex(99, nset)):
                continue
            d = canonical_decomposition(g)
            d2 = insert_vertex(d, 99, nset)
            assert recompose(d2) == g.with_vertex(99, nset)
            assert check_canonical(d2)
            done += 1

    def test_build_c4_incrementally(self):
        # fixture derived by exhaustive split search: C4 decomposes into
        # two star bags joined center-to-center
        d = canonical_decomposition(Graph([0, 1], [(0, 1)]))
        d = insert_vertex(d, 2, {1})
        d = insert_vertex(d, 3, {0, 2})
        assert recompose(d) == cycle_graph(4)
        assert sorted(b.kind for b in d.bags) == [STAR, STAR]


class TestGoldenTree:
    def test_p4_text_tree(self):
        d = canonical_decomposition(path_graph(4))
        text = format_tree(d)
        assert text == (
            "bag star(center=v1) unmarked=[0,1]\n"
            "  bag star(center=v2) unmarked=[2,3] <-leaf:leaf\n"
        )

    def test_k5_text_tree(self):
        d = canonical_decomposition(complete_graph(5))
        assert format_tree(d) == "bag complete unmarked=[0,1,2,3,4]\n"


class TestInjectedObstruction:
    def test_c5_injected_fails(self):
        # DH base with a C5 spliced in: construction must reject
        import random
        from oracles import random_dh_graph

        rng = random.Random(99)
        base = random_dh_graph(rng, 12)
        nid = 100
        cyc = [nid + i for i in range(5)]
        g = base
        for i, v in enumerate(cyc):
            g = g.with_vertex(v, [])
        edges = list(g.edges()) + [(cyc[i], cyc[(i + 1) % 5]) for i in range(5)]
        edges.append((base.vertices[0], cyc[0]))
        g = Graph(sorted(g.vertices), edges)
        with pytest.raises(NotDistanceHereditaryError):
            canonical_decomposition(g.induced(g.component_of(base.vertices[0])))
