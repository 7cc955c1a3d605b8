"""Degenerate-curve construction, connectivity queries, spanning trees."""

import itertools
import json
import random

import pytest

from severi.gamma import (
    ComponentId,
    DegenerationCurve,
    NodeId,
    build_gamma,
    is_connected_after_removal,
    spanning_tree_count,
)
from severi.lattice import DivisorClass, Surface, intersect, severi_numerology, smooth_genus

from conftest import brute_force_spanning_trees, curve_connected_without


def node(a, b, sheet=1):
    return NodeId.of(ComponentId.parse(a), ComponentId.parse(b), sheet)


class TestComponentAndNodeIds:
    def test_component_ordering_sections_first(self):
        assert ComponentId.parse("L2") < ComponentId.parse("F1")
        assert ComponentId.parse("L1") < ComponentId.parse("L2")
        assert ComponentId.parse("F1") < ComponentId.parse("F3")

    def test_node_canonical_order_enforced(self):
        with pytest.raises(ValueError, match="canonical order"):
            NodeId(ComponentId.parse("F1"), ComponentId.parse("L1"), 1)
        normalized = NodeId.of(ComponentId.parse("F1"), ComponentId.parse("L1"), 1)
        assert normalized.triple == ("L1", "F1", 1)

    def test_no_fiber_fiber_nodes(self):
        with pytest.raises(ValueError, match="disjoint"):
            node("F1", "F2")

    def test_parse_round_trip(self):
        original = node("L1", "L3", 2)
        assert NodeId.parse(list(original.triple)) == original

    def test_bad_labels_rejected(self):
        with pytest.raises(ValueError):
            ComponentId.parse("X1")
        with pytest.raises(ValueError):
            ComponentId.parse("L0")
        with pytest.raises(ValueError):
            NodeId.parse(["L1", "L2"])


class TestBuildGamma:
    def test_triangle(self):
        curve = build_gamma(Surface(1), 2, 1)
        assert curve.nodes == (node("L1", "L2"), node("L1", "F1"), node("L2", "F1"))

    def test_no_section_section_nodes_at_n_zero(self):
        curve = build_gamma(Surface(0), 2, 2)
        assert len(curve.nodes) == 4
        assert all(n.b.kind == "F" for n in curve.nodes)

    def test_parallel_edges(self):
        curve = build_gamma(Surface(2), 2, 1)
        assert len(curve.nodes) == 4
        assert curve.nodes[0] == node("L1", "L2", 1)
        assert curve.nodes[1] == node("L1", "L2", 2)

    def test_rejects_pure_fiber_configuration(self):
        with pytest.raises(ValueError, match="d must be >= 1"):
            build_gamma(Surface(1), 0, 3)

    def test_node_count_matches_numerology(self):
        for n in range(5):
            for d in range(1, 6):
                for k in range(6):
                    curve = build_gamma(Surface(n), d, k)
                    assert len(curve.nodes) == d * k + n * d * (d - 1) // 2
                    if smooth_genus(DivisorClass(Surface(n), d, k)) >= 0:
                        numer = severi_numerology(Surface(n), d, k, 0)
                        assert len(curve.nodes) == numer.delta_prime

    def test_node_count_matches_pairwise_intersection_numbers(self):
        # multiplicity of each component pair must equal the intersection
        # number of the component classes
        for n in range(4):
            surface = Surface(n)
            l0 = DivisorClass(surface, 1, 0)
            fiber = DivisorClass(surface, 0, 1)
            curve = build_gamma(surface, 3, 2)
            for u, v in itertools.combinations(range(curve.vertex_count), 2):
                classes = [l0 if w < curve.d else fiber for w in (u, v)]
                assert len(curve.pair_node_indices(u, v)) == intersect(*classes)

    def test_canonical_order_is_sorted(self):
        curve = build_gamma(Surface(3), 4, 3)
        assert list(curve.nodes) == sorted(curve.nodes)

    def test_serialization_shape(self):
        curve = build_gamma(Surface(1), 2, 1)
        doc = curve.to_json_dict()
        assert doc == {
            "n": 1,
            "d": 2,
            "k": 1,
            "nodes": [["L1", "L2", 1], ["L1", "F1", 1], ["L2", "F1", 1]],
        }
        assert DegenerationCurve.from_json_dict(json.loads(json.dumps(doc))) == curve

    def test_from_json_rejects_tampered_nodes(self):
        doc = build_gamma(Surface(1), 2, 1).to_json_dict()
        doc["nodes"] = doc["nodes"][::-1]
        with pytest.raises(ValueError, match="canonical"):
            DegenerationCurve.from_json_dict(doc)


class TestConnectivity:
    def test_triangle_minus_one_edge_connected(self):
        curve = build_gamma(Surface(1), 2, 1)
        assert is_connected_after_removal(curve, {node("L1", "L2")})

    def test_empty_removal_connected(self):
        # the curve itself is connected except for disjoint sections
        # (n = 0, several sections, no fibers)
        for n in range(3):
            for d in range(1, 4):
                for k in range(3):
                    curve = build_gamma(Surface(n), d, k)
                    expected = not (n == 0 and d >= 2 and k == 0)
                    assert is_connected_after_removal(curve, set()) == expected

    def test_isolating_a_fiber_disconnects(self):
        curve = build_gamma(Surface(1), 2, 1)
        assert not is_connected_after_removal(curve, {node("L1", "F1"), node("L2", "F1")})

    def test_unknown_node_rejected(self):
        curve = build_gamma(Surface(1), 2, 1)
        with pytest.raises(ValueError, match="unknown node"):
            is_connected_after_removal(curve, {node("L1", "L2", 2)})

    def test_matches_dfs_oracle_randomized(self):
        rng = random.Random(20260809)
        for n, d, k in [(0, 3, 3), (1, 3, 2), (2, 2, 2), (3, 2, 1), (1, 4, 0)]:
            curve = build_gamma(Surface(n), d, k)
            for _ in range(200):
                count = rng.randint(0, len(curve.nodes))
                removed = rng.sample(list(curve.nodes), count)
                assert is_connected_after_removal(curve, removed) == curve_connected_without(
                    curve, removed
                )

    def test_disconnection_is_monotone(self):
        rng = random.Random(7)
        curve = build_gamma(Surface(1), 3, 2)
        nodes = list(curve.nodes)
        for _ in range(300):
            small = set(rng.sample(nodes, rng.randint(0, len(nodes) - 1)))
            extra = rng.choice([x for x in nodes if x not in small])
            large = small | {extra}
            if not is_connected_after_removal(curve, small):
                assert not is_connected_after_removal(curve, large)


class TestSpanningTrees:
    @pytest.mark.parametrize(
        "n,d,k,expected",
        [(1, 2, 1, 3), (2, 2, 1, 5), (0, 1, 1, 1)],
    )
    def test_examples(self, n, d, k, expected):
        assert spanning_tree_count(build_gamma(Surface(n), d, k)) == expected

    def test_single_vertex(self):
        assert spanning_tree_count(build_gamma(Surface(0), 1, 0)) == 1

    def test_matches_enumeration_for_small_instances(self):
        for n in range(4):
            for d in range(1, 5):
                for k in range(5):
                    curve = build_gamma(Surface(n), d, k)
                    if len(curve.nodes) > 12:
                        continue
                    assert spanning_tree_count(curve) == brute_force_spanning_trees(curve)
