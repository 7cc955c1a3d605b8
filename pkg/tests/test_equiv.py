"""Equivalence engine: enumeration, class computation, grid verification,
witness traces, and the independent orbit oracle."""

import itertools
import math

import pytest

from severi.equiv import (
    StateBudgetExceeded,
    _partition,
    compute_classes,
    enumerate_markings,
    existence_window,
    maximal_marking_count,
    orbit_class_counts,
    shortest_trace,
    verify_equivalence_grid,
    verify_node_coverage,
)
from severi.gamma import ComponentId, NodeId, build_gamma, spanning_tree_count
from severi.lattice import Surface
from severi.markings import Marking, is_irreducible, replay_trace, write_trace

from conftest import curve_connected_without, reference_partition


def node(a, b, sheet=1):
    return NodeId.of(ComponentId.parse(a), ComponentId.parse(b), sheet)


TRIANGLE = build_gamma(Surface(1), 2, 1)
PARALLEL = build_gamma(Surface(2), 2, 1)
GRID22 = build_gamma(Surface(0), 2, 2)


class TestEnumerateMarkings:
    def test_all_single_markings_of_triangle_are_irreducible(self):
        assert len(list(enumerate_markings(TRIANGLE, 1, irreducible_only=True))) == 3

    def test_no_irreducible_pairs_on_triangle(self):
        assert list(enumerate_markings(TRIANGLE, 2, irreducible_only=True)) == []

    def test_empty_marking(self):
        markings = list(enumerate_markings(TRIANGLE, 0))
        assert markings == [Marking(TRIANGLE, [])]

    def test_counts_are_falling_factorials(self):
        for r in range(len(PARALLEL.nodes) + 1):
            assert len(list(enumerate_markings(PARALLEL, r))) == math.perm(4, r)

    def test_lexicographic_order(self):
        markings = list(enumerate_markings(TRIANGLE, 2))
        as_indices = [
            tuple(TRIANGLE.node_index(p) for p in m.points) for m in markings
        ]
        assert as_indices == sorted(as_indices)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="marking order"):
            list(enumerate_markings(TRIANGLE, 4))


class TestExistenceWindow:
    @pytest.mark.parametrize("n,d,k,expected", [(1, 2, 1, 1), (2, 2, 1, 2), (0, 1, 1, 0)])
    def test_examples(self, n, d, k, expected):
        assert existence_window(build_gamma(Surface(n), d, k)) == expected

    def test_window_is_sharp(self):
        # irreducible r-markings exist exactly for r <= window
        for n in range(3):
            for d in range(1, 4):
                for k in range(4):
                    curve = build_gamma(Surface(n), d, k)
                    window = existence_window(curve)
                    for r in range(len(curve.nodes) + 1):
                        exists = any(
                            curve_connected_without(curve, combo)
                            for combo in itertools.combinations(curve.nodes, r)
                        )
                        assert exists == (r <= window)

    def test_window_equals_max_marking_order(self):
        for n in range(4):
            for d in range(1, 5):
                for k in range(4):
                    curve = build_gamma(Surface(n), d, k)
                    r_max = k * (d - 1) + n * (d * (d - 1) // 2) - (d - 1)
                    assert existence_window(curve) == r_max


class TestComputeClasses:
    def test_triangle_single_class(self):
        report = compute_classes(TRIANGLE, 1)
        assert report.class_count_irreducible == 1
        assert report.irreducible_count == 3
        assert report.total_markings == 3

    def test_parallel_maximal_order(self):
        report = compute_classes(PARALLEL, 2)
        assert report.class_count_irreducible == 1
        assert report.irreducible_count == 10

    def test_grid22_single_markings(self):
        report = compute_classes(GRID22, 1)
        assert report.class_count_irreducible == 1
        assert report.irreducible_count == 4

    def test_r_zero(self):
        report = compute_classes(TRIANGLE, 0)
        assert report.total_markings == 1
        assert report.class_count_all == 1
        assert report.class_count_irreducible == 1

    def test_classes_partition_everything(self):
        for curve, r in [(TRIANGLE, 2), (PARALLEL, 2), (GRID22, 2)]:
            detail = _partition(curve, r, state_budget=None)
            assert sum(detail.class_sizes) == detail.report.total_markings
            assert detail.report.states_visited == detail.report.total_markings

    def test_budget_refusal_with_partial_stats(self):
        with pytest.raises(StateBudgetExceeded, match="state budget exceeded") as info:
            compute_classes(PARALLEL, 2, state_budget=5)
        assert info.value.partial["total_markings"] == 12
        assert info.value.partial["states_visited"] == 0

    def test_deterministic_reports(self):
        a = compute_classes(PARALLEL, 2)
        b = compute_classes(PARALLEL, 2)
        norm = lambda rep: {k: v for k, v in rep.to_json_dict().items() if k != "wall_time"}
        assert norm(a) == norm(b)

    def test_matches_reference_engine(self):
        # definition-level BFS through enumerate_moves on tiny instances
        for curve, r in [(TRIANGLE, 1), (TRIANGLE, 2), (PARALLEL, 1), (PARALLEL, 2), (GRID22, 1), (GRID22, 2)]:
            report = compute_classes(curve, r)
            ref_all, ref_irr, ref_count = reference_partition(curve, r)
            assert report.class_count_all == ref_all
            assert report.class_count_irreducible == ref_irr
            assert report.irreducible_count == ref_count

    def test_matches_orbit_oracle(self):
        cases = [
            (1, 2, 2), (2, 2, 1), (0, 2, 3), (1, 3, 0), (1, 3, 1),
            (2, 2, 2), (0, 3, 2), (2, 3, 0), (1, 2, 1),
        ]
        for n, d, k in cases:
            curve = build_gamma(Surface(n), d, k)
            top = min(existence_window(curve) + 1, 4)
            for r in range(top + 1):
                if math.perm(len(curve.nodes), r) > 200_000:
                    continue
                report = compute_classes(curve, r)
                orbit = orbit_class_counts(curve, r)
                assert report.total_markings == orbit["total_markings"]
                assert report.irreducible_count == orbit["irreducible_count"]
                assert report.class_count_all == orbit["class_count_all"]
                assert report.class_count_irreducible == orbit["class_count_irreducible"]

    def test_class_dump(self, tmp_path):
        compute_classes(PARALLEL, 1, dump_dir=tmp_path)
        files = sorted(tmp_path.glob("class_*.json"))
        import json

        payloads = [json.loads(f.read_text()) for f in files]
        assert sum(p["size"] for p in payloads) == 4
        for p in payloads:
            # members are sorted in the canonical node order
            as_indices = [
                [PARALLEL.node_index(NodeId.parse(t)) for t in marking]
                for marking in p["markings"]
            ]
            assert as_indices == sorted(as_indices)


class TestVerifyGrid:
    def test_small_grid_single_classes(self):
        entries = verify_equivalence_grid([(1, 2, 1), (2, 2, 1), (1, 2, 2)])
        ok = [e for e in entries if e.status == "ok"]
        assert len(ok) == 1 + 2 + 2
        assert all(e.report.class_count_irreducible == 1 for e in ok)

    def test_vacuous_entry(self):
        entries = verify_equivalence_grid([(1, 2, 0)])
        assert len(entries) == 1
        assert entries[0].status == "vacuous"
        assert entries[0].r is None

    def test_budget_skipping(self):
        entries = verify_equivalence_grid([(2, 2, 1)], state_budget=6)
        by_r = {e.r: e.status for e in entries}
        assert by_r == {1: "ok", 2: "skipped"}

    def test_zero_index_grid_uses_q_moves(self):
        entries = verify_equivalence_grid([(0, 2, 2), (0, 3, 2)])
        ok = [e for e in entries if e.status == "ok"]
        assert ok and all(e.report.class_count_irreducible == 1 for e in ok)


class TestNodeCoverage:
    def test_triangle(self):
        assert verify_node_coverage(TRIANGLE, 1)

    def test_parallel_maximal(self):
        assert verify_node_coverage(PARALLEL, 2)

    def test_every_feasible_order_small_grid(self):
        for n in range(3):
            for d in range(2, 4):
                for k in range(3):
                    curve = build_gamma(Surface(n), d, k)
                    for r in range(1, existence_window(curve) + 1):
                        assert verify_node_coverage(curve, r)

    def test_precondition(self):
        with pytest.raises(ValueError, match="existence window"):
            verify_node_coverage(TRIANGLE, 2)
        with pytest.raises(ValueError, match="existence window"):
            verify_node_coverage(TRIANGLE, 0)


class TestMaximalMarkingCount:
    @pytest.mark.parametrize("n,d,k,expected", [(1, 2, 1, 3), (2, 2, 1, 10), (0, 1, 1, 1)])
    def test_examples(self, n, d, k, expected):
        assert maximal_marking_count(build_gamma(Surface(n), d, k)) == expected

    def test_matches_matrix_tree_times_factorial(self):
        for n in range(4):
            for d in range(1, 5):
                for k in range(4):
                    curve = build_gamma(Surface(n), d, k)
                    if len(curve.nodes) > 12:
                        continue
                    r_max = existence_window(curve)
                    expected = spanning_tree_count(curve) * math.factorial(max(r_max, 0))
                    assert maximal_marking_count(curve) == expected

    def test_disconnected_curve_has_no_maximal_markings(self):
        curve = build_gamma(Surface(0), 2, 0)
        assert spanning_tree_count(curve) == 0
        assert maximal_marking_count(curve) == 0


class TestExtensionProperty:
    def test_every_irreducible_marking_extends(self):
        # below the window, some unmarked node can always be added
        for n in range(3):
            for d in range(2, 4):
                for k in range(3):
                    curve = build_gamma(Surface(n), d, k)
                    window = existence_window(curve)
                    for r in range(window):
                        for combo in itertools.combinations(curve.nodes, r):
                            if not curve_connected_without(curve, combo):
                                continue
                            assert any(
                                curve_connected_without(curve, combo + (extra,))
                                for extra in curve.nodes
                                if extra not in combo
                            )


class TestWitness:
    def test_one_step_trace(self):
        start = Marking(TRIANGLE, [node("L1", "L2")])
        target = Marking(TRIANGLE, [node("L1", "F1")])
        steps = shortest_trace(start, target)
        assert len(steps) == 1
        assert steps[0][0] == start and steps[0][2] == target

    def test_trace_is_replayable(self, tmp_path):
        curve = build_gamma(Surface(2), 2, 2)
        markings = list(enumerate_markings(curve, 2, irreducible_only=True))
        steps = shortest_trace(markings[0], markings[-1])
        path = tmp_path / "witness.jsonl"
        write_trace(path, steps)
        assert replay_trace(curve, path) == len(steps)
        current = markings[0]
        for before, move, after in steps:
            assert before == current
            current = move.apply(current)
        assert current == markings[-1]

    def test_identical_markings_give_empty_trace(self):
        m = Marking(TRIANGLE, [node("L1", "L2")])
        assert shortest_trace(m, m) == []

    def test_inequivalent_markings_rejected(self):
        # an irreducible and a reducible marking can never be connected
        curve = build_gamma(Surface(1), 2, 2)
        reducible = next(
            m for m in enumerate_markings(curve, 2) if not is_irreducible(m)
        )
        irreducible = next(
            m for m in enumerate_markings(curve, 2, irreducible_only=True)
        )
        with pytest.raises(ValueError, match="not move-equivalent"):
            shortest_trace(irreducible, reducible)

    def test_traces_stay_within_one_status(self):
        curve = build_gamma(Surface(2), 2, 1)
        markings = list(enumerate_markings(curve, 2, irreducible_only=True))
        steps = shortest_trace(markings[0], markings[-1])
        for before, _move, after in steps:
            assert is_irreducible(before) and is_irreducible(after)
