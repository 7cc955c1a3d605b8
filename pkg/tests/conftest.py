"""Shared independent oracles for the test suite.

These deliberately avoid the library's own code paths: connectivity is a
plain adjacency DFS (the library uses union-find), intersection numbers are
recomputed in the (Linf, F) basis (the library works in (L0, F)), and the
reference class partition walks Marking objects through enumerate_moves
(the optimized engine uses byte translation tables).
"""

from __future__ import annotations

import itertools

from severi.gamma import DegenerationCurve
from severi.markings import Marking, enumerate_moves


def linf_basis_intersect(n: int, a, b) -> int:
    """Intersection number computed entirely in the (Linf, F) basis, where
    the form is Linf.Linf = -n, F.F = 0, Linf.F = 1."""
    a_inf, a_f = a
    b_inf, b_f = b
    return -n * a_inf * b_inf + a_inf * b_f + a_f * b_inf


def dfs_connected(vertex_count: int, edges) -> bool:
    """Plain adjacency DFS connectivity over an explicit edge list."""
    if vertex_count == 0:
        return True
    adjacency = {v: [] for v in range(vertex_count)}
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        for w in adjacency[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == vertex_count


def curve_connected_without(curve: DegenerationCurve, removed_nodes) -> bool:
    removed = set(removed_nodes)
    edges = [
        curve.node_endpoints(i)
        for i, node in enumerate(curve.nodes)
        if node not in removed
    ]
    return dfs_connected(curve.vertex_count, edges)


def brute_force_spanning_trees(curve: DegenerationCurve) -> int:
    """Count spanning trees by enumerating (d+k-1)-edge subsets."""
    want = curve.vertex_count - 1
    count = 0
    for subset in itertools.combinations(range(len(curve.nodes)), want):
        edges = [curve.node_endpoints(i) for i in subset]
        if dfs_connected(curve.vertex_count, edges):
            count += 1
    return count


def reference_partition(curve: DegenerationCurve, r: int):
    """Classify all ordered r-markings by BFS through enumerate_moves.

    Returns (class_count_all, class_count_irreducible, irreducible_count).
    Only usable on tiny instances; serves as a third, definition-level
    engine against compute_classes and orbit_class_counts.
    """
    from severi.markings import is_irreducible

    all_markings = [
        Marking(curve, perm) for perm in itertools.permutations(curve.nodes, r)
    ]
    unseen = set(all_markings)
    classes = []
    for seed_marking in all_markings:
        if seed_marking not in unseen:
            continue
        unseen.discard(seed_marking)
        block = {seed_marking}
        frontier = [seed_marking]
        while frontier:
            nxt = []
            for marking in frontier:
                for _inst, result in enumerate_moves(marking):
                    if result in unseen:
                        unseen.discard(result)
                        block.add(result)
                        nxt.append(result)
            frontier = nxt
        classes.append(block)
    irr_count = sum(1 for m in all_markings if is_irreducible(m))
    irr_classes = sum(1 for block in classes if is_irreducible(next(iter(block))))
    return len(classes), irr_classes, irr_count
