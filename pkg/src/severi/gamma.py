"""The maximally degenerate curve as a labeled dual intersection multigraph.

The curve is a union of ``d`` generic positive sections (``L1..Ld``) and
``k`` generic fibers (``F1..Fk``) on ``Sigma_n``.  Its dual multigraph has
one vertex per component and one edge per node of the curve: each pair of
sections meets in ``n`` nodes (distinguished by a ``sheet`` label), each
section meets each fiber once, and fibers are disjoint.  The total edge
count is ``d*k + n*d*(d-1)/2``.

Node labels are canonical and the node list is emitted in a fixed
lexicographic order so that downstream searches and reports are
reproducible bit for bit.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable

from .lattice import Surface

__all__ = [
    "ComponentId",
    "NodeId",
    "DegenerationCurve",
    "build_gamma",
    "is_connected_after_removal",
    "spanning_tree_count",
]

_KIND_RANK = {"L": 0, "F": 1}


@functools.total_ordering
@dataclass(frozen=True)
class ComponentId:
    """One irreducible component: ``kind`` is ``"L"`` (section) or ``"F"``
    (fiber), ``index`` is 1-based within its kind."""

    kind: str
    index: int

    def __post_init__(self) -> None:
        if self.kind not in _KIND_RANK:
            raise ValueError(f"component kind must be 'L' or 'F', got {self.kind!r}")
        if not isinstance(self.index, int) or self.index < 1:
            raise ValueError(f"component index must be a positive integer, got {self.index!r}")

    @property
    def label(self) -> str:
        return f"{self.kind}{self.index}"

    @classmethod
    def parse(cls, label: str) -> "ComponentId":
        if not label or label[0] not in _KIND_RANK or not label[1:].isdigit():
            raise ValueError(f"malformed component label {label!r}")
        return cls(label[0], int(label[1:]))

    def _key(self) -> tuple[int, int]:
        return (_KIND_RANK[self.kind], self.index)

    def __lt__(self, other: "ComponentId") -> bool:
        return self._key() < other._key()

    def __repr__(self) -> str:
        return f"ComponentId({self.label!r})"


@functools.total_ordering
@dataclass(frozen=True)
class NodeId:
    """One node of the degenerate curve, i.e. one edge of the dual graph.

    The component pair is stored in canonical order (sections before
    fibers, lower index first); ``sheet`` distinguishes the parallel nodes
    of a section-section pair and is always 1 on section-fiber pairs.
    """

    a: ComponentId
    b: ComponentId
    sheet: int

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError(f"node endpoints must differ, got {self.a.label} twice")
        if self.a.kind == "F" and self.b.kind == "F":
            raise ValueError("fibers are disjoint: no node joins two F-components")
        if self.b < self.a:
            raise ValueError(
                f"node pair ({self.a.label}, {self.b.label}) is not in canonical order"
            )
        if not isinstance(self.sheet, int) or self.sheet < 1:
            raise ValueError(f"sheet must be a positive integer, got {self.sheet!r}")

    @classmethod
    def of(cls, a: ComponentId, b: ComponentId, sheet: int = 1) -> "NodeId":
        """Build a node, normalizing the endpoint order."""
        if b < a:
            a, b = b, a
        return cls(a, b, sheet)

    @property
    def triple(self) -> tuple[str, str, int]:
        return (self.a.label, self.b.label, self.sheet)

    @classmethod
    def parse(cls, triple: Iterable) -> "NodeId":
        items = list(triple)
        if len(items) != 3:
            raise ValueError(f"node triple must have 3 entries, got {items!r}")
        return cls.of(ComponentId.parse(items[0]), ComponentId.parse(items[1]), int(items[2]))

    def _key(self) -> tuple:
        return (
            _KIND_RANK[self.a.kind] + _KIND_RANK[self.b.kind],
            self.a.index,
            self.b.index,
            self.sheet,
        )

    def __lt__(self, other: "NodeId") -> bool:
        return self._key() < other._key()

    def __repr__(self) -> str:
        return f"NodeId({self.a.label}, {self.b.label}, {self.sheet})"


class DegenerationCurve:
    """Immutable dual multigraph of the degenerate curve on ``Sigma_n``.

    Vertices are the ``d + k`` components, edges the nodes in canonical
    order.  Use :func:`build_gamma` to construct one.
    """

    __slots__ = ("surface", "d", "k", "nodes", "_index", "_endpoints", "_pair_nodes")

    def __init__(self, surface: Surface, d: int, k: int, nodes: tuple[NodeId, ...]):
        self.surface = surface
        self.d = d
        self.k = k
        self.nodes = nodes
        self._index = {node: i for i, node in enumerate(nodes)}
        self._endpoints = tuple(
            (self.vertex_id(node.a), self.vertex_id(node.b)) for node in nodes
        )
        pair_nodes: dict[tuple[int, int], list[int]] = {}
        for i, (u, v) in enumerate(self._endpoints):
            pair_nodes.setdefault((u, v), []).append(i)
        self._pair_nodes = pair_nodes

    @property
    def n(self) -> int:
        return self.surface.n

    @property
    def vertex_count(self) -> int:
        return self.d + self.k

    @property
    def components(self) -> tuple[ComponentId, ...]:
        return tuple(
            ComponentId("L", i) for i in range(1, self.d + 1)
        ) + tuple(ComponentId("F", j) for j in range(1, self.k + 1))

    def vertex_id(self, c: ComponentId) -> int:
        if c.kind == "L":
            if c.index > self.d:
                raise ValueError(f"component {c.label} does not exist (d={self.d})")
            return c.index - 1
        if c.index > self.k:
            raise ValueError(f"component {c.label} does not exist (k={self.k})")
        return self.d + c.index - 1

    def node_index(self, node: NodeId) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise ValueError(f"unknown node {node!r} for this curve") from None

    def node_endpoints(self, i: int) -> tuple[int, int]:
        return self._endpoints[i]

    def pair_node_indices(self, u: int, v: int) -> list[int]:
        """Indices of all nodes joining the vertices ``u`` and ``v``."""
        if u > v:
            u, v = v, u
        return list(self._pair_nodes.get((u, v), ()))

    def __contains__(self, node: NodeId) -> bool:
        return node in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DegenerationCurve):
            return NotImplemented
        return (self.n, self.d, self.k) == (other.n, other.d, other.k)

    def __hash__(self) -> int:
        return hash((self.n, self.d, self.k))

    def __repr__(self) -> str:
        return f"DegenerationCurve(n={self.n}, d={self.d}, k={self.k}, nodes={len(self.nodes)})"

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "k": self.k,
            "nodes": [list(node.triple) for node in self.nodes],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DegenerationCurve":
        curve = build_gamma(Surface(int(data["n"])), int(data["d"]), int(data["k"]))
        given = [NodeId.parse(t) for t in data["nodes"]]
        if tuple(given) != curve.nodes:
            raise ValueError("node list does not match the canonical enumeration")
        return curve


def build_gamma(surface: Surface, d: int, k: int) -> DegenerationCurve:
    """Assemble the degenerate curve for ``(n, d, k)``.

    Nodes come out in canonical lexicographic order: all section-section
    nodes (by index pair, then sheet), then all section-fiber nodes.
    Requires ``d >= 1``; a pure-fiber configuration has no marking calculus
    and is rejected.
    """
    if not isinstance(d, int) or d < 1:
        raise ValueError(f"d must be >= 1 (at least one section component), got {d!r}")
    if not isinstance(k, int) or k < 0:
        raise ValueError(f"k must be >= 0, got {k!r}")
    n = surface.n
    nodes: list[NodeId] = []
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            for sheet in range(1, n + 1):
                nodes.append(NodeId(ComponentId("L", i), ComponentId("L", j), sheet))
    for i in range(1, d + 1):
        for j in range(1, k + 1):
            nodes.append(NodeId(ComponentId("L", i), ComponentId("F", j), 1))
    return DegenerationCurve(surface, d, k, tuple(nodes))


class UnionFind:
    """Array union-find with path halving and union by rank."""

    __slots__ = ("parent", "rank", "components")

    def __init__(self, size: int) -> None:
        self.parent = list(range(size))
        self.rank = [0] * size
        self.components = size

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        rank = self.rank
        if rank[ra] < rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if rank[ra] == rank[rb]:
            rank[ra] += 1
        self.components -= 1
        return True


def is_connected_after_removal(curve: DegenerationCurve, removed: Iterable[NodeId]) -> bool:
    """Whether the dual graph stays connected after deleting the given edges.

    Removing a set of nodes from the curve disconnects it exactly when the
    corresponding edge deletion disconnects the dual multigraph, because
    every component is irreducible.
    """
    removed_idx = {curve.node_index(node) for node in removed}
    return _connected_with_removed_indices(curve, removed_idx)


def _connected_with_removed_indices(curve: DegenerationCurve, removed_idx: set[int]) -> bool:
    uf = UnionFind(curve.vertex_count)
    for i, (u, v) in enumerate(curve._endpoints):
        if i not in removed_idx:
            uf.union(u, v)
            if uf.components == 1:
                return True
    return uf.components == 1


def _int_det(matrix: list[list[int]]) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    size = len(matrix)
    if size == 0:
        return 1
    m = [row[:] for row in matrix]
    sign = 1
    prev = 1
    for i in range(size - 1):
        if m[i][i] == 0:
            for r in range(i + 1, size):
                if m[r][i]:
                    m[i], m[r] = m[r], m[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, size):
            for c in range(i + 1, size):
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) // prev
            m[r][i] = 0
        prev = m[i][i]
    return sign * m[-1][-1]


def spanning_tree_count(curve: DegenerationCurve) -> int:
    """Number of spanning trees of the dual multigraph (matrix-tree cofactor,
    exact integers throughout)."""
    size = curve.vertex_count
    if size <= 1:
        return 1
    laplacian = [[0] * size for _ in range(size)]
    for u, v in curve._endpoints:
        laplacian[u][u] += 1
        laplacian[v][v] += 1
        laplacian[u][v] -= 1
        laplacian[v][u] -= 1
    minor = [row[1:] for row in laplacian[1:]]
    return _int_det(minor)
