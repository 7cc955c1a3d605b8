"""Ordered node markings and the local move calculus on them.

A marking is an ordered tuple of distinct nodes of the degenerate curve.
Three families of moves act on markings:

* D-moves exchange two nodes lying on the same component pair (so they only
  exist when parallel nodes do, i.e. on section-section pairs with n >= 2).
* T-moves (n > 0) act on a triangle of three pairwise-meeting components,
  exchanging the two nodes opposite to an unmarked "pivot" node.
* Q-moves (n = 0) act on a 2x2 grid of two sections and two fibers,
  exchanging two nodes of one row (Qh) or one column (Qv) while the
  opposite row/column is entirely unmarked.

Every move either swaps the contents of two positions or replaces a marked
node by an unmarked one in place, so each move is an involution.  Unlisted
configurations act as the identity.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .gamma import ComponentId, DegenerationCurve, NodeId, is_connected_after_removal

__all__ = [
    "Marking",
    "MoveInstance",
    "is_irreducible",
    "apply_d",
    "apply_t",
    "apply_q",
    "d_move",
    "t_move",
    "q_move",
    "enumerate_moves",
    "all_move_instances",
    "write_trace",
    "replay_trace",
]

MOVE_FAMILIES = ("D", "T", "Qh", "Qv")


class Marking:
    """An ordered tuple of distinct nodes of a fixed degeneration curve.

    Positions are reported 1-based (``p_1 .. p_r``); internally tuples are
    plain Python tuples.  Markings are immutable values; moves return new
    markings.
    """

    __slots__ = ("gamma", "points")

    def __init__(self, gamma: DegenerationCurve, points: Sequence[NodeId]):
        pts = tuple(points)
        seen = set()
        for p in pts:
            if p not in gamma:
                raise ValueError(f"node {p!r} does not belong to the curve")
            if p in seen:
                raise ValueError(f"marked nodes must be distinct, {p!r} repeats")
            seen.add(p)
        self.gamma = gamma
        self.points = pts

    @property
    def r(self) -> int:
        return len(self.points)

    def position(self, node: NodeId) -> int | None:
        """1-based position of ``node`` in the marking, or None."""
        try:
            return self.points.index(node) + 1
        except ValueError:
            return None

    def __contains__(self, node: NodeId) -> bool:
        return node in self.points

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Marking):
            return NotImplemented
        return self.gamma == other.gamma and self.points == other.points

    def __hash__(self) -> int:
        return hash((self.gamma, self.points))

    def __repr__(self) -> str:
        inner = ", ".join(str(p.triple) for p in self.points)
        return f"Marking[{inner}]"

    def to_json_list(self) -> list:
        return [list(p.triple) for p in self.points]

    @classmethod
    def from_json_list(cls, gamma: DegenerationCurve, data: Iterable) -> "Marking":
        return cls(gamma, [NodeId.parse(t) for t in data])


def is_irreducible(marking: Marking) -> bool:
    """True when removing the marked nodes leaves the curve connected."""
    return is_connected_after_removal(marking.gamma, marking.points)


def _pair_components(node: NodeId) -> frozenset[ComponentId]:
    return frozenset((node.a, node.b))


def _shared_component(x: NodeId, y: NodeId) -> ComponentId | None:
    common = _pair_components(x) & _pair_components(y)
    if len(common) == 1:
        return next(iter(common))
    return None


def _replace(points: tuple[NodeId, ...], index: int, node: NodeId) -> tuple[NodeId, ...]:
    return points[:index] + (node,) + points[index + 1 :]


def _swap(points: tuple[NodeId, ...], i: int, j: int) -> tuple[NodeId, ...]:
    pts = list(points)
    pts[i], pts[j] = pts[j], pts[i]
    return tuple(pts)


def _check_d_config(gamma: DegenerationCurve, q: NodeId, qp: NodeId) -> None:
    if q not in gamma or qp not in gamma:
        raise ValueError("not a D-configuration: node does not belong to the curve")
    if q == qp or q.a != qp.a or q.b != qp.b:
        raise ValueError(
            f"not a D-configuration: {q!r}, {qp!r} must be distinct nodes on one component pair"
        )


def apply_d(marking: Marking, q: NodeId, qp: NodeId) -> Marking:
    """D-move: exchange the two parallel nodes ``q``, ``qp``.

    Replaces whichever of the two is marked by the other, transposes their
    positions when both are marked, and otherwise leaves the marking alone.
    """
    _check_d_config(marking.gamma, q, qp)
    pts = marking.points
    pos_q = marking.position(q)
    pos_qp = marking.position(qp)
    if pos_q is None and pos_qp is not None:
        return Marking(marking.gamma, _replace(pts, pos_qp - 1, q))
    if pos_q is not None and pos_qp is None:
        return Marking(marking.gamma, _replace(pts, pos_q - 1, qp))
    if pos_q is not None and pos_qp is not None:
        return Marking(marking.gamma, _swap(pts, pos_q - 1, pos_qp - 1))
    return marking


def _check_t_config(gamma: DegenerationCurve, q: NodeId, qp: NodeId, qpp: NodeId) -> None:
    if gamma.n == 0:
        raise ValueError("T-moves require n>0")
    for node in (q, qp, qpp):
        if node not in gamma:
            raise ValueError("not a T-configuration: node does not belong to the curve")
    if len({q, qp, qpp}) != 3:
        raise ValueError("not a T-configuration: nodes must be distinct")
    d_pp = _shared_component(q, qp)
    d_p = _shared_component(q, qpp)
    d = _shared_component(qp, qpp)
    if d_pp is None or d_p is None or d is None or len({d, d_p, d_pp}) != 3:
        raise ValueError(
            "not a T-configuration: the three nodes must pairwise share exactly one "
            "component, over three distinct components"
        )


def apply_t(marking: Marking, q: NodeId, qp: NodeId, qpp: NodeId) -> Marking:
    """T-move with pivot ``qp``: exchange ``q`` and ``qpp``.

    Requires a triangle configuration across three distinct components.
    Acts as the identity whenever the pivot ``qp`` is marked, or neither of
    ``q``, ``qpp`` is marked.
    """
    _check_t_config(marking.gamma, q, qp, qpp)
    if qp in marking:
        return marking
    pts = marking.points
    pos_q = marking.position(q)
    pos_qpp = marking.position(qpp)
    if pos_q is not None and pos_qpp is None:
        return Marking(marking.gamma, _replace(pts, pos_q - 1, qpp))
    if pos_qpp is not None and pos_q is None:
        return Marking(marking.gamma, _replace(pts, pos_qpp - 1, q))
    if pos_q is not None and pos_qpp is not None:
        return Marking(marking.gamma, _swap(pts, pos_q - 1, pos_qpp - 1))
    return marking


def _check_q_config(
    gamma: DegenerationCurve, q: NodeId, qp: NodeId, qpp: NodeId, qppp: NodeId
) -> None:
    if gamma.n != 0:
        raise ValueError("Q-moves require n=0")
    for node in (q, qp, qpp, qppp):
        if node not in gamma:
            raise ValueError("not a Q-configuration: node does not belong to the curve")
    if len({q, qp, qpp, qppp}) != 4:
        raise ValueError("not a Q-configuration: nodes must be distinct")
    # grid layout: q=(X,Y), qp=(X,Y'), qpp=(X',Y), qppp=(X',Y')
    if not (
        q.a == qp.a
        and qpp.a == qppp.a
        and q.a != qpp.a
        and q.b == qpp.b
        and qp.b == qppp.b
        and q.b != qp.b
    ):
        raise ValueError(
            "not a Q-configuration: nodes must form a 2x2 grid over two sections "
            "and two fibers"
        )


def apply_q(
    marking: Marking,
    variant: str,
    q: NodeId,
    qp: NodeId,
    qpp: NodeId,
    qppp: NodeId,
) -> Marking:
    """Q-move on the grid ``q=(X,Y), qp=(X,Y'), qpp=(X',Y), qppp=(X',Y')``.

    Variant ``"h"`` exchanges ``q`` and ``qp`` provided ``qpp`` and ``qppp``
    are unmarked; variant ``"v"`` exchanges ``q`` and ``qpp`` provided
    ``qp`` and ``qppp`` are unmarked.  All remaining configurations act as
    the identity.
    """
    if variant not in ("h", "v"):
        raise ValueError(f"Q-move variant must be 'h' or 'v', got {variant!r}")
    _check_q_config(marking.gamma, q, qp, qpp, qppp)
    if variant == "h":
        guards = (qpp, qppp)
        other = qp
    else:
        guards = (qp, qppp)
        other = qpp
    if any(g in marking for g in guards):
        return marking
    pts = marking.points
    pos_q = marking.position(q)
    pos_other = marking.position(other)
    if pos_q is not None and pos_other is None:
        return Marking(marking.gamma, _replace(pts, pos_q - 1, other))
    if pos_other is not None and pos_q is None:
        return Marking(marking.gamma, _replace(pts, pos_other - 1, q))
    if pos_q is not None and pos_other is not None:
        return Marking(marking.gamma, _swap(pts, pos_q - 1, pos_other - 1))
    return marking


@dataclass(frozen=True)
class MoveInstance:
    """A fully parameterized move; construct through :func:`d_move`,
    :func:`t_move`, :func:`q_move` or :meth:`from_json_dict`, all of which
    validate the configuration against a curve eagerly."""

    family: str
    args: tuple[NodeId, ...]

    def apply(self, marking: Marking) -> Marking:
        if self.family == "D":
            return apply_d(marking, *self.args)
        if self.family == "T":
            return apply_t(marking, *self.args)
        if self.family == "Qh":
            return apply_q(marking, "h", *self.args)
        if self.family == "Qv":
            return apply_q(marking, "v", *self.args)
        raise ValueError(f"unknown move family {self.family!r}")

    def to_json_dict(self) -> dict:
        return {"family": self.family, "args": [list(p.triple) for p in self.args]}

    @classmethod
    def from_json_dict(cls, gamma: DegenerationCurve, data: dict) -> "MoveInstance":
        family = data["family"]
        args = [NodeId.parse(t) for t in data["args"]]
        if family == "D":
            return d_move(gamma, *args)
        if family == "T":
            return t_move(gamma, *args)
        if family == "Qh":
            return q_move(gamma, "h", *args)
        if family == "Qv":
            return q_move(gamma, "v", *args)
        raise ValueError(f"unknown move family {family!r}")


def d_move(gamma: DegenerationCurve, q: NodeId, qp: NodeId) -> MoveInstance:
    _check_d_config(gamma, q, qp)
    return MoveInstance("D", (q, qp))


def t_move(gamma: DegenerationCurve, q: NodeId, qp: NodeId, qpp: NodeId) -> MoveInstance:
    _check_t_config(gamma, q, qp, qpp)
    return MoveInstance("T", (q, qp, qpp))


def q_move(
    gamma: DegenerationCurve, variant: str, q: NodeId, qp: NodeId, qpp: NodeId, qppp: NodeId
) -> MoveInstance:
    if variant not in ("h", "v"):
        raise ValueError(f"Q-move variant must be 'h' or 'v', got {variant!r}")
    _check_q_config(gamma, q, qp, qpp, qppp)
    return MoveInstance("Qh" if variant == "h" else "Qv", (q, qp, qpp, qppp))


@functools.lru_cache(maxsize=64)
def all_move_instances(gamma: DegenerationCurve) -> tuple[MoveInstance, ...]:
    """Every structurally valid move instance on the curve, deduplicated up
    to identical action and listed in a fixed deterministic order.

    D-instances range over unordered parallel-node pairs, T-instances over
    node triangles with each of the three nodes as pivot, Q-instances over
    2x2 grids with an ordered guard row (Qh) or guard column (Qv).
    """
    nodes = gamma.nodes
    instances: list[MoveInstance] = []

    for (u, v), idxs in sorted(gamma._pair_nodes.items()):
        if len(idxs) >= 2:
            for i1, i2 in itertools.combinations(idxs, 2):
                instances.append(MoveInstance("D", (nodes[i1], nodes[i2])))

    if gamma.n > 0:
        vertices = range(gamma.vertex_count)
        for c1, c2, c3 in itertools.combinations(vertices, 3):
            side12 = gamma.pair_node_indices(c1, c2)
            side13 = gamma.pair_node_indices(c1, c3)
            side23 = gamma.pair_node_indices(c2, c3)
            if not (side12 and side13 and side23):
                continue
            for x in side23:
                for y in side13:
                    for z in side12:
                        triangle = (nodes[x], nodes[y], nodes[z])
                        for pivot in triangle:
                            active = sorted(t for t in triangle if t != pivot)
                            instances.append(MoveInstance("T", (active[0], pivot, active[1])))
    else:
        l_comps = [ComponentId("L", i) for i in range(1, gamma.d + 1)]
        f_comps = [ComponentId("F", j) for j in range(1, gamma.k + 1)]

        def grid_node(lc: ComponentId, fc: ComponentId) -> NodeId:
            return NodeId(lc, fc, 1)

        for x_act, x_guard in itertools.permutations(l_comps, 2):
            for y1, y2 in itertools.combinations(f_comps, 2):
                instances.append(
                    MoveInstance(
                        "Qh",
                        (
                            grid_node(x_act, y1),
                            grid_node(x_act, y2),
                            grid_node(x_guard, y1),
                            grid_node(x_guard, y2),
                        ),
                    )
                )
        for y_act, y_guard in itertools.permutations(f_comps, 2):
            for x1, x2 in itertools.combinations(l_comps, 2):
                instances.append(
                    MoveInstance(
                        "Qv",
                        (
                            grid_node(x1, y_act),
                            grid_node(x1, y_guard),
                            grid_node(x2, y_act),
                            grid_node(x2, y_guard),
                        ),
                    )
                )
    return tuple(instances)


def enumerate_moves(
    marking: Marking, include_identity: bool = False
) -> list[tuple[MoveInstance, Marking]]:
    """Apply every valid move instance to ``marking``.

    Returns ``(instance, result)`` pairs; results equal to the input are
    dropped unless ``include_identity`` is set.
    """
    out = []
    for instance in all_move_instances(marking.gamma):
        result = instance.apply(marking)
        if include_identity or result.points != marking.points:
            out.append((instance, result))
    return out


def write_trace(path, steps: Iterable[tuple[Marking, MoveInstance, Marking]]) -> int:
    """Write a replayable move trace, one JSON record per line."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for before, move, after in steps:
            record = {
                "marking": before.to_json_list(),
                "move": move.to_json_dict(),
                "result": after.to_json_list(),
            }
            fh.write(json.dumps(record) + "\n")
            count += 1
    return count


def replay_trace(gamma: DegenerationCurve, path) -> int:
    """Re-apply every move of a trace file and check each recorded result.

    Returns the number of verified records; raises ``ValueError`` on the
    first record whose move does not reproduce its stated result.
    """
    verified = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            before = Marking.from_json_list(gamma, record["marking"])
            move = MoveInstance.from_json_dict(gamma, record["move"])
            expected = Marking.from_json_list(gamma, record["result"])
            actual = move.apply(before)
            if actual != expected:
                raise ValueError(f"trace line {line_no}: move does not reproduce the result")
            verified += 1
    return verified
