"""Exhaustive move-equivalence classification of ordered markings.

The central verification: on every small degenerate curve, all irreducible
markings of a given order fall into a single equivalence class of the move
calculus (D+T moves when n > 0, D+Q moves when n = 0).

Engine notes.  Every move acts on an ordered marking as a transposition of
two node labels applied to the tuple (a replacement when one label is
marked, a position swap when both are), gated by conditions that depend
only on the unordered support.  States are therefore stored as byte
strings over the node alphabet and successors produced with
``bytes.translate`` against a precomputed move table; the per-state support
bitmask answers every gate with integer ops.  BFS identity is the exact
ordered tuple, sources are scanned in lexicographic order, and the whole
run is deterministic apart from wall time.

A second, independently derived engine (:func:`orbit_class_counts`)
classifies unordered supports and measures the permutation group induced
on a base support; class counts follow as r!/|H| per support class.  The
two engines share only the move table and serve as cross-checks of each
other.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .gamma import (
    DegenerationCurve,
    _connected_with_removed_indices,
    build_gamma,
)
from .lattice import Surface
from .markings import Marking, MoveInstance, enumerate_moves

__all__ = [
    "DEFAULT_STATE_BUDGET",
    "STATE_BUDGET_ENV_VAR",
    "StateBudgetExceeded",
    "VerificationError",
    "ClassReport",
    "GridEntry",
    "enumerate_markings",
    "existence_window",
    "compute_classes",
    "orbit_class_counts",
    "verify_equivalence_grid",
    "verify_node_coverage",
    "maximal_marking_count",
    "shortest_trace",
]

DEFAULT_STATE_BUDGET = 10_000_000
STATE_BUDGET_ENV_VAR = "SEVERI_STATE_BUDGET"


class StateBudgetExceeded(RuntimeError):
    """Raised when a search would touch more states than the budget allows.

    Carries whatever statistics were known at abort time in ``partial``;
    a truncated search cannot certify class counts, so no report is built.
    """

    def __init__(self, message: str, partial: dict):
        super().__init__(message)
        self.partial = partial


class VerificationError(RuntimeError):
    """An asserted combinatorial property failed; carries the witnesses."""

    def __init__(self, message: str, witnesses: tuple = ()):
        super().__init__(message)
        self.witnesses = witnesses


def effective_state_budget(state_budget: int | None = None) -> int:
    """Resolve the state budget: explicit argument, else the
    ``SEVERI_STATE_BUDGET`` environment variable, else the default."""
    if state_budget is not None:
        if state_budget < 1:
            raise ValueError(f"state budget must be >= 1, got {state_budget}")
        return state_budget
    env = os.environ.get(STATE_BUDGET_ENV_VAR)
    if env is not None:
        value = int(env)
        if value < 1:
            raise ValueError(f"{STATE_BUDGET_ENV_VAR} must be >= 1, got {value}")
        return value
    return DEFAULT_STATE_BUDGET


@dataclass(frozen=True)
class ClassReport:
    """Outcome of one exhaustive classification run."""

    n: int
    d: int
    k: int
    r: int
    total_markings: int
    irreducible_count: int
    class_count_irreducible: int
    class_count_all: int
    max_frontier: int
    states_visited: int
    wall_time: float

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "k": self.k,
            "r": self.r,
            "total_markings": self.total_markings,
            "irreducible_count": self.irreducible_count,
            "class_count_irreducible": self.class_count_irreducible,
            "class_count_all": self.class_count_all,
            "max_frontier": self.max_frontier,
            "states_visited": self.states_visited,
            "wall_time": self.wall_time,
        }


_GUARD_NONE = 0
_GUARD_SOME_UNMARKED = 1  # T: at least one pivot candidate outside the support
_GUARD_ROW_CLEAR = 2  # Q: some opposite row/column entirely outside the support


def _build_move_table(gamma: DegenerationCurve) -> list[tuple]:
    """Index-level move set.

    Each entry ``(tx, bits, guard_kind, guard, x, z)`` encodes the exchange
    of node indices ``x`` and ``z``: ``tx`` is the byte translation table of
    the transposition, ``bits`` its two-bit mask, and ``guard`` the
    set-level applicability data for the move family.
    """
    nodes = gamma.nodes
    m = len(nodes)
    identity = bytes(range(256))

    def transposition(x: int, z: int) -> bytes:
        t = bytearray(identity)
        t[x], t[z] = z, x
        return bytes(t)

    def bit_of(indices: Iterable[int]) -> int:
        mask = 0
        for i in indices:
            mask |= 1 << i
        return mask

    entries: list[tuple] = []
    for (_u, _v), idxs in sorted(gamma._pair_nodes.items()):
        if len(idxs) >= 2:
            for x, z in itertools.combinations(idxs, 2):
                entries.append(
                    (transposition(x, z), (1 << x) | (1 << z), _GUARD_NONE, 0, x, z)
                )

    endpoints = gamma._endpoints
    if gamma.n > 0:
        for x in range(m):
            for z in range(x + 1, m):
                sx = set(endpoints[x])
                sz = set(endpoints[z])
                common = sx & sz
                if len(common) != 1:
                    continue
                x_other = (sx - common).pop()
                z_other = (sz - common).pop()
                pivots = gamma.pair_node_indices(z_other, x_other)
                if not pivots:
                    continue
                entries.append(
                    (
                        transposition(x, z),
                        (1 << x) | (1 << z),
                        _GUARD_SOME_UNMARKED,
                        bit_of(pivots),
                        x,
                        z,
                    )
                )
    else:
        d = gamma.d
        for x in range(m):
            for z in range(x + 1, m):
                sx = set(endpoints[x])
                sz = set(endpoints[z])
                common = sx & sz
                if len(common) != 1:
                    continue
                shared = common.pop()
                x_other = (sx - {shared}).pop()
                z_other = (sz - {shared}).pop()
                guards = []
                if shared < d:  # shared section: Qh over the other sections
                    for u2 in range(d):
                        if u2 != shared:
                            guards.append(
                                bit_of(
                                    gamma.pair_node_indices(u2, x_other)
                                    + gamma.pair_node_indices(u2, z_other)
                                )
                            )
                else:  # shared fiber: Qv over the other fibers
                    for w2 in range(d, gamma.vertex_count):
                        if w2 != shared:
                            guards.append(
                                bit_of(
                                    gamma.pair_node_indices(x_other, w2)
                                    + gamma.pair_node_indices(z_other, w2)
                                )
                            )
                if not guards:
                    continue
                entries.append(
                    (
                        transposition(x, z),
                        (1 << x) | (1 << z),
                        _GUARD_ROW_CLEAR,
                        tuple(guards),
                        x,
                        z,
                    )
                )
    return entries


def _support_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


class _IrreducibilityCache:
    """Memoized support-level connectivity: a marking's irreducibility
    depends only on its unordered support."""

    __slots__ = ("gamma", "size", "known")

    def __init__(self, gamma: DegenerationCurve):
        self.gamma = gamma
        self.size = len(gamma.nodes)
        self.known: dict[int, bool] = {}

    def __call__(self, mask: int) -> bool:
        value = self.known.get(mask)
        if value is None:
            removed = {i for i in range(self.size) if mask >> i & 1}
            value = _connected_with_removed_indices(self.gamma, removed)
            self.known[mask] = value
        return value


def enumerate_markings(
    gamma: DegenerationCurve, r: int, irreducible_only: bool = False
) -> Iterator[Marking]:
    """Stream all ordered r-markings in lexicographic order of the canonical
    node list, optionally keeping only the irreducible ones."""
    m = len(gamma.nodes)
    if not 0 <= r <= m:
        raise ValueError(f"marking order must satisfy 0 <= r <= {m}, got {r}")
    nodes = gamma.nodes
    irr = _IrreducibilityCache(gamma)
    for perm in itertools.permutations(range(m), r):
        if irreducible_only and not irr(_support_mask(perm)):
            continue
        yield Marking(gamma, tuple(nodes[i] for i in perm))


def existence_window(gamma: DegenerationCurve) -> int:
    """Largest r for which irreducible r-markings exist.

    Deleting r edges can keep the dual graph connected exactly while a
    spanning tree survives, so the window is ``#nodes - (d + k - 1)``.
    """
    return len(gamma.nodes) - (gamma.vertex_count - 1)


@dataclass
class _PartitionDetail:
    report: ClassReport
    irreducible_reps: list[Marking]
    class_sizes: list[int]
    class_irreducible: list[bool]


def _partition(
    gamma: DegenerationCurve,
    r: int,
    *,
    state_budget: int | None = None,
    dump_dir: str | Path | None = None,
    collect_irreducible_reps: bool = False,
) -> _PartitionDetail:
    budget = effective_state_budget(state_budget)
    m = len(gamma.nodes)
    if not 0 <= r <= m:
        raise ValueError(f"marking order must satisfy 0 <= r <= {m}, got {r}")
    total = math.perm(m, r)
    if total > budget:
        raise StateBudgetExceeded(
            f"state budget exceeded: {total} ordered {r}-markings > budget {budget}",
            partial={
                "n": gamma.n,
                "d": gamma.d,
                "k": gamma.k,
                "r": r,
                "total_markings": total,
                "states_visited": 0,
            },
        )

    t0 = time.perf_counter()
    table = _build_move_table(gamma)
    irr = _IrreducibilityCache(gamma)
    nodes = gamma.nodes

    visited: set[bytes] = set()
    class_sizes: list[int] = []
    class_irreducible: list[bool] = []
    reps: list[bytes] = []
    irreducible_count = 0
    max_frontier = 0
    states_visited = 0
    dump_path = Path(dump_dir) if dump_dir is not None else None
    if dump_path is not None:
        dump_path.mkdir(parents=True, exist_ok=True)

    for source in itertools.permutations(range(m), r):
        sb = bytes(source)
        if sb in visited:
            continue
        smask = _support_mask(source)
        status = irr(smask)
        if status and collect_irreducible_reps:
            reps.append(sb)
        members: list[bytes] | None = [] if dump_path is not None else None
        class_masks = {smask}
        size = 0
        visited.add(sb)
        frontier = [(sb, smask)]
        while frontier:
            if len(frontier) > max_frontier:
                max_frontier = len(frontier)
            nxt = []
            for state, mask in frontier:
                size += 1
                if members is not None:
                    members.append(state)
                for tx, bits, gkind, guard, _x, _z in table:
                    hit = mask & bits
                    if not hit:
                        continue
                    if gkind == _GUARD_SOME_UNMARKED:
                        if guard & mask == guard:
                            continue
                    elif gkind == _GUARD_ROW_CLEAR:
                        for gm in guard:
                            if not gm & mask:
                                break
                        else:
                            continue
                    succ = state.translate(tx)
                    if succ in visited:
                        continue
                    visited.add(succ)
                    if hit == bits:
                        nxt.append((succ, mask))
                    else:
                        mask2 = mask ^ bits
                        class_masks.add(mask2)
                        nxt.append((succ, mask2))
            frontier = nxt
        # moves never mix irreducible and reducible markings; verify.
        for cmask in class_masks:
            if irr(cmask) != status:
                raise VerificationError(
                    "class mixes irreducible and reducible markings",
                    witnesses=(gamma.n, gamma.d, gamma.k, r),
                )
        states_visited += size
        class_sizes.append(size)
        class_irreducible.append(status)
        if status:
            irreducible_count += size
        if members is not None:
            members.sort()
            index = len(class_sizes)
            payload = {
                "irreducible": status,
                "size": size,
                "markings": [[list(nodes[b].triple) for b in st] for st in members],
            }
            with open(dump_path / f"class_{index:06d}.json", "w", encoding="utf-8") as fh:
                json.dump(payload, fh)

    assert states_visited == total
    wall = time.perf_counter() - t0
    report = ClassReport(
        n=gamma.n,
        d=gamma.d,
        k=gamma.k,
        r=r,
        total_markings=total,
        irreducible_count=irreducible_count,
        class_count_irreducible=sum(class_irreducible),
        class_count_all=len(class_sizes),
        max_frontier=max_frontier,
        states_visited=states_visited,
        wall_time=wall,
    )
    rep_markings = [Marking(gamma, tuple(nodes[b] for b in rep)) for rep in reps]
    return _PartitionDetail(report, rep_markings, class_sizes, class_irreducible)


def compute_classes(
    gamma: DegenerationCurve,
    r: int,
    *,
    state_budget: int | None = None,
    dump_dir: str | Path | None = None,
) -> ClassReport:
    """Partition all ordered r-markings into move-equivalence classes.

    Uses D+T moves when n > 0 and D+Q moves when n = 0.  The result is
    independent of traversal order; refuses to start when the state count
    exceeds the budget (default 10**7, overridable via the
    ``SEVERI_STATE_BUDGET`` environment variable).  With ``dump_dir`` set,
    writes one JSON file per class with its markings in canonical order.
    """
    return _partition(
        gamma, r, state_budget=state_budget, dump_dir=dump_dir
    ).report


def _compose_transposition(perm: tuple[int, ...], x: int, z: int) -> tuple[int, ...]:
    # apply the node swap (x z) after perm
    out = list(perm)
    for i, v in enumerate(out):
        if v == x:
            out[i] = z
        elif v == z:
            out[i] = x
    return tuple(out)


def _group_order(generators: set[tuple[int, ...]], r: int) -> int:
    identity = tuple(range(r))
    gens = [g for g in generators if g != identity]
    if not gens:
        return 1
    elements = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(p[g[i]] for i in range(r))
                if q not in elements:
                    elements.add(q)
                    nxt.append(q)
        frontier = nxt
    return len(elements)


def orbit_class_counts(gamma: DegenerationCurve, r: int) -> dict:
    """Count equivalence classes without touching ordered states.

    Runs BFS over unordered supports, accumulating a transversal of node
    permutations; swap moves and non-tree edges yield loop generators of
    the group H induced on a base support (Schreier generators), and each
    support class contributes r!/|H| ordered classes of size |H| x #supports.
    Serves as an independent oracle for :func:`compute_classes`.
    """
    m = len(gamma.nodes)
    if not 0 <= r <= m:
        raise ValueError(f"marking order must satisfy 0 <= r <= {m}, got {r}")
    table = _build_move_table(gamma)
    irr = _IrreducibilityCache(gamma)
    r_fact = math.factorial(r)

    seen: set[int] = set()
    class_count_all = 0
    class_count_irr = 0
    irreducible_count = 0
    total = 0

    for combo in itertools.combinations(range(m), r):
        base_mask = _support_mask(combo)
        if base_mask in seen:
            continue
        base_sorted = list(combo)
        base_index = {v: i for i, v in enumerate(base_sorted)}
        status = irr(base_mask)

        transversal: dict[int, tuple[int, ...]] = {base_mask: tuple(range(m))}
        seen.add(base_mask)
        generators: set[tuple[int, ...]] = set()
        frontier = [base_mask]
        supports = 1
        while frontier:
            nxt = []
            for mask in frontier:
                pi = transversal[mask]
                for _tx, bits, gkind, guard, x, z in table:
                    hit = mask & bits
                    if not hit:
                        continue
                    if gkind == _GUARD_SOME_UNMARKED:
                        if guard & mask == guard:
                            continue
                    elif gkind == _GUARD_ROW_CLEAR:
                        for gm in guard:
                            if not gm & mask:
                                break
                        else:
                            continue
                    if hit == bits:
                        target_mask = mask
                    else:
                        target_mask = mask ^ bits
                        if irr(target_mask) != status:
                            raise VerificationError(
                                "support class mixes irreducible and reducible markings",
                                witnesses=(gamma.n, gamma.d, gamma.k, r),
                            )
                        if target_mask not in transversal:
                            transversal[target_mask] = _compose_transposition(pi, x, z)
                            seen.add(target_mask)
                            supports += 1
                            nxt.append(target_mask)
                            continue
                    # loop or cross edge: Schreier generator on the base support
                    pt = transversal[target_mask]
                    inv_pt = [0] * m
                    for i, v in enumerate(pt):
                        inv_pt[v] = i
                    moved = _compose_transposition(pi, x, z)
                    gen_nodes = tuple(inv_pt[moved[v]] for v in base_sorted)
                    generators.add(tuple(base_index[w] for w in gen_nodes))
            frontier = nxt

        order = _group_order(generators, r)
        assert r_fact % order == 0
        classes_here = r_fact // order
        class_count_all += classes_here
        total += supports * r_fact
        if status:
            class_count_irr += classes_here
            irreducible_count += supports * r_fact

    assert total == math.perm(m, r)
    return {
        "total_markings": total,
        "irreducible_count": irreducible_count,
        "class_count_all": class_count_all,
        "class_count_irreducible": class_count_irr,
    }


@dataclass(frozen=True)
class GridEntry:
    """One (n, d, k, r) cell of a verification sweep."""

    n: int
    d: int
    k: int
    r: int | None
    status: str  # "ok" | "skipped" | "vacuous"
    report: ClassReport | None = None
    reason: str = ""

    def to_json_dict(self) -> dict:
        out = {
            "n": self.n,
            "d": self.d,
            "k": self.k,
            "r": self.r,
            "status": self.status,
            "reason": self.reason,
        }
        out["report"] = self.report.to_json_dict() if self.report else None
        return out


def verify_equivalence_grid(
    grid: Iterable[tuple[int, int, int]],
    *,
    state_budget: int | None = None,
) -> list[GridEntry]:
    """Check on every grid point that all irreducible r-markings are
    mutually equivalent, for every feasible order r.

    Points whose ordered state count exceeds the budget are reported as
    skipped.  A counterexample raises :class:`VerificationError` carrying
    two inequivalent irreducible markings.
    """
    budget = effective_state_budget(state_budget)
    entries: list[GridEntry] = []
    for n, d, k in grid:
        gamma = build_gamma(Surface(n), d, k)
        window = existence_window(gamma)
        if window < 1:
            entries.append(
                GridEntry(n, d, k, None, "vacuous", reason="no irreducible markings of positive order")
            )
            continue
        for r in range(1, window + 1):
            total = math.perm(len(gamma.nodes), r)
            if total > budget:
                entries.append(
                    GridEntry(
                        n, d, k, r, "skipped",
                        reason=f"state count {total} exceeds budget {budget}",
                    )
                )
                continue
            detail = _partition(
                gamma, r, state_budget=budget, collect_irreducible_reps=True
            )
            report = detail.report
            if report.irreducible_count > 0 and report.class_count_irreducible != 1:
                raise VerificationError(
                    f"inequivalent irreducible {r}-markings on (n={n}, d={d}, k={k}): "
                    f"{report.class_count_irreducible} classes",
                    witnesses=tuple(detail.irreducible_reps[:2]),
                )
            entries.append(GridEntry(n, d, k, r, "ok", report=report))
    return entries


def verify_node_coverage(gamma: DegenerationCurve, r: int) -> bool:
    """Check that every node lies in some irreducible r-marking and is
    avoided by some other irreducible r-marking."""
    window = existence_window(gamma)
    if not 0 < r <= window:
        raise ValueError(
            f"need 0 < r <= existence window {window} so irreducible markings exist, got r={r}"
        )
    m = len(gamma.nodes)
    irr = _IrreducibilityCache(gamma)
    union = 0
    intersection = (1 << m) - 1
    found_any = False
    for combo in itertools.combinations(range(m), r):
        mask = _support_mask(combo)
        if irr(mask):
            found_any = True
            union |= mask
            intersection &= mask
            if union == (1 << m) - 1 and intersection == 0:
                return True
    return found_any and union == (1 << m) - 1 and intersection == 0


def maximal_marking_count(gamma: DegenerationCurve) -> int:
    """Count irreducible markings of the maximal order by brute-force
    support enumeration (the complement of a maximal irreducible marking is
    a spanning tree, so this must equal #spanning trees x r_max!)."""
    n, d, k = gamma.n, gamma.d, gamma.k
    r_max = k * (d - 1) + n * (d * (d - 1) // 2) - (d - 1)
    if r_max < 0:  # disconnected curve: no irreducible marking of any order
        return 0
    m = len(gamma.nodes)
    irr = _IrreducibilityCache(gamma)
    count_supports = 0
    for combo in itertools.combinations(range(m), r_max):
        if irr(_support_mask(combo)):
            count_supports += 1
    return count_supports * math.factorial(r_max)


def shortest_trace(
    start: Marking,
    target: Marking,
    *,
    state_budget: int | None = None,
) -> list[tuple[Marking, MoveInstance, Marking]]:
    """Shortest move sequence turning ``start`` into ``target``.

    BFS with parent links over the move graph; raises ``ValueError`` when
    the two markings are not equivalent and :class:`StateBudgetExceeded`
    when the search outgrows the budget.
    """
    if start.gamma != target.gamma:
        raise ValueError("markings live on different curves")
    if start.r != target.r:
        raise ValueError("markings have different orders, no move connects them")
    budget = effective_state_budget(state_budget)
    if start == target:
        return []
    parents: dict[Marking, tuple[Marking, MoveInstance] | None] = {start: None}
    queue: deque[Marking] = deque([start])
    while queue:
        current = queue.popleft()
        for instance, result in enumerate_moves(current):
            if result in parents:
                continue
            parents[result] = (current, instance)
            if result == target:
                steps: list[tuple[Marking, MoveInstance, Marking]] = []
                node = result
                while parents[node] is not None:
                    prev, inst = parents[node]  # type: ignore[misc]
                    steps.append((prev, inst, node))
                    node = prev
                steps.reverse()
                return steps
            if len(parents) > budget:
                raise StateBudgetExceeded(
                    f"state budget exceeded after {len(parents)} states",
                    partial={"states_visited": len(parents)},
                )
            queue.append(result)
    raise ValueError("markings are not move-equivalent")
