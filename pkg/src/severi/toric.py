"""Lattice polygons, toric smoothness, and exact rational parameterizations.

A convex integral polygon determines a polarized toric surface; its edges,
read counterclockwise, give primitive direction vectors ``(a_i, b_i)`` and
lattice lengths ``k_i``.  A rational curve in the associated linear system
that meets the boundary in ``k_ij``-fold points pulls back to

    x(t) = alpha * prod (t - c_ij)^(-k_ij * b_i)
    y(t) = beta  * prod (t - c_ij)^( k_ij * a_i)

with one factor per boundary point; both products have total degree zero
because the polygon closes up.  Implicitization recovers, by exact rational
linear algebra over sampled parameter values, the unique (for generic
roots) relation supported on the polygon's lattice points, and reports its
Newton polygon.

Everything is exact: coordinates are integers, coefficients are
``fractions.Fraction``, and sample counts exceed a degree bound that makes
vanishing at the samples equivalent to vanishing identically.
"""

from __future__ import annotations

import itertools
import math
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "LatticePolygon",
    "EdgeData",
    "RootFactor",
    "RationalParam",
    "ImplicitizationResult",
    "polygon_from_json",
    "edge_data",
    "is_smooth",
    "build_param",
    "random_generic_param",
    "implicitize",
    "rational_moduli_dim",
    "convex_hull",
]

Point = tuple[int, int]


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Point]) -> list[Point]:
    """Strict convex hull (no collinear vertices), counterclockwise,
    starting from the lexicographically smallest point.  Integer-exact."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # all points collinear
        return [pts[0], pts[-1]]
    return hull


class LatticePolygon:
    """Convex integral polygon with a counterclockwise vertex list.

    Clockwise input is reversed with a warning; degenerate input (fewer
    than 3 vertices, non-integer coordinates, zero area, non-convexity, or
    three consecutive collinear vertices) is rejected.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices: Sequence[Point]):
        verts = [self._check_vertex(v, i) for i, v in enumerate(vertices)]
        if len(verts) < 3:
            raise ValueError(f"polygon needs at least 3 vertices, got {len(verts)}")
        if len(set(verts)) != len(verts):
            raise ValueError("polygon has repeated vertices")
        area2 = sum(
            verts[i][0] * verts[(i + 1) % len(verts)][1]
            - verts[(i + 1) % len(verts)][0] * verts[i][1]
            for i in range(len(verts))
        )
        if area2 == 0:
            raise ValueError("degenerate polygon: zero area")
        if area2 < 0:
            warnings.warn(
                "polygon vertices were clockwise; reversing to counterclockwise",
                stacklevel=2,
            )
            verts.reverse()
        count = len(verts)
        for i in range(count):
            o, a, b = verts[i], verts[(i + 1) % count], verts[(i + 2) % count]
            if _cross(o, a, b) <= 0:
                raise ValueError(
                    f"polygon is not strictly convex at vertex {(i + 1) % count}"
                )
        hull = convex_hull(verts)
        if _canonical_cycle(tuple(hull)) != _canonical_cycle(tuple(verts)):
            raise ValueError("polygon is not a simple convex cycle")
        self.vertices = tuple(verts)

    @staticmethod
    def _check_vertex(v, index: int) -> Point:
        try:
            x, y = v
        except (TypeError, ValueError):
            raise ValueError(f"vertex {index}: expected an integer pair, got {v!r}") from None
        if isinstance(x, bool) or isinstance(y, bool) or not isinstance(x, int) or not isinstance(y, int):
            raise ValueError(f"vertex {index}: coordinates must be integers, got {v!r}")
        return (x, y)

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatticePolygon):
            return NotImplemented
        return _canonical_cycle(self.vertices) == _canonical_cycle(other.vertices)

    def __hash__(self) -> int:
        return hash(_canonical_cycle(self.vertices))

    def __repr__(self) -> str:
        return f"LatticePolygon({list(self.vertices)})"

    def to_json_list(self) -> list:
        return [list(v) for v in self.vertices]

    def lattice_points(self) -> list[Point]:
        """All integer points of the polygon (boundary included), sorted."""
        verts = self.vertices
        xs = [v[0] for v in verts]
        ys = [v[1] for v in verts]
        count = len(verts)
        points = []
        for x in range(min(xs), max(xs) + 1):
            for y in range(min(ys), max(ys) + 1):
                p = (x, y)
                if all(
                    _cross(verts[i], verts[(i + 1) % count], p) >= 0 for i in range(count)
                ):
                    points.append(p)
        return points


def _canonical_cycle(verts: tuple[Point, ...]) -> tuple[Point, ...]:
    start = min(range(len(verts)), key=lambda i: verts[i])
    return verts[start:] + verts[:start]


def polygon_from_json(data) -> LatticePolygon:
    """Parse a polygon given as a JSON list of integer pairs."""
    if not isinstance(data, list):
        raise ValueError(f"polygon must be a list of integer pairs, got {type(data).__name__}")
    return LatticePolygon([tuple(v) if isinstance(v, list) else v for v in data])


@dataclass(frozen=True)
class EdgeData:
    """Primitive direction and lattice length of one polygon edge."""

    primitive: Point
    lattice_length: int

    def __post_init__(self) -> None:
        a, b = self.primitive
        if math.gcd(abs(a), abs(b)) != 1:
            raise ValueError(f"direction {self.primitive} is not primitive")
        if self.lattice_length < 1:
            raise ValueError(f"lattice length must be positive, got {self.lattice_length}")


def edge_data(polygon: LatticePolygon) -> list[EdgeData]:
    """Primitive vectors and lattice lengths of the edges, counterclockwise."""
    verts = polygon.vertices
    out = []
    for i in range(len(verts)):
        dx = verts[(i + 1) % len(verts)][0] - verts[i][0]
        dy = verts[(i + 1) % len(verts)][1] - verts[i][1]
        g = math.gcd(abs(dx), abs(dy))
        out.append(EdgeData((dx // g, dy // g), g))
    return out


def is_smooth(polygon: LatticePolygon) -> bool:
    """True when every pair of consecutive primitive edge vectors is a basis
    of the integer lattice (determinant +1 in counterclockwise order)."""
    prims = [e.primitive for e in edge_data(polygon)]
    for i in range(len(prims)):
        a, b = prims[i]
        c, d = prims[(i + 1) % len(prims)]
        if a * d - b * c != 1:
            return False
    return True


@dataclass(frozen=True)
class RootFactor:
    """One boundary point of the parameterized curve: the parameter value
    ``c_ij``, its edge, its multiplicity, and the induced exponents of the
    factor ``(t - c_ij)`` inside x(t) and y(t)."""

    value: Fraction
    edge_index: int
    multiplicity: int
    x_exponent: int
    y_exponent: int


@dataclass(frozen=True)
class RationalParam:
    """Exact rational parameterization attached to a polygon and a root
    assignment.  ``family_dimension`` counts the parameters of the family
    of such maps modulo reparameterization: 2 for the torus scaling plus
    one per boundary point, minus 3 automorphisms of the line."""

    polygon: LatticePolygon
    alpha: Fraction
    beta: Fraction
    roots: tuple[RootFactor, ...]

    def x_at(self, t: Fraction) -> Fraction:
        value = self.alpha
        for root in self.roots:
            if root.x_exponent:
                value *= (t - root.value) ** root.x_exponent
        return value

    def y_at(self, t: Fraction) -> Fraction:
        value = self.beta
        for root in self.roots:
            if root.y_exponent:
                value *= (t - root.value) ** root.y_exponent
        return value

    @property
    def root_values(self) -> list[Fraction]:
        return [root.value for root in self.roots]

    @property
    def family_dimension(self) -> int:
        if len(self.roots) < 3:
            raise ValueError(
                "automorphism group not fully broken: fewer than 3 boundary points"
            )
        return 2 + len(self.roots) - 3


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ValueError(f"expected an exact rational (int, Fraction, or string), got {value!r}")


def build_param(
    polygon: LatticePolygon,
    roots: Sequence[Sequence],
    alpha=1,
    beta=1,
) -> RationalParam:
    """Assemble the parameterization for a root assignment.

    ``roots`` holds one sequence per edge, each entry either a rational
    value (multiplicity 1) or a ``(value, multiplicity)`` pair; the
    multiplicities on edge ``i`` must sum to its lattice length.  All root
    values must be distinct across the whole polygon.
    """
    edges = edge_data(polygon)
    if len(roots) != len(edges):
        raise ValueError(
            f"need one root group per edge: {len(edges)} edges, got {len(roots)} groups"
        )
    alpha = _as_fraction(alpha)
    beta = _as_fraction(beta)
    if alpha == 0 or beta == 0:
        raise ValueError("alpha and beta must be nonzero")
    factors: list[RootFactor] = []
    for i, (edge, group) in enumerate(zip(edges, roots)):
        a, b = edge.primitive
        total = 0
        for entry in group:
            if isinstance(entry, (tuple, list)):
                value, mult = entry
                mult = int(mult)
            else:
                value, mult = entry, 1
            if mult < 1:
                raise ValueError(f"edge {i}: multiplicity must be >= 1, got {mult}")
            value = _as_fraction(value)
            factors.append(
                RootFactor(
                    value=value,
                    edge_index=i,
                    multiplicity=mult,
                    x_exponent=-mult * b,
                    y_exponent=mult * a,
                )
            )
            total += mult
        if total != edge.lattice_length:
            raise ValueError(
                f"edge {i}: multiplicities sum to {total}, lattice length is "
                f"{edge.lattice_length}"
            )
    values = [f.value for f in factors]
    if len(set(values)) != len(values):
        raise ValueError("repeated roots: all root values must be distinct")
    # the polygon closes up, so both exponent sums must vanish
    assert sum(f.x_exponent for f in factors) == 0
    assert sum(f.y_exponent for f in factors) == 0
    return RationalParam(polygon, alpha, beta, tuple(factors))


def random_generic_param(polygon: LatticePolygon, seed: int) -> RationalParam:
    """Pseudorandom simple-root parameterization, reproducible from ``seed``."""
    rng = random.Random(seed)
    edges = edge_data(polygon)
    used: set[Fraction] = set()

    def draw() -> Fraction:
        while True:
            value = Fraction(rng.randint(-120, 120), rng.randint(1, 8))
            if value not in used:
                used.add(value)
                return value

    groups = [[draw() for _ in range(edge.lattice_length)] for edge in edges]
    alpha = Fraction(rng.choice([v for v in range(-9, 10) if v]))
    beta = Fraction(rng.choice([v for v in range(-9, 10) if v]))
    return build_param(polygon, groups, alpha, beta)


@dataclass(frozen=True)
class ImplicitizationResult:
    """Certificate that the parameterized curve satisfies a polynomial
    relation supported on the polygon's lattice points."""

    newton_vertices: tuple[Point, ...]
    coefficients: dict[Point, Fraction]
    kernel_dimension: int
    samples_used: int
    generic: bool

    def to_json_dict(self) -> dict:
        return {
            "newton_polygon": [list(v) for v in self.newton_vertices],
            "relation_coefficients": {
                f"{a},{b}": str(c) for (a, b), c in sorted(self.coefficients.items())
            },
            "kernel_dimension": self.kernel_dimension,
            "samples_used": self.samples_used,
            "generic": self.generic,
        }


def _fraction_kernel(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Kernel basis of a matrix over the rationals via reduced row echelon."""
    m = [row[:] for row in rows]
    pivots: list[int] = []
    row_idx = 0
    for col in range(ncols):
        pivot_row = None
        for rr in range(row_idx, len(m)):
            if m[rr][col] != 0:
                pivot_row = rr
                break
        if pivot_row is None:
            continue
        m[row_idx], m[pivot_row] = m[pivot_row], m[row_idx]
        pv = m[row_idx][col]
        m[row_idx] = [x / pv for x in m[row_idx]]
        for rr in range(len(m)):
            if rr != row_idx and m[rr][col] != 0:
                factor = m[rr][col]
                m[rr] = [x - factor * y for x, y in zip(m[rr], m[row_idx])]
        pivots.append(col)
        row_idx += 1
        if row_idx == len(m):
            break
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis = []
    for free in free_cols:
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for prow, pcol in enumerate(pivots):
            vec[pcol] = -m[prow][free]
        basis.append(vec)
    return basis


def _degree_bound(param: RationalParam, monomials: list[Point]) -> int:
    """Degree of the cleared-denominator form of any relation candidate;
    vanishing at more sample points than this forces identical vanishing."""
    bound = 0
    for root in param.roots:
        exps = [a * root.x_exponent + b * root.y_exponent for (a, b) in monomials]
        bound += max(exps) + max(0, -min(exps))
    return bound


def _sample_values(param: RationalParam, count: int, skip: int = 0):
    banned = set(param.root_values)
    produced = 0
    skipped = 0
    for v in itertools.count(1):
        t = Fraction(v)
        if t in banned:
            continue
        if skipped < skip:
            skipped += 1
            continue
        yield t
        produced += 1
        if produced == count:
            return


def implicitize(param: RationalParam, polygon: LatticePolygon) -> ImplicitizationResult:
    """Find an exact relation with monomial support in the polygon that the
    parameterization satisfies identically, and return its Newton polygon.

    Samples strictly more parameter values than both the monomial count and
    the cleared-denominator degree bound, so the sampled kernel is exactly
    the space of identically vanishing relations; the chosen relation is
    additionally re-verified at 3 holdout samples.  Raises ``ValueError``
    when no relation exists (which signals a corrupted parameterization:
    one always exists for a root assignment built from the polygon).
    """
    if param.polygon != polygon:
        raise ValueError("parameterization was built from a different polygon")
    monomials = polygon.lattice_points()
    sample_count = max(len(monomials) + 1, _degree_bound(param, monomials) + 1)

    rows = []
    for t in _sample_values(param, sample_count):
        x = param.x_at(t)
        y = param.y_at(t)
        xpow = _power_table(x, [a for a, _ in monomials])
        ypow = _power_table(y, [b for _, b in monomials])
        rows.append([xpow[a] * ypow[b] for (a, b) in monomials])

    kernel = _fraction_kernel(rows, len(monomials))
    if not kernel:
        raise ValueError(
            "no relation supported on the polygon vanishes on the curve; "
            "the parameterization is inconsistent with the polygon"
        )
    vector = _normalize_integer(kernel[0])

    for t in _sample_values(param, 3, skip=sample_count):
        x = param.x_at(t)
        y = param.y_at(t)
        value = sum(c * x**a * y**b for c, (a, b) in zip(vector, monomials) if c)
        assert value == 0, "holdout sample does not vanish on the computed relation"

    support = [mono for coeff, mono in zip(vector, monomials) if coeff]
    hull = tuple(convex_hull(support))
    generic = len(kernel) == 1 and hull == tuple(convex_hull(polygon.vertices))
    coefficients = {
        mono: Fraction(coeff) for coeff, mono in zip(vector, monomials) if coeff
    }
    return ImplicitizationResult(
        newton_vertices=hull,
        coefficients=coefficients,
        kernel_dimension=len(kernel),
        samples_used=sample_count,
        generic=generic,
    )


def _power_table(base: Fraction, exponents: Iterable[int]) -> dict[int, Fraction]:
    table: dict[int, Fraction] = {}
    for e in set(exponents):
        table[e] = base**e
    return table


def _normalize_integer(vector: list[Fraction]) -> list[int]:
    """Scale a rational vector to a primitive integer vector with positive
    leading entry."""
    denom_lcm = 1
    for x in vector:
        if x:
            denom_lcm = denom_lcm * x.denominator // math.gcd(denom_lcm, x.denominator)
    ints = [int(x * denom_lcm) for x in vector]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    if g:
        ints = [x // g for x in ints]
    for x in ints:
        if x:
            if x < 0:
                ints = [-y for y in ints]
            break
    return ints


def rational_moduli_dim(polygon: LatticePolygon) -> int:
    """Dimension of the family of rational curves with generic boundary
    contact: two torus parameters plus one point per unit of boundary
    lattice length, minus the 3-dimensional reparameterization group."""
    total = sum(e.lattice_length for e in edge_data(polygon))
    if total < 3:
        raise ValueError("automorphism group not fully broken: boundary degree < 3")
    return 2 + total - 3
