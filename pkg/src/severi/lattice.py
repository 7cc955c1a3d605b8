"""Exact arithmetic on the Picard lattice of a Hirzebruch surface.

The surface ``Sigma_n`` (n >= 0) is the ruled rational surface whose Picard
group is freely generated by the fiber class ``F`` and the section at
infinity ``Linf``, with intersection form ``F.F = 0``, ``Linf.Linf = -n``,
``F.Linf = 1``.  Everything here is expressed in the effective-cone basis
``(L0, F)`` where ``L0 = Linf + n*F`` is the positive section, so
``L0.L0 = n`` and ``L0.F = 1``.

All quantities are exact unbounded integers; the closed-form genus and
dimension formulas divide by two only after an explicit parity check, since
a parity failure would mean the formula itself was applied out of domain.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "Surface",
    "DivisorClass",
    "SeveriNumerology",
    "l0_class",
    "fiber_class",
    "linf_class",
    "intersect",
    "canonical_class",
    "smooth_genus",
    "severi_numerology",
    "dim_bound_severi",
    "dim_bound_tangency",
]


@dataclass(frozen=True, order=True)
class Surface:
    """The Hirzebruch surface ``Sigma_n``, carrying only its index ``n``."""

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"Hirzebruch index must be a non-negative integer, got {self.n!r}")


@dataclass(frozen=True)
class DivisorClass:
    """The class ``d*L0 + k*F`` in ``Pic(Sigma_n)``.

    ``d`` and ``k`` may be any integers; effectivity (for curves avoiding
    the section at infinity) means ``d >= 0`` and ``k >= 0``.
    """

    surface: Surface
    d: int
    k: int

    def __post_init__(self) -> None:
        for name in ("d", "k"):
            if not isinstance(getattr(self, name), int):
                raise ValueError(f"coefficient {name} must be an integer")

    @classmethod
    def from_linf_basis(cls, surface: Surface, d: int, k_inf: int) -> "DivisorClass":
        """Build from coefficients ``d*Linf + k_inf*F``."""
        return cls(surface, d, k_inf - surface.n * d)

    def to_linf_basis(self) -> tuple[int, int]:
        """Coefficients of this class in the ``(Linf, F)`` basis."""
        return (self.d, self.k + self.surface.n * self.d)

    @property
    def is_effective(self) -> bool:
        """Effectivity test for classes of curves not containing ``Linf``."""
        return self.d >= 0 and self.k >= 0

    def dot(self, other: "DivisorClass") -> int:
        return intersect(self, other)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        _require_same_surface(self, other)
        return DivisorClass(self.surface, self.d + other.d, self.k + other.k)

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        _require_same_surface(self, other)
        return DivisorClass(self.surface, self.d - other.d, self.k - other.k)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.surface, -self.d, -self.k)

    def __rmul__(self, scalar: int) -> "DivisorClass":
        if not isinstance(scalar, int):
            return NotImplemented
        return DivisorClass(self.surface, scalar * self.d, scalar * self.k)

    def __repr__(self) -> str:
        return f"DivisorClass(n={self.surface.n}, {self.d}*L0 + {self.k}*F)"


def l0_class(surface: Surface) -> DivisorClass:
    return DivisorClass(surface, 1, 0)


def fiber_class(surface: Surface) -> DivisorClass:
    return DivisorClass(surface, 0, 1)


def linf_class(surface: Surface) -> DivisorClass:
    """The section at infinity, ``Linf = L0 - n*F``."""
    return DivisorClass(surface, 1, -surface.n)


def _require_same_surface(a: DivisorClass, b: DivisorClass) -> None:
    if a.surface != b.surface:
        raise ValueError(f"surface mismatch: n={a.surface.n} vs n={b.surface.n}")


def _exact_half(value: int) -> int:
    # Every genus/dimension formula below is provably even before the /2;
    # an odd value indicates misuse, not a rounding situation.
    if value % 2:
        raise ArithmeticError(f"parity violation: {value} is odd, exact halving impossible")
    return value // 2


def intersect(a: DivisorClass, b: DivisorClass) -> int:
    """Intersection number of two divisor classes on the same surface.

    In the ``(L0, F)`` basis the form is ``(d,k).(d',k') = d*d'*n + d*k' + k*d'``.
    """
    _require_same_surface(a, b)
    return a.d * b.d * a.surface.n + a.d * b.k + a.k * b.d


def canonical_class(surface: Surface) -> DivisorClass:
    """The canonical class ``K = -(L0 + Linf + 2F)``, i.e. ``(-2, n-2)``."""
    return DivisorClass(surface, -2, surface.n - 2)


def smooth_genus(c: DivisorClass) -> int:
    """Genus of a smooth curve of class ``d*L0 + k*F``: ``(d-1)(dn+2k-2)/2``.

    Agrees with adjunction ``1 + (C.C + C.K)/2``; raises for non-effective
    input.
    """
    if not c.is_effective:
        raise ValueError(f"class {c} is not effective, genus formula does not apply")
    return _exact_half((c.d - 1) * (c.d * c.surface.n + 2 * c.k - 2))


@dataclass(frozen=True)
class SeveriNumerology:
    """All closed-form counts attached to genus-``g`` nodal curves of class
    ``d*L0 + k*F`` on ``Sigma_n``.

    ``delta`` is the number of prescribed nodes, ``delta_prime`` the node
    count of the maximally degenerate curve (a union of d sections and k
    fibers), ``r_max`` the largest order of an irreducible node marking on
    that curve.
    """

    surface: Surface
    d: int
    k: int
    g: int
    delta: int
    delta_prime: int
    dim_lin_sys: int
    dim_severi: int
    r_max: int


def severi_numerology(surface: Surface, d: int, k: int, g: int) -> SeveriNumerology:
    """Evaluate every count for the family ``(n, d, k, g)``.

    Raises ``ValueError`` when ``d < 1``, ``k < 0``, or ``g`` falls outside
    ``0..smooth_genus``.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if g < 0:
        raise ValueError(f"genus must be >= 0, got {g}")
    n = surface.n
    g_max = smooth_genus(DivisorClass(surface, d, k))
    if g > g_max:
        raise ValueError(f"genus exceeds arithmetic genus: g={g} > {g_max}")
    delta = g_max - g
    delta_prime = d * k + n * _exact_half(d * (d - 1))
    dim_lin_sys = _exact_half((d + 1) * (n * d + 2 * k + 2)) - 1
    dim_severi = n * d + 2 * k + 2 * d + g - 1
    r_max = k * (d - 1) + n * _exact_half(d * (d - 1)) - (d - 1)
    assert dim_lin_sys - delta == dim_severi
    assert delta_prime - r_max == d + k - 1
    return SeveriNumerology(
        surface=surface,
        d=d,
        k=k,
        g=g,
        delta=delta,
        delta_prime=delta_prime,
        dim_lin_sys=dim_lin_sys,
        dim_severi=dim_severi,
        r_max=r_max,
    )


def dim_bound_severi(c: DivisorClass, g: int) -> int:
    """Upper bound ``-C.K + g - 1`` for families of reduced genus-``g``
    curves of class ``c``."""
    if not c.is_effective:
        raise ValueError(f"class {c} is not effective")
    if g < 0:
        raise ValueError(f"genus must be >= 0, got {g}")
    return -intersect(c, canonical_class(c.surface)) + g - 1


def dim_bound_tangency(c: DivisorClass, g: int, l_dot_c: int) -> int:
    """Upper bound ``-C.K + g - 1 - L.C`` for families constrained along a
    fixed smooth curve ``L`` with total contact order ``L.C``.

    For ``L = L0 + Linf`` this collapses to ``2d + g - 1``.
    """
    if l_dot_c < 0:
        raise ValueError(f"L.C must be >= 0, got {l_dot_c}")
    return -intersect(c, canonical_class(c.surface)) + g - 1 - l_dot_c
