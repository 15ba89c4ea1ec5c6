"""A fixed catalog of small (θ, z̄, v̄) instances with probe directions.

Used by the oracle cross-check, the structure checks and the CLI.  Every
entry has dimension at most 4 and at least nine probe directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .linalg import Vector, identity, unit, vec
from .plq import Indicator, PLQFunction, SupportPLQ
from .polyhedra import Polyhedron


@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    theta: PLQFunction
    z: Vector
    v: Vector
    directions: tuple[Vector, ...]


def orthant_product(k: int, j: int) -> Polyhedron:
    """ℝᵏ₋ × {0}ʲ."""
    n = k + j
    return Polyhedron(n, [(unit(n, i), 0) for i in range(k)], [(unit(n, i), 0) for i in range(k, n)])


def simplex(n: int) -> Polyhedron:
    """{x ≥ 0, Σxᵢ ≤ 1}."""
    return Polyhedron(n, [(tuple(-x for x in unit(n, i)), 0) for i in range(n)] + [((1,) * n, 1)])


def unit_simplex(n: int) -> Polyhedron:
    """{x ≥ 0, Σxᵢ = 1}."""
    return Polyhedron(n, [(tuple(-x for x in unit(n, i)), 0) for i in range(n)], [((1,) * n, 1)])


def diamond(n: int = 2) -> Polyhedron:
    """The unit ℓ¹ ball."""
    return Polyhedron(n, [(s, 1) for s in itertools.product((-1, 1), repeat=n)])


def box(n: int) -> Polyhedron:
    return Polyhedron(n, [(unit(n, i), 1) for i in range(n)] + [(tuple(-x for x in unit(n, i)), 1) for i in range(n)])


def interval(lo, hi) -> Polyhedron:
    return Polyhedron(1, [((1,), hi), ((-1,), -Fraction(lo))])


def probe_directions(m: int) -> tuple[Vector, ...]:
    """{−1,0,1}^m for m ≤ 2 (padded in dimension one), a fixed 13-point grid otherwise."""
    if m == 1:
        return tuple(vec([x]) for x in (0, 1, -1, 2, -2, "1/2", "-1/2", 3, -3))
    if m == 2:
        return tuple(vec(p) for p in itertools.product((-1, 0, 1), repeat=2))
    out = [vec([0] * m)]
    for i in range(m):
        out += [unit(m, i), tuple(-x for x in unit(m, i))]
    out += [vec([1] * m), vec([(-1) ** i for i in range(m)]), vec([i - 1 for i in range(m)]), vec([-1] + [0] * (m - 2) + [2])]
    return tuple(out)


def _inst(name, theta, z, v):
    return Instance(name, theta, vec(z), vec(v), probe_directions(theta.dim))


def example_theta() -> SupportPLQ:
    """max{z₁, z₂, z₃, z₄} = σ of the unit simplex in ℝ⁴."""
    return SupportPLQ.support(unit_simplex(4))


def catalog() -> list[Instance]:
    half = Fraction(1, 2)
    I2, I1 = identity(2), identity(1)
    rank1 = ((1, 1), (1, 1))
    return [
        _inst("indicator R- at 0, v=0", Indicator(orthant_product(1, 0)), [0], [0]),
        _inst("indicator R- at 0, v=1", Indicator(orthant_product(1, 0)), [0], [1]),
        _inst("indicator R- interior", Indicator(orthant_product(1, 0)), [-1], [0]),
        _inst("indicator R2- at 0, v=(1,0)", Indicator(orthant_product(2, 0)), [0, 0], [1, 0]),
        _inst("indicator R- x {0} at 0", Indicator(orthant_product(1, 1)), [0, 0], [0, 2]),
        _inst("indicator R2- x {0} at 0", Indicator(orthant_product(2, 1)), [0, 0, 0], [1, 0, -1]),
        _inst("indicator simplex at vertex", Indicator(simplex(2)), [0, 0], [-1, 0]),
        _inst("indicator simplex3 at vertex", Indicator(simplex(3)), [0, 0, 0], [-1, -1, 0]),
        _inst("indicator diamond at vertex, v on edge normal", Indicator(diamond()), [1, 0], [1, 1]),
        _inst("indicator diamond at vertex, v interior normal", Indicator(diamond()), [1, 0], [2, 1]),
        _inst("indicator box corner", Indicator(box(2)), [1, 1], [1, 0]),
        _inst("support [0,1] at 0, interior v", SupportPLQ.support(interval(0, 1)), [0], [half]),
        _inst("support [0,1] at 0, endpoint v", SupportPLQ.support(interval(0, 1)), [0], [0]),
        _inst("support simplex at 0, vertex v", SupportPLQ.support(simplex(2)), [0, 0], [0, 0]),
        _inst("support diamond at (1,1)", SupportPLQ.support(diamond()), [1, 1], [half, half]),
        _inst("support unit simplex R4 (strict-inclusion geometry)", example_theta(), [0, 0, 0, 0], [half, half, 0, 0]),
        _inst("support unit simplex R4 at (1,1,0,0)", example_theta(), [1, 1, 0, 0], [half, half, 0, 0]),
        _inst("support unit simplex R4 at a vertex", example_theta(), [1, 0, 0, 0], [1, 0, 0, 0]),
        _inst("indicator unit simplex R3 at a vertex", Indicator(unit_simplex(3)), [1, 0, 0], [1, 0, 0]),
        _inst("PLQ [0,1], Q=1 at 3/2", SupportPLQ(interval(0, 1), I1), ["3/2"], [1]),
        _inst("PLQ [0,1], Q=1 at 1", SupportPLQ(interval(0, 1), I1), [1], [1]),
        _inst("PLQ R+, Q=1 at 0", SupportPLQ(Polyhedron(1, [((-1,), 0)]), I1), [0], [0]),
        _inst("PLQ box, Q rank 1 at (1,0)", SupportPLQ(box(2), ((1, 0), (0, 0))), [1, 0], [1, 1]),
        _inst("PLQ box, Q = I at (2,0)", SupportPLQ(box(2), I2), [2, 0], [1, 0]),
        _inst("PLQ simplex, Q rank 1 at 0", SupportPLQ(simplex(2), rank1), [0, 0], [0, 0]),
        _inst("PLQ quadrant, Q = I at (0,-1)", SupportPLQ(Polyhedron(2, [((-1, 0), 0), ((0, -1), 0)]), I2), [0, -1], [0, 0]),
        _inst("PLQ diamond, Q = I at (1,0)", SupportPLQ(diamond(), I2), [1, 0], [1, 0]),
        _inst("PLQ R2, Q rank 1 (pure quadratic)", SupportPLQ(Polyhedron(2), ((1, 0), (0, 0))), [1, 0], [1, 0]),
    ]


__all__ = [
    "Instance",
    "box",
    "catalog",
    "diamond",
    "example_theta",
    "interval",
    "orthant_product",
    "probe_directions",
    "simplex",
    "unit_simplex",
]
