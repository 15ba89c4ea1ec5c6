"""Second-order subdifferentials ∂²θ(z̄,v̄) as finite face-pair systems.

For θ = δ_Z at (x, p) with critical cone K = T_Z(x) ∩ p^⊥:

    w ∈ ∂²θ(x,p)(u)  ⟺  some faces C1 ⊆ C2 of K have u ∈ C1 − C2 and
                          w ∈ (C2 − C1)*.

For θ = SupportPLQ(C, Q) at (z̄, v̄) with K = T_C(v̄) ∩ (z̄ − Qv̄)^⊥:

    w ∈ ∂²θ(z̄,v̄)(u)  ⟺  some faces K1 ⊇ K2 of K have w ∈ K1 − K2 and
                          Qw − u ∈ (K1 − K2)*.

Both rules depend on a pair only through its difference cone D, so the
system stores the distinct D's once and answers queries against them.
Values are kept as explicit finite unions (:class:`PolyUnion`), never
convexified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .linalg import Matrix, Vector, dot, is_zero, matvec, neg, sub, vec, zeros
from .plq import Indicator, PLQError, PLQFunction, SupportPLQ, is_subgradient
from .polyhedra import (
    Polyhedron,
    Subspace,
    covered_by,
    critical_cone,
    face_lattice,
    minkowski_diff_cone,
    span_of,
    subspace_of_polyhedron,
    tangent_cone,
)


class SecondOrderError(ValueError):
    pass


class NotASubspaceUnion(SecondOrderError):
    """∂²θ(z̄,v̄)(0) contained a piece that is not a linear subspace."""

    def __init__(self, pieces):
        super().__init__(f"{len(pieces)} non-subspace piece(s) in the zero-direction value")
        self.pieces = pieces


class PolyUnion:
    """A finite union of polyhedra in a common ambient dimension."""

    def __init__(self, dim: int, pieces: Iterable[Polyhedron] = ()):
        self.dim = dim
        self.pieces = tuple(P for P in pieces if not P.is_empty())
        if any(P.dim != dim for P in self.pieces):
            raise SecondOrderError("pieces must share the ambient dimension")

    def __iter__(self):
        return iter(self.pieces)

    def __len__(self):
        return len(self.pieces)

    def is_empty(self) -> bool:
        return not self.pieces

    def contains(self, x: Sequence) -> bool:
        x = vec(x)
        return any(P.contains(x) for P in self.pieces)

    def normalized(self) -> "PolyUnion":
        """Drop pieces that lie inside another piece (keeping one of equals)."""
        kept: list[Polyhedron] = []
        for i, P in enumerate(self.pieces):
            dominated = False
            for j, Q in enumerate(self.pieces):
                if i == j or not P.subset_of(Q):
                    continue
                if not Q.subset_of(P) or j < i:
                    dominated = True
                    break
            if not dominated:
                kept.append(P)
        return PolyUnion(self.dim, kept)

    def subset_of(self, other: "PolyUnion") -> bool:
        return all(covered_by(P, other.pieces) for P in self.pieces)

    def equals(self, other: "PolyUnion") -> bool:
        return self.dim == other.dim and self.subset_of(other) and other.subset_of(self)

    def image(self, M: Matrix, shift: Optional[Vector] = None) -> "PolyUnion":
        k = len(M)
        out = []
        for P in self.pieces:
            Q = P.image(M)
            out.append(Q.translate(shift) if shift is not None else Q)
        return PolyUnion(k, out)

    def __repr__(self) -> str:
        return f"PolyUnion(dim={self.dim}, pieces={len(self.pieces)})"


@dataclass(frozen=True, eq=False)
class FacePair:
    """Faces (inner ⊆ outer) of the critical cone and their difference cone.

    ``diff`` is inner − outer for the indicator rule and outer − inner for
    the support-PLQ rule, so in both cases it is the cone D that the rule
    quantifies over.
    """

    inner: Polyhedron
    outer: Polyhedron
    inner_index: int
    outer_index: int
    diff: Polyhedron


@dataclass(frozen=True, eq=False)
class _DiffClass:
    D: Polyhedron
    rays: tuple[Vector, ...]
    lineality: tuple[Vector, ...]


@dataclass(frozen=True, eq=False)
class FacePairSystem:
    base_cone: Polyhedron
    faces: tuple[Polyhedron, ...]
    pairs: tuple[FacePair, ...]
    mode: str  # "indicator" or "maj"
    Q: Optional[Matrix] = None
    _classes: tuple[_DiffClass, ...] = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return self.base_cone.dim

    def _check(self, x) -> Vector:
        x = vec(x)
        if len(x) != self.dim:
            raise SecondOrderError(f"expected a vector of length {self.dim}")
        return x

    def _piece(self, c: _DiffClass, u: Vector) -> Optional[Polyhedron]:
        if self.mode == "indicator":
            if not c.D.contains(u):
                return None
            # w ∈ (−D)*  ⟺  <w, g> >= 0 on rays, = 0 on lineality
            return Polyhedron(
                self.dim, [(neg(r), 0) for r in c.rays], [(l, 0) for l in c.lineality]
            )
        Q = self.Q
        ineqs = list(c.D.ineqs) + [(matvec(Q, r), dot(r, u)) for r in c.rays]
        eqs = list(c.D.eqs) + [(matvec(Q, l), dot(l, u)) for l in c.lineality]
        return Polyhedron(self.dim, ineqs, eqs)

    def value(self, u) -> PolyUnion:
        """∂²θ(z̄,v̄)(u) as a normalized finite union."""
        u = self._check(u)
        return PolyUnion(self.dim, [P for c in self._classes if (P := self._piece(c, u)) is not None]).normalized()

    def contains(self, u, w) -> bool:
        """w ∈ ∂²θ(z̄,v̄)(u), decided class by class."""
        u, w = self._check(u), self._check(w)
        for c in self._classes:
            if self.mode == "indicator":
                if (
                    c.D.contains(u)
                    and all(dot(r, w) >= 0 for r in c.rays)
                    and all(dot(l, w) == 0 for l in c.lineality)
                ):
                    return True
            else:
                y = sub(matvec(self.Q, w), u)
                if (
                    c.D.contains(w)
                    and all(dot(r, y) <= 0 for r in c.rays)
                    and all(dot(l, y) == 0 for l in c.lineality)
                ):
                    return True
        return False

    def domain_contains(self, u) -> bool:
        """∂²θ(z̄,v̄)(u) ≠ ∅."""
        u = self._check(u)
        if self.mode == "indicator":
            return any(c.D.contains(u) for c in self._classes)
        return any(not P.is_empty() for c in self._classes if (P := self._piece(c, u)) is not None)


def _build(K: Polyhedron, mode: str, Q: Optional[Matrix]) -> FacePairSystem:
    lattice = face_lattice(K)
    pairs, classes, seen = [], [], {}
    for i, small in enumerate(lattice):
        for j, big in enumerate(lattice):
            if not big.contains_face(small):
                continue
            if mode == "indicator":
                D = minkowski_diff_cone(small.polyhedron, big.polyhedron)
            else:
                D = minkowski_diff_cone(big.polyhedron, small.polyhedron)
            g = D.generators
            key = (g.rays, g.lineality)
            if key not in seen:
                seen[key] = D
                classes.append(_DiffClass(D, g.rays, g.lineality))
            pairs.append(FacePair(small.polyhedron, big.polyhedron, i, j, seen[key]))
    return FacePairSystem(
        K, tuple(f.polyhedron for f in lattice), tuple(pairs), mode, Q, tuple(classes)
    )


def soc_system_indicator(Z: Polyhedron, x, p) -> FacePairSystem:
    x, p = vec(x), vec(p)
    K = critical_cone(Z, x, p)
    return _build(K, "indicator", None)


def maj_critical_cone(C: Polyhedron, Q: Matrix, z, v) -> Polyhedron:
    z, v = vec(z), vec(v)
    r = sub(z, matvec(Q, v))
    T = tangent_cone(C, v)
    return T if is_zero(r) else T.with_rows(eqs=[(r, 0)])


def soc_system_maj(C: Polyhedron, Q: Matrix, z, v) -> FacePairSystem:
    theta = SupportPLQ(C, Q)
    if not theta.is_subgradient(z, v):
        raise SecondOrderError("v̄ is not a subgradient of θ at z̄")
    return _build(maj_critical_cone(C, theta.Q, z, v), "maj", theta.Q)


@lru_cache(maxsize=256)
def _cached_system(theta: PLQFunction, z: Vector, v: Vector) -> FacePairSystem:
    if isinstance(theta, Indicator):
        return soc_system_indicator(theta.Z, z, v)
    if not theta.is_subgradient(z, v):
        raise SecondOrderError("v̄ is not a subgradient of θ at z̄")
    return _build(maj_critical_cone(theta.C, theta.Q, z, v), "maj", theta.Q)


def soc_system(theta: PLQFunction, z, v) -> FacePairSystem:
    """The face-pair system of θ at (z, v), cached per (θ, z, v)."""
    z, v = vec(z), vec(v)
    if len(z) != theta.dim or len(v) != theta.dim:
        raise SecondOrderError("dimension mismatch")
    if not is_subgradient(theta, z, v):
        raise SecondOrderError("v̄ is not a subgradient of θ at z̄")
    return _cached_system(theta, z, v)


def soc_value(sys: FacePairSystem, u) -> PolyUnion:
    return sys.value(u)


def soc_membership(sys: FacePairSystem, u, w) -> bool:
    return sys.contains(u, w)


def soc_at_zero(theta: PLQFunction, z, v) -> list[Subspace]:
    """∂²θ(z̄,v̄)(0) as its maximal subspace pieces.

    Raises :class:`NotASubspaceUnion` if some maximal piece is not a
    subspace, which the structure theory rules out for these classes.
    """
    sys = soc_system(theta, z, v)
    value = sys.value(zeros(theta.dim))
    subspaces, bad = [], []
    for P in value:
        S = subspace_of_polyhedron(P)
        (bad if S is None else subspaces).append(P if S is None else S)
    if bad:
        raise NotASubspaceUnion(bad)
    return subspaces


def expected_zero_subspace(theta: PLQFunction, z, v) -> Subspace:
    """The closed form of ∂²θ(z̄,v̄)(0): (lin K)^⊥ for δ_Z, ker Q ∩ span K otherwise."""
    sys = soc_system(theta, z, v)
    K = sys.base_cone
    if isinstance(theta, Indicator):
        return Subspace.span(K.dim, K.generators.lineality).complement()
    return theta.kernel_of_Q().intersect(span_of(K))


__all__ = [
    "FacePair",
    "FacePairSystem",
    "NotASubspaceUnion",
    "PLQError",
    "PolyUnion",
    "SecondOrderError",
    "expected_zero_subspace",
    "maj_critical_cone",
    "soc_at_zero",
    "soc_membership",
    "soc_system",
    "soc_system_indicator",
    "soc_system_maj",
    "soc_value",
]
