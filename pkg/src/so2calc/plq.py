"""Outer functions θ: polyhedral indicators and support-type PLQ functions.

``SupportPLQ(C, Q)`` is θ(z) = sup over v in C of <v,z> − ½<v,Qv> with C a
nonempty polyhedron and Q symmetric positive semidefinite.  With Q = 0 this
is the support function σ_C, which covers every convex piecewise linear
positively homogeneous θ used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Union

from .linalg import (
    Matrix,
    Vector,
    dot,
    is_psd,
    is_symmetric,
    matvec,
    mat,
    nullspace,
    quad_form,
    sub,
    vec,
    zero_matrix,
)
from .polyhedra import (
    Polyhedron,
    Subspace,
    face_lattice,
    normal_cone,
    polar,
)

ExtendedReal = Union[Fraction, float]
INF = math.inf


class PLQError(ValueError):
    pass


class DomainError(PLQError):
    """The point lies outside dom θ."""


def _check_dim(theta, z) -> Vector:
    z = vec(z)
    if len(z) != theta.dim:
        raise PLQError(f"expected a vector of length {theta.dim}, got {len(z)}")
    return z


@dataclass(frozen=True, eq=False)
class Indicator:
    """δ_Z, the indicator function of a nonempty polyhedron Z."""

    Z: Polyhedron

    def __post_init__(self):
        if self.Z.is_empty():
            raise PLQError("Z must be nonempty")

    @property
    def dim(self) -> int:
        return self.Z.dim

    def evaluate(self, z) -> ExtendedReal:
        z = _check_dim(self, z)
        return Fraction(0) if self.Z.contains(z) else INF

    def domain(self) -> Polyhedron:
        return self.Z

    def subdifferential(self, z) -> Polyhedron:
        z = _check_dim(self, z)
        if not self.Z.contains(z):
            raise DomainError("z is outside dom θ")
        return normal_cone(self.Z, z)

    def singular_subdifferential(self, z) -> Polyhedron:
        return self.subdifferential(z)

    def affine_hull_direction_space(self, z) -> Subspace:
        return Subspace.span(self.dim, self.subdifferential(z).affine_directions())


@dataclass(frozen=True, eq=False)
class SupportPLQ:
    """θ(z) = sup_{v∈C} <v,z> − ½<v,Qv>."""

    C: Polyhedron
    Q: Matrix

    def __post_init__(self):
        Q = mat(self.Q) if self.Q else zero_matrix(self.C.dim, self.C.dim)
        object.__setattr__(self, "Q", Q)
        if len(Q) != self.C.dim or any(len(r) != self.C.dim for r in Q):
            raise PLQError("Q must be square with the dimension of C")
        if not is_symmetric(Q):
            raise PLQError("Q must be symmetric")
        if not is_psd(Q):
            raise PLQError("Q must be positive semidefinite")
        if self.C.is_empty():
            raise PLQError("C must be nonempty")

    @classmethod
    def support(cls, C: Polyhedron) -> "SupportPLQ":
        return cls(C, zero_matrix(C.dim, C.dim))

    @property
    def dim(self) -> int:
        return self.C.dim

    @property
    def is_piecewise_linear(self) -> bool:
        return all(x == 0 for row in self.Q for x in row)

    # -- structure --------------------------------------------------------

    @cached_property
    def _escape_cone(self) -> Polyhedron:
        """rec C ∩ ker Q: directions along which the objective is linear."""
        rec = self.C.recession_cone()
        return rec.with_rows(eqs=[(row, 0) for row in self.Q if any(row)])

    @cached_property
    def _face_data(self):
        out = []
        for f in face_lattice(self.C):
            rows = [self.C.ineqs[i][0] for i in sorted(f.tight_rows)]
            eqs = [a for a, _ in self.C.eqs]
            N = Polyhedron.cone(self.dim, rows, eqs)
            out.append((f.polyhedron, N))
        return out

    def argmax_pieces(self, z) -> list[Polyhedron]:
        """Face-wise pieces {v in F : z − Qv ∈ N_C(ri F)} of the argmax set."""
        z = _check_dim(self, z)
        pieces = []
        for F, N in self._face_data:
            ineqs = [(tuple(-x for x in matvec(self.Q, a)), -dot(a, z)) for a, _ in N.ineqs]
            eqs = [(tuple(-x for x in matvec(self.Q, a)), -dot(a, z)) for a, _ in N.eqs]
            P = F.with_rows(ineqs, eqs)
            if not P.is_empty():
                pieces.append(P)
        return pieces

    def in_domain(self, z) -> bool:
        z = _check_dim(self, z)
        g = self._escape_cone.generators
        return all(dot(r, z) <= 0 for r in g.rays) and all(dot(l, z) == 0 for l in g.lineality)

    def evaluate(self, z) -> ExtendedReal:
        z = _check_dim(self, z)
        if not self.in_domain(z):
            return INF
        pieces = self.argmax_pieces(z)
        v = pieces[0].vertices[0]
        return dot(v, z) - quad_form(self.Q, v) / 2

    def domain(self) -> Polyhedron:
        return polar(self._escape_cone)

    def subdifferential(self, z) -> Polyhedron:
        z = _check_dim(self, z)
        if not self.in_domain(z):
            raise DomainError("z is outside dom θ")
        pieces = self.argmax_pieces(z)
        if len(pieces) == 1:
            return pieces[0]
        vs, rs, ls = [], [], []
        for P in pieces:
            g = P.generators
            vs += g.vertices
            rs += g.rays
            ls += g.lineality
        # the argmax of a concave function over a convex set is convex
        out = Polyhedron.from_generators(self.dim, vs, rs, ls)
        return Polyhedron(self.dim, out.ineqs, out.eqs)

    def singular_subdifferential(self, z) -> Polyhedron:
        z = _check_dim(self, z)
        D = self.domain()
        if not D.contains(z):
            raise DomainError("z is outside dom θ")
        return normal_cone(D, z)

    def affine_hull_direction_space(self, z) -> Subspace:
        return Subspace.span(self.dim, self.subdifferential(z).affine_directions())

    def is_subgradient(self, z, v) -> bool:
        """v ∈ ∂θ(z), i.e. z − Qv ∈ N_C(v)."""
        z, v = _check_dim(self, z), _check_dim(self, v)
        if not self.C.contains(v):
            return False
        return normal_cone(self.C, v).contains(sub(z, matvec(self.Q, v)))

    def kernel_of_Q(self) -> Subspace:
        return Subspace.span(self.dim, nullspace(self.Q, self.dim))


PLQFunction = Union[Indicator, SupportPLQ]


def is_subgradient(theta: PLQFunction, z, v) -> bool:
    if isinstance(theta, SupportPLQ):
        return theta.is_subgradient(z, v)
    z = _check_dim(theta, z)
    v = _check_dim(theta, v)
    return theta.Z.contains(z) and normal_cone(theta.Z, z).contains(v)


__all__ = [
    "DomainError",
    "ExtendedReal",
    "INF",
    "Indicator",
    "PLQError",
    "PLQFunction",
    "SupportPLQ",
    "is_subgradient",
]
