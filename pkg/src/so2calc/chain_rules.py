"""First- and second-order chain rules for φ = θ∘h.

Inner maps are either explicit quadratic maps or bare point data (value,
Jacobian and component Hessians at the analysis point); the theorems only
ever consume those derivatives.  A trailing block of ``n_params`` variables
may be marked as parameters w, giving the partial rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .linalg import (
    Matrix,
    Vector,
    add,
    dot,
    feasible_point,
    is_symmetric,
    is_zero,
    mat,
    mat_add,
    mat_scale,
    matvec,
    rank,
    sub,
    transpose,
    vec,
    zero_matrix,
    zeros,
)
from .plq import DomainError, Indicator, PLQFunction, SupportPLQ
from .polyhedra import Polyhedron, Subspace, face_lattice, rel_interior_point
from .second_order import FacePairSystem, PolyUnion, soc_at_zero, soc_system


class ChainRuleError(ValueError):
    pass


class QualificationError(ChainRuleError):
    """A qualification condition required by the rule fails."""


class RankError(ChainRuleError):
    pass


# ---------------------------------------------------------------------------
# inner maps


@dataclass(frozen=True, eq=False)
class QuadraticMap:
    """h_i(x) = ½ xᵀA_i x + b_iᵀx + c_i for i = 1..m."""

    hessians: tuple[Matrix, ...]
    linear: Matrix
    constant: Vector
    n_params: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hessians", tuple(mat(A) for A in self.hessians))
        object.__setattr__(self, "linear", mat(self.linear))
        object.__setattr__(self, "constant", vec(self.constant))
        m, N = len(self.linear), self.n_total
        if len(self.hessians) != m or len(self.constant) != m:
            raise ChainRuleError("hessians, linear rows and constants must have one entry per component")
        for A in self.hessians:
            if len(A) != N or any(len(r) != N for r in A) or not is_symmetric(A):
                raise ChainRuleError("component Hessians must be symmetric and N×N")

    @property
    def m(self) -> int:
        return len(self.linear)

    @property
    def n_total(self) -> int:
        return len(self.linear[0]) if self.linear else (len(self.hessians[0]) if self.hessians else 0)

    def value(self, x) -> Vector:
        x = vec(x)
        return tuple(dot(x, matvec(A, x)) / 2 + dot(b, x) + c for A, b, c in zip(self.hessians, self.linear, self.constant))

    def jacobian(self, x) -> Matrix:
        x = vec(x)
        return tuple(add(matvec(A, x), b) for A, b in zip(self.hessians, self.linear))

    def component_hessians(self, x) -> tuple[Matrix, ...]:
        return self.hessians


@dataclass(frozen=True, eq=False)
class PointData:
    """Exact derivative data of h at a single point."""

    point: Vector
    values: Vector
    jac: Matrix
    hessians: tuple[Matrix, ...]
    n_params: int = 0

    def __post_init__(self):
        object.__setattr__(self, "point", vec(self.point))
        object.__setattr__(self, "values", vec(self.values))
        object.__setattr__(self, "jac", mat(self.jac))
        object.__setattr__(self, "hessians", tuple(mat(A) for A in self.hessians))
        N = len(self.point)
        if len(self.jac) != len(self.values) or any(len(r) != N for r in self.jac):
            raise ChainRuleError("Jacobian must be m×N")
        if len(self.hessians) != len(self.values):
            raise ChainRuleError("one Hessian per component")
        for A in self.hessians:
            if len(A) != N or not is_symmetric(A):
                raise ChainRuleError("component Hessians must be symmetric and N×N")

    @property
    def m(self) -> int:
        return len(self.values)

    @property
    def n_total(self) -> int:
        return len(self.point)

    def _at(self, x) -> None:
        if vec(x) != self.point:
            raise ChainRuleError("point data is only available at its own point")

    def value(self, x) -> Vector:
        self._at(x)
        return self.values

    def jacobian(self, x) -> Matrix:
        self._at(x)
        return self.jac

    def component_hessians(self, x) -> tuple[Matrix, ...]:
        self._at(x)
        return self.hessians


InnerMap = Union[QuadraticMap, PointData]


def linear_map(A: Sequence[Sequence], n_params: int = 0) -> QuadraticMap:
    A = mat(A)
    m, n = len(A), len(A[0])
    return QuadraticMap(tuple(zero_matrix(n, n) for _ in range(m)), A, zeros(m), n_params)


def _split(h: InnerMap, x) -> tuple[Matrix, Matrix]:
    """(∇ₓh, ∇_w h) at x."""
    J = h.jacobian(x)
    n = h.n_total - h.n_params
    return tuple(r[:n] for r in J), tuple(r[n:] for r in J)


def weighted_hessian(h: InnerMap, x, v: Vector) -> Matrix:
    """∇²⟨v,h⟩(x) = Σ v_i ∇²h_i(x) on the full variable."""
    N = h.n_total
    H = zero_matrix(N, N)
    for vi, A in zip(v, h.component_hessians(x)):
        if vi:
            H = mat_add(H, mat_scale(vi, A))
    return H


# ---------------------------------------------------------------------------
# first order


@dataclass(frozen=True)
class QCResult:
    holds: bool
    witness: Optional[Vector] = None
    multiplier: Optional[Vector] = None


def _kernel_of_adjoint(J: Matrix, m: int) -> Subspace:
    """ker ∇h(x̄)* = {v : Jᵀv = 0}."""
    if not J or not J[0]:
        return Subspace.full(m)
    return Subspace.span(m, _nullspace_T(J, m))


def _nullspace_T(J: Matrix, m: int):
    from .linalg import nullspace

    return nullspace(transpose(J), m)


def check_first_order_qc(theta: PLQFunction, h: InnerMap, x) -> QCResult:
    """∂^∞θ(h(x̄)) ∩ ker ∇ₓh(x̄)* = {0}, with a nonzero witness on failure."""
    z = h.value(x)
    Jx, _ = _split(h, x)
    try:
        S = theta.singular_subdifferential(z)
    except DomainError as exc:
        raise ChainRuleError("h(x̄) lies outside dom θ") from exc
    ker = _kernel_of_adjoint(Jx, theta.dim)
    # cone ∩ subspace: nonzero element exists iff the intersection has a ray or line
    inter = S.with_rows(eqs=[(a, 0) for a in ker.complement().basis])
    g = inter.generators
    for d in g.lineality + g.rays:
        if not is_zero(d):
            return QCResult(False, d)
    return QCResult(True)


def first_order_chain(theta: PLQFunction, h: InnerMap, x) -> Polyhedron:
    """∂φ(x̄) = ∇ₓh(x̄)* ∂θ(h(x̄))."""
    qc = check_first_order_qc(theta, h, x)
    if not qc.holds:
        raise QualificationError("the first-order qualification condition fails")
    Jx, _ = _split(h, x)
    return theta.subdifferential(h.value(x)).image(transpose(Jx))


def multiplier_set(theta: PLQFunction, h: InnerMap, x, y) -> Polyhedron:
    """M(x̄,ȳ) = {v ∈ ∂θ(h(x̄)) : ∇ₓh(x̄)*v = ȳ}."""
    y = vec(y)
    Jx, _ = _split(h, x)
    D = theta.subdifferential(h.value(x))
    cols = transpose(Jx, theta.dim)
    M = D.with_rows(eqs=[(cols[j], y[j]) for j in range(len(y))])
    return Polyhedron(M.dim, M.ineqs, M.eqs)


def multiplier_representatives(M: Polyhedron) -> list[Vector]:
    """One relative-interior point per face of M; the face-pair system of θ
    is constant on each face's relative interior, so these suffice."""
    return [rel_interior_point(f.polyhedron) for f in face_lattice(M)]


def check_second_order_qc(theta: PLQFunction, h: InnerMap, x, y) -> QCResult:
    """∂²θ(z̄,v)(0) ∩ ker ∇ₓh(x̄)* = {0} for every v in M(x̄,ȳ)."""
    z = h.value(x)
    Jx, _ = _split(h, x)
    M = multiplier_set(theta, h, x, y)
    if M.is_empty():
        raise ChainRuleError("ȳ is not a subgradient of φ at x̄")
    ker = _kernel_of_adjoint(Jx, theta.dim)
    for v in multiplier_representatives(M):
        for S in soc_at_zero(theta, z, v):
            inter = S.intersect(ker)
            if inter.basis:
                return QCResult(False, inter.basis[0], v)
    return QCResult(True)


# ---------------------------------------------------------------------------
# second order


@dataclass(frozen=True, eq=False)
class Representative:
    v: Vector
    curvature: Matrix  # rows: output coordinates, cols: direction u
    system: FacePairSystem


@dataclass(frozen=True, eq=False)
class ChainRuleResult:
    """u ↦ ⋃_v curvature_v·u + adjoint·∂²θ(z̄,v)(J u)."""

    kind: str  # "exact" or "upper_estimate"
    representatives: tuple[Representative, ...]
    jacobian: Matrix  # J = ∇ₓh(x̄), m×n
    adjoint: Matrix  # out×m; Jᵀ, or [∇ₓhᵀ; ∇_w hᵀ] for the extended partial rule
    hypotheses_verified: bool = True

    @property
    def out_dim(self) -> int:
        return len(self.adjoint)

    def _direction(self, u) -> Vector:
        u = vec(u)
        if len(u) != (len(self.jacobian[0]) if self.jacobian and self.jacobian[0] else len(u)):
            raise ChainRuleError("direction has the wrong length")
        return u

    def value(self, u) -> PolyUnion:
        u = self._direction(u)
        Ju = matvec(self.jacobian, u)
        pieces = []
        for rep in self.representatives:
            shift = matvec(rep.curvature, u)
            for P in rep.system.value(Ju):
                pieces.append(P.image(self.adjoint).translate(shift))
        return PolyUnion(self.out_dim, pieces).normalized()

    def witness(self, u, y) -> Optional[tuple[Vector, Vector]]:
        """(v, w) with y = curvature_v u + adjoint·w and w ∈ ∂²θ(z̄,v)(Ju), if any."""
        u, y = self._direction(u), vec(y)
        Ju = matvec(self.jacobian, u)
        m = len(Ju)
        for rep in self.representatives:
            target = sub(y, matvec(rep.curvature, u))
            for P in rep.system.value(Ju):
                w = feasible_point(
                    [a for a, _ in P.ineqs],
                    [b for _, b in P.ineqs],
                    [a for a, _ in P.eqs] + list(self.adjoint),
                    [b for _, b in P.eqs] + list(target),
                    m,
                )
                if w is not None:
                    return rep.v, w
        return None

    def contains(self, u, y) -> bool:
        return self.witness(u, y) is not None


def _representative(theta, h, x, v, rows: int) -> Representative:
    z = h.value(x)
    H = weighted_hessian(h, x, v)
    n = h.n_total - h.n_params
    curvature = tuple(r[:n] for r in H[:rows])
    return Representative(v, curvature, soc_system(theta, z, v))


def _unique_multiplier(theta, h, x, y) -> Vector:
    M = multiplier_set(theta, h, x, y)
    if M.is_empty():
        raise ChainRuleError("ȳ is not a subgradient of φ at x̄")
    g = M.generators
    if len(g.vertices) != 1 or g.rays or g.lineality:
        raise ChainRuleError("the multiplier set is not a singleton")
    return g.vertices[0]


def chain_full_rank(theta: PLQFunction, h: InnerMap, x, y) -> ChainRuleResult:
    """Exact rule under rank ∇ₓh(x̄) = m (parameters, if any, frozen)."""
    Jx, _ = _split(h, x)
    if rank(Jx) != h.m:
        raise RankError(f"rank ∇ₓh(x̄) = {rank(Jx)} < m = {h.m}")
    v = _unique_multiplier(theta, h, x, y)
    n = h.n_total - h.n_params
    rep = _representative(theta, h, x, v, n)
    return ChainRuleResult("exact", (rep,), Jx, transpose(Jx, n))


def chain_partial_full_rank(theta: PLQFunction, h: InnerMap, x, y) -> tuple[ChainRuleResult, ChainRuleResult]:
    """The partial rule (frozen w) and the extended partial rule, which also
    reports the w-components ∇²_{wx}⟨v̄,h⟩u + ∇_w h* ∂²θ(z̄,v̄)(∇ₓh u)."""
    par1 = chain_full_rank(theta, h, x, y)
    Jx, Jw = _split(h, x)
    v = par1.representatives[0].v
    rep = _representative(theta, h, x, v, h.n_total)
    adjoint = transpose(Jx, h.n_total - h.n_params) + transpose(Jw, h.n_params)
    par2 = ChainRuleResult("exact", (rep,), Jx, adjoint)
    return par1, par2


def chain_amenable_upper(
    theta: PLQFunction, h: InnerMap, x, y, override: bool = False, extended: bool = False
) -> ChainRuleResult:
    """Upper estimate ⋃_{v∈M(x̄,ȳ)} ∇²⟨v,h⟩u + ∇h* ∂²θ(z̄,v)(∇h u).

    Requires both qualification conditions; with ``override=True`` the
    estimate is still produced when the second-order one fails, and is
    marked as resting on an unverified hypothesis.
    """
    if not check_first_order_qc(theta, h, x).holds:
        raise QualificationError("the first-order qualification condition fails")
    qc2 = check_second_order_qc(theta, h, x, y)
    if not qc2.holds and not override:
        raise QualificationError("the second-order qualification condition fails")
    Jx, Jw = _split(h, x)
    n = h.n_total - h.n_params
    M = multiplier_set(theta, h, x, y)
    rows = h.n_total if extended else n
    reps = tuple(_representative(theta, h, x, v, rows) for v in multiplier_representatives(M))
    adjoint = transpose(Jx, n) + (transpose(Jw, h.n_params) if extended else ())
    return ChainRuleResult("upper_estimate", reps, Jx, adjoint, qc2.holds)


def direct_soc_when_available(theta: PLQFunction, x, y, u) -> PolyUnion:
    """∂²φ(x̄,ȳ)(u) for φ that is itself one of the supported θ."""
    if not isinstance(theta, (Indicator, SupportPLQ)):
        raise ChainRuleError("φ is not directly representable")
    return soc_system(theta, x, y).value(u)


__all__ = [
    "ChainRuleError",
    "ChainRuleResult",
    "InnerMap",
    "PointData",
    "QCResult",
    "QuadraticMap",
    "QualificationError",
    "RankError",
    "Representative",
    "chain_amenable_upper",
    "chain_full_rank",
    "chain_partial_full_rank",
    "check_first_order_qc",
    "check_second_order_qc",
    "direct_soc_when_available",
    "first_order_chain",
    "linear_map",
    "multiplier_representatives",
    "multiplier_set",
    "weighted_hessian",
]
