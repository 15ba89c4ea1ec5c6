"""Brute-force second-order subdifferentials from first principles.

The graph of ∂θ is a finite union of polyhedra.  Near a point p it agrees
with p + ⋃ T_j, the tangent cones of the pieces through p, so the limiting
normal cone at p is the union, over the cells of the central arrangement
cut out by all rows of those tangent cones, of the regular normal cone on
each cell.  On a cell lying in pieces J the regular normal cone is
⋂_{j∈J} N_{T_j}(y), which is constant on the cell's relative interior.

Slicing that union at (·, −u) gives D*∂θ(p)(u) = ∂²θ(z̄,v̄)(u).  None of
this uses the face-pair formulas, which is the point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .linalg import Vector, dot, is_zero, matvec, neg, vec, zeros
from .plq import Indicator, PLQFunction, SupportPLQ, is_subgradient
from .polyhedra import Arrangement, Polyhedron, Subspace, face_lattice
from .second_order import PolyUnion


class OracleError(ValueError):
    pass


def _normal_cone_rows(dim: int, tight: Sequence[Vector], eqs: Sequence[Vector]) -> Polyhedron:
    return Polyhedron.cone(dim, tight, eqs)


def graph_of_subgradient_map(theta: PLQFunction) -> PolyUnion:
    """gph ∂θ ⊂ Q^m × Q^m as a union of polyhedra in coordinates (z, v)."""
    m = theta.dim
    pad = zeros(m)
    pieces = []
    if isinstance(theta, Indicator):
        Z = theta.Z
        for f in face_lattice(Z):
            N = _normal_cone_rows(m, [Z.ineqs[i][0] for i in sorted(f.tight_rows)], [a for a, _ in Z.eqs])
            F = f.polyhedron
            ineqs = [(tuple(a) + pad, b) for a, b in F.ineqs] + [(pad + tuple(a), 0) for a, _ in N.ineqs]
            eqs = [(tuple(a) + pad, b) for a, b in F.eqs] + [(pad + tuple(a), 0) for a, _ in N.eqs]
            pieces.append(Polyhedron(2 * m, ineqs, eqs))
    elif isinstance(theta, SupportPLQ):
        C, Q = theta.C, theta.Q
        for f in face_lattice(C):
            N = _normal_cone_rows(m, [C.ineqs[i][0] for i in sorted(f.tight_rows)], [a for a, _ in C.eqs])
            F = f.polyhedron

            def lift(a):  # a·(z − Qv)
                return tuple(a) + neg(matvec(Q, a))

            ineqs = [(pad + tuple(a), b) for a, b in F.ineqs] + [(lift(a), 0) for a, _ in N.ineqs]
            eqs = [(pad + tuple(a), b) for a, b in F.eqs] + [(lift(a), 0) for a, _ in N.eqs]
            pieces.append(Polyhedron(2 * m, ineqs, eqs))
    else:
        raise OracleError(f"unsupported function class {type(theta).__name__}")
    return PolyUnion(2 * m, pieces)


def regular_normals_at(U: PolyUnion, p) -> Polyhedron:
    """Regular normals to the union at p: common normals of the pieces through p."""
    p = vec(p)
    through = [P for P in U.pieces if P.contains(p)]
    if not through:
        raise OracleError("point is not in the union")
    out = None
    for P in through:
        act, eqs = P.active_rows(p)
        N = Polyhedron.cone(U.dim, act, eqs)
        out = N if out is None else out.intersect(N)
    return Polyhedron(U.dim, out.ineqs, out.eqs)


@dataclass(frozen=True)
class Cell:
    signs: tuple[int, ...]
    witness: Vector
    incident: tuple[int, ...]
    support: Polyhedron


@dataclass(frozen=True)
class Stratification:
    hyperplanes: tuple[Vector, ...]
    cells: tuple[Cell, ...]


class LimitingNormalCone:
    """N(p; U) for a finite union U of polyhedra, as a union of cones."""

    def __init__(self, U: PolyUnion, p, extra_hyperplanes: Sequence[Sequence] = ()):
        self.dim = U.dim
        self.p = vec(p)
        self.extra = tuple(vec(h) for h in extra_hyperplanes)
        self.tangents: list[tuple[list[Vector], list[Vector]]] = []
        for P in U.pieces:
            if P.contains(self.p):
                act, eqs = P.active_rows(self.p)
                self.tangents.append(([a for a in act if not is_zero(a)], [a for a in eqs if not is_zero(a)]))
        if not self.tangents:
            raise OracleError("point is not in the union")

    def _span(self) -> Polyhedron:
        """The linear span of ⋃ T_j, which contains every cell."""
        vecs = []
        for ineqs, eqs in self.tangents:
            g = Polyhedron(self.dim, [(a, 0) for a in ineqs], [(a, 0) for a in eqs]).generators
            vecs += g.rays + g.lineality
        return Subspace.span(self.dim, vecs).as_polyhedron()

    @cached_property
    def stratification(self) -> Stratification:
        rows = [a for ineqs, eqs in self.tangents for a in ineqs + eqs] + list(self.extra)
        arr = Arrangement(self._span(), [(a, 0) for a in rows])
        specs = []
        for ineqs, eqs in self.tangents:
            specs.append(
                [(*arr.index_of(a, 0), "le") for a in ineqs] + [(*arr.index_of(a, 0), "eq") for a in eqs]
            )

        def status(s, assigned):
            complete = True
            for i, sgn, rel in s:
                if i not in assigned:
                    complete = False
                    continue
                val = assigned[i] * sgn
                if (rel == "le" and val > 0) or (rel == "eq" and val != 0):
                    return "out"
            return "in" if complete else "unknown"

        def prune(assigned):
            return all(status(s, assigned) == "out" for s in specs)

        cells = []
        H = [a for a, _ in arr.hyperplanes]
        for signs, x in arr.cells(prune):
            full = dict(enumerate(signs))
            incident = tuple(j for j, s in enumerate(specs) if status(s, full) == "in")
            ineqs = [(a if s <= 0 else neg(a), 0) for a, s in zip(H, signs) if s != 0]
            eqs = [(a, 0) for a, s in zip(H, signs) if s == 0]
            cells.append(Cell(signs, x, incident, Polyhedron(self.dim, ineqs, eqs)))
        return Stratification(tuple(H), tuple(cells))

    def _piece_normal(self, j: int, y: Vector) -> Polyhedron:
        ineqs, eqs = self.tangents[j]
        tight = [a for a in ineqs if dot(a, y) == 0]
        return Polyhedron.cone(self.dim, tight, eqs)

    @cached_property
    def cones(self) -> tuple[Polyhedron, ...]:
        """Regular normal cones of all cells, one per distinct incidence pattern."""
        out, seen = [], set()
        cache: dict = {}
        for cell in self.stratification.cells:
            key_parts = []
            for j in cell.incident:
                ineqs, _ = self.tangents[j]
                key_parts.append((j, tuple(i for i, a in enumerate(ineqs) if dot(a, cell.witness) == 0)))
            key = tuple(key_parts)
            if key in seen:
                continue
            seen.add(key)
            ineqs, eqs = [], []
            for j, tight_ids in key_parts:
                ck = (j, tight_ids)
                if ck not in cache:
                    cache[ck] = self._piece_normal(j, cell.witness)
                N = cache[ck]
                ineqs += N.ineqs
                eqs += N.eqs
            out.append(Polyhedron(self.dim, ineqs, eqs))
        return tuple(out)

    def union(self) -> PolyUnion:
        return PolyUnion(self.dim, self.cones)

    def contains(self, n) -> bool:
        n = vec(n)
        return any(N.contains(n) for N in self.cones)


def limiting_normals_at(U: PolyUnion, p, extra_hyperplanes: Sequence[Sequence] = ()) -> PolyUnion:
    return LimitingNormalCone(U, p, extra_hyperplanes).union()


class CoderivativeOracle:
    """∂²θ(z̄,v̄)(u) = {w : (w, −u) ∈ N((z̄,v̄); gph ∂θ)}."""

    def __init__(self, theta: PLQFunction, z, v, extra_hyperplanes: Sequence[Sequence] = ()):
        z, v = vec(z), vec(v)
        if not is_subgradient(theta, z, v):
            raise OracleError("(z̄, v̄) is not in the graph of ∂θ")
        self.theta = theta
        self.m = theta.dim
        self.normals = LimitingNormalCone(graph_of_subgradient_map(theta), z + v, extra_hyperplanes)

    def value(self, u) -> PolyUnion:
        u = vec(u)
        m = self.m
        pieces = []
        for N in self.normals.cones:
            ineqs = [(a[:m], dot(a[m:], u)) for a, _ in N.ineqs]
            eqs = [(a[:m], dot(a[m:], u)) for a, _ in N.eqs]
            pieces.append(Polyhedron(m, ineqs, eqs))
        return PolyUnion(m, pieces).normalized()

    def contains(self, u, w) -> bool:
        return self.normals.contains(vec(w) + neg(vec(u)))


def brute_soc(theta: PLQFunction, z, v, u, extra_hyperplanes: Sequence[Sequence] = ()) -> PolyUnion:
    return CoderivativeOracle(theta, z, v, extra_hyperplanes).value(u)


def agree(theta: PLQFunction, z, v, directions: Sequence[Sequence]) -> list[tuple[Vector, bool]]:
    """Compare the face-pair formula with the oracle on each direction."""
    from .second_order import soc_system

    sys = soc_system(theta, z, v)
    oracle = CoderivativeOracle(theta, z, v)
    return [(vec(u), sys.value(u).equals(oracle.value(u))) for u in directions]


__all__ = [
    "Cell",
    "CoderivativeOracle",
    "LimitingNormalCone",
    "OracleError",
    "Stratification",
    "agree",
    "brute_soc",
    "graph_of_subgradient_map",
    "limiting_normals_at",
    "regular_normals_at",
]
