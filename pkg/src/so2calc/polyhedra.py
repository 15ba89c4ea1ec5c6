"""Convex polyhedra and polyhedral cones with both representations.

A :class:`Polyhedron` is stored by whichever representation it was built
from; the other one is produced on demand by the double description method
and cached.  Generators are always reported in a canonical form: lineality
as an RREF basis, rays projected onto the orthogonal complement of the
lineality space and scaled to primitive integer vectors, and one point per
minimal face.  Faces, tangent/normal/critical cones, polars and Minkowski
differences are built on top of that.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .linalg import (
    ONE,
    ZERO,
    Matrix,
    Vector,
    add,
    as_rational,
    dot,
    feasible_point,
    inverse,
    is_zero,
    matvec,
    neg,
    nullspace,
    primitive,
    rank,
    row_basis,
    scale,
    sub,
    transpose,
    unit,
    vec,
    zeros,
)

DEFAULT_MAX_FACES = 4096


class PolyhedronError(ValueError):
    pass


class PointNotInSet(PolyhedronError):
    pass


class NotNormal(PolyhedronError):
    pass


class EmptySetError(PolyhedronError):
    pass


class FaceLimitExceeded(RuntimeError):
    """Face enumeration would exceed the configured cap (SO2_MAX_FACES)."""


def max_faces() -> int:
    raw = os.environ.get("SO2_MAX_FACES")
    return int(raw) if raw else DEFAULT_MAX_FACES


# ---------------------------------------------------------------------------
# double description


def _project_off(vectors: Sequence[Vector], lin: Sequence[Vector]) -> list[Vector]:
    """Orthogonal projection of each vector onto lin^⊥."""
    if not lin:
        return list(vectors)
    gram = tuple(tuple(dot(a, b) for b in lin) for a in lin)
    ginv = inverse(gram)
    out = []
    for v in vectors:
        coeffs = matvec(ginv, tuple(dot(l, v) for l in lin))
        p = v
        for c, l in zip(coeffs, lin):
            if c:
                p = sub(p, scale(c, l))
        out.append(p)
    return out


def cone_generators(
    eqs: Sequence[Vector], ineqs: Sequence[Vector], n: int
) -> tuple[tuple[Vector, ...], tuple[Vector, ...]]:
    """Lineality basis and extreme rays of {y : E y = 0, G y <= 0}.

    Incremental double description: equalities are eliminated by working in
    a nullspace basis, then inequalities are added one at a time.  A
    constraint that cuts the current lineality space turns one lineality
    direction into a ray; otherwise rays are split by sign and adjacent
    pairs are combined (combinatorial adjacency test).
    """
    N = nullspace(tuple(eqs), n) if eqs else [unit(n, i) for i in range(n)]
    k = len(N)
    if k == 0:
        return (), ()
    G = [tuple(dot(g, b) for b in N) for g in ineqs]

    lin: list[Vector] = [unit(k, i) for i in range(k)]
    rays: list[tuple[Vector, frozenset]] = []
    processed: set[int] = set()
    for idx, g in enumerate(G):
        if is_zero(g):
            continue
        vals = [dot(g, l) for l in lin]
        j = next((i for i, x in enumerate(vals) if x != 0), None)
        if j is not None:
            l0, a0 = lin[j], vals[j]
            if a0 > 0:
                l0, a0 = neg(l0), -a0
            new_lin = [
                sub(l, scale(dot(g, l) / a0, l0)) if dot(g, l) else l
                for i, l in enumerate(lin)
                if i != j
            ]
            new_rays = []
            for r, tight in rays:
                gr = dot(g, r)
                new_rays.append((primitive(sub(r, scale(gr / a0, l0))) if gr else r, tight | {idx}))
            new_rays.append((primitive(l0), frozenset(processed)))
            lin, rays = new_lin, new_rays
        else:
            signs = [dot(g, r) for r, _ in rays]
            pos = [i for i, s in enumerate(signs) if s > 0]
            negs = [i for i, s in enumerate(signs) if s < 0]
            keep = [(r, t | {idx} if s == 0 else t) for (r, t), s in zip(rays, signs) if s <= 0]
            for p in pos:
                rp, tp = rays[p]
                for q in negs:
                    rq, tq = rays[q]
                    common = tp & tq
                    if any(
                        i != p and i != q and common <= rays[i][1] for i in range(len(rays))
                    ):
                        continue
                    comb = sub(scale(signs[p], rq), scale(signs[q], rp))
                    keep.append((primitive(comb), common | {idx}))
            rays = keep
        processed.add(idx)

    def lift(c: Vector) -> Vector:
        y = zeros(n)
        for ci, b in zip(c, N):
            if ci:
                y = add(y, scale(ci, b))
        return y

    lin_out = row_basis([lift(l) for l in lin], n)
    ray_set = []
    seen = set()
    for r in _project_off([lift(r) for r, _ in rays], lin_out):
        if is_zero(r):
            continue
        r = primitive(r)
        if r not in seen:
            seen.add(r)
            ray_set.append(r)
    return tuple(lin_out), tuple(sorted(ray_set))


@dataclass(frozen=True)
class Generators:
    """conv(vertices) + cone(rays) + span(lineality)."""

    vertices: tuple[Vector, ...]
    rays: tuple[Vector, ...] = ()
    lineality: tuple[Vector, ...] = ()

    @property
    def empty(self) -> bool:
        return not self.vertices


def h_to_v(n: int, ineqs, eqs) -> Generators:
    hin = [tuple(a) + (-b,) for a, b in ineqs] + [zeros(n) + (-ONE,)]
    heq = [tuple(a) + (-b,) for a, b in eqs]
    lin, rays = cone_generators(heq, hin, n + 1)
    verts, rs = [], []
    for r in rays:
        t = r[n]
        if t > 0:
            verts.append(tuple(x / t for x in r[:n]))
        else:
            rs.append(r[:n])
    return Generators(tuple(sorted(verts)), tuple(sorted(rs)), tuple(l[:n] for l in lin))


def v_to_h(n: int, gens: Generators):
    """Inequality and equality rows (a, b) of the set generated by ``gens``."""
    if not gens.vertices:
        return ((zeros(n), -ONE),), ()
    pts = [tuple(v) + (ONE,) for v in gens.vertices] + [tuple(r) + (ZERO,) for r in gens.rays]
    lin = [tuple(l) + (ZERO,) for l in gens.lineality]
    plin, prays = cone_generators(lin, pts, n + 1)
    ineqs, eqs = [], []
    for y in prays:
        a, c = y[:n], y[n]
        if is_zero(a):
            continue
        ineqs.append((a, -c))
    for y in plin:
        a, c = y[:n], y[n]
        if is_zero(a):
            continue
        eqs.append((a, -c))
    return tuple(ineqs), tuple(eqs)


# ---------------------------------------------------------------------------
# polyhedra


class Polyhedron:
    """A convex polyhedron in Q^dim.

    Build with :meth:`from_rows`/the constructor (H-representation) or with
    :meth:`from_generators`/:meth:`cone` (V-representation).
    """

    def __init__(self, dim: int, ineqs: Iterable = (), eqs: Iterable = ()):
        self.dim = dim
        self._h = (
            tuple((vec(a), as_rational(b)) for a, b in ineqs),
            tuple((vec(a), as_rational(b)) for a, b in eqs),
        )
        for a, _ in self._h[0] + self._h[1]:
            if len(a) != dim:
                raise PolyhedronError(f"row of length {len(a)} in dimension {dim}")
        self._raw: Optional[Generators] = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_rows(cls, dim: int, rows: Iterable[tuple]) -> "Polyhedron":
        """Rows are (a, rel, b) with rel in {"le", "eq"} meaning a·x rel b."""
        ineqs, eqs = [], []
        for a, rel, b in rows:
            if rel == "le":
                ineqs.append((a, b))
            elif rel == "eq":
                eqs.append((a, b))
            elif rel == "ge":
                ineqs.append(([-as_rational(x) for x in a], -as_rational(b)))
            else:
                raise PolyhedronError(f"unknown relation {rel!r}")
        return cls(dim, ineqs, eqs)

    @classmethod
    def from_generators(
        cls, dim: int, vertices: Iterable, rays: Iterable = (), lineality: Iterable = ()
    ) -> "Polyhedron":
        g = Generators(
            tuple(vec(v) for v in vertices),
            tuple(vec(r) for r in rays),
            tuple(vec(l) for l in lineality),
        )
        for v in g.vertices + g.rays + g.lineality:
            if len(v) != dim:
                raise PolyhedronError("generator has wrong dimension")
        P = cls.__new__(cls)
        P.dim = dim
        P._h = None
        P._raw = g
        return P

    @classmethod
    def cone(cls, dim: int, rays: Iterable = (), lineality: Iterable = ()) -> "Polyhedron":
        return cls.from_generators(dim, [zeros(dim)], rays, lineality)

    @classmethod
    def whole(cls, dim: int) -> "Polyhedron":
        return cls(dim)

    @classmethod
    def origin(cls, dim: int) -> "Polyhedron":
        return cls(dim, (), [(unit(dim, i), 0) for i in range(dim)])

    @classmethod
    def point(cls, x: Sequence) -> "Polyhedron":
        x = vec(x)
        return cls(len(x), (), [(unit(len(x), i), x[i]) for i in range(len(x))])

    @classmethod
    def empty(cls, dim: int) -> "Polyhedron":
        return cls(dim, [(zeros(dim), -1)])

    @classmethod
    def nonpositive_orthant(cls, dim: int) -> "Polyhedron":
        return cls(dim, [(unit(dim, i), 0) for i in range(dim)])

    @classmethod
    def nonnegative_orthant(cls, dim: int) -> "Polyhedron":
        return cls(dim, [(neg(unit(dim, i)), 0) for i in range(dim)])

    # -- representations ----------------------------------------------------

    @property
    def ineqs(self) -> tuple[tuple[Vector, Fraction], ...]:
        return self._hrep[0]

    @property
    def eqs(self) -> tuple[tuple[Vector, Fraction], ...]:
        return self._hrep[1]

    @cached_property
    def _hrep(self):
        if self._h is not None:
            return self._h
        return v_to_h(self.dim, self._raw)

    @cached_property
    def generators(self) -> Generators:
        """Canonical minimal generators (computed once, then cached)."""
        ineqs, eqs = self._hrep
        return h_to_v(self.dim, ineqs, eqs)

    def _seed(self, gens: Generators) -> "Polyhedron":
        self.__dict__["generators"] = gens
        return self

    @property
    def vertices(self) -> tuple[Vector, ...]:
        return self.generators.vertices

    @property
    def rays(self) -> tuple[Vector, ...]:
        return self.generators.rays

    @property
    def lineality(self) -> tuple[Vector, ...]:
        return self.generators.lineality

    def rows(self) -> list[tuple[Vector, str, Fraction]]:
        return [(a, "le", b) for a, b in self.ineqs] + [(a, "eq", b) for a, b in self.eqs]

    # -- predicates ---------------------------------------------------------

    def is_empty(self) -> bool:
        if self._raw is not None and self._h is None:
            return not self._raw.vertices
        if "generators" in self.__dict__:
            return self.generators.empty
        ineqs, eqs = self._hrep
        return (
            feasible_point(
                [a for a, _ in ineqs], [b for _, b in ineqs], [a for a, _ in eqs], [b for _, b in eqs], self.dim
            )
            is None
        )

    def is_cone(self) -> bool:
        return is_cone(self)

    def contains(self, x: Sequence) -> bool:
        x = vec(x)
        if len(x) != self.dim:
            raise PolyhedronError("dimension mismatch")
        return all(dot(a, x) <= b for a, b in self.ineqs) and all(dot(a, x) == b for a, b in self.eqs)

    def _contains_ray(self, r: Vector) -> bool:
        return all(dot(a, r) <= 0 for a, _ in self.ineqs) and all(dot(a, r) == 0 for a, _ in self.eqs)

    def _contains_line(self, l: Vector) -> bool:
        return all(dot(a, l) == 0 for a, _ in self.ineqs + self.eqs)

    def _any_generators(self) -> Generators:
        if "generators" in self.__dict__ or self._raw is None:
            return self.generators
        return self._raw

    def subset_of(self, other: "Polyhedron") -> bool:
        g = self._any_generators()
        if not g.vertices:
            return True
        return (
            all(other.contains(v) for v in g.vertices)
            and all(other._contains_ray(r) for r in g.rays)
            and all(other._contains_line(l) for l in g.lineality)
        )

    def equals(self, other: "Polyhedron") -> bool:
        if self.dim != other.dim:
            return False
        return self.subset_of(other) and other.subset_of(self)

    def is_bounded(self) -> bool:
        g = self.generators
        return not g.rays and not g.lineality

    # -- derived sets -------------------------------------------------------

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if self.dim != other.dim:
            raise PolyhedronError("dimension mismatch")
        return Polyhedron(self.dim, self.ineqs + other.ineqs, self.eqs + other.eqs)

    def with_rows(self, ineqs: Iterable = (), eqs: Iterable = ()) -> "Polyhedron":
        return Polyhedron(self.dim, self.ineqs + tuple(ineqs), self.eqs + tuple(eqs))

    def image(self, M: Matrix) -> "Polyhedron":
        """{Mx : x in P} for a k×dim matrix M."""
        k = len(M)
        g = self._any_generators()
        return Polyhedron.from_generators(
            k,
            [matvec(M, v) for v in g.vertices],
            [matvec(M, r) for r in g.rays],
            [matvec(M, l) for l in g.lineality],
        )

    def preimage(self, M: Matrix, shift: Optional[Vector] = None) -> "Polyhedron":
        """{x : Mx + shift in P} for a dim×n matrix M."""
        n = len(M[0]) if M else 0
        s = shift if shift is not None else zeros(self.dim)
        Mt = transpose(M, n)

        def pull(a, b):
            return matvec(Mt, a), b - dot(a, s)

        return Polyhedron(n, [pull(a, b) for a, b in self.ineqs], [pull(a, b) for a, b in self.eqs])

    def translate(self, t: Sequence) -> "Polyhedron":
        t = vec(t)
        return Polyhedron(
            self.dim,
            [(a, b + dot(a, t)) for a, b in self.ineqs],
            [(a, b + dot(a, t)) for a, b in self.eqs],
        )

    def affine_directions(self) -> tuple[Vector, ...]:
        """Basis of the linear subspace parallel to aff P (empty for points)."""
        g = self.generators
        if not g.vertices:
            return ()
        v0 = g.vertices[0]
        vecs = [sub(v, v0) for v in g.vertices[1:]] + list(g.rays) + list(g.lineality)
        return row_basis([v for v in vecs if not is_zero(v)], self.dim)

    def affine_dimension(self) -> int:
        if self.is_empty():
            return -1
        return len(self.affine_directions())

    def recession_cone(self) -> "Polyhedron":
        return Polyhedron(self.dim, [(a, 0) for a, _ in self.ineqs], [(a, 0) for a, _ in self.eqs])

    def active_rows(self, x: Vector) -> tuple[list[Vector], list[Vector]]:
        """(active inequality normals, equality normals) at x."""
        return [a for a, b in self.ineqs if dot(a, x) == b], [a for a, _ in self.eqs]

    def __repr__(self) -> str:
        return f"Polyhedron(dim={self.dim}, ineqs={len(self.ineqs)}, eqs={len(self.eqs)})"


# ---------------------------------------------------------------------------
# cone calculus


def _require_member(P: Polyhedron, x: Vector) -> Vector:
    x = vec(x)
    if not P.contains(x):
        raise PointNotInSet(f"point {tuple(map(str, x))} is not in the set")
    return x


def tangent_cone(P: Polyhedron, x: Sequence) -> Polyhedron:
    x = _require_member(P, x)
    act, eqs = P.active_rows(x)
    return Polyhedron(P.dim, [(a, 0) for a in act], [(a, 0) for a in eqs])


def normal_cone(P: Polyhedron, x: Sequence) -> Polyhedron:
    x = _require_member(P, x)
    act, eqs = P.active_rows(x)
    return Polyhedron.cone(P.dim, act, eqs)


def polar(K: Polyhedron) -> Polyhedron:
    """K° = {v : <v, w> <= 0 for all w in K}; rays of K become its rows."""
    if not is_cone(K):
        raise PolyhedronError("polar() expects a nonempty cone")
    g = K.generators
    return Polyhedron(K.dim, [(r, 0) for r in g.rays], [(l, 0) for l in g.lineality])


def is_cone(P: Polyhedron) -> bool:
    """A nonempty polyhedron is a cone iff its only minimal-face point is 0."""
    g = P.generators
    return len(g.vertices) == 1 and is_zero(g.vertices[0])


def critical_cone(P: Polyhedron, x: Sequence, p: Sequence) -> Polyhedron:
    x = _require_member(P, x)
    p = vec(p)
    if not normal_cone(P, x).contains(p):
        raise NotNormal("p is not a normal vector at x")
    T = tangent_cone(P, x)
    if is_zero(p):
        return T
    return T.with_rows(eqs=[(p, 0)])


def minkowski_sum(P1: Polyhedron, P2: Polyhedron) -> Polyhedron:
    g1, g2 = P1._any_generators(), P2._any_generators()
    if not g1.vertices or not g2.vertices:
        return Polyhedron.empty(P1.dim)
    return Polyhedron.from_generators(
        P1.dim,
        [add(a, b) for a in g1.vertices for b in g2.vertices],
        g1.rays + g2.rays,
        g1.lineality + g2.lineality,
    )


def minkowski_diff_cone(C1: Polyhedron, C2: Polyhedron) -> Polyhedron:
    """C1 − C2 for cones, by concatenating generators."""
    g1, g2 = C1.generators, C2.generators
    return Polyhedron.cone(C1.dim, g1.rays + tuple(neg(r) for r in g2.rays), g1.lineality + g2.lineality)


def rel_interior_point(P: Polyhedron) -> Vector:
    """Vertex average plus the sum of rays: a strictly positive combination of
    all generators, hence a relative-interior point."""
    g = P.generators
    if not g.vertices:
        raise EmptySetError("empty polyhedron has no relative interior")
    k = len(g.vertices)
    x = zeros(P.dim)
    for v in g.vertices:
        x = add(x, v)
    x = scale(Fraction(1, k), x)
    for r in g.rays:
        x = add(x, r)
    return x


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^dim with a canonical (RREF) basis."""

    dim: int
    basis: tuple[Vector, ...]

    @classmethod
    def span(cls, dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        return cls(dim, tuple(row_basis([vec(v) for v in vectors if not is_zero(vec(v))], dim)))

    @classmethod
    def zero(cls, dim: int) -> "Subspace":
        return cls(dim, ())

    @classmethod
    def full(cls, dim: int) -> "Subspace":
        return cls(dim, tuple(unit(dim, i) for i in range(dim)))

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def contains(self, x: Sequence) -> bool:
        x = vec(x)
        if not self.basis:
            return is_zero(x)
        return rank(self.basis + (x,)) == len(self.basis)

    def complement(self) -> "Subspace":
        if not self.basis:
            return Subspace.full(self.dim)
        return Subspace.span(self.dim, nullspace(self.basis, self.dim))

    def intersect(self, other: "Subspace") -> "Subspace":
        if not self.basis or not other.basis:
            return Subspace.zero(self.dim)
        # x ⊥ both complements
        rows = self.complement().basis + other.complement().basis
        if not rows:
            return Subspace.full(self.dim)
        return Subspace.span(self.dim, nullspace(rows, self.dim))

    def equals(self, other: "Subspace") -> bool:
        return self.dim == other.dim and self.basis == other.basis

    def as_polyhedron(self) -> Polyhedron:
        return Polyhedron(self.dim, (), [(a, 0) for a in self.complement().basis])._seed(
            Generators((zeros(self.dim),), (), self.basis)
        )


def span_of(K: Polyhedron) -> Subspace:
    """Basis of K − K."""
    g = K.generators
    return Subspace.span(K.dim, g.rays + g.lineality)


def lineality_space(K: Polyhedron) -> Subspace:
    return Subspace.span(K.dim, K.generators.lineality)


def subspace_of_polyhedron(P: Polyhedron) -> Optional[Subspace]:
    """The subspace P if P is one, else None."""
    g = P.generators
    if not g.vertices or g.rays or any(not is_zero(v) for v in g.vertices):
        return None
    return Subspace.span(P.dim, g.lineality)


# ---------------------------------------------------------------------------
# faces


@dataclass(frozen=True)
class Face:
    polyhedron: Polyhedron
    vertex_ids: frozenset
    ray_ids: frozenset
    tight_rows: frozenset

    def contains_face(self, other: "Face") -> bool:
        return other.vertex_ids <= self.vertex_ids and other.ray_ids <= self.ray_ids


def face_lattice(P: Polyhedron, cap: Optional[int] = None) -> list[Face]:
    """All nonempty faces of P, ordered by dimension then generator sets.

    Faces are closed generator sets: a set of generators determines its
    tight inequality rows, which in turn determine every generator lying on
    them.  Starting from P, each face is refined by one extra tight row.
    """
    cap = max_faces() if cap is None else cap
    g = P.generators
    if not g.vertices:
        return []
    ineqs = P.ineqs
    V, R = g.vertices, g.rays
    vt = [frozenset(i for i, (a, b) in enumerate(ineqs) if dot(a, v) == b) for v in V]
    rt = [frozenset(i for i, (a, _) in enumerate(ineqs) if dot(a, r) == 0) for r in R]
    all_rows = frozenset(range(len(ineqs)))

    def tight_of(vs, rs):
        t = all_rows
        for i in vs:
            t &= vt[i]
        for i in rs:
            t &= rt[i]
        return t

    def closure(rows):
        return (
            frozenset(i for i in range(len(V)) if rows <= vt[i]),
            frozenset(i for i in range(len(R)) if rows <= rt[i]),
        )

    start_rows = tight_of(range(len(V)), range(len(R)))
    start = closure(start_rows)
    seen = {start: start_rows}
    queue = [start]
    while queue:
        vs, rs = queue.pop()
        rows = seen[(vs, rs)]
        for i in all_rows - rows:
            nvs = frozenset(j for j in vs if i in vt[j])
            if not nvs:
                continue
            nrs = frozenset(j for j in rs if i in rt[j])
            nrows = tight_of(nvs, nrs)
            key = closure(nrows)
            if key not in seen:
                seen[key] = nrows
                if len(seen) > cap:
                    raise FaceLimitExceeded(f"more than {cap} faces (raise SO2_MAX_FACES)")
                queue.append(key)
    faces = []
    for (vs, rs), rows in seen.items():
        fv = tuple(V[i] for i in sorted(vs))
        fr = tuple(R[i] for i in sorted(rs))
        poly = Polyhedron(
            P.dim,
            [ineqs[i] for i in sorted(all_rows - rows)],
            P.eqs + tuple(ineqs[i] for i in sorted(rows)),
        )._seed(Generators(fv, fr, g.lineality))
        faces.append(Face(poly, vs, rs, rows))
    faces.sort(key=lambda f: (len(f.vertex_ids) + len(f.ray_ids), sorted(f.vertex_ids), sorted(f.ray_ids)))
    return faces


def faces(K: Polyhedron, cap: Optional[int] = None) -> list[Polyhedron]:
    return [f.polyhedron for f in face_lattice(K, cap)]


def faces_by_subsets(K: Polyhedron) -> list[Polyhedron]:
    """Reference enumeration: make every subset of inequalities tight.

    Exponential in the number of inequalities; used to cross-check
    :func:`face_lattice` on small inputs.
    """
    from itertools import combinations

    out: list[Polyhedron] = []
    m = len(K.ineqs)
    for size in range(m + 1):
        for S in combinations(range(m), size):
            F = Polyhedron(K.dim, K.ineqs, K.eqs + tuple(K.ineqs[i] for i in S))
            if F.is_empty():
                continue
            if not any(F.equals(G) for G in out):
                out.append(F)
    return out


# ---------------------------------------------------------------------------
# hyperplane arrangements restricted to a polyhedron


def _oriented_key(a: Vector, b: Fraction) -> tuple[tuple, int]:
    """Canonical hyperplane key and the orientation (+1/-1) of (a, b)."""
    p = primitive(tuple(a) + (b,))
    first = next(x for x in p if x != 0)
    if first < 0:
        return tuple(-x for x in p), -1
    return p, 1


class Arrangement:
    """Sign-vector cells of affine hyperplanes {a·x = b} inside a base set.

    A cell is a sign vector σ (entries −1, 0, +1 for a·x − b) whose
    realisation {x in base : sign(a_i·x − b_i) = σ_i} is nonempty; each cell
    comes with a witness point.  Nonemptiness of these partially open sets
    is decided exactly by a homogenised LP: with t > 0 every strict
    inequality may be scaled to a margin of 1.
    """

    def __init__(self, base: Polyhedron, hyperplanes: Sequence[tuple[Vector, Fraction]]):
        self.base = base
        self.dim = base.dim
        keys, self.hyperplanes = {}, []
        for a, b in hyperplanes:
            if is_zero(a):
                continue
            k, _ = _oriented_key(a, b)
            if k not in keys:
                keys[k] = len(self.hyperplanes)
                self.hyperplanes.append((k[:-1], k[-1]))
        self._index = keys
        # hyperplanes that are constant on aff(base) get a fixed sign
        self.fixed: dict[int, int] = {}
        if not base.is_empty():
            dirs = base.affine_directions()
            x0 = base.vertices[0]
            for i, (a, b) in enumerate(self.hyperplanes):
                if all(dot(a, d) == 0 for d in dirs):
                    d0 = dot(a, x0) - b
                    self.fixed[i] = (d0 > 0) - (d0 < 0)

    def index_of(self, a: Vector, b: Fraction) -> tuple[int, int]:
        k, sgn = _oriented_key(a, b)
        return self._index[k], sgn

    def _witness(self, assigned: dict[int, int]) -> Optional[Vector]:
        n = self.dim
        A_ub, b_ub, A_eq, b_eq = [], [], [], []
        for a, b in self.base.ineqs:
            A_ub.append(tuple(a) + (-b,))
            b_ub.append(ZERO)
        for a, b in self.base.eqs:
            A_eq.append(tuple(a) + (-b,))
            b_eq.append(ZERO)
        A_ub.append(zeros(n) + (-ONE,))
        b_ub.append(-ONE)
        for i, s in assigned.items():
            a, b = self.hyperplanes[i]
            row = tuple(a) + (-b,)
            if s == 0:
                A_eq.append(row)
                b_eq.append(ZERO)
            elif s < 0:
                A_ub.append(row)
                b_ub.append(-ONE)
            else:
                A_ub.append(tuple(-x for x in row))
                b_ub.append(-ONE)
        y = feasible_point(A_ub, b_ub, A_eq, b_eq, n + 1)
        if y is None:
            return None
        return tuple(x / y[n] for x in y[:n])

    def _sign(self, i: int, x: Vector) -> int:
        a, b = self.hyperplanes[i]
        d = dot(a, x) - b
        return (d > 0) - (d < 0)

    def cells(self, prune=None) -> list[tuple[tuple[int, ...], Vector]]:
        """All cells, optionally pruned.

        ``prune(assigned)`` may return True to drop a partial sign vector
        (and every cell extending it).
        """
        out: list[tuple[tuple[int, ...], Vector]] = []
        start = self._witness({})
        if start is None:
            return out
        H = len(self.hyperplanes)

        def rec(k: int, assigned: dict[int, int], point: Vector):
            if prune is not None and prune(assigned):
                return
            if k == H:
                out.append((tuple(assigned[i] for i in range(H)), point))
                return
            if k in self.fixed:
                nxt = dict(assigned)
                nxt[k] = self.fixed[k]
                rec(k + 1, nxt, point)
                return
            here = self._sign(k, point)
            for s in (-1, 0, 1):
                nxt = dict(assigned)
                nxt[k] = s
                if s == here:
                    rec(k + 1, nxt, point)
                else:
                    w = self._witness(nxt)
                    if w is not None:
                        rec(k + 1, nxt, w)

        rec(0, {}, start)
        return out


def covered_by(P: Polyhedron, pieces: Sequence[Polyhedron]) -> bool:
    """Decide P ⊆ ⋃ pieces exactly.

    Every piece is a union of cells of the arrangement of all piece rows, so
    it suffices to check one witness point per cell of P.  The search stops
    early once a partial sign vector already places the cell inside (or
    outside) each piece.
    """
    if P.is_empty():
        return True
    if any(P.subset_of(Q) for Q in pieces):
        return True
    relevant = [Q for Q in pieces if not P.intersect(Q).is_empty()]
    if not relevant:
        return False
    rows = []
    for Q in relevant:
        rows += [(a, b) for a, b in Q.ineqs] + [(a, b) for a, b in Q.eqs]
    arr = Arrangement(P, rows)
    specs = []
    for Q in relevant:
        s = [(*arr.index_of(a, b), "le") for a, b in Q.ineqs if not is_zero(a)]
        s += [(*arr.index_of(a, b), "eq") for a, b in Q.eqs if not is_zero(a)]
        trivial_out = any(is_zero(a) and b < 0 for a, b in Q.ineqs) or any(
            is_zero(a) and b != 0 for a, b in Q.eqs
        )
        specs.append(None if trivial_out else s)

    def piece_status(s, assigned):
        complete = True
        for i, sgn, rel in s:
            if i not in assigned:
                complete = False
                continue
            val = assigned[i] * sgn
            if (rel == "le" and val > 0) or (rel == "eq" and val != 0):
                return "out"
        return "in" if complete else "unknown"

    def status(assigned):
        seen = {piece_status(s, assigned) for s in specs if s is not None}
        if "in" in seen:
            return "in"
        return "unknown" if "unknown" in seen else "out"

    uncovered = []

    def prune(assigned):
        if uncovered:
            return True
        st = status(assigned)
        if st == "in":
            return True
        if st == "out":
            uncovered.append(dict(assigned))
            return True
        return False

    arr.cells(prune)
    return not uncovered
