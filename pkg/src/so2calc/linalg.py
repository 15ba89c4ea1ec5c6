"""Exact rational linear algebra.

Vectors are tuples of :class:`fractions.Fraction`, matrices are tuples of
row tuples.  Everything here is a pure function over immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


class LinalgError(ValueError):
    pass


def as_rational(x) -> Fraction:
    """Convert ints, strings ("p/q", "p") and Fractions to a Fraction.

    Floats are rejected: they almost never hold the value the user meant.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            p, q = s.split("/", 1)
            if int(q) == 0:
                raise ZeroDivisionError(f"zero denominator in {x!r}")
            return Fraction(int(p), int(q))
        return Fraction(int(s))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def rational_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vec(entries: Iterable) -> Vector:
    return tuple(as_rational(e) for e in entries)


def mat(rows: Iterable[Iterable]) -> Matrix:
    out = tuple(vec(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise LinalgError("ragged matrix")
    return out


def zeros(n: int) -> Vector:
    return (ZERO,) * n


def zero_matrix(rows: int, cols: int) -> Matrix:
    return tuple(zeros(cols) for _ in range(rows))


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def unit(n: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def shape(M: Matrix, cols: Optional[int] = None) -> tuple[int, int]:
    if not M:
        return 0, (cols or 0)
    return len(M), len(M[0])


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    if len(a) != len(b):
        raise LinalgError(f"dimension mismatch {len(a)} vs {len(b)}")
    return sum((x * y for x, y in zip(a, b)), ZERO)


def add(a: Vector, b: Vector) -> Vector:
    if len(a) != len(b):
        raise LinalgError(f"dimension mismatch {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Vector, b: Vector) -> Vector:
    if len(a) != len(b):
        raise LinalgError(f"dimension mismatch {len(a)} vs {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Vector) -> Vector:
    c = as_rational(c)
    return tuple(c * x for x in a)


def neg(a: Vector) -> Vector:
    return tuple(-x for x in a)


def is_zero(a: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in a)


def transpose(M: Matrix, rows: Optional[int] = None) -> Matrix:
    """Transpose; ``rows`` gives the column count of an empty input."""
    if not M:
        return tuple(() for _ in range(rows or 0))
    return tuple(zip(*M))


def matvec(M: Matrix, x: Vector) -> Vector:
    return tuple(dot(row, x) for row in M)


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if A and B and len(A[0]) != len(B):
        raise LinalgError("inner dimensions differ")
    if not B:
        return tuple(() for _ in A)
    Bt = transpose(B)
    return tuple(tuple(dot(r, c) for c in Bt) for r in A)


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return tuple(add(a, b) for a, b in zip(A, B))


def mat_scale(c, A: Matrix) -> Matrix:
    return tuple(scale(c, r) for r in A)


def columns_to_matrix(cols: Sequence[Vector], n: int) -> Matrix:
    """Matrix whose columns are ``cols`` (n rows, possibly zero columns)."""
    if not cols:
        return tuple(() for _ in range(n))
    return transpose(tuple(cols))


def quad_form(H: Matrix, u: Vector) -> Fraction:
    return dot(u, matvec(H, u))


def primitive(v: Sequence[Fraction]) -> Vector:
    """Positive rescaling of ``v`` to coprime integer entries.

    Used as a canonical form for rays and normals.
    """
    if is_zero(v):
        return tuple(ZERO for _ in v)
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for k in ints:
        g = gcd(g, k)
    return tuple(Fraction(k // g) for k in ints)


def rref(M: Matrix, ncols: Optional[int] = None) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    rows = [list(r) for r in M]
    n = len(rows[0]) if rows else (ncols or 0)
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in rows[:r]), tuple(pivots)


def rank(M: Matrix) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def row_basis(vectors: Sequence[Vector], n: int) -> tuple[Vector, ...]:
    """Canonical (RREF) basis of the span of ``vectors`` in Q^n."""
    if not vectors:
        return ()
    return rref(tuple(vectors), n)[0]


def nullspace(M: Matrix, ncols: Optional[int] = None) -> list[Vector]:
    """Rational basis of {v : Mv = 0}, canonical for the row space of M."""
    n = len(M[0]) if M else ncols
    if n is None:
        raise LinalgError("column count unknown for empty matrix")
    R, piv = rref(M, n)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row, p in zip(R, piv):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class AffineSolution:
    point: Vector
    directions: tuple[Vector, ...]

    def contains(self, A: Matrix, b: Vector) -> bool:
        return matvec(A, self.point) == tuple(b) and all(
            is_zero(matvec(A, d)) for d in self.directions
        )


def solve_affine(A: Matrix, b: Sequence, ncols: Optional[int] = None) -> Optional[AffineSolution]:
    """Solve Ax = b.  Returns None when the system is inconsistent."""
    b = vec(b)
    n = len(A[0]) if A else ncols
    if n is None:
        raise LinalgError("column count unknown for empty matrix")
    if len(A) != len(b):
        raise LinalgError("right-hand side has wrong length")
    aug = tuple(tuple(row) + (bi,) for row, bi in zip(A, b))
    if not aug:
        return AffineSolution(zeros(n), tuple(unit(n, i) for i in range(n)))
    R, piv = rref(aug, n + 1)
    if n in piv:
        return None
    x = [ZERO] * n
    for row, p in zip(R, piv):
        x[p] = row[n]
    return AffineSolution(tuple(x), tuple(nullspace(A, n)))


def inverse(M: Matrix) -> Matrix:
    n = len(M)
    aug = tuple(tuple(r) + identity(n)[i] for i, r in enumerate(M))
    R, piv = rref(aug, 2 * n)
    if piv[:n] != tuple(range(n)) or len(piv) < n or any(p >= n for p in piv[:n]):
        raise LinalgError("singular matrix")
    return tuple(tuple(r[n:]) for r in R)


def det(M: Matrix) -> Fraction:
    """Determinant by plain Gaussian elimination."""
    rows = [list(r) for r in M]
    n = len(rows)
    d = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if p is None:
            return ZERO
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            d = -d
        d *= rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] / rows[c][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return d


def is_symmetric(H: Matrix) -> bool:
    n = len(H)
    return all(len(r) == n for r in H) and all(
        H[i][j] == H[j][i] for i in range(n) for j in range(i + 1, n)
    )


def restrict(H: Matrix, B: Sequence[Vector]) -> Matrix:
    """The matrix BᵀHB of the quadratic form of H on span(B)."""
    HB = [matvec(H, b) for b in B]
    return tuple(tuple(dot(bi, hbj) for hbj in HB) for bi in B)


def _check_basis(H: Matrix, B: Sequence[Vector]) -> None:
    if not is_symmetric(H):
        raise LinalgError("matrix is not symmetric")
    if B and rank(tuple(B)) != len(B):
        raise LinalgError("subspace basis is linearly dependent")


def definiteness_witness(H: Matrix, B: Sequence[Vector]) -> Optional[Vector]:
    """A nonzero u in span(B) with uᵀHu <= 0, or None if H is PD there.

    Walks the leading principal minors of R = BᵀHB.  When the k-th minor is
    the first nonpositive one, y = (-R_{k-1}^{-1} r, 1) gives yᵀR_k y equal to
    the ratio of minors, which is <= 0.
    """
    _check_basis(H, B)
    R = restrict(H, B)
    k_dim = len(R)
    prev = ONE
    for k in range(1, k_dim + 1):
        sub_k = tuple(row[:k] for row in R[:k])
        dk = det(sub_k)
        if dk <= 0 or prev <= 0:
            if k == 1:
                y = (ONE,)
            else:
                lead = tuple(row[: k - 1] for row in R[: k - 1])
                r = tuple(R[i][k - 1] for i in range(k - 1))
                y = neg(matvec(inverse(lead), r)) + (ONE,)
            coeffs = y + zeros(k_dim - k)
            u = zeros(len(B[0]))
            for c, b in zip(coeffs, B):
                if c:
                    u = add(u, scale(c, b))
            return u
        prev = dk
    return None


def positive_definite_on_subspace(H: Matrix, B: Sequence[Vector]) -> bool:
    """True iff uᵀHu > 0 for every nonzero u in span(B).

    Decided by the leading principal minors of BᵀHB; an empty basis is
    vacuously positive definite.
    """
    return definiteness_witness(H, B) is None


def is_psd(Q: Matrix) -> bool:
    """Exact positive-semidefiniteness by symmetric elimination.

    A zero pivot is allowed only when its whole remaining row is zero.
    """
    if not is_symmetric(Q):
        return False
    A = [list(r) for r in Q]
    n = len(A)
    active = list(range(n))
    while active:
        # pick any positive diagonal; zero diagonals need zero rows
        p = None
        for i in active:
            if A[i][i] < 0:
                return False
            if A[i][i] > 0 and p is None:
                p = i
        if p is None:
            return all(A[i][j] == 0 for i in active for j in active)
        active.remove(p)
        piv = A[p][p]
        for i in active:
            f = A[i][p] / piv
            if f:
                for j in active:
                    A[i][j] -= f * A[p][j]
    return True


def pseudo_solve(A: Matrix, b: Vector) -> Optional[Vector]:
    """Any solution of Ax = b (None if inconsistent)."""
    sol = solve_affine(A, b, len(A[0]) if A else len(b))
    return None if sol is None else sol.point


def subspace_intersection(B1: Sequence[Vector], B2: Sequence[Vector], n: int) -> tuple[Vector, ...]:
    """Basis of span(B1) ∩ span(B2) in Q^n."""
    if not B1 or not B2:
        return ()
    # x = B1 a = B2 b  <=>  [B1, -B2] (a, b) = 0
    k1 = len(B1)
    M = tuple(
        tuple(B1[j][i] for j in range(k1)) + tuple(-b[i] for b in B2) for i in range(n)
    )
    out = []
    for sol in nullspace(M, k1 + len(B2)):
        x = zeros(n)
        for c, b in zip(sol[:k1], B1):
            if c:
                x = add(x, scale(c, b))
        out.append(x)
    return row_basis(out, n)


def orthogonal_complement(B: Sequence[Vector], n: int) -> tuple[Vector, ...]:
    if not B:
        return tuple(unit(n, i) for i in range(n))
    return tuple(nullspace(tuple(B), n))


def feasible_point(
    A_ub: Sequence[Vector],
    b_ub: Sequence[Fraction],
    A_eq: Sequence[Vector],
    b_eq: Sequence[Fraction],
    n: int,
) -> Optional[Vector]:
    """A point of {x : A_ub x <= b_ub, A_eq x = b_eq}, or None if empty.

    Phase-one simplex on an exact tableau with Bland's rule, so it always
    terminates.  Free variables are split into positive and negative parts.
    The tableau uses gmpy2 rationals for speed; results come back as
    Fractions.
    """
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    if m == 0:
        return zeros(n)
    q0, q1 = mpq(0), mpq(1)
    nv = 2 * n + m_ub  # x+, x-, slacks
    width = nv + m
    tab: list[list] = []
    for i in range(m):
        if i < m_ub:
            a, rhs = A_ub[i], b_ub[i]
        else:
            a, rhs = A_eq[i - m_ub], b_eq[i - m_ub]
        a = [mpq(x.numerator, x.denominator) for x in a]
        rhs = as_rational(rhs)
        rhs = mpq(rhs.numerator, rhs.denominator)
        row = a + [-x for x in a] + [q0] * (m_ub + m)
        if i < m_ub:
            row[2 * n + i] = q1
        if rhs < 0:
            row = [-x for x in row]
            rhs = -rhs
        row[nv + i] = q1
        row.append(rhs)
        tab.append(row)
    basis = list(range(nv, nv + m))
    cost = [q0] * (width + 1)
    for row in tab:
        for j in range(nv):
            cost[j] -= row[j]
        cost[width] -= row[width]
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, row in enumerate(tab):
            if row[enter] > 0:
                ratio = row[width] / row[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # the phase-one objective is bounded below by 0
            break
        r = best[1]
        pv = tab[r][enter]
        prow = [x / pv for x in tab[r]]
        tab[r] = prow
        nz = [j for j, x in enumerate(prow) if x != 0]
        for i in range(m):
            f = tab[i][enter]
            if i != r and f != 0:
                row = tab[i]
                for j in nz:
                    row[j] -= f * prow[j]
        f = cost[enter]
        for j in nz:
            cost[j] -= f * prow[j]
        basis[r] = enter
    if cost[width] != 0:
        return None
    vals = [q0] * width
    for i, j in enumerate(basis):
        vals[j] = tab[i][width]
    return tuple(Fraction(int(d.numerator), int(d.denominator)) for d in (vals[j] - vals[n + j] for j in range(n)))
