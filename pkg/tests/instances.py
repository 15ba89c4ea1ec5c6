"""Instance families shared by the test modules."""

from __future__ import annotations

import itertools
from fractions import Fraction

from so2calc.catalog import box, diamond, interval, orthant_product, simplex
from so2calc.chain_rules import QuadraticMap, linear_map
from so2calc.linalg import identity, inverse, matmul, matvec, transpose, vec, zero_matrix
from so2calc.plq import Indicator, SupportPLQ
from so2calc.polyhedra import Polyhedron
from so2calc.tilt import ProblemSpec

half = Fraction(1, 2)


def grid(n: int) -> list[tuple]:
    """Probe directions in Q^n: {−1,0,1}^n for n ≤ 2, a fixed sample otherwise."""
    if n == 1:
        return [vec([x]) for x in (-2, -1, 0, 1, "1/2", 3)]
    if n == 2:
        return [vec(p) for p in itertools.product((-1, 0, 1), repeat=2)]
    pts = [vec(p) for p in itertools.product((-1, 0, 1), repeat=n)]
    return pts[:: max(1, len(pts) // 12)]


def composed(theta, A):
    """φ = θ∘A written directly as a supported function (A of full row rank)."""
    A = tuple(vec(r) for r in A)
    n = len(A[0])
    if isinstance(theta, Indicator):
        return Indicator(theta.Z.preimage(A))
    At = transpose(A)
    G = inverse(matmul(A, At))  # (AAᵀ)⁻¹
    P = matmul(At, G)  # Aᵀ(AAᵀ)⁻¹, n×m
    Q = matmul(matmul(P, theta.Q), transpose(P))
    C = theta.C.image(At)
    return SupportPLQ(Polyhedron(n, C.ineqs, C.eqs), Q)


def full_rank_instances():
    """(name, θ, A, x̄, v̄) with A of full row rank and v̄ ∈ ∂θ(Ax̄)."""
    return [
        ("δ R2- skew", Indicator(orthant_product(2, 0)), [[1, 1], [0, 1]], [0, 0], [1, 0]),
        ("δ R2- at 0, v=0", Indicator(orthant_product(2, 0)), [[2, 1], [1, 1]], [0, 0], [0, 0]),
        ("δ simplex", Indicator(simplex(2)), [[1, 0], [1, 1]], [0, 0], [-1, 0]),
        ("δ diamond rotated", Indicator(diamond()), [[1, 1], [1, -1]], [half, half], [1, 1]),
        ("δ R- wide", Indicator(orthant_product(1, 0)), [[1, 1]], [0, 0], [1]),
        ("δ R- x {0} wide", Indicator(orthant_product(1, 1)), [[1, 0, 1], [0, 1, 0]], [0, 0, 0], [1, 2]),
        ("σ [0,1] scaled", SupportPLQ.support(interval(0, 1)), [[2]], [0], [half]),
        ("σ simplex sheared", SupportPLQ.support(simplex(2)), [[1, 1], [0, 1]], [0, 0], [0, 0]),
        ("PLQ [0,1] Q=1", SupportPLQ(interval(0, 1), identity(1)), [[2]], ["3/4"], [1]),
        ("PLQ box Q=I", SupportPLQ(box(2), identity(2)), [[1, 0], [1, 1]], [2, -2], [1, 0]),
        ("PLQ box Q rank 1 wide", SupportPLQ(box(2), ((1, 0), (0, 0))), [[1, 0, 0], [0, 1, 1]], [1, 0, 0], [1, 1]),
        ("σ diamond scaled", SupportPLQ.support(diamond()), [[1, 0], [0, 2]], [1, half], [half, half]),
    ]


def quad(H, g, c=0):
    return QuadraticMap((H,), (g,), (c,))


def nlp_instances():
    """(name, spec) NLP problems with LICQ at x̄; the first two are the hand-derived ones."""
    I2 = [[2, 0], [0, 2]]
    out = [
        ("min -x1 + |x|^2, x1 <= 0", ProblemSpec("nlp", (0, 0), quad(I2, [-1, 0]), linear_map([[1, 0]]), ("le",))),
        ("saddle diag(1,-1), x1 <= 0", ProblemSpec("nlp", (0, 0), quad([[1, 0], [0, -1]], [-1, 0]), linear_map([[1, 0]]), ("le",))),
        ("unconstrained convex", ProblemSpec("nlp", (0, 0), quad(I2, [0, 0]), _no_constraints(2), ())),
        ("equality on a saddle", ProblemSpec("nlp", (0, 0), quad([[1, 0], [0, -1]], [0, 0]), linear_map([[0, 1]]), ("eq",))),
        ("degenerate multiplier", ProblemSpec("nlp", (0,), quad([[-1]], [0]), linear_map([[1]]), ("le",))),
        ("degenerate multiplier convex", ProblemSpec("nlp", (0,), quad([[1]], [0]), linear_map([[1]]), ("le",))),
        (
            "two active, one inactive",
            ProblemSpec(
                "nlp",
                (0, 0, 0),
                quad([[1, 0, 0], [0, -1, 0], [0, 0, 1]], [-1, 1, 0]),
                QuadraticMap(
                    (zero_matrix(3, 3), zero_matrix(3, 3), zero_matrix(3, 3)),
                    [[1, 0, 0], [0, -1, 0], [1, 1, 1]],
                    [0, 0, -1],
                ),
                ("le", "le", "le"),
            ),
        ),
        (
            "curved constraint rescues",
            ProblemSpec(
                "nlp",
                (0, 0),
                quad([[-1, 0], [0, 0]], [0, 1]),
                QuadraticMap((((2, 0), (0, 0)),), [[0, -1]], [0]),
                ("le",),
            ),
        ),
        (
            "curved constraint insufficient",
            ProblemSpec(
                "nlp",
                (0, 0),
                quad([[-1, 0], [0, 0]], [0, 1]),
                QuadraticMap(((("1/2", 0), (0, 0)),), [[0, -1]], [0]),
                ("le",),
            ),
        ),
        (
            "mixed eq and le",
            ProblemSpec(
                "nlp",
                (0, 0, 0),
                quad([[1, 1, 0], [1, 1, 0], [0, 0, -2]], [-2, 0, 1]),
                linear_map([[1, 0, 0], [0, 0, 1]]),
                ("le", "eq"),
            ),
        ),
        ("not stationary", ProblemSpec("nlp", (0, 0), quad(I2, [1, 0]), linear_map([[0, 1]]), ("eq",))),
        ("wrong sign multiplier", ProblemSpec("nlp", (0, 0), quad(I2, [1, 0]), linear_map([[1, 0]]), ("le",))),
    ]
    return out


def _no_constraints(n: int):
    from so2calc.chain_rules import PointData

    return PointData(tuple(Fraction(0) for _ in range(n)), (), (), ())


HESSIANS = {
    1: [((1,),), ((0,),), ((-1,),)],
    2: [identity(2), zero_matrix(2, 2), ((1, 0), (0, -1)), ((1, 2), (2, 1)), ((-1, 0), (0, 0))],
    3: [identity(3), zero_matrix(3, 3), ((1, 0, 0), (0, -1, 0), (0, 0, 1))],
    4: [identity(4), zero_matrix(4, 4), tuple(tuple(Fraction(int(i == j) * (-1) ** i) for j in range(4)) for i in range(4))],
}

JACOBIANS = {
    1: [((1,),), ((2, 1),)],
    2: [identity(2), ((1, 1), (0, 1)), ((1,), (1,)), ((1, 0, 1), (0, 1, 1))],
    3: [identity(3), ((1, 0), (0, 1), (1, 1))],
    4: [identity(4), ((1, 0), (-1, 0), (0, 1), (0, -1))],
}


def composite_problems(inst):
    """Composite problems min φ₀ + θ(J x + c) built around a catalog instance.

    x̄ = 0 and c = z̄, so Φ(x̄) = z̄; φ₀ has gradient −Jᵀv̄ so that v̄ solves
    the stationarity system, and each listed Hessian is tried.
    """
    m = inst.theta.dim
    out = []
    for J in JACOBIANS[m]:
        J = tuple(vec(r) for r in J)
        n = len(J[0])
        Phi = QuadraticMap(tuple(zero_matrix(n, n) for _ in range(m)), J, inst.z)
        g = tuple(-x for x in matvec(transpose(J), inst.v))
        for H in HESSIANS.get(n, [identity(n), zero_matrix(n, n)]):
            out.append(ProblemSpec("composite", (0,) * n, quad(H, g), Phi, (), inst.theta))
    return out
