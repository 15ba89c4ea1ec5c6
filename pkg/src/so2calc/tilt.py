"""Tilt stability of a candidate minimizer.

NLP problems are decided by LICQ, KKT and the strong second-order
condition.  Composite problems φ₀ + θ∘Φ are decided by positive
definiteness of the T-map

    T(u) = H_eff u + ∇Φ(x̄)* ∂²θ(z̄,v̄)(∇Φ(x̄) u),   H_eff = ∇²φ₀(x̄) + ∇²⟨v̄,Φ⟩(x̄),

that is, ⟨u, H_eff u⟩ + ⟨w, Ju⟩ > 0 for every u ≠ 0 and every w in the
second-order value at Ju.  Two independent decision procedures are run:

* reduction: minimize the bilinear term in closed form, which leaves a
  definiteness test of one symmetric matrix on one subspace;
* enumeration: for every difference cone D of the face-pair system, solve
  the parametric LP  min ⟨w, Ju⟩ over admissible w  by listing its basic
  solutions w = M_I u, and test strict copositivity of each resulting
  quadratic form on the polyhedral cone where that basis is feasible.

Disagreement between the two raises :class:`DecisionPathsDisagree`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional

from .chain_rules import (
    InnerMap,
    PointData,
    QuadraticMap,
    QualificationError,
    check_first_order_qc,
    check_second_order_qc,
    multiplier_representatives,
    multiplier_set,
    weighted_hessian,
)
from .linalg import (
    ONE,
    ZERO,
    Matrix,
    Vector,
    add,
    definiteness_witness,
    det,
    dot,
    inverse,
    is_zero,
    mat_add,
    matmul,
    matvec,
    neg,
    nullspace,
    rank,
    restrict,
    solve_affine,
    transpose,
    unit,
    vec,
    zeros,
)
from .plq import DomainError, Indicator, PLQFunction
from .polyhedra import Polyhedron, Subspace, span_of
from .second_order import FacePairSystem, soc_system


class TiltError(ValueError):
    pass


class InfeasiblePoint(TiltError):
    pass


class DecisionPathsDisagree(RuntimeError):
    """The reduction and enumeration decisions of (pd) differ: a defect."""


TILT_STABLE = "TiltStable"
NOT_TILT_STABLE = "NotTiltStable"
SUFFICIENT_ONLY = "SufficientOnly"
INCONCLUSIVE = "Inconclusive"
INAPPLICABLE = "Inapplicable"


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """min φ₀(x) subject to Φ(x) ∈ Z (NLP), or min φ₀(x) + θ(Φ(x)) (composite).

    For NLP the ``relations`` tags are "le" (Φᵢ(x) ≤ 0) or "eq" (Φᵢ(x) = 0).
    """

    kind: str
    x: Vector
    objective: InnerMap
    constraints: InnerMap
    relations: tuple[str, ...] = ()
    theta: Optional[PLQFunction] = None

    def __post_init__(self):
        object.__setattr__(self, "x", vec(self.x))
        object.__setattr__(self, "relations", tuple(self.relations))
        if self.kind not in ("nlp", "composite"):
            raise TiltError(f"unknown problem kind {self.kind!r}")
        n = len(self.x)
        for name, h in (("objective", self.objective), ("constraints", self.constraints)):
            if h.n_total != n or h.n_params:
                raise TiltError(f"{name} must be a map on the {n} decision variables")
        if self.objective.m != 1:
            raise TiltError("the objective must be scalar")
        if self.kind == "nlp":
            if len(self.relations) != self.constraints.m:
                raise TiltError("one relation tag per constraint is required")
            if any(r not in ("le", "eq") for r in self.relations):
                raise TiltError("relation tags must be 'le' or 'eq'")
            if self.theta is not None:
                raise TiltError("an NLP carries no outer function")
        else:
            if self.theta is None:
                raise TiltError("a composite problem needs θ")
            if self.theta.dim != self.constraints.m:
                raise TiltError("θ and Φ have different dimensions")

    @property
    def n(self) -> int:
        return len(self.x)

    def gradient(self) -> Vector:
        return self.objective.jacobian(self.x)[0]

    def hessian(self) -> Matrix:
        return self.objective.component_hessians(self.x)[0]

    def nlp_set(self) -> Polyhedron:
        """Z = {z : zᵢ ≤ 0 for 'le', zᵢ = 0 for 'eq'}."""
        m = self.constraints.m
        return Polyhedron(
            m,
            [(unit(m, i), 0) for i, r in enumerate(self.relations) if r == "le"],
            [(unit(m, i), 0) for i, r in enumerate(self.relations) if r == "eq"],
        )

    def as_composite(self) -> "ProblemSpec":
        """The δ_Z encoding of an NLP (after dropping inactive constraints)."""
        if self.kind != "nlp":
            return self
        s = drop_inactive(self)
        return ProblemSpec("composite", s.x, s.objective, s.constraints, (), Indicator(s.nlp_set()))


@dataclass
class Verdict:
    status: str
    reason: str = ""
    multiplier: Optional[Vector] = None
    subspace: tuple[Vector, ...] = ()
    direction: Optional[Vector] = None
    value_witness: Optional[Vector] = None
    matrix: Optional[Matrix] = None
    qc: dict = field(default_factory=dict)
    path: str = ""
    cross_check: Optional[bool] = None
    trace: list = field(default_factory=list)

    def certificate(self) -> tuple:
        """The comparable part of the verdict."""
        return (self.status, self.multiplier, self.subspace, self.direction)


# ---------------------------------------------------------------------------
# NLP


def _component(h: InnerMap, keep: list[int]) -> InnerMap:
    if isinstance(h, QuadraticMap):
        return QuadraticMap(
            tuple(h.hessians[i] for i in keep),
            tuple(h.linear[i] for i in keep),
            tuple(h.constant[i] for i in keep),
            h.n_params,
        )
    return PointData(
        h.point, tuple(h.values[i] for i in keep), tuple(h.jac[i] for i in keep),
        tuple(h.hessians[i] for i in keep), h.n_params,
    )


def drop_inactive(spec: ProblemSpec) -> ProblemSpec:
    if spec.kind != "nlp":
        raise TiltError("drop_inactive applies to NLP problems")
    vals = spec.constraints.value(spec.x)
    keep = []
    for i, (val, rel) in enumerate(zip(vals, spec.relations)):
        if (rel == "le" and val > 0) or (rel == "eq" and val != 0):
            raise InfeasiblePoint(f"constraint {i} is violated at x̄ (value {val})")
        if val == 0:
            keep.append(i)
    if len(keep) == spec.constraints.m:
        return spec
    return replace(
        spec,
        constraints=_component(spec.constraints, keep),
        relations=tuple(spec.relations[i] for i in keep),
    )


def check_licq(spec: ProblemSpec) -> bool:
    m = spec.constraints.m
    return m == 0 or rank(spec.constraints.jacobian(spec.x)) == m


@dataclass(frozen=True)
class KKTResult:
    status: str  # "ok", "not_stationary" or "sign_violation"
    multiplier: Optional[Vector]

    @property
    def admissible(self) -> bool:
        return self.status == "ok"


def kkt_multiplier(spec: ProblemSpec) -> KKTResult:
    """Solve ∇φ₀(x̄) + ∇Φ(x̄)ᵀλ = 0 (the multiplier is unique under LICQ)."""
    if not check_licq(spec):
        raise TiltError("LICQ fails; the multiplier is not unique")
    m = spec.constraints.m
    g = spec.gradient()
    if m == 0:
        return KKTResult("ok" if is_zero(g) else "not_stationary", () if is_zero(g) else None)
    J = spec.constraints.jacobian(spec.x)
    sol = solve_affine(transpose(J), neg(g), m)
    if sol is None:
        return KKTResult("not_stationary", None)
    lam = sol.point
    if any(r == "le" and l < 0 for r, l in zip(spec.relations, lam)):
        return KKTResult("sign_violation", lam)
    return KKTResult("ok", lam)


def lagrangian_hessian(spec: ProblemSpec, lam: Vector) -> Matrix:
    H = spec.hessian()
    if lam:
        H = mat_add(H, weighted_hessian(spec.constraints, spec.x, lam))
    return H


def ssoc_subspace(spec: ProblemSpec, lam: Vector) -> Subspace:
    """{u : ⟨∇Φᵢ, u⟩ = 0 for equalities and for inequalities with λᵢ > 0}."""
    n = spec.n
    if not lam:
        return Subspace.full(n)
    J = spec.constraints.jacobian(spec.x)
    rows = tuple(J[i] for i, (r, l) in enumerate(zip(spec.relations, lam)) if r == "eq" or l > 0)
    return Subspace.span(n, nullspace(rows, n)) if rows else Subspace.full(n)


@dataclass(frozen=True)
class SSOCResult:
    holds: bool
    subspace: Subspace
    witness: Optional[Vector]
    hessian: Matrix


def ssoc_check(spec: ProblemSpec, lam: Vector) -> SSOCResult:
    H = lagrangian_hessian(spec, lam)
    S = ssoc_subspace(spec, lam)
    u = definiteness_witness(H, S.basis)
    return SSOCResult(u is None, S, u, H)


def tilt_verdict_nlp(spec: ProblemSpec) -> Verdict:
    s = drop_inactive(spec)
    trace = [f"active constraints: {s.constraints.m} of {spec.constraints.m}"]
    if not check_licq(s):
        return Verdict(INAPPLICABLE, "LICQ fails", qc={"licq": False}, path="nlp", trace=trace + ["LICQ fails"])
    trace.append("LICQ holds")
    kkt = kkt_multiplier(s)
    if kkt.status == "not_stationary":
        return Verdict(INAPPLICABLE, "x̄ is not a KKT point", qc={"licq": True}, path="nlp", trace=trace)
    if kkt.status == "sign_violation":
        return Verdict(
            INAPPLICABLE, "multiplier sign condition fails", kkt.multiplier, qc={"licq": True}, path="nlp", trace=trace
        )
    lam = kkt.multiplier
    trace.append(f"multiplier λ̄ = {list(map(str, lam))}")
    res = ssoc_check(s, lam)
    trace.append(f"SSOC on a subspace of dimension {res.subspace.dimension}: {'holds' if res.holds else 'fails'}")
    return Verdict(
        TILT_STABLE if res.holds else NOT_TILT_STABLE,
        "",
        lam,
        res.subspace.basis,
        res.witness,
        None,
        res.hessian,
        {"licq": True},
        "nlp",
        None,
        trace,
    )


# ---------------------------------------------------------------------------
# composite: T-map


@dataclass(frozen=True, eq=False)
class TMap:
    H_eff: Matrix
    system: FacePairSystem
    J: Matrix
    v: Vector
    z: Vector


def t_map(spec: ProblemSpec, v) -> TMap:
    if spec.kind != "composite":
        spec = spec.as_composite()
    v = vec(v)
    theta, Phi, x = spec.theta, spec.constraints, spec.x
    z = Phi.value(x)
    J = Phi.jacobian(x)
    try:
        ok = theta.subdifferential(z).contains(v)
    except DomainError:
        ok = False
    if not ok or matvec(transpose(J, theta.dim), v) != neg(spec.gradient()):
        raise TiltError("v̄ does not solve v̄ ∈ ∂θ(z̄), ∇Φ(x̄)*v̄ = −∇φ₀(x̄)")
    H = mat_add(spec.hessian(), weighted_hessian(Phi, x, v))
    return TMap(H, soc_system(theta, z, v), J, v, z)


# -- reduction path --------------------------------------------------------


def _generalized_inverse(G: Matrix) -> Matrix:
    """Symmetric X with GXG = G for PSD G: invert a maximal nonsingular
    principal block and pad with zeros."""
    k = len(G)
    idx: list[int] = []
    for i in range(k):
        trial = idx + [i]
        if det(tuple(tuple(G[a][b] for b in trial) for a in trial)) != 0:
            idx = trial
    X = [[ZERO] * k for _ in range(k)]
    if idx:
        inv = inverse(tuple(tuple(G[a][b] for b in idx) for a in idx))
        for p, a in enumerate(idx):
            for q, b in enumerate(idx):
                X[a][b] = inv[p][q]
    return tuple(tuple(r) for r in X)


@dataclass(frozen=True)
class Reduction:
    holds: bool
    subspace: Subspace
    matrix: Matrix
    direction: Optional[Vector]
    value_witness: Optional[Vector]


def pd_by_reduction(T: TMap, theta: PLQFunction) -> Reduction:
    """Closed-form minimization of the bilinear term.

    δ_Z: the value at a ∈ span K contains 0 and ⟨w, a⟩ ≥ 0 throughout, so
    (pd) is H_eff ≻ 0 on {u : Ju ∈ span K}.
    SupportPLQ: with B a basis of lin K and G = BᵀQB, the value at a is
    nonempty iff Bᵀa ∈ range G, and the least ⟨w, a⟩ is (Bᵀa)ᵀG⁺(Bᵀa),
    attained at w = BG⁺Bᵀa.
    """
    J, H, K = T.J, T.H_eff, T.system.base_cone
    m, n = len(J), len(H)
    Jt = transpose(J, n)
    if isinstance(theta, Indicator):
        rows = tuple(matvec(Jt, a) for a in span_of(K).complement().basis)
        rows = tuple(r for r in rows if not is_zero(r))
        U = Subspace.span(n, nullspace(rows, n)) if rows else Subspace.full(n)
        u = definiteness_witness(H, U.basis)
        return Reduction(u is None, U, H, u, None if u is None else zeros(m))
    B = K.generators.lineality
    Q = theta.Q
    if not B:
        U = Subspace.full(n)
        u = definiteness_witness(H, U.basis)
        return Reduction(u is None, U, H, u, None if u is None else zeros(m))
    Bm = transpose(B, m)  # m×k, columns = basis of lin K
    G = restrict(Q, B)
    X = _generalized_inverse(G)
    BtJ = matmul(B, J)  # k×n
    # u is admissible iff BᵀJu ⟂ ker G
    rows = tuple(matvec(transpose(BtJ, n), c) for c in nullspace(G, len(B))) if G else ()
    rows = tuple(r for r in rows if not is_zero(r))
    U = Subspace.span(n, nullspace(rows, n)) if rows else Subspace.full(n)
    extra = matmul(matmul(transpose(BtJ, n), X), BtJ)
    Heff = mat_add(H, extra)
    u = definiteness_witness(Heff, U.basis)
    w = None
    if u is not None:
        w = matvec(Bm, matvec(X, matvec(BtJ, u)))
    return Reduction(u is None, U, Heff, u, w)


# -- enumeration path ------------------------------------------------------


def _cone_gens(P: Polyhedron):
    g = P.generators
    return list(g.rays), list(g.lineality)


def _strictly_copositive_simplex(N: Matrix) -> bool:
    """λᵀNλ > 0 for every λ ≥ 0, λ ≠ 0.

    A minimizer of λᵀNλ on the unit simplex with inclusion-minimal support
    S solves the bordered system [N_S −1; 1ᵀ 0](λ_S, μ) = (0, 1) with a
    nonsingular matrix and λ_S > 0, and μ is the minimum value.  So it
    suffices to inspect every support whose bordered system is regular.
    """
    p = len(N)
    for size in range(1, p + 1):
        for S in itertools.combinations(range(p), size):
            k = len(S)
            Bd = tuple(
                tuple(N[i][j] for j in S) + (-ONE,) for i in S
            ) + (tuple(ONE for _ in S) + (ZERO,),)
            if det(Bd) == 0:
                continue
            sol = matvec(inverse(Bd), zeros(k) + (ONE,))
            lam, mu = sol[:k], sol[k]
            if all(l > 0 for l in lam) and mu <= 0:
                return False
    return True


def strictly_copositive_on(S: Matrix, P: Polyhedron) -> bool:
    """uᵀSu > 0 for every nonzero u in the polyhedral cone P."""
    rays, lin = _cone_gens(P)
    if lin:
        if definiteness_witness(S, lin) is not None:
            return False
        # eliminate the lineality part: Schur complement of LᵀSL
        SL = restrict(S, lin)
        Lm = transpose(lin, len(S))  # n×l
        SLm = matmul(S, Lm)  # n×l
        S = mat_add(S, tuple(tuple(-x for x in row) for row in matmul(matmul(SLm, inverse(SL)), transpose(SLm))))
    if not rays:
        return True
    return _strictly_copositive_simplex(restrict(S, rays))


def _sym(M: Matrix) -> Matrix:
    return tuple(tuple((M[i][j] + M[j][i]) / 2 for j in range(len(M))) for i in range(len(M)))


def _class_rows(T: TMap, c, mode: str):
    """Rows (a_u, a_w, kind) of the cone G_D = {(u, w)} of admissible pairs."""
    J, m = T.J, len(T.J)
    n = len(T.H_eff)
    Jt = transpose(J, n)
    zu, zw = zeros(n), zeros(m)
    ineqs, eqs = [], []
    if mode == "indicator":
        ineqs += [(matvec(Jt, a), zw) for a, _ in c.D.ineqs]  # Ju ∈ D
        eqs += [(matvec(Jt, a), zw) for a, _ in c.D.eqs]
        ineqs += [(zu, neg(r)) for r in c.rays]  # w ∈ −D*
        eqs += [(zu, l) for l in c.lineality]
    else:
        Q = T.system.Q
        ineqs += [(zu, a) for a, _ in c.D.ineqs]  # w ∈ D
        eqs += [(zu, a) for a, _ in c.D.eqs]
        ineqs += [(neg(matvec(Jt, r)), matvec(Q, r)) for r in c.rays]  # Qw − Ju ∈ D*
        eqs += [(neg(matvec(Jt, l)), matvec(Q, l)) for l in c.lineality]
    return ineqs, eqs


def _class_decision(T: TMap, c, mode: str) -> bool:
    J, H = T.J, T.H_eff
    m, n = len(J), len(H)
    ineqs, eqs = _class_rows(T, c, mode)
    G = Polyhedron(n + m, [(au + aw, 0) for au, aw in ineqs], [(au + aw, 0) for au, aw in eqs])
    g = G.generators
    if not g.rays and not g.lineality:
        return True
    dom_rays = [r[:n] for r in g.rays]
    dom_lin = [l[:n] for l in g.lineality]
    # unbounded LP: a recession direction d of W(u) with ⟨d, Ju⟩ < 0 somewhere on dom
    rec = Polyhedron(m, [(aw, 0) for _, aw in ineqs], [(aw, 0) for _, aw in eqs])
    rrays, rlin = _cone_gens(rec)
    for d in rrays:
        Jd = matvec(transpose(J, n), d)
        if any(dot(Jd, r) < 0 for r in dom_rays) or any(dot(Jd, l) != 0 for l in dom_lin):
            return False
    # quotient the w-lineality (the objective is constant along it on dom)
    rows = [(au, aw, "le") for au, aw in ineqs] + [(au, aw, "eq") for au, aw in eqs]
    rows += [(zeros(n), l, "eq") for l in rlin]
    unique = list({(au, aw): None for au, aw, _ in rows})
    wrows = [(au, aw) for au, aw in unique if not is_zero(aw)]
    seen = set()
    for I in itertools.combinations(range(len(wrows)), m):
        A_I = tuple(wrows[i][1] for i in I)
        if det(A_I) == 0:
            continue
        # A_I w + A_uI u = 0  ⟹  w = −A_I⁻¹ A_uI u
        Minv = inverse(A_I)
        Au = tuple(wrows[i][0] for i in I)
        M_I = tuple(tuple(-x for x in row) for row in matmul(Minv, Au)) if n else tuple(() for _ in range(m))
        if M_I in seen:
            continue
        seen.add(M_I)
        # feasibility region of this basic solution, in u
        f_ineqs, f_eqs = [], []
        for au, aw, kind in rows:
            row = add(au, matvec(transpose(M_I, n), aw)) if n else ()
            (f_ineqs if kind == "le" else f_eqs).append((row, 0))
        F = Polyhedron(n, f_ineqs, f_eqs)
        fg = F.generators
        if not fg.rays and not fg.lineality:
            continue
        S = mat_add(H, _sym(matmul(transpose(M_I, n), J)))
        if not strictly_copositive_on(S, F):
            return False
    if m == 0 or not wrows:
        # w is pinned to the quotient origin; the form is uᵀHu on dom
        F = Polyhedron(n, [(au, 0) for au, aw, k in rows if k == "le"], [(au, 0) for au, aw, k in rows if k == "eq"])
        return strictly_copositive_on(H, F)
    return True


def pd_by_enumeration(T: TMap) -> bool:
    sys = T.system
    return all(_class_decision(T, c, sys.mode) for c in sys._classes)


# -- verdicts --------------------------------------------------------------


def _stationary_multipliers(spec: ProblemSpec) -> Polyhedron:
    return multiplier_set(spec.theta, spec.constraints, spec.x, neg(spec.gradient()))


def _exactness(spec: ProblemSpec, trace: list) -> tuple[Optional[str], dict]:
    theta, Phi, x = spec.theta, spec.constraints, spec.x
    J = Phi.jacobian(x)
    qc: dict = {}
    if Phi.m == 0 or rank(J) == Phi.m:
        qc["full_rank"] = True
        trace.append("∇Φ(x̄) has full row rank")
        return None, qc
    qc["full_rank"] = False
    qc1 = check_first_order_qc(theta, Phi, x)
    qc["first_order_qc"] = qc1.holds
    if not qc1.holds:
        return "first-order qualification condition fails", qc
    qc2 = check_second_order_qc(theta, Phi, x, neg(spec.gradient()))
    qc["second_order_qc"] = qc2.holds
    if not qc2.holds:
        return "∇Φ(x̄) is rank deficient and the second-order qualification condition fails", qc
    trace.append("second-order qualification condition holds")
    return None, qc


def _check_paths(T: TMap, theta: PLQFunction) -> tuple[Reduction, bool]:
    red = pd_by_reduction(T, theta)
    enum = pd_by_enumeration(T)
    if red.holds != enum:
        raise DecisionPathsDisagree(
            f"reduction says {'PD' if red.holds else 'not PD'}, enumeration says {'PD' if enum else 'not PD'}"
        )
    if red.direction is not None and not T.system.contains(matvec(T.J, red.direction), red.value_witness):
        raise DecisionPathsDisagree("the failure certificate is not in the second-order value")
    return red, enum


def _unconstrained(spec: ProblemSpec) -> Verdict:
    """No outer term: the classical test, positive definiteness of ∇²φ₀(x̄)."""
    if not is_zero(spec.gradient()):
        return Verdict(INAPPLICABLE, "x̄ is not stationary: 0 ∉ ∂φ(x̄)", path="reduction")
    H = spec.hessian()
    U = Subspace.full(spec.n)
    u = definiteness_witness(H, U.basis)
    status = TILT_STABLE if u is None else NOT_TILT_STABLE
    return Verdict(status, "", (), U.basis, u, None, H, {"full_rank": True}, "reduction", True,
                   ["no outer term: classical Hessian test"])


def tilt_verdict_composite(spec: ProblemSpec) -> Verdict:
    if spec.kind == "nlp":
        spec = spec.as_composite()
    theta, Phi, x = spec.theta, spec.constraints, spec.x
    trace: list = []
    if Phi.m == 0:
        return _unconstrained(spec)
    z = Phi.value(x)
    try:
        theta.subdifferential(z)
    except DomainError:
        return Verdict(INAPPLICABLE, "Φ(x̄) lies outside dom θ", path="reduction", trace=trace)
    M = _stationary_multipliers(spec)
    if M.is_empty():
        return Verdict(INAPPLICABLE, "x̄ is not stationary: 0 ∉ ∂φ(x̄)", path="reduction", trace=trace)
    reason, qc = _exactness(spec, trace)
    if reason:
        return Verdict(INAPPLICABLE, reason, qc=qc, path="reduction", trace=trace)
    g = M.generators
    if len(g.vertices) != 1 or g.rays or g.lineality:
        raise TiltError("multiplier set is not a singleton under the exactness hypotheses")
    v = g.vertices[0]
    trace.append(f"multiplier v̄ = {list(map(str, v))}")
    T = t_map(spec, v)
    red, enum = _check_paths(T, theta)
    trace.append(f"(pd) on a subspace of dimension {red.subspace.dimension}: {'holds' if red.holds else 'fails'}")
    trace.append("face-pair enumeration agrees")
    return Verdict(
        TILT_STABLE if red.holds else NOT_TILT_STABLE,
        "",
        v,
        red.subspace.basis,
        red.direction,
        red.value_witness,
        red.matrix,
        qc,
        "reduction",
        True,
        trace,
    )


def tilt_sufficient(spec: ProblemSpec) -> Verdict:
    """Sufficient test through the upper estimate of the second-order chain rule.

    Passing means tilt stable; failing proves nothing.
    """
    if spec.kind == "nlp":
        spec = spec.as_composite()
    theta, Phi, x = spec.theta, spec.constraints, spec.x
    if Phi.m == 0:
        v = _unconstrained(spec)
        if v.status == TILT_STABLE:
            v.status, v.reason, v.path = SUFFICIENT_ONLY, "tilt stable by sufficiency", "sufficient"
        elif v.status == NOT_TILT_STABLE:
            v.status, v.path = INCONCLUSIVE, "sufficient"
        return v
    M = _stationary_multipliers(spec)
    if M.is_empty():
        return Verdict(INAPPLICABLE, "x̄ is not stationary: 0 ∉ ∂φ(x̄)", path="sufficient")
    qc1 = check_first_order_qc(theta, Phi, x)
    if not qc1.holds:
        raise QualificationError("the first-order qualification condition fails")
    qc2 = check_second_order_qc(theta, Phi, x, neg(spec.gradient()))
    if not qc2.holds:
        raise QualificationError("the second-order qualification condition fails")
    qc = {"first_order_qc": True, "second_order_qc": True}
    trace = []
    for v in multiplier_representatives(M):
        T = t_map(spec, v)
        red, _ = _check_paths(T, theta)
        trace.append(f"v = {list(map(str, v))}: {'passes' if red.holds else 'fails'}")
        if not red.holds:
            return Verdict(INCONCLUSIVE, "the upper-estimate test fails", v, red.subspace.basis, red.direction,
                           red.value_witness, red.matrix, qc, "sufficient", True, trace)
    return Verdict(SUFFICIENT_ONLY, "tilt stable by sufficiency", qc=qc, path="sufficient", cross_check=True, trace=trace)


__all__ = [
    "DecisionPathsDisagree",
    "INAPPLICABLE",
    "INCONCLUSIVE",
    "InfeasiblePoint",
    "KKTResult",
    "NOT_TILT_STABLE",
    "ProblemSpec",
    "Reduction",
    "SSOCResult",
    "SUFFICIENT_ONLY",
    "TILT_STABLE",
    "TMap",
    "TiltError",
    "Verdict",
    "check_licq",
    "drop_inactive",
    "kkt_multiplier",
    "lagrangian_hessian",
    "pd_by_enumeration",
    "pd_by_reduction",
    "ssoc_check",
    "ssoc_subspace",
    "strictly_copositive_on",
    "t_map",
    "tilt_sufficient",
    "tilt_verdict_composite",
    "tilt_verdict_nlp",
]
