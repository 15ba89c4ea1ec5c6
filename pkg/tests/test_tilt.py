from fractions import Fraction

import pytest

from instances import nlp_instances, quad
from so2calc.catalog import interval, orthant_product
from so2calc.chain_rules import QualificationError, QuadraticMap, linear_map
from so2calc.linalg import quad_form
from so2calc.plq import Indicator, SupportPLQ
from so2calc.polyhedra import Polyhedron
from so2calc.tilt import (
    INAPPLICABLE,
    INCONCLUSIVE,
    NOT_TILT_STABLE,
    SUFFICIENT_ONLY,
    TILT_STABLE,
    InfeasiblePoint,
    ProblemSpec,
    TiltError,
    check_licq,
    drop_inactive,
    kkt_multiplier,
    pd_by_enumeration,
    pd_by_reduction,
    strictly_copositive_on,
    t_map,
    tilt_sufficient,
    tilt_verdict_composite,
    tilt_verdict_nlp,
)

half = Fraction(1, 2)
CASES = dict(nlp_instances())


class TestNLP:
    def test_hand_example_tilt_stable(self):
        v = tilt_verdict_nlp(CASES["min -x1 + |x|^2, x1 <= 0"])
        assert v.status == TILT_STABLE
        assert v.multiplier == (1,)
        assert v.subspace == ((0, 1),)

    def test_hand_example_saddle(self):
        v = tilt_verdict_nlp(CASES["saddle diag(1,-1), x1 <= 0"])
        assert v.status == NOT_TILT_STABLE
        assert v.direction[0] == 0 and v.direction[1] != 0
        assert quad_form(v.matrix, v.direction) <= 0

    def test_degenerate_multiplier_uses_whole_space(self):
        v = tilt_verdict_nlp(CASES["degenerate multiplier"])
        assert v.status == NOT_TILT_STABLE and v.multiplier == (0,)
        assert tilt_verdict_nlp(CASES["degenerate multiplier convex"]).status == TILT_STABLE

    def test_curved_constraint(self):
        assert tilt_verdict_nlp(CASES["curved constraint rescues"]).status == TILT_STABLE
        assert tilt_verdict_nlp(CASES["curved constraint insufficient"]).status == NOT_TILT_STABLE

    def test_inactive_constraint_is_dropped(self):
        spec = CASES["two active, one inactive"]
        assert drop_inactive(spec).constraints.m == 2
        assert tilt_verdict_nlp(spec).multiplier == (1, 1)

    def test_inapplicable_cases(self):
        assert tilt_verdict_nlp(CASES["not stationary"]).status == INAPPLICABLE
        wrong = tilt_verdict_nlp(CASES["wrong sign multiplier"])
        assert wrong.status == INAPPLICABLE and wrong.multiplier == (-1,)

    def test_licq_failure(self):
        spec = ProblemSpec("nlp", (0, 0), quad([[1, 0], [0, 1]], [0, 0]), linear_map([[1, 0], [2, 0]]), ("le", "le"))
        assert not check_licq(spec)
        assert tilt_verdict_nlp(spec).status == INAPPLICABLE
        with pytest.raises(TiltError):
            kkt_multiplier(spec)

    def test_infeasible_point(self):
        spec = ProblemSpec("nlp", (1,), quad([[1]], [0]), linear_map([[1]]), ("le",))
        with pytest.raises(InfeasiblePoint):
            tilt_verdict_nlp(spec)


class TestComposite:
    def test_sharp_minimum_of_abs(self):
        # −x/2 + max(0, x) = |x|/2
        spec = ProblemSpec("composite", (0,), quad([[0]], [-half]), linear_map([[1]]), (), SupportPLQ.support(interval(0, 1)))
        v = tilt_verdict_composite(spec)
        assert v.status == TILT_STABLE and v.multiplier == (half,)
        assert v.cross_check is True

    def test_smooth_piece_of_plq(self):
        theta = SupportPLQ(interval(0, 1), ((1,),))
        good = ProblemSpec("composite", (half,), quad([[0]], [-half]), linear_map([[1]]), (), theta)
        assert tilt_verdict_composite(good).status == TILT_STABLE
        flat = ProblemSpec("composite", (half,), quad([[-1]], [0]), linear_map([[1]]), (), theta)
        v = tilt_verdict_composite(flat)
        assert v.status == NOT_TILT_STABLE
        T = t_map(flat, v.multiplier)
        assert T.system.contains((v.direction[0],), v.value_witness)

    def test_reduction_and_enumeration_agree_on_indicator(self):
        spec = ProblemSpec("composite", (0, 0), quad([[1, 0], [0, -1]], [0, 0]), linear_map([[1, 0], [0, 1]]), (),
                           Indicator(orthant_product(2, 0)))
        v = tilt_verdict_composite(spec)
        T = t_map(spec, v.multiplier)
        assert pd_by_reduction(T, spec.theta).holds == pd_by_enumeration(T)
        assert v.status == NOT_TILT_STABLE

    def test_outside_domain(self):
        spec = ProblemSpec("composite", (1,), quad([[1]], [0]), linear_map([[1]]), (), Indicator(orthant_product(1, 0)))
        assert tilt_verdict_composite(spec).status == INAPPLICABLE

    def test_nlp_spec_is_encoded(self):
        spec = CASES["min -x1 + |x|^2, x1 <= 0"]
        assert tilt_verdict_composite(spec).certificate() == tilt_verdict_nlp(spec).certificate()


class TestSufficient:
    def test_unconstrained(self):
        spec = CASES["unconstrained convex"]
        assert tilt_sufficient(spec).status == SUFFICIENT_ONLY
        saddle = ProblemSpec("nlp", (0, 0), quad([[1, 0], [0, -1]], [0, 0]), spec.constraints, ())
        assert tilt_sufficient(saddle).status == INCONCLUSIVE

    def test_passes_on_a_tilt_stable_problem(self):
        assert tilt_sufficient(CASES["min -x1 + |x|^2, x1 <= 0"]).status == SUFFICIENT_ONLY

    def test_requires_second_order_qc(self):
        theta = SupportPLQ.support(Polyhedron.from_generators(2, [(1, 0), (0, 1)]))
        spec = ProblemSpec("composite", (0,), quad([[1]], [-1]), linear_map([[1], [1]]), (), theta)
        with pytest.raises(QualificationError):
            tilt_sufficient(spec)


class TestCopositivity:
    orthant = Polyhedron.nonnegative_orthant(2)

    @pytest.mark.parametrize(
        "S,expected",
        [
            (((1, 0), (0, -1)), False),
            (((0, 1), (1, 0)), False),
            (((1, 1), (1, 1)), True),
            (((1, -2), (-2, 1)), False),
            (((1, -1), (-1, 2)), True),
        ],
    )
    def test_on_orthant(self, S, expected):
        assert strictly_copositive_on(S, self.orthant) is expected

    def test_with_lineality(self):
        halfplane = Polyhedron(2, [((0, -1), 0)])
        assert not strictly_copositive_on(((0, 0), (0, 1)), halfplane)
        assert strictly_copositive_on(((1, 0), (0, 1)), halfplane)


class TestSpecValidation:
    def test_bad_kind(self):
        with pytest.raises(TiltError):
            ProblemSpec("lp", (0,), quad([[1]], [0]), linear_map([[1]]), ("le",))

    def test_missing_theta(self):
        with pytest.raises(TiltError):
            ProblemSpec("composite", (0,), quad([[1]], [0]), linear_map([[1]]))

    def test_relation_tags(self):
        with pytest.raises(TiltError):
            ProblemSpec("nlp", (0,), quad([[1]], [0]), linear_map([[1]]), ("lt",))
        with pytest.raises(TiltError):
            ProblemSpec("nlp", (0,), quad([[1]], [0]), linear_map([[1]]), ())

    def test_vector_objective(self):
        two = QuadraticMap((((1,),), ((1,),)), ((0,), (0,)), (0, 0))
        with pytest.raises(TiltError):
            ProblemSpec("nlp", (0,), two, linear_map([[1]]), ("le",))
