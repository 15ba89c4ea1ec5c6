import pytest

from so2calc.catalog import diamond, example_theta, interval, orthant_product
from so2calc.chain_rules import (
    ChainRuleError,
    PointData,
    QualificationError,
    QuadraticMap,
    RankError,
    chain_amenable_upper,
    chain_full_rank,
    chain_partial_full_rank,
    check_first_order_qc,
    check_second_order_qc,
    direct_soc_when_available,
    first_order_chain,
    linear_map,
    multiplier_representatives,
    multiplier_set,
    weighted_hessian,
)
from so2calc.cli import EXAMPLE_A
from so2calc.linalg import matvec, transpose, vec
from so2calc.plq import Indicator, SupportPLQ
from so2calc.polyhedra import Polyhedron
from so2calc.second_order import PolyUnion, soc_system

halfline = Indicator(orthant_product(1, 0))
relu = SupportPLQ.support(interval(0, 1))
R = Polyhedron.whole(1)


class TestExample:
    theta = example_theta()
    h = linear_map(EXAMPLE_A)

    def test_first_order(self):
        assert check_first_order_qc(self.theta, self.h, (0, 0)).holds
        assert first_order_chain(self.theta, self.h, (0, 0)).equals(diamond(2))

    def test_second_order_qc_fails_with_witness(self):
        qc = check_second_order_qc(self.theta, self.h, (0, 0), (0, 0))
        assert not qc.holds
        assert any(qc.witness) and matvec(transpose(EXAMPLE_A), qc.witness) == (0, 0)

    def test_upper_estimate_needs_override(self):
        with pytest.raises(QualificationError):
            chain_amenable_upper(self.theta, self.h, (0, 0), (0, 0))
        upper = chain_amenable_upper(self.theta, self.h, (0, 0), (0, 0), override=True)
        assert not upper.hypotheses_verified
        assert upper.contains((0, 1), (0, 1))

    def test_strict_inclusion(self):
        phi = SupportPLQ.support(diamond(2))
        assert direct_soc_when_available(phi, (0, 0), (0, 0), (0, 1)).is_empty()

    def test_multiplier_set_is_a_segment_of_the_simplex(self):
        M = multiplier_set(self.theta, self.h, (0, 0), (0, 0))
        assert len(M.vertices) == 2
        assert len(multiplier_representatives(M)) == 3


def test_first_order_qc_failure():
    h = QuadraticMap((((2,),),), ((0,),), (0,))  # x ↦ x²
    qc = check_first_order_qc(halfline, h, (0,))
    assert not qc.holds and qc.witness[0] > 0
    with pytest.raises(QualificationError):
        first_order_chain(halfline, h, (0,))


def test_rank_error():
    with pytest.raises(RankError):
        chain_full_rank(Indicator(orthant_product(2, 0)), linear_map([[1, 1], [1, 1]]), (0, 0), (0, 0))


def test_not_a_subgradient():
    with pytest.raises(ChainRuleError):
        chain_full_rank(halfline, linear_map([[1]]), (0,), (-1,))


def test_curvature_term_shifts_the_value():
    h = QuadraticMap((((2,),),), ((1,),), (0,))  # x ↦ x + x²
    result = chain_full_rank(relu, h, (0,), (1,))
    sys = soc_system(relu, (0,), (1,))
    for u in [vec([x]) for x in (-1, 0, 1, "1/2")]:
        shift = (2 * u[0],)
        expected = PolyUnion(1, [P.translate(shift) for P in sys.value(u)])
        assert result.value(u).equals(expected)


def test_weighted_hessian():
    h = QuadraticMap((((2, 0), (0, 0)), ((0, 1), (1, 0))), ((0, 0), (0, 0)), (0, 0))
    assert weighted_hessian(h, (0, 0), (3, 5)) == ((6, 5), (5, 0))


def test_partial_rules():
    # h(x, w) = x + w x, with the parameter w frozen or not
    h = QuadraticMap((((0, 1), (1, 0)),), ((1, 0),), (0,), n_params=1)
    par1, par2 = chain_partial_full_rank(halfline, h, (0, 0), (1,))
    assert par1.value((0,)).equals(PolyUnion(1, [R]))
    assert par1.value((1,)).is_empty()
    assert par2.value((0,)).equals(PolyUnion(2, [Polyhedron(2, [], [((0, 1), 0)])]))
    assert par2.contains((0,), (7, 0)) and not par2.contains((0,), (0, 1))


def test_point_data_is_bound_to_its_point():
    h = PointData((0,), (0,), ((1,),), (((0,),),))
    assert h.jacobian((0,)) == ((1,),)
    with pytest.raises(ChainRuleError):
        h.jacobian((1,))


def test_witness_is_checkable():
    result = chain_full_rank(halfline, linear_map([[1, 1]]), (0, 0), (0, 0))
    v, w = result.witness((1, 0), (3, 3))
    assert v == (0,) and w == (3,)
    assert result.witness((1, 0), (1, 2)) is None
