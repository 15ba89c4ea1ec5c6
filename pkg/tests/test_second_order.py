from fractions import Fraction

import pytest

from so2calc.catalog import example_theta, interval, orthant_product
from so2calc.linalg import identity
from so2calc.plq import Indicator, SupportPLQ
from so2calc.polyhedra import Polyhedron, Subspace
from so2calc.second_order import (
    PolyUnion,
    SecondOrderError,
    expected_zero_subspace,
    soc_at_zero,
    soc_membership,
    soc_system,
    soc_value,
)

half = Fraction(1, 2)
R = Polyhedron.whole(1)
R_plus = Polyhedron.nonnegative_orthant(1)
ZERO1 = Polyhedron.origin(1)


def value(theta, z, v, u):
    return soc_value(soc_system(theta, z, v), u)


def single(U, P):
    return U.equals(PolyUnion(P.dim, [P]))


class TestOneDimensional:
    # gph N_{ℝ−} near the origin is {z ≤ 0, v = 0} ∪ {z = 0, v ≥ 0}
    theta = Indicator(orthant_product(1, 0))

    @pytest.mark.parametrize("u,expected", [(1, R_plus), (0, R), (-1, ZERO1), (half, R_plus)])
    def test_indicator_of_halfline(self, u, expected):
        assert single(value(self.theta, (0,), (0,), (u,)), expected)

    def test_relu_kink_matches_halfline_graph(self):
        relu = SupportPLQ.support(interval(0, 1))
        for u, expected in [(1, R_plus), (0, R), (-1, ZERO1)]:
            assert single(value(relu, (0,), (0,), (u,)), expected)

    def test_relu_interior_subgradient(self):
        relu = SupportPLQ.support(interval(0, 1))
        assert single(value(relu, (0,), (half,), (0,)), R)
        assert value(relu, (0,), (half,), (1,)).is_empty()

    def test_smooth_quadratic_piece(self):
        huber = SupportPLQ(interval(0, 1), identity(1))
        assert single(value(huber, (half,), (half,), (3,)), Polyhedron.point((3,)))
        # affine piece: z − 1/2 near 3/2
        assert single(value(huber, ("3/2",), (1,), (2,)), ZERO1)

    def test_membership(self):
        sys = soc_system(self.theta, (0,), (0,))
        assert soc_membership(sys, (1,), (5,))
        assert not soc_membership(sys, (1,), (-1,))
        assert soc_membership(sys, (0,), (-7,))
        assert sys.domain_contains((-1,))

    def test_not_a_subgradient(self):
        with pytest.raises(SecondOrderError):
            soc_system(self.theta, (0,), (-1,))
        with pytest.raises(SecondOrderError):
            soc_system(self.theta, (0, 0), (0, 0))


class TestAtZero:
    def test_example_second_order_qc_witness_lies_in_value_at_zero(self):
        theta = example_theta()
        v = (0, 0, half, half)
        (S,) = soc_at_zero(theta, (0, 0, 0, 0), v)
        assert S.contains((1, 1, -1, -1))
        assert S.equals(expected_zero_subspace(theta, (0, 0, 0, 0), v))

    def test_indicator_value_at_zero(self):
        theta = Indicator(orthant_product(2, 0))
        pieces = soc_at_zero(theta, (0, 0), (1, 0))
        # critical cone {0} × ℝ₋, so the value at 0 contains the first axis
        assert any(S.contains((1, 0)) for S in pieces)

    def test_plq_full_rank_q(self):
        theta = SupportPLQ(interval(-1, 1), identity(1))
        (S,) = soc_at_zero(theta, (0,), (0,))
        assert S.equals(Subspace.zero(1))


def test_system_faces_and_pairs():
    sys = soc_system(Indicator(orthant_product(2, 0)), (0, 0), (0, 0))
    assert len(sys.faces) == 4
    assert all(P.inner.subset_of(P.outer) for P in sys.pairs)
    assert sys.mode == "indicator" and sys.dim == 2


def test_polyunion_normalized_drops_covered_pieces():
    U = PolyUnion(1, [R_plus, Polyhedron.point((1,)), R_plus])
    assert len(U.normalized()) == 1
    assert U.equals(PolyUnion(1, [R_plus]))
    assert not U.contains((-1,))
