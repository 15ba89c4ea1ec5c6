import pytest

from so2calc.catalog import catalog, interval, orthant_product, probe_directions, unit_simplex
from so2calc.oracle import (
    CoderivativeOracle,
    OracleError,
    agree,
    brute_soc,
    graph_of_subgradient_map,
    limiting_normals_at,
)
from so2calc.plq import Indicator, SupportPLQ
from so2calc.polyhedra import Polyhedron
from so2calc.second_order import PolyUnion

cross = PolyUnion(
    2,
    [Polyhedron(2, [], [((0, 1), 0)]), Polyhedron(2, [], [((1, 0), 0)])],
)


def test_limiting_normals_of_a_cross():
    N = limiting_normals_at(cross, (0, 0))
    assert N.contains((1, 0)) and N.contains((0, -3))
    assert not N.contains((1, 1))


def test_limiting_normals_away_from_the_corner():
    N = limiting_normals_at(cross, (2, 0))
    assert N.equals(PolyUnion(2, [Polyhedron(2, [], [((1, 0), 0)])]))


def test_graph_of_halfline_normal_cone():
    G = graph_of_subgradient_map(Indicator(orthant_product(1, 0)))
    assert G.contains((-1, 0)) and G.contains((0, 4))
    assert not G.contains((-1, 1)) and not G.contains((1, 0))


def test_brute_values_by_hand():
    theta = Indicator(orthant_product(1, 0))
    assert brute_soc(theta, (0,), (0,), (1,)).equals(PolyUnion(1, [Polyhedron.nonnegative_orthant(1)]))
    assert brute_soc(theta, (0,), (0,), (-1,)).equals(PolyUnion(1, [Polyhedron.origin(1)]))
    relu = SupportPLQ.support(interval(0, 1))
    assert brute_soc(relu, (0,), ("1/2",), (1,)).is_empty()


def test_oracle_rejects_points_off_the_graph():
    with pytest.raises(OracleError):
        CoderivativeOracle(Indicator(orthant_product(1, 0)), (0,), (-1,))
    with pytest.raises(OracleError):
        limiting_normals_at(cross, (1, 1))


def test_membership_and_value_agree():
    oracle = CoderivativeOracle(Indicator(orthant_product(2, 0)), (0, 0), (0, 0))
    for u in probe_directions(2):
        val = oracle.value(u)
        for w in [(0, 0), (1, 0), (0, 1), (-1, 2), (1, 1)]:
            assert oracle.contains(u, w) == val.contains(w)


@pytest.mark.parametrize("inst", catalog(), ids=lambda i: i.name)
def test_catalog_agreement(inst):
    assert all(same for _, same in agree(inst.theta, inst.z, inst.v, inst.directions))


def test_support_of_simplex_in_r4_at_a_vertex_with_full_tangent_cone():
    # z = 0 makes the whole tangent cone of the simplex critical.
    theta = SupportPLQ.support(unit_simplex(4))
    results = agree(theta, (0, 0, 0, 0), (1, 0, 0, 0), probe_directions(4))
    assert len(results) >= 9
    assert all(same for _, same in results)
