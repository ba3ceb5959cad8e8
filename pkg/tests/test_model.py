import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from netform.graph import Graph, complete_graph, empty_graph, star_graph
from netform.model import (
    BenefitFunction,
    Homogeneous,
    Matrix,
    Separable,
    StateDependent,
    benefit,
    node_utility,
    potential_cost,
    total_utility,
)

from conftest import benefit_tables, graphs

TABLE = BenefitFunction.from_table([1.0, 0.5])


class TestBenefit:
    def test_decay(self):
        assert benefit(BenefitFunction.decay(0.5), 2) == 0.25

    def test_table_lookup(self):
        assert benefit(BenefitFunction.from_table([1.0, 0.4]), 1) == 1.0

    def test_increasing_table_rejected(self):
        with pytest.raises(ValueError, match="must exceed"):
            BenefitFunction.from_table([1.0, 1.1])

    @pytest.mark.parametrize("bad", [[], [1.0, 0.0], [-1.0], [1.0, math.nan]])
    def test_other_bad_tables(self, bad):
        with pytest.raises(ValueError):
            BenefitFunction.from_table(bad)

    @pytest.mark.parametrize("delta", [0.0, 1.0, 1.5, -0.2])
    def test_delta_range(self, delta):
        with pytest.raises(ValueError):
            BenefitFunction.decay(delta)

    def test_exactly_one_form(self):
        with pytest.raises(ValueError):
            BenefitFunction()
        with pytest.raises(ValueError):
            BenefitFunction(delta=0.5, table=(1.0,))

    def test_distance_outside_table(self):
        with pytest.raises(ValueError):
            TABLE(3)

    def test_lookup_pads_self_and_unreachable(self):
        lk = BenefitFunction.decay(0.5).lookup(4)
        assert lk.tolist() == [0.0, 0.5, 0.25, 0.125, 0.0]


class TestCosts:
    def test_homogeneous(self):
        assert potential_cost(Homogeneous(0.3), 2, 0) == 0.3

    def test_separable_charges_own_cost(self):
        assert potential_cost(Separable((0.1, 0.5, 0.2)), 1, 0) == 0.5

    def test_state_dependent(self):
        assert potential_cost(StateDependent(0.1, 1.0), 0, 1, states=(0.2, 0.7)) == pytest.approx(0.6)

    def test_state_dependent_needs_states(self):
        with pytest.raises(ValueError):
            potential_cost(StateDependent(0.1, 1.0), 0, 1)

    def test_matrix_validation(self):
        with pytest.raises(ValueError):
            Matrix(((0.0, 1.0), (2.0, 0.0)))
        with pytest.raises(ValueError):
            Matrix(((1.0, 1.0), (1.0, 0.0)))
        assert potential_cost(Matrix(((0.0, 0.4), (0.4, 0.0))), 1, 0) == 0.4

    def test_negative_costs_rejected(self):
        with pytest.raises(ValueError):
            Homogeneous(-0.1)
        with pytest.raises(ValueError):
            Separable((0.1, -1.0))

    def test_separable_dimension(self):
        with pytest.raises(ValueError):
            Separable((0.1, 0.2, 0.3)).matrix(4)


class TestUtility:
    def test_star_three(self):
        g = star_graph(3, 0)
        cm = Homogeneous(0.4)
        assert node_utility(g, 0, TABLE, cm) == pytest.approx(1.2)
        assert node_utility(g, 1, TABLE, cm) == pytest.approx(1.1)
        assert total_utility(g, TABLE, cm).total == pytest.approx(3.4)

    def test_complete_three(self):
        uv = total_utility(complete_graph(3), TABLE, Homogeneous(0.4))
        assert uv.u == pytest.approx((1.2, 1.2, 1.2))
        assert uv.total == pytest.approx(3.6)

    def test_empty(self):
        uv = total_utility(empty_graph(4), BenefitFunction.decay(0.5), Homogeneous(0.3))
        assert uv.u == (0.0, 0.0, 0.0, 0.0) and uv.total == 0.0

    def test_unreachable_nodes_give_nothing(self):
        g = Graph.from_edges(4, [(0, 1)])
        assert node_utility(g, 0, BenefitFunction.decay(0.5), Homogeneous(0.1)) == pytest.approx(0.4)


@given(graphs(min_n=2, max_n=6), st.floats(0.05, 0.95), st.floats(0.0, 2.0))
def test_total_is_sum_of_nodes(g, delta, c):
    bf, cm = BenefitFunction.decay(delta), Homogeneous(c)
    uv = total_utility(g, bf, cm)
    assert uv.total == pytest.approx(sum(node_utility(g, i, bf, cm) for i in range(g.n)))


@given(graphs(min_n=2, max_n=6), st.floats(0.05, 0.95), st.floats(0.0, 2.0), st.permutations(range(6)))
def test_utility_is_label_invariant(g, delta, c, perm):
    perm = [p for p in perm if p < g.n]
    bf, cm = BenefitFunction.decay(delta), Homogeneous(c)
    before = total_utility(g, bf, cm).u
    after = total_utility(g.relabel(perm), bf, cm).u
    for v in range(g.n):
        assert after[perm[v]] == pytest.approx(before[v])


@given(st.data())
def test_adding_a_link_never_lowers_gross_benefit(data):
    g = data.draw(graphs(min_n=2, max_n=6))
    table = data.draw(benefit_tables(g.n - 1)) if g.n > 1 else [1.0]
    bf, free = BenefitFunction.from_table(table), Homogeneous(0.0)
    i = data.draw(st.integers(0, g.n - 1))
    j = data.draw(st.integers(0, g.n - 1).filter(lambda v: v != i))
    before = np.array(total_utility(g, bf, free).u)
    after = np.array(total_utility(g.add_edge(i, j), bf, free).u)
    assert np.all(after >= before - 1e-12)
