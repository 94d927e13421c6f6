from __future__ import annotations

import json
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treesums.algebra import QPoly, Series
from treesums.configuration import SHIPPED_INSTANCES, configuration_tensor_data
from treesums.engine import (
    EnumerationBudgetError,
    TensorData,
    critical_point_solve,
    partition_function_direct,
    potential_build,
    quadratic_data,
    standard_weight,
    tree_contraction,
    verify_critical_value,
    verify_t_derivative,
    verify_critical_residual,
)
from treesums.moduli import moduli_tensor_data
from treesums.trees import Tree, aut_order, free_trees


def _all_ones() -> TensorData:
    return TensorData("ones", ("*",), ((1,),), lambda m: QPoly.const(0 if len(m) == 2 else 1))


def test_two_vertex_tree_weight():
    t = Tree(2, ((0, 1),))
    w = standard_weight(t, {(0, 0): "*", (1, 0): "*"}, quadratic_data(), 4)
    assert w == Series([0, 0, Fraction(1, 2), 0, 0], 4, "poly")


def test_three_star_weight():
    star = Tree(4, ((0, 1), (0, 2), (0, 3)))
    marking = {flag: "*" for flag in star.flags}
    assert standard_weight(star, marking, _all_ones(), 4) == Series([0, 0, 0, Fraction(1, 6), 0], 4, "poly")


def test_quadratic_partition_function():
    assert partition_function_direct(quadratic_data(), 6) == Series([0, 0, Fraction(1, 2)], 6, "poly")


@pytest.mark.parametrize("inst", SHIPPED_INSTANCES, ids=str)
def test_contraction_equals_sum_of_markings(inst):
    data = configuration_tensor_data(inst)
    for n in range(2, 6):
        for tree in free_trees(n):
            flags = tree.flags
            total = Series.zero(n, "poly")
            for marks in product(data.index_set, repeat=len(flags)):
                total = total + standard_weight(tree, dict(zip(flags, marks)), data, n)
            ends = sum(1 for k in tree.valencies if k == 1)
            expected = Series.constant(tree_contraction(tree, data) / aut_order(tree), n, "poly").shift(ends)
            assert total == expected


def test_moduli_partition_function_leading_terms():
    z = partition_function_direct(moduli_tensor_data(), 5)
    assert z[2] == QPoly.const(Fraction(1, 2))
    assert z[3] == QPoly.const(Fraction(1, 6))
    assert z[4] == QPoly.parse("q^2+1") / 24


def test_json_import_matches_builtin():
    entries = [{"marks": ["*"], "value": [[0, "1", "1"]]}]
    for k in range(3, 8):
        entries.append({"marks": ["*"] * k, "value": moduli_tensor_data().C(("*",) * k).to_json()})
    payload = {"name": "moduli-json", "index_set": ["*"], "propagator": [["1"]], "vertex_tensors": entries}
    data = TensorData.from_json(json.dumps(payload))
    assert partition_function_direct(data, 6) == partition_function_direct(moduli_tensor_data(), 6)


def test_budget_error():
    with pytest.raises(EnumerationBudgetError):
        partition_function_direct(moduli_tensor_data(), 6, max_trees=3)


def test_uncapped_bivalent_contributions_detected():
    data = TensorData("chain", ("*",), ((1,),), lambda m: QPoly.const(1), bivalent_cap=0)
    with pytest.raises(EnumerationBudgetError):
        partition_function_direct(data, 3)


def test_tensor_data_validation():
    with pytest.raises(ValueError):
        TensorData("bad", ("a", "b"), ((1, 2), (0, 1)), lambda m: QPoly.const(1 if len(m) == 1 else 0))
    with pytest.raises(ValueError):
        TensorData("nocap", ("*",), ((1,),), lambda m: QPoly.const(1))
    with pytest.raises(ValueError):
        TensorData("singular", ("a", "b"), ((1, 1), (1, 1)), lambda m: QPoly.const(1 if len(m) == 1 else 0))


@pytest.mark.parametrize(
    "data", [quadratic_data(), _all_ones(), moduli_tensor_data()], ids=lambda d: d.name
)
def test_critical_value_single_index(data):
    z = partition_function_direct(data, 6)
    assert verify_critical_value(data, 6, z).passed
    assert verify_t_derivative(data, 6, z).passed
    assert verify_critical_residual(data, 6).passed


def test_critical_point_of_quadratic():
    p = critical_point_solve(potential_build(quadratic_data(), 5), 5)
    assert p.critical_point[0] == Series.t(5, "poly")
    assert p.critical_value == Series([0, 0, Fraction(1, 2)], 5, "poly")


@settings(max_examples=25, deadline=None)
@given(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)).filter(lambda g: g[0] * g[2] != g[1] ** 2),
    st.lists(st.integers(-2, 2), min_size=10, max_size=10),
)
def test_critical_value_random_two_index_data(g, cs):
    # constant tensors on {a, b}: ranks 1, 3 and 4, rank 2 vanishing
    table = {}
    keys = [("a",), ("b",), ("a", "a", "a"), ("a", "a", "b"), ("a", "b", "b"), ("b", "b", "b"),
            ("a", "a", "a", "a"), ("a", "a", "b", "b"), ("a", "b", "b", "b"), ("b", "b", "b", "b")]
    for k, c in zip(keys, cs):
        table[k] = QPoly.const(c)
    data = TensorData("random", ("a", "b"), ((g[0], g[1]), (g[1], g[2])), lambda m: table.get(m, QPoly()))
    z = partition_function_direct(data, 4)
    assert verify_critical_value(data, 4, z).passed
    assert verify_t_derivative(data, 4, z).passed


def test_interface_aliases():
    from treesums import engine

    assert engine.verify_claim_061 is engine.verify_critical_value
    assert engine.verify_claim_062 is engine.verify_t_derivative
