from __future__ import annotations

from fractions import Fraction
from math import factorial

import pytest

from treesums.algebra import QPoly, Series
from treesums.configuration import (
    SHIPPED_INSTANCES,
    ConfigInstance,
    chi_conf_series,
    config_table,
    configuration_tensor_data,
    eta_series,
    phi_x_series,
    poincare_confspace_strata,
    potential_x_derivative,
    potential_x_derivative_euler,
    printed_brackets,
    psi_series,
    verify_eta_equations,
    verify_ramification_conf,
    verify_y0_equations,
    x0_closed_form,
    y0_series,
)
from treesums.engine import partition_function_direct, verify_critical_value

ids = [str(i) for i in SHIPPED_INSTANCES]


def test_kappa():
    assert ConfigInstance(3, QPoly.const(1)).kappa == QPoly.parse("q^4+q^2+1")
    with pytest.raises(ValueError):
        ConfigInstance(0, QPoly.const(1))


@pytest.mark.parametrize("inst", SHIPPED_INSTANCES, ids=ids)
def test_two_points_is_blowup_of_diagonal(inst):
    # X x X blown up along the diagonal: the exceptional divisor adds P_X (kappa_m - 1)
    expected = inst.P * inst.P + inst.P * (inst.kappa - 1)
    assert poincare_confspace_strata(inst, 2) == expected
    assert psi_series(inst, 2)[2] * 2 == expected


@pytest.mark.parametrize("inst", SHIPPED_INSTANCES, ids=ids)
def test_strata_equal_series(inst):
    psi = psi_series(inst, 5)
    assert psi[0] == QPoly.const(1)
    for n in range(1, 6):
        assert poincare_confspace_strata(inst, n) == psi[n] * factorial(n)


@pytest.mark.parametrize("inst", SHIPPED_INSTANCES, ids=ids)
def test_x0_closed_form(inst):
    x0 = x0_closed_form(inst, 8)
    assert x0 == phi_x_series(inst, 8)
    psi = psi_series(inst, 9)
    # coefficient of t^n is P_{X[n+1]} / n!
    for n in range(0, 4):
        assert x0[n] * factorial(n) == psi[n + 1] * factorial(n + 1) - (inst.P if n == 0 else 0)


@pytest.mark.parametrize("inst", SHIPPED_INSTANCES, ids=ids)
def test_printed_brackets(inst):
    x0 = x0_closed_form(inst, 3)
    for n, b in enumerate(printed_brackets(inst), start=1):
        assert x0[n] * factorial(n) == inst.P * b


def test_printed_bracket_example():
    # X = P^1: first bracket is P_X itself
    b1, _, _ = printed_brackets(SHIPPED_INSTANCES[0])
    assert b1 == QPoly.parse("q^2+1")


@pytest.mark.parametrize("inst", SHIPPED_INSTANCES, ids=ids)
def test_y0_equations_and_potential(inst):
    assert all(r.passed for r in verify_y0_equations(inst, 12))
    assert potential_x_derivative(inst, y0_series(inst, 10)).is_zero()


@pytest.mark.parametrize("m", [1, 2, 3])
def test_eta(m):
    assert all(r.passed for r in verify_eta_equations(m, 12))
    assert potential_x_derivative_euler(m, eta_series(m, 10)).is_zero()
    assert eta_series(m, 3)[1] == 1


@pytest.mark.parametrize("inst", SHIPPED_INSTANCES, ids=ids)
def test_euler_specialisation(inst):
    assert psi_series(inst, 8).at_q(-1) == chi_conf_series(inst.euler, inst.m, 8)


def test_zero_euler_gives_one():
    assert chi_conf_series(0, 2, 8) == Series.one(8)


@pytest.mark.parametrize("inst", SHIPPED_INSTANCES, ids=ids)
def test_engine_route(inst):
    data = configuration_tensor_data(inst)
    z = partition_function_direct(data, 5)
    assert verify_critical_value(data, 5, z).passed
    # the tree sum is the generating function of P_{X[n]} for n >= 2, its t-derivative is x0
    psi = psi_series(inst, 5)
    assert all(z[n] == psi[n] for n in range(2, 6))
    assert z.derivative() == x0_closed_form(inst, 4)


@pytest.mark.parametrize("q2,m", [(2, 1), (3, 2), (Fraction(5, 2), 3)])
def test_ramification(q2, m):
    assert all(r.passed for r in verify_ramification_conf(q2, m, 12))


@pytest.mark.parametrize("inst", SHIPPED_INSTANCES, ids=ids)
def test_table_methods_agree(inst):
    a, b = config_table(inst, 4, "series"), config_table(inst, 4, "strata")
    assert [r.poincare for r in a.rows] == [r.poincare for r in b.rows]
    assert all(r.euler == r.poincare(Fraction(-1)) for r in a.rows)
