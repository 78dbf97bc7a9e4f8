import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from rrshift.quadrature import (
    PanelRule,
    _unit_moments,
    convergence_order,
    filon_hermite,
    gauss_legendre,
    panel_edges,
    richardson,
    solid_angle_rule,
)


def test_gauss_legendre_exact_for_top_degree():
    x, w = gauss_legendre(5)
    assert np.sum(w) == pytest.approx(1.0, abs=1e-15)
    assert np.sum(w * x**9) == pytest.approx(0.1, rel=1e-14)


def test_panel_edges_drops_degenerate_intervals():
    e = panel_edges([0.0, 1.0, 1.0, 3.0], [2, 5, 4])
    np.testing.assert_allclose(e, [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])


def test_panel_rule_rejects_unsorted_edges():
    with pytest.raises(ValueError):
        PanelRule([0.0, 2.0, 1.0])


def test_panel_rule_matches_scipy_quad():
    rule = PanelRule(np.linspace(-1.0, 2.0, 7), 8)
    ref, _ = integrate.quad(lambda x: np.exp(np.sin(3 * x)), -1.0, 2.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert rule.integrate(lambda x: np.exp(np.sin(3 * x))) == pytest.approx(ref, rel=1e-12)


@given(st.floats(-1.0, 2.0), st.floats(-1.0, 2.0))
def test_cumulative_is_antiderivative(x, origin):
    rule = PanelRule(np.linspace(-1.0, 2.0, 5), 8)
    F = rule.cumulative(np.cos, np.array([x]), origin=origin)[0]
    assert F == pytest.approx(np.sin(x) - np.sin(origin), abs=1e-13)


def test_cumulative_outside_range_raises():
    with pytest.raises(ValueError):
        PanelRule([0.0, 1.0]).cumulative(np.cos, np.array([1.5]))


@given(st.floats(0.0, 3.0))
def test_unit_moments_match_quadrature(theta):
    got = _unit_moments(np.array([theta]))[:, 0]
    for n in range(4):
        re, _ = integrate.quad(lambda s: s**n * np.cos(theta * s), 0, 1, epsabs=1e-15)
        im, _ = integrate.quad(lambda s: s**n * np.sin(theta * s), 0, 1, epsabs=1e-15)
        assert got[n] == pytest.approx(re + 1j * im, abs=1e-14)


def test_unit_moments_continuous_across_branch_switch():
    np.testing.assert_allclose(_unit_moments(np.array([1.0 - 1e-12]))[:, 0],
                               _unit_moments(np.array([1.0 + 1e-12]))[:, 0], atol=1e-12)


@settings(max_examples=30)
@given(st.floats(-500.0, 500.0))
def test_filon_exact_for_cubics(k):
    # Hermite interpolation reproduces cubics, so the rule is exact.
    x = np.linspace(-1.0, 1.5, 6)
    f = 1.0 - 2.0 * x + 0.5 * x**3
    fp = -2.0 + 1.5 * x**2
    got = filon_hermite(x, f, fp, np.array([k]))[0]
    fine = PanelRule(np.linspace(-1.0, 1.5, 400), 16)
    ref = fine.integrate(lambda s: (1.0 - 2.0 * s + 0.5 * s**3) * np.exp(1j * k * s))
    assert got == pytest.approx(ref, abs=1e-11)


def test_filon_fourth_order_in_panel_width():
    errs = []
    for n in (20, 40, 80):
        x = np.linspace(0.0, 2.0, n + 1)
        got = filon_hermite(x, np.exp(-x), -np.exp(-x), np.array([30.0]))[0]
        exact = (np.exp((30j - 1.0) * 2.0) - 1.0) / (30j - 1.0)
        errs.append(abs(got - exact))
    assert np.log2(errs[0] / errs[1]) > 3.8
    assert np.log2(errs[1] / errs[2]) > 3.8


def test_solid_angle_rule_total():
    c, w = solid_angle_rule(16)
    assert np.sum(w) == pytest.approx(4 * np.pi, rel=1e-15)
    assert np.sum(w * c**2) == pytest.approx(4 * np.pi / 3, rel=1e-14)


def test_convergence_order_and_richardson():
    h = np.array([0.1, 0.05, 0.025])
    vals = 2.0 + 3.0 * h**4
    assert convergence_order(vals) == pytest.approx(4.0, abs=1e-9)
    assert richardson(vals[1], vals[2], 2.0, 4) == pytest.approx(2.0, abs=1e-14)
    assert convergence_order([1.0, 1.0, 1.0]) == np.inf
