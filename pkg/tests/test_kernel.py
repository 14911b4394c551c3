import numpy as np
import pytest

from beambvp.errors import HypothesisViolation, InvalidConfig, NegativeWeight, OutOfDomain
from beambvp.expressions import parse
from beambvp.kernel import (
    cone_constants,
    green,
    kernel_eval,
    kernel_weight,
    lower_envelope,
    rho,
    strip_lower_bound,
    upper_envelope,
)
from beambvp.quadrature import default_quadrature

A_ZERO = parse("0*t", "t")
A_HALF = parse("0.5", "t")
A_LIN = parse("t", "t")
A_QUAD = parse("t^2", "t")


def test_green_vanishes_on_boundary_lines():
    s = np.linspace(0.0, 1.0, 101)
    assert np.all(green(np.zeros_like(s), s) == 0.0)
    t = np.linspace(0.0, 1.0, 101)
    assert np.all(green(t, np.ones_like(t)) == 0.0)


def test_green_point_values():
    # direct substitution into the two branches
    assert green(0.5, 0.5) == pytest.approx(0.125 * 0.25 / 6.0, rel=1e-15)
    assert green(1.0, 0.5) == pytest.approx((0.25 - 0.125) / 6.0, rel=1e-15)


def test_green_branches_agree_on_diagonal():
    rng = np.random.default_rng(7)
    t = rng.uniform(0.0, 1.0, 100)
    below = (t**3 * (1.0 - t) ** 2 - (t - t) ** 3) / 6.0
    above = t**3 * (1.0 - t) ** 2 / 6.0
    assert np.max(np.abs(below - above)) <= 1e-15
    assert np.allclose(green(t, t), above, rtol=0, atol=1e-18)


def test_green_out_of_domain():
    with pytest.raises(OutOfDomain):
        green(-0.1, 0.5)
    with pytest.raises(OutOfDomain):
        green(0.5, 1.5)
    with pytest.raises(OutOfDomain):
        rho(2.0)


def test_rho_values():
    assert rho(0.0) == 0.0
    assert rho(0.5) == pytest.approx(0.125 / 6.0, rel=1e-15)
    assert rho(0.25) == pytest.approx(0.015625 / 6.0, rel=1e-15)
    t = np.linspace(0.0, 1.0, 401)
    assert np.allclose(rho(t), np.minimum(t**3, t**2 * (1 - t)) / 6.0, atol=0)


def test_green_nonnegative_and_enveloped():
    t = np.linspace(0.0, 1.0, 401)[:, None]
    s = np.linspace(0.0, 1.0, 401)[None, :]
    g = green(t, s)
    assert g.min() >= -1e-15
    assert np.max(lower_envelope(t, s) - g) <= 1e-14
    assert np.max(g - upper_envelope(s)) <= 1e-14


@pytest.mark.parametrize("theta", [0.1, 0.25, 0.4])
def test_green_strip_floor(theta):
    t = np.linspace(theta, 1.0 - theta, 301)[:, None]
    s = np.linspace(0.0, 1.0, 301)[None, :]
    assert np.max(strip_lower_bound(theta, s) - green(t, s)) <= 1e-14


def test_green_triangle_floor():
    t = np.linspace(0.0, 1.0, 301)[:, None]
    s = np.linspace(0.0, 1.0, 301)[None, :]
    g = green(t, s)
    floor = np.where(s <= t, s * (t - s) ** 2 / 6.0, -np.inf)
    assert np.max(floor - g) <= 1e-14


def test_kernel_weight_zero_weight_function():
    q = default_quadrature()
    s = np.linspace(0.0, 1.0, 11)
    assert np.all(kernel_weight(s, A_ZERO, 0.0, q) == 0.0)


def test_kernel_weight_closed_form():
    # for a = 1/2 the weight is exactly (1-s)^2 (1-(1-s)^2)/24 at panel
    # boundaries (the tau integrand is piecewise cubic)
    q = default_quadrature()
    assert kernel_weight(0.5, A_HALF, 0.5, q) == pytest.approx(0.0078125, abs=1e-15)
    for s in np.linspace(0.0, 1.0, 9):
        expected = (1 - s) ** 2 * (1 - (1 - s) ** 2) / 24.0
        assert kernel_weight(float(s), A_HALF, 0.5, q) == pytest.approx(expected, abs=1e-14)
    assert kernel_weight(1.0, A_QUAD, 1 / 3, q) == pytest.approx(0.0, abs=1e-16)


def test_kernel_weight_rejects_bad_alpha():
    q = default_quadrature()
    with pytest.raises(HypothesisViolation):
        kernel_weight(0.5, A_LIN, 1.2, q)


def test_kernel_eval_reduces_to_green():
    q = default_quadrature()
    t = np.linspace(0.0, 1.0, 21)[:, None]
    s = np.linspace(0.0, 1.0, 21)
    assert np.allclose(kernel_eval(t, s, A_ZERO, 0.0, q), green(t, s[None, :]), atol=0)


def test_kernel_eval_examples():
    q = default_quadrature()
    assert kernel_eval(0.0, 0.5, A_HALF, 0.5, q) == pytest.approx(0.0078125, abs=1e-15)
    t = np.linspace(0.0, 1.0, 21)
    vals = np.array([kernel_eval(float(x), 1.0, A_QUAD, 1 / 3, q) for x in t])
    assert np.max(np.abs(vals)) <= 1e-15


def test_kernel_upper_bound():
    # kernel(t, s) <= s(1-s)^2 / (6(1-alpha))
    q = default_quadrature()
    from beambvp.quadrature import integrate
    alpha = integrate(A_QUAD, q)
    t = np.linspace(0.0, 1.0, 201)[:, None]
    s = np.linspace(0.0, 1.0, 201)
    kern = kernel_eval(t, s, A_QUAD, alpha, q)
    bound = s * (1 - s) ** 2 / (6.0 * (1.0 - alpha))
    assert np.max(kern - bound[None, :]) <= 1e-12


def test_cone_constants_quadratic_weight():
    q = default_quadrature()
    c = cone_constants(A_QUAD, 0.25, q)
    assert c.alpha == pytest.approx(1 / 3, rel=1e-14)
    assert c.beta == pytest.approx((0.75**3 - 0.25**3) / 3, rel=1e-14)
    assert c.gamma == pytest.approx(0.25**3 * (1 - 1 / 3 + c.beta), rel=1e-14)
    assert c.gamma == pytest.approx(0.012532552083333333, rel=1e-12)


def test_cone_constants_linear_weight():
    q = default_quadrature()
    c = cone_constants(A_LIN, 0.25, q)
    assert c.alpha == pytest.approx(0.5, rel=1e-14)
    assert c.beta == pytest.approx(0.25, rel=1e-14)
    assert c.gamma == pytest.approx(0.01171875, rel=1e-12)


@pytest.mark.parametrize("theta", [0.05, 0.2, 0.35, 0.49])
def test_beta_never_exceeds_alpha(theta):
    q = default_quadrature()
    c = cone_constants(A_QUAD, theta, q)
    assert 0.0 <= c.beta <= c.alpha
    assert 0.0 < c.gamma < 1.0


def test_cone_constants_gates():
    q = default_quadrature()
    with pytest.raises(HypothesisViolation):
        cone_constants(parse("2*t", "t"), 0.25, q)
    with pytest.raises(HypothesisViolation):
        cone_constants(A_ZERO, 0.25, q)
    with pytest.raises(NegativeWeight):
        cone_constants(parse("t-1", "t"), 0.25, q)
    with pytest.raises(InvalidConfig):
        cone_constants(A_QUAD, 0.6, q)
