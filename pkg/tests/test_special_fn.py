import math

import numpy as np
from numpy.polynomial import hermite
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from strichartz.special_fn import (Kind, MultiplierSpec, QuadratureConvergenceWarning, phi, phi_deriv, psi,
                                   psi_composed, psi_deriv, radial_rule, sphere_moment, sphere_rule,
                                   strict_max_margin, strip_sup, symbol_deriv, symbol_value, threshold)

lam_strategy = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(z.imag) <= 2)
r_strategy = st.floats(0, 10)


def phi_quad(lam, r, d):
    """Independent oracle: scipy adaptive quadrature with the algebraic weight."""
    e = (d - 3) / 2
    re = integrate.quad(lambda s: np.cos(lam * r * s).real, -1, 1, weight="alg", wvar=(e, e))[0]
    im = integrate.quad(lambda s: np.cos(lam * r * s).imag, -1, 1, weight="alg", wvar=(e, e))[0]
    norm = integrate.quad(lambda s: 1.0, -1, 1, weight="alg", wvar=(e, e))[0]
    return complex(re, im) / norm


@pytest.mark.parametrize("lam, r, d, expected", [
    (0.0, 5.0, 7, 1.0),
    (2.0, 1.5, 3, math.sin(3) / 3),
    (1j, 1.0, 1, math.cosh(1)),
])
def test_phi_examples(lam, r, d, expected):
    # accuracy is relative to the envelope max(1, |phi_{i Im lam}|)
    assert phi(lam, r, d) == pytest.approx(expected, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("d", [2, 4, 5, 6])
@pytest.mark.parametrize("lam, r", [(0.7, 2.0), (1 + 0.5j, 3.0), (2j, 1.5)])
def test_phi_matches_scipy_quad(lam, r, d):
    assert phi(lam, r, d) == pytest.approx(phi_quad(lam, r, d), rel=1e-11)


@pytest.mark.parametrize("lam, r", [(0.7, 2.0), (3.0, 4.0), (1 + 0.5j, 3.0)])
def test_phi_bessel_closed_form(lam, r):
    # d = 2: J_0; d = 4: 2 J_1(z)/z
    z = lam * r
    assert phi(lam, r, 2) == pytest.approx(complex(special.jv(0, z)), rel=1e-12)
    assert phi(lam, r, 4) == pytest.approx(complex(2 * special.jv(1, z) / z), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(lam_strategy, r_strategy, st.integers(1, 6))
def test_phi_even_in_lambda(lam, r, d):
    a, b = phi(lam, r, d), phi(-lam, r, d)
    assert abs(a - b) <= 1e-14 * max(1.0, abs(a))


@pytest.mark.parametrize("d", range(1, 8))
def test_normalization(d):
    assert phi(1.3 + 0.4j, 0.0, d) == 1
    assert psi(1.3 + 0.4j, 0.0, d) == pytest.approx(1, abs=1e-15)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 7])
def test_sphere_rule_weights(d):
    s, w = sphere_rule(d, 32).full()
    assert w.sum() == pytest.approx(1, abs=1e-15)
    # second moment of a coordinate on the sphere is 1/d
    assert (w * s**2).sum() == pytest.approx(1 / d, rel=1e-14)
    assert sphere_moment(d, 1) == pytest.approx(1 / d, rel=1e-14)


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_radial_rule(d):
    u, w = radial_rule(d, 16)
    assert w.sum() == pytest.approx(1, abs=1e-15)
    assert (w * u**2).sum() == pytest.approx(d / (d + 2), rel=1e-14)


@pytest.mark.parametrize("lam, k, r, d, expected", [
    (0.0, 1, 2.0, 5, 0.0),
    (1.0, 1, math.pi, 3, -1.0),
])
def test_phi_deriv_examples(lam, k, r, d, expected):
    assert phi_deriv(lam, r, d, k) == pytest.approx(expected, abs=1e-13)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 6])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_phi_second_derivative_moment(d, t):
    assert phi_deriv(0.0, t, d, 2) == pytest.approx(-t * t / d, rel=1e-13)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_phi_deriv_d3_closed_form(k):
    lam, r, h = 0.9 + 0.3j, 2.0, 1e-3
    f = lambda x: np.sin(x * r) / (x * r)
    # complex-step free check against finite differences of the closed form
    fd = {1: (f(lam + h) - f(lam - h)) / (2 * h),
          2: (f(lam + h) - 2 * f(lam) + f(lam - h)) / h**2,
          3: (f(lam + 2 * h) - 2 * f(lam + h) + 2 * f(lam - h) - f(lam - 2 * h)) / (2 * h**3)}[k]
    assert phi_deriv(lam, r, 3, k) == pytest.approx(fd, rel=1e-5)


def test_deriv_order_rejected():
    with pytest.raises(ValueError):
        phi_deriv(1.0, 1.0, 3, 9)
    with pytest.raises(ValueError):
        psi_deriv(1.0, 1.0, 3, -1)


@pytest.mark.parametrize("bad", [0, -1, 2.5])
def test_dimension_rejected(bad):
    with pytest.raises(ValueError):
        phi(1.0, 1.0, bad)


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        phi(1.0, -1.0, 3)


def test_psi_examples():
    assert psi(1.0, math.pi, 3) == pytest.approx(3 / math.pi**2, rel=1e-13)
    assert psi(5.0, 0.0, 4) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("a, t", [(0.5, 1.0), (1.0, 2.0), (2.0, 0.3)])
def test_psi_imaginary_axis_exceeds_one(d, a, t):
    v = psi(1j * a, t, d)
    assert abs(v.imag) <= 1e-15 * abs(v)
    assert v.real > 1


@pytest.mark.parametrize("d", [1, 2, 3, 5])
@pytest.mark.parametrize("lam, r", [(0.7, 2.0), (1 + 0.5j, 3.0), (2j, 1.0)])
def test_psi_direct_matches_composed(d, lam, r):
    assert psi(lam, r, d) == pytest.approx(psi_composed(lam, r, d), rel=1e-12)


@pytest.mark.parametrize("lam, r", [(0.7, 2.0), (1 + 0.5j, 3.0), (2j, 1.5)])
def test_psi_d2_equals_phi_d4(lam, r):
    assert psi(lam, r, 2) == pytest.approx(phi(lam, r, 4), rel=1e-13)


def test_psi_d3_closed_form():
    u = np.array([0.5, 2.0, 7.0])
    exact = 3 * (np.sin(u) - u * np.cos(u)) / u**3
    np.testing.assert_allclose(psi(u, 1.0, 3), exact, rtol=1e-12)


@pytest.mark.parametrize("spec, lam, expected", [
    (MultiplierSpec.heat(0.5, 3), 1j, math.exp(0.5)),
    (MultiplierSpec.laplacian(3), 2j, -4.0),
    (MultiplierSpec.spherical(1.0, 3), 1j, math.sinh(1)),
])
def test_symbol_value_examples(spec, lam, expected):
    assert symbol_value(spec, lam) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("spec, lam, k, expected", [
    (MultiplierSpec.laplacian(3), 3.0, 1, 6.0),
    (MultiplierSpec.laplacian(3), 3.0, 2, 2.0),
    (MultiplierSpec.laplacian(3), 3.0, 3, 0.0),
    (MultiplierSpec.heat(1.0, 3), 0.0, 1, 0.0),
    (MultiplierSpec.spherical(2.0, 5), 0.0, 2, -4 / 5),
])
def test_symbol_deriv_examples(spec, lam, k, expected):
    assert symbol_deriv(spec, lam, k) == pytest.approx(expected, rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("k", range(1, 7))
def test_heat_derivative_recursion(k):
    # closed form via Hermite polynomials: d^k/dx^k e^{-t x^2}
    t, lam = 0.7, 0.4 + 0.3j
    c = math.sqrt(t)
    H = hermite.hermval(c * lam, [0] * k + [1])
    exact = (-c) ** k * H * np.exp(-t * lam * lam)
    assert symbol_deriv(MultiplierSpec.heat(t, 3), lam, k) == pytest.approx(exact, rel=1e-13)


@pytest.mark.parametrize("spec, a, expected", [
    (MultiplierSpec.heat(0.5, 3), 1.0, math.exp(0.5)),
    (MultiplierSpec.spherical(1.0, 3), 1.0, math.sinh(1)),
    (MultiplierSpec.ball(1.0, 3), 1.0, 3 / math.e),
])
def test_threshold_examples(spec, a, expected):
    assert threshold(spec, a) == pytest.approx(expected, rel=1e-13)


def test_threshold_rejects_laplacian():
    with pytest.raises(ValueError):
        threshold(MultiplierSpec.laplacian(3), 1.0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(list(Kind)[:3]), st.integers(1, 5), st.floats(0.1, 3), st.floats(0.05, 2))
def test_threshold_increasing(kind, d, t, a):
    spec = MultiplierSpec.from_dict({"kind": kind.value, "t": t, "d": d})
    assert 1 < threshold(spec, a) < threshold(spec, a * 1.1)


@pytest.mark.parametrize("kind", ["spherical", "ball", "heat", "laplacian"])
def test_spec_roundtrip(kind):
    spec = MultiplierSpec.laplacian(4) if kind == "laplacian" else MultiplierSpec.from_dict(
        {"kind": kind, "t": 0.5, "d": 4})
    assert MultiplierSpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize("bad", [{"kind": "heat", "t": 0, "d": 3}, {"kind": "heat", "t": 1, "d": 0},
                                 {"kind": "wave", "t": 1, "d": 3}])
def test_spec_validation(bad):
    with pytest.raises(ValueError):
        MultiplierSpec.from_dict(bad)


@pytest.mark.parametrize("spec", [MultiplierSpec.spherical(1.0, 2), MultiplierSpec.ball(1.0, 3)])
def test_strict_max_margin_positive(spec):
    delta, argmax = strict_max_margin(spec, 1.0, n_re=41, n_im=41)
    assert delta > 0


def test_strip_sup_decreases_for_d3():
    sup = strip_sup(MultiplierSpec.spherical(1.0, 3), [10.0, 50.0, 200.0], 1.0)
    assert np.all(np.diff(sup) < 0)


def test_warning_class_is_warning():
    assert issubclass(QuadratureConvergenceWarning, Warning)
