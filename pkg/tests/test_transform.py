import math

import numpy as np
import pytest

from strichartz import grid as G
from strichartz import transform as T
from strichartz.special_fn import phi

GRID3 = G.RadialGrid(0.01, 20.0, 3)


def gaussian(grid, width=4.0, c=1.0):
    return G.SampledRadialFunction.from_callable(lambda r: c * np.exp(-r * r / width), grid)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 7])
def test_bessel_kernel_matches_phi(d):
    lam = np.array([0.0, 1e-5, 0.3, 2.0, 11.0])
    r = np.array([0.0, 0.5, 3.0, 9.0])
    np.testing.assert_allclose(T.bessel_kernel(lam, r, d), phi(lam[:, None].astype(complex), r[None, :], d).real,
                               rtol=1e-11, atol=1e-14)


@pytest.mark.parametrize("d", [1, 3, 5])
def test_gaussian_transform_pair(d):
    # exp(-r^2/4) transforms to (4 pi)^{d/2} exp(-lam^2)
    g = T.spherical_fourier(gaussian(G.RadialGrid(0.01, 20.0, d)), np.linspace(0, 6, 61))
    exact = (4 * math.pi) ** (d / 2) * np.exp(-g.lambdas**2)
    assert np.max(np.abs(g.values - exact)) <= 1e-10 * exact[0]


def test_transform_at_zero_is_total_integral():
    f = gaussian(GRID3, 1.0)
    g = T.spherical_fourier(f, [0.0, 1.0, 2.0])
    assert g.values[0] == pytest.approx(math.pi**1.5, rel=1e-12)


def test_spectral_samples_even_and_csv():
    g = T.spherical_fourier(gaussian(GRID3), np.linspace(0, 5, 11))
    np.testing.assert_array_equal(g.at([-1.5, 1.5])[0], g.at([-1.5, 1.5])[1])
    back = T.SpectralSamples.from_csv(g.to_csv())
    np.testing.assert_array_equal(back.values, g.values)
    assert back.d == 3


@pytest.mark.parametrize("lam", [[0.0, 1.0], [1.0, 0.5, 2.0], [-1.0, 0.0, 1.0]])
def test_spectral_samples_validation(lam):
    with pytest.raises(ValueError):
        T.SpectralSamples(np.array(lam), np.zeros(len(lam)), 3)


def test_inverse_of_zero():
    g = T.SpectralSamples(T.default_lambdas(), np.zeros(T.N_LAMBDA), 3)
    out = T.inverse_spherical_fourier(g, G.RadialGrid(0.1, 5.0, 3))
    assert np.all(out.values == 0)


def test_calibration_constant():
    fitted = T.calibration_constant(3)
    assert fitted == pytest.approx(T.analytic_inverse_constant(3), rel=1e-12)
    assert T.fit_inverse_constant(3, width=1.0) == pytest.approx(fitted, rel=1e-8)


@pytest.mark.parametrize("width, c", [(4.0, 1.0), (1.0, 1.0), (1.0, 5.0)])
def test_roundtrip(width, c):
    assert T.roundtrip_error(gaussian(GRID3, width, c)) <= 1e-6


def test_roundtrip_scale_invariant():
    a = T.roundtrip_error(gaussian(GRID3, 1.0))
    b = T.roundtrip_error(gaussian(GRID3, 1.0, 5.0))
    assert b == pytest.approx(a, rel=1e-6, abs=1e-15)


def test_compact_bump_reported():
    def bump(r):
        out = np.zeros_like(r)
        inside = r < 1
        out[inside] = np.exp(-1 / (1 - r[inside] ** 2))
        return out
    f = G.SampledRadialFunction.from_callable(bump, GRID3)
    err = T.roundtrip_error(f, decay_tol=1.0)
    assert math.isfinite(err)


def test_even_dimension_floor():
    # Simpson on the odd r^{d-1} factor limits d = 2 to a few 1e-5 at h = 0.01
    f = gaussian(G.RadialGrid(0.01, 20.0, 2))
    assert T.roundtrip_error(f, decay_tol=1e-6) <= 1e-4


def test_diagonalization():
    assert T.diagonalization_error(gaussian(GRID3), 1.0) <= 1e-6


def test_rejects_non_decaying():
    with pytest.raises(T.NonDecayingError):
        T.spherical_fourier(G.SampledRadialFunction.from_callable(lambda r: 1.0, GRID3))
    grow = G.SampledRadialFunction(GRID3, np.exp(-GRID3.radii**2), growth_type=1.0)
    with pytest.raises(T.NonDecayingError):
        T.spherical_fourier(grow)
    flat = T.SpectralSamples(T.default_lambdas(), np.ones(T.N_LAMBDA), 3)
    with pytest.raises(T.NonDecayingError):
        T.inverse_spherical_fourier(flat, GRID3)


def test_dimension_mismatch():
    g = T.spherical_fourier(gaussian(GRID3))
    with pytest.raises(ValueError):
        T.inverse_spherical_fourier(g, G.RadialGrid(0.01, 20.0, 2))


def test_truncation_estimate_small():
    assert T.truncation_estimate(T.spherical_fourier(gaussian(GRID3))) <= 1e-12
    g = T.spherical_fourier(gaussian(GRID3), np.linspace(0, 3, 31))
    assert 0 < T.truncation_estimate(g) < 1e-2
