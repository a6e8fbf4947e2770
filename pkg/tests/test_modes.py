import math

import numpy as np
import pytest
from scipy.optimize import brentq
from hypothesis import given, settings
from hypothesis import strategies as st

from strichartz.modes import (MODE_EPS, Mode, ModeExpansion, PlaneWaveExpansion, SequenceSpec, apply,
                              apply_laplacian_modes, apply_multiplier, apply_planewave_multiplier, canonical,
                              decompose_eigen, forward_orbit, jordan_growth_demo, make_sequence, mode_symbols,
                              radialize_planewaves, recurrence_scale, verify_recurrence)
from strichartz.special_fn import MultiplierSpec, phi, symbol_value

SPECS = [MultiplierSpec.spherical(1.0, 3), MultiplierSpec.ball(0.7, 2), MultiplierSpec.heat(0.5, 3),
         MultiplierSpec.laplacian(3)]
SPEC_IDS = ["spherical", "ball", "heat", "laplacian"]

lam_st = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(z.imag) <= 1 and abs(z) > 1e-3)
coeff_st = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@st.composite
def expansions(draw, max_order=3):
    n = draw(st.integers(1, 4))
    lams = draw(st.lists(lam_st, min_size=n, max_size=n))
    terms = [(lam, draw(st.integers(0, max_order)), draw(coeff_st)) for lam in lams]
    try:
        return ModeExpansion.from_terms(terms, 1.0)
    except ValueError:
        # near-duplicate spectral parameters
        return ModeExpansion.single(lams[0], 0, 1.0, 1.0)


@pytest.mark.parametrize("lam, k, expected", [
    (1 - 1j, 0, (-1 + 1j, 1)),
    (-2.0, 1, (2.0, -1)),
    (-2.0, 2, (2.0, 1)),
    (1j, 3, (1j, 1)),
])
def test_canonical(lam, k, expected):
    assert canonical(lam, k) == expected


def test_from_terms_merges_and_drops():
    f = ModeExpansion.from_terms([(2.0, 1, 1.0), (-2.0, 1, 1.0), (0.0, 1, 5.0), (1j, 0, 2.0), (-1j, 0, 3.0)])
    assert f.coefficient(2.0, 1) == 0
    assert f.coefficient(0.0, 1) == 0
    assert f.coefficient(1j, 0) == 5.0
    assert len(f) == 1


def test_from_terms_rejects_near_duplicates():
    with pytest.raises(ValueError):
        ModeExpansion.from_terms([(1.0, 0, 1.0), (1.0 + 1e-12, 0, 1.0)])


def test_strip_bound_enforced():
    with pytest.raises(ValueError):
        ModeExpansion.from_terms([(2j, 0, 1.0)], strip_bound=1.0)
    with pytest.raises(ValueError):
        ModeExpansion.from_terms([(1.0, -1, 1.0)])


def test_json_roundtrip():
    f = ModeExpansion.from_terms([(1 + 0.5j, 2, 1 - 2j), (3.0, 0, 0.25)], 0.5)
    assert ModeExpansion.from_json(f.to_json(), 0.5) == f


@pytest.mark.parametrize("spec", SPECS, ids=SPEC_IDS)
def test_apply_diagonal_on_order_zero(spec):
    lam = 0.8 + 0.4j
    out = apply_multiplier(spec, ModeExpansion.single(lam))
    assert out.coefficient(lam, 0) == symbol_value(spec, lam)


def test_heat_functional_example():
    out = apply_multiplier(MultiplierSpec.heat(0.3, 3), ModeExpansion.single(2j))
    assert out.coefficient(2j, 0) == pytest.approx(math.exp(0.3 * 4), rel=1e-15)


def test_jordan_leibniz_at_zero():
    spec = MultiplierSpec.spherical(1.5, 3)
    out = apply_multiplier(spec, ModeExpansion.single(0.0, 2))
    assert out.coefficient(0.0, 2) == symbol_value(spec, 0.0)
    assert out.coefficient(0.0, 1) == 0
    assert out.coefficient(0.0, 0) == pytest.approx(-1.5**2 / 3, rel=1e-13)


@pytest.mark.parametrize("lam, k, c, expected", [
    (1j, 0, 1.0, {(1j, 0): -1.0}),
    (0.0, 1, 1.0, {}),
    (3.0, 0, 2.0, {(3.0, 0): 18.0}),
    (2.0, 1, 1.0, {(2.0, 1): 4.0, (2.0, 0): 4.0}),
])
def test_laplacian_modes(lam, k, c, expected):
    out = apply_laplacian_modes(ModeExpansion.single(lam, k, c))
    assert len(out) == len(expected)
    for (l, kk), v in expected.items():
        assert out.coefficient(l, kk) == pytest.approx(v, rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(expansions(), expansions(), st.sampled_from(range(4)))
def test_linearity(f, g, i):
    spec = SPECS[i]
    lhs = apply_multiplier(spec, f + g)
    rhs = apply_multiplier(spec, f) + apply_multiplier(spec, g)
    ref = max(lhs.max_abs(), rhs.max_abs(), 1.0)
    assert (lhs - rhs).max_abs() <= MODE_EPS * ref


@settings(max_examples=40, deadline=None)
@given(expansions(), st.floats(0.05, 1), st.floats(0.05, 1))
def test_heat_semigroup_exact(f, s, t):
    a = apply_multiplier(MultiplierSpec.heat(s, 3), apply_multiplier(MultiplierSpec.heat(t, 3), f))
    b = apply_multiplier(MultiplierSpec.heat(s + t, 3), f)
    assert (a - b).max_abs() <= MODE_EPS * max(b.max_abs(), 1e-300) * 10


@settings(max_examples=40, deadline=None)
@given(expansions(), st.sampled_from(range(4)))
def test_order_never_increases(f, i):
    out = apply_multiplier(SPECS[i], f)
    top = {}
    for m in f.modes:
        top[m.lam] = max(top.get(m.lam, 0), m.order)
    assert all(m.lam in top and m.order <= top[m.lam] for m in out.modes)


def test_planewave_evaluate_and_radialize():
    f = PlaneWaveExpansion.from_terms([((3.0, 4.0), 1.0)])
    R = radialize_planewaves(f)
    assert R.coefficient(5.0, 0) == 1.0
    # sphere average of e^{i x . zeta} over |x| = r equals phi_5(r) in d = 2
    r = 0.7
    angles = np.linspace(0, 2 * np.pi, 400, endpoint=False)
    x = r * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    assert f.evaluate(x).mean() == pytest.approx(phi(5.0, r, 2), rel=1e-12)


def test_radialize_zero_and_merge():
    f = PlaneWaveExpansion.from_terms([((0.0, 0.0, 0.0), 2.0)])
    assert radialize_planewaves(f).coefficient(0.0, 0) == 2.0
    g = PlaneWaveExpansion.from_terms([((1.0, 0.0), 1.0), ((0.0, 1.0), 2.5)])
    assert radialize_planewaves(g).coefficient(1.0, 0) == 3.5


def test_planewave_mixed_dimension_rejected():
    with pytest.raises(ValueError):
        PlaneWaveExpansion.from_terms([((1.0,), 1.0), ((1.0, 0.0), 1.0)])


@pytest.mark.parametrize("spec", SPECS[:3], ids=SPEC_IDS[:3])
def test_planewave_multiplier_matches_radial(spec):
    f = PlaneWaveExpansion.from_terms([((0.3, 0.4, 0.0), 1.0), ((1.0, 1.0, 1.0), -2j)])
    lhs = radialize_planewaves(apply_planewave_multiplier(spec, f))
    rhs = apply_multiplier(spec, radialize_planewaves(f))
    assert lhs.allclose(rhs)


def test_forward_orbit_examples():
    spec = MultiplierSpec.heat(1.0, 3)
    f0 = PlaneWaveExpansion.from_terms([((0.5, 0.0, 0.0), 1.0), ((0.0, 0.2, 0.0), 3.0)])
    m = np.abs(mode_symbols(spec, f0))
    j_eq = int(np.argmin(np.abs(f0.norms() - 0.5)))
    A = m[j_eq]
    rep = forward_orbit(spec, f0, A, 10)
    # the mode with m = A is constant and admissible; the smaller-norm mode grows
    assert np.all(rep.magnitudes[j_eq] == abs(f0.coeffs()[j_eq]))
    assert rep.admissible[j_eq]
    assert rep.unbounded[1 - j_eq]
    back = forward_orbit(spec, f0, A, 10, direction="backward")
    assert back.admissible[1 - j_eq]
    smaller = forward_orbit(spec, f0, m.max(), 5, direction="backward")
    assert smaller.unbounded[j_eq]


@pytest.mark.parametrize("kw", [{"A": 0, "K": 3}, {"A": 1, "K": 0}, {"A": 1, "K": 3, "direction": "up"}])
def test_forward_orbit_rejects(kw):
    f0 = PlaneWaveExpansion.from_terms([((0.5, 0.0, 0.0), 1.0)])
    with pytest.raises(ValueError):
        forward_orbit(MultiplierSpec.heat(1.0, 3), f0, **kw)


def test_jordan_examples():
    tab = jordan_growth_demo(MultiplierSpec.laplacian(3), 1.0, 5)
    assert tab.order0[5] == 10
    heat = jordan_growth_demo(MultiplierSpec.heat(1.0, 3), 0.0, 5)
    assert np.all(heat.order0 == 0)
    sph = jordan_growth_demo(MultiplierSpec.spherical(1.0, 3), 1j, 10)
    assert abs(sph.symbol_slope) > 0
    rates = np.diff(sph.growth)
    np.testing.assert_allclose(rates, abs(sph.symbol_slope / sph.symbol), rtol=1e-13)


@pytest.mark.parametrize("spec", SPECS, ids=SPEC_IDS)
def test_jordan_exact(spec):
    assert jordan_growth_demo(spec, 0.9 + 0.2j, 20).max_rel_defect <= MODE_EPS


def test_decompose_two_sided_example():
    spec = MultiplierSpec.spherical(1.0, 3)
    # sin(u)/u: u = 0.5 gives a positive value, u = 4.4934... (tan u = u) a negative one
    z1 = (4.0, 0.0, 0.0)
    A = abs(complex(symbol_value(spec, 4.0)))
    rho = brentq(lambda u: math.sin(u) / u - A, 0.1, 3.0, xtol=1e-15, rtol=8.9e-16)
    # align the positive frequency with the symbol actually evaluated by quadrature
    rho = brentq(lambda u: symbol_value(spec, u).real - A, rho - 1e-6, rho + 1e-6, xtol=1e-16, rtol=8.9e-16)
    z2 = (0.0, rho, 0.0)
    f0 = PlaneWaveExpansion.from_terms([(z1, 1.0), (z2, 2.0)])
    plus_alpha, minus_alpha = complex(symbol_value(spec, rho)), complex(symbol_value(spec, 4.0))
    dec = decompose_eigen(f0, spec, [plus_alpha, minus_alpha])
    fp, fm = dec.component(plus_alpha), dec.component(minus_alpha)
    assert fp.allclose(PlaneWaveExpansion.from_terms([(z2, 2.0)]))
    assert fm.allclose(PlaneWaveExpansion.from_terms([(z1, 1.0)]))
    assert dec.reconstruction_defect <= MODE_EPS


def test_decompose_eigenfunction_trivial():
    spec = MultiplierSpec.heat(1.0, 3)
    f0 = ModeExpansion.single(0.5, 0, 1.0)
    a = complex(symbol_value(spec, 0.5))
    dec = decompose_eigen(f0, spec, [a, -a])
    assert dec.component(a).allclose(f0)
    assert dec.component(-a).is_zero()


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.1, 3.0), min_size=3, max_size=3, unique=True),
       st.lists(coeff_st.filter(lambda c: abs(c) > 0.1), min_size=3, max_size=3))
def test_decompose_three_eigenvalues(norms, coeffs):
    spec = MultiplierSpec.heat(0.5, 3)
    lam = np.array(norms, complex)
    alphas = np.atleast_1d(symbol_value(spec, lam))
    if np.min(np.abs(np.subtract.outer(alphas, alphas)) + np.eye(3)) <= 1e-8:
        return
    f0 = ModeExpansion.from_terms(list(zip(norms, [0] * 3, coeffs)))
    dec = decompose_eigen(f0, spec, alphas)
    assert dec.reconstruction_defect <= MODE_EPS
    assert max(dec.eigen_defects) <= MODE_EPS


def test_decompose_rejects():
    spec = MultiplierSpec.heat(1.0, 3)
    f0 = ModeExpansion.single(0.5)
    with pytest.raises(ValueError):
        decompose_eigen(f0, spec, [1.0, 1.0])
    with pytest.raises(ValueError):
        decompose_eigen(f0, spec, [0.3])
    with pytest.raises(ValueError):
        decompose_eigen(ModeExpansion.single(0.5, 1), spec, [symbol_value(spec, 0.5)])
    with pytest.raises(ValueError):
        decompose_eigen(f0, spec, [])


def test_make_sequence_examples():
    base = ModeExpansion.from_terms([(1.0, 0, 1.0), (2.0, 0, 1.0)])
    seq = SequenceSpec(base, (0.0, 0.5))
    assert make_sequence(seq, 0) == base
    f1 = make_sequence(seq, 1)
    assert f1.coefficient(2.0, 0) == pytest.approx(np.exp(0.5j), rel=1e-15)
    const = SequenceSpec(ModeExpansion.single(1.0), (0.0,))
    assert make_sequence(const, 7) == const.base
    with pytest.raises(ValueError):
        SequenceSpec(base, (0.0,))


def test_verify_recurrence_examples():
    spec = MultiplierSpec.spherical(1.0, 3)
    lams = (1.0 + 0.5j, 2.0 + 0.3j)
    A = 0.3 + 0.1j
    # matched phases with |m| != |A| still fail; a genuine level set needs |m| = |A|
    m = [complex(symbol_value(spec, l)) for l in lams]
    seq = SequenceSpec(ModeExpansion.from_terms([(l, 0, 1.0) for l in lams], 0.5),
                       tuple(np.angle(np.array(m) / A)))
    assert verify_recurrence(spec, seq, m[0]) > 0
    heat = MultiplierSpec.heat(0.5, 3)
    eig = SequenceSpec(ModeExpansion.single(1j), (0.0,), math.exp(0.5))
    assert verify_recurrence(heat, eig) <= MODE_EPS * recurrence_scale(heat, eig)
    bad = SequenceSpec(ModeExpansion.single(1j), (0.3,), math.exp(0.5))
    assert verify_recurrence(heat, bad) > 0.1


def test_sequence_roundtrip():
    seq = SequenceSpec(ModeExpansion.from_terms([(1 + 0.5j, 0, 2.0), (3.0, 1, -1j)], 0.5), (0.1, -2.0), 0.5j)
    assert SequenceSpec.from_dict(seq.to_dict()) == seq


def test_apply_dispatch():
    spec = MultiplierSpec.heat(1.0, 2)
    assert isinstance(apply(spec, PlaneWaveExpansion.from_terms([((1.0, 0.0), 1.0)])), PlaneWaveExpansion)
    assert isinstance(apply(spec, ModeExpansion.single(1.0)), ModeExpansion)


def test_mode_dataclass():
    m = Mode(1j, 0, 2.0)
    assert m.lam == 1j and m.order == 0
    assert ModeExpansion.from_terms([m]).coefficient(-1j, 0) == 2.0
