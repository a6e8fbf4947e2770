"""Invariant suite run by ``strichartz props``.

Each check is small enough to finish in a few seconds; grid checks use a
coarser grid than the library default.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import grid as G
from . import transform as T
from .dichotomy import (RealCase, Verdict, build_counterexample, canonical_sequence, classify,
                        classify_real_symbol, level_set)
from .modes import (MODE_EPS, ModeExpansion, PlaneWaveExpansion, apply_multiplier, apply_planewave_multiplier,
                    decompose_eigen, forward_orbit, radialize_planewaves, recurrence_scale, verify_recurrence)
from .special_fn import (MultiplierSpec, phi, phi_deriv, psi, psi_deriv, strict_max_margin, symbol_value,
                         threshold)


@dataclass(frozen=True)
class PropResult:
    name: str
    passed: bool
    value: float
    bound: float
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3e} (bound {self.bound:.1e}, {self.seconds:.2f}s)"


_REGISTRY: list[tuple[str, Callable[[], tuple[float, float, bool]]]] = []


def prop(name: str):
    def deco(fn):
        _REGISTRY.append((name, fn))
        return fn
    return deco


def _rng():
    return np.random.default_rng(20260101)


def _strip_points(rng, n, lam_max=5.0, im_max=2.0):
    return rng.uniform(-lam_max, lam_max, n) + 1j * rng.uniform(-im_max, im_max, n)


SMALL_GRID = (2e-3, 8.0)


# special functions ---------------------------------------------------------


@prop("phi normalization at r=0")
def _norm():
    rng = _rng()
    lam = _strip_points(rng, 50)
    err = max(np.max(np.abs(phi(lam, 0.0, d) - 1)) + np.max(np.abs(psi(lam, 0.0, d) - 1)) for d in (1, 2, 3, 5))
    return err, 0.0, err == 0


@prop("phi evenness in lambda")
def _even():
    rng = _rng()
    lam, r = _strip_points(rng, 100), rng.uniform(0, 10, 100)
    err = max(np.max(np.abs(phi(lam, r, d) - phi(-lam, r, d))) for d in (2, 3, 4))
    return err, 1e-15, err <= 1e-15


@prop("d=3 closed form, envelope-relative")
def _closed3():
    rng = _rng()
    lam, r = _strip_points(rng, 2000), rng.uniform(1e-9, 10, 2000)
    z = lam * r
    env = np.maximum(1.0, np.real(phi(1j * np.abs(lam.imag), r, 3)))
    err = float(np.max(np.abs(phi(lam, r, 3) - np.sin(z) / z) / env))
    return err, 1e-12, err <= 1e-12


@prop("d=1 exact cosine")
def _closed1():
    rng = _rng()
    lam, r = _strip_points(rng, 500), rng.uniform(0, 10, 500)
    err = float(np.max(np.abs(phi(lam, r, 1) - np.cos(lam * r))))
    return err, 0.0, err == 0


@prop("domination by phi_{i Im lam}")
def _dominate():
    rng = _rng()
    lam, r = _strip_points(rng, 500), rng.uniform(0, 10, 500)
    worst = -np.inf
    for d in (2, 3, 4):
        worst = max(worst, float(np.max(np.abs(phi(lam, r, d)) - np.real(phi(1j * np.abs(lam.imag), r, d)))))
    return worst, 1e-12, worst <= 1e-12


@prop("strict strip maximum margin")
def _strict():
    delta = min(strict_max_margin(s, 1.0, n_re=41, n_im=41)[0]
                for s in (MultiplierSpec.spherical(1.0, 3), MultiplierSpec.ball(1.0, 3)))
    return delta, 0.0, delta > 0


@prop("decay at Re lam = 200/t")
def _decay():
    worst = 0.0
    for s in (MultiplierSpec.spherical(1.0, 3), MultiplierSpec.ball(1.0, 3)):
        re = 200.0
        ims = np.linspace(-1, 1, 41)
        sup = float(np.max(np.abs(symbol_value(s, re + 1j * ims))))
        worst = max(worst, sup / threshold(s, 1.0))
    return worst, 0.01, worst < 0.01


@prop("derivative non-vanishing in the strip")
def _nonvanish():
    t, d = 1.0, 3
    second = max(float(np.real(phi_deriv(0.0, t, d, 2))), float(np.real(psi_deriv(0.0, t, d, 2))))
    ys = np.linspace(0.1, 1.0, 10)
    first = min(float(np.min(np.abs(phi_deriv(1j * ys, t, d, 1)))),
                float(np.min(np.abs(psi_deriv(1j * ys, t, d, 1)))))
    return first, 0.0, second < 0 and first > 0


@prop("monotone y -> phi(iy, t)")
def _mono():
    ys = np.linspace(0, 1, 201)
    inc = min(float(np.min(np.diff(np.real(f(1j * ys, 1.0, d))))) for f in (phi, psi) for d in (2, 3, 4))
    return inc, 0.0, inc > 0


# mode space ----------------------------------------------------------------


def _random_expansion(rng, n=4, max_order=3):
    return ModeExpansion.from_terms(
        [(complex(l), int(k), complex(c)) for l, k, c in zip(
            _strip_points(rng, n, 3.0, 1.0), rng.integers(0, max_order + 1, n),
            rng.normal(size=n) + 1j * rng.normal(size=n))], 1.0)


_SPECS = (MultiplierSpec.spherical(1.0, 3), MultiplierSpec.ball(0.7, 3),
          MultiplierSpec.heat(0.4, 3), MultiplierSpec.laplacian(3))


@prop("multiplier linearity on modes")
def _linear():
    rng = _rng()
    worst = 0.0
    for s in _SPECS:
        f, g = _random_expansion(rng), _random_expansion(rng)
        lhs, rhs = apply_multiplier(s, f + g), apply_multiplier(s, f) + apply_multiplier(s, g)
        worst = max(worst, (lhs - rhs).max_abs() / max(lhs.max_abs(), 1e-300))
    return worst, MODE_EPS, worst <= MODE_EPS


@prop("heat semigroup on modes")
def _heat_modes():
    rng = _rng()
    f = _random_expansion(rng, 5, 3)
    a = apply_multiplier(MultiplierSpec.heat(0.3, 3), apply_multiplier(MultiplierSpec.heat(0.2, 3), f))
    b = apply_multiplier(MultiplierSpec.heat(0.5, 3), f)
    err = (a - b).max_abs() / b.max_abs()
    return err, MODE_EPS, err <= MODE_EPS


@prop("order preservation")
def _order():
    rng = _rng()
    bad = 0
    for s in _SPECS:
        f = _random_expansion(rng)
        if apply_multiplier(s, f).max_order > f.max_order:
            bad += 1
    return float(bad), 0.0, bad == 0


@prop("radialization intertwines multipliers")
def _radial():
    rng = _rng()
    worst = 0.0
    zetas = [tuple(rng.normal(size=3)) for _ in range(5)]
    f = PlaneWaveExpansion.from_terms([(z, complex(*rng.normal(size=2))) for z in zetas])
    for s in _SPECS:
        a = apply_multiplier(s, radialize_planewaves(f))
        b = radialize_planewaves(apply_planewave_multiplier(s, f))
        worst = max(worst, (a - b).max_abs() / a.max_abs())
    return worst, MODE_EPS, worst <= MODE_EPS


@prop("decomposition components are eigenfunctions")
def _decomp():
    rng = _rng()
    s = MultiplierSpec.heat(0.5, 3)
    lams = np.array([0.3, 0.9, 1.4])
    f = ModeExpansion.from_terms([(l, 0, complex(*rng.normal(size=2))) for l in lams])
    alphas = np.atleast_1d(symbol_value(s, lams.astype(complex)))
    dec = decompose_eigen(f, s, alphas)
    worst = max(max(dec.eigen_defects), dec.reconstruction_defect)
    return worst, MODE_EPS, worst <= MODE_EPS


@prop("two-sided orbit flags exactly |m| != |A|")
def _orbit():
    s = MultiplierSpec.heat(1.0, 3)
    A = float(np.exp(-1.0))
    f = PlaneWaveExpansion.from_terms([((0.5, 0, 0), 1.0), ((1.0, 0, 0), 1.0), ((0, 2.0, 0), 1.0)])
    rep = forward_orbit(s, f, A, 5, "both")
    expected = np.isclose(np.exp(-f.norms() ** 2), A, rtol=1e-12)
    ok = bool(np.array_equal(rep.admissible, expected))
    return float(np.sum(rep.admissible != expected)), 0.0, ok


# grid ---------------------------------------------------------------------


def _small(d=3):
    return G.RadialGrid(*SMALL_GRID, d)


@prop("grid/mode consistency M_t, B_t")
def _consist():
    g = _small()
    worst = 0.0
    for lam in (0.7, 1j, 1 + 0.3j):
        f = ModeExpansion.single(lam, 0, 1.0)
        s = G.sample_expansion(f, g)
        for spec, op in ((MultiplierSpec.spherical(1.0, 3), G.apply_spherical_mean_grid),
                         (MultiplierSpec.ball(1.0, 3), G.apply_ball_mean_grid)):
            out = op(s, spec.t, n_rho=16) if op is G.apply_ball_mean_grid else op(s, spec.t)
            ex = G.sample_expansion(apply_multiplier(spec, f), out.grid)
            worst = max(worst, G.weighted_rel_error(out, ex))
    return worst, 1e-8, worst <= 1e-8


@prop("M_t positivity (linear interpolation)")
def _pos():
    g = _small()
    f = G.SampledRadialFunction.from_callable(lambda r: np.abs(np.sin(3 * r)) * np.exp(-r), g)
    out = G.apply_spherical_mean_grid(f, 1.0, interp="linear")
    low = float(np.min(out.values.real))
    return low, 0.0, low >= 0 and float(np.max(np.abs(out.values.imag))) == 0


@prop("heat contraction for bounded input")
def _contract():
    g = G.RadialGrid(2e-3, 12.0, 3)
    f = G.SampledRadialFunction.from_callable(lambda r: np.cos(2 * r) / (1 + r * r), g)
    out = G.apply_heat_grid(f, 0.2, n_rho=48)
    ratio = float(np.max(np.abs(out.values)) / np.max(np.abs(f.values)))
    return ratio, 1.0, ratio <= 1.0


@prop("Laplacian second-order convergence")
def _order2():
    errs = []
    for h in (4e-3, 2e-3):
        f = G.sample_expansion(ModeExpansion.single(1j, 0, 1.0), G.RadialGrid(h, 8.0, 3))
        errs.append(G.eigen_residual(f, -1.0))
    ratio = errs[0] / errs[1]
    return ratio, 4.0, 3.5 <= ratio <= 4.5


@prop("explicit domain truncation")
def _trunc():
    g = _small()
    f = G.SampledRadialFunction.from_callable(lambda r: np.ones_like(r), g)
    out = G.apply_spherical_mean_grid(f, 1.0)
    shrink = g.r_max - out.grid.r_max
    return shrink, 1.0, out.grid.n < g.n and abs(shrink - 1.0) < 1e-12 and bool(out.notes)


# transform ------------------------------------------------------------------


@prop("transform diagonalizes M_t")
def _diag():
    g = G.RadialGrid(0.01, 20.0, 3)
    f = G.SampledRadialFunction.from_callable(lambda r: np.exp(-r * r), g)
    err = T.diagonalization_error(f, 1.0)
    return err, 1e-6, err <= 1e-6


@prop("inverse constant independent of width")
def _calib():
    c1, c2 = T.calibration_constant(3), T.fit_inverse_constant(3, 1.0)
    rel = abs(c1 - c2) / c1
    return rel, 1e-8, rel <= 1e-8


# dichotomy ------------------------------------------------------------------


@prop("verdict trichotomy total and exclusive")
def _tri():
    s = MultiplierSpec.spherical(1.0, 3)
    tau = threshold(s, 1.0)
    got = [classify(s, 1.0, A, with_witness=False, with_residuals=False).verdict
           for A in (0.5 * tau, tau, tau * (1 + 1e-12), 2 * tau)]
    want = [Verdict.INDETERMINATE, Verdict.EIGENFUNCTION, Verdict.EIGENFUNCTION, Verdict.ZERO]
    return float(sum(a != b for a, b in zip(got, want))), 0.0, got == want


@prop("branch (a) canonical sequence")
def _branch_a():
    worst = 0.0
    ok = True
    g = _small()
    for s in (MultiplierSpec.spherical(1.0, 3), MultiplierSpec.ball(1.0, 3), MultiplierSpec.heat(1.0, 3)):
        A = threshold(s, 1.0) * np.exp(0.4j)
        seq = canonical_sequence(s, 1.0, A)
        ok &= verify_recurrence(s, seq, A) <= MODE_EPS * recurrence_scale(s, seq, A)
        worst = max(worst, G.eigen_residual(G.sample_expansion(seq.base, g), -1.0))
    return worst, 1e-4, bool(ok) and worst <= 1e-4


@prop("level set closed under -conj")
def _sym():
    L = level_set(MultiplierSpec.heat(1.0, 3), 1.0, 0.5)
    pts = L.points
    gap = max(float(np.min(np.abs(pts - (-p.conjugate())))) for p in pts)
    return gap, 1e-9, gap <= 1e-9


@prop("witness recurrence exact and growth bounded")
def _witness():
    w = build_counterexample(MultiplierSpec.heat(1.0, 3), 1.0, 0.5, grid=_small())
    return w.recurrence_defect, MODE_EPS * w.recurrence_scale, w.recurrence_exact and w.growth_bounded


@prop("real-symbol split exact")
def _split():
    from scipy.optimize import brentq
    s = MultiplierSpec.spherical(1.0, 3)
    A = 0.1
    m = lambda x: float(np.real(symbol_value(s, complex(x))))
    up = brentq(lambda x: m(x) - A, 2.5, 3.1, xtol=1e-300, rtol=8.9e-16)
    dn = brentq(lambda x: m(x) + A, 3.2, 4.4, xtol=1e-300, rtol=8.9e-16)
    f0 = PlaneWaveExpansion.from_terms([((up, 0, 0), 2.0), ((0, dn, 0), 1 - 1j)])
    rep = classify_real_symbol(s, A, f0)
    worst = max(rep.reconstruction_defect, *rep.eigen_defects)
    return worst, MODE_EPS, rep.case is RealCase.SPLIT and worst <= MODE_EPS


def run_props(select: str | None = None) -> list[PropResult]:
    out = []
    for name, fn in _REGISTRY:
        if select and select not in name:
            continue
        t0 = time.perf_counter()
        try:
            value, bound, ok = fn()
        except Exception as exc:  # a crashing invariant is a failing invariant
            value, bound, ok = math.nan, math.nan, False
            name = f"{name} [{type(exc).__name__}: {exc}]"
        out.append(PropResult(name, bool(ok), float(value), float(bound), time.perf_counter() - t0))
    return out


def names() -> list[str]:
    return [n for n, _ in _REGISTRY]
