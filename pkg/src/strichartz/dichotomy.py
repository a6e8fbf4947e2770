"""Threshold classification, level sets, witnesses and the one-radius identity.

For an averaging multiplier with symbol ``m`` and growth type ``a`` the
threshold is ``tau = m(ia)``.  A two-sided sequence with ``Theta f_k = A f_{k+1}``
and growth type ``a`` is an eigenfunction sequence when ``|A| = tau``, vanishes
when ``|A| > tau``, and need not be an eigenfunction when ``|A| < tau``.  For
the last case a concrete two-mode sequence is built from two points of the
level set ``{|m(lam)| = |A|}`` with different symbol phases.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import grid as G
from .modes import (DISTINCT_TOL, MODE_EPS, ModeExpansion, PlaneWaveExpansion, SequenceSpec,
                    apply_multiplier, decompose_eigen, make_sequence, mode_symbols, recurrence_scale,
                    verify_recurrence)
from .special_fn import Kind, MultiplierSpec, phi_deriv, sphere_moment, symbol_deriv, symbol_value, threshold

CLASSIFY_RTOL = 1e-9
LEVEL_TOL = 1e-10
WITNESS_RESIDUAL_FLOOR = 1e-3
_BISECT_ITERS = 80


class Verdict(str, enum.Enum):
    EIGENFUNCTION = "Eigenfunction"
    ZERO = "Zero"
    INDETERMINATE = "Indeterminate"


class CounterexampleError(RuntimeError):
    """No admissible pair of level-set points was found."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


def _averaging(spec: MultiplierSpec):
    if spec.kind is Kind.LAPLACIAN:
        raise ValueError("the Laplacian has no averaging threshold")


def _cjson(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


# ---------------------------------------------------------------------------
# level sets


@dataclass(frozen=True)
class ScanConfig:
    """Resolution of the level-set scan, in units of ``a`` and ``1/t``."""

    beta_steps: int = 64
    alpha_max_t: float = 50.0
    alpha_step_t: float = 0.01

    def alphas(self, t: float) -> np.ndarray:
        n = int(round(self.alpha_max_t / self.alpha_step_t))
        return np.linspace(0.0, self.alpha_max_t / t, n + 1)

    def betas(self, a: float) -> np.ndarray:
        return a * np.arange(self.beta_steps) / self.beta_steps

    def to_dict(self, t: float, a: float) -> dict:
        return {"beta_range": [0.0, a], "beta_step": a / self.beta_steps,
                "alpha_range": [0.0, self.alpha_max_t / t], "alpha_step": self.alpha_step_t / t}


@dataclass(frozen=True)
class LevelSetSolution:
    """Points of ``{lam in Omega_a : |m(lam)| = target}`` sorted by ``Re`` then ``Im``."""

    points: np.ndarray
    symbols: np.ndarray
    target: float
    a: float
    scan: dict

    @property
    def phases(self) -> np.ndarray:
        return np.angle(self.symbols)

    @property
    def max_level_error(self) -> float:
        if not self.points.size:
            return 0.0
        return float(np.max(np.abs(np.abs(self.symbols) - self.target)))

    def distinct_symbol_count(self, tol: float = DISTINCT_TOL) -> int:
        s = np.unique(np.round(self.symbols / tol)) if self.symbols.size else []
        return len(s)

    def to_records(self) -> list[dict]:
        return [{"lambda_re": p.real, "lambda_im": p.imag, "symbol_re": s.real, "symbol_im": s.imag,
                 "phase": float(np.angle(s))} for p, s in zip(self.points, self.symbols)]


def _bisect(fn, lo: np.ndarray, hi: np.ndarray, flo: np.ndarray) -> np.ndarray:
    """Vectorized bisection run down to adjacent floats."""
    lo, hi, flo = lo.copy(), hi.copy(), flo.copy()
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi)
        if not active.any():
            break
        fm = fn(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(active & left, mid, lo)
        flo = np.where(active & left, fm, flo)
        hi = np.where(active & ~left, mid, hi)
    # pick the endpoint with the smaller residual
    fl, fh = np.abs(fn(lo)), np.abs(fn(hi))
    return np.where(fl <= fh, lo, hi)


def _roots_along(fn_grid, fn_point, alphas: np.ndarray, betas: np.ndarray):
    F = fn_grid(alphas[None, :] + 1j * betas[:, None])
    sgn = np.sign(F)
    I, J = np.nonzero(sgn[:, :-1] * sgn[:, 1:] < 0)
    exact_I, exact_J = np.nonzero(F == 0)
    b = betas[I]
    f = lambda x: fn_point(x + 1j * b)
    roots = _bisect(f, alphas[J], alphas[J + 1], F[I, J]) + 1j * b if I.size else np.zeros(0, complex)
    exact = alphas[exact_J] + 1j * betas[exact_I]
    return np.concatenate([roots, exact])


def _dedupe(points: np.ndarray, tol: float = DISTINCT_TOL) -> np.ndarray:
    pts = sorted(points.tolist(), key=lambda z: (z.real, z.imag))
    out: list[complex] = []
    for p in pts:
        if not any(abs(p - q) <= tol for q in out[-8:]):
            out.append(p)
    return np.array(out, complex)


def level_set(spec: MultiplierSpec, a: float, target: float,
              scan: ScanConfig = ScanConfig()) -> LevelSetSolution:
    """Scan the upper half strip for ``|m| = target`` and bisect each crossing.

    Rows ``Im lam = beta`` with ``beta`` in ``[0, a)`` are searched for sign
    changes of ``|m| - target`` in ``Re lam``.  For ``target = 0`` the zeros
    are sought as sign changes of the real symbol on the real axis.  The
    result is closed under ``lam -> -conj(lam)``.
    """
    _averaging(spec)
    a, target = float(a), float(target)
    if not a > 0:
        raise ValueError("a must be positive")
    if target < 0:
        raise ValueError("target modulus must be nonnegative")
    tau = threshold(spec, a)
    if target >= tau:
        raise ValueError(f"target {target} is not below the threshold {tau}")
    alphas = scan.alphas(spec.t)
    if target == 0:
        real = lambda lam: np.real(symbol_value(spec, lam))
        pts = _roots_along(real, real, alphas, np.zeros(1))
    else:
        F = lambda lam: np.abs(symbol_value(spec, lam)) - target
        pts = _roots_along(F, F, alphas, scan.betas(a))
    pts = np.concatenate([pts, -pts.conj()]) if pts.size else pts
    pts = _dedupe(pts + 0.0)
    sym = np.atleast_1d(symbol_value(spec, pts)) if pts.size else np.zeros(0, complex)
    keep = np.abs(np.abs(sym) - target) <= LEVEL_TOL
    info = scan.to_dict(spec.t, a)
    info["rejected"] = int((~keep).sum())
    return LevelSetSolution(pts[keep], sym[keep], target, a, info)


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class Witness:
    """A two-mode sequence satisfying the recurrence that is not an eigenfunction sequence."""

    sequence: SequenceSpec
    recurrence_defect: float
    recurrence_scale: float
    growth_constants: tuple[float, ...]
    growth_bounded: bool
    residual_min: float
    residual_z: complex
    z_grid: tuple[float, float, int]
    grid: dict

    @property
    def lambdas(self) -> tuple[complex, ...]:
        return tuple(m.lam for m in self.sequence.base.modes)

    @property
    def recurrence_exact(self) -> bool:
        return self.recurrence_defect <= MODE_EPS * self.recurrence_scale

    def to_dict(self) -> dict:
        return {
            "sequence": self.sequence.to_dict(),
            "recurrence_defect": self.recurrence_defect,
            "recurrence_exact": self.recurrence_exact,
            "growth_constants": list(self.growth_constants),
            "growth_bounded": self.growth_bounded,
            "eigen_residual_min": self.residual_min,
            "eigen_residual_argmin": _cjson(self.residual_z),
            "z_grid": list(self.z_grid),
            "grid": self.grid,
        }


def _wrap(x):
    return np.abs(np.angle(np.exp(1j * x)))


def _candidate_pairs(points: np.ndarray, symbols: np.ndarray, A: complex, limit: int = 64):
    theta = np.angle(symbols / A) if A != 0 else np.zeros(points.size)
    n = points.size
    i, j = np.triu_indices(n, 1)
    ok = (np.abs(points[i] - points[j]) > DISTINCT_TOL) & (np.abs(points[i] + points[j]) > DISTINCT_TOL)
    if A != 0:
        ok &= np.abs(symbols[i] - symbols[j]) > DISTINCT_TOL * abs(A)
    i, j = i[ok], j[ok]
    if not i.size:
        return [], theta
    gap = _wrap(theta[i] - theta[j])
    size = np.maximum(np.abs(points[i]), np.abs(points[j]))
    if A == 0:
        order = np.lexsort((size,))
    else:
        # near-maximal phase gaps first, then the smallest frequencies
        band = gap >= 0.99 * gap.max()
        order = np.lexsort((size, ~band))
    return [(int(i[k]), int(j[k])) for k in order[:limit]], theta


def _witness_from(spec, a, A, lams, thetas, grid: G.RadialGrid, n_z: int) -> Witness:
    base = ModeExpansion.from_terms([(lam, 0, 1.0) for lam in lams], a)
    # phases follow the canonical mode order of ``base``
    by_lam = {ModeExpansion.single(lam, 0, 1.0).modes[0].lam: th for lam, th in zip(lams, thetas)}
    seq = SequenceSpec(base, tuple(by_lam[m.lam] for m in base.modes), A)
    defect = verify_recurrence(spec, seq, A, range(-3, 4))
    scale = recurrence_scale(spec, seq, A)
    samples = [G.sample_expansion(make_sequence(seq, k), grid) for k in (-2, -1, 0, 1, 2)]
    gcs = tuple(G.growth_constant(s, a) for s in samples)
    # |phi_lam| <= exp(|Im lam| r), so M <= sum |c_j| certifies growth type a
    bounded = max(gcs) <= (1 + 1e-9) * sum(abs(m.coeff) for m in base)
    z_hi = max(2.0, 2.0 * max(abs((lam * lam).real) for lam in lams))
    zs = np.linspace(-2 * a * a, z_hi, n_z)
    f0 = G.SampledRadialFunction(samples[2].grid, samples[2].values, a)
    sc = G.eigen_residual_scan(f0, zs)
    return Witness(seq, defect, scale, gcs, bool(bounded), sc.minimum,
                   sc.z_best if sc.best <= sc.residuals.min() else complex(zs[int(np.argmin(sc.residuals))]),
                   (float(zs[0]), float(zs[-1]), n_z),
                   {"h": grid.h, "rmax": grid.r_max, "d": grid.d})


def build_counterexample(spec: MultiplierSpec, a: float, A: complex, scan: ScanConfig = ScanConfig(),
                         grid: Optional[G.RadialGrid] = None, n_z: int = 201,
                         level: Optional[LevelSetSolution] = None) -> Witness:
    """Two-mode sequence ``f_k = e^{ik theta_1} phi_{lam_1} + e^{ik theta_2} phi_{lam_2}``.

    ``lam_j`` lie on the level set ``|m| = |A|`` with ``m(lam_j) = A e^{i theta_j}``.
    The pair with the widest phase gap is preferred.  Recurrence exactness,
    bounded growth at level ``a`` and a nonzero eigen residual for every trial
    eigenvalue are checked before returning.
    """
    _averaging(spec)
    A = complex(A)
    tau = threshold(spec, a)
    if abs(A) >= tau * (1 - CLASSIFY_RTOL):
        raise ValueError(f"|A| = {abs(A)} is not below the threshold {tau}")
    grid = grid or G.RadialGrid(G.DEFAULT_H, G.DEFAULT_RMAX, spec.d)
    level = level or level_set(spec, a, abs(A), scan)
    pairs, theta = _candidate_pairs(level.points, level.symbols, A)
    tried = []
    for i, j in pairs[:8]:
        lams = (complex(level.points[i]), complex(level.points[j]))
        w = _witness_from(spec, a, A, lams, (float(theta[i]), float(theta[j])), grid, n_z)
        tried.append({"lambdas": [_cjson(l) for l in lams], "defect": w.recurrence_defect,
                      "residual_min": w.residual_min})
        if w.recurrence_exact and w.growth_bounded and w.residual_min > WITNESS_RESIDUAL_FLOOR:
            return w
    raise CounterexampleError(
        f"no admissible pair among {level.points.size} level-set points",
        {"scan": level.scan, "points": int(level.points.size), "tried": tried})


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class DichotomyReport:
    spec: MultiplierSpec
    a: float
    A: complex
    tau: float
    verdict: Verdict
    eigenvalue: Optional[complex]
    witness: Optional[Witness]
    residuals: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def amplitude_modulus(self) -> float:
        return abs(self.A)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "a": self.a,
            "A": _cjson(self.A),
            "tau": self.tau,
            "verdict": self.verdict.value,
            "eigenvalue": None if self.eigenvalue is None else _cjson(self.eigenvalue),
            "witness": None if self.witness is None else self.witness.to_dict(),
            "residuals": self.residuals,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def canonical_sequence(spec: MultiplierSpec, a: float, A: complex) -> SequenceSpec:
    """``f_k = e^{ik theta} phi_{ia}`` with ``theta = arg(tau / A)``."""
    tau = threshold(spec, a)
    return SequenceSpec(ModeExpansion.single(1j * a, 0, 1.0, a), (float(np.angle(tau / complex(A))),), A)


def eigen_branch_residuals(spec: MultiplierSpec, a: float, A: complex,
                           grid: Optional[G.RadialGrid] = None) -> dict:
    """Recurrence defect of the canonical sequence and ``eigen_residual(f_0, -a^2)``."""
    grid = grid or G.RadialGrid(G.DEFAULT_H, G.DEFAULT_RMAX, spec.d)
    seq = canonical_sequence(spec, a, A)
    defect = verify_recurrence(spec, seq, A)
    f0 = G.sample_expansion(seq.base, grid)
    return {"recurrence_defect": defect,
            "recurrence_scale": recurrence_scale(spec, seq, A),
            "eigen_residual": G.eigen_residual(f0, -a * a)}


def classify(spec: MultiplierSpec, a: float, A: complex, with_witness: bool = True,
             with_residuals: bool = True, grid: Optional[G.RadialGrid] = None,
             scan: ScanConfig = ScanConfig(), rtol: float = CLASSIFY_RTOL) -> DichotomyReport:
    """Compare ``|A|`` with ``tau = m(ia)`` within the relative band ``rtol``."""
    _averaging(spec)
    a = float(a)
    A = complex(A)
    tau = threshold(spec, a)
    gap = (abs(A) - tau) / tau
    notes: list[str] = []
    residuals: dict = {"relative_gap": gap}
    witness = None
    eigenvalue = None
    if abs(gap) <= rtol:
        verdict = Verdict.EIGENFUNCTION
        eigenvalue = complex(-a * a)
        if gap != 0:
            notes.append(f"|A| within the {rtol:g} band of tau, not equal")
        if with_residuals:
            residuals.update(eigen_branch_residuals(spec, a, A, grid))
    elif gap > 0:
        verdict = Verdict.ZERO
        notes.append("every admissible sequence vanishes: |m| <= tau < |A| on the strip")
    else:
        verdict = Verdict.INDETERMINATE
        if abs(A) >= abs(complex(symbol_value(spec, 0.0))):
            # m(ib) increases from m(0) to tau on [0, a], so some b < a has m(ib) = |A|
            notes.append("sub-threshold: the eigen sequence built on phi_{ib} with m(ib) = |A| "
                         "also satisfies the recurrence")
        if A == 0 and spec.kind is Kind.HEAT:
            notes.append("A = 0: the heat symbol has no zeros, so all T_k = 0")
        elif with_witness:
            try:
                witness = build_counterexample(spec, a, A, scan, grid)
            except CounterexampleError as exc:
                notes.append(f"witness search failed: {exc}")
                residuals["witness_search"] = exc.diagnostics
    return DichotomyReport(spec, a, A, tau, verdict, eigenvalue, witness, residuals, tuple(notes))


# ---------------------------------------------------------------------------
# one radius


@dataclass(frozen=True)
class OneRadiusReport:
    t: float
    a: float
    d: int
    functional_defect: float
    mu: complex
    eps: float
    perturbation_defect: float
    perturbation_predicted: float
    coefficient_checks: tuple[dict, ...]
    phi02: float

    @property
    def perturbation_ratio(self) -> float:
        return self.perturbation_defect / self.perturbation_predicted

    def to_dict(self) -> dict:
        return {"t": self.t, "a": self.a, "d": self.d,
                "functional_defect": self.functional_defect,
                "mu": _cjson(self.mu), "eps": self.eps,
                "perturbation_defect": self.perturbation_defect,
                "perturbation_predicted": self.perturbation_predicted,
                "perturbation_ratio": self.perturbation_ratio,
                "phi02": self.phi02, "coefficient_checks": list(self.coefficient_checks)}


def one_radius_coefficients(t: float, d: int, N: int, coeffs: Optional[Sequence[complex]] = None,
                            rng: Optional[np.random.Generator] = None) -> dict:
    """Coefficient of ``phi_{0,2(N-1)}`` in ``(M_t - phi_0(t)) sum_k a_k phi_{0,2k}``.

    Only the top mode reaches that order with a nonzero factor, giving
    ``N (2N - 1) a_N phi_{0,2}(t)``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    spec = MultiplierSpec.spherical(t, d)
    if coeffs is None:
        rng = rng or np.random.default_rng(N)
        coeffs = rng.normal(size=N + 1) + 1j * rng.normal(size=N + 1)
        coeffs[N] = coeffs[N] if abs(coeffs[N]) > 0.1 else 1.0
    coeffs = [complex(c) for c in coeffs]
    T = ModeExpansion.from_terms([(0.0, 2 * k, c) for k, c in enumerate(coeffs)], 0.0)
    phi0 = complex(symbol_value(spec, 0.0))
    out = apply_multiplier(spec, T) - T.scale(phi0)
    computed = out.coefficient(0.0, 2 * (N - 1))
    phi02 = float(np.real(symbol_deriv(spec, 0.0, 2)))
    formula = N * (2 * N - 1) * coeffs[N] * phi02
    top = out.coefficient(0.0, 2 * N)
    return {"N": N, "computed": _cjson(computed), "formula": _cjson(formula),
            "abs_error": abs(computed - formula),
            "rel_error": abs(computed - formula) / abs(formula),
            "top_order_coefficient": abs(top),
            "phi02": phi02, "phi02_moment": -t * t * sphere_moment(d, 1),
            "forces_zero": phi02 < 0}


def one_radius_demo(t: float, a: float, d: int, grid: Optional[G.RadialGrid] = None, eps: float = 1e-2,
                    mu: Optional[complex] = None, Ns: Sequence[int] = (1, 2, 3)) -> OneRadiusReport:
    """Functional equation, perturbation rigidity and the ``a = 0`` coefficient identity."""
    grid = grid or G.RadialGrid(G.DEFAULT_H, G.DEFAULT_RMAX, d)
    spec = MultiplierSpec.spherical(t, d)
    mu = complex(2j * a if a > 0 else 1.0) if mu is None else complex(mu)
    lam = 1j * a
    base = G.sample_expansion(ModeExpansion.single(lam, 0, 1.0), grid)
    c = complex(symbol_value(spec, lam))
    Mt = G.apply_spherical_mean_grid(base, t)
    functional = G.weighted_rel_error(Mt, base.scale(c))
    strip = max(abs(mu.imag), a)
    pert = G.sample_expansion(ModeExpansion.from_terms([(lam, 0, 1.0), (mu, 0, eps)], strip), grid)
    pert = G.SampledRadialFunction(pert.grid, pert.values, strip)
    defect_fn = G.apply_spherical_mean_grid(pert, t) - pert.scale(c)
    mu_samples = G.sample_expansion(ModeExpansion.single(mu, 0, 1.0), defect_fn.grid)
    w = np.exp(-strip * defect_fn.radii)
    defect = float(np.max(np.abs(defect_fn.values) * w) / np.max(np.abs(mu_samples.values) * w))
    predicted = eps * abs(complex(symbol_value(spec, mu)) - c)
    checks = tuple(one_radius_coefficients(t, d, N) for N in Ns)
    return OneRadiusReport(float(t), float(a), int(d), functional, mu, float(eps), defect, predicted,
                           checks, float(np.real(phi_deriv(0.0, t, d, 2))))


# ---------------------------------------------------------------------------
# real symbols on real frequencies


class RealCase(str, enum.Enum):
    PLUS = "a"
    MINUS = "b"
    SPLIT = "c"
    ZERO = "d"


@dataclass(frozen=True)
class RealSymbolReport:
    case: RealCase
    symbol_range: tuple[float, float]
    A: complex
    plus_in_range: bool
    minus_in_range: bool
    components: dict
    violations: tuple[dict, ...]
    reconstruction_defect: float = 0.0
    eigen_defects: tuple[float, ...] = ()

    @property
    def consistent(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"case": self.case.value, "symbol_range": list(self.symbol_range), "A": _cjson(self.A),
                "plus_in_range": self.plus_in_range, "minus_in_range": self.minus_in_range,
                "violations": list(self.violations),
                "reconstruction_defect": self.reconstruction_defect,
                "eigen_defects": list(self.eigen_defects)}


def real_symbol_range(spec: MultiplierSpec, rho_max_t: float = 50.0, n: int = 20001) -> tuple[float, float]:
    """Closure of ``m([0, inf))``; for the averages the minimum is found on a scan."""
    if spec.kind is Kind.HEAT:
        return (0.0, 1.0)
    if spec.kind is Kind.LAPLACIAN:
        return (0.0, math.inf)
    rho = np.linspace(0.0, rho_max_t / spec.t, n).astype(complex)
    vals = np.real(symbol_value(spec, rho))
    k = int(np.argmin(vals))
    lo = float(vals[k])
    # refine the minimum with a local parabola through the neighbours
    if 0 < k < n - 1:
        step = rho[1].real
        y0, y1, y2 = vals[k - 1], vals[k], vals[k + 1]
        den = y0 - 2 * y1 + y2
        if den > 0:
            x = rho[k].real + 0.5 * step * (y0 - y2) / den
            lo = min(lo, float(np.real(symbol_value(spec, complex(x)))))
    return (lo, 1.0)


def _in_range(x: float, rng: tuple[float, float], heat_open_zero: bool) -> bool:
    lo, hi = rng
    if heat_open_zero and x <= 0:
        return False
    return lo - 1e-12 <= x <= hi + 1e-12


def classify_real_symbol(spec: MultiplierSpec, A: complex, f0: PlaneWaveExpansion,
                         match_rtol: float = 1e-9) -> RealSymbolReport:
    """Which of ``+|A|`` and ``-|A|`` the real symbol attains, and what that forces on ``f0``."""
    A = complex(A)
    if A == 0:
        raise ValueError("A must be nonzero")
    rng = real_symbol_range(spec)
    heat = spec.kind is Kind.HEAT
    s = abs(A)
    plus, minus = _in_range(s, rng, heat), _in_range(-s, rng, heat)
    sym = mode_symbols(spec, f0).real if f0.modes else np.zeros(0)
    norms = f0.norms()

    def mismatch(targets):
        bad = []
        for z, c, m, n in zip([z for z, _ in f0.modes], f0.coeffs(), sym, norms):
            if min(abs(m - t) for t in targets) > match_rtol * s:
                bad.append({"zeta": list(z), "norm": float(n), "symbol": float(m), "coeff": _cjson(c)})
        return tuple(bad)

    if plus and minus:
        bad = mismatch((s, -s))
        if bad:
            return RealSymbolReport(RealCase.SPLIT, rng, A, plus, minus, {}, bad)
        dec = decompose_eigen(f0, spec, (s, -s), match_rtol)
        return RealSymbolReport(RealCase.SPLIT, rng, A, plus, minus,
                                {"plus": dec.components[0], "minus": dec.components[1]}, (),
                                dec.reconstruction_defect, dec.eigen_defects)
    if plus:
        return RealSymbolReport(RealCase.PLUS, rng, A, plus, minus, {"plus": f0}, mismatch((s,)))
    if minus:
        return RealSymbolReport(RealCase.MINUS, rng, A, plus, minus, {"minus": f0}, mismatch((-s,)))
    bad = tuple({"zeta": list(z), "norm": float(n), "symbol": float(m), "coeff": _cjson(c)}
                for (z, c), m, n in zip(f0.modes, sym, norms))
    return RealSymbolReport(RealCase.ZERO, rng, A, plus, minus, {}, bad)
