"""Exact arithmetic on finite expansions in spherical-function modes.

A mode ``(lam, k, c)`` stands for ``c * d^k/dlam^k phi_lam``.  Because
``phi_lam`` is even in ``lam``, ``phi_{-lam,k} = (-1)^k phi_{lam,k}``; modes are
stored under the canonical representative with ``Im lam > 0``, or
``Im lam == 0`` and ``Re lam >= 0``.  Odd orders at ``lam = 0`` vanish
identically and are dropped.

A multiplier with symbol ``m`` acts on a mode through the Leibniz rule

    Theta phi_{lam,k} = sum_i C(k, i) m^(i)(lam) phi_{lam,k-i}

which is upper triangular in the derivative order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .special_fn import MultiplierSpec, symbol_deriv, symbol_value

MODE_EPS = 1e-14
DISTINCT_TOL = 1e-9


def _clean(z: complex) -> complex:
    # fold -0.0 into 0.0 so that keys compare equal
    return complex(z.real + 0.0, z.imag + 0.0)


def canonical(lam: complex, order: int) -> tuple[complex, int]:
    """Canonical representative of ``lam`` and the sign picked up by order ``order``."""
    lam = _clean(complex(lam))
    if lam.imag < 0 or (lam.imag == 0 and lam.real < 0):
        return _clean(-lam), (-1) ** order
    return lam, 1


@dataclass(frozen=True)
class Mode:
    lam: complex
    order: int
    coeff: complex


@dataclass(frozen=True)
class ModeExpansion:
    """Immutable finite sum of spherical-function modes.

    Build with :meth:`from_terms`; the plain constructor expects canonical,
    merged, sorted modes.
    """

    modes: tuple[Mode, ...] = ()
    strip_bound: float = 0.0

    @classmethod
    def from_terms(cls, terms: Iterable, strip_bound: Optional[float] = None) -> "ModeExpansion":
        acc: dict[tuple[complex, int], complex] = {}
        for term in terms:
            if isinstance(term, Mode):
                lam, k, c = term.lam, term.order, term.coeff
            else:
                lam, k, c = term
            k = int(k)
            if k < 0:
                raise ValueError("mode order must be nonnegative")
            lam_c, sign = canonical(lam, k)
            if lam_c == 0 and k % 2:
                continue
            key = (lam_c, k)
            acc[key] = acc.get(key, 0j) + sign * complex(c)
        lams = sorted({key[0] for key in acc}, key=lambda z: (z.real, z.imag))
        for u, v in zip(lams, lams[1:]):
            if abs(u - v) <= DISTINCT_TOL:
                raise ValueError(f"spectral parameters {u} and {v} closer than {DISTINCT_TOL}")
        modes = tuple(
            Mode(lam, k, c)
            for (lam, k), c in sorted(acc.items(), key=lambda kv: (kv[0][0].real, kv[0][0].imag, kv[0][1]))
            if c != 0)
        needed = max((abs(m.lam.imag) for m in modes), default=0.0)
        if strip_bound is None:
            strip_bound = needed
        elif needed > strip_bound * (1 + 1e-12) + 1e-15:
            raise ValueError(f"mode with |Im lam| = {needed} outside strip of half-width {strip_bound}")
        return cls(modes, float(strip_bound))

    @classmethod
    def single(cls, lam: complex, order: int = 0, coeff: complex = 1.0,
               strip_bound: Optional[float] = None) -> "ModeExpansion":
        return cls.from_terms([(lam, order, coeff)], strip_bound)

    @classmethod
    def zero(cls, strip_bound: float = 0.0) -> "ModeExpansion":
        return cls((), float(strip_bound))

    def __iter__(self) -> Iterator[Mode]:
        return iter(self.modes)

    def __len__(self) -> int:
        return len(self.modes)

    def coefficient(self, lam: complex, order: int) -> complex:
        lam_c, sign = canonical(lam, order)
        for m in self.modes:
            if m.lam == lam_c and m.order == order:
                return sign * m.coeff
        return 0j

    def max_abs(self) -> float:
        return max((abs(m.coeff) for m in self.modes), default=0.0)

    @property
    def max_order(self) -> int:
        return max((m.order for m in self.modes), default=0)

    def __add__(self, other: "ModeExpansion") -> "ModeExpansion":
        if not isinstance(other, ModeExpansion):
            return NotImplemented
        return ModeExpansion.from_terms(
            [*self.modes, *other.modes], max(self.strip_bound, other.strip_bound))

    def __neg__(self) -> "ModeExpansion":
        return self.scale(-1.0)

    def __sub__(self, other: "ModeExpansion") -> "ModeExpansion":
        if not isinstance(other, ModeExpansion):
            return NotImplemented
        return self + (-other)

    def scale(self, s: complex) -> "ModeExpansion":
        s = complex(s)
        return ModeExpansion.from_terms(
            [(m.lam, m.order, s * m.coeff) for m in self.modes], self.strip_bound)

    def __mul__(self, s):
        if isinstance(s, (int, float, complex, np.number)):
            return self.scale(s)
        return NotImplemented

    __rmul__ = __mul__

    def pruned(self, eps: float = MODE_EPS, scale: Optional[float] = None) -> "ModeExpansion":
        """Drop coefficients at or below ``eps * scale`` (default scale: largest coefficient)."""
        ref = self.max_abs() if scale is None else scale
        return ModeExpansion(
            tuple(m for m in self.modes if abs(m.coeff) > eps * ref), self.strip_bound)

    def is_zero(self, eps: float = MODE_EPS, scale: Optional[float] = None) -> bool:
        """Zero up to the mode-space epsilon, relative to ``scale``."""
        ref = self.max_abs() if scale is None else scale
        return self.max_abs() <= eps * ref if ref > 0 else True

    def allclose(self, other: "ModeExpansion", eps: float = MODE_EPS) -> bool:
        ref = max(self.max_abs(), other.max_abs())
        return (self - other).max_abs() <= eps * ref

    def to_records(self) -> list[dict]:
        return [
            {"lambda_re": m.lam.real, "lambda_im": m.lam.imag, "order": m.order,
             "coeff_re": m.coeff.real, "coeff_im": m.coeff.imag}
            for m in self.modes]

    @classmethod
    def from_records(cls, records: Sequence[dict], strip_bound: Optional[float] = None) -> "ModeExpansion":
        return cls.from_terms(
            [(complex(r["lambda_re"], r["lambda_im"]), int(r["order"]),
              complex(r["coeff_re"], r["coeff_im"])) for r in records], strip_bound)

    def to_json(self) -> str:
        return json.dumps(self.to_records())

    @classmethod
    def from_json(cls, text: str, strip_bound: Optional[float] = None) -> "ModeExpansion":
        return cls.from_records(json.loads(text), strip_bound)


@dataclass(frozen=True)
class PlaneWaveExpansion:
    """Finite sum ``sum_j c_j exp(i x . zeta_j)`` with pairwise distinct real ``zeta_j``."""

    modes: tuple[tuple[tuple[float, ...], complex], ...]

    def __post_init__(self):
        dims = {len(z) for z, _ in self.modes}
        if len(dims) > 1:
            raise ValueError("frequency vectors of mixed dimension")
        norm = {}
        for z, c in self.modes:
            z = tuple(float(v) + 0.0 for v in z)
            if not all(np.isfinite(z)):
                raise ValueError("non-finite frequency")
            norm[z] = norm.get(z, 0j) + complex(c)
        items = sorted((z, c) for z, c in norm.items() if c != 0)
        keys = np.array([z for z, _ in items]) if items else np.zeros((0, 0))
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                if np.max(np.abs(keys[i] - keys[j])) <= DISTINCT_TOL:
                    raise ValueError(f"frequencies {items[i][0]} and {items[j][0]} not distinct")
        object.__setattr__(self, "modes", tuple(items))

    @classmethod
    def from_terms(cls, terms: Iterable) -> "PlaneWaveExpansion":
        return cls(tuple((tuple(np.atleast_1d(np.asarray(z, float))), complex(c)) for z, c in terms))

    @property
    def d(self) -> Optional[int]:
        return len(self.modes[0][0]) if self.modes else None

    def norms(self) -> np.ndarray:
        return np.array([math.hypot(*z) if z else 0.0 for z, _ in self.modes])

    def coeffs(self) -> np.ndarray:
        return np.array([c for _, c in self.modes], dtype=complex)

    def max_abs(self) -> float:
        return max((abs(c) for _, c in self.modes), default=0.0)

    def evaluate(self, x) -> np.ndarray:
        """Values at points ``x`` (shape ``(..., d)``)."""
        x = np.asarray(x, float)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for z, c in self.modes:
            out = out + c * np.exp(1j * (x @ np.asarray(z)))
        return out

    def __add__(self, other):
        if not isinstance(other, PlaneWaveExpansion):
            return NotImplemented
        return PlaneWaveExpansion(self.modes + other.modes)

    def scale(self, s: complex) -> "PlaneWaveExpansion":
        return PlaneWaveExpansion(tuple((z, complex(s) * c) for z, c in self.modes))

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        if not isinstance(other, PlaneWaveExpansion):
            return NotImplemented
        return self + (-other)

    def __mul__(self, s):
        if isinstance(s, (int, float, complex, np.number)):
            return self.scale(s)
        return NotImplemented

    __rmul__ = __mul__

    def pruned(self, eps: float = MODE_EPS, scale: Optional[float] = None) -> "PlaneWaveExpansion":
        ref = self.max_abs() if scale is None else scale
        return PlaneWaveExpansion(tuple((z, c) for z, c in self.modes if abs(c) > eps * ref))

    def is_zero(self, eps: float = MODE_EPS, scale: Optional[float] = None) -> bool:
        ref = self.max_abs() if scale is None else scale
        return self.max_abs() <= eps * ref if ref > 0 else True

    def allclose(self, other: "PlaneWaveExpansion", eps: float = MODE_EPS) -> bool:
        ref = max(self.max_abs(), other.max_abs())
        return (self - other).max_abs() <= eps * ref


Expansion = Union[ModeExpansion, PlaneWaveExpansion]


# ---------------------------------------------------------------------------
# operator action


def apply_multiplier(spec: MultiplierSpec, f: ModeExpansion) -> ModeExpansion:
    """Exact action of a radial multiplier on a mode expansion."""
    terms = []
    for m in f.modes:
        for i in range(m.order + 1):
            di = complex(symbol_deriv(spec, m.lam, i))
            terms.append((m.lam, m.order - i, math.comb(m.order, i) * di * m.coeff))
    return ModeExpansion.from_terms(terms, f.strip_bound)


def apply_laplacian_modes(f: ModeExpansion, d: int = 3) -> ModeExpansion:
    """``Delta f`` with ``Delta = -sum d^2`` (symbol ``lam^2``).

    The result does not depend on ``d``; it only labels the spec.
    """
    return apply_multiplier(MultiplierSpec.laplacian(d), f)


def apply_planewave_multiplier(spec: MultiplierSpec, f: PlaneWaveExpansion) -> PlaneWaveExpansion:
    """Diagonal action ``E_zeta -> m(|zeta|) E_zeta``."""
    if not f.modes:
        return f
    m = np.atleast_1d(symbol_value(spec, f.norms().astype(complex)))
    return PlaneWaveExpansion(tuple((z, mj * c) for (z, c), mj in zip(f.modes, m)))


def apply(spec: MultiplierSpec, f: Expansion) -> Expansion:
    if isinstance(f, PlaneWaveExpansion):
        return apply_planewave_multiplier(spec, f)
    return apply_multiplier(spec, f)


def radialize_planewaves(f: PlaneWaveExpansion) -> ModeExpansion:
    """Radialization: ``R E_zeta = phi_{|zeta|}``; equal norms merge."""
    return ModeExpansion.from_terms([(n, 0, c) for n, c in zip(f.norms(), f.coeffs())], 0.0)


def mode_symbols(spec: MultiplierSpec, f: Expansion) -> np.ndarray:
    if isinstance(f, PlaneWaveExpansion):
        lam = f.norms().astype(complex)
    else:
        lam = np.array([m.lam for m in f.modes], dtype=complex)
    if not lam.size:
        return lam
    return np.atleast_1d(symbol_value(spec, lam))


# ---------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class OrbitReport:
    """Coefficient magnitudes along a one-sided or two-sided orbit.

    ``magnitudes[j, k]`` is ``|c_j| * ratio_j**k`` with ``ratio_j = |m_j|/|A|``
    (forward) or its inverse (backward).
    """

    ks: np.ndarray
    ratios: np.ndarray
    magnitudes: np.ndarray
    admissible: np.ndarray
    direction: str

    @property
    def unbounded(self) -> np.ndarray:
        return ~self.admissible


def forward_orbit(spec: MultiplierSpec, f0: PlaneWaveExpansion, A: complex, K: int,
                  direction: str = "forward", rtol: float = 1e-12) -> OrbitReport:
    """Growth of ``f_k = (Theta / A)^k f_0`` mode by mode.

    ``direction='forward'`` flags modes with ``|m| > |A|`` (unbounded as
    ``k -> +inf``); ``'backward'`` flags ``|m| < |A|``; ``'both'`` admits only
    ``|m| = |A|``.
    """
    A = complex(A)
    if A == 0:
        raise ValueError("amplitude must be nonzero")
    if K < 1:
        raise ValueError("K must be positive")
    absA = abs(A)
    mags = np.abs(mode_symbols(spec, f0))
    with np.errstate(divide="ignore"):
        fwd = mags / absA
        bwd = np.where(mags > 0, absA / np.where(mags > 0, mags, 1.0), np.inf)
    ok_f = fwd <= 1 + rtol
    ok_b = bwd <= 1 + rtol
    if direction == "forward":
        ratios, ok = fwd, ok_f
    elif direction == "backward":
        ratios, ok = bwd, ok_b
    elif direction == "both":
        ratios, ok = np.maximum(fwd, bwd), ok_f & ok_b
    else:
        raise ValueError(f"unknown direction {direction!r}")
    ks = np.arange(K + 1)
    with np.errstate(over="ignore", invalid="ignore"):
        magnitudes = np.abs(f0.coeffs())[:, None] * ratios[:, None] ** ks[None, :]
    return OrbitReport(ks, ratios, magnitudes, ok, direction)


@dataclass(frozen=True)
class JordanTable:
    ks: np.ndarray
    order0: np.ndarray
    order1: np.ndarray
    predicted0: np.ndarray
    symbol: complex
    symbol_slope: complex
    max_rel_defect: float

    @property
    def growth(self) -> np.ndarray:
        """``|order-0 coefficient| / |m|^k``, linear in ``k`` when ``m' != 0``."""
        return np.abs(self.order0) / np.abs(self.symbol) ** self.ks


def jordan_growth_demo(spec: MultiplierSpec, lam: complex, K: int) -> JordanTable:
    """Apply ``spec`` ``K`` times to the Jordan mode ``phi_{lam,1}``.

    After ``k`` steps the order-0 coefficient is ``k m'(lam) m(lam)^(k-1)``; the
    table records the iterated coefficients next to that formula.
    """
    lam = complex(lam)
    m = complex(symbol_value(spec, lam))
    if m == 0:
        raise ValueError("symbol vanishes at lam; orbit is trivial")
    m1 = complex(symbol_deriv(spec, lam, 1))
    f = ModeExpansion.single(lam, 1, 1.0)
    ks = np.arange(K + 1)
    c0 = np.zeros(K + 1, complex)
    c1 = np.zeros(K + 1, complex)
    pred = np.zeros(K + 1, complex)
    worst = 0.0
    for k in ks:
        if k:
            f = apply_multiplier(spec, f)
        c0[k] = f.coefficient(lam, 0)
        c1[k] = f.coefficient(lam, 1)
        pred[k] = k * m1 * m ** (k - 1) if k else 0j
        scale = max(abs(c1[k]), abs(c0[k]), abs(pred[k]))
        if scale:
            worst = max(worst, abs(c0[k] - pred[k]) / scale)
    return JordanTable(ks, c0, c1, pred, m, m1, worst)


# ---------------------------------------------------------------------------
# eigen decomposition


@dataclass(frozen=True)
class Decomposition:
    alphas: tuple[complex, ...]
    components: tuple
    reconstruction_defect: float
    eigen_defects: tuple[float, ...]

    def component(self, alpha: complex):
        for a, g in zip(self.alphas, self.components):
            if abs(a - alpha) <= DISTINCT_TOL:
                return g
        raise KeyError(alpha)


def _zero_like(f: Expansion) -> Expansion:
    if isinstance(f, PlaneWaveExpansion):
        return PlaneWaveExpansion(())
    return ModeExpansion.zero(f.strip_bound)


def _rescale_modes(f: Expansion, factors: np.ndarray) -> Expansion:
    if isinstance(f, PlaneWaveExpansion):
        return PlaneWaveExpansion.from_terms((z, c * w) for (z, c), w in zip(f.modes, factors))
    return ModeExpansion.from_terms(((m.lam, m.order, m.coeff * w) for m, w in zip(f.modes, factors)),
                                    f.strip_bound)


def decompose_eigen(f0: Expansion, spec: MultiplierSpec, alphas: Sequence[complex],
                    match_rtol: float = 1e-9) -> Decomposition:
    """Split ``f0`` into eigencomponents of ``spec`` for the distinct values ``alphas``.

    ``g_i = prod_{j != i} (Theta - alpha_j) f0 / prod_{j != i} (alpha_i - alpha_j)``.
    Every mode's symbol value must match one of ``alphas``.
    """
    alphas = tuple(complex(a) for a in alphas)
    if not alphas:
        raise ValueError("need at least one eigenvalue")
    for i in range(len(alphas)):
        for j in range(i + 1, len(alphas)):
            if abs(alphas[i] - alphas[j]) <= DISTINCT_TOL:
                raise ValueError(f"eigenvalues {alphas[i]} and {alphas[j]} are not distinct")
    if isinstance(f0, ModeExpansion) and f0.max_order > 0:
        raise ValueError("Jordan modes are not sums of eigenfunctions")
    sym = mode_symbols(spec, f0)
    scale_a = max(abs(a) for a in alphas)
    for s in sym:
        if min(abs(s - a) for a in alphas) > match_rtol * max(scale_a, abs(s), 1e-300):
            raise ValueError(f"mode with symbol value {s} matches none of {alphas}")
    # every mode is an eigenfunction, so the projector acts on each coefficient
    # as a scalar; forming (s - a_j) directly avoids cancelling m c - a_j c
    comps = []
    for i, ai in enumerate(alphas):
        factors = np.ones(len(sym), dtype=complex)
        for j, aj in enumerate(alphas):
            if j != i:
                factors *= (sym - aj) / (ai - aj)
        comps.append(_rescale_modes(f0, factors).pruned(MODE_EPS, f0.max_abs()))
    total = _zero_like(f0)
    for g in comps:
        total = total + g
    ref = f0.max_abs()
    recon = (total - f0).max_abs() / ref if ref else 0.0
    eig = tuple(
        (apply(spec, g) - g.scale(a)).max_abs() / (ref * max(scale_a, 1e-300)) if ref else 0.0
        for a, g in zip(alphas, comps))
    return Decomposition(alphas, tuple(comps), recon, eig)


# ---------------------------------------------------------------------------
# sequences


@dataclass(frozen=True)
class SequenceSpec:
    """``f_k = sum_j c_j exp(i k theta_j) phi_{lam_j, k_j}`` for all integers ``k``.

    ``phases`` align with ``base.modes``.
    """

    base: ModeExpansion
    phases: tuple[float, ...]
    amplitude: complex = 1.0

    def __post_init__(self):
        if len(self.phases) != len(self.base.modes):
            raise ValueError("one phase increment per base mode required")
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    def to_dict(self) -> dict:
        return {
            "modes": self.base.to_records(),
            "phases": list(self.phases),
            "amplitude": {"re": self.amplitude.real, "im": self.amplitude.imag},
            "strip_bound": self.base.strip_bound,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SequenceSpec":
        base = ModeExpansion.from_records(data["modes"], data.get("strip_bound"))
        amp = data.get("amplitude", {"re": 1.0, "im": 0.0})
        return cls(base, tuple(data["phases"]), complex(amp["re"], amp["im"]))


def make_sequence(seq: SequenceSpec, k: int) -> ModeExpansion:
    """The ``k``-th member ``f_k`` of the sequence."""
    return ModeExpansion(
        tuple(Mode(m.lam, m.order, m.coeff * complex(np.exp(1j * k * th)))
              for m, th in zip(seq.base.modes, seq.phases)),
        seq.base.strip_bound)


def verify_recurrence(spec: MultiplierSpec, seq: SequenceSpec, A: Optional[complex] = None,
                      k_range: Iterable[int] = range(-5, 6)) -> float:
    """``max_k`` of the largest coefficient of ``Theta f_k - A f_{k+1}``."""
    A = seq.amplitude if A is None else complex(A)
    worst = 0.0
    for k in k_range:
        diff = apply_multiplier(spec, make_sequence(seq, k)) - make_sequence(seq, k + 1).scale(A)
        worst = max(worst, diff.max_abs())
    return worst


def recurrence_scale(spec: MultiplierSpec, seq: SequenceSpec, A: Optional[complex] = None) -> float:
    """Natural size of ``Theta f_k`` used to read a recurrence defect as zero."""
    A = seq.amplitude if A is None else complex(A)
    sym = np.abs(mode_symbols(spec, seq.base)) if seq.base.modes else np.zeros(1)
    # |m(0)| keeps the scale meaningful when A and every m(lam_j) vanish
    ref = max(abs(A), float(sym.max(initial=0.0)), abs(complex(symbol_value(spec, 0.0))))
    return ref * max(seq.base.max_abs(), 1e-300)
