"""Radial functions sampled on a uniform grid, and grid versions of the operators.

Values between nodes are read off a cubic spline clamped to zero slope at the
origin (the even extension of a smooth radial profile).  Operators that
average over a shell of radius ``rho`` need data out to ``r + rho``; their
output is truncated to the nodes where that holds, so the retained domain
shrinks and nothing is extrapolated.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .modes import ModeExpansion
from .special_fn import phi_deriv, radial_rule, sphere_rule

DEFAULT_H = 1e-3
DEFAULT_RMAX = 20.0
SPHERE_NODES = 64
BALL_NODES = 32
HEAT_NODES = 96
HEAT_TAIL = 1e-16
_CHUNK = 1 << 20


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in ``R^d``."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial nodes ``0, h, 2h, ..., r_max``."""

    h: float
    r_max: float
    d: int

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError("h must be positive")
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError("r_max must be positive")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("dimension must be a positive integer")
        n = self.r_max / self.h
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ValueError("r_max must be an integer multiple of h")
        if round(n) < 2:
            raise ValueError("grid needs at least 3 nodes")
        object.__setattr__(self, "d", int(self.d))

    @classmethod
    def default(cls, d: int = 3) -> "RadialGrid":
        return cls(DEFAULT_H, DEFAULT_RMAX, d)

    @property
    def n(self) -> int:
        """Number of nodes."""
        return int(round(self.r_max / self.h)) + 1

    @property
    def radii(self) -> np.ndarray:
        return self.h * np.arange(self.n)

    def truncated(self, r_keep: float) -> "RadialGrid":
        """Largest subgrid with last node ``<= r_keep``."""
        m = int(math.floor(r_keep / self.h * (1 + 1e-12)))
        if m < 2:
            raise ValueError(f"retained domain [0, {r_keep}] holds fewer than 3 nodes")
        return RadialGrid(self.h, m * self.h, self.d)


@dataclass(frozen=True)
class SampledRadialFunction:
    """Complex samples of a radial function with declared growth type ``a``.

    ``notes`` records truncations and one-sided stencils applied so far.
    """

    grid: RadialGrid
    values: np.ndarray
    growth_type: float = 0.0
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample values must be finite")
        if not (self.growth_type >= 0 and math.isfinite(self.growth_type)):
            raise ValueError("growth type must be a nonnegative real")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "growth_type", float(self.growth_type))

    @classmethod
    def from_callable(cls, fn: Callable, grid: RadialGrid, growth_type: float = 0.0):
        return cls(grid, np.asarray(fn(grid.radii), dtype=complex) * np.ones(grid.n), growth_type)

    @property
    def radii(self) -> np.ndarray:
        return self.grid.radii

    def restrict(self, grid: RadialGrid) -> "SampledRadialFunction":
        """Values on a prefix subgrid with the same spacing."""
        if abs(grid.h - self.grid.h) > 1e-15 or grid.n > self.grid.n:
            raise ValueError("not a prefix subgrid")
        return SampledRadialFunction(grid, self.values[: grid.n], self.growth_type, self.notes)

    def _with(self, values, grid=None, note=None, growth_type=None):
        notes = self.notes + ((note,) if note else ())
        return SampledRadialFunction(grid or self.grid, values,
                                     self.growth_type if growth_type is None else growth_type, notes)

    def __add__(self, other):
        if not isinstance(other, SampledRadialFunction):
            return NotImplemented
        g = self.grid if self.grid.n <= other.grid.n else other.grid
        a, b = self.restrict(g), other.restrict(g)
        return SampledRadialFunction(g, a.values + b.values, max(a.growth_type, b.growth_type),
                                     a.notes + b.notes)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, s: complex) -> "SampledRadialFunction":
        return self._with(complex(s) * self.values)

    def to_csv(self, extra: Optional[dict] = None) -> str:
        return samples_to_csv(self.radii, self.values, {
            "a": self.growth_type, "h": self.grid.h, "rmax": self.grid.r_max,
            "d": self.grid.d, **(extra or {})}, "r")

    @classmethod
    def from_csv(cls, text: str) -> "SampledRadialFunction":
        meta, x, v = csv_to_samples(text)
        grid = RadialGrid(float(meta["h"]), float(meta["rmax"]), int(meta["d"]))
        if x.shape != (grid.n,) or np.max(np.abs(x - grid.radii)) > 1e-9 * grid.r_max:
            raise ValueError("CSV radii do not match the declared grid")
        return cls(grid, v, float(meta["a"]))


# ---------------------------------------------------------------------------
# CSV helpers shared with the transform module


def fmt(x: float) -> str:
    """Fixed 17-significant-digit rendering used in every emitted file."""
    return format(float(x) + 0.0, ".17g")


def samples_to_csv(x: np.ndarray, v: np.ndarray, meta: dict, xname: str) -> str:
    buf = io.StringIO()
    buf.write("# " + ",".join(f"{k}={meta[k] if isinstance(meta[k], str) else fmt(meta[k])}"
                              for k in meta) + "\n")
    buf.write(f"{xname},re,im\n")
    for xi, vi in zip(x, v):
        buf.write(f"{fmt(xi)},{fmt(vi.real)},{fmt(vi.imag)}\n")
    return buf.getvalue()


def csv_to_samples(text: str):
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing metadata comment line")
    meta = dict(item.split("=", 1) for item in lines[0][1:].strip().split(",") if item)
    data = np.loadtxt(io.StringIO("\n".join(lines[2:])), delimiter=",", ndmin=2)
    return meta, data[:, 0], data[:, 1] + 1j * data[:, 2]


# ---------------------------------------------------------------------------
# sampling and growth


def sample_expansion(f: ModeExpansion, grid: RadialGrid) -> SampledRadialFunction:
    """Pointwise values of a mode expansion; growth type is ``max |Im lam|``."""
    r = grid.radii
    out = np.zeros(grid.n, complex)
    for m in f.modes:
        out += m.coeff * phi_deriv(m.lam, r, grid.d, m.order)
    a = max((abs(m.lam.imag) for m in f.modes), default=0.0)
    return SampledRadialFunction(grid, out, a)


def growth_constant(f: SampledRadialFunction, a: Optional[float] = None) -> float:
    """Smallest ``M`` with ``|f(r)| <= M exp(a r)`` on the nodes."""
    a = f.growth_type if a is None else float(a)
    return float(np.max(np.abs(f.values) * np.exp(-a * f.radii)))


def radial_derivative(f: SampledRadialFunction, order: int) -> np.ndarray:
    """Central differences in ``r``; the origin uses evenness, the far end is one-sided."""
    v, h = f.values, f.grid.h
    out = np.empty_like(v)
    if order == 0:
        return v.copy()
    if order == 1:
        out[1:-1] = (v[2:] - v[:-2]) / (2 * h)
        out[0] = 0.0
        out[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * h)
        return out
    if order == 2:
        out[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / h**2
        out[0] = 2 * (v[1] - v[0]) / h**2
        if len(v) >= 4:
            out[-1] = (2 * v[-1] - 5 * v[-2] + 4 * v[-3] - v[-4]) / h**2
        else:
            out[-1] = out[-2]
        return out
    raise ValueError("derivative order must be 0, 1 or 2")


def seminorm_gamma(f: SampledRadialFunction, m: int, deriv_order: int, a: float) -> float:
    """Grid supremum of ``exp(a r) (1 + r)^m |f^(deriv_order)(r)|``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    r = f.radii
    with np.errstate(over="ignore"):
        vals = np.exp(a * r) * (1 + r) ** m * np.abs(radial_derivative(f, deriv_order))
    return float(np.max(vals))


@dataclass(frozen=True)
class SupTrend:
    """Suprema over growing prefixes ``[0, c]`` of the grid."""

    cutoffs: np.ndarray
    sups: np.ndarray

    @property
    def bounded(self) -> bool:
        """False when the supremum keeps being attained at the cutoff."""
        s = self.sups
        return not bool(np.all(np.diff(s) > 1e-12 * np.abs(s[1:])))

    @property
    def growth_rate(self) -> float:
        """Slope of ``log sup`` against the cutoff over the last two cutoffs."""
        s = self.sups
        if s[-1] <= 0 or s[-2] <= 0:
            return 0.0
        return float((math.log(s[-1]) - math.log(s[-2])) / (self.cutoffs[-1] - self.cutoffs[-2]))


def sup_trend(f: SampledRadialFunction, weight: Callable[[np.ndarray], np.ndarray],
              fractions: Sequence[float] = (0.25, 0.5, 0.75, 1.0), deriv_order: int = 0) -> SupTrend:
    r = f.radii
    with np.errstate(over="ignore"):
        vals = weight(r) * np.abs(radial_derivative(f, deriv_order))
    cut = np.array([fr * f.grid.r_max for fr in fractions])
    sups = np.array([np.max(vals[r <= c * (1 + 1e-12)]) for c in cut])
    return SupTrend(cut, sups)


def growth_trend(f: SampledRadialFunction, a: Optional[float] = None, **kw) -> SupTrend:
    a = f.growth_type if a is None else float(a)
    return sup_trend(f, lambda r: np.exp(-a * r), **kw)


def seminorm_trend(f: SampledRadialFunction, m: int, deriv_order: int, a: float, **kw) -> SupTrend:
    return sup_trend(f, lambda r: np.exp(a * r) * (1 + r) ** m, deriv_order=deriv_order, **kw)


# ---------------------------------------------------------------------------
# interpolation and shell averages


class _UniformSpline:
    """Cubic spline on the uniform grid with a direct index lookup."""

    def __init__(self, f: SampledRadialFunction, interp: str = "cubic"):
        self.h = f.grid.h
        self.n = f.grid.n
        self.kind = interp
        if interp == "cubic":
            cs = CubicSpline(f.radii, f.values, bc_type=((1, 0.0), "not-a-knot"))
            self.c = np.ascontiguousarray(cs.c)
        elif interp == "linear":
            self.v = f.values
        else:
            raise ValueError(f"unknown interpolation {interp!r}")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        u = x / self.h
        i = np.minimum(u.astype(np.intp), self.n - 2)
        dx = u - i
        if self.kind == "linear":
            return self.v[i] * (1 - dx) + self.v[i + 1] * dx
        dx = dx * self.h
        c = self.c
        return ((c[0, i] * dx + c[1, i]) * dx + c[2, i]) * dx + c[3, i]


def _shell_average(spl: _UniformSpline, r: np.ndarray, rho: float, s: np.ndarray,
                   w: np.ndarray) -> np.ndarray:
    """``sum_j w_j f(sqrt(r^2 + rho^2 - 2 r rho s_j))`` in row blocks."""
    out = np.empty(r.shape, complex)
    step = max(1, _CHUNK // max(1, s.size))
    for lo in range(0, r.size, step):
        rr = r[lo:lo + step, None]
        x = np.sqrt(np.maximum(rr * rr + rho * rho - 2.0 * rho * rr * s[None, :], 0.0))
        out[lo:lo + step] = spl(x) @ w
    return out


def _check_radius(f: SampledRadialFunction, reach: float, what: str) -> RadialGrid:
    if not (reach < f.grid.r_max):
        raise ValueError(f"{what} needs data out to r + {reach:.6g} but r_max = {f.grid.r_max}")
    return f.grid.truncated(f.grid.r_max - reach)


def apply_spherical_mean_grid(f: SampledRadialFunction, t: float, n_s: int = SPHERE_NODES,
                              interp: str = "cubic") -> SampledRadialFunction:
    """``M_t f`` on the retained domain ``r <= r_max - t``."""
    if not t > 0:
        raise ValueError("t must be positive")
    out_grid = _check_radius(f, t, "spherical mean")
    s, w = sphere_rule(f.grid.d, n_s).full()
    vals = _shell_average(_UniformSpline(f, interp), out_grid.radii, float(t), s, w)
    return f._with(vals, out_grid, f"spherical mean t={fmt(t)}: retained r<={fmt(out_grid.r_max)}")


def apply_ball_mean_grid(f: SampledRadialFunction, t: float, n_s: int = SPHERE_NODES,
                         n_rho: int = BALL_NODES, interp: str = "cubic") -> SampledRadialFunction:
    """``B_t f = d int_0^1 M_{tu} f u^(d-1) du`` on ``r <= r_max - t``."""
    if not t > 0:
        raise ValueError("t must be positive")
    out_grid = _check_radius(f, t, "ball mean")
    d = f.grid.d
    s, w = sphere_rule(d, n_s).full()
    u, wu = radial_rule(d, n_rho)
    spl = _UniformSpline(f, interp)
    r = out_grid.radii
    vals = np.zeros(r.size, complex)
    for uj, wj in zip(u, wu):
        vals += wj * _shell_average(spl, r, float(t * uj), s, w)
    return f._with(vals, out_grid, f"ball mean t={fmt(t)}: retained r<={fmt(out_grid.r_max)}")


def heat_radius(t: float, a: float, tail: float = HEAT_TAIL) -> float:
    """Smallest ``rho`` with ``exp(a rho - rho^2/(4t)) <= tail``."""
    L = -math.log(tail)
    return 2 * t * a + math.sqrt(4 * t * t * a * a + 4 * t * L)


def apply_heat_grid(f: SampledRadialFunction, t: float, n_s: int = SPHERE_NODES,
                    n_rho: int = HEAT_NODES, interp: str = "cubic") -> SampledRadialFunction:
    """``exp(-t Delta) f`` as a radial integral of shell averages against the heat kernel.

    The kernel is cut at ``rho_max = heat_radius(t, a)``; output is kept on
    ``r <= r_max - rho_max``.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    d = f.grid.d
    rho_max = heat_radius(t, f.growth_type)
    out_grid = _check_radius(f, rho_max, f"heat t={t}")
    x, wx = np.polynomial.legendre.leggauss(n_rho)
    rho = 0.5 * rho_max * (x + 1)
    wr = 0.5 * rho_max * wx * sphere_area(d) * (4 * math.pi * t) ** (-d / 2) \
        * rho ** (d - 1) * np.exp(-rho**2 / (4 * t))
    s, w = sphere_rule(d, n_s).full()
    spl = _UniformSpline(f, interp)
    r = out_grid.radii
    vals = np.zeros(r.size, complex)
    for rj, wj in zip(rho, wr):
        vals += wj * _shell_average(spl, r, float(rj), s, w)
    return f._with(vals, out_grid,
                   f"heat t={fmt(t)}: kernel cut at rho={fmt(rho_max)}, retained r<={fmt(out_grid.r_max)}")


def apply_laplacian_grid(f: SampledRadialFunction) -> SampledRadialFunction:
    """``Delta f = -(f'' + (d-1) f'/r)``; ``-d f''(0)`` at the origin, one-sided at ``r_max``."""
    d = f.grid.d
    f1 = radial_derivative(f, 1)
    f2 = radial_derivative(f, 2)
    r = f.radii
    out = np.empty_like(f.values)
    out[1:] = -(f2[1:] + (d - 1) * f1[1:] / r[1:])
    out[0] = -d * f2[0]
    return f._with(out, note="laplacian: one-sided stencil at r_max")


def _interior_norms(f: SampledRadialFunction):
    v = f.values[:-1]
    w = np.exp(-f.growth_type * f.radii[:-1])
    return v * w, w


def eigen_residual(f: SampledRadialFunction, z: complex, lap: Optional[SampledRadialFunction] = None) -> float:
    """``||Delta f - z f|| / ||f||`` over all nodes but the last, weighted by ``exp(-a r)``."""
    fw, w = _interior_norms(f)
    nf = np.linalg.norm(fw)
    if nf == 0:
        raise ValueError("eigen residual of the zero function is undefined")
    lap = apply_laplacian_grid(f) if lap is None else lap
    res = (lap.values[:-1] - complex(z) * f.values[:-1]) * w
    return float(np.linalg.norm(res) / nf)


@dataclass(frozen=True)
class ResidualScan:
    zs: np.ndarray
    residuals: np.ndarray
    z_best: complex
    best: float

    @property
    def minimum(self) -> float:
        return float(min(self.best, self.residuals.min(initial=np.inf)))


def eigen_residual_scan(f: SampledRadialFunction, zs) -> ResidualScan:
    """Residuals over trial eigenvalues ``zs`` plus the least-squares optimum ``z*``."""
    lap = apply_laplacian_grid(f)
    fw, w = _interior_norms(f)
    lw = lap.values[:-1] * w
    nf2 = np.vdot(fw, fw).real
    if nf2 == 0:
        raise ValueError("eigen residual of the zero function is undefined")
    z_best = complex(np.vdot(fw, lw) / nf2)
    zs = np.asarray(zs, complex)
    res = np.array([eigen_residual(f, z, lap) for z in zs])
    return ResidualScan(zs, res, z_best, eigen_residual(f, z_best, lap))


def heat_approach_trend(f: SampledRadialFunction, ts: Sequence[float] = (1e-1, 1e-2, 1e-3)):
    """``sup |exp(-t Delta) f - f|`` on the retained domain for each ``t`` (no rate asserted)."""
    out = []
    for t in ts:
        g = apply_heat_grid(f, t)
        out.append(float(np.max(np.abs(g.values - f.values[: g.grid.n]))))
    return np.asarray(ts, float), np.asarray(out)


def weighted_rel_error(approx: SampledRadialFunction, exact: SampledRadialFunction) -> float:
    """``max |approx - exact| e^{-ar} / max |exact| e^{-ar}`` on the common prefix."""
    g = approx.grid if approx.grid.n <= exact.grid.n else exact.grid
    a = max(approx.growth_type, exact.growth_type)
    w = np.exp(-a * g.radii)
    ex = exact.values[: g.n] * w
    diff = (approx.values[: g.n] - exact.values[: g.n]) * w
    scale = np.max(np.abs(ex))
    return float(np.max(np.abs(diff)) / scale) if scale else float(np.max(np.abs(diff)))
