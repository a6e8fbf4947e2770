"""Euclidean spherical functions, ball functions and radial multiplier symbols.

The spherical function of spectral parameter ``lam`` in dimension ``d`` is the
average of the plane wave ``exp(i lam r e1.w)`` over the unit sphere.  Its
projection onto the ``e1`` axis turns it into a one dimensional integral

    phi_lam(r) = C_d * int_{-1}^{1} exp(i lam r s) (1 - s^2)^((d-3)/2) ds

which is evaluated with a Gauss rule for the weight ``(1 - s^2)^((d-3)/2)``.
The ball function (average over the unit ball) has the same form with the
weight exponent raised to ``(d-1)/2``.

Rules are stored folded onto ``s > 0``: for a symmetric rule the pair ``+-s``
contributes ``2 cos(z)`` (even order) or ``2i sin(z)`` (odd order), which makes
evenness in ``lam`` exact and halves the work.
"""
from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

DEFAULT_NODES = 64
MAX_NODES = 1024
ADAPT_RTOL = 1e-12
MAX_DERIV_ORDER = 8

# rows per block when broadcasting (points x nodes)
_BLOCK = 4096


class QuadratureConfigError(ValueError):
    """Raised when no quadrature rule exists for the requested configuration."""


class QuadratureConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class QuadratureRule:
    """Folded Gauss rule for ``(1 - s^2)^weight_exponent`` on ``[-1, 1]``.

    ``nodes`` are the positive half of a symmetric rule and ``weights`` the
    paired weights, normalized so that they sum to one.
    """

    nodes: np.ndarray
    weights: np.ndarray
    weight_exponent: float
    n: int

    @property
    def degree(self) -> int:
        """Polynomial exactness degree of the underlying unfolded rule."""
        return 2 * self.n - 1

    def full(self) -> tuple[np.ndarray, np.ndarray]:
        """Unfolded nodes on ``[-1, 1]`` with weights summing to one."""
        x = np.concatenate([-self.nodes[::-1], self.nodes])
        w = np.concatenate([self.weights[::-1], self.weights]) / 2.0
        return x, w


def _gauss(exponent: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    if exponent == -0.5:
        j = np.arange(1, n + 1)
        x = np.cos((2 * j - 1) * np.pi / (2 * n))
        w = np.full(n, np.pi / n)
    elif exponent == 0.0:
        x, w = leggauss(n)
    else:
        x, w = roots_jacobi(n, exponent, exponent)
    order = np.argsort(x)
    return np.asarray(x)[order], np.asarray(w)[order]


@functools.lru_cache(maxsize=None)
def _folded_rule(exponent: float, n: int, unit_sphere_d1: bool) -> QuadratureRule:
    if unit_sphere_d1:
        # S^0 = {-1, +1}: exact two point rule
        nodes, weights = np.array([1.0]), np.array([1.0])
        n = 2
    else:
        if n % 2:
            raise QuadratureConfigError("node count must be even for folding")
        x, w = _gauss(exponent, n)
        h = n // 2
        nodes = 0.5 * (x[h:] - x[:h][::-1])
        weights = w[h:] + w[:h][::-1]
        weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights, float(exponent), n)


def _check_dimension(d) -> int:
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise QuadratureConfigError(f"dimension must be an integer, got {d!r}")
    if d < 1:
        raise QuadratureConfigError(f"dimension must be >= 1, got {d}")
    return int(d)


def sphere_rule(d: int, n: int = DEFAULT_NODES) -> QuadratureRule:
    """Rule for the projection of the normalized sphere measure on ``S^{d-1}``.

    d = 2 uses the Chebyshev weight, d = 3 Gauss-Legendre, d >= 4 Gauss-Jacobi
    with exponent ``(d-3)/2``; d = 1 is the exact two point sphere.
    """
    d = _check_dimension(d)
    return _folded_rule((d - 3) / 2.0, n, d == 1)


def ball_rule(d: int, n: int = DEFAULT_NODES) -> QuadratureRule:
    """Rule for the projection of the normalized ball measure, exponent ``(d-1)/2``."""
    d = _check_dimension(d)
    return _folded_rule((d - 1) / 2.0, n, False)


@functools.lru_cache(maxsize=None)
def radial_rule(d: int, n: int = DEFAULT_NODES) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule on ``[0, 1]`` for the weight ``d * rho^(d-1)`` (sums to one)."""
    d = _check_dimension(d)
    x, w = roots_jacobi(n, 0.0, float(d - 1))
    rho = 0.5 * (1.0 + x)
    w = w / w.sum()
    rho.setflags(write=False)
    w.setflags(write=False)
    return rho, w


def _fold_sum(rule: QuadratureRule, lam: np.ndarray, r: np.ndarray, k: int):
    """Value and magnitude envelope of ``sum_w (i r x)^k e^{i lam r x}`` (folded)."""
    out = np.empty(lam.shape, dtype=complex)
    env = np.empty(lam.shape, dtype=float)
    x, w = rule.nodes, rule.weights
    for lo in range(0, lam.size, _BLOCK):
        sl = slice(lo, lo + _BLOCK)
        rx = r[sl, None] * x[None, :]
        z = lam[sl, None] * rx
        if k % 2 == 0:
            kern = np.cos(z)
        else:
            kern = 1j * np.sin(z)
        if k:
            kern = kern * (1j * rx) ** k
        out[sl] = kern @ w
        env[sl] = (np.abs(rx) ** k * np.cosh(z.imag)) @ w
    return out, env


def _adaptive(family, d: int, lam, r, k: int, n0: int = DEFAULT_NODES,
              n_max: int = MAX_NODES, rtol: float = ADAPT_RTOL):
    lam_a = np.asarray(lam, dtype=complex)
    r_a = np.asarray(r, dtype=float)
    if not (np.all(np.isfinite(lam_a)) and np.all(np.isfinite(r_a))):
        raise ValueError("non-finite spectral parameter or radius")
    if np.any(r_a < 0):
        raise ValueError("radius must be nonnegative")
    lam_b, r_b = np.broadcast_arrays(lam_a, r_a)
    shape = lam_b.shape
    lam_f = lam_b.ravel()
    r_f = r_b.ravel()
    out = np.zeros(lam_f.shape, dtype=complex)
    at_origin = r_f == 0.0
    # the measure is normalized, so at r = 0 only the zeroth moment survives
    out[at_origin] = 1.0 if k == 0 else 0.0
    todo = np.flatnonzero(~at_origin)
    if todo.size:
        n = n0
        prev, _ = _fold_sum(family(d, n), lam_f[todo], r_f[todo], k)
        while True:
            n2 = 2 * n
            cur, env = _fold_sum(family(d, n2), lam_f[todo], r_f[todo], k)
            ok = np.abs(cur - prev) <= rtol * np.maximum(env, np.finfo(float).tiny)
            out[todo[ok]] = cur[ok]
            todo, prev = todo[~ok], cur[~ok]
            if not todo.size:
                break
            if n2 >= n_max or d == 1:
                warnings.warn(
                    f"quadrature did not reach rtol={rtol:g} at {n2} nodes for "
                    f"{todo.size} point(s)", QuadratureConvergenceWarning, stacklevel=3)
                out[todo] = prev
                break
            n = n2
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def _check_order(k: int, max_order: int) -> int:
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise ValueError(f"derivative order must be a nonnegative integer, got {k!r}")
    if k > max_order:
        raise ValueError(f"derivative order {k} exceeds maximum {max_order}")
    return int(k)


def phi(lam, r, d: int):
    """Spherical function ``phi_lam(r e1)`` (vectorized, broadcasting)."""
    return _adaptive(sphere_rule, _check_dimension(d), lam, r, 0)


def phi_deriv(lam, r, d: int, k: int, max_order: int = MAX_DERIV_ORDER):
    """``k``-th derivative in ``lam`` of ``phi_lam(r e1)``.

    Obtained by integrating the differentiated integrand
    ``(i r s)^k exp(i lam r s)``; no finite differences are involved.
    """
    k = _check_order(k, max_order)
    return _adaptive(sphere_rule, _check_dimension(d), lam, r, k)


def psi(lam, r, d: int):
    """Ball function: the normalized ball average of ``exp(i lam r e1.y)``.

    Normalized so that ``psi(lam, 0, d) == 1``.
    """
    return _adaptive(ball_rule, _check_dimension(d), lam, r, 0)


def psi_deriv(lam, r, d: int, k: int, max_order: int = MAX_DERIV_ORDER):
    k = _check_order(k, max_order)
    return _adaptive(ball_rule, _check_dimension(d), lam, r, k)


def psi_composed(lam, r, d: int, n_radial: int = DEFAULT_NODES, k: int = 0):
    """Ball function by composing the sphere rule with a radial Gauss rule.

    ``d * int_0^1 phi_lam(rho r) rho^(d-1) drho``.  Slower than :func:`psi`
    and independent of the ball rule, so it serves as a cross-check.
    """
    d = _check_dimension(d)
    rho, w = radial_rule(d, n_radial)
    lam_a, r_a = np.broadcast_arrays(np.asarray(lam, complex), np.asarray(r, float))
    rr = r_a[..., None] * rho
    ll = np.broadcast_to(lam_a[..., None], rr.shape)
    # d/dlam^k of phi_lam(rho r) is phi_deriv at radius rho r
    return _adaptive(sphere_rule, d, ll, rr, k) @ w


def sphere_moment(d: int, j: int) -> float:
    """``E[w1^(2j)]`` for ``w`` uniform on ``S^{d-1}``: ``(2j-1)!! / prod(d+2i)``."""
    num = math.prod(range(1, 2 * j, 2)) if j else 1
    den = math.prod(d + 2 * i for i in range(j))
    return num / den


class Kind(str, enum.Enum):
    SPHERICAL = "spherical"
    BALL = "ball"
    HEAT = "heat"
    LAPLACIAN = "laplacian"


@dataclass(frozen=True)
class MultiplierSpec:
    """A radial multiplier: spherical mean, ball mean, heat operator or Laplacian.

    ``t`` is the radius (means) or time (heat); it is ``None`` for the
    Laplacian.  The Laplacian uses the sign convention ``Delta = -sum d^2``,
    so its symbol is ``lam^2``.
    """

    kind: Kind
    t: Optional[float]
    d: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        _check_dimension(self.d)
        if self.kind is Kind.LAPLACIAN:
            if self.t is not None:
                raise ValueError("the Laplacian takes no radius/time parameter")
        else:
            if self.t is None or not np.isfinite(self.t) or self.t <= 0:
                raise ValueError(f"{self.kind.value} requires t > 0, got {self.t!r}")
            object.__setattr__(self, "t", float(self.t))

    @classmethod
    def spherical(cls, t: float, d: int) -> "MultiplierSpec":
        return cls(Kind.SPHERICAL, t, d)

    @classmethod
    def ball(cls, t: float, d: int) -> "MultiplierSpec":
        return cls(Kind.BALL, t, d)

    @classmethod
    def heat(cls, t: float, d: int) -> "MultiplierSpec":
        return cls(Kind.HEAT, t, d)

    @classmethod
    def laplacian(cls, d: int) -> "MultiplierSpec":
        return cls(Kind.LAPLACIAN, None, d)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "t": self.t, "d": self.d}

    @classmethod
    def from_dict(cls, data: dict) -> "MultiplierSpec":
        return cls(Kind(data["kind"]), data.get("t"), int(data["d"]))

    def __str__(self):
        if self.kind is Kind.LAPLACIAN:
            return f"laplacian(d={self.d})"
        return f"{self.kind.value}(t={self.t:g}, d={self.d})"


def _heat_derivs(t: float, lam, k: int):
    lam = np.asarray(lam, dtype=complex)
    prev = np.zeros_like(lam)
    cur = np.exp(-t * lam * lam)
    for j in range(k):
        prev, cur = cur, -2.0 * t * (lam * cur + j * prev)
    return cur


def symbol_deriv(spec: MultiplierSpec, lam, k: int, max_order: int = MAX_DERIV_ORDER):
    """``k``-th derivative in ``lam`` of the scalar symbol of ``spec``."""
    k = _check_order(k, max_order)
    kind = spec.kind
    if kind is Kind.SPHERICAL:
        return phi_deriv(lam, spec.t, spec.d, k, max_order)
    if kind is Kind.BALL:
        return psi_deriv(lam, spec.t, spec.d, k, max_order)
    if kind is Kind.HEAT:
        out = _heat_derivs(spec.t, lam, k)
        return out[()] if out.ndim == 0 else out
    lam = np.asarray(lam, dtype=complex)
    if k == 0:
        out = lam * lam
    elif k == 1:
        out = 2.0 * lam
    elif k == 2:
        out = np.full_like(lam, 2.0)
    else:
        out = np.zeros_like(lam)
    return out[()] if out.ndim == 0 else out


def symbol_value(spec: MultiplierSpec, lam):
    """Scalar symbol ``m(lam)``: phi_lam(t e1), psi_lam(t e1), exp(-t lam^2) or lam^2."""
    return symbol_deriv(spec, lam, 0)


def threshold(spec: MultiplierSpec, a: float) -> float:
    """The dichotomy threshold ``m(i a)``, real and strictly greater than one."""
    if spec.kind is Kind.LAPLACIAN:
        raise ValueError("the Laplacian has no averaging threshold")
    if not np.isfinite(a) or a <= 0:
        raise ValueError(f"growth parameter a must be > 0, got {a!r}")
    val = complex(symbol_value(spec, 1j * a))
    tau = val.real
    # y -> m(iy) increases: d/dy m(iy) = i m'(iy) must be positive
    slope = (1j * complex(symbol_deriv(spec, 1j * a, 1))).real
    if not (tau > 1.0 and slope > 0.0 and abs(val.imag) <= 1e-12 * tau):
        raise ArithmeticError(
            f"threshold postcondition failed for {spec} at a={a}: "
            f"m(ia)={val}, slope={slope}")
    return tau


# ---------------------------------------------------------------------------
# strip diagnostics


def strip_sup(spec: MultiplierSpec, re_lam, a: float, n_im: int = 201):
    """``max_{|Im lam| <= a} |m(re_lam + i Im lam)|`` for each ``re_lam``."""
    re_lam = np.atleast_1d(np.asarray(re_lam, dtype=float))
    beta = np.linspace(-a, a, n_im)
    vals = np.abs(symbol_value(spec, re_lam[:, None] + 1j * beta[None, :]))
    return vals.max(axis=1)


def strict_max_margin(spec: MultiplierSpec, a: float, re_max: float = 10.0,
                      n_re: int = 101, n_im: int = 99, exclusion: float = 1e-3):
    """Margin ``m(ia) - max |m(lam)|`` over a strip grid outside disks at ``+-ia``.

    Returns ``(delta, argmax)``; a positive ``delta`` is the strict strip
    maximum at the boundary points ``+-ia``.
    """
    tau = threshold(spec, a)
    al = np.linspace(-re_max, re_max, n_re)
    be = np.linspace(-a, a, n_im)
    lam = (al[:, None] + 1j * be[None, :]).ravel()
    keep = (np.abs(lam - 1j * a) > exclusion) & (np.abs(lam + 1j * a) > exclusion)
    lam = lam[keep]
    mag = np.abs(symbol_value(spec, lam))
    i = int(np.argmax(mag))
    return tau - float(mag[i]), complex(lam[i])


def decay_onset(spec: MultiplierSpec, a: float, fraction: float = 0.01,
                n_im: int = 41, step: Optional[float] = None, re_start: float = 50.0):
    """Smallest scanned ``Re lam`` beyond which the strip sup stays below ``fraction * m(ia)``.

    The scan range is doubled until the sup over its last half is below the
    level; the returned bound is the last scanned point above the level plus
    one step.
    """
    tau = threshold(spec, a)
    scale = spec.t
    step = step if step is not None else 0.25 / scale
    hi = re_start / scale
    while True:
        grid = np.arange(0.0, hi + step, step)
        sup = strip_sup(spec, grid, a, n_im)
        above = np.flatnonzero(sup >= fraction * tau)
        tail_ok = above.size == 0 or grid[above[-1]] < hi / 2
        if tail_ok:
            return float(grid[above[-1]] + step) if above.size else 0.0
        if hi > 1e6 / scale:
            raise ArithmeticError("no decay onset found below 1e6/t")
        hi *= 2
