"""``strichartz`` command-line driver.

Every subcommand writes CSV or JSON (``--format``) to ``--out`` or stdout.
Floats are rendered with 17 significant digits and the full configuration is
embedded in each file, so identical flags give byte-identical output.

Exit status: 0 when all checks of the subcommand pass, 1 when a numerical
check fails, 2 on invalid input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from . import grid as G
from . import transform as T
from .dichotomy import (CLASSIFY_RTOL, CounterexampleError, ScanConfig, build_counterexample, canonical_sequence,
                        classify, classify_real_symbol, level_set, one_radius_demo)
from .modes import MODE_EPS, PlaneWaveExpansion, SequenceSpec, make_sequence, recurrence_scale, verify_recurrence
from .special_fn import Kind, MultiplierSpec, symbol_deriv, threshold


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# deterministic output


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x + 0.0, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and 17-significant-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps({"re": obj.real, "im": obj.imag}, indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _config_line(config: dict) -> str:
    return "# " + ",".join(f"{k}={_cfg_value(config[k])}" for k in sorted(config))


def _cfg_value(v) -> str:
    if isinstance(v, float):
        return _num(v)
    if isinstance(v, complex):
        return f"{_num(v.real)}{'+' if v.imag >= 0 else '-'}{_num(abs(v.imag))}j"
    if isinstance(v, (list, tuple)):
        return ";".join(_cfg_value(x) for x in v)
    return str(v).replace(",", ";")


def table_csv(config: dict, header: Sequence[str], rows) -> str:
    lines = [_config_line(config), ",".join(header)]
    for row in rows:
        lines.append(",".join(_num(v) if not isinstance(v, str) else v for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument helpers


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _positive(text: str) -> float:
    x = float(text)
    if not (math.isfinite(x) and x > 0):
        raise argparse.ArgumentTypeError(f"must be a positive real: {text!r}")
    return x


def _nonneg(text: str) -> float:
    x = float(text)
    if not (math.isfinite(x) and x >= 0):
        raise argparse.ArgumentTypeError(f"must be a nonnegative real: {text!r}")
    return x


def _wave(text: str):
    """``z1,z2,...:coeff`` -> (zeta, coeff)."""
    try:
        z, _, c = text.partition(":")
        return tuple(float(v) for v in z.split(",")), _complex(c) if c else 1.0
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'z1,...,zd:coeff', got {text!r}")


def _spec(ns) -> MultiplierSpec:
    kind = Kind(ns.kind)
    if kind is Kind.LAPLACIAN:
        return MultiplierSpec.laplacian(ns.d)
    return MultiplierSpec(kind, ns.t, ns.d)


def _grid(ns) -> G.RadialGrid:
    return G.RadialGrid(ns.h, ns.rmax, ns.d)


def _base_config(ns) -> dict:
    cfg = {k: v for k, v in vars(ns).items() if k not in ("func", "out")}
    cfg["version"] = __version__
    return {k: v for k, v in cfg.items() if v is not None}


def _json_safe(cfg: dict) -> dict:
    out = {}
    for k, v in cfg.items():
        if isinstance(v, complex):
            v = {"re": v.real, "im": v.imag}
        elif isinstance(v, tuple):
            v = list(v)
        out[k] = v
    return out


# ---------------------------------------------------------------------------
# subcommands; each returns (text, ok)


def cmd_symbol(ns):
    spec = _spec(ns)
    im_max = ns.im_max if ns.im_max is not None else (ns.a or 0.0)
    re = np.linspace(0.0, ns.re_max, ns.n_re)
    im = np.linspace(-im_max, im_max, ns.n_im) if ns.n_im > 1 else np.zeros(1)
    lam = (re[None, :] + 1j * im[:, None]).ravel()
    vals = np.atleast_1d(symbol_deriv(spec, lam, ns.k))
    order = np.lexsort((lam.imag, lam.real))
    rows = [(l.real, l.imag, v.real, v.imag) for l, v in zip(lam[order], vals[order])]
    cfg = _base_config(ns)
    if ns.format == "csv":
        return table_csv(cfg, ("lambda_re", "lambda_im", "re", "im"), rows), True
    return dumps({"config": _json_safe(cfg), "values": [
        {"lambda_re": r[0], "lambda_im": r[1], "re": r[2], "im": r[3]} for r in rows]}), True


def cmd_threshold(ns):
    spec = _spec(ns)
    tau = threshold(spec, ns.a)
    cfg = _base_config(ns)
    if ns.format == "csv":
        return table_csv(cfg, ("a", "tau"), [(ns.a, tau)]), True
    return dumps({"config": _json_safe(cfg), "spec": spec.to_dict(), "a": ns.a, "tau": tau}), True


def _scan(ns) -> ScanConfig:
    return ScanConfig(ns.beta_steps, ns.alpha_max, ns.alpha_step)


def cmd_classify(ns):
    spec = _spec(ns)
    rep = classify(spec, ns.a, ns.A, with_witness=not ns.no_witness, grid=_grid(ns), scan=_scan(ns),
                   rtol=ns.rtol)
    out = rep.to_dict()
    out["config"] = _json_safe(_base_config(ns))
    ok = True
    if rep.witness is not None:
        ok = rep.witness.recurrence_exact and rep.witness.growth_bounded
    if ns.format == "csv":
        cfg = _base_config(ns)
        return table_csv(cfg, ("a", "A_re", "A_im", "tau", "verdict"),
                         [(ns.a, ns.A.real, ns.A.imag, rep.tau, rep.verdict.value)]), ok
    return dumps(out), ok


def cmd_levelset(ns):
    spec = _spec(ns)
    L = level_set(spec, ns.a, ns.target, _scan(ns))
    cfg = _base_config(ns)
    rows = [(p.real, p.imag, s.real, s.imag, float(np.angle(s))) for p, s in zip(L.points, L.symbols)]
    ok = L.max_level_error <= 1e-10
    if ns.format == "csv":
        return table_csv(cfg, ("lambda_re", "lambda_im", "symbol_re", "symbol_im", "phase"), rows), ok
    return dumps({"config": _json_safe(cfg), "target": L.target, "scan": L.scan,
                  "max_level_error": L.max_level_error, "points": L.to_records()}), ok


def _sequence_for(ns, spec) -> SequenceSpec:
    if ns.sequence_file:
        with open(ns.sequence_file) as fh:
            return SequenceSpec.from_dict(json.load(fh))
    tau = threshold(spec, ns.a)
    if abs(abs(ns.A) - tau) <= CLASSIFY_RTOL * tau:
        return canonical_sequence(spec, ns.a, ns.A)
    if abs(ns.A) < tau:
        return build_counterexample(spec, ns.a, ns.A, _scan(ns), _grid(ns)).sequence
    raise UsageError(f"|A| = {abs(ns.A)} exceeds tau = {tau}: only the zero sequence qualifies")


def cmd_sequence(ns):
    spec = _spec(ns)
    seq = _sequence_for(ns, spec)
    ks = range(ns.k_min, ns.k_max + 1)
    defect = verify_recurrence(spec, seq, ns.A, ks)
    scale = recurrence_scale(spec, seq, ns.A)
    ok = defect <= MODE_EPS * scale
    grid = _grid(ns)
    samples = {k: G.sample_expansion(make_sequence(seq, k), grid) for k in ks}
    cfg = _base_config(ns)
    cfg["recurrence_defect"] = defect
    if ns.format == "csv":
        rows = [(k, r, v.real, v.imag) for k in ks for r, v in zip(grid.radii, samples[k].values)]
        return table_csv(cfg, ("k", "r", "re", "im"), rows), ok
    return dumps({"config": _json_safe(cfg), "sequence": seq.to_dict(), "recurrence_defect": defect,
                  "recurrence_exact": ok,
                  "growth_constants": {str(k): G.growth_constant(samples[k], ns.a) for k in ks}}), ok


def cmd_counterexample(ns):
    spec = _spec(ns)
    try:
        w = build_counterexample(spec, ns.a, ns.A, _scan(ns), _grid(ns))
    except CounterexampleError as exc:
        return dumps({"config": _json_safe(_base_config(ns)), "error": str(exc),
                      "diagnostics": exc.diagnostics}), False
    ok = w.recurrence_exact and w.growth_bounded and w.residual_min >= ns.min_residual
    if ns.format == "csv":
        rows = [(m.lam.real, m.lam.imag, th, m.coeff.real, m.coeff.imag)
                for m, th in zip(w.sequence.base.modes, w.sequence.phases)]
        cfg = _base_config(ns)
        cfg.update(recurrence_defect=w.recurrence_defect, residual_min=w.residual_min)
        return table_csv(cfg, ("lambda_re", "lambda_im", "theta", "coeff_re", "coeff_im"), rows), ok
    out = w.to_dict()
    out["config"] = _json_safe(_base_config(ns))
    return dumps(out), ok


def cmd_decompose(ns):
    spec = _spec(ns)
    if not ns.wave:
        raise UsageError("at least one --wave is required")
    f0 = PlaneWaveExpansion.from_terms(ns.wave)
    if f0.d is not None and f0.d != ns.d:
        raise UsageError(f"frequency vectors have dimension {f0.d}, expected {ns.d}")
    rep = classify_real_symbol(spec, ns.A, f0)
    out = rep.to_dict()
    out["config"] = _json_safe(_base_config(ns))
    out["components"] = {k: [{"zeta": list(z), "coeff": c} for z, c in v.modes]
                         for k, v in rep.components.items()}
    ok = rep.consistent and rep.reconstruction_defect <= MODE_EPS and all(e <= MODE_EPS for e in rep.eigen_defects)
    if ns.format == "csv":
        rows = [(k, *z, c.real, c.imag) for k, v in sorted(rep.components.items()) for z, c in v.modes]
        header = ("component",) + tuple(f"zeta{i}" for i in range(ns.d)) + ("coeff_re", "coeff_im")
        return table_csv(_base_config(ns), header, rows), ok
    return dumps(out), ok


def cmd_one_radius(ns):
    rep = one_radius_demo(ns.t, ns.a, ns.d, _grid(ns), ns.eps)
    ok = (rep.functional_defect <= 1e-8 and abs(rep.perturbation_ratio - 1) <= 0.1
          and all(c["rel_error"] <= 1e-12 and c["forces_zero"] for c in rep.coefficient_checks))
    out = rep.to_dict()
    out["config"] = _json_safe(_base_config(ns))
    if ns.format == "csv":
        rows = [(c["N"], c["computed"]["re"], c["computed"]["im"], c["formula"]["re"], c["formula"]["im"],
                 c["rel_error"]) for c in rep.coefficient_checks]
        cfg = _base_config(ns)
        cfg.update(functional_defect=rep.functional_defect, perturbation_ratio=rep.perturbation_ratio)
        return table_csv(cfg, ("N", "computed_re", "computed_im", "formula_re", "formula_im", "rel_error"), rows), ok
    return dumps(out), ok


def cmd_transform(ns):
    grid = _grid(ns)
    f = G.SampledRadialFunction.from_callable(lambda r: np.exp(-r * r / ns.width), grid)
    lam = T.default_lambdas(ns.lam_max, ns.n_lam)
    Hf = T.spherical_fourier(f, lam)
    back = T.inverse_spherical_fourier(Hf, grid, decay_tol=ns.decay_tol)
    err = float(np.max(np.abs(back.values - f.values)) / np.max(np.abs(f.values)))
    c = T.calibration_constant(ns.d, ns.lam_max, ns.n_lam)
    ok = err <= ns.tol
    cfg = _base_config(ns)
    cfg.update(roundtrip_error=err, c_inv=c)
    if ns.format == "csv":
        return Hf.to_csv(cfg), ok
    return dumps({"config": _json_safe(cfg), "roundtrip_error": err, "c_inv": c,
                  "c_inv_analytic": T.analytic_inverse_constant(ns.d),
                  "truncation": T.truncation_estimate(Hf)}), ok


def cmd_props(ns):
    from .props import run_props
    results = run_props(ns.select)
    ok = all(r.passed for r in results) and bool(results)
    if ns.format == "csv":
        rows = [(r.name.replace(",", ";"), "PASS" if r.passed else "FAIL", r.value, r.bound) for r in results]
        return table_csv(_base_config(ns), ("invariant", "status", "value", "bound"), rows), ok
    return dumps({"config": _json_safe(_base_config(ns)), "passed": ok, "results": [
        {"invariant": r.name, "passed": r.passed, "value": r.value, "bound": r.bound} for r in results]}), ok


# ---------------------------------------------------------------------------
# parser


def _add_spec(p, kinds=("spherical", "ball", "heat", "laplacian"), need_a=True):
    p.add_argument("--kind", choices=kinds, required=True)
    p.add_argument("--t", type=_positive, default=1.0, help="radius or time (default 1)")
    p.add_argument("--d", type=int, default=3, help="dimension (default 3)")
    if need_a:
        p.add_argument("--a", type=_positive, required=True, help="growth type / strip half-width")


def _add_grid(p):
    p.add_argument("--h", type=_positive, default=G.DEFAULT_H)
    p.add_argument("--rmax", type=_positive, default=G.DEFAULT_RMAX)


def _add_scan(p):
    p.add_argument("--beta-steps", type=int, default=64)
    p.add_argument("--alpha-max", type=_positive, default=50.0, help="scan range in units of 1/t")
    p.add_argument("--alpha-step", type=_positive, default=0.01, help="scan step in units of 1/t")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="strichartz", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def command(name: str, fmt: str = "json", **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--format", choices=("csv", "json"), default=fmt)
        p.add_argument("--out", help="output path (default stdout)")
        return p

    averaging = ("spherical", "ball", "heat")

    p = command("symbol", "csv", help="tabulate a symbol or its derivative over the strip")
    _add_spec(p, need_a=False)
    p.add_argument("--a", type=_nonneg, default=None)
    p.add_argument("--k", type=int, default=0, help="derivative order")
    p.add_argument("--re-max", type=_positive, default=10.0)
    p.add_argument("--n-re", type=int, default=101)
    p.add_argument("--im-max", type=_nonneg, default=None, help="default: a")
    p.add_argument("--n-im", type=int, default=1)
    p.set_defaults(func=cmd_symbol)

    p = command("threshold", help="tau = m(ia)")
    _add_spec(p, averaging)
    p.set_defaults(func=cmd_threshold)

    p = command("classify", help="verdict for |A| against tau")
    _add_spec(p, averaging)
    p.add_argument("--A", type=_complex, required=True)
    p.add_argument("--no-witness", action="store_true")
    p.add_argument("--rtol", type=_positive, default=CLASSIFY_RTOL, help="band for |A| = tau")
    _add_grid(p)
    _add_scan(p)
    p.set_defaults(func=cmd_classify)

    p = command("levelset", "csv", help="points with |m(lam)| = target")
    _add_spec(p, averaging)
    p.add_argument("--target", type=_nonneg, required=True)
    _add_scan(p)
    p.set_defaults(func=cmd_levelset)

    p = command("sequence", "csv", help="samples of f_k and recurrence defects")
    _add_spec(p, averaging)
    p.add_argument("--A", type=_complex, required=True)
    p.add_argument("--k-min", type=int, default=-2)
    p.add_argument("--k-max", type=int, default=2)
    p.add_argument("--sequence-file", help="JSON sequence (as emitted by counterexample)")
    _add_grid(p)
    _add_scan(p)
    p.set_defaults(func=cmd_sequence)

    p = command("counterexample", help="two-mode non-eigen witness")
    _add_spec(p, averaging)
    p.add_argument("--A", type=_complex, required=True)
    p.add_argument("--min-residual", type=_nonneg, default=0.05)
    _add_grid(p)
    _add_scan(p)
    p.set_defaults(func=cmd_counterexample)

    p = command("decompose", help="split plane waves into +|A| and -|A| parts")
    _add_spec(p, need_a=False)
    p.add_argument("--A", type=_complex, required=True)
    p.add_argument("--wave", type=_wave, action="append", help="'z1,...,zd:coeff', repeatable")
    p.set_defaults(func=cmd_decompose)

    p = command("one-radius", help="one-radius identity and its rigidity")
    p.add_argument("--t", type=_positive, default=1.0)
    p.add_argument("--a", type=_nonneg, default=1.0)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--eps", type=_positive, default=1e-2)
    _add_grid(p)
    p.set_defaults(func=cmd_one_radius)

    p = command("transform", help="Gaussian roundtrip of the transform pair")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--width", type=_positive, default=4.0, help="f = exp(-r^2 / width)")
    p.add_argument("--h", type=_positive, default=0.01)
    p.add_argument("--rmax", type=_positive, default=G.DEFAULT_RMAX)
    p.add_argument("--lam-max", type=_positive, default=T.LAMBDA_MAX)
    p.add_argument("--n-lam", type=int, default=T.N_LAMBDA)
    p.add_argument("--tol", type=_positive, default=1e-6)
    p.add_argument("--decay-tol", type=_positive, default=T.DECAY_TOL)
    p.set_defaults(func=cmd_transform)

    p = command("props", help="run the invariant suite")
    p.add_argument("--select", help="only invariants whose name contains this text")
    p.set_defaults(func=cmd_props)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    if getattr(ns, "d", 1) < 1:
        ap.error("--d must be at least 1")
    try:
        text, ok = ns.func(ns)
    except (UsageError, ValueError) as exc:
        print(f"strichartz {ns.command}: error: {exc}", file=sys.stderr)
        return 2
    if ns.out:
        with open(ns.out, "w", newline="\n") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if not ok:
        print(f"strichartz {ns.command}: check failed", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
