"""Command-line front end.

Exit codes: 0 all checks passed, 1 a checked property failed, 2 bad
configuration or JSON, 3 numerical breakdown.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import boundary as bd
from .extremal import (ExtremalFunction, ExtremalSpec, convergence_table, random_admissible,
                       verify_extremal_curvature)
from .geometry import (NodalCurve, StepCollapseError, TraceConfig, curvature_at_origin, curvature_bound,
                       curves_to_csv, trace_nodal_set)
from .mobius import MobiusMap, equality_theta, transported_bound, transported_curvatures
from .series import OutsideSafeDiskError, PowerSeries
from .spectral import area_ratio, spectral_report, tail_radius

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# SVG


def _fmt(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def render_svg(curves: list[NodalCurve], path=None, size: int = 1000) -> str:
    """Unit disk mapped onto a ``size x size`` viewport, one ``<path>`` per curve."""
    if not curves:
        raise ValueError("nothing to render: empty curve list")
    half = size / 2
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{_fmt(half)}" cy="{_fmt(half)}" r="{_fmt(half)}" fill="none" stroke="#999999" stroke-width="1"/>',
    ]
    for c in curves:
        x = half * (1 + c.vertices.real)
        y = half * (1 - c.vertices.imag)
        d = " ".join(("M" if i == 0 else "L") + f"{_fmt(a)} {_fmt(b)}" for i, (a, b) in enumerate(zip(x, y)))
        lines.append(f'<path d="{d}" fill="none" stroke="#000000" stroke-width="2"/>')
    lines.append("</svg>")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


# ---------------------------------------------------------------------------
# helpers


def _threads() -> int:
    raw = os.environ.get("NODAL_ATLAS_THREADS", "")
    if not raw:
        return min(8, os.cpu_count() or 1)
    try:
        v = int(raw)
    except ValueError:
        raise ConfigError(f"NODAL_ATLAS_THREADS must be an integer, got {raw!r}")
    if v < 1:
        raise ConfigError("NODAL_ATLAS_THREADS must be >= 1")
    return v


def parse_range(text: str) -> list[int]:
    """``"2"`` -> [2], ``"1..3"`` -> [1, 2, 3], ``"1,4"`` -> [1, 4]."""
    out = []
    try:
        for part in str(text).split(","):
            if ".." in part:
                a, b = part.split("..")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise ConfigError(f"bad integer range {text!r}")
    if not out or min(out) < 1:
        raise ConfigError(f"range {text!r} must contain positive integers")
    return out


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: malformed JSON ({e})")
    except OSError as e:
        raise ConfigError(str(e))


def _out(args, name: str) -> Path | None:
    if not args.out_dir:
        return None
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _write_report(args, name: str, report: dict):
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default)
    p = _out(args, name)
    if p is not None:
        p.write_text(text + "\n")
    print(text)


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o).__name__)


def _table(rows):
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    return EXIT_OK if all(ok for _, ok, _ in rows) else EXIT_FAIL


def _series_from_args(args) -> PowerSeries:
    if getattr(args, "series_json", None):
        try:
            return PowerSeries.from_dict(_load_json(args.series_json))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"bad series JSON: {e}")
    if getattr(args, "random_n", None):
        return random_admissible(args.random_n, np.random.default_rng(args.seed), K=args.K).series
    from .extremal import extremal_series

    return extremal_series(ExtremalSpec(args.n, args.phi0_index), args.K)


# ---------------------------------------------------------------------------
# subcommands


def cmd_extremal(args):
    if args.spec:
        d = _load_json(args.spec)
        try:
            args.n, args.phi0_index = int(d["n"]), int(d.get("phi0_index", 0))
            args.K = int(d.get("K", args.K or 64))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"bad extremal spec: {e}")
    try:
        spec = ExtremalSpec(args.n, args.phi0_index)
    except ValueError as e:
        raise ConfigError(str(e))
    rep = verify_extremal_curvature(spec, args.K)
    attained = abs(rep.kappas[rep.branch])
    rows = [("attainment", abs(attained - rep.bound) <= 1e-8, f"|kappa_q|={attained:.12f} bound={rep.bound:.12f}")]
    report = {"spec": spec.to_dict(), "phi0": spec.phi0, **rep.to_dict()}
    if args.emit_svg or args.emit_csv:
        curves = trace_nodal_set(ExtremalFunction(spec), TraceConfig(stop_radius=args.stop_radius))
        through = sum(c.passes_through(0j) for c in curves)
        rows.append(("curves through 0", through == spec.n, f"{through} of {len(curves)}"))
        report["curves"] = len(curves)
        report["curves_through_origin"] = through
        _emit_curves(args, curves)
    _write_report(args, "extremal.json", report)
    return _table(rows)


def _emit_curves(args, curves):
    for attr, writer in (("emit_svg", lambda p: render_svg(curves, p)),
                         ("emit_csv", lambda p: Path(p).write_text(curves_to_csv(curves)))):
        target = getattr(args, attr, None)
        if target:
            p = Path(target)
            if args.out_dir and not p.is_absolute():
                p = Path(args.out_dir) / p
                p.parent.mkdir(parents=True, exist_ok=True)
            writer(p)


def cmd_trace(args):
    f = ExtremalFunction(ExtremalSpec(args.n, args.phi0_index)) if not (args.series_json or args.random_n) \
        else _series_from_args(args)
    cfg = TraceConfig(stop_radius=args.stop_radius, base_step=args.step)
    curves = trace_nodal_set(f, cfg)
    _emit_curves(args, curves)
    report = {
        "curves": [
            {"branch_q": c.branch_q, "closed": c.closed, "vertices": len(c.vertices), "length": c.length,
             "ends": [c.ends[0], c.ends[1]], "max_abs_curvature": float(np.max(np.abs(c.curvatures)))}
            for c in curves
        ]
    }
    _write_report(args, "trace.json", report)
    return EXIT_OK


def _admissible_item(n, rng, K):
    s = random_admissible(n, rng, K=K).series
    return max(abs(curvature_at_origin(s, q)) for q in range(2 * n))


def cmd_verify(args):
    ns = parse_range(args.n)
    rows, report = [], {"theorem": args.theorem, "seed": args.seed}
    if args.theorem == 1:
        pool = ThreadPoolExecutor(_threads())
        for n in ns:
            rngs = np.random.default_rng([args.seed, n]).spawn(args.samples)
            vals = list(pool.map(lambda r: _admissible_item(n, r, 64), rngs))
            bound = curvature_bound(n)
            worst = float(np.max(vals))
            rows.append((f"bound n={n}", worst <= bound + 1e-6, f"max|kappa|={worst:.9f} bound={bound:.9f}"))
            report[f"n={n}"] = {"samples": args.samples, "max_abs_kappa": worst, "bound": bound}
        pool.shutdown()
    elif args.theorem == 2:
        for n in ns:
            for k in range(n):
                rep = verify_extremal_curvature(ExtremalSpec(n, k))
                a = abs(rep.kappas[rep.branch])
                rows.append((f"attain n={n} k={k}", abs(a - rep.bound) <= 1e-8, f"{a:.12f} vs {rep.bound:.12f}"))
                report[f"n={n},k={k}"] = rep.to_dict()
    elif args.theorem == 6:
        from .extremal import extremal_series

        rng = np.random.default_rng(args.seed)
        for n in ns:
            w = extremal_series(ExtremalSpec(n), 128)
            for _ in range(args.samples):
                p = complex(*(rng.uniform(-0.35, 0.35, 2)))
                best = max(
                    float(np.max(np.abs(transported_curvatures(w, MobiusMap(p, equality_theta(n, p, q, j))))))
                    for q in range(2 * n) for j in (0, 1)
                )
                b = transported_bound(n, p)
                rows.append((f"transport n={n} p={p:.4f}", abs(best - b) <= 1e-5, f"{best:.9f} vs {b:.9f}"))
    else:
        raise ConfigError(f"no verification suite for theorem {args.theorem}")
    _write_report(args, f"verify_theorem{args.theorem}.json", report)
    return _table(rows)


def cmd_spectrum(args):
    s = _series_from_args(args)
    rep = spectral_report(s, N=args.N)
    rows = [("growth bound", rep.growth.passed, f"worst ratio {rep.growth.worst_ratio:.6g}"),
            ("beta monotone", rep.beta_monotone, "")]
    if args.N:
        from .spectral import frequency

        b = frequency(s, rep.tail_r) if rep.tail_r > 0 else float("nan")
        rows.append(("beta(r(N)) <= 2", b <= 2 + 1e-9, f"r(N)={rep.tail_r:.6g} beta={b:.9f}"))
    _write_report(args, "spectrum.json", rep.to_dict())
    return _table(rows)


def cmd_area(args):
    s = _series_from_args(args)
    r0 = args.r0 if args.r0 else tail_radius(s, args.N or 2)
    coarse = area_ratio(s, r0, args.resolution // 2)
    fine = area_ratio(s, r0, args.resolution)
    drift = abs(fine.ratio / coarse.ratio - 1)
    rows = [("both areas positive", fine.positive > 0 and fine.negative > 0, f"{fine.positive:.6g} / {fine.negative:.6g}"),
            ("ratio stable", drift <= 0.02, f"relative drift {drift:.3g}")]
    _write_report(args, "area.json", {"coarse": coarse.to_dict(), "fine": fine.to_dict(), "drift": drift})
    return _table(rows)


def cmd_mobius(args):
    from .extremal import extremal_series

    try:
        p = complex(*[float(t) for t in args.p.split(",")])
    except (TypeError, ValueError):
        raise ConfigError(f"--p expects 're,im', got {args.p!r}")
    n = args.n
    theta = equality_theta(n, p, args.q, args.j) if args.theta is None else args.theta
    w = extremal_series(ExtremalSpec(n), args.K)
    kap = transported_curvatures(w, MobiusMap(p, theta), args.K)
    b = transported_bound(n, p)
    best = float(np.max(np.abs(kap)))
    _write_report(args, "mobius.json", {"n": n, "p": p, "theta": theta, "kappas": kap, "bound": b})
    return _table([("transported bound not exceeded", best <= b + 1e-6, f"{best:.9f} <= {b:.9f}"),
                   ("attained", abs(best - b) <= 1e-5, f"gap {b - best:.3g}")])


def cmd_sharpness(args):
    divisors = parse_range(args.divisors)
    rows = convergence_table(args.n, args.eps0, divisors, args.lam, args.K)
    bound = curvature_bound(args.n)
    p = _out(args, "sharpness.csv")
    lines = ["eps,lambda,max_abs_kappa,gap"] + [f"{e:.12g},{l:.12g},{k:.12g},{g:.12g}" for e, l, k, g in rows]
    if p is not None:
        p.write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    gaps = [g for *_, g in rows]
    return _table([
        ("gaps positive", all(g > 0 for g in gaps), ""),
        ("gaps decreasing", all(b < a for a, b in zip(gaps, gaps[1:])), ""),
        ("final gap < 5%", gaps[-1] / bound < 0.05, f"{gaps[-1] / bound:.4%}"),
    ])


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nodal-atlas", description=__doc__.splitlines()[0], allow_abbrev=False)
    ap.add_argument("--out-dir", default=None, help="directory for report files")
    sub = ap.add_subparsers(dest="command", required=True)

    def source(p, default_k=64):
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--phi0-index", type=int, default=0)
        p.add_argument("--K", type=int, default=default_k)
        p.add_argument("--series-json", default=None, help="PowerSeries JSON file")
        p.add_argument("--random-n", type=int, default=None, help="random admissible function of this order")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("extremal", help="build and verify an extremal function")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--phi0-index", type=int, default=0)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--spec", default=None, help='JSON file {"n":..,"phi0_index":..,"K":..}')
    p.add_argument("--stop-radius", type=float, default=0.98)
    p.add_argument("--emit-svg", default=None)
    p.add_argument("--emit-csv", default=None)
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("trace", help="trace a nodal set")
    source(p)
    p.add_argument("--stop-radius", type=float, default=0.98)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--emit-svg", default=None)
    p.add_argument("--emit-csv", default=None)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--theorem", type=int, default=1, choices=[1, 2, 6])
    p.add_argument("--n", default="1..3")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="growth, frequency and doubling report")
    source(p, 200)
    p.add_argument("--N", type=int, default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("area", help="positive/negative area report")
    source(p)
    p.add_argument("--r0", type=float, default=None)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--resolution", type=int, default=512)
    p.set_defaults(func=cmd_area)

    p = sub.add_parser("mobius", help="transported curvature bound")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--p", default="0.5,0")
    p.add_argument("--q", type=int, default=0)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--K", type=int, default=128)
    p.set_defaults(func=cmd_mobius)

    p = sub.add_parser("sharpness", help="convergence table of the approximating sequence")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--eps0", type=float, default=0.25)
    p.add_argument("--divisors", default="8,16,32")
    p.add_argument("--lam", type=float, default=1e-4)
    p.add_argument("--K", type=int, default=64)
    p.set_defaults(func=cmd_sharpness)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (StepCollapseError, bd.SingularSystemError, OutsideSafeDiskError, FloatingPointError,
            np.linalg.LinAlgError) as e:
        where = getattr(e, "location", None)
        print(f"numerical breakdown in {type(e).__module__}: {e}" + (f" at {where}" if where is not None else ""),
              file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
