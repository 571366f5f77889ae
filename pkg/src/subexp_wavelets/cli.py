"""Command-line front end: build systems, rerun checks, drive experiments.

Commands: build, verify, project, expand, decay, parseval, report.
Exit codes: 0 ok, 1 check failure, 2 config error, 3 I/O or corruption.

Reports are deterministic JSON (sorted keys, round-trip-safe floats);
timestamps live in a separate "metadata" field so byte comparison of the
"report" section is meaningful across runs.  A JSON config file can preseed
any flag; explicit flags win.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys

import numpy as np
from scipy.interpolate import CubicSpline, make_interp_spline

from . import expansion, metrics, numerics, projection, testfuncs
from .bump import BumpError
from .construction import (ConstructionError, WaveletSystem,
                           build_wavelet_system, decay_profile, scaling_modulus)
from .numerics import Grid1D, SampledFunction

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3

_NOISE_FLOOR = 1e-9  # quadrature resolution for monotone-trend flags


class ConfigError(ValueError):
    pass


class CorruptSystemError(ValueError):
    pass


# ---------------------------------------------------------------------------
# plumbing
# ---------------------------------------------------------------------------

def _metadata() -> dict:
    raw = os.environ.get("SUBEXP_WAVELETS_THREADS")
    try:
        cap = int(raw) if raw else None
    except ValueError:
        cap = None
    return {
        "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "thread_cap": cap,
    }


def _emit(report: dict, path: str | None) -> None:
    doc = json.dumps({"report": report, "metadata": _metadata()},
                     sort_keys=True, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(doc + "\n")
    else:
        print(doc)


def _load_system(path: str) -> WaveletSystem:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptSystemError(f"cannot read system file: {exc}") from exc
    try:
        return WaveletSystem.from_json_dict(doc)
    except (ConstructionError, numerics.NumericsError, KeyError, TypeError,
            ValueError) as exc:
        raise CorruptSystemError(f"corrupt system file: {exc}") from exc


def _apply_config(args: argparse.Namespace, parser_keys: set[str]) -> None:
    """Fill unset (None) options from the JSON config; unknown keys rejected."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    for key, value in cfg.items():
        if key not in parser_keys:
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _samples_csv(path: str, f: SampledFunction) -> None:
    import csv

    (grid,) = f.grids
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "re", "im"])
        for x, v in zip(grid.points(), f.values):
            writer.writerow([repr(float(x)), repr(float(v.real)),
                             repr(float(v.imag))])


def _expansion_grid() -> Grid1D:
    # spacing 1/128: alias frequency 128*pi clears the widest atom band
    # (scale 6: 2^6 * 8pi/3 ~ 536) plus the test-function bandwidth
    return Grid1D(origin=-80.0, spacing=1.0 / 128, count=20481)


def _parse_window(text: str) -> expansion.IndexWindow:
    try:
        m, n = (int(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad window {text!r}, expected M,N") from exc
    return expansion.IndexWindow(M=m, N=n, d=1)


def _parse_levels(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(p) for p in text.split(",")]


# ---------------------------------------------------------------------------
# file-based verification suites (operate on the stored arrays)
# ---------------------------------------------------------------------------

def _suite_support(ws: WaveletSystem) -> dict:
    xi = ws.psi_hat.grid.points()
    mask = ws.psi_hat.support_mask()
    stored_outside = float(np.max(np.abs(ws.psi_hat.values[~mask]), initial=0.0))
    probes_in = np.linspace(-(2 * np.pi / 3 - 1e-9), 2 * np.pi / 3 - 1e-9, 100)
    probes_out = np.concatenate([
        np.linspace(8 * np.pi / 3 + 1e-9, 3 * np.pi + 4, 50),
        -np.linspace(8 * np.pi / 3 + 1e-9, 3 * np.pi + 4, 50)])
    bell_vals = np.abs(np.concatenate([ws.bell(probes_in), ws.bell(probes_out)]))
    edge = np.abs(np.array([ws.bell(np.pi), ws.bell(2 * np.pi)]) - np.sqrt(0.5))
    ok = stored_outside == 0.0 and np.all(bell_vals == 0.0) and np.all(edge < 1e-9)
    return {"pass": bool(ok), "stored_max_outside_support": stored_outside,
            "bell_max_off_support": float(bell_vals.max()),
            "bell_edge_deviation": float(edge.max())}


def _suite_orthonormality(ws: WaveletSystem) -> dict:
    """Lattice sums recomputed from the *stored* spectra by interpolation.

    Cubic interpolation of the stored grids limits this file-based rerun to
    ~1e-8; the build-time certificate uses the analytic bell at 1e-10.
    """
    tol = 1e-8
    xi = np.linspace(-np.pi, np.pi, 512)
    worst = {}
    for name, spec in (("psi", ws.psi_hat), ("phi", ws.phi_hat)):
        g = spec.grid.points()
        spline = CubicSpline(g, np.abs(spec.values) ** 2)
        total = np.zeros_like(xi)
        for k in range(-2, 3):
            shifted = xi + 2 * np.pi * k
            inside = (shifted >= g[0]) & (shifted <= g[-1])
            vals = np.zeros_like(xi)
            vals[inside] = spline(shifted[inside])
            total += vals
        worst[name] = float(np.max(np.abs(total - 1.0)))
    ok = max(worst.values()) < tol
    return {"pass": bool(ok), "max_deviation": worst, "tolerance": tol,
            "probes": 512}


def _suite_moments(ws: WaveletSystem) -> dict:
    """Window-limited moment check from the stored physical samples.

    Integrating x^k psi over the stored window leaves an oscillatory tail of
    about envelope(40)/frequency ~ 2e-6 scaled by 40^k, so only k = 0, 1 are
    meaningful here and the tolerances reflect the truncation, not the
    build-time long-range certificate (which covers the tight tolerances).
    The spectral zero check runs on the stored array and is what a corrupted
    file actually trips.
    """
    (grid,) = ws.psi_samples.grids
    x = grid.points()
    w = grid.trapezoid_weights()
    moms = [abs(complex(np.sum(ws.psi_samples.values * w * x ** k)))
            for k in range(2)]
    tols = [1e-5, 1e-3]
    near = np.abs(ws.psi_hat.grid.points()) < 0.3
    spectral = float(np.max(np.abs(ws.psi_hat.values[near]), initial=0.0))
    ok = all(m < t for m, t in zip(moms, tols)) and spectral == 0.0
    return {"pass": bool(ok), "moments": moms, "tolerances": tols,
            "spectral_max_near_zero": spectral}


def _suite_two_scale(ws: WaveletSystem) -> dict:
    """Cross-scale Gram from a quintic spline of the stored samples (tol 1e-5)."""
    (grid,) = ws.psi_samples.grids
    x = grid.points()
    spline = make_interp_spline(x, ws.psi_samples.values.real, k=5)

    def atom(m, n, pts):
        arg = np.ldexp(pts, m) - n
        out = np.zeros_like(pts)
        inside = (arg >= x[0]) & (arg <= x[-1])
        out[inside] = spline(arg[inside])
        return 2.0 ** (m / 2.0) * out

    w = grid.trapezoid_weights()
    atoms = np.array([atom(m, n, x) for m in (-1, 0, 1) for n in range(-3, 4)])
    gram = (atoms * w) @ atoms.T
    dev = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
    return {"pass": dev < 1e-5, "max_deviation": dev, "tolerance": 1e-5,
            "atoms": int(gram.shape[0])}


def _suite_kernel_decay(ws: WaveletSystem) -> dict:
    pk = projection.build_kernel(ws, level=0, dimension=1)
    fit = projection.kernel_decay_certificate(pk)
    ok = fit.rate_c > 0 and fit.r_squared > 0.95
    return {"pass": bool(ok), "fit": fit.to_json_dict(),
            "truncation_radius": pk.truncation_radius,
            "tail_bound": pk.tail_bound}


def _suite_polynomial(ws: WaveletSystem) -> dict:
    pk = projection.build_kernel(ws, level=0, dimension=1)
    rep = projection.polynomial_reproduction(pk, max_degree=1)
    devs = rep["max_deviation_per_degree"]
    ok = devs[0] < 1e-8 and devs[1] < 1e-8
    return {"pass": bool(ok), "max_deviation_per_degree":
            {str(k): v for k, v in devs.items()}, "tolerance": 1e-8}


_SUITES = {
    "support": _suite_support,
    "orthonormality": _suite_orthonormality,
    "moments": _suite_moments,
    "two-scale": _suite_two_scale,
    "kernel-decay": _suite_kernel_decay,
    "polynomial": _suite_polynomial,
}


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_build(args) -> int:
    try:
        ws = build_wavelet_system(a=args.a, rho2=args.rho2,
                                  spectral_points=args.spectral_points,
                                  window=args.window)
    except (BumpError, ConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    out = args.out or "system.json"
    with open(out, "w") as fh:
        json.dump(ws.to_json_dict(), fh, sort_keys=True)
        fh.write("\n")
    stem = out[:-5] if out.endswith(".json") else out
    _samples_csv(stem + ".psi.csv", ws.psi_samples)
    _samples_csv(stem + ".phi.csv", ws.phi_samples)
    summary = {
        "parameters": {"a": ws.a, "rho2": ws.rho2},
        "certificates": {name: bool(cert["pass"])
                         for name, cert in ws.certificates.items()},
        "certificate_digest": ws.certificate_digest(),
        "artifacts": [out, stem + ".psi.csv", stem + ".phi.csv"],
    }
    _emit(summary, stem + ".certificates.json")
    all_pass = all(cert["pass"] for cert in ws.certificates.values())
    print(f"built system -> {out} "
          f"({'all certificates pass' if all_pass else 'CERTIFICATE FAILURE'})")
    return EXIT_OK if all_pass else EXIT_CHECK_FAILURE


def cmd_verify(args) -> int:
    ws = _load_system(args.system)
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in _SUITES:
            print(f"error: unknown suite {name!r}", file=sys.stderr)
            return EXIT_CONFIG_ERROR
    results = {name: _SUITES[name](ws) for name in names}
    report = {"system": args.system, "suites": results,
              "certificate_digest": ws.certificate_digest()}
    _emit(report, args.report)
    ok = all(r["pass"] for r in results.values())
    for name in names:
        print(f"{name}: {'pass' if results[name]['pass'] else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILURE


def cmd_project(args) -> int:
    ws = _load_system(args.system)
    fn = testfuncs.parse_spec(args.f)
    grid = Grid1D.from_interval(-args.window, args.window,
                                2 * int(args.window * 64) + 1)
    f = testfuncs.sample(fn, grid)
    levels = _parse_levels(args.levels)
    params = metrics.SeminormParams(rho1=0.0, rho2=ws.rho2, h=args.h,
                                    c=args.c, max_beta=args.max_beta)
    rows = projection.mra_convergence_experiment(ws, f, levels, params)
    if args.out:
        projection.convergence_csv(rows, args.out)
    errs = [r["sup_error"] for r in rows]
    monotone = all(errs[i + 1] <= max(errs[i], _NOISE_FLOOR)
                   for i in range(len(errs) - 1))
    sem = [r["seminorm"] for r in rows]
    bounded = max(sem) <= 3.0 * sem[0] if sem and sem[0] > 0 else True
    report = {"function": fn.description, "rows": rows,
              "monotone_trend": bool(monotone),
              "seminorms_bounded_3x": bool(bounded),
              "certificate_digest": ws.certificate_digest()}
    _emit(report, args.report)
    print(f"monotone-trend: {monotone}; seminorms bounded: {bounded}")
    return EXIT_OK if (monotone and bounded) else EXIT_CHECK_FAILURE


def cmd_expand(args) -> int:
    ws = _load_system(args.system)
    fn = testfuncs.parse_spec(args.f)
    window = _parse_window(args.window)
    f = testfuncs.sample(fn, _expansion_grid())
    coeffs = expansion.analyze(ws, f, window, source_descriptor=fn.description)
    if args.out:
        expansion.coefficients_to_csv(coeffs, args.out)
        with open(args.out + ".header.json", "w") as fh:
            fh.write(expansion.coefficients_header(coeffs, ws) + "\n")
    report = {"function": fn.description,
              "window": {"M": window.M, "N": window.N},
              "sup_coefficient": coeffs.sup_magnitude(),
              "coefficient_energy": coeffs.energy(),
              "certificate_digest": ws.certificate_digest()}
    ok = True
    if args.parseval:
        check = expansion.parseval_check(ws, f, f, window)
        report["parseval"] = {"lhs": check["lhs"].real, "rhs": check["rhs"].real,
                              "gap": check["gap"]}
        ok = check["gap"] < 1e-5
        print(f"parseval gap: {check['gap']:.3e}")
    _emit(report, args.report)
    return EXIT_OK if ok else EXIT_CHECK_FAILURE


def cmd_decay(args) -> int:
    ws = _load_system(args.system)
    lo, hi = (testfuncs.parse_scalar(p) for p in args.range.split(","))
    if args.target == "psi":
        table = decay_profile(ws, hi, int((hi - 0.0) * 32) + 1)
    else:
        grid, vals = ws.dense_table("phi")
        x = grid.points()
        sel = (x >= 0.0) & (x <= hi)
        table = np.column_stack([x[sel], np.abs(vals[sel])])
    table = table[table[:, 0] >= lo]
    mode = "free" if args.exponent == "free" else "fixed"
    fit = metrics.subexp_decay_fit(table, mode, rho=ws.rho2)
    report = {"target": args.target, "range": [lo, hi], "mode": mode,
              "fit": fit.to_json_dict(),
              "certificate_digest": ws.certificate_digest()}
    ok = fit.rate_c > 0 and fit.r_squared > 0.9
    if mode == "free":
        ok = ok and 0.40 <= fit.exponent <= 0.60
    _emit(report, args.report)
    print(f"exponent {fit.exponent:.3f}, rate {fit.rate_c:.3f}, "
          f"R^2 {fit.r_squared:.4f}")
    return EXIT_OK if ok else EXIT_CHECK_FAILURE


def cmd_parseval(args) -> int:
    ws = _load_system(args.system)
    window = _parse_window(args.window)
    grid = _expansion_grid()
    f = testfuncs.sample(testfuncs.parse_spec(args.f), grid)
    g = testfuncs.sample(testfuncs.parse_spec(args.g), grid)
    check = expansion.parseval_check(ws, f, g, window)
    report = {"lhs_re": check["lhs"].real, "rhs_re": check["rhs"].real,
              "gap": check["gap"],
              "certificate_digest": ws.certificate_digest()}
    _emit(report, args.report)
    print(f"gap: {check['gap']:.3e}")
    return EXIT_OK if check["gap"] < 1e-5 else EXIT_CHECK_FAILURE


def cmd_report(args) -> int:
    ws = _load_system(args.system)
    report = {"parameters": {"a": ws.a, "rho2": ws.rho2},
              "certificates": ws.certificates,
              "certificate_digest": ws.certificate_digest()}
    _emit(report, args.report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subexp-wavelets",
        description="Band-limited wavelets with subexponential decay: "
                    "construction, projections, expansions, certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a wavelet system")
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--rho2", type=float, default=None)
    p.add_argument("--spectral-points", dest="spectral_points", type=int,
                   default=None)
    p.add_argument("--window", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_build,
                   fill={"a": 1.0, "rho2": 2.0, "spectral_points": 8192,
                         "window": 40.0, "out": "system.json"})

    p = sub.add_parser("verify", help="rerun check suites on a stored system")
    p.add_argument("--system", required=True)
    p.add_argument("--suite", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_verify, fill={"suite": "all"})

    p = sub.add_parser("project", help="projection convergence experiment")
    p.add_argument("--system", required=True)
    p.add_argument("--f", default=None)
    p.add_argument("--levels", default=None)
    p.add_argument("--window", type=float, default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--max-beta", dest="max_beta", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_project,
                   fill={"f": "gaussian", "levels": "0..6", "window": 40.0,
                         "h": 0.5, "c": 0.5, "max_beta": 2})

    p = sub.add_parser("expand", help="wavelet coefficient expansion")
    p.add_argument("--system", required=True)
    p.add_argument("--f", default=None)
    p.add_argument("--window", default=None)
    p.add_argument("--parseval", action="store_true")
    p.add_argument("--out", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_expand,
                   fill={"f": "gevrey-band:pi,2pi", "window": "6,32"})

    p = sub.add_parser("decay", help="fit the decay envelope")
    p.add_argument("--system", required=True)
    p.add_argument("--target", choices=["psi", "phi"], default=None)
    p.add_argument("--exponent", choices=["free", "fixed"], default=None)
    p.add_argument("--range", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_decay,
                   fill={"target": "psi", "exponent": "free", "range": "5,40"})

    p = sub.add_parser("parseval", help="bilinear pairing vs coefficient sum")
    p.add_argument("--system", required=True)
    p.add_argument("--f", default=None)
    p.add_argument("--g", default=None)
    p.add_argument("--window", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_parseval,
                   fill={"f": "gevrey-band:pi,2pi", "g": "gevrey-band:pi,2pi",
                         "window": "6,32"})

    p = sub.add_parser("report", help="dump stored certificates")
    p.add_argument("--system", required=True)
    p.add_argument("--report", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_report, fill={})

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    keys = {k for k in vars(args)
            if k not in ("func", "fill", "command", "config")}
    try:
        _apply_config(args, keys)
        for key, default in args.fill.items():
            if getattr(args, key, None) is None:
                setattr(args, key, default)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (testfuncs.TestFunctionError, expansion.ExpansionError,
            metrics.MetricsError, projection.ProjectionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILURE
    except CorruptSystemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR


if __name__ == "__main__":
    sys.exit(main())
