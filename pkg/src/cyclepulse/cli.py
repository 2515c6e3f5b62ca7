"""Command-line front end: solve, compare, trace, validate.

Configuration is flags-first with an optional JSON config file carrying the
same key names; flags win.  All data files are written with full double
precision and contain nothing run-dependent, so identical invocations
produce byte-identical outputs (wall time lives only in meta.json).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import characteristics as chars
from . import eulerian as eul
from . import grid as g
from . import lagrangian as lag
from . import profiles
from . import reference as ref
from .errors import ConfigError, NumericsError
from .integrator import CONSERVED_COLUMNS, RunConfig, Trajectory, integrate
from .kernels import backend_name


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(c[i]) for c in columns) + "\n")


def _parse_floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p != ""]


def _parse_ints(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p != ""]


DEFAULTS = {
    "init": "sine",
    "amplitude": 0.1,
    "mode": 1,
    "amplitudes": "0.1",
    "modes": "1",
    "value": 0.0,
    "n": 256,
    "dt": 5e-4,
    "t_end": 1.0,
    "snapshots": 21,
    "augmented": False,
    "scheme": "rk4",
    "drift_guard": None,
    "diff_method": "fd4",
    "launch_count": 16,
    "xi": None,
    "tol": 1e-12,
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=str, default=None,
                   help="JSON file with the same keys as the flags (flags win)")
    p.add_argument("--init", choices=["sine", "multisine", "zero", "constant"])
    p.add_argument("--amplitude", type=float, help="sine amplitude (>= 0)")
    p.add_argument("--mode", type=int, help="sine mode number (>= 1)")
    p.add_argument("--amplitudes", type=str, help="comma list for multisine")
    p.add_argument("--modes", type=str, help="comma list for multisine")
    p.add_argument("--value", type=float, help="constant profile value")
    p.add_argument("--n", type=int, help="grid size (>= 8, power of two recommended)")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--t-end", dest="t_end", type=float, help="final time")
    p.add_argument("--snapshots", type=int, help="number of stored output times")
    p.add_argument("--augmented", action="store_const", const=True,
                   help="evolve the label-derivative fields too")
    p.add_argument("--scheme", choices=["rk4", "heun"])
    p.add_argument("--drift-guard", dest="drift_guard", type=float,
                   help="abort when invariant residuals exceed this")
    p.add_argument("--diff-method", dest="diff_method", choices=["fd4", "spectral"])
    p.add_argument("--out-dir", dest="out_dir", type=str, required=True)


def _merged(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _profile(cfg: dict) -> profiles.Profile:
    try:
        if cfg["init"] == "zero":
            return profiles.zero()
        if cfg["init"] == "constant":
            return profiles.constant(cfg["value"])
        if cfg["init"] == "sine":
            return profiles.sine(cfg["amplitude"], cfg["mode"])
        if cfg["init"] == "multisine":
            return profiles.multisine(_parse_floats(cfg["amplitudes"]),
                                      _parse_ints(cfg["modes"]))
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown init family {cfg['init']!r}")


def _run_config(cfg: dict) -> RunConfig:
    snaps = int(cfg["snapshots"])
    if snaps < 1:
        raise ConfigError("snapshots must be at least 1")
    t_end = float(cfg["t_end"])
    times = tuple(np.linspace(0.0, t_end, snaps)) if t_end > 0 else (0.0,)
    try:
        return RunConfig(n=int(cfg["n"]), dt=float(cfg["dt"]), t_end=t_end,
                         output_times=times, augmented=bool(cfg["augmented"]),
                         scheme=cfg["scheme"],
                         drift_guard=cfg["drift_guard"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _solve_pipeline(cfg: dict):
    g.set_default_diff_method(cfg["diff_method"])
    prof = _profile(cfg)
    rcfg = _run_config(cfg)
    init = lag.initial_data(prof, rcfg.n)
    s0 = lag.build_initial_lagrangian(init, rcfg.n, augmented=rcfg.augmented)
    traj = integrate(s0, rcfg)
    etraj = [eul.reconstruct(s) for s in traj.states]
    return init, rcfg, traj, etraj


def _write_solution(out: Path, traj: Trajectory, etraj) -> None:
    n = traj.states[0].n
    xi = g.grid_points(n)
    for i, (s, e) in enumerate(zip(traj.states, etraj)):
        _write_csv(out / f"lagrangian_t{i}.csv", ["xi", "y", "U", "V", "W", "Q"],
                   [xi, s.y.samples, s.U, s.V, s.W, s.Q])
        x = g.grid_points(e.m)
        _write_csv(out / f"eulerian_t{i}.csv", ["x", "u", "ux", "ux_valid"],
                   [x, e.u, e.ux, e.ux_valid.astype(float)])
    _write_csv(out / "conserved.csv", list(CONSERVED_COLUMNS),
               [traj.conserved_log[:, j] for j in range(len(CONSERVED_COLUMNS))])


def _write_meta(out: Path, command: str, cfg: dict, init, wall: float) -> None:
    meta = {
        "command": command,
        "tool_version": __version__,
        "backend": backend_name(),
        "config": {k: cfg[k] for k in sorted(DEFAULTS)},
        "h": init.h,
        "F0": init.F0,
        "theorem_scope": init.theorem_scope,
        "profile": init.profile,
        "wall_time_s": wall,
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def cmd_solve(cfg: dict, out: Path) -> int:
    t0 = time.perf_counter()
    init, _rcfg, traj, etraj = _solve_pipeline(cfg)
    _write_solution(out, traj, etraj)
    _write_meta(out, "solve", cfg, init, time.perf_counter() - t0)
    return 0


def cmd_compare(cfg: dict, out: Path) -> int:
    t0 = time.perf_counter()
    init, rcfg, traj, etraj = _solve_pipeline(cfg)
    rstates = ref.ref_integrate(init.u0, rcfg, h=init.h)
    linf_u = np.array([float(np.max(np.abs(e.u - r.u)))
                       for e, r in zip(etraj, rstates)])
    linf_ux = np.array([float(np.max(np.abs(e.ux - g.diff(r.u))))
                        for e, r in zip(etraj, rstates)])
    _write_solution(out, traj, etraj)
    _write_csv(out / "diff.csv", ["t", "linf_u", "linf_ux"],
               [traj.times, linf_u, linf_ux])
    _write_meta(out, "compare", cfg, init, time.perf_counter() - t0)
    return 0


def _launch_points(cfg: dict) -> list[float]:
    if cfg["xi"]:
        pts = _parse_floats(cfg["xi"]) if isinstance(cfg["xi"], str) else list(cfg["xi"])
    else:
        k = int(cfg["launch_count"])
        if k < 1:
            raise ConfigError("launch_count must be at least 1")
        pts = [j / k for j in range(k)]
    return pts


def cmd_trace(cfg: dict, out: Path) -> int:
    t0 = time.perf_counter()
    init, _rcfg, traj, etraj = _solve_pipeline(cfg)
    st = chars.accumulate_sources(etraj, init.h)
    _write_solution(out, traj, etraj)
    for xi in _launch_points(cfg):
        trace = chars.trace_beta(traj, etraj, st, xi, tol=float(cfg["tol"]))
        res = chars.ode_residual_series(trace, etraj)
        _write_csv(out / f"trace_{xi:g}.csv", ["t", "beta", "y_char", "ode_residual"],
                   [trace.times, trace.beta, trace.ychar, res])
    _write_meta(out, "trace", cfg, init, time.perf_counter() - t0)
    return 0


def cmd_validate(cfg: dict, out: Path) -> int:
    t0 = time.perf_counter()
    init, _rcfg, traj, etraj = _solve_pipeline(cfg)
    checks = []

    def check(name, value, threshold, ok=None):
        ok = bool(value <= threshold) if ok is None else bool(ok)
        checks.append({"name": name, "value": float(value),
                       "threshold": float(threshold), "pass": ok})

    log = traj.conserved_log
    h = init.h
    if h != 0.0:
        check("etilde_relative_drift", float(np.max(np.abs(log[:, 1] - h)) / h), 1e-8)
    if init.theorem_scope:
        check("ftilde_abs", float(np.max(np.abs(log[:, 2]))), 1e-8)
    inv_tol = 1e-8 if cfg["augmented"] else 1e-6
    check("invariant_WV", float(log[:, 3].max()), inv_tol)
    check("invariant_yxi", float(log[:, 4].max()), inv_tol)
    check("invariant_Uxi", float(log[:, 5].max()), inv_tol)
    check("min_V", float(log[:, 6].min()), -1e-10, ok=log[:, 6].min() >= -1e-10)
    check("max_V", float(max(r.max_v for r in traj.invariant_log)), 1.0 + 1e-10)
    check("max_W_excess", float(max(r.max_w_excess for r in traj.invariant_log)), 1e-10)
    check("min_Q_positive", float(log[:, 7].min()), 0.0, ok=log[:, 7].min() > 0.0)

    cross_e = cross_f = 0.0
    for s, e in zip(traj.states, etraj):
        et, ft = lag.conserved(s)
        ee, fe = eul.eulerian_invariants(e)
        cross_e = max(cross_e, abs(ee - et))
        cross_f = max(cross_f, abs(fe - ft))
    check("cross_coordinate_E", cross_e, 1e-5)
    check("cross_coordinate_F", cross_f, 1e-5)

    report = eul.weak_residual(traj, eul.default_test_basket(traj.times[-1]),
                               fields=etraj, init=init)
    w1, w2, w3 = report.worst()
    check("weak_identity_1", w1, 1e-3)
    check("weak_identity_2", w2, 1e-3)
    check("weak_identity_3", w3, 1e-3)

    st = chars.accumulate_sources(etraj, init.h)
    worst_ratio = 0.0
    worst_mismatch = 0.0
    for xi in _launch_points(cfg):
        trace = chars.trace_beta(traj, etraj, st, xi, tol=float(cfg["tol"]))
        _ode, mism, _slope = chars.verify_characteristic(trace, traj, etraj)
        worst_ratio = max(worst_ratio, trace.contraction_ratio)
        worst_mismatch = max(worst_mismatch, mism)
    check("picard_contraction_ratio", worst_ratio, 0.5,
          ok=worst_ratio < 0.5)
    check("tracer_lagrangian_mismatch", worst_mismatch, 5e-4)
    lip_y, lip_u = chars.lipschitz_ratios(etraj, init.h)
    check("lipschitz_y_ratio", lip_y, 1.01)
    check("lipschitz_u_ratio", lip_u, 1.01)

    ok = all(c["pass"] for c in checks)
    payload = {"pass": ok, "tool_version": __version__,
               "backend": backend_name(), "checks": checks,
               "wall_time_s": time.perf_counter() - t0}
    (out / "validate_report.json").write_text(json.dumps(payload, indent=2) + "\n")
    print(json.dumps(payload, indent=2))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclepulse",
        description="Conservative solver and verification lab for the "
                    "periodic single-cycle pulse equation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, hlp in [("solve", "run the characteristic-frame solver"),
                      ("compare", "solve and cross-check the direct solver"),
                      ("trace", "solve and re-derive characteristics"),
                      ("validate", "run the invariant/residual suite")]:
        p = sub.add_parser(name, help=hlp)
        _add_common(p)
        if name == "trace" or name == "validate":
            p.add_argument("--launch-count", dest="launch_count", type=int)
            p.add_argument("--xi", type=str, help="comma list of launch labels")
            p.add_argument("--tol", type=float, help="Picard tolerance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merged(args)
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        handler = {"solve": cmd_solve, "compare": cmd_compare,
                   "trace": cmd_trace, "validate": cmd_validate}[args.command]
        return handler(cfg, out)
    except ConfigError as exc:
        print(f"ConfigError: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
