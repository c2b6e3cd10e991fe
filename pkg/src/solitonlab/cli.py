"""Command-line front end.

Subcommands: profile, geometry, orbits, flow, embed, verify-all.  Each
writes CSV tables plus a JSON summary (with residuals, pass/fail, and the
full resolved configuration) into the output directory, and optionally a
hand-written SVG figure.  Exit codes: 0 success, 1 validation or usage
error (including failed verification criteria), 2 numeric fault -- in
which case the JSON summary names the violated invariant.

Defaults can be supplied in a flat key=value config file (--config FILE,
keys are flag names with underscores); explicit flags override the file.
The output directory defaults to $SOLITONLAB_OUT, else ./solitonlab_out.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import acceptance, dynamics, embedding, geometry, ricci_flow, svgplot
from .profile import SolitonProfile, SolverError


class _Parser(argparse.ArgumentParser):
    """argparse exits with code 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# config file and output helpers


def _load_config(argv) -> dict:
    """Pre-scan argv for --config and read the flat key=value file."""
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return {}
    if not os.path.exists(path):
        sys.stderr.write("error: config file not found: %s\n" % path)
        raise SystemExit(1)
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                sys.stderr.write("error: bad config line %d: %r\n" % (line_no, line))
                raise SystemExit(1)
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _opt(parser: argparse.ArgumentParser, flag: str, typ, default, help_text,
         config: dict):
    dest = flag.lstrip("-").replace("-", "_")
    if dest in config:
        raw = config[dest]
        if typ is bool:
            default = raw.lower() in ("1", "true", "yes", "on")
        else:
            try:
                default = typ(raw)
            except ValueError:
                sys.stderr.write("error: config value for %s is not a %s: %r\n"
                                 % (dest, typ.__name__, raw))
                raise SystemExit(1)
    if typ is bool:
        parser.add_argument(flag, action="store_true", default=default,
                            help=help_text)
    else:
        parser.add_argument(flag, type=typ, default=default, help=help_text)


def _out_dir(args) -> str:
    d = args.out_dir
    if d is None:
        d = os.environ.get("SOLITONLAB_OUT", "solitonlab_out")
    os.makedirs(d, exist_ok=True)
    return d


def _fmt_cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_cell(c) for c in row) + "\n")


def _json_default(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError("not JSON serializable: %r" % type(obj))


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _config_dict(args) -> dict:
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "func"):
            continue
        out[key] = value
    return out


def _parse_levels(parser, text: str) -> list[float]:
    try:
        levels = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        parser.error("could not parse --levels %r as comma-separated floats" % text)
    if not levels:
        parser.error("--levels is empty")
    return levels


# ---------------------------------------------------------------------------
# subcommands


def _cmd_profile(args, parser) -> int:
    if args.n < 1:
        parser.error("--n must be a positive integer")
    if not args.t_min < args.t_max:
        parser.error("--t-min must be below --t-max")
    if args.samples < 5:
        parser.error("--samples must be at least 5")
    out = _out_dir(args)
    profile = SolitonProfile(args.n)
    ts = np.linspace(args.t_min, args.t_max, args.samples)
    phi, phi1, phi2 = profile.phi_grid(ts)
    f = args.n * ts - (args.n - 1) * np.log(phi) - np.log(phi1)
    residual = np.abs((args.n - 1) * phi1 / phi + phi2 / phi1 + phi1 - args.n)
    header = ["t (dimensionless)", "phi (dimensionless)",
              "phi1 (dimensionless)", "phi2 (dimensionless)",
              "f (dimensionless)", "identity_residual (dimensionless)"]
    rows = zip(ts.tolist(), phi.tolist(), phi1.tolist(), phi2.tolist(),
               f.tolist(), residual.tolist())
    _write_csv(os.path.join(out, "profile.csv"), header, rows)
    max_res = float(np.max(residual))
    _write_json(os.path.join(out, "profile_summary.json"), {
        "config": _config_dict(args),
        "max_identity_residual": max_res,
        "tolerance": 1e-8,
        "passed": max_res <= 1e-8,
    })
    if args.svg:
        svg = svgplot.line_plot(
            [("phi", ts.tolist(), phi.tolist()),
             ("phi1", ts.tolist(), phi1.tolist())],
            title="radial profile, n=%d" % args.n, x_label="t", y_label="value")
        with open(os.path.join(out, "profile.svg"), "w", encoding="utf-8") as fh:
            fh.write(svg)
    print("profile: wrote %d rows, max identity residual %.3e" %
          (args.samples, max_res))
    return 0 if max_res <= 1e-8 else 1


def _cmd_geometry(args, parser) -> int:
    if args.n < 1:
        parser.error("--n must be a positive integer")
    if not args.t_min < args.t_max:
        parser.error("--t-min must be below --t-max")
    if args.samples < 5:
        parser.error("--samples must be at least 5")
    out = _out_dir(args)
    profile = SolitonProfile(args.n)
    ts = np.linspace(args.t_min, args.t_max, args.samples)
    rows = []
    for t in ts:
        data = geometry.curvature_at(profile, t)
        vol = geometry.volume_sublevel(profile, t)
        s = geometry.distance_s(profile, t)
        rows.append((float(t), data.R, data.grad_f_sq,
                     abs(data.R + data.grad_f_sq - args.n), vol, s))
    header = ["t (dimensionless)", "R (scalar curvature)",
              "grad_f_sq (dimensionless)", "energy_identity_residual (dimensionless)",
              "volume (metric volume)", "s (metric distance)"]
    _write_csv(os.path.join(out, "geometry.csv"), header, rows)
    suite = geometry.identity_suite(profile, ts)
    thresholds = {"energy_identity": 1e-8,
                  "energy_identity_assembled": 1e-8,
                  "curvature_transport": 1e-6,
                  "gradient_coefficient": 1e-6}
    passed = {k: suite[k] <= thresholds[k] for k in thresholds}
    _write_json(os.path.join(out, "geometry_summary.json"), {
        "config": _config_dict(args),
        "residuals": suite,
        "thresholds": thresholds,
        "passed": passed,
        "all_passed": all(passed.values()),
    })
    if args.svg:
        svg = svgplot.line_plot(
            [("R", [r[0] for r in rows], [r[1] for r in rows]),
             ("|grad f|^2", [r[0] for r in rows], [r[2] for r in rows])],
            title="curvature and gradient, n=%d" % args.n,
            x_label="t", y_label="value")
        with open(os.path.join(out, "geometry.svg"), "w", encoding="utf-8") as fh:
            fh.write(svg)
    print("geometry: residuals %s" %
          {k: "%.3e" % v for k, v in suite.items()})
    return 0 if all(passed.values()) else 1


def _cmd_orbits(args, parser) -> int:
    if args.n < 1:
        parser.error("--n must be a positive integer")
    if args.step <= 0:
        parser.error("--step must be positive")
    levels = _parse_levels(parser, args.levels)
    out = _out_dir(args)
    profile = SolitonProfile(args.n)
    entries = dynamics.scan_levels_for_orbits(profile, None, levels,
                                              step=args.step)
    rows = []
    worst_period = 0.0
    worst_length = 0.0
    failures = []
    for entry in entries:
        lev = entry["level"]
        if entry["error"] is not None:
            failures.append({"level": lev, "error": entry["error"]})
            rows.append((lev, math.nan, math.nan, math.nan, math.nan,
                         math.nan, "error"))
            continue
        orbit = entry["orbit"]
        t = dynamics.level_to_t(profile, lev)
        _, phi1, _ = profile.phi_derivatives(t)
        ref = 2.0 * math.pi * math.sqrt(phi1)
        rows.append((lev, t, orbit.period, orbit.closure_error,
                     orbit.g_length, orbit.action, orbit.status))
        if orbit.status == "closed":
            worst_period = max(worst_period, abs(orbit.period - 2.0 * math.pi))
            worst_length = max(worst_length, abs(orbit.g_length - ref) / ref)
    header = ["level (value of f)", "t (dimensionless)",
              "period (flow parameter)", "closure_error (euclidean)",
              "g_length (metric length)", "action (omega area)",
              "status (text)"]
    _write_csv(os.path.join(out, "orbits.csv"), header, rows)
    ok = (not failures and worst_period <= 1e-5 and worst_length <= 1e-6)
    _write_json(os.path.join(out, "orbits_summary.json"), {
        "config": _config_dict(args),
        "worst_period_gap": worst_period,
        "worst_length_rel_gap": worst_length,
        "failures": failures,
        "period_tolerance": 1e-5,
        "length_tolerance": 1e-6,
        "passed": ok,
    })
    if args.svg:
        closed = [r for r in rows if r[6] == "closed"]
        if closed:
            svg = svgplot.line_plot(
                [("g_length", [r[0] for r in closed], [r[4] for r in closed]),
                 ("action", [r[0] for r in closed], [r[5] for r in closed])],
                title="orbit metrics vs level, n=%d" % args.n,
                x_label="level", y_label="value")
            with open(os.path.join(out, "orbits.svg"), "w", encoding="utf-8") as fh:
                fh.write(svg)
    print("orbits: %d levels, worst period gap %.3e, worst length gap %.3e" %
          (len(levels), worst_period, worst_length))
    return 0 if ok else 1


def _flow_csv_rows(state: ricci_flow.FlowState):
    phi = state.phi
    t = state.t_grid
    h = state.spacing
    phi1 = np.empty_like(phi)
    phi1[1:-1] = (phi[2:] - phi[:-2]) / (2.0 * h)
    phi1[0] = (phi[1] - phi[0]) / h
    phi1[-1] = (phi[-1] - phi[-2]) / h
    R = state.n - phi1
    return zip(t.tolist(), phi.tolist(), phi1.tolist(), R.tolist())


def _cmd_flow(args, parser) -> int:
    if args.n < 1:
        parser.error("--n must be a positive integer")
    if not args.t_min < args.t_max:
        parser.error("--t-min must be below --t-max")
    if args.samples < 5:
        parser.error("--samples must be at least 5")
    if args.d_tau <= 0 or args.tau_end <= 0:
        parser.error("--d-tau and --tau-end must be positive")
    if args.initial not in ("soliton", "flat"):
        parser.error("--initial must be 'soliton' or 'flat'")
    if args.dump_every < 0:
        parser.error("--dump-every must be nonnegative")
    out = _out_dir(args)
    if args.initial == "soliton":
        state = ricci_flow.soliton_state(SolitonProfile(args.n), args.t_min,
                                         args.t_max, args.samples)
    else:
        state = ricci_flow.flat_state(args.n, args.t_min, args.t_max,
                                      args.samples)
    if args.left_speed is not None:
        state.c_left = args.left_speed
    steps = int(round(args.tau_end / args.d_tau))
    if steps < 1:
        parser.error("--tau-end shorter than one step")
    every = args.dump_every if args.dump_every > 0 else max(1, steps)
    initial_phi = state.phi.copy()
    state, snapshots = ricci_flow.evolve(state, args.d_tau, steps,
                                         snapshot_every=every)
    header = ["t (dimensionless)", "phi (dimensionless)",
              "phi1 (dimensionless)", "R (scalar curvature)"]
    snap_files = []
    for k, (tau, phi_snap) in enumerate(snapshots):
        snap_state = ricci_flow.FlowState(n=args.n, t_grid=state.t_grid,
                                          phi=phi_snap, tau=tau)
        name = "flow_snapshot_%03d.csv" % k
        _write_csv(os.path.join(out, name), header, _flow_csv_rows(snap_state))
        snap_files.append({"file": name, "tau": tau})
    summary = {
        "config": _config_dict(args),
        "tau_end": state.tau,
        "steps": steps,
        "max_step_change": state.max_step_change,
        "snapshots": snap_files,
    }
    if args.initial == "soliton":
        best_shift, sup_err = ricci_flow.soliton_deviation(state, margin=3.0)
        summary["best_shift"] = best_shift
        summary["sup_error"] = sup_err
        summary["shift_tolerance"] = 5e-3
        summary["passed"] = abs(best_shift - args.tau_end) <= 5e-3
    else:
        summary["stationarity_tolerance"] = 1e-10
        summary["passed"] = state.max_step_change <= 1e-10
    _write_json(os.path.join(out, "flow_summary.json"), summary)
    if args.svg:
        svg = svgplot.line_plot(
            [("initial", state.t_grid.tolist(), initial_phi.tolist()),
             ("final", state.t_grid.tolist(), state.phi.tolist())],
            title="reduced flow, n=%d, tau=%s" % (args.n, _fmt_cell(state.tau)),
            x_label="t", y_label="phi")
        with open(os.path.join(out, "flow.svg"), "w", encoding="utf-8") as fh:
            fh.write(svg)
    print("flow: tau=%.4g in %d steps, %s" %
          (state.tau, steps,
           "best_shift %.6f" % summary["best_shift"]
           if "best_shift" in summary
           else "max step change %.3e" % state.max_step_change))
    return 0 if summary["passed"] else 1


def _cmd_embed(args, parser) -> int:
    if args.n < 1:
        parser.error("--n must be a positive integer")
    if args.samples < 1:
        parser.error("--samples must be positive")
    if args.fd_step <= 0:
        parser.error("--fd-step must be positive")
    if args.level <= 0:
        parser.error("--level must be positive")
    out = _out_dir(args)
    profile = SolitonProfile(args.n)
    pts = embedding.sample_sublevel(profile, args.samples, args.t_low,
                                    args.t_high, seed=args.seed)
    residuals = {}
    for tag in ("ricci", "kahler"):
        smap = embedding.build_map(profile, tag)
        residuals[tag] = embedding.pullback_residual(smap, profile, pts,
                                                     fd_step=args.fd_step)
    summary = {
        "config": _config_dict(args),
        "pullback_residuals": residuals,
        "residual_tolerance": 1e-7,
    }
    if args.level < profile.n:
        comp_pts = embedding.sample_sublevel(
            profile, min(args.samples, 200), args.t_low,
            dynamics.level_to_t(profile, args.level) - 0.05, seed=args.seed + 1)
        summary["composition_residual"] = embedding.composition_residual(
            profile, args.level, comp_pts, fd_step=args.fd_step)
        caps = embedding.capacity_bounds(profile, args.level)
        summary["capacity"] = {
            "level": caps.level,
            "t_level": caps.t_level,
            "lower": caps.lower,
            "upper": caps.upper,
            "upper_sharp": caps.upper_sharp,
            "admissible": caps.admissible,
            "ordered": bool(caps.lower <= caps.upper),
        }
    else:
        summary["capacity"] = {
            "note": "level >= n: composition and ball bounds not applicable"}
    worst = max(residuals.values())
    summary["passed"] = bool(worst <= 1e-7)
    _write_json(os.path.join(out, "embed_summary.json"), summary)
    ts = np.linspace(args.t_low, args.t_high, 201)
    ricci_map = embedding.build_map(profile, "ricci")
    kahler_map = embedding.build_map(profile, "kahler")
    rows = []
    for t in ts:
        rows.append((float(t), ricci_map.scaling(t), kahler_map.scaling(t),
                     ricci_map.image_radius_sq(t), kahler_map.image_radius_sq(t)))
    header = ["t (dimensionless)", "a_ricci (scaling)", "a_kahler (scaling)",
              "r2_ricci (squared image radius)", "r2_kahler (squared image radius)"]
    _write_csv(os.path.join(out, "embed.csv"), header, rows)
    if args.svg:
        svg = svgplot.line_plot(
            [("a_ricci", [r[0] for r in rows], [r[1] for r in rows]),
             ("a_kahler", [r[0] for r in rows], [r[2] for r in rows])],
            title="embedding scalings, n=%d" % args.n,
            x_label="t", y_label="a(t)")
        with open(os.path.join(out, "embed.svg"), "w", encoding="utf-8") as fh:
            fh.write(svg)
    print("embed: residuals ricci %.3e kahler %.3e" %
          (residuals["ricci"], residuals["kahler"]))
    return 0 if summary["passed"] else 1


def _cmd_verify_all(args, parser) -> int:
    out = _out_dir(args)
    only = None
    if args.only:
        only = [tok.strip() for tok in args.only.split(",") if tok.strip()]
    overrides = {}
    for item in args.tol or []:
        if "=" not in item:
            parser.error("--tol expects CID=value, got %r" % item)
        cid, _, value = item.partition("=")
        try:
            overrides[cid.strip()] = float(value)
        except ValueError:
            parser.error("--tol value is not a number: %r" % item)
    try:
        results = acceptance.run_all(only=only, tol_overrides=overrides)
    except ValueError as exc:
        parser.error(str(exc))
    doc = {"config": _config_dict(args), "criteria": {}}
    all_passed = True
    for result in results:
        print(result.line())
        doc["criteria"][result.cid] = {
            "description": result.description,
            "measured": result.measured,
            "tolerance": result.tolerance,
            "passed": result.passed,
            "seconds": result.seconds,
            "details": result.details,
        }
        all_passed = all_passed and result.passed
    doc["all_passed"] = all_passed
    _write_json(os.path.join(out, "verify_all.json"), doc)
    print("verify-all: %d criteria, %s" %
          (len(results), "all passed" if all_passed else "FAILURES present"))
    return 0 if all_passed else 1


# ---------------------------------------------------------------------------
# parser assembly and dispatch


def _build_parser(config: dict) -> _Parser:
    top = _Parser(prog="solitonlab",
                  description="numerical laboratory for rotationally "
                              "symmetric gradient Kahler-Ricci solitons")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="solve the radial profile on a grid")
    _opt(p, "--n", int, 2, "complex dimension", config)
    _opt(p, "--t-min", float, -10.0, "lower end of the log-radius grid", config)
    _opt(p, "--t-max", float, 10.0, "upper end of the log-radius grid", config)
    _opt(p, "--samples", int, 2001, "number of grid points", config)
    _opt(p, "--svg", bool, False, "also write an SVG figure", config)
    _opt(p, "--out-dir", str, None, "output directory", config)
    p.add_argument("--config", type=str, default=None, help="key=value defaults file")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("geometry", help="curvature and metric identities")
    _opt(p, "--n", int, 2, "complex dimension", config)
    _opt(p, "--t-min", float, -10.0, "lower end of the log-radius grid", config)
    _opt(p, "--t-max", float, 10.0, "upper end of the log-radius grid", config)
    _opt(p, "--samples", int, 201, "number of grid points", config)
    _opt(p, "--svg", bool, False, "also write an SVG figure", config)
    _opt(p, "--out-dir", str, None, "output directory", config)
    p.add_argument("--config", type=str, default=None, help="key=value defaults file")
    p.set_defaults(func=_cmd_geometry)

    p = sub.add_parser("orbits", help="periodic orbits on level sets of f")
    _opt(p, "--n", int, 1, "complex dimension", config)
    _opt(p, "--levels", str, "0.2,0.5", "comma-separated f-levels", config)
    _opt(p, "--step", float, 1e-3, "integrator step", config)
    _opt(p, "--svg", bool, False, "also write an SVG figure", config)
    _opt(p, "--out-dir", str, None, "output directory", config)
    p.add_argument("--config", type=str, default=None, help="key=value defaults file")
    p.set_defaults(func=_cmd_orbits)

    p = sub.add_parser("flow", help="reduced Ricci flow evolution")
    _opt(p, "--n", int, 1, "complex dimension", config)
    _opt(p, "--initial", str, "soliton", "initial data: soliton or flat", config)
    _opt(p, "--t-min", float, -12.0, "lower end of the grid", config)
    _opt(p, "--t-max", float, 12.0, "upper end of the grid", config)
    _opt(p, "--samples", int, 2401, "number of grid points", config)
    _opt(p, "--d-tau", float, 1e-4, "time step", config)
    _opt(p, "--tau-end", float, 1.0, "final flow time", config)
    _opt(p, "--dump-every", int, 0, "snapshot interval in steps (0: ends only)", config)
    _opt(p, "--left-speed", float, None, "override left boundary descent speed", config)
    _opt(p, "--svg", bool, False, "also write an SVG figure", config)
    _opt(p, "--out-dir", str, None, "output directory", config)
    p.add_argument("--config", type=str, default=None, help="key=value defaults file")
    p.set_defaults(func=_cmd_flow)

    p = sub.add_parser("embed", help="symplectic embeddings and capacity bounds")
    _opt(p, "--n", int, 1, "complex dimension", config)
    _opt(p, "--level", float, math.log(2.0), "sublevel {f < level} for capacity", config)
    _opt(p, "--samples", int, 1000, "number of sample points", config)
    _opt(p, "--t-low", float, -8.0, "lower log-radius of samples", config)
    _opt(p, "--t-high", float, 4.0, "upper log-radius of samples", config)
    _opt(p, "--fd-step", float, 1e-6, "finite-difference step for Jacobians", config)
    _opt(p, "--seed", int, 20230915, "RNG seed for sample points", config)
    _opt(p, "--svg", bool, False, "also write an SVG figure", config)
    _opt(p, "--out-dir", str, None, "output directory", config)
    p.add_argument("--config", type=str, default=None, help="key=value defaults file")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("verify-all", help="run the acceptance criteria")
    _opt(p, "--only", str, "", "comma-separated criterion ids (e.g. C3,C6)", config)
    p.add_argument("--tol", action="append", default=None,
                   help="override a tolerance, e.g. --tol C3=1e-14")
    _opt(p, "--out-dir", str, None, "output directory", config)
    p.add_argument("--config", type=str, default=None, help="key=value defaults file")
    p.set_defaults(func=_cmd_verify_all)

    return top


def parse_and_dispatch(argv) -> int:
    argv = list(argv)
    config = _load_config(argv)
    parser = _build_parser(config)
    args = parser.parse_args(argv)
    subparser = parser  # error() on any parser exits 1; top is fine for messages
    try:
        return args.func(args, subparser)
    except SolverError as exc:
        out = None
        try:
            out = _out_dir(args)
        except OSError:
            pass
        payload = {
            "config": _config_dict(args),
            "fault": str(exc),
            "invariant": str(exc),
            "exit_code": 2,
        }
        if out is not None:
            _write_json(os.path.join(out, "%s_fault.json" % args.command), payload)
        sys.stderr.write("numeric fault: %s\n" % exc)
        return 2


def main() -> int:
    return parse_and_dispatch(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
