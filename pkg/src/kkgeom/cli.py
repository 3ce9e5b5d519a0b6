"""Batch command-line front end.

Subcommands::

    kkgeom validate    --input problem.json            algebra hypothesis checks
    kkgeom identities  --n 5 --trials 500 --seed 0     coframe identity suite
    kkgeom curvature   --input problem.json            curvature / residual sweep
    kkgeom lift        --input problem.json            fiber path lifting
    kkgeom gauge-check --input problem.json            gauge covariance checks

All commands read a problem JSON (``{"algebra": …, "fields": …, "rep": …,
"paths": …, "options": …}``), write a JSON or CSV report to --out (default
stdout), and exit with 0 on success, 2 on an invariant violation, 64 on a
usage or input error, and 70 on an internal numeric failure.  Point sweeps
always reduce in sorted point order so results are independent of --jobs
(env var KK_JOBS supplies the default width).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import basegeo, bundle, exterior, kkcurv, liealg
from .errors import (DegenerateCoframeError, DegenerateMetricError,
                     DegreeError, IntegratorError, KKGeomError)

__all__ = ["main"]

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_USAGE = 64
EXIT_NUMERIC = 70


class _UsageError(Exception):
    pass


def _load_problem(path):
    if path is None:
        raise _UsageError("--input is required for this command")
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _UsageError(f"{path} is not valid JSON: {exc}") from exc


def _algebra_from(problem):
    data = problem.get("algebra")
    if data is None:
        raise _UsageError("problem JSON has no 'algebra' section")
    return liealg.load_spec(data)


def _digest(config) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


_START = None  # set by main() so reports can embed the wall time


def _report(command, config, body):
    wall = 0.0 if _START is None else time.monotonic() - _START
    return {
        "command": command,
        "config": config,
        "config_digest": _digest(config),
        "wall_time_s": wall,
        **body,
    }


def _emit(report, args):
    if args.format == "csv":
        text = _to_csv(report)
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _csv_rows(prefix, value, rows):
    if isinstance(value, dict):
        for key in sorted(value):
            _csv_rows(f"{prefix}.{key}" if prefix else str(key), value[key], rows)
    elif isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            _csv_rows(f"{prefix}[{i}]", item, rows)
    else:
        rows.append((prefix, value))


def _to_csv(report):
    rows = []
    _csv_rows("", report, rows)
    lines = ["key,value"]
    for key, value in rows:
        text = str(value)
        if "," in text or '"' in text:
            text = '"' + text.replace('"', '""') + '"'
        lines.append(f"{key},{text}")
    return "\n".join(lines) + "\n"


def _options(problem, args):
    """Merge problem-file options with command-line overrides."""
    opts = dict(problem.get("options", {}))
    for name in ("tol", "fd_step", "trials", "seed", "jobs"):
        val = getattr(args, name, None)
        if val is not None:
            opts[name] = val
    if "jobs" not in opts:
        opts["jobs"] = int(os.environ.get("KK_JOBS", "1"))
    opts.setdefault("tol", 1e-10)
    opts.setdefault("fd_step", 1e-3)
    opts.setdefault("seed", 0)
    return opts


def _config_options(opts):
    """Options as embedded in reports: execution width is not a problem
    parameter, so reports stay identical across --jobs settings."""
    return {k: v for k, v in opts.items() if k != "jobs"}


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args):
    problem = _load_problem(args.input)
    opts = _options(problem, args)
    spec = _algebra_from(problem)
    report_obj = liealg.validate_spec(spec, tol=opts["tol"])
    checks = [
        {
            "name": c.name,
            "passed": bool(c.passed),
            "max_violation": c.max_violation,
            "worst_indices": list(c.worst_indices) if c.worst_indices else None,
        }
        for c in report_obj.checks
    ]
    body = {
        "passed": bool(report_obj.passed),
        "checks": checks,
        "unimodular": bool(report_obj.unimodular),
        "unimodular_violation": report_obj.unimodular_violation,
        "b_signature": list(report_obj.b_signature),
        "k_signature": list(report_obj.k_signature),
        "det_h": report_obj.det_h,
        "cosmological_constant": liealg.cosmological_constant(spec),
    }
    config = {"algebra": problem.get("algebra"), "options": _config_options(opts)}
    _emit(_report("validate", config, body), args)
    return EXIT_OK if report_obj.passed else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# identities


def cmd_identities(args):
    n = args.n
    if n is None:
        raise _UsageError("identities needs --n")
    trials = args.trials if args.trials is not None else 200
    seed = args.seed if args.seed is not None else 0
    try:
        rep = exterior.check_identities(n, trials=trials, seed=seed)
    except DegreeError as exc:
        raise _UsageError(str(exc)) from exc
    tol = args.tol if args.tol is not None else 1e-12
    passed = rep.max_residual <= tol
    config = {"n": n, "trials": trials, "seed": seed, "tol": tol}
    body = {
        "passed": bool(passed),
        "residuals": {k: float(v) for k, v in sorted(rep.residuals.items())},
        "max_residual": float(rep.max_residual),
    }
    _emit(_report("identities", config, body), args)
    return EXIT_OK if passed else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# curvature

_WORKER_STATE = {}


def _curvature_setup(problem_json, fd_step):
    problem = json.loads(problem_json)
    spec = liealg.load_spec(problem["algebra"])
    chart, coframe, gauge, points = basegeo.load_fields(problem.get("fields", {}), spec)
    _WORKER_STATE.update(spec=spec, coframe=coframe, gauge=gauge, fd_step=fd_step,
                         deriv_mode=problem.get("fields", {}).get("deriv_mode", "analytic"))
    return points


def _curvature_point(point_list):
    st = _WORKER_STATE
    point = np.array(point_list, dtype=float)
    geom = basegeo.geometry_at_point(st["coframe"], st["gauge"], st["spec"], point,
                                     deriv_mode=st["deriv_mode"], fd_step=st["fd_step"])
    spec = st["spec"]
    conn = kkcurv.assemble_omega(geom, spec)
    direct = kkcurv.curvature_direct(conn)
    res = kkcurv.eym_residuals(geom, spec)
    cross = kkcurv.cross_check(geom, spec)
    return {
        "point": [float(x) for x in point],
        "scalar_curvature": direct.scalar,
        "ricci": direct.ricci.tolist(),
        "einstein_residual_norm": res.einstein_norm,
        "yang_mills_residual_norm": res.ym_norm,
        "cross_check_max": max(cross.values()),
        "connection_antisymmetry": conn.antisymmetry_residual(),
        "connection_torsion": conn.torsion_residual(),
    }


def _init_worker(problem_json, fd_step):
    _curvature_setup(problem_json, fd_step)


def cmd_curvature(args):
    problem = _load_problem(args.input)
    opts = _options(problem, args)
    problem_json = json.dumps(problem, sort_keys=True)
    points = _curvature_setup(problem_json, opts["fd_step"])
    tasks = [[float(x) for x in p] for p in points]  # already sorted by loader

    jobs = max(1, int(opts["jobs"]))
    if jobs == 1 or len(tasks) < 2:
        rows = [_curvature_point(t) for t in tasks]
    else:
        with concurrent.futures.ProcessPoolExecutor(
                max_workers=jobs, initializer=_init_worker,
                initargs=(problem_json, opts["fd_step"])) as pool:
            rows = list(pool.map(_curvature_point, tasks))

    summary = {
        "points": len(rows),
        "max_einstein_residual": max((r["einstein_residual_norm"] for r in rows), default=0.0),
        "max_yang_mills_residual": max((r["yang_mills_residual_norm"] for r in rows), default=0.0),
        "max_cross_check": max((r["cross_check_max"] for r in rows), default=0.0),
    }
    config = {"algebra": problem.get("algebra"), "fields": problem.get("fields"),
              "options": _config_options(opts)}
    _emit(_report("curvature", config, {"per_point": rows, "summary": summary}), args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# lift


def _path_specs(problem, rep):
    out = []
    for entry in problem.get("paths", []):
        g0_data = entry.get("g0", "identity")
        if g0_data == "identity":
            g0 = rep.identity_element()
        else:
            g0 = bundle.GroupElement(rep, np.array(g0_data, dtype=float))
        v_data = entry["v"]
        if v_data and isinstance(v_data[0], str):
            from .fieldexpr import FieldProvider
            provs = [FieldProvider(s, n=1) for s in v_data]
            if len(provs) != rep.spec.r:
                raise _UsageError(f"path needs {rep.spec.r} velocity expressions")

            def v(t, provs=provs):
                return np.array([p.evaluate(np.array([t])) for p in provs])

            path = bundle.PathSpec(rep, v, g0)
        else:
            samples = np.array(v_data, dtype=float)
            path = bundle.PathSpec.sampled(rep, samples[:, 0], samples[:, 1:], g0)
        out.append((path, int(entry.get("steps", 100))))
    if not out:
        raise _UsageError("problem JSON has no 'paths' section")
    return out


def cmd_lift(args):
    problem = _load_problem(args.input)
    opts = _options(problem, args)
    rep_name = problem.get("rep")
    if rep_name is None:
        raise _UsageError("problem JSON has no 'rep' entry")
    rep = bundle.builtin_rep(rep_name)
    results = []
    for path, steps in _path_specs(problem, rep):
        coarse = bundle.lift_path(path, steps)
        fine = bundle.lift_path(path, 2 * steps)
        err = float(np.abs(coarse[-1].matrix - fine[-1].matrix).max())
        results.append({
            "steps": steps,
            "final": coarse[-1].matrix.tolist(),
            "drift": coarse[-1].manifold_residual(),
            "step_halving_error": err,
        })
    config = {"rep": rep_name, "paths": problem.get("paths"), "options": _config_options(opts)}
    _emit(_report("lift", config, {"paths": results}), args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# gauge-check


def cmd_gauge_check(args):
    problem = _load_problem(args.input)
    opts = _options(problem, args)
    spec = _algebra_from(problem)
    rep_name = problem.get("rep")
    if rep_name is None:
        raise _UsageError("problem JSON has no 'rep' entry")
    rep = bundle.builtin_rep(rep_name)
    if rep.spec.r != spec.r:
        raise _UsageError(f"rep {rep_name!r} has fiber dimension {rep.spec.r}, "
                          f"algebra has {spec.r}")
    chart, coframe, gauge, points = basegeo.load_fields(problem.get("fields", {}), spec)
    rng = np.random.default_rng(int(opts["seed"]))
    tol = opts.get("gauge_tol", 1e-5)
    rows = []
    for point in points:
        geom = basegeo.geometry_at_point(coframe, gauge, spec, point,
                                         fd_step=opts["fd_step"])
        g = rep.exp(rng.normal(size=rep.spec.r))
        s = 0.25 * rng.normal(size=rep.spec.r)
        rows.append({
            "point": [float(x) for x in point],
            "deextra_residual": bundle.verify_deextra(geom, g, spec, s=s),
            "gauge_covariance_residual": bundle.verify_gauge_covariance(geom, g, spec),
        })
    worst = max(max(r["deextra_residual"], r["gauge_covariance_residual"])
                for r in rows)
    passed = worst <= tol
    config = {"algebra": problem.get("algebra"), "fields": problem.get("fields"),
              "rep": rep_name, "options": _config_options(opts)}
    body = {"passed": bool(passed), "tolerance": tol,
            "max_residual": worst, "per_point": rows}
    _emit(_report("gauge-check", config, body), args)
    return EXIT_OK if passed else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# driver


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kkgeom",
        description="batch runner for the reduction-geometry checks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", help="problem JSON file")
        p.add_argument("--out", help="report file (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--fd-step", dest="fd_step", type=float, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)

    common(sub.add_parser("validate", help="algebra hypothesis checks"))
    p_id = sub.add_parser("identities", help="coframe identity suite")
    p_id.add_argument("--n", type=int, default=None, help="coframe dimension")
    common(p_id, needs_input=False)
    common(sub.add_parser("curvature", help="curvature and residual sweep"))
    common(sub.add_parser("lift", help="fiber path lifting"))
    common(sub.add_parser("gauge-check", help="gauge covariance verification"))
    return parser


_COMMANDS = {
    "validate": cmd_validate,
    "identities": cmd_identities,
    "curvature": cmd_curvature,
    "lift": cmd_lift,
    "gauge-check": cmd_gauge_check,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    global _START
    _START = time.monotonic()
    try:
        code = _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateCoframeError, DegenerateMetricError, IntegratorError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except KKGeomError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
