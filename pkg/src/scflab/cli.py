"""``scf-lab`` command line front end.

Exit codes: 0 success, 2 parse/validation error, 3 numerical failure or
failed verification, 4 infeasible instance (no periodic operation).
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import __version__
from .analysis import mu, predict_outcome, r_star, region_geometry
from .errors import (InfeasiblePathError, NoPeriodicOrbit, NoViableFraction, NumericalError,
                     RegionError, SCFError)
from .instance import InstanceError, dumps_csv, dumps_json, load_instance
from .model import ReactorState, classify_region
from .orbit import optimize_Q, periodic_orbit, period_T
from .simulate import simulate
from .verify import verify_instance

EXIT_OK, EXIT_PARSE, EXIT_NUMERIC, EXIT_INFEASIBLE = 0, 2, 3, 4


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _provenance(inst, args):
    q = inst.quadrature()
    return {"quad_abs_tol": q.abs_tol, "quad_rel_tol": q.rel_tol,
            "max_subdivisions": q.max_subdivisions,
            "ode_rtol": _ode_tol(inst, args)[0], "ode_atol": _ode_tol(inst, args)[1]}


def _ode_tol(inst, args):
    if args.tol is not None:
        return args.tol, args.tol
    return inst.run_value("rtol"), inst.run_value("atol")


def _initial_state(inst):
    if inst.initial is None:
        return None
    i = inst.initial
    return ReactorState(0.0, i["s1"], i["s2"], i["x"])


def _geometry_report(p, g):
    d = dataclasses.asdict(g)
    d["swapped"] = p.swapped
    d["note"] = "geometry is reported in the canonical resource labelling" if p.swapped else ""
    return d


def _prediction_report(pred):
    return dataclasses.asdict(pred)


def cmd_simulate(inst, args):
    p, q = inst.model_params(), inst.quadrature()
    state0 = _initial_state(inst)
    if state0 is None:
        raise CommandError("$.initial: simulate needs an initial state", EXIT_PARSE)
    rtol, atol = _ode_tol(inst, args)
    max_imp = args.max_impulses if args.max_impulses is not None else inst.run_value("max_impulses")
    traj = simulate(state0, p, max_impulses=max_imp, horizon=inst.run_value("horizon"),
                    rtol=rtol, atol=atol)
    rows = [(e.k, e.t, *e.pre, *e.post, e.immediate) for e in traj.impulses]
    header = ["k", "t", "s1_minus", "s2_minus", "x_minus", "s1_plus", "s2_plus", "x_plus",
              "immediate"]
    if args.format == "csv":
        return dumps_csv(header, rows)
    g = region_geometry(p, q)
    pred = predict_outcome(state0, p, q, g)
    record = {
        "command": "simulate",
        "geometry": _geometry_report(p, g),
        "impulses": [dict(zip(header, r)) for r in rows],
        "samples": {"columns": ["t", "s1", "s2", "x"], "rows": traj.samples()},
        "prediction": _prediction_report(pred),
        "observed": {"outcome": traj.label, "impulses": traj.n_impulses,
                     "final": dataclasses.asdict(traj.final)},
        "provenance": _provenance(inst, args),
    }
    return dumps_json(record)


def _region_report(p, g, s1, s2):
    c1, c2 = p.to_canonical(s1, s2)
    reg = classify_region(c1, c2, p, g)
    return {"point": [s1, s2], "label": reg.label, "in_omega1": reg.in_omega1,
            "in_omega1a": reg.in_omega1a, "in_omega_lambda": reg.in_omega_lambda}


def _messages(g):
    msgs = []
    if not g.input_in_omega1:
        msgs.append("input concentrations lie in Omega0: no periodic operation possible")
    elif not g.mu > 0:
        msgs.append("mu(r) <= 0: no periodic orbit at this drain fraction")
    if g.lambda_gap:
        msgs.append("lambda2 > s2_tilde: Omega1A and OmegaLambda are disconnected")
    return msgs


def cmd_classify(inst, args):
    p, q = inst.model_params(), inst.quadrature()
    g = region_geometry(p, q)
    rep = {"command": "classify", "geometry": _geometry_report(p, g),
           "input": _region_report(p, g, *p.to_user(p.s1_in, p.s2_in)),
           "messages": _messages(g), "provenance": _provenance(inst, args)}
    state0 = _initial_state(inst)
    if state0 is not None:
        rep["initial"] = _region_report(p, g, state0.s1, state0.s2)
        rep["prediction"] = _prediction_report(predict_outcome(state0, p, q, g))
    if args.format == "csv":
        return _flat_csv(rep)
    return dumps_json(rep)


def cmd_analyze(inst, args):
    p, q = inst.model_params(), inst.quadrature()
    g = region_geometry(p, q)
    rep = {"command": "analyze", "geometry": _geometry_report(p, g), "mu": g.mu,
           "messages": _messages(g), "provenance": _provenance(inst, args)}
    if g.input_in_omega1:
        try:
            rep["r_star"] = r_star(p, q)
        except NoViableFraction as exc:
            rep["r_star"] = None
            rep["messages"].append(str(exc))
    rep["N_bar"] = g.N_bar
    state0 = _initial_state(inst)
    if state0 is not None:
        rep["initial"] = _region_report(p, g, state0.s1, state0.s2)
        pred = predict_outcome(state0, p, q, g)
        rep["prediction"] = _prediction_report(pred)
        rep["N0"], rep["X"] = pred.N0, pred.X_threshold
    if args.format == "csv":
        return _flat_csv(rep)
    return dumps_json(rep)


def _orbit_dict(o):
    return dataclasses.asdict(o)


def cmd_orbit(inst, args):
    p, q = inst.model_params(), inst.quadrature()
    g = region_geometry(p, q)
    if not g.input_in_omega1:
        raise CommandError(_messages(g)[0], EXIT_INFEASIBLE)
    try:
        o = periodic_orbit(p.r, p, q)
    except NoPeriodicOrbit as exc:
        raise CommandError(str(exc), EXIT_INFEASIBLE)
    rep = {"command": "orbit", "orbit": _orbit_dict(o), "swapped": p.swapped,
           "provenance": _provenance(inst, args)}
    if args.format == "csv":
        return _flat_csv(rep)
    return dumps_json(rep)


def cmd_optimize(inst, args):
    p, q = inst.model_params(), inst.quadrature()
    g = region_geometry(p, q)
    if not g.input_in_omega1:
        raise CommandError(_messages(g)[0], EXIT_INFEASIBLE)
    n = args.r_grid if args.r_grid is not None else inst.run_value("r_grid")
    try:
        opt = optimize_Q(p, q, grid_n=n)
    except NoViableFraction as exc:
        raise CommandError(str(exc), EXIT_INFEASIBLE)
    rep = {"command": "optimize", "r_opt": opt.r_opt, "Q_opt": opt.Q_opt,
           "r_star": opt.r_star, "boundary": opt.boundary, "grid_n": n,
           "provenance": _provenance(inst, args)}
    if args.format == "csv":
        return dumps_csv(["r", "Q"], zip(opt.grid_r, opt.grid_Q))
    return dumps_json(rep)


SWEEP_COLUMNS = ["r", "mu", "T", "Q", "x_minus", "x_plus", "reason"]


def sweep_rows(p, q, r_grid):
    rows = []
    for r in r_grid:
        r = float(r)
        try:
            m = mu(r, p, q)
        except SCFError as exc:
            rows.append((r, None, None, None, None, None, f"error:{type(exc).__name__}"))
            continue
        if not m > 0:
            rows.append((r, m, None, None, None, None, "mu_nonpositive"))
            continue
        try:
            T = period_T(r, p, q, mu_r=m)
        except SCFError as exc:
            rows.append((r, m, None, None, m / r, (1 - r) * m / r,
                         f"error:{type(exc).__name__}"))
            continue
        rows.append((r, m, T, r / T, m / r, (1 - r) * m / r, ""))
    return rows


def cmd_sweep(inst, args):
    p, q = inst.model_params(), inst.quadrature()
    n = args.r_grid if args.r_grid is not None else inst.run_value("r_grid")
    grid = np.linspace(0.0, 1.0, n + 2)[1:-1]
    rows = sweep_rows(p, q, grid)
    if args.format == "json":
        return dumps_json({"command": "sweep", "columns": SWEEP_COLUMNS, "rows": rows,
                           "provenance": _provenance(inst, args)})
    return dumps_csv(SWEEP_COLUMNS, rows)


def cmd_verify(inst, args):
    p, q = inst.model_params(), inst.quadrature()
    seed = int(os.environ.get("SCF_LAB_SEED", "0"))
    results = verify_instance(p, q, _initial_state(inst), np.random.default_rng(seed))
    if args.format == "json":
        out = dumps_json({"command": "verify", "seed": seed,
                          "checks": [dataclasses.asdict(r) for r in results]})
    else:
        out = "".join(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}\n" for r in results)
    if not all(r.passed for r in results):
        args._exit_code = EXIT_NUMERIC
    return out


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def _flat_csv(rep):
    from .instance import jsonable

    rows = []
    _flatten("", jsonable(rep), rows)
    return dumps_csv(["key", "value"], rows)


COMMANDS = {
    "simulate": cmd_simulate, "classify": cmd_classify, "analyze": cmd_analyze,
    "orbit": cmd_orbit, "optimize": cmd_optimize, "sweep": cmd_sweep, "verify": cmd_verify,
}
_DEFAULT_FORMAT = {"sweep": "csv", "verify": "csv"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="scf-lab",
        description="Self-cycling fermentor on two essential resources: simulation and analysis.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--instance", required=True, metavar="FILE", help="JSON instance file")
    ap.add_argument("--out", metavar="FILE", help="write output here instead of stdout")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--r-grid", type=int, metavar="N", help="grid size for sweep/optimize")
    ap.add_argument("--max-impulses", type=int, metavar="N")
    ap.add_argument("--tol", type=float, metavar="X", help="ODE rtol and atol")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    args.format = args.format or _DEFAULT_FORMAT.get(args.command, "json")
    args._exit_code = EXIT_OK
    try:
        inst = load_instance(args.instance)
        out = COMMANDS[args.command](inst, args)
    except OSError as exc:
        print(f"scf-lab: cannot read instance: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InstanceError as exc:
        print(f"scf-lab: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CommandError as exc:
        print(f"scf-lab: {exc}", file=sys.stderr)
        return exc.code
    except (NoViableFraction, NoPeriodicOrbit, RegionError) as exc:
        print(f"scf-lab: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NumericalError, InfeasiblePathError) as exc:
        print(f"scf-lab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return args._exit_code


if __name__ == "__main__":
    sys.exit(main())
