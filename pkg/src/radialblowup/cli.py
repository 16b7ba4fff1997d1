"""Command-line entry point.

    radialblowup solve      integrate the radial IVP (CSV + blow-up sidecar, or JSON summary)
    radialblowup classify   regime on a ball, or existence on R^N
    radialblowup equilibria equilibria, stability and Hirsch checks of the autonomous system
    radialblowup flow       trajectory of the autonomous system (CSV t,Y,Z,W)
    radialblowup verify     fitted vs predicted rates at infinity
    radialblowup sweep      rate table over a (p, s) grid, run in a process pool

Exit codes: 0 success, 2 input error, 3 inconclusive classification,
4 numerical failure. Errors are written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, criteria, dynsys
from .errors import RadialBlowupError, SpecError
from .model import (InitialData, ProblemSpec, load_problem, problem_from_dict, problem_to_dict,
                    require_valid)
from .radial_ode import SolverConfig, integrate_radial

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_NUMERIC = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    command: str
    problem: ProblemSpec
    init: InitialData
    solver: SolverConfig
    out: str | None = None
    fmt: str = "json"
    seed: int = 0
    extra: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SpecError(f"command line: {message}")


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_clean({"schema_version": SCHEMA_VERSION, **doc}), indent=2, sort_keys=True) + "\n"


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise SpecError(f"expected a comma separated list of numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("problem")
    g.add_argument("--config", help="JSON problem document")
    for name in ("N",):
        g.add_argument(f"--{name}", type=int)
    for name in ("a", "b", "p", "s", "u0", "v0"):
        g.add_argument(f"--{name}", type=float)
    dom = g.add_mutually_exclusive_group()
    dom.add_argument("--ball", type=float, metavar="R")
    dom.add_argument("--entire", action="store_true")
    sv = common.add_argument_group("solver")
    sv.add_argument("--rtol", type=float)
    sv.add_argument("--atol", type=float)
    sv.add_argument("--rmax", type=float)
    sv.add_argument("--threshold", type=float)
    o = common.add_argument_group("output")
    o.add_argument("--out")
    o.add_argument("--format", choices=("csv", "json"))
    o.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="radialblowup", description="Radial blow-up laboratory for Δu = g(|x|,v), "
                     "Δv = f(|x|,|∇u|).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="integrate the radial initial value problem")
    c = sub.add_parser("classify", parents=[common], help="regime classification")
    c.add_argument("--method", choices=("auto", "analytic", "numeric"), default="auto")
    sub.add_parser("equilibria", parents=[common], help="equilibria and stability")
    f = sub.add_parser("flow", parents=[common], help="trajectory of the autonomous system")
    f.add_argument("--xi0", help="Y,Z,W (default: ξ1 + (1e-3, 0, 0))")
    f.add_argument("--t0", type=float, default=0.0)
    f.add_argument("--t1", type=float, default=50.0)
    sub.add_parser("verify", parents=[common], help="asymptotic rates at infinity")
    w = sub.add_parser("sweep", parents=[common], help="rate table over a (p, s) grid")
    w.add_argument("--p-values", default="0.2,0.4,0.6,0.8")
    w.add_argument("--s-values", default="1,1.5,2")
    w.add_argument("--random", type=int, default=0, help="draw this many (p, s) with ps < 1 instead")
    w.add_argument("--workers", type=int, default=None)
    return parser


def resolve(args: argparse.Namespace) -> RunConfig:
    doc: dict = {}
    if args.config:
        spec0, init0 = load_problem(args.config)
        doc = problem_to_dict(spec0, init0)
    for key in ("N", "a", "b", "p", "s", "u0", "v0"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    if args.ball is not None:
        doc["domain"] = {"ball": args.ball}
    elif args.entire:
        doc["domain"] = "entire"
    spec, init = problem_from_dict(doc)
    default_rmax = 1e5 if args.command == "verify" else 1e3
    solver = SolverConfig(
        rtol=args.rtol if args.rtol is not None else 1e-9,
        atol=args.atol if args.atol is not None else 1e-12,
        r_max=args.rmax if args.rmax is not None else default_rmax,
        threshold=args.threshold if args.threshold is not None else 1e8,
    )
    fmt = args.format or ("csv" if args.command == "sweep"
                          or (args.command in ("solve", "flow") and args.out) else "json")
    extra = {k: v for k, v in vars(args).items()
             if k in ("method", "xi0", "t0", "t1", "p_values", "s_values", "random", "workers")}
    return RunConfig(args.command, spec, init, solver, args.out, fmt, args.seed, extra)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------


def _solve(cfg: RunConfig) -> int:
    sol = integrate_radial(cfg.problem, cfg.init, cfg.solver)
    summary = {"command": "solve", "problem": problem_to_dict(cfg.problem, cfg.init),
               "n_points": len(sol), "r_end": float(sol.r[-1]), "residual_norm": sol.residual_norm,
               "blowup": sol.blowup.to_dict() if sol.blowup else None}
    if sol.blowup:
        summary["blowup"].update(v_rate=sol.blowup.v_rate, du_rate=sol.blowup.du_rate)
    if cfg.fmt == "csv":
        if cfg.out:
            sol.to_csv(cfg.out)
            sol.write_sidecar(cfg.out + ".blowup.json")
        else:
            buf = io.StringIO()
            w = csv.writer(buf)
            w.writerow(["r", "u", "v", "du", "dv"])
            for row in zip(sol.r, sol.u, sol.v, sol.du, sol.dv):
                w.writerow([repr(float(x)) for x in row])
            sys.stdout.write(buf.getvalue())
    else:
        _emit(dumps(summary), cfg.out)
    return EXIT_OK


def _classify(cfg: RunConfig) -> int:
    spec = cfg.problem
    if spec.is_ball:
        reg = criteria.classify_ball(spec, method=cfg.extra.get("method", "auto"))
    else:
        reg = criteria.classify_entire(spec)
    _emit(dumps({"command": "classify", "problem": problem_to_dict(spec), **reg.to_dict()}), cfg.out)
    return EXIT_OK if reg.decided else EXIT_INCONCLUSIVE


def _equilibria(cfg: RunConfig) -> int:
    require_valid(cfg.problem)
    params = dynsys.DynParams.from_spec(cfg.problem)
    xi1, xi2 = dynsys.equilibria(params)
    stab = dynsys.is_asymptotically_stable(params)
    hirsch = dynsys.check_hirsch_conditions(params)
    doc = {"command": "equilibria", "params": vars(params), "xi1": xi1.to_dict(),
           "xi2": xi2.to_dict(), "stability": stab.to_dict(), "stable": stab.stable,
           "hirsch": hirsch.to_dict()}
    _emit(dumps(doc), cfg.out)
    return EXIT_OK


def _flow(cfg: RunConfig) -> int:
    require_valid(cfg.problem)
    params = dynsys.DynParams.from_spec(cfg.problem)
    if cfg.extra.get("xi0"):
        xi0 = _floats(cfg.extra["xi0"])
        if len(xi0) != 3:
            raise SpecError("--xi0 needs three values Y,Z,W")
    else:
        xi0 = np.array(dynsys.equilibria(params)[0].point) + np.array([1e-3, 0.0, 0.0])
    t0, t1 = cfg.extra.get("t0", 0.0), cfg.extra.get("t1", 50.0)
    traj = dynsys.flow(params, xi0, (t0, t1))
    if cfg.fmt == "csv":
        if cfg.out:
            traj.to_csv(cfg.out)
        else:
            buf = io.StringIO()
            w = csv.writer(buf)
            w.writerow(["t", "Y", "Z", "W"])
            for row in zip(traj.t, traj.Y, traj.Z, traj.W):
                w.writerow([repr(float(x)) for x in row])
            sys.stdout.write(buf.getvalue())
        return EXIT_OK
    try:
        omega = dynsys.omega_limit(traj, params)
    except SpecError:
        omega = dynsys.UNDECIDED
    doc = {"command": "flow", "params": vars(params), "xi0": list(map(float, xi0)),
           "t_span": [t0, t1], "n_points": len(traj), "final": traj.xi[-1].tolist(),
           "omega_limit": omega}
    _emit(dumps(doc), cfg.out)
    return EXIT_OK


def _verify(cfg: RunConfig) -> int:
    rep = asymptotics.verify_asymptotics(cfg.problem, cfg.init, cfg.solver)
    doc = {"command": "verify", "problem": problem_to_dict(cfg.problem, cfg.init), **rep.to_dict()}
    _emit(dumps(doc), cfg.out)
    return EXIT_OK


def _sweep_one(job):
    doc, solver = job
    spec, init = problem_from_dict(doc)
    return asymptotics.sweep_row(spec, init, solver)


def _sweep(cfg: RunConfig) -> int:
    base = problem_to_dict(cfg.problem, cfg.init)
    base["domain"] = "entire"
    if cfg.extra.get("random"):
        rng = np.random.default_rng(cfg.seed)
        pairs = []
        while len(pairs) < cfg.extra["random"]:
            p, s = float(rng.uniform(0.05, 0.95)), float(rng.uniform(1.0, 3.0))
            if p * s < 1:
                pairs.append((round(p, 6), round(s, 6)))
    else:
        pairs = [(p, s) for p in _floats(cfg.extra["p_values"]) for s in _floats(cfg.extra["s_values"])]
    solver = SolverConfig(cfg.solver.rtol, cfg.solver.atol, max(cfg.solver.r_max, 1e5), cfg.solver.threshold)
    jobs = [({**base, "p": p, "s": s}, solver) for p, s in pairs]
    with ProcessPoolExecutor(max_workers=cfg.extra.get("workers")) as pool:
        rows = list(pool.map(_sweep_one, jobs))
    if cfg.fmt == "json":
        _emit(dumps({"command": "sweep", "rows": rows}), cfg.out)
        return EXIT_OK
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=asymptotics.SWEEP_COLUMNS)
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    _emit(buf.getvalue(), cfg.out)
    return EXIT_OK


COMMANDS = {"solve": _solve, "classify": _classify, "equilibria": _equilibria, "flow": _flow,
            "verify": _verify, "sweep": _sweep}


def run(cfg: RunConfig) -> int:
    return COMMANDS[cfg.command](cfg)


def _report(code: str, message: str, violations=()) -> None:
    doc = {"error": code, "message": message,
           "violations": [{"code": c, "detail": m} for c, m in violations]}
    sys.stderr.write(dumps(doc))


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return run(resolve(args))
    except RadialBlowupError as exc:
        _report(exc.code, str(exc), getattr(exc, "violations", ()))
        return exc.exit_code
    except (OSError, ValueError) as exc:
        _report("input_error", str(exc))
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - last-resort structured error
        _report("internal_error", f"{type(exc).__name__}: {exc}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
