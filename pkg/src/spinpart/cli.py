"""Command-line front end.

Subcommands: gen, solve, spectrum, thermo, correspond, scaling, phase.
Data goes to stdout unless -o is given; diagnostics go to stderr. Floats
are printed with 12 significant digits so output files are byte-identical
across platforms for a given seed. Exit codes: 0 success, 1 correspondence
disagreement, 2 usage or input error, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys

from . import correspondence, instance, solvers, spinmodel, statmech
from .errors import CapacityError


class _UsageError(Exception):
    pass


def _f12(x: float) -> str:
    return format(float(x), ".12g")


def _jf(x: float) -> float:
    """Round a float to 12 significant digits for stable JSON output."""
    return float(_f12(x))


@contextlib.contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _resolve_instance(args) -> instance.Instance:
    triple = [args.n is not None, args.bits is not None, args.seed is not None]
    if args.instance is not None:
        if any(triple):
            raise _UsageError("give either an instance file or -n/-b/-s, not both")
        return instance.load(args.instance)
    if not all(triple):
        raise _UsageError("need an instance file or all of -n, -b, -s")
    return instance.generate(args.n, args.bits, args.seed)


def _add_instance_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", nargs="?", default=None, help="instance file path")
    p.add_argument("-n", type=int, default=None, help="spin count (generator)")
    p.add_argument("-b", "--bits", type=int, default=None, help="weight bits (generator)")
    p.add_argument("-s", "--seed", type=int, default=None, help="generator seed")


def _add_schedule(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tmax", type=float, default=10.0, help="largest temperature")
    p.add_argument("--tmin", type=float, default=1e-3, help="smallest temperature")
    p.add_argument("--steps", type=int, default=40, help="schedule length (>= 2)")


def _schedule_from(args):
    return statmech.geometric_schedule(args.tmax, args.tmin, args.steps)


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise _UsageError(f"expected a comma-separated integer list, got {text!r}")


def _cmd_gen(args) -> int:
    if args.n is None or args.bits is None or args.seed is None:
        raise _UsageError("gen requires -n, -b and -s")
    inst = instance.generate(args.n, args.bits, args.seed)
    with _open_out(args.output) as out:
        out.write(instance.serialize(inst))
    return 0


def _cmd_solve(args) -> int:
    inst = _resolve_instance(args)
    if args.all:
        args.solver = "all"
    names = list(solvers.SOLVER_NAMES) if args.solver == "all" else [args.solver]
    include_timing = not args.no_timings
    with _open_out(args.output) as out:
        for name in names:
            try:
                if name == "brute":
                    res = solvers.brute_force(inst, cap=args.cap)
                elif name == "ckk":
                    res = solvers.complete_kk(inst, node_budget=args.budget)
                else:
                    res = solvers.SOLVERS[name](inst)
            except CapacityError as exc:
                if args.solver != "all":
                    raise
                print(f"skipping {name}: {exc}", file=sys.stderr)
                continue
            rec = solvers.to_record(inst, res, include_timing=include_timing)
            rec["wallTimeMs"] = _jf(rec["wallTimeMs"])
            out.write(json.dumps(rec) + "\n")
    return 0


def _cmd_spectrum(args) -> int:
    inst = _resolve_instance(args)
    spec = spinmodel.spectrum(inst, cap=args.cap)
    with _open_out(args.output) as out:
        out.write("energy,degeneracy\n")
        for e, g in spec.items:
            out.write(f"{e},{g}\n")
    return 0


def _thermo_scale(inst, spec, schedule, raw: bool) -> int:
    if raw:
        return 1
    return statmech.choose_scale(spec, 1.0 / min(schedule), inst.max_weight**2)


def _cmd_thermo(args) -> int:
    inst = _resolve_instance(args)
    spec = spinmodel.spectrum(inst, cap=args.cap)
    schedule = _schedule_from(args)
    scale = _thermo_scale(inst, spec, schedule, args.raw_energies)
    curve = statmech.thermo_curve(spec, schedule, scale=scale)
    with _open_out(args.output) as out:
        out.write("T,beta,lnZ,meanE,freeE,scale\n")
        for row in curve.rows:
            out.write(
                f"{_f12(row.temperature)},{_f12(row.beta)},{_f12(row.log_z)},"
                f"{_f12(row.mean_e)},{_f12(row.free_e)},{curve.scale}\n"
            )
    return 0


def _report_record(rep: correspondence.CorrespondenceReport, include_timing: bool) -> dict:
    cost = {
        leg: {
            "workNodes": c.work_nodes,
            "wallTimeMs": _jf(c.wall_time_s * 1000.0) if include_timing else 0.0,
        }
        for leg, c in rep.cost.items()
    }
    return {
        "n": rep.n,
        "bits": rep.bits,
        "seed": rep.seed,
        "solver": rep.solver,
        "eGroundSolver": rep.e_ground_solver,
        "eGroundSpectrum": rep.e_ground_spectrum,
        "degeneracy": rep.degeneracy,
        "limitEstimate": None if rep.limit_estimate is None else _jf(rep.limit_estimate),
        "limitBracketLow": None if rep.limit_bracket is None else _jf(rep.limit_bracket[0]),
        "limitBracketHigh": None if rep.limit_bracket is None else _jf(rep.limit_bracket[1]),
        "limitConverged": rep.limit_converged,
        "scale": rep.scale,
        "agree": rep.agree,
        "checks": rep.checks,
        "cost": cost,
    }


def _cmd_correspond(args) -> int:
    inst = _resolve_instance(args)
    rep = correspondence.correspond(
        inst, schedule=_schedule_from(args), tol=args.tol, enum_cap=args.cap
    )
    with _open_out(args.output) as out:
        out.write(json.dumps(_report_record(rep, not args.no_timings)) + "\n")
    return 0 if rep.agree else 1


def _solver_subset(text: str) -> list[str]:
    if text == "all":
        return list(solvers.SOLVER_NAMES)
    names = [part for part in text.split(",") if part != ""]
    for name in names:
        if name not in solvers.SOLVERS:
            raise _UsageError(f"unknown solver {name!r}")
    return names


def _cmd_scaling(args) -> int:
    ns = _int_list(args.ns)
    names = _solver_subset(args.solver)
    study = correspondence.scaling_study(
        ns, args.bits, args.trials, args.seed, solvers=names, jobs=args.jobs
    )
    include_timing = not args.no_timings

    def fit_cols(fits, name):
        fit = fits.get(name)
        if fit is None:
            return ["", "", ""]
        return [_f12(fit.slope), _f12(fit.intercept), _f12(fit.residual)]

    with _open_out(args.output) as out:
        if args.format == "csv":
            out.write(
                "n,bits,trials,solver,meanWorkNodes,meanPeakStored,meanWallTimeMs,"
                "workSlope,workIntercept,workResidual,"
                "peakSlope,peakIntercept,peakResidual\n"
            )
            for row in study.rows:
                for name in names:
                    cell = row.cells.get(name)
                    if cell is None:
                        means = ["", "", ""]
                    else:
                        ms = cell.mean_wall_time_s * 1000.0 if include_timing else 0.0
                        means = [
                            _f12(cell.mean_work_nodes),
                            _f12(cell.mean_peak_stored),
                            _f12(ms),
                        ]
                    cols = (
                        [str(row.n), str(row.bits), str(row.trials), name]
                        + means
                        + fit_cols(study.work_fits, name)
                        + fit_cols(study.peak_fits, name)
                    )
                    out.write(",".join(cols) + "\n")
        else:
            for row in study.rows:
                for name in names:
                    cell = row.cells.get(name)
                    wfit = study.work_fits.get(name)
                    pfit = study.peak_fits.get(name)
                    rec = {
                        "n": row.n,
                        "bits": row.bits,
                        "trials": row.trials,
                        "solver": name,
                        "meanWorkNodes": None if cell is None else _jf(cell.mean_work_nodes),
                        "meanPeakStored": None if cell is None else _jf(cell.mean_peak_stored),
                        "meanWallTimeMs": None
                        if cell is None
                        else (_jf(cell.mean_wall_time_s * 1000.0) if include_timing else 0.0),
                        "workSlope": None if wfit is None else _jf(wfit.slope),
                        "workIntercept": None if wfit is None else _jf(wfit.intercept),
                        "workResidual": None if wfit is None else _jf(wfit.residual),
                        "peakSlope": None if pfit is None else _jf(pfit.slope),
                        "peakIntercept": None if pfit is None else _jf(pfit.intercept),
                        "peakResidual": None if pfit is None else _jf(pfit.residual),
                    }
                    out.write(json.dumps(rec) + "\n")
    for name in names:
        if name in study.work_fits:
            print(
                f"projection: {name} meanWorkNodes at n = 1e24 is about "
                f"{study.projected_work_at(name)} "
                "(extrapolated from the fitted slope, not a measurement)",
                file=sys.stderr,
            )
    return 0


def _cmd_phase(args) -> int:
    if args.n is None or args.seed is None:
        raise _UsageError("phase requires -n and -s")
    bits_values = _int_list(args.bits_list)
    rows = correspondence.phase_sweep(
        args.n, bits_values, args.trials, args.seed, solver=args.solver, jobs=args.jobs
    )
    with _open_out(args.output) as out:
        if args.format == "csv":
            out.write("n,bits,alpha,trials,perfect,fraction\n")
            for r in rows:
                out.write(
                    f"{r.n},{r.bits},{_f12(r.alpha)},{r.trials},{r.perfect},"
                    f"{_f12(r.fraction)}\n"
                )
        else:
            for r in rows:
                rec = {
                    "n": r.n,
                    "bits": r.bits,
                    "alpha": _jf(r.alpha),
                    "trials": r.trials,
                    "perfect": r.perfect,
                    "fraction": _jf(r.fraction),
                }
                out.write(json.dumps(rec) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinpart",
        description="Exact spin-glass spectra, thermodynamics, and partitioning solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a seeded instance file")
    p.add_argument("-n", type=int, required=True, help="spin count")
    p.add_argument("-b", "--bits", type=int, required=True, help="weight bits")
    p.add_argument("-s", "--seed", type=int, required=True, help="generator seed")
    p.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="run solvers, one JSON line per run")
    _add_instance_source(p)
    p.add_argument(
        "--solver",
        choices=list(solvers.SOLVER_NAMES) + ["all"],
        default="all",
        help="which solver to run (default all)",
    )
    p.add_argument("--all", action="store_true", help="shorthand for --solver all")
    p.add_argument("--cap", type=int, default=solvers.DEFAULT_BRUTE_CAP,
                   help="brute-force size cap")
    p.add_argument("--budget", type=int, default=None,
                   help="node budget for the branch-and-bound solver")
    p.add_argument("--no-timings", action="store_true",
                   help="zero wallTimeMs fields for byte-identical output")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("spectrum", help="full energy spectrum as CSV")
    _add_instance_source(p)
    p.add_argument("--cap", type=int, default=spinmodel.DEFAULT_ENUM_CAP,
                   help="enumeration size cap")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("thermo", help="lnZ / mean energy / free energy table")
    _add_instance_source(p)
    _add_schedule(p)
    p.add_argument("--cap", type=int, default=spinmodel.DEFAULT_ENUM_CAP)
    p.add_argument("--raw-energies", action="store_true",
                   help="never rescale energies (may underflow at cold temperatures)")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_thermo)

    p = sub.add_parser("correspond", help="cross-check all routes to the ground energy")
    _add_instance_source(p)
    _add_schedule(p)
    p.add_argument("--tol", type=float, default=1e-6, help="limit convergence tolerance")
    p.add_argument("--cap", type=int, default=spinmodel.DEFAULT_ENUM_CAP,
                   help="enumeration cap for the spectrum leg")
    p.add_argument("--no-timings", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_correspond)

    p = sub.add_parser("scaling", help="mean work counters vs n, with log2 fits")
    p.add_argument("--ns", required=True,
                   help="comma-separated ascending spin counts, e.g. 16,18,20")
    p.add_argument("-b", "--bits", type=int, required=True)
    p.add_argument("-s", "--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--solver", default="brute,mitm,ss,ckk",
                   help="comma-separated subset of brute,mitm,ss,kk,ckk or 'all'")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--jobs", type=int, default=os.cpu_count(),
                   help="worker processes for independent trials")
    p.add_argument("--no-timings", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_scaling)

    p = sub.add_parser("phase", help="perfect-partition fraction vs weight bits")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-s", "--seed", type=int, required=True)
    p.add_argument("--bits-list", required=True,
                   help="comma-separated bit widths, e.g. 4,8,16,24,40")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--solver", choices=["brute", "mitm", "ss", "ckk"], default="mitm")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--jobs", type=int, default=os.cpu_count())
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_phase)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (_UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
