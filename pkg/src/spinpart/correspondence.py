"""Cross-checks between the solver optimum, the spectrum minimum, and the
cold-temperature limit, plus the measured cost of getting each answer.

`correspond` is the consistency gate: on one instance it runs an exact
solver, the full enumeration (when feasible), and the -T*lnZ limit, and
reports whether every pair of available answers agrees. `scaling_study`
and `phase_sweep` run seeded batches to measure how solver cost grows with
n and how the chance of a perfect partition falls with the weight width.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .errors import CapacityError
from .instance import Instance, derive_seed, generate
from .solvers import (
    DEFAULT_BRUTE_CAP,
    SOLVERS,
    SolverResult,
    brute_force,
    meet_in_the_middle,
)
from .spinmodel import DEFAULT_ENUM_CAP, ground_eigenspace, residual, spectrum
from .statmech import (
    LimitEstimate,
    choose_scale,
    geometric_schedule,
    ground_energy_via_limit,
)

_LN2 = math.log(2.0)

# Slack for float comparisons against the analytic bracket, in scaled
# energy units (scaled energies are O(n^2), so this is conservative).
BRACKET_TOL = 1e-9


@dataclass(frozen=True)
class LegCost:
    work_nodes: int
    wall_time_s: float


@dataclass(frozen=True)
class CorrespondenceReport:
    """Agreement record for one instance.

    ``limit_estimate`` and its bracket are in scaled energy units (divide
    raw energies by ``scale``); integer legs are raw. ``checks`` holds each
    individual consistency test that was applicable; ``agree`` is their
    conjunction.
    """

    n: int
    bits: int
    seed: int | None
    solver: str
    e_ground_solver: int
    e_ground_spectrum: int | None
    degeneracy: int | None
    limit_estimate: float | None
    limit_bracket: tuple[float, float] | None
    limit_converged: bool | None
    scale: int
    agree: bool
    checks: dict
    cost: dict


def correspond(
    inst: Instance,
    schedule: Sequence[float] | None = None,
    tol: float = 1e-6,
    enum_cap: int = DEFAULT_ENUM_CAP,
    brute_cap: int = DEFAULT_BRUTE_CAP,
) -> CorrespondenceReport:
    """Run all feasible routes to the ground energy and cross-check them."""
    if schedule is None:
        schedule = geometric_schedule()

    cost: dict[str, LegCost] = {}
    checks: dict[str, bool] = {}

    t0 = time.perf_counter()
    if inst.n <= brute_cap:
        solver_res: SolverResult = brute_force(inst, cap=brute_cap)
    else:
        solver_res = meet_in_the_middle(inst)
    cost[solver_res.solver] = LegCost(solver_res.work_nodes, solver_res.wall_time_s)

    e_spec: int | None = None
    degeneracy: int | None = None
    limit: LimitEstimate | None = None
    scale = 1
    if inst.n <= enum_cap:
        t0 = time.perf_counter()
        spec = spectrum(inst, cap=enum_cap)
        e_spec, ground = ground_eigenspace(inst, cap=enum_cap)
        degeneracy = len(ground)
        cost["enumeration"] = LegCost(2 << (inst.n - 1), time.perf_counter() - t0)

        checks["solver_equals_spectrum"] = solver_res.energy == e_spec
        checks["witness_in_eigenspace"] = any(
            c.upset == solver_res.witness.upset for c in ground
        )
        checks["eigenspace_residuals_zero"] = all(
            residual(inst, e_spec, c) == 0 for c in ground
        )

        t0 = time.perf_counter()
        beta_max = 1.0 / min(schedule)
        scale = choose_scale(spec, beta_max, inst.max_weight**2)
        limit = ground_energy_via_limit(spec, schedule, tol=tol, scale=scale)
        cost["limit"] = LegCost(len(schedule), time.perf_counter() - t0)

        e_solver_scaled = solver_res.energy / scale
        t_last = schedule[-1]
        lo = e_solver_scaled - t_last * inst.n * _LN2 - BRACKET_TOL
        hi = e_solver_scaled + BRACKET_TOL
        checks["limit_within_bracket"] = lo <= limit.estimate <= hi

    agree = all(checks.values())
    return CorrespondenceReport(
        n=inst.n,
        bits=inst.bits,
        seed=inst.seed,
        solver=solver_res.solver,
        e_ground_solver=solver_res.energy,
        e_ground_spectrum=e_spec,
        degeneracy=degeneracy,
        limit_estimate=None if limit is None else limit.estimate,
        limit_bracket=None if limit is None else (limit.bracket_low, limit.bracket_high),
        limit_converged=None if limit is None else limit.converged,
        scale=scale,
        agree=agree,
        checks=checks,
        cost=cost,
    )


@dataclass(frozen=True)
class SolverCell:
    mean_work_nodes: float
    mean_peak_stored: float
    mean_wall_time_s: float


@dataclass(frozen=True)
class ScalingRow:
    n: int
    bits: int
    trials: int
    cells: dict  # solver name -> SolverCell | None (None: infeasible at this n)


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares fit of log2(quantity) against n."""

    slope: float
    intercept: float
    residual: float  # sum of squared fit residuals
    points: int


@dataclass(frozen=True)
class ScalingStudy:
    rows: tuple[ScalingRow, ...]
    work_fits: dict
    peak_fits: dict

    def projected_work_at(self, solver: str, n: float = 1e24) -> str:
        """Illustrative extrapolation of the fitted growth law; not a measurement."""
        fit = self.work_fits[solver]
        return f"2^({fit.slope * n + fit.intercept:.6g})"


def _fit_log2(points: list[tuple[int, float]]) -> SlopeFit:
    xs = [float(n) for n, _ in points]
    ys = [math.log2(v) for _, v in points]
    k = len(xs)
    if k == 1:
        return SlopeFit(slope=0.0, intercept=ys[0], residual=0.0, points=1)
    mx = sum(xs) / k
    my = sum(ys) / k
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    residual = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    return SlopeFit(slope=slope, intercept=intercept, residual=residual, points=k)


def _scaling_trial(task):
    n, bits, seed, solver_names, brute_cap = task
    inst = generate(n, bits, seed)
    out = {}
    for name in solver_names:
        try:
            if name == "brute":
                res = brute_force(inst, cap=brute_cap)
            else:
                res = SOLVERS[name](inst)
        except CapacityError:
            out[name] = None
            continue
        out[name] = (res.work_nodes, res.peak_stored, res.wall_time_s)
    return out


def scaling_study(
    n_values: Sequence[int],
    bits: int,
    trials: int,
    seed: int,
    solvers: Sequence[str] = ("brute", "mitm", "ss", "ckk"),
    brute_cap: int = DEFAULT_BRUTE_CAP,
    jobs: int = 1,
) -> ScalingStudy:
    """Measure mean counters per solver across seeded instances of each size.

    Every trial's instance seed derives from (seed, n, bits, trial), so the
    results are independent of execution order and worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if list(n_values) != sorted(set(n_values)):
        raise ValueError("n_values must be strictly ascending")
    for name in solvers:
        if name not in SOLVERS:
            raise ValueError(f"unknown solver {name!r}")

    tasks = [
        (n, bits, derive_seed(seed, n, bits, t), tuple(solvers), brute_cap)
        for n in n_values
        for t in range(trials)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scaling_trial, tasks, chunksize=4))
    else:
        results = [_scaling_trial(t) for t in tasks]

    rows = []
    for idx, n in enumerate(n_values):
        chunk = results[idx * trials : (idx + 1) * trials]
        cells = {}
        for name in solvers:
            samples = [r[name] for r in chunk if r[name] is not None]
            if not samples:
                cells[name] = None
                continue
            cells[name] = SolverCell(
                mean_work_nodes=sum(s[0] for s in samples) / len(samples),
                mean_peak_stored=sum(s[1] for s in samples) / len(samples),
                mean_wall_time_s=sum(s[2] for s in samples) / len(samples),
            )
        rows.append(ScalingRow(n=n, bits=bits, trials=trials, cells=cells))

    work_fits = {}
    peak_fits = {}
    for name in solvers:
        wpts = [
            (row.n, row.cells[name].mean_work_nodes)
            for row in rows
            if row.cells[name] is not None and row.cells[name].mean_work_nodes > 0
        ]
        ppts = [
            (row.n, row.cells[name].mean_peak_stored)
            for row in rows
            if row.cells[name] is not None and row.cells[name].mean_peak_stored > 0
        ]
        if wpts:
            work_fits[name] = _fit_log2(wpts)
        if ppts:
            peak_fits[name] = _fit_log2(ppts)

    return ScalingStudy(rows=tuple(rows), work_fits=work_fits, peak_fits=peak_fits)


@dataclass(frozen=True)
class PhaseRow:
    n: int
    bits: int
    alpha: float  # bits / n
    trials: int
    perfect: int
    fraction: float


def _phase_trial(task):
    n, bits, seed, solver_name = task
    inst = generate(n, bits, seed)
    return SOLVERS[solver_name](inst).discrepancy


def phase_sweep(
    n: int,
    bits_values: Sequence[int],
    trials: int,
    seed: int,
    solver: str = "mitm",
    jobs: int = 1,
) -> list[PhaseRow]:
    """Fraction of instances with a perfect partition, per weight width.

    Perfect means discrepancy <= 1: odd totals can never reach zero, so the
    parity-forced 1 counts. Rows are ordered by ascending bits.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if solver not in ("brute", "mitm", "ss", "ckk"):
        raise ValueError("phase sweep needs an exact solver")
    tasks = [
        (n, bits, derive_seed(seed, n, bits, t), solver)
        for bits in sorted(set(bits_values))
        for t in range(trials)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            discrepancies = list(pool.map(_phase_trial, tasks, chunksize=8))
    else:
        discrepancies = [_phase_trial(t) for t in tasks]

    rows = []
    for idx, bits in enumerate(sorted(set(bits_values))):
        chunk = discrepancies[idx * trials : (idx + 1) * trials]
        perfect = sum(1 for d in chunk if d <= 1)
        rows.append(
            PhaseRow(
                n=n,
                bits=bits,
                alpha=bits / n,
                trials=trials,
                perfect=perfect,
                fraction=perfect / trials,
            )
        )
    return rows
