"""Exact and heuristic two-way partitioning solvers with exact work counters.

Every solver minimizes the discrepancy |2u - total| over up-set sums u and
returns the squared optimum, a witness configuration, and instrumentation:

    work_nodes   partial solutions examined (per-solver definition below)
    peak_stored  maximum simultaneously stored partial sums

Solver arithmetic is pure integers end to end; floats appear only in the
wall-clock field. All exact solvers stop early once the discrepancy reaches
the parity floor (0 for even totals, 1 for odd), which no assignment can
beat. Witnesses are canonically oriented: spin 0 is always up. brute_force
returns the smallest canonical witness mask among all optima; the other
solvers return a deterministic optimal witness (fixed splits, fixed
tie-ordering), which need not be the globally smallest mask.

Counter definitions:
  brute_force          work = 2^(n-1) scanned configurations (analytic,
                       independent of early exit); peak = 1 (running best).
  meet_in_the_middle   work = 2^|L| + 2^|R| generated half sums + scan
                       steps; peak = 2^|L| + 2^|R| stored (sum, mask) pairs.
  schroeppel_shamir    work = ordered-merge pops + scan steps; peak =
                       quarter tables plus both heap high-water marks.
  karmarkar_karp       work = n - 1 differencing rounds; peak = n.
  complete_kk          work = branch nodes expanded; peak = n live values.
"""

from __future__ import annotations

import heapq
import time
from bisect import bisect_left, insort
from dataclasses import dataclass, replace

import numpy as np

from .errors import CapacityError
from .instance import Instance
from .spinmodel import (
    Configuration,
    _canonical_abs_python,
    _canonical_blocks,
    _numpy_ok,
)

DEFAULT_BRUTE_CAP = 28

SOLVER_NAMES = ("brute", "mitm", "ss", "kk", "ckk")


@dataclass(frozen=True)
class SolverResult:
    solver: str
    energy: int
    discrepancy: int
    witness: Configuration
    exact: bool
    work_nodes: int
    peak_stored: int
    wall_time_s: float

    def __post_init__(self):
        if self.energy != self.discrepancy * self.discrepancy:
            raise ValueError("energy must equal discrepancy squared")


def to_record(inst: Instance, res: SolverResult, include_timing: bool = True) -> dict:
    """JSON-ready record for one solver run (fixed key order)."""
    ms = res.wall_time_s * 1000.0 if include_timing else 0.0
    return {
        "solver": res.solver,
        "n": inst.n,
        "bits": inst.bits,
        "seed": inst.seed,
        "energy": res.energy,
        "discrepancy": res.discrepancy,
        "witness": f"{res.witness.upset:#x}",
        "exact": res.exact,
        "workNodes": res.work_nodes,
        "peakStored": res.peak_stored,
        "wallTimeMs": ms,
    }


def _canonical_mask(mask: int, n: int) -> int:
    return mask if mask & 1 else mask ^ ((1 << n) - 1)


def _result(
    solver: str,
    inst: Instance,
    absd: int,
    mask: int,
    exact: bool,
    work: int,
    peak: int,
    t0: float,
) -> SolverResult:
    return SolverResult(
        solver=solver,
        energy=absd * absd,
        discrepancy=absd,
        witness=Configuration(upset=_canonical_mask(mask, inst.n), n=inst.n),
        exact=exact,
        work_nodes=work,
        peak_stored=peak,
        wall_time_s=time.perf_counter() - t0,
    )


def brute_force(inst: Instance, cap: int = DEFAULT_BRUTE_CAP) -> SolverResult:
    """Scan every canonical configuration; the baseline the others must match."""
    if inst.n > cap:
        raise CapacityError(
            f"brute force scans 2^(n-1) configurations; n = {inst.n} exceeds the "
            f"cap of {cap}. Use meet_in_the_middle or schroeppel_shamir instead."
        )
    t0 = time.perf_counter()
    parity = inst.total & 1
    best_abs: int | None = None
    best_j = 0
    if _numpy_ok(inst):
        for off, dabs in _canonical_blocks(inst):
            i = int(np.argmin(dabs))  # first occurrence: smallest mask in block
            v = int(dabs[i])
            if best_abs is None or v < best_abs:
                best_abs = v
                best_j = off + i
            if best_abs <= parity:
                break
    else:
        for j, v in _canonical_abs_python(inst):
            if best_abs is None or v < best_abs:
                best_abs = v
                best_j = j
                if best_abs <= parity:
                    break
    work = 1 << (inst.n - 1)
    return _result("brute", inst, best_abs, 1 | (best_j << 1), True, work, 1, t0)


def _subset_sums_sorted(ws) -> list[tuple[int, int]]:
    """All (sum, mask) pairs of a weight slice, sorted by (sum, mask)."""
    sums = [(0, 0)]
    for t, w in enumerate(ws):
        bit = 1 << t
        sums += [(s + w, m | bit) for s, m in sums]
    sums.sort()
    return sums


def _scan(asc, desc, total: int, parity: int, n: int):
    """Coordinated pass over ascending/descending half-sum streams.

    Yields the minimum |2(s_a + s_d) - total| over all pairs: the pointer
    walk visits a pair at least as good as any optimum. Returns
    (best_abs, best_canonical_mask, steps).
    """
    steps = 0
    best_abs: int | None = None
    best_mask = 0
    left = next(asc, None)
    right = next(desc, None)
    while left is not None and right is not None:
        steps += 1
        d = 2 * (left[0] + right[0]) - total
        a = -d if d < 0 else d
        if best_abs is None or a < best_abs:
            best_abs = a
            best_mask = _canonical_mask(left[1] | right[1], n)
        elif a == best_abs:
            cand = _canonical_mask(left[1] | right[1], n)
            if cand < best_mask:
                best_mask = cand
        if best_abs <= parity:
            break
        if d > 0:
            right = next(desc, None)
        else:
            left = next(asc, None)
    return best_abs, best_mask, steps


def meet_in_the_middle(inst: Instance) -> SolverResult:
    """Exact optimum from two sorted half-sum tables and one linear scan."""
    t0 = time.perf_counter()
    n = inst.n
    n_left = (n + 1) // 2
    left = _subset_sums_sorted(inst.weights[:n_left])
    right = [(s, m << n_left) for s, m in _subset_sums_sorted(inst.weights[n_left:])]
    parity = inst.total & 1
    best_abs, best_mask, steps = _scan(
        iter(left), reversed(right), inst.total, parity, n
    )
    stored = len(left) + len(right)
    return _result("mitm", inst, best_abs, best_mask, True, stored + steps, stored, t0)


def _merged_stream(qa, qb, b_shift: int, out_shift: int, descending: bool, stats: dict):
    """Yield (sum, mask) over qa x qb in sorted order via an ordered merge.

    qa and qb are sorted quarter tables; the heap never holds more than
    len(qa) entries, which is the whole point: a half's 2^|L| sums stream
    out of O(2^|L|/2) storage.
    """
    sign = -1 if descending else 1
    last = len(qb) - 1
    start = last if descending else 0
    step = -1 if descending else 1
    heap = [
        (sign * (sa + qb[start][0]), ma, qb[start][1], i, start)
        for i, (sa, ma) in enumerate(qa)
    ]
    heapq.heapify(heap)
    stats["heap_peak"] = max(stats["heap_peak"], len(heap))
    while heap:
        key, ma, mb, i, j = heapq.heappop(heap)
        stats["pops"] += 1
        yield sign * key, (ma | (mb << b_shift)) << out_shift
        j2 = j + step
        if 0 <= j2 <= last:
            sb2, mb2 = qb[j2]
            heapq.heappush(heap, (sign * (qa[i][0] + sb2), ma, mb2, i, j2))


def schroeppel_shamir(inst: Instance) -> SolverResult:
    """Same scan as meet_in_the_middle, but each half's sums are generated
    in order from two quarter tables, cutting peak storage to ~2^(n/4)."""
    if inst.n < 4:
        return replace(meet_in_the_middle(inst), solver="ss")
    t0 = time.perf_counter()
    n = inst.n
    n_left = (n + 1) // 2
    lw = inst.weights[:n_left]
    rw = inst.weights[n_left:]
    n_a = (len(lw) + 1) // 2
    n_c = (len(rw) + 1) // 2
    q_a = _subset_sums_sorted(lw[:n_a])
    q_b = _subset_sums_sorted(lw[n_a:])
    q_c = _subset_sums_sorted(rw[:n_c])
    q_d = _subset_sums_sorted(rw[n_c:])
    asc_stats = {"pops": 0, "heap_peak": 0}
    desc_stats = {"pops": 0, "heap_peak": 0}
    asc = _merged_stream(q_a, q_b, n_a, 0, False, asc_stats)
    desc = _merged_stream(q_c, q_d, n_c, n_left, True, desc_stats)
    parity = inst.total & 1
    best_abs, best_mask, steps = _scan(asc, desc, inst.total, parity, n)
    work = asc_stats["pops"] + desc_stats["pops"] + steps
    peak = (
        len(q_a)
        + len(q_b)
        + len(q_c)
        + len(q_d)
        + asc_stats["heap_peak"]
        + desc_stats["heap_peak"]
    )
    return _result("ss", inst, best_abs, best_mask, True, work, peak, t0)


def _color_tree(nodes, root_id: int, extra_roots=()) -> int:
    """Two-color a differencing tree into an up-set mask.

    nodes[i] = (value, left, right, kind) with kind 'leaf'|'d'|'s'. A 'd'
    node puts its children on opposite sides, an 's' node on the same side.
    ``extra_roots`` are placed opposite the main root (forced-completion
    case where the largest value dominates the rest).
    """
    mask = 0
    stack = [(root_id, 0)]
    for rid in extra_roots:
        stack.append((rid, 1))
    while stack:
        nid, color = stack.pop()
        value, left, right, kind = nodes[nid]
        if kind == "leaf":
            if color == 0:
                mask |= 1 << left
        elif kind == "d":
            stack.append((left, color))
            stack.append((right, 1 - color))
        else:
            stack.append((left, color))
            stack.append((right, color))
    return mask


def karmarkar_karp(inst: Instance) -> SolverResult:
    """Largest differencing heuristic: fast, deterministic, not exact."""
    t0 = time.perf_counter()
    n = inst.n
    # nodes[i] = (value, left, right, kind); leaves carry their spin index.
    nodes = [(w, i, -1, "leaf") for i, w in enumerate(inst.weights)]
    heap = [(-w, i) for i, w in enumerate(inst.weights)]
    heapq.heapify(heap)
    while len(heap) > 1:
        na, ia = heapq.heappop(heap)
        nb, ib = heapq.heappop(heap)
        a, b = -na, -nb  # a >= b; ties resolved by creation order
        nodes.append((a - b, ia, ib, "d"))
        heapq.heappush(heap, (-(a - b), len(nodes) - 1))
    root_val, root_id = -heap[0][0], heap[0][1]
    mask = _color_tree(nodes, root_id)
    return _result("kk", inst, root_val, mask, False, n - 1, n, t0)


def _replay_ckk(inst: Instance, ops, expect: int) -> int:
    """Rebuild the witness mask for a complete_kk decision sequence.

    Replays the pop-two-largest discipline with explicit trees, then colors.
    The value evolution is identical to the search's (same multiset, same
    ordering rule), so the final residue must equal the recorded optimum.
    """
    nodes = [(w, i, -1, "leaf") for i, w in enumerate(inst.weights)]
    items = sorted((w, i) for i, w in enumerate(inst.weights))
    uid = len(nodes)
    for op in ops:
        va, ia = items.pop()
        vb, ib = items.pop()
        value = va - vb if op == "d" else va + vb
        nodes.append((value, ia, ib, op))
        insort(items, (value, uid))
        uid += 1
    values_rest = sum(v for v, _ in items[:-1])
    root_val, root_id = items[-1]
    if root_val - values_rest != expect:
        raise RuntimeError("witness replay disagrees with recorded optimum")
    return _color_tree(nodes, root_id, extra_roots=[i for _, i in items[:-1]])


def complete_kk(inst: Instance, node_budget: int | None = None) -> SolverResult:
    """Branch-and-bound over the differencing decisions (exact when complete).

    Each node replaces the two largest values a >= b by a - b or a + b.
    A subtree collapses once the largest value dominates the sum of the
    rest (residue forced); the search stops globally at the parity floor.
    With a node budget the best value so far is returned, flagged inexact
    if the budget ran out before the search completed.
    """
    t0 = time.perf_counter()
    total = inst.total
    parity = total & 1
    vals = sorted(inst.weights)

    # Seed with the plain differencing path so a budget of zero still
    # returns a valid (heuristic-quality) answer.
    seed_res = karmarkar_karp(inst)
    best_d = seed_res.discrepancy
    best_ops: tuple[str, ...] = ("d",) * (inst.n - 1)
    nodes = 0
    budget_hit = False
    ops: list[str] = []

    def consider(d: int) -> None:
        nonlocal best_d, best_ops
        if d < best_d:
            best_d = d
            best_ops = tuple(ops)

    def dfs(tot: int) -> None:
        nonlocal nodes, budget_hit
        if best_d <= parity:
            return
        if node_budget is not None and nodes >= node_budget:
            budget_hit = True
            return
        nodes += 1
        a = vals[-1]
        if len(vals) == 1:
            consider(a)
            return
        rest = tot - a
        if a >= rest:
            consider(a - rest)
            return
        b = vals[-2]
        # difference branch (the differencing-heuristic move, tried first)
        vals.pop()
        vals.pop()
        c = a - b
        insort(vals, c)
        ops.append("d")
        dfs(tot - 2 * b)
        ops.pop()
        vals.pop(bisect_left(vals, c))
        vals.append(b)
        vals.append(a)
        if best_d <= parity or budget_hit:
            return
        # sum branch
        vals.pop()
        vals.pop()
        vals.append(a + b)
        ops.append("s")
        dfs(tot)
        ops.pop()
        vals.pop()
        vals.append(b)
        vals.append(a)

    dfs(total)
    mask = _replay_ckk(inst, best_ops, best_d)
    exact = not budget_hit
    return _result("ckk", inst, best_d, mask, exact, nodes, inst.n, t0)


SOLVERS = {
    "brute": brute_force,
    "mitm": meet_in_the_middle,
    "ss": schroeppel_shamir,
    "kk": karmarkar_karp,
    "ckk": complete_kk,
}

EXACT_SOLVERS = ("brute", "mitm", "ss", "ckk")
