"""Classical thermodynamics over an exact spectrum.

Everything here works on a Spectrum (energy -> degeneracy), so an instance
pays its 2^(n-1) enumeration once and temperature sweeps are cheap.

Numerics. Energies enter floating point only in this module. ln Z is
evaluated in anchored form

    ln Z = -beta*E_min + ln(sum_k g_k * exp(-beta*(E_k - E_min)))

so the sum's terms lie in (0, g_k] and never overflow; the mean energy uses
the same anchor. Because weights can be huge, all energy-like quantities
accept an integer ``scale`` divisor (energies become E/scale, correctly
rounded once from exact integers). ``choose_scale`` implements the default
policy: divide by the squared maximal weight whenever beta*E_max would
exceed 700 in natural-log units, otherwise leave energies raw. Callers that
report scaled quantities must also report the scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .instance import Instance
from .spinmodel import Configuration, Spectrum, energy

_LN2 = math.log(2.0)


def geometric_schedule(
    t_max: float = 10.0, t_min: float = 1e-3, steps: int = 40
) -> tuple[float, ...]:
    """Strictly decreasing geometric temperature ladder from t_max to t_min."""
    if not (t_max > t_min > 0.0):
        raise ValueError("need t_max > t_min > 0")
    if steps < 2:
        raise ValueError("need steps >= 2")
    ratio = (t_min / t_max) ** (1.0 / (steps - 1))
    temps = [t_max * ratio**k for k in range(steps)]
    temps[-1] = t_min
    return tuple(temps)


def _check_schedule(schedule: Sequence[float]) -> None:
    if len(schedule) == 0:
        raise ValueError("temperature schedule is empty")
    prev = math.inf
    for t in schedule:
        if not (0.0 < t < math.inf):
            raise ValueError("temperatures must be positive and finite")
        if t >= prev:
            raise ValueError("temperature schedule must be strictly decreasing")
        prev = t


def _safe_div(num: int, den: int) -> float:
    """num/den as a correctly rounded float; +/-inf on overflow."""
    try:
        return num / den
    except OverflowError:
        return math.inf if (num >= 0) == (den > 0) else -math.inf


def _check_scale(scale: int) -> None:
    if not isinstance(scale, int) or scale < 1:
        raise ValueError("scale must be a positive integer")


def _arrays(spec: Spectrum, scale: int):
    """(E_min/scale, (E_k - E_min)/scale array, degeneracy array), cached."""
    cache = spec.__dict__.setdefault("_thermo_arrays", {})
    hit = cache.get(scale)
    if hit is None:
        e0 = spec.items[0][0]
        e0f = _safe_div(e0, scale)
        delta = np.array([_safe_div(e - e0, scale) for e, _ in spec.items], dtype=float)
        degs = np.array([g for _, g in spec.items], dtype=float)
        hit = (e0f, delta, degs)
        cache[scale] = hit
    return hit


def choose_scale(spec: Spectrum, beta_max: float, candidate: int) -> int:
    """Return ``candidate`` when beta_max*E_max exceeds 700, else 1."""
    _check_scale(candidate)
    emax = _safe_div(spec.max_energy, 1)
    return candidate if beta_max * emax > 700.0 else 1


def log_partition(spec: Spectrum, beta: float, scale: int = 1) -> float:
    """ln Z(beta) over the spectrum; beta = 0 gives exactly n*ln 2."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    _check_scale(scale)
    if beta == 0.0:
        return spec.n * _LN2
    e0f, delta, degs = _arrays(spec, scale)
    s = float(np.dot(degs, np.exp(-beta * delta)))
    return -beta * e0f + math.log(s)


def mean_energy(spec: Spectrum, beta: float, scale: int = 1) -> float:
    """Boltzmann-average energy; beta = 0 gives the plain spectrum mean."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    _check_scale(scale)
    e0f, delta, degs = _arrays(spec, scale)
    w = np.exp(-beta * delta)
    dw = delta * w
    dw[w == 0.0] = 0.0  # underflowed states contribute exactly nothing
    return e0f + float(np.dot(degs, dw)) / float(np.dot(degs, w))


def boltzmann_ratio(
    inst: Instance, k: Configuration, m: Configuration, beta: float
) -> float:
    """Probability ratio W(k)/W(m) = exp(-beta*(E_k - E_m))."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    diff = energy(inst, k) - energy(inst, m)
    x = beta * _safe_div(diff, 1)
    try:
        return math.exp(-x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class LimitEstimate:
    """-T*lnZ at the coldest scheduled temperature, with its certificate.

    The analytic sandwich E_min - T*n*ln2 <= -T*lnZ <= E_min pins the
    estimate: ``bracket`` is that interval (in scaled energy units).
    ``converged`` reports whether the last two scheduled estimates differ
    by less than the requested tolerance.
    """

    estimate: float
    temperature: float
    bracket_low: float
    bracket_high: float
    converged: bool
    estimates: tuple[float, ...]
    scale: int


def ground_energy_via_limit(
    spec: Spectrum,
    schedule: Sequence[float],
    tol: float = 1e-6,
    scale: int = 1,
) -> LimitEstimate:
    """Extract min<E> as the T -> 0 limit of -T*lnZ along a schedule."""
    _check_schedule(schedule)
    _check_scale(scale)
    ests = tuple(-t * log_partition(spec, 1.0 / t, scale) for t in schedule)
    t_last = schedule[-1]
    emin = _safe_div(spec.min_energy, scale)
    converged = len(ests) >= 2 and abs(ests[-1] - ests[-2]) < tol
    return LimitEstimate(
        estimate=ests[-1],
        temperature=t_last,
        bracket_low=emin - t_last * spec.n * _LN2,
        bracket_high=emin,
        converged=converged,
        estimates=ests,
        scale=scale,
    )


class ThermoRow(NamedTuple):
    temperature: float
    beta: float
    log_z: float
    mean_e: float
    free_e: float


@dataclass(frozen=True)
class ThermoCurve:
    """Per-temperature lnZ, <E>, and free energy -T*lnZ (scaled units)."""

    rows: tuple[ThermoRow, ...]
    scale: int
    n: int


def thermo_curve(
    spec: Spectrum, schedule: Sequence[float], scale: int = 1
) -> ThermoCurve:
    """Tabulate lnZ, <E>, and -T*lnZ along a descending schedule."""
    _check_schedule(schedule)
    _check_scale(scale)
    rows = []
    for t in schedule:
        beta = 1.0 / t
        lnz = log_partition(spec, beta, scale)
        rows.append(
            ThermoRow(
                temperature=t,
                beta=beta,
                log_z=lnz,
                mean_e=mean_energy(spec, beta, scale),
                free_e=-t * lnz,
            )
        )
    return ThermoCurve(rows=tuple(rows), scale=scale, n=spec.n)
