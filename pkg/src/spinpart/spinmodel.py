"""Spin configurations, exact energies, couplings, and full spectra.

A configuration of n two-valued spins is encoded as the bitmask of its
up-set: bit i set means spin i points up (S_i = +1). The energy of a
configuration is the squared signed discrepancy

    E = (sum of up weights - sum of down weights)^2 = (2*u - total)^2

computed entirely in integer arithmetic (u is the up-set sum). The
Hamiltonian is diagonal in this encoding, so eigenpairs are simply
(bitmask, integer) and no matrix algebra is ever needed.

Full-spectrum enumeration walks the 2^(n-1) configurations with spin 0
fixed up; the global spin flip accounts for the other half, which is why
every degeneracy is even. Enumeration is capped (default n <= 24); the
solvers module finds optima well beyond that.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError
from .instance import Instance

DEFAULT_ENUM_CAP = 24

# Chunk size (in free-spin bits) for the vectorized scan; keeps peak
# temporary arrays at ~8 MB however large n gets.
_BLOCK_BITS = 20

# int64 is safe while |2s - total| cannot overflow.
_INT64_SAFE_TOTAL = 1 << 62


@dataclass(frozen=True)
class Configuration:
    """An n-spin sign assignment, stored as the up-set bitmask."""

    upset: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.upset < (1 << self.n):
            raise ValueError("upset mask has bits outside the low n positions")

    @classmethod
    def from_signs(cls, signs) -> "Configuration":
        mask = 0
        for i, s in enumerate(signs):
            if s == 1:
                mask |= 1 << i
            elif s != -1:
                raise ValueError("signs must be +1 or -1")
        return cls(upset=mask, n=len(signs))

    @classmethod
    def from_up_indices(cls, indices, n: int) -> "Configuration":
        mask = 0
        for i in indices:
            if not 0 <= i < n:
                raise ValueError(f"spin index {i} out of range")
            mask |= 1 << i
        return cls(upset=mask, n=n)

    def sign(self, i: int) -> int:
        return 1 if (self.upset >> i) & 1 else -1

    def signs(self) -> tuple[int, ...]:
        return tuple(self.sign(i) for i in range(self.n))

    def up_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if (self.upset >> i) & 1)

    def complement(self) -> "Configuration":
        return Configuration(upset=self.upset ^ ((1 << self.n) - 1), n=self.n)


@dataclass(frozen=True)
class CouplingForm:
    """Pairwise expansion of the squared sum: constant + sum J_ij S_i S_j.

    constant = sum q_i^2 and J_ij = 2 q_i q_j for i < j, so that for every
    sign assignment the form reproduces (sum q_i S_i)^2 exactly.
    """

    n: int
    constant: int
    couplings: tuple[tuple[int, int, int], ...]  # (i, j, J_ij), i < j, ascending


@dataclass(frozen=True)
class Spectrum:
    """Exact multiset of energies: (energy, degeneracy) pairs, ascending."""

    items: tuple[tuple[int, int], ...]
    n: int
    total: int

    def __post_init__(self):
        if self.total != 1 << self.n:
            raise ValueError("total must equal 2^n")
        mass = 0
        prev = -1
        for e, g in self.items:
            if e <= prev:
                raise ValueError("energies must be strictly ascending")
            if g <= 0 or g % 2 != 0:
                raise ValueError("degeneracies must be positive and even")
            prev = e
            mass += g
        if mass != self.total:
            raise ValueError("degeneracies must sum to 2^n")

    @classmethod
    def from_counts(cls, counts: dict, n: int) -> "Spectrum":
        items = tuple(sorted(counts.items()))
        return cls(items=items, n=n, total=1 << n)

    @cached_property
    def entries(self) -> dict:
        """Energy -> degeneracy mapping (a fresh view of ``items``)."""
        return dict(self.items)

    @property
    def min_energy(self) -> int:
        return self.items[0][0]

    @property
    def max_energy(self) -> int:
        return self.items[-1][0]


def _check_dims(inst: Instance, cfg: Configuration) -> None:
    if cfg.n != inst.n:
        raise ValueError(f"configuration has {cfg.n} spins, instance has {inst.n}")


def energy(inst: Instance, cfg: Configuration) -> int:
    """Squared discrepancy of a configuration, exact."""
    _check_dims(inst, cfg)
    up = 0
    mask = cfg.upset
    while mask:
        low = mask & -mask
        up += inst.weights[low.bit_length() - 1]
        mask ^= low
    d = 2 * up - inst.total
    return d * d


def expand_couplings(inst: Instance) -> CouplingForm:
    """Expand the squared sum into its constant and pair couplings."""
    ws = inst.weights
    constant = sum(q * q for q in ws)
    couplings = tuple(
        (i, j, 2 * ws[i] * ws[j]) for i in range(inst.n) for j in range(i + 1, inst.n)
    )
    return CouplingForm(n=inst.n, constant=constant, couplings=couplings)


def coupling_energy(form: CouplingForm, cfg: Configuration) -> int:
    """Evaluate the pairwise form term by term (exact integers)."""
    if cfg.n != form.n:
        raise ValueError(f"configuration has {cfg.n} spins, coupling form has {form.n}")
    acc = form.constant
    up = cfg.upset
    for i, j, coupling in form.couplings:
        same = ((up >> i) ^ (up >> j)) & 1 == 0
        acc += coupling if same else -coupling
    return acc


def residual(inst: Instance, candidate_energy: int, cfg: Configuration) -> int:
    """|E(cfg) - candidate|; zero certifies cfg lies in that eigenspace."""
    return abs(energy(inst, cfg) - candidate_energy)


def _numpy_ok(inst: Instance) -> bool:
    return inst.total < _INT64_SAFE_TOTAL


def _canonical_blocks(inst: Instance):
    """Yield (offset, |2s - total| int64 array) over canonical configurations.

    Canonical index j (0 <= j < 2^(n-1)) maps to upset mask 1 | (j << 1):
    spin 0 up, bit t of j driving spin t+1. Blocks arrive in ascending j.
    """
    ws = inst.weights
    n = inst.n
    total = inst.total
    m = min(n - 1, _BLOCK_BITS)
    low = np.zeros(1 << m, dtype=np.int64)
    for t in range(m):
        size = 1 << t
        low[size : 2 * size] = low[:size] + ws[t + 1]
    high_ws = ws[m + 1 :]
    for h in range(1 << (n - 1 - m)):
        base = ws[0]
        hh = h
        t = 0
        while hh:
            if hh & 1:
                base += high_ws[t]
            hh >>= 1
            t += 1
        d = (low + base) * 2 - total
        np.abs(d, out=d)
        yield h << m, d


def _canonical_abs_python(inst: Instance):
    """Pure-integer fallback for weights too large for int64 sums."""
    ws = inst.weights
    total = inst.total
    for j in range(1 << (inst.n - 1)):
        s = ws[0]
        jj = j
        t = 1
        while jj:
            if jj & 1:
                s += ws[t]
            jj >>= 1
            t += 1
        yield j, abs(2 * s - total)


def _check_cap(inst: Instance, cap: int, what: str) -> None:
    if inst.n > cap:
        raise CapacityError(
            f"{what} enumerates 2^(n-1) configurations; n = {inst.n} exceeds the "
            f"cap of {cap}. Use the solvers module for optima at this size."
        )


def spectrum(inst: Instance, cap: int = DEFAULT_ENUM_CAP) -> Spectrum:
    """Exact energy -> degeneracy map over all 2^n configurations."""
    _check_cap(inst, cap, "spectrum")
    counts: dict[int, int] = {}
    if _numpy_ok(inst):
        for _, dabs in _canonical_blocks(inst):
            vals, cnt = np.unique(dabs, return_counts=True)
            for v, c in zip(vals.tolist(), cnt.tolist()):
                counts[v] = counts.get(v, 0) + c
    else:
        for _, dabs in _canonical_abs_python(inst):
            counts[dabs] = counts.get(dabs, 0) + 1
    # Each canonical configuration stands for itself and its global flip.
    entries = {d * d: 2 * c for d, c in counts.items()}
    return Spectrum.from_counts(entries, inst.n)


def ground_eigenspace(
    inst: Instance, cap: int = DEFAULT_ENUM_CAP
) -> tuple[int, list[Configuration]]:
    """Minimum energy and every configuration attaining it, ascending by mask."""
    _check_cap(inst, cap, "ground eigenspace")
    best: int | None = None
    masks: list[int] = []
    if _numpy_ok(inst):
        for off, dabs in _canonical_blocks(inst):
            block_min = int(dabs.min())
            if best is None or block_min < best:
                best = block_min
                masks.clear()
            if block_min == best:
                js = np.nonzero(dabs == block_min)[0]
                masks.extend(1 | ((off + int(j)) << 1) for j in js)
    else:
        for j, dabs in _canonical_abs_python(inst):
            if best is None or dabs < best:
                best = dabs
                masks.clear()
            if dabs == best:
                masks.append(1 | (j << 1))
    full = (1 << inst.n) - 1
    masks.extend(m ^ full for m in list(masks))
    masks.sort()
    return best * best, [Configuration(upset=m, n=inst.n) for m in masks]
