"""Shared helpers: independent brute-force oracles used to freeze expected values.

The oracles deliberately avoid library code paths: plain sign enumeration
with Python integers, so library results are checked against a second,
trivially-auditable route.
"""

from __future__ import annotations

import itertools
from collections import Counter

from spinpart import Instance


def make_instance(*weights: int, seed: int | None = None) -> Instance:
    bits = max(w.bit_length() for w in weights)
    return Instance(n=len(weights), weights=tuple(weights), bits=bits, seed=seed)


def oracle_discrepancies(weights) -> list[int]:
    """|signed sum| over all 2^n sign assignments."""
    out = []
    for signs in itertools.product((1, -1), repeat=len(weights)):
        out.append(abs(sum(w * s for w, s in zip(weights, signs))))
    return out


def oracle_min_discrepancy(weights) -> int:
    return min(oracle_discrepancies(weights))


def oracle_spectrum(weights) -> dict[int, int]:
    counts = Counter(d * d for d in oracle_discrepancies(weights))
    return dict(counts)


def oracle_ground_masks(weights) -> list[int]:
    """All up-set masks attaining the minimum energy, ascending."""
    n = len(weights)
    total = sum(weights)
    best = None
    masks: list[int] = []
    for mask in range(1 << n):
        up = sum(weights[i] for i in range(n) if (mask >> i) & 1)
        d = abs(2 * up - total)
        if best is None or d < best:
            best = d
            masks = [mask]
        elif d == best:
            masks.append(mask)
    return masks
