"""Problem instances: positive integer weights under a declared bit bound.

An instance is a sequence of n positive integers q_1..q_n, each at most
2**bits - 1, plus the generator seed (if any) kept for provenance. Weights
are plain Python integers, so any magnitude is exact; ``bits`` records the
declared bound rather than the actual widths.

Random instances are drawn with SplitMix64 (Steele/Lea/Vigna, the generator
behind Java's SplittableRandom). The sampling rule is fixed and covered by
golden tests, so seeded instances are bit-identical across platforms:

    state <- (state + 0x9E3779B97F4A7C15) mod 2**64
    out   <- mix64(state)          # xor-shift/multiply finalizer

A weight consumes ceil(bits/64) consecutive outputs, concatenated with the
earlier output in the high bits; the low ``bits`` bits are kept, and the
draw is repeated while the value is zero. Each weight is therefore uniform
on [1, 2**bits - 1].

Instance text format (UTF-8, LF line endings):

    npp v1 n=<N> bits=<b> seed=<s|none>
    <one decimal weight per line, N lines>
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanche a 64-bit value."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class _SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def next_bits(self, k: int) -> int:
        v = 0
        for _ in range((k + 63) // 64):
            v = (v << 64) | self.next64()
        return v & ((1 << k) - 1)


def derive_seed(master: int, *parts: int) -> int:
    """Deterministically derive a 64-bit sub-seed from a master seed.

    Used to give every (n, bits, trial) cell of an experiment its own
    reproducible stream regardless of execution order.
    """
    x = master & _MASK64
    for p in parts:
        x = _mix64(x ^ _mix64(p & _MASK64))
    return x


@dataclass(frozen=True)
class Instance:
    """Weights q_1..q_n with their declared magnitude bound.

    Index i (0-based here) identifies spin i; order is significant.
    Instances are immutable and safe to share across threads or processes.
    """

    n: int
    weights: tuple[int, ...]
    bits: int
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.bits < 1:
            raise ValueError("bits must be >= 1")
        if len(self.weights) != self.n:
            raise ValueError(f"expected {self.n} weights, got {len(self.weights)}")
        bound = (1 << self.bits) - 1
        for i, q in enumerate(self.weights):
            if q < 1:
                raise ValueError(f"weight {i + 1} must be positive")
            if q > bound:
                raise ValueError(f"weight {i + 1} exceeds 2^bits - 1 = {bound}")
        if self.seed is not None and not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def total(self) -> int:
        return sum(self.weights)

    @property
    def max_weight(self) -> int:
        return max(self.weights)


@dataclass(frozen=True)
class NormalizedInstance:
    """Weights divided by the maximal weight: scale plus ratios in (0, 1]."""

    scale: int
    ratios: tuple[float, ...]


def generate(n: int, bits: int, seed: int) -> Instance:
    """Draw n weights uniformly and independently from [1, 2**bits - 1].

    Pure function of (n, bits, seed): identical arguments give identical
    weights on every platform (see module docstring for the exact rule).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if bits < 1:
        raise ValueError("bits must be >= 1")
    if not 0 <= seed <= _MASK64:
        raise ValueError("seed must fit in 64 bits")
    rng = _SplitMix64(seed)
    weights = []
    for _ in range(n):
        v = rng.next_bits(bits)
        while v == 0:
            v = rng.next_bits(bits)
        weights.append(v)
    return Instance(n=n, weights=tuple(weights), bits=bits, seed=seed)


def normalize(inst: Instance) -> NormalizedInstance:
    """Divide every weight by the maximal one (nearest-representable floats)."""
    scale = inst.max_weight
    return NormalizedInstance(scale=scale, ratios=tuple(q / scale for q in inst.weights))


_HEADER_RE = re.compile(r"^npp v1 n=(\d+) bits=(\d+) seed=(none|\d+)$")


def serialize(inst: Instance) -> str:
    """Render an instance in the text format (round-trips through parse)."""
    seed = "none" if inst.seed is None else str(inst.seed)
    lines = [f"npp v1 n={inst.n} bits={inst.bits} seed={seed}"]
    lines.extend(str(q) for q in inst.weights)
    return "\n".join(lines) + "\n"


def parse(text: str) -> Instance:
    """Parse the text format; raises ParseError naming the offending line."""
    lines = text.splitlines()
    if not lines:
        raise ParseError(1, "empty input, expected 'npp v1 ...' header")
    m = _HEADER_RE.match(lines[0])
    if m is None:
        raise ParseError(1, f"malformed header {lines[0]!r}")
    n, bits = int(m.group(1)), int(m.group(2))
    seed = None if m.group(3) == "none" else int(m.group(3))
    if n < 1:
        raise ParseError(1, "n must be >= 1")
    if bits < 1:
        raise ParseError(1, "bits must be >= 1")

    body = lines[1:]
    while body and body[-1] == "":
        body.pop()
    if len(body) != n:
        raise ParseError(len(lines), f"expected {n} weights, found {len(body)}")
    bound = (1 << bits) - 1
    weights = []
    for k, raw in enumerate(body):
        line_no = k + 2
        try:
            q = int(raw)
        except ValueError:
            raise ParseError(line_no, f"not a decimal integer: {raw!r}") from None
        if q < 1:
            raise ParseError(line_no, "weight must be positive")
        if q > bound:
            raise ParseError(line_no, f"weight exceeds 2^bits - 1 = {bound}")
        weights.append(q)
    return Instance(n=n, weights=tuple(weights), bits=bits, seed=seed)


def load(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def save(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(inst))
