"""Integer sets as deterministic bit streams with exact partial densities.

A SetStream is a total 0/1 characteristic function on an initial segment
[0, horizon) of the naturals.  Densities are exact fractions; indices are
arbitrary-precision, so factorial and power-sized horizons are fine.
"""

from __future__ import annotations

import threading
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .errors import HorizonError, InsufficientElementsError

# Seeded streams draw from a splitmix-style 64-bit mixer: output i is
# mix(seed + (i+1)*GAMMA), so any index is evaluable in O(1) and outputs
# are reproducible bit-for-bit across platforms.
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MIX_MUL_1 = 0xBF58476D1CE4E5B9
_MIX_MUL_2 = 0x94D049BB133111EB
_U64 = (1 << 64) - 1


def splitmix64(seed: int, index: int) -> int:
    """The index-th 64-bit output of the documented splitmix-style mixer."""
    z = (seed + (index + 1) * SPLITMIX_GAMMA) & _U64
    z = ((z ^ (z >> 30)) * _MIX_MUL_1) & _U64
    z = ((z ^ (z >> 27)) * _MIX_MUL_2) & _U64
    return z ^ (z >> 31)


class _Backend:
    """Bit source; subclasses may provide faster counting and selection."""

    def bit(self, index: int) -> int:
        raise NotImplementedError

    def count_below(self, n: int) -> int:
        return sum(self.bit(i) for i in range(n))

    def kth_one(self, k: int, bound: int) -> Optional[int]:
        found = 0
        for i in range(bound):
            if self.bit(i):
                if found == k:
                    return i
                found += 1
        return None


class _ClosedForm(_Backend):
    def __init__(self, bit_fn, count_fn, kth_fn):
        self._bit = bit_fn
        self._count = count_fn
        self._kth = kth_fn

    def bit(self, index):
        return self._bit(index)

    def count_below(self, n):
        return self._count(n)

    def kth_one(self, k, bound):
        pos = self._kth(k)
        return pos if pos is not None and pos < bound else None


class _Members(_Backend):
    def __init__(self, members: Sequence[int]):
        self._members = members  # sorted, deduplicated

    def bit(self, index):
        pos = bisect_left(self._members, index)
        return 1 if pos < len(self._members) and self._members[pos] == index else 0

    def count_below(self, n):
        return bisect_left(self._members, n)

    def kth_one(self, k, bound):
        if k < len(self._members) and self._members[k] < bound:
            return self._members[k]
        return None


class _Buffered(_Backend):
    """Dense 0/1 byte buffer, filled on demand under a lock."""

    def __init__(self, initial: bytearray = None):
        self._buf = initial if initial is not None else bytearray()
        self._lock = threading.Lock()

    def _fill(self, upto: int) -> None:
        raise NotImplementedError

    def _ensure(self, upto: int) -> None:
        if len(self._buf) >= upto:
            return
        with self._lock:
            if len(self._buf) < upto:
                self._fill(max(upto, 2 * len(self._buf), 1024))

    def bit(self, index):
        self._ensure(index + 1)
        return self._buf[index]

    def count_below(self, n):
        self._ensure(n)
        return self._buf.count(1, 0, n)

    def kth_one(self, k, bound):
        self._ensure(bound)
        pos = -1
        for _ in range(k + 1):
            pos = self._buf.find(1, pos + 1, bound)
            if pos < 0:
                return None
        return pos


class _SeededBits(_Buffered):
    def __init__(self, seed: int, num: int, den: int):
        super().__init__()
        self._seed = seed
        self._num = num
        self._den = den

    def _fill(self, upto):
        seed, num, den = self._seed, self._num, self._den
        start = len(self._buf)
        self._buf.extend(
            1 if splitmix64(seed, i) % den < num else 0 for i in range(start, upto)
        )


class _FixedBits(_Buffered):
    def _fill(self, upto):
        raise HorizonError(f"only {len(self._buf)} bits available")


class _Memoized(_Backend):
    """Arbitrary membership rule with synchronized first-write-wins memo."""

    def __init__(self, fn: Callable[[int], int]):
        self._fn = fn
        self._memo: dict[int, int] = {}
        self._lock = threading.Lock()

    def bit(self, index):
        memo = self._memo
        cached = memo.get(index)
        if cached is not None:
            return cached
        value = 1 if self._fn(index) else 0
        with self._lock:
            return memo.setdefault(index, value)


class _Complement(_Backend):
    def __init__(self, inner: _Backend):
        self._inner = inner

    def bit(self, index):
        return 1 - self._inner.bit(index)

    def count_below(self, n):
        return n - self._inner.count_below(n)


class SetStream:
    """A deterministic total characteristic function on [0, horizon).

    Repeated queries at the same index return the same bit; queries at or
    above the horizon raise HorizonError.  Streams are safe for concurrent
    reads: memoizing backends synchronize their writes internally.
    """

    __slots__ = ("_backend", "_horizon", "_label")

    def __init__(self, backend: _Backend, horizon: int, label: str):
        if horizon < 0:
            raise ValueError("horizon must be a natural number")
        self._backend = backend
        self._horizon = horizon
        self._label = label

    @property
    def horizon(self) -> int:
        return self._horizon

    @property
    def label(self) -> str:
        return self._label

    def __repr__(self):
        return f"SetStream({self._label!r}, horizon={self._horizon})"

    def bit(self, index: int) -> int:
        if index < 0 or index >= self._horizon:
            raise HorizonError(
                f"index {index} outside evaluation horizon [0, {self._horizon})"
            )
        return self._backend.bit(index)

    def contains(self, index: int) -> bool:
        return self.bit(index) == 1

    def count_below(self, n: int) -> int:
        """Number of members strictly below n (n must be within horizon)."""
        if n < 0 or n > self._horizon:
            raise HorizonError(f"count bound {n} outside [0, {self._horizon}]")
        return self._backend.count_below(n)

    def prefix(self, n: int) -> str:
        """The first n bits as a binary string."""
        if n < 0 or n > self._horizon:
            raise HorizonError(f"prefix length {n} outside [0, {self._horizon}]")
        return "".join("1" if self._backend.bit(i) else "0" for i in range(n))

    def members_below(self, n: int) -> list[int]:
        if n < 0 or n > self._horizon:
            raise HorizonError(f"bound {n} outside [0, {self._horizon}]")
        return [i for i in range(n) if self._backend.bit(i)]

    def complement(self) -> "SetStream":
        return SetStream(_Complement(self._backend), self._horizon, f"~({self._label})")

    @classmethod
    def from_function(cls, fn: Callable[[int], int], horizon: int, label: str) -> "SetStream":
        """Stream backed by an arbitrary (deterministic) membership rule."""
        return cls(_Memoized(fn), horizon, label)

    @classmethod
    def from_members(
        cls, members: Iterable[int], horizon: int, label: str = None
    ) -> "SetStream":
        ordered = sorted(set(members))
        if ordered and ordered[0] < 0:
            raise ValueError("members must be naturals")
        if label is None:
            label = "list:" + ",".join(map(str, ordered))
        return cls(_Members(ordered), horizon, label)

    @classmethod
    def from_spec(cls, spec: str, horizon: int = None) -> "SetStream":
        """Build a stream from the specification mini-DSL.

        Grammar:
            empty | full | evens | odds
            seed:<u64>[:p=<num>/<den>]
            file:<path>
            list:<n1,n2,...>

        `file` streams default their horizon to the number of bits in the
        file (a hard cap); `list` streams default to max member + 1 but
        accept any horizon, being total.  All other forms require an
        explicit horizon.
        """
        backend, label, default_horizon, cap = _parse_spec(spec)
        if horizon is None:
            horizon = default_horizon
        if horizon is None:
            raise ValueError(f"stream spec {spec!r} requires an explicit horizon")
        if cap is not None and horizon > cap:
            raise ValueError(
                f"horizon {horizon} exceeds the {cap} bits provided by {spec!r}"
            )
        return cls(backend, horizon, label)


def _parse_spec(spec: str):
    if spec == "empty":
        return _ClosedForm(lambda i: 0, lambda n: 0, lambda k: None), spec, None, None
    if spec == "full":
        return _ClosedForm(lambda i: 1, lambda n: n, lambda k: k), spec, None, None
    if spec == "evens":
        return _ClosedForm(lambda i: 1 - (i & 1), lambda n: (n + 1) // 2, lambda k: 2 * k), spec, None, None
    if spec == "odds":
        return _ClosedForm(lambda i: i & 1, lambda n: n // 2, lambda k: 2 * k + 1), spec, None, None
    if spec.startswith("seed:"):
        parts = spec.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad seed spec {spec!r}")
        try:
            seed = int(parts[1])
        except ValueError:
            raise ValueError(f"bad seed value in {spec!r}") from None
        if not 0 <= seed <= _U64:
            raise ValueError("seed must fit in 64 bits")
        num, den = 1, 2
        if len(parts) == 3:
            if not parts[2].startswith("p="):
                raise ValueError(f"bad probability clause in {spec!r}")
            try:
                num_s, den_s = parts[2][2:].split("/")
                num, den = int(num_s), int(den_s)
            except ValueError:
                raise ValueError(f"bad probability clause in {spec!r}") from None
            if den < 1 or not 0 <= num <= den:
                raise ValueError("probability must satisfy 0 <= num/den <= 1")
        return _SeededBits(seed, num, den), spec, None, None
    if spec.startswith("file:"):
        path = spec[5:]
        with open(path, "r", encoding="ascii") as fh:
            text = fh.read()
        chars = [c for c in text if not c.isspace()]
        if any(c not in "01" for c in chars):
            raise ValueError(f"{path} must contain only 0/1 characters and whitespace")
        bits = bytearray(1 if c == "1" else 0 for c in chars)
        return _FixedBits(bits), spec, len(bits), len(bits)
    if spec.startswith("list:"):
        body = spec[5:]
        try:
            members = sorted({int(tok) for tok in body.split(",") if tok != ""})
        except ValueError:
            raise ValueError(f"bad member list in {spec!r}") from None
        if members and members[0] < 0:
            raise ValueError("list members must be naturals")
        return _Members(members), spec, (members[-1] + 1 if members else 1), None
    raise ValueError(f"unknown stream spec {spec!r}")


@dataclass(frozen=True)
class DensityProfile:
    """Exact partial densities at chosen checkpoints plus observed sup/inf."""

    checkpoints: tuple[int, ...]
    values: tuple[Fraction, ...]
    observed_sup: Fraction
    observed_inf: Fraction

    def __post_init__(self):
        if len(self.checkpoints) != len(self.values) or not self.checkpoints:
            raise ValueError("profile needs one value per checkpoint, at least one")
        if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
            raise ValueError("checkpoints must be strictly increasing")
        for n, v in zip(self.checkpoints, self.values):
            if not 0 <= v <= 1 or (v * n).denominator != 1:
                raise ValueError(f"value {v} at checkpoint {n} is not a valid density")
        if self.observed_inf > self.observed_sup:
            raise ValueError("observed_inf exceeds observed_sup")
        if self.observed_sup not in self.values or self.observed_inf not in self.values:
            raise ValueError("observed sup/inf must be attained by listed values")


def partial_density(stream: SetStream, n: int) -> Fraction:
    """|S restricted to [0, n)| / n as an exact fraction in lowest terms."""
    if n < 1 or n > stream.horizon:
        raise HorizonError(f"density checkpoint {n} outside [1, {stream.horizon}]")
    return Fraction(stream.count_below(n), n)


def density_profile(stream: SetStream, checkpoints: Sequence[int]) -> DensityProfile:
    """Partial densities at each checkpoint with their max and min."""
    if not checkpoints:
        raise ValueError("checkpoint list must be nonempty")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    values = tuple(partial_density(stream, n) for n in checkpoints)
    return DensityProfile(
        checkpoints=tuple(checkpoints),
        values=values,
        observed_sup=max(values),
        observed_inf=min(values),
    )


def principal_function(stream: SetStream, k: int) -> int:
    """The k-th member of the set in increasing order, 0-indexed."""
    if k < 0:
        raise ValueError("element index must be a natural number")
    pos = stream._backend.kth_one(k, stream.horizon)
    if pos is None:
        raise InsufficientElementsError(
            f"{stream.label} holds fewer than {k + 1} elements below {stream.horizon}"
        )
    return pos
