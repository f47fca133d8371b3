"""Total injections and permutations as evaluable programs.

A Sampler evaluates a total function on [0, domain_bound) (or on all of
the naturals when unbounded) and checks injectivity incrementally: every
evaluation is logged, and a repeated value is a hard error because it
proves the program is not a valid sampler.
"""

from __future__ import annotations

import csv
import threading
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import DomainError, HorizonError, InjectivityError
from .streams import SetStream, partial_density


class Sampler:
    """A total injection or permutation with an injectivity log."""

    __slots__ = ("kind", "label", "domain_bound", "_raw", "_seen", "_lock", "_table")

    def __init__(
        self,
        raw: Callable[[int], int],
        kind: str,
        label: str,
        domain_bound: Optional[int] = None,
        table: Optional[tuple[int, ...]] = None,
    ):
        if kind not in ("injection", "permutation"):
            raise ValueError(f"kind must be injection or permutation, got {kind!r}")
        self.kind = kind
        self.label = label
        self.domain_bound = domain_bound
        self._raw = raw
        self._table = table
        self._seen: dict[int, int] = {}
        self._lock = threading.Lock()

    def __repr__(self):
        bound = "unbounded" if self.domain_bound is None else self.domain_bound
        return f"Sampler({self.label!r}, {self.kind}, domain={bound})"

    def __call__(self, x: int) -> int:
        return eval_sampler(self, x)

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls) -> "Sampler":
        return cls(lambda x: x, "permutation", "identity")

    @classmethod
    def double(cls) -> "Sampler":
        return cls(lambda x: 2 * x, "injection", "double")

    @classmethod
    def shift(cls, k: int) -> "Sampler":
        if k < 0:
            raise ValueError("shift amount must be a natural number")
        return cls(lambda x: x + k, "injection", f"shift:{k}")

    @classmethod
    def swapblocks(cls, k: int) -> "Sampler":
        """Swap [0, k) with [k, 2k), identity elsewhere."""
        if k < 1:
            raise ValueError("block size must be >= 1")

        def raw(x: int) -> int:
            if x < k:
                return x + k
            if x < 2 * k:
                return x - k
            return x

        return cls(raw, "permutation", f"swapblocks:{k}")

    @classmethod
    def from_table(
        cls,
        values: Sequence[int],
        kind: str = None,
        domain_bound: int = None,
        label: str = None,
    ) -> "Sampler":
        """Finite-table sampler; tables are validated eagerly.

        With domain_bound beyond the table length the sampler continues as
        the identity, which requires the table to map [0, len) onto itself.
        """
        table = tuple(values)
        if any(v < 0 for v in table):
            raise ValueError("table values must be naturals")
        if len(set(table)) != len(table):
            dup = next(v for i, v in enumerate(table) if v in table[:i])
            raise InjectivityError(f"table repeats value {dup}")
        is_perm = sorted(table) == list(range(len(table)))
        if kind is None:
            kind = "permutation" if is_perm else "injection"
        if kind == "permutation" and not is_perm:
            raise ValueError("table is not a bijection of [0, len(table))")
        if domain_bound is None:
            domain_bound = len(table)
        if domain_bound < len(table):
            raise ValueError("domain_bound smaller than the table")
        if domain_bound > len(table) and not is_perm:
            raise ValueError("identity extension needs a permutation of [0, len(table))")

        def raw(x: int) -> int:
            return table[x] if x < len(table) else x

        if label is None:
            label = f"table[{len(table)}]"
        return cls(raw, kind, label, domain_bound, table)

    @classmethod
    def from_function(
        cls,
        fn: Callable[[int], int],
        kind: str,
        domain_bound: int = None,
        label: str = "custom",
    ) -> "Sampler":
        return cls(fn, kind, label, domain_bound)

    # -- permutation inversion ----------------------------------------

    def inverse(self) -> "Sampler":
        """The inverse permutation; only permutations are invertible."""
        if self.kind != "permutation":
            raise ValueError(f"{self.label} is not a permutation")
        if self._table is not None:
            inv = [0] * len(self._table)
            for i, v in enumerate(self._table):
                inv[v] = i
            return Sampler.from_table(
                inv, "permutation", self.domain_bound, f"inv({self.label})"
            )
        if self.label == "identity" or self.label.startswith("swapblocks:"):
            return self  # self-inverse builtins
        raise ValueError(f"no inverse available for {self.label}")


def parse_sampler(spec: str) -> Sampler:
    """Build a sampler from the mini-DSL.

    Grammar: identity | double | shift:<k> | table:<csv-path> | swapblocks:<k>.
    Table files hold one `j,value` row per input, with j ascending from 0.
    """
    if spec == "identity":
        return Sampler.identity()
    if spec == "double":
        return Sampler.double()
    if spec.startswith("shift:"):
        return Sampler.shift(_parse_int(spec[6:], spec))
    if spec.startswith("swapblocks:"):
        return Sampler.swapblocks(_parse_int(spec[11:], spec))
    if spec.startswith("table:"):
        path = spec[6:]
        values = load_table_csv(path)
        return Sampler.from_table(values, label=spec)
    raise ValueError(f"unknown sampler spec {spec!r}")


def _parse_int(text: str, spec: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"bad integer in sampler spec {spec!r}") from None


def load_table_csv(path) -> list[int]:
    """Read a `j,value` CSV (no header); rows must cover 0..len-1 in order."""
    values = []
    with open(path, newline="") as fh:
        for row_no, row in enumerate(csv.reader(fh)):
            if not row:
                continue
            if len(row) != 2 or int(row[0]) != row_no:
                raise ValueError(f"{path}: row {row_no} must be `{row_no},<value>`")
            values.append(int(row[1]))
    return values


def eval_sampler(sampler: Sampler, x: int) -> int:
    """Evaluate the sampler, logging the value for injectivity checking."""
    if x < 0:
        raise DomainError(f"sampler input {x} is not a natural number")
    bound = sampler.domain_bound
    if bound is not None and x >= bound:
        raise DomainError(f"input {x} outside sampler domain [0, {bound})")
    value = sampler._raw(x)
    with sampler._lock:
        prev = sampler._seen.setdefault(value, x)
    if prev != x:
        raise InjectivityError(
            f"{sampler.label} maps both {prev} and {x} to {value}"
        )
    return value


def image_interval(sampler: Sampler, n: int) -> set[int]:
    """The image of [0, n); always has exactly n elements for a valid sampler."""
    if sampler.domain_bound is not None and n > sampler.domain_bound:
        raise DomainError(
            f"interval length {n} exceeds domain bound {sampler.domain_bound}"
        )
    return {eval_sampler(sampler, j) for j in range(n)}


def preimage_partial_density(stream: SetStream, sampler: Sampler, n: int) -> Fraction:
    """|{j < n : sampler(j) in S}| / n, exactly."""
    if n < 1:
        raise HorizonError("preimage density needs a checkpoint n >= 1")
    if sampler.domain_bound is not None and n > sampler.domain_bound:
        raise DomainError(
            f"checkpoint {n} exceeds domain bound {sampler.domain_bound}"
        )
    hits = sum(stream.bit(eval_sampler(sampler, j)) for j in range(n))
    return Fraction(hits, n)


def image_stream(stream: SetStream, permutation: Sampler) -> SetStream:
    """The image of the set under a permutation, as a stream.

    Membership of i is decided through the inverse permutation, so i is
    evaluable whenever the inverse value lies below the source horizon.
    """
    inv = permutation.inverse()
    return SetStream.from_function(
        lambda i: stream.bit(eval_sampler(inv, i)),
        stream.horizon,
        f"{permutation.label}({stream.label})",
    )
