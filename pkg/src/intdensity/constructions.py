"""The three headline constructions.

* prefix sets: the set of codes of a stream's finite prefixes, which is
  recoverable from any consistent batch of its members (introreduction)
  and decodable from a dense sampling through a bounded-width tree;
* the guess-driven injection: a total injection assembled block by block
  from guessed prefix strings, which samples the target set with density
  at least 1 - 1/n at checkpoint n! whenever the guess for block n is true;
* graph sets and trace extraction: the graph of a function as a set of
  pair codes, plus the adversary that reads a sampler's image back into
  small candidate sets for the function's values.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from math import factorial
from typing import Mapping, Sequence

from .codes import cantor_pair, cantor_unpair, string_code, string_decode
from .errors import InsufficientElementsError, PrefixInconsistencyError
from .samplers import Sampler, eval_sampler, image_interval
from .streams import SetStream, principal_function

# Materializing a full binary tree above this height is never desk-scale.
_MAX_FULL_HEIGHT = 24


def prefix_set(stream: SetStream) -> SetStream:
    """The set of length-lex codes of the stream's prefixes, as a stream.

    Membership of a code decodes it to a string and compares against the
    source bits, so the result is evaluable for every code whose decoded
    length fits below the source horizon; its horizon is set accordingly.
    Queries needing deeper bits raise HorizonError.
    """

    def member(code: int) -> int:
        sigma = string_decode(code)
        return int(all(stream.bit(i) == int(c) for i, c in enumerate(sigma)))

    horizon = (1 << (stream.horizon + 1)) - 1
    return SetStream.from_function(member, horizon, f"prefixes({stream.label})")


def prefix_code_sampler(stream: SetStream, domain_bound: int) -> Sampler:
    """The injection k -> code of the stream's length-k prefix."""
    return Sampler.from_function(
        lambda k: string_code(stream.prefix(k)),
        "injection",
        domain_bound,
        f"prefix-codes({stream.label})",
    )


def introreduce(codes) -> str:
    """Merge a batch of prefix codes back into the bits they constrain.

    Every code is decoded to a string; position i of the result is defined
    iff some decoded string is longer than i, and all strings must agree
    wherever they overlap.  For members of one set's prefix set the result
    is that set's prefix of the maximal decoded length.
    """
    ordered = sorted(set(codes))
    if not ordered:
        raise ValueError("need at least one code")
    bits: list[str] = []
    sources: list[int] = []
    for code in ordered:
        sigma = string_decode(code)
        for i, c in enumerate(sigma):
            if i < len(bits):
                if bits[i] != c:
                    raise PrefixInconsistencyError(i, sources[i], code)
            else:
                bits.append(c)
                sources.append(code)
    return "".join(bits)


@dataclass(frozen=True)
class PrefixTree:
    """Levels of candidate prefixes kept by the dense-sampling decoder.

    Levels 0..full_height form the full binary tree; every deeper level
    holds at most 2q strings and is prefix-closed against its parent.
    """

    q: int
    full_height: int
    depth: int
    levels: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(self.levels) != self.depth + 1:
            raise ValueError("need one level per height 0..depth")
        for height, level in enumerate(self.levels):
            if height <= self.full_height:
                if len(level) != 1 << height:
                    raise ValueError(f"level {height} must be the full tree")
            elif len(level) > 2 * self.q:
                raise ValueError(f"level {height} wider than {2 * self.q}")
            if height and any(s[:-1] not in self.levels[height - 1] for s in level):
                raise ValueError(f"level {height} is not prefix-closed")

    def widths(self) -> list[int]:
        return [len(level) for level in self.levels]


def build_prefix_tree(sampler: Sampler, q: int, full_height: int, depth: int) -> PrefixTree:
    """Grow the candidate tree from a sampler's image.

    The tree is full up to full_height.  A string of length n above that
    survives iff its parent survived and the image of [0, 2qn) contains at
    least n codes of strings extending it (a string extends itself).
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if full_height < 0 or depth < 0:
        raise ValueError("heights must be naturals")
    if min(full_height, depth) > _MAX_FULL_HEIGHT:
        raise ValueError(f"full tree above height {_MAX_FULL_HEIGHT} is not materializable")

    levels = [[""]]
    for height in range(1, min(full_height, depth) + 1):
        levels.append([s + b for s in levels[-1] for b in "01"])

    decoded: list[str] = []
    for height in range(full_height + 1, depth + 1):
        while len(decoded) < 2 * q * height:
            decoded.append(string_decode(eval_sampler(sampler, len(decoded))))
        kept = []
        for parent in levels[height - 1]:
            for child in (parent + "0", parent + "1"):
                extensions = sum(1 for tau in decoded if tau.startswith(child))
                if extensions >= height:
                    kept.append(child)
        levels.append(kept)

    return PrefixTree(
        q=q,
        full_height=full_height,
        depth=depth,
        levels=tuple(tuple(level) for level in levels),
    )


def extract_candidates(tree: PrefixTree) -> list[str]:
    """The strings surviving at full depth; empty when the tree dies early.

    When the sampler's partial densities on the prefix set strictly exceed
    1/q at every checkpoint past full_height (up to 2q*depth), the sampled
    set's depth-long prefix is among the candidates, and there are at most
    2q of them.
    """
    return list(tree.levels[tree.depth])


# -- guess-driven injection -----------------------------------------------


def block_of(j: int) -> int:
    """The block index n with j in I_n, where I_1 = [0,1) and I_n = [(n-1)!, n!)."""
    if j < 0:
        raise ValueError("j must be a natural number")
    n = 1
    while j >= factorial(n):
        n += 1
    return n


def wct_target(stream: SetStream, n: int) -> str:
    """The true guess for block n: the stream's bits below its n!-th element.

    The returned string contains exactly n! ones, the positions of the
    set's first n! members.
    """
    if n < 1:
        raise ValueError("block index must be >= 1")
    try:
        cutoff = principal_function(stream, factorial(n))
    except InsufficientElementsError:
        raise InsufficientElementsError(
            f"{stream.label} holds fewer than {factorial(n)} + 1 elements below "
            f"{stream.horizon}"
        ) from None
    return stream.prefix(cutoff)


@dataclass(frozen=True)
class WctInjection:
    """A total injection on [0, max_n!) assembled from per-block guesses."""

    max_n: int
    table: tuple[int, ...]
    guesses: Mapping[int, str]

    def __post_init__(self):
        if len(self.table) != factorial(self.max_n):
            raise ValueError("table must cover [0, max_n!)")
        if len(set(self.table)) != len(self.table):
            raise ValueError("table is not injective")

    def as_sampler(self) -> Sampler:
        return Sampler.from_table(
            self.table, "injection", label=f"wct-injection[{self.max_n}]"
        )

    def to_csv_text(self) -> str:
        out = io.StringIO()
        for j, value in enumerate(self.table):
            out.write(f"{j},{value}\n")
        return out.getvalue()


def build_wct_injection(guesses: Mapping[int, str], max_n: int) -> WctInjection:
    """Assemble the injection from guesses for blocks 1..max_n.

    Inputs are processed in increasing order.  For j in block n, the
    preferred value is the position of the j-th one (0-indexed, j global)
    in the guess for block n; when that one does not exist or its position
    was already used, the least value not yet assigned is taken instead,
    so the result is total and injective regardless of the guesses.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    one_positions: dict[int, list[int]] = {}
    for n in range(1, max_n + 1):
        guess = guesses[n]
        if any(c not in "01" for c in guess):
            raise ValueError(f"guess for block {n} is not a bit string")
        one_positions[n] = [i for i, c in enumerate(guess) if c == "1"]

    table: list[int] = []
    assigned: set[int] = set()
    next_free = 0
    for n in range(1, max_n + 1):
        ones = one_positions[n]
        for j in range(factorial(n - 1) if n > 1 else 0, factorial(n)):
            if j < len(ones) and ones[j] not in assigned:
                value = ones[j]
            else:
                while next_free in assigned:
                    next_free += 1
                value = next_free
            assigned.add(value)
            table.append(value)

    return WctInjection(
        max_n=max_n, table=tuple(table), guesses=dict(guesses)
    )


def load_guess_lines(lines) -> dict[int, str]:
    """Parse a guess map from `n:<bitstring>` lines (blank lines ignored)."""
    guesses: dict[int, str] = {}
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        left, _, right = line.partition(":")
        n = int(left)
        if n < 1 or any(c not in "01" for c in right):
            raise ValueError(f"bad guess line {line!r}")
        guesses[n] = right
    return guesses


def format_guess_lines(guesses: Mapping[int, str]) -> str:
    return "".join(f"{n}:{guesses[n]}\n" for n in sorted(guesses))


# -- graph sets and the trace adversary ------------------------------------


def graph_members(values: Sequence[int], horizon: int) -> frozenset[int]:
    """The pair codes of the function's graph on [0, horizon)."""
    if horizon < 0 or horizon > len(values):
        raise ValueError("function table does not cover [0, horizon)")
    return frozenset(cantor_pair(n, values[n]) for n in range(horizon))


def graph_set(
    values: Sequence[int], horizon: int, stream_horizon: int = None
) -> SetStream:
    """The graph of the table on [0, horizon) as a characteristic stream.

    Membership of any code is total: decode to (m, y) and compare y with
    the table at m.  The stream horizon defaults to just past the largest
    member; pass stream_horizon to make longer prefixes evaluable.
    """
    if horizon < 0 or horizon > len(values):
        raise ValueError("function table does not cover [0, horizon)")
    table = tuple(values[:horizon])
    if stream_horizon is None:
        stream_horizon = 1 + max(
            (cantor_pair(n, table[n]) for n in range(horizon)), default=0
        )

    def member(code: int) -> int:
        m, y = cantor_unpair(code)
        return int(m < horizon and table[m] == y)

    return SetStream.from_function(member, stream_horizon, f"graph[{horizon}]")


def trace_from_sampler(sampler: Sampler, q: int, n: int) -> set[int]:
    """Candidate values for step n: second components of the image of [0, (n+1)q)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    return {cantor_unpair(v)[1] for v in image_interval(sampler, (n + 1) * q)}


def hit_indices(sampler: Sampler, values: Sequence[int], q: int, horizon: int) -> set[int]:
    """The inputs m < horizon whose graph point appears in the image of [0, (m+1)q)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if horizon > len(values):
        raise ValueError("function table does not cover [0, horizon)")
    image: set[int] = set()
    evaluated = 0
    hits = set()
    for m in range(horizon):
        while evaluated < (m + 1) * q:
            image.add(eval_sampler(sampler, evaluated))
            evaluated += 1
        if cantor_pair(m, values[m]) in image:
            hits.add(m)
    return hits
