"""Step-witness tables, program registries, and the query-string codings.

A WeakRepTable represents a partial function by triples (x, y, z): the
value y is witnessed for input x with step component z.  Four invariants
make such a table a faithful finite representation:

* representation: every witness step z lies within the declared horizon;
* consistency: no input is witnessed with two different values;
* monotonicity: a witness at step z persists at every later step up to
  the horizon;
* downward closure: whenever some input has a witness, so does every
  smaller input.

A FamilyRegistry is an indexed catalog of budgeted programs serving as a
concrete function family together with its universal evaluator.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Optional, Sequence

from .codes import cantor_pair, cantor_unpair, string_code, triple_code
from .constructions import graph_set
from .errors import HorizonError, InvalidTableError
from .samplers import Sampler, eval_sampler
from .streams import SetStream


@dataclass(frozen=True)
class WeakRepTable:
    """A finite set of (x, y, z) witness triples with an explicit horizon."""

    triples: frozenset[tuple[int, int, int]]
    horizon: int

    @classmethod
    def from_triples(cls, triples, horizon: int) -> "WeakRepTable":
        frozen = frozenset((int(x), int(y), int(z)) for x, y, z in triples)
        if any(x < 0 or y < 0 or z < 0 for x, y, z in frozen):
            raise ValueError("triple components must be naturals")
        if horizon < 0:
            raise ValueError("horizon must be a natural number")
        return cls(triples=frozen, horizon=horizon)

    def codes(self) -> list[int]:
        """The triples as pair codes <x,<y,z>>, sorted."""
        return sorted(triple_code(x, y, z) for x, y, z in self.triples)

    def to_lines(self) -> str:
        return "".join(f"{x},{y},{z}\n" for x, y, z in sorted(self.triples))

    @classmethod
    def from_lines(cls, lines, horizon: int = None) -> "WeakRepTable":
        triples = []
        max_z = 0
        for raw in lines:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            x, y, z = (int(tok) for tok in line.split(","))
            triples.append((x, y, z))
            max_z = max(max_z, z)
        if horizon is None:
            horizon = max_z
        return cls.from_triples(triples, horizon)


@dataclass(frozen=True)
class BulletCheck:
    name: str
    passed: bool
    witness: Optional[tuple]
    detail: str


@dataclass(frozen=True)
class WeakRepReport:
    bullets: tuple[BulletCheck, ...]

    @property
    def ok(self) -> bool:
        return all(b.passed for b in self.bullets)

    def bullet(self, name: str) -> BulletCheck:
        for b in self.bullets:
            if b.name == name:
                return b
        raise KeyError(name)


def _passed(name: str) -> BulletCheck:
    return BulletCheck(name, True, None, "ok")


@lru_cache(maxsize=256)
def validate_weakrep(table: WeakRepTable) -> WeakRepReport:
    """Check the four invariants, with a witnessing triple for each failure."""
    triples = sorted(table.triples)
    horizon = table.horizon

    representation = _passed("representation")
    for t in triples:
        if t[2] > horizon:
            representation = BulletCheck(
                "representation", False, t,
                f"witness step {t[2]} exceeds horizon {horizon}",
            )
            break

    by_input: dict[int, list[tuple[int, int, int]]] = {}
    for t in triples:
        by_input.setdefault(t[0], []).append(t)

    consistency = _passed("consistency")
    for x, group in sorted(by_input.items()):
        values = sorted({y for _, y, _ in group})
        if len(values) > 1:
            first = next(t for t in group if t[1] == values[0])
            second = next(t for t in group if t[1] == values[1])
            consistency = BulletCheck(
                "consistency", False, (first, second),
                f"input {x} is witnessed with values {values[0]} and {values[1]}",
            )
            break

    monotonicity = _passed("monotonicity")
    present = table.triples
    for t in triples:
        x, y, z = t
        missing = next(
            (z2 for z2 in range(z + 1, horizon + 1) if (x, y, z2) not in present),
            None,
        )
        if missing is not None:
            monotonicity = BulletCheck(
                "monotonicity", False, t,
                f"witness persists to step {missing - 1} but not {missing}",
            )
            break

    downward = _passed("downward_closure")
    witnessed = sorted(by_input)
    if witnessed:
        expected = set(range(witnessed[-1] + 1))
        gaps = sorted(expected - set(witnessed))
        if gaps:
            above = next(x for x in witnessed if x > gaps[0])
            downward = BulletCheck(
                "downward_closure", False, by_input[above][0],
                f"input {above} is witnessed but {gaps[0]} is not",
            )

    return WeakRepReport((representation, consistency, monotonicity, downward))


def eval_step(table: WeakRepTable, x: int, z: int) -> Optional[int]:
    """The value to which x converges by step z, or None if it has not yet.

    Convergence by step z needs a triple (x, y, z) with y < z, which keeps
    the question decidable from the table alone.
    """
    if z > table.horizon:
        raise HorizonError(f"step {z} exceeds table horizon {table.horizon}")
    report = validate_weakrep(table)
    if not report.ok:
        failed = next(b for b in report.bullets if not b.passed)
        raise InvalidTableError(f"{failed.name} fails: {failed.detail}")
    for tx, ty, tz in table.triples:
        if tx == x and tz == z and ty < z:
            return ty
    return None


# -- program registries ------------------------------------------------------


@dataclass(frozen=True)
class Program:
    """A budgeted evaluator: fn(x) returns (value, steps) or None to diverge."""

    name: str
    fn: Callable[[int], Optional[tuple[int, int]]]


def builtin_program(spec: str) -> Program:
    """Named builtins: identity | const:<v> | double | succ | ramp |
    slowid:<k> | zeroonly | diverge."""
    if spec == "identity":
        return Program(spec, lambda x: (x, 1))
    if spec == "double":
        return Program(spec, lambda x: (2 * x, 1))
    if spec == "succ":
        return Program(spec, lambda x: (x + 1, 1))
    if spec == "ramp":
        return Program(spec, lambda x: (x, x + 1))
    if spec == "diverge":
        return Program(spec, lambda x: None)
    if spec == "zeroonly":
        return Program(spec, lambda x: (0, 1) if x == 0 else None)
    if spec.startswith("const:"):
        v = int(spec[6:])
        if v < 0:
            raise ValueError("constant must be a natural number")
        return Program(spec, lambda x: (v, 1))
    if spec.startswith("slowid:"):
        k = int(spec[7:])
        if k < 1:
            raise ValueError("slowid step count must be >= 1")
        return Program(spec, lambda x: (x, k))
    raise ValueError(f"unknown program spec {spec!r}")


@dataclass(frozen=True)
class FamilyRegistry:
    """An indexed, immutable family of budgeted programs."""

    programs: tuple[Program, ...]
    budget: int

    def __len__(self):
        return len(self.programs)

    def eval(self, index: int, x: int) -> Optional[int]:
        """The program's value at x, or None on divergence or budget overrun."""
        result = self.programs[index].fn(x)
        if result is None:
            return None
        value, steps = result
        return value if steps <= self.budget else None

    def steps(self, index: int, x: int) -> Optional[int]:
        result = self.programs[index].fn(x)
        if result is None:
            return None
        _, steps = result
        return steps if steps <= self.budget else None


def parse_manifest(lines, budget: int) -> FamilyRegistry:
    """Registry from a manifest: one builtin program spec per line."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    programs = []
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        programs.append(builtin_program(line))
    return FamilyRegistry(tuple(programs), budget)


def table_of_program(registry: FamilyRegistry, index: int, horizon: int) -> WeakRepTable:
    """The step-witness table of one registry program up to a horizon.

    A triple (x, y, z) is emitted exactly when the program halts on every
    input up to x within z steps and returns y at x; the output satisfies
    all four table invariants by construction.
    """
    if horizon < 0:
        raise ValueError("horizon must be a natural number")
    triples = []
    slowest = 0
    for x in range(horizon + 1):
        steps = registry.steps(index, x)
        if steps is None:
            break
        slowest = max(slowest, steps)
        if slowest > horizon:
            break
        value = registry.eval(index, x)
        triples.extend((x, value, z) for z in range(slowest, horizon + 1))
    return WeakRepTable.from_triples(triples, horizon)


def interleave_family(registry: FamilyRegistry) -> FamilyRegistry:
    """Duplicate the family onto even/odd indices.

    Derived program 2e evaluates the e-th program at n div 2 (so its values
    at 2n and 2n+1 agree with the original at n); derived program 2e+1 is
    the e-th program unchanged.
    """
    programs = []
    for e, prog in enumerate(registry.programs):
        programs.append(
            Program(f"pairup({prog.name})", lambda n, fn=prog.fn: fn(n // 2))
        )
        programs.append(prog)
    return FamilyRegistry(tuple(programs), registry.budget)


def diagonal_avoid(values, e: int) -> int:
    """Read the diagonal-avoiding value for index e out of a table: values[2e]."""
    try:
        return values[2 * e]
    except (IndexError, KeyError):
        raise ValueError(f"table has no entry at {2 * e}") from None


# -- dominating branch -------------------------------------------------------


def image_set(f_values: Sequence[int]) -> SetStream:
    """The image of a strictly increasing function table, as a stream.

    Membership is decided by binary search, so the horizon is one past the
    largest tabulated value.
    """
    values = list(f_values)
    if not values:
        raise ValueError("function table must be nonempty")
    if any(b <= a for a, b in zip(values, values[1:])) or values[0] < 0:
        raise ValueError("function table must be strictly increasing over naturals")

    def member(n: int) -> int:
        pos = bisect_left(values, n)
        return int(pos < len(values) and values[pos] == n)

    return SetStream.from_function(member, values[-1] + 1, f"image[{len(values)}]")


def dominating_adversary(f_values: Sequence[int], sampler: Sampler, q: int, n: int) -> int:
    """1 + the sampler's maximum over [0, (n+1)q], inclusive.

    Guarantee: whenever f_values[n] appears in the sampler's image of
    [0, (n+1)q), the returned bound strictly exceeds it — which is what
    makes this the counter to any claimed dominating table f_values.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    return 1 + max(eval_sampler(sampler, j) for j in range((n + 1) * q + 1))


# -- query-string codings ----------------------------------------------------


def psi_eval(pair_codes, x: int, budget: int) -> Optional[int]:
    """Least y < budget with <x, y> in the code set, if every smaller input
    also has such a witness; None (divergence) otherwise."""
    if x < 0 or budget < 0:
        raise ValueError("x and budget must be naturals")
    best: dict[int, int] = {}
    for code in pair_codes:
        a, b = cantor_unpair(code)
        if b < budget and (a not in best or b < best[a]):
            best[a] = b
    if any(t not in best for t in range(x + 1)):
        return None
    return best[x]


@dataclass(frozen=True)
class SigmaMap:
    """Maps binary strings to program indices, with an optional default
    routing unmapped strings to a designated always-diverging program."""

    entries: Mapping[str, int]
    default: Optional[int] = None

    def lookup(self, sigma: str) -> int:
        index = self.entries.get(sigma, self.default)
        if index is None:
            raise LookupError(
                f"no program index for string {sigma!r} and no default set"
            )
        return index

    @classmethod
    def parse(cls, lines) -> "SigmaMap":
        """Parse `sigma:index` lines; a `default:<index>` line sets the default."""
        entries: dict[str, int] = {}
        default = None
        for raw in lines:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            left, _, right = line.partition(":")
            if left == "default":
                default = int(right)
            elif all(c in "01" for c in left):
                entries[left] = int(right)
            else:
                raise ValueError(f"bad sigma map line {line!r}")
        return cls(entries=entries, default=default)

    def format_lines(self) -> str:
        out = [f"{s}:{i}\n" for s, i in sorted(self.entries.items())]
        if self.default is not None:
            out.append(f"default:{self.default}\n")
        return "".join(out)


def _diag_value(values, e: int):
    try:
        return values[e]
    except (IndexError, KeyError):
        raise ValueError(f"diagonal table has no value at index {e}") from None


def p_bound(registry: FamilyRegistry, sigma_map: SigmaMap, values, n: int) -> int:
    """1 + the largest pair code <index(sigma), values[index(sigma)]> over
    all binary strings sigma with 2^|sigma| < n^5.

    The length threshold is the exact power comparison realizing
    |sigma| < 5*log2(n); no floating point is involved.
    """
    if n < 2:
        raise ValueError("p_bound needs n >= 2")
    limit = n**5
    best = 0
    length = 0
    while (1 << length) < limit:
        for value in range(1 << length):
            sigma = format(value, "b").zfill(length) if length else ""
            e = sigma_map.lookup(sigma)
            if not 0 <= e < len(registry):
                raise ValueError(f"sigma map routes {sigma!r} to unknown program {e}")
            best = max(best, cantor_pair(e, _diag_value(values, e)))
        length += 1
    return 1 + best


def build_pset(
    values: Sequence[int],
    registry: FamilyRegistry,
    sigma_map: SigmaMap,
    checkpoints: Sequence[int],
) -> set[int]:
    """Codes of the graph stream's prefixes at the p_bound of each checkpoint.

    The underlying set is the graph of the diagonal table; its prefix at
    p_bound(n) is coded for every checkpoint n, with duplicates collapsing.
    """
    bounds = [p_bound(registry, sigma_map, values, n) for n in checkpoints]
    if not bounds:
        return set()
    stream = graph_set(values, len(values), stream_horizon=max(bounds))
    return {string_code(stream.prefix(p)) for p in bounds}
