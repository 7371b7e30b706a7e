"""Set-partition engine: enumeration under block-size / interval / non-crossing
constraints, plus blockwise generalized cumulant evaluation.

Ground sets are ``[m] = {1, ..., m}`` (1-based).  Partitions are kept in a
canonical form (blocks sorted by least element, elements ascending inside a
block) so enumeration output is deterministic and directly comparable in
golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import GroundCapExceeded, HomsumError

#: Largest ground set the enumeration engine accepts.  Order-6 moments of a
#: degree-4 kernel need 24 positions; anything bigger would thrash.
GROUND_CAP = 24


class Partition:
    """A partition of ``[m]`` into disjoint non-empty blocks."""

    __slots__ = ("ground_size", "blocks", "_block_of")

    def __init__(self, ground_size: int, blocks: Iterable[Iterable[int]]):
        canon = sorted(tuple(sorted(b)) for b in blocks)
        seen: set[int] = set()
        for b in canon:
            if not b:
                raise HomsumError("empty block in partition")
            for x in b:
                if not (1 <= x <= ground_size):
                    raise HomsumError(f"element {x} outside ground set [{ground_size}]")
                if x in seen:
                    raise HomsumError(f"element {x} appears in two blocks")
                seen.add(x)
        if len(seen) != ground_size:
            raise HomsumError("blocks do not cover the ground set")
        self.ground_size = ground_size
        self.blocks = tuple(canon)
        self._block_of = {x: i for i, b in enumerate(canon) for x in b}

    def block_index_of(self, x: int) -> int:
        return self._block_of[x]

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(sorted(len(b) for b in self.blocks))

    def is_pairing(self) -> bool:
        return all(len(b) == 2 for b in self.blocks)

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Partition)
            and self.ground_size == other.ground_size
            and self.blocks == other.blocks
        )

    def __hash__(self) -> int:
        return hash((self.ground_size, self.blocks))

    def __lt__(self, other: "Partition") -> bool:
        return self.blocks < other.blocks

    def __repr__(self) -> str:
        inner = ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return f"Partition([{self.ground_size}]: {inner})"


@dataclass(frozen=True)
class IntervalPattern:
    """Partition of ``[block_count * block_length]`` into consecutive intervals.

    With ``block_length=d, block_count=4`` this is the four-interval pattern
    used throughout the fourth-moment computations.
    """

    block_length: int
    block_count: int

    def __post_init__(self) -> None:
        if self.block_length < 1 or self.block_count < 1:
            raise HomsumError("interval pattern needs positive length and count")

    @property
    def ground_size(self) -> int:
        return self.block_length * self.block_count

    def interval_of(self, x: int) -> int:
        """0-based interval index containing ``x``."""
        return (x - 1) // self.block_length

    def as_partition(self) -> Partition:
        d, k = self.block_length, self.block_count
        return Partition(d * k, [range(i * d + 1, (i + 1) * d + 1) for i in range(k)])


@dataclass(frozen=True)
class BlockProfile:
    """Allowed block sizes for an enumeration."""

    allowed_sizes: frozenset[int]

    def __init__(self, allowed_sizes: Iterable[int]):
        sizes = frozenset(int(s) for s in allowed_sizes)
        if not sizes or min(sizes) < 1:
            raise HomsumError("block profile needs a non-empty set of sizes >= 1")
        object.__setattr__(self, "allowed_sizes", sizes)


PAIRS_ONLY = BlockProfile({2})
PAIRS_AND_FOURS = BlockProfile({2, 4})
PAIRS_TRIPLES_FOURS = BlockProfile({2, 3, 4})


def is_noncrossing(p: Partition) -> bool:
    """True iff no quadruple ``i<j<k<l`` with ``i~k``, ``j~l``, ``j!~k``.

    Implemented by the linear stack scan: an element continuing a block must
    find that block on top of the open-block stack.
    """
    first = {b[0]: i for i, b in enumerate(p.blocks)}
    last = {b[-1]: i for i, b in enumerate(p.blocks)}
    stack: list[int] = []
    for x in range(1, p.ground_size + 1):
        b = p.block_index_of(x)
        if first.get(x) == b:
            stack.append(b)
        if stack[-1] != b:
            return False
        if last.get(x) == b:
            stack.pop()
    return True


def respects(p: Partition, pattern: IntervalPattern) -> bool:
    """True iff every block of ``p`` meets every interval of ``pattern`` at
    most once (lattice meet with the interval pattern is the discrete
    partition)."""
    if p.ground_size != pattern.ground_size:
        raise HomsumError(
            f"ground-set mismatch: partition on [{p.ground_size}], "
            f"pattern on [{pattern.ground_size}]"
        )
    for b in p.blocks:
        ivs = [pattern.interval_of(x) for x in b]
        if len(set(ivs)) != len(ivs):
            return False
    return True


def _min_deficit(sizes: frozenset[int], cur: int) -> int | None:
    """Fewest extra elements a block of size ``cur`` needs to reach an
    allowed size; None if no allowed size is reachable."""
    opts = [s - cur for s in sizes if s >= cur]
    return min(opts) if opts else None


@lru_cache(maxsize=None)
def _enumerate_cached(
    m: int,
    sizes: frozenset[int],
    interval_len: int | None,
    noncrossing: bool,
) -> tuple[Partition, ...]:
    max_size = max(sizes)
    min_size = min(sizes)
    # fewest extra elements a block of each size needs to reach an allowed
    # size; None marks dead ends
    deficit = [_min_deficit(sizes, c) for c in range(max_size + 1)]
    out: list[Partition] = []
    blocks: list[list[int]] = []
    closed: list[bool] = []

    def iv(x: int) -> int:
        return (x - 1) // interval_len  # type: ignore[operator]

    def rec(e: int) -> None:
        if e > m:
            if all(len(b) in sizes for b in blocks):
                out.append(Partition(m, [tuple(b) for b in blocks]))
            return
        # elements still to place, including e itself
        left = m - e + 1
        demand = 0
        for b in blocks:
            need = deficit[len(b)]
            if need is None:
                return
            demand += need
        if demand > left:
            return
        # option 1: extend an existing block
        for bi, b in enumerate(blocks):
            if closed[bi] or len(b) >= max_size:
                continue
            if deficit[len(b) + 1] is None:
                continue
            if interval_len is not None and any(iv(x) == iv(e) for x in b):
                continue
            if noncrossing:
                lastb = b[-1]
                inside: list[int] = []
                bad = False
                for cj, c in enumerate(blocks):
                    if cj == bi:
                        continue
                    if any(lastb < x < e for x in c):
                        if c[0] < lastb:
                            bad = True  # c straddles the new arc: crossing
                            break
                        inside.append(cj)
                if bad:
                    continue
                if any(len(blocks[cj]) not in sizes for cj in inside):
                    continue  # nested blocks can never grow again
                saved = [closed[cj] for cj in inside]
                for cj in inside:
                    closed[cj] = True
                b.append(e)
                rec(e + 1)
                b.pop()
                for cj, s in zip(inside, saved):
                    closed[cj] = s
            else:
                b.append(e)
                rec(e + 1)
                b.pop()
        # option 2: open a new block (sound prune: every open block, including
        # the new one, must still be completable with the elements after e)
        if demand + min_size - 1 <= left - 1:
            blocks.append([e])
            closed.append(False)
            rec(e + 1)
            blocks.pop()
            closed.pop()

    rec(1)
    out.sort(key=lambda p: p.blocks)
    return tuple(out)


def enumerate_partitions(
    m: int,
    profile: BlockProfile,
    respect: IntervalPattern | None = None,
    noncrossing: bool = False,
) -> list[Partition]:
    """All partitions of ``[m]`` with block sizes in ``profile``, optionally
    respecting an interval pattern and/or non-crossing.

    Output is deterministic: blocks sorted by least element, partitions in
    lexicographic order of their canonical block tuples.
    """
    if m < 1:
        raise HomsumError(f"invalid ground size {m}")
    if m > GROUND_CAP:
        raise GroundCapExceeded(f"ground set [{m}] exceeds cap {GROUND_CAP}")
    interval_len = None
    if respect is not None:
        if respect.ground_size != m:
            raise HomsumError(
                f"interval pattern covers [{respect.ground_size}], expected [{m}]"
            )
        interval_len = respect.block_length
    return list(_enumerate_cached(m, profile.allowed_sizes, interval_len, noncrossing))


def joint_cumulant_value(
    p: Partition,
    index_assignment: Mapping[int, int] | Sequence[int],
    law,
    regime: str,
) -> Fraction | float:
    """Generalized joint cumulant of ``(X_{i_1}, ..., X_{i_m})`` along ``p``
    for (freely) independent identically distributed entries.

    Each block contributes the order-``|b|`` cumulant of the law when all its
    positions carry the same variable index, and kills the product otherwise.
    ``regime`` selects classical cumulants ("classical") or free cumulants
    ("free"); for free semantics the caller restricts to non-crossing ``p``.
    """
    if regime not in ("classical", "free"):
        raise HomsumError(f"unknown regime {regime!r}")
    if isinstance(index_assignment, Mapping):
        idx = dict(index_assignment)
    else:
        idx = {pos + 1: v for pos, v in enumerate(index_assignment)}
    value: Fraction | float = Fraction(1)
    for b in p.blocks:
        vals = {idx[x] for x in b}
        if len(vals) != 1:
            return Fraction(0)
        order = len(b)
        c = law.chi(order) if regime == "classical" else law.kappa(order)
        value *= c
    return value


def _pairings_of(elems: tuple[int, ...], interval_len: int):
    """Pairings of an arbitrary sorted element tuple, no pair within one
    interval of length ``interval_len``."""
    if not elems:
        yield ()
        return
    a = elems[0]
    for i in range(1, len(elems)):
        b = elems[i]
        if (a - 1) // interval_len == (b - 1) // interval_len:
            continue
        rest = elems[1:i] + elems[i + 1 :]
        for tail in _pairings_of(rest, interval_len):
            yield ((a, b),) + tail


@lru_cache(maxsize=None)
def _rho_cached(d: int) -> tuple[Partition, ...]:
    m = 4 * d
    pattern = IntervalPattern(d, 4)
    rhos: list[Partition] = []
    for h in range(1, d + 1):
        four = (h, 2 * d - h + 1, 2 * d + h, 4 * d - h + 1)
        rest = tuple(x for x in range(1, m + 1) if x not in four)
        completions = []
        for pairs in _pairings_of(rest, d):
            cand = Partition(m, [four, *pairs])
            if is_noncrossing(cand) and respects(cand, pattern):
                completions.append(cand)
        if len(completions) != 1:
            raise HomsumError(
                f"rho completion not unique for d={d}, h={h}: "
                f"{len(completions)} found (implementation bug)"
            )
        rhos.append(completions[0])
    # disjoint-union identity: the 2,4-class is the pairings plus the rhos
    full = set(enumerate_partitions(m, PAIRS_AND_FOURS, pattern, noncrossing=True))
    pair_part = set(enumerate_partitions(m, PAIRS_ONLY, pattern, noncrossing=True))
    if full != pair_part | set(rhos) or len(full) != len(pair_part) + d:
        raise HomsumError(f"rho decomposition identity failed for d={d}")
    return tuple(rhos)


def rho_partitions(d: int) -> list[Partition]:
    """The ``d`` exceptional single-4-block elements of the non-crossing
    2,4-class on ``[4d]``.

    The 4-block of the ``h``-th partition is ``{h, 2d-h+1, 2d+h, 4d-h+1}``;
    its pair blocks are found by exhaustive completion search, asserting
    uniqueness, and the disjoint-union identity against the full enumeration
    is re-verified on every (cached) construction.
    """
    if d < 2:
        raise HomsumError("rho partitions need degree >= 2")
    if 4 * d > GROUND_CAP:
        raise GroundCapExceeded(f"ground set [{4 * d}] exceeds cap {GROUND_CAP}")
    return list(_rho_cached(d))
