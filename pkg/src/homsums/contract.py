"""Contraction of tensor powers of a kernel along partition blocks.

Every moment engine reduces to sums of the following shape: take ``k`` copies
of a kernel ``f`` of degree ``d``, lay their arguments out on positions
``[k*d]`` (copy ``u`` owns positions ``(u-1)d+1 .. ud``), pick a partition of
the positions that meets each copy at most once per block, and sum
``f(args_1) * ... * f(args_k)`` over all assignments of one index in ``[n]``
per block.

Because the kernel is symmetric, the value of that sum depends only on which
copies each block touches, so partitions are grouped by that incidence type
(canonicalized under copy relabeling) and each distinct type is contracted
once.  Contractions run over the integer numerators of the kernel on a common
denominator, with the denominator and the kernel's squared scale factored
back in at the end, so results are exact rationals.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

from .kernels import Kernel
from .partitions import (
    BlockProfile,
    IntervalPattern,
    Partition,
    enumerate_partitions,
)

TypeKey = tuple[int, ...]


@lru_cache(maxsize=None)
def _mask_tables(k: int) -> list[list[int]]:
    """For each permutation of the ``k`` copies, the induced action on copy
    bitmasks (one table of 2^k entries per permutation)."""
    tables = []
    for perm in itertools.permutations(range(k)):
        table = [0] * (1 << k)
        for mask in range(1 << k):
            out = 0
            for u in range(k):
                if mask >> u & 1:
                    out |= 1 << perm[u]
            table[mask] = out
        tables.append(table)
    return tables


def incidence_type(p: Partition, k: int, d: int) -> TypeKey:
    """Canonical incidence type of a partition of ``[k*d]``: the multiset of
    per-block copy sets (as bitmasks), minimized over relabelings of the
    ``k`` copies."""
    masks = []
    for b in p.blocks:
        m = 0
        for x in b:
            m |= 1 << ((x - 1) // d)
        masks.append(m)
    best: TypeKey | None = None
    for table in _mask_tables(k):
        cand = tuple(sorted(table[m] for m in masks))
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


def representative_blocks(tkey: TypeKey, k: int, d: int) -> list[tuple[int, ...]]:
    """A concrete partition of ``[k*d]`` realizing an incidence type."""
    slots = {u: list(range(u * d + 1, (u + 1) * d + 1)) for u in range(k)}
    blocks = []
    for mask in tkey:
        copies = [u for u in range(k) if mask >> u & 1]
        blocks.append(tuple(sorted(slots[u].pop(0) for u in copies)))
    return blocks


class KernelContractor:
    """Contraction state for one kernel: pattern-indexed ordered support plus
    a per-incidence-type memo."""

    def __init__(self, kernel: Kernel):
        self.kernel = kernel
        self.den, self.ints = kernel.int_entries()
        self._ordered: dict[tuple[int, ...], int] | None = None
        self._patterns: dict[tuple[int, ...], dict] = {}
        self._type_memo: dict[tuple[int, TypeKey], int] = {}

    @classmethod
    def of(cls, kernel: Kernel) -> "KernelContractor":
        """The kernel's contractor, shared so incidence-type contractions are
        computed once per kernel no matter how many laws reuse them."""
        c = kernel._cache.get("contractor")
        if c is None:
            c = cls(kernel)
            kernel._cache["contractor"] = c
        return c

    def _ordered_support(self) -> dict[tuple[int, ...], int]:
        if self._ordered is None:
            out: dict[tuple[int, ...], int] = {}
            for t, v in self.ints.items():
                for p in itertools.permutations(t):
                    out[p] = v
            self._ordered = out
        return self._ordered

    def _pattern_index(self, bound_pos: tuple[int, ...]):
        """Index the ordered support by values at the given positions."""
        idx = self._patterns.get(bound_pos)
        if idx is None:
            d = self.kernel.d
            free_pos = tuple(p for p in range(d) if p not in bound_pos)
            idx = {}
            for tup, v in self._ordered_support().items():
                bv = tuple(tup[p] for p in bound_pos)
                fv = tuple(tup[p] for p in free_pos)
                idx.setdefault(bv, []).append((fv, v))
            self._patterns[bound_pos] = idx
        return idx

    def _contract_blocks(self, blocks: list[tuple[int, ...]], k: int) -> int:
        """Integer contraction of ``k`` kernel copies along explicit blocks
        (sequential copy elimination with live-variable projection)."""
        d = self.kernel.d
        pos_block: dict[int, int] = {}
        for bi, b in enumerate(blocks):
            for x in b:
                pos_block[x] = bi
        factor_blocks = [
            [pos_block[u * d + j + 1] for j in range(d)] for u in range(k)
        ]
        last_use = {}
        for u in range(k):
            for b in factor_blocks[u]:
                last_use[b] = u
        states: dict[tuple[int, ...], int] = {(): 1}
        live: list[int] = []
        for u in range(k):
            fb = factor_blocks[u]
            bound_pos = tuple(j for j, b in enumerate(fb) if b in live)
            free_blocks = [fb[j] for j in range(d) if fb[j] not in live]
            bound_sel = [live.index(fb[j]) for j in bound_pos]
            idx = self._pattern_index(bound_pos)
            keep_old = [i for i, b in enumerate(live) if last_use[b] > u]
            keep_free = [i for i, b in enumerate(free_blocks) if last_use[b] > u]
            live = [live[i] for i in keep_old] + [free_blocks[i] for i in keep_free]
            new_states: dict[tuple[int, ...], int] = {}
            for st, coeff in states.items():
                matches = idx.get(tuple(st[i] for i in bound_sel))
                if not matches:
                    continue
                base = tuple(st[i] for i in keep_old)
                for fv, v in matches:
                    key = base + tuple(fv[i] for i in keep_free)
                    c = coeff * v
                    if key in new_states:
                        new_states[key] += c
                    else:
                        new_states[key] = c
            states = new_states
            if not states:
                return 0
        return sum(states.values())

    def type_value(self, tkey: TypeKey, k: int) -> int:
        """Memoized integer contraction for an incidence type."""
        memo_key = (k, tkey)
        val = self._type_memo.get(memo_key)
        if val is None:
            val = self._contract_blocks(
                representative_blocks(tkey, k, self.kernel.d), k
            )
            self._type_memo[memo_key] = val
        return val

    def partition_value(self, p: Partition, k: int) -> Fraction:
        """Exact assignment sum for one explicit partition of ``[k*d]``."""
        tkey = incidence_type(p, k, self.kernel.d)
        return self.from_int(self.type_value(tkey, k), k)

    def from_int(self, total: int, k: int) -> Fraction:
        """Rescale an integer contraction: divide the common denominator back
        out and apply the kernel's squared scale (``k`` must be even for the
        result to be the actual moment contribution; odd ``k`` callers handle
        the leftover square root)."""
        return Fraction(total, self.den**k) * self.kernel.scale2 ** (k // 2)


def _pairing_types_counted(d: int, k: int) -> tuple[tuple[TypeKey, tuple[int, ...], int], ...]:
    """Incidence types and multiplicities of the interval-respecting pairings
    of ``[k*d]``, computed combinatorially instead of by enumeration.

    A pairing respecting the copy intervals is described by a symmetric
    multiplicity matrix M over copy pairs with zero diagonal and row sums
    ``d``; assigning slots copy by copy gives ``d!^k`` labelings, of which
    each pairing is counted ``prod M_uv!`` times, so a matrix accounts for
    ``d!^k / prod M_uv!`` pairings.  Cross-checked against the explicit
    enumeration in the tests.
    """
    import math

    pairs = [(u, v) for u in range(k) for v in range(u + 1, k)]
    tables = _mask_tables(k)
    agg: dict[TypeKey, int] = {}
    deg = [0] * k

    def rec(i: int) -> None:
        if i == len(pairs):
            if all(x == d for x in deg):
                masks = []
                count = math.factorial(d) ** k
                for (u, v), mult in zip(pairs, mults):
                    if mult:
                        masks.extend([(1 << u) | (1 << v)] * mult)
                        count //= math.factorial(mult)
                best = min(tuple(sorted(t[m] for m in masks)) for t in tables)
                agg[best] = agg.get(best, 0) + count
            return
        u, v = pairs[i]
        cap = min(d - deg[u], d - deg[v])
        for mult in range(cap + 1):
            mults[i] = mult
            deg[u] += mult
            deg[v] += mult
            rec(i + 1)
            deg[u] -= mult
            deg[v] -= mult
        mults[i] = 0

    mults = [0] * len(pairs)
    rec(0)
    sizes = tuple([2] * (k * d // 2))
    return tuple((tk, sizes, c) for tk, c in sorted(agg.items()))


@lru_cache(maxsize=None)
def grouped_types(
    d: int, sizes: frozenset[int], k: int, noncrossing: bool
) -> tuple[tuple[TypeKey, tuple[int, ...], int], ...]:
    """The partitions of ``[k*d]`` with the given block sizes that respect
    the ``k``-interval pattern, grouped as
    ``(incidence type, sorted block sizes, multiplicity)``.

    Pure pairing classes without the non-crossing constraint are counted
    combinatorially (their explicit enumeration grows double-factorially);
    everything else enumerates explicitly.
    """
    if sizes == frozenset({2}) and not noncrossing:
        if (k * d) % 2 == 1:
            return ()
        return _pairing_types_counted(d, k)
    pattern = IntervalPattern(d, k)
    parts = enumerate_partitions(
        k * d, BlockProfile(sizes), respect=pattern, noncrossing=noncrossing
    )
    agg: dict[tuple[TypeKey, tuple[int, ...]], int] = {}
    for p in parts:
        key = (incidence_type(p, k, d), p.block_sizes())
        agg[key] = agg.get(key, 0) + 1
    return tuple((tk, sk, c) for (tk, sk), c in sorted(agg.items()))


def partition_class_size(d: int, sizes: frozenset[int], k: int, noncrossing: bool) -> int:
    return sum(c for _, _, c in grouped_types(d, sizes, k, noncrossing))


def weighted_sum(
    contractor: KernelContractor,
    k: int,
    sizes: frozenset[int],
    noncrossing: bool,
    weight_of_sizes,
) -> tuple[Fraction, dict[tuple[int, ...], Fraction]]:
    """Sum ``weight(block sizes) * contraction`` over the partition class.

    Returns the total plus the per-block-size-profile contributions (the
    oracle's term breakdown).  Zero-weight profiles are skipped without
    contracting.
    """
    d = contractor.kernel.d
    total = Fraction(0)
    by_sizes: dict[tuple[int, ...], Fraction] = {}
    for tkey, sk, count in grouped_types(d, sizes, k, noncrossing):
        w = weight_of_sizes(sk)
        if not w:
            continue
        contrib = w * count * contractor.from_int(contractor.type_value(tkey, k), k)
        total += contrib
        by_sizes[sk] = by_sizes.get(sk, Fraction(0)) + contrib
    return total, by_sizes


def cap_check(ground: int) -> None:
    from .errors import GroundCapExceeded
    from .partitions import GROUND_CAP

    if ground > GROUND_CAP:
        raise GroundCapExceeded(
            f"moment computation needs partitions of [{ground}], beyond the cap "
            f"{GROUND_CAP}"
        )
