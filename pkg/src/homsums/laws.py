"""Moment sequences with derived classical and free cumulants.

Both cumulant transforms solve the triangular moment-cumulant system by
summing generalized cumulants over the full partition lattice (classical) or
the non-crossing lattice (free), reusing the partition engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .errors import HomsumError, MissingCumulant
from .partitions import BlockProfile, enumerate_partitions

Number = Fraction | float

MAX_ORDER = 8


@lru_cache(maxsize=None)
def _lattice(n: int, noncrossing: bool):
    return enumerate_partitions(n, BlockProfile(range(1, n + 1)), noncrossing=noncrossing)


def _moments_to_cumulants(moments: Sequence[Number], noncrossing: bool) -> tuple[Number, ...]:
    K = len(moments)
    if K < 1 or K > MAX_ORDER:
        raise HomsumError(f"moment sequences supported for orders 1..{MAX_ORDER}, got {K}")
    cums: list[Number] = []
    for order in range(1, K + 1):
        rest: Number = Fraction(0)
        for p in _lattice(order, noncrossing):
            if len(p.blocks) == 1:
                continue  # the full block carries the unknown cumulant
            term: Number = Fraction(1)
            for b in p.blocks:
                term *= cums[len(b) - 1]
            rest += term
        cums.append(moments[order - 1] - rest)
    return tuple(cums)


def _cumulants_to_moments(cumulants: Sequence[Number], noncrossing: bool) -> tuple[Number, ...]:
    K = len(cumulants)
    if K < 1 or K > MAX_ORDER:
        raise HomsumError(f"cumulant sequences supported for orders 1..{MAX_ORDER}, got {K}")
    moms: list[Number] = []
    for order in range(1, K + 1):
        tot: Number = Fraction(0)
        for p in _lattice(order, noncrossing):
            term: Number = Fraction(1)
            for b in p.blocks:
                term *= cumulants[len(b) - 1]
            tot += term
        moms.append(tot)
    return tuple(moms)


def moments_to_cumulants_classical(moments: Sequence[Number]) -> tuple[Number, ...]:
    """Solve ``m_n = sum over all partitions of prod chi_{|b|}`` for the chis."""
    return _moments_to_cumulants(moments, noncrossing=False)


def cumulants_to_moments_classical(cumulants: Sequence[Number]) -> tuple[Number, ...]:
    return _cumulants_to_moments(cumulants, noncrossing=False)


def moments_to_free_cumulants(moments: Sequence[Number]) -> tuple[Number, ...]:
    """Solve the triangular system over the non-crossing lattice."""
    return _moments_to_cumulants(moments, noncrossing=True)


def free_cumulants_to_moments(cumulants: Sequence[Number]) -> tuple[Number, ...]:
    return _cumulants_to_moments(cumulants, noncrossing=True)


def catalan_number(k: int) -> int:
    return comb(2 * k, k) // (k + 1)


@dataclass(frozen=True)
class CatalanTable:
    """Catalan numbers C_0..C_K; the even semicircular moment sequence."""

    max_order: int = MAX_ORDER
    values: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", tuple(catalan_number(k) for k in range(self.max_order + 1))
        )

    def __getitem__(self, k: int) -> int:
        return self.values[k]

    def semicircle_moment(self, order: int) -> int:
        """Moment of the standard semicircle: C_{order/2} for even order."""
        return self.values[order // 2] if order % 2 == 0 else 0


def _as_number(x) -> Number:
    if isinstance(x, float):
        return x
    return Fraction(x)


class _LawBase:
    """Shared moment/cumulant bookkeeping for the two regimes."""

    _noncrossing: bool
    _label: str

    def __init__(self, moments: Sequence, sampler: str | None = None):
        moms = tuple(_as_number(m) for m in moments)
        if len(moms) < 4:
            raise HomsumError(f"{self._label} needs moments at least up to order 4")
        self.moments = moms
        self.cumulants = _moments_to_cumulants(moms, self._noncrossing)
        self.sampler = sampler

    @property
    def max_order(self) -> int:
        return len(self.moments)

    def moment(self, j: int) -> Number:
        if not 1 <= j <= self.max_order:
            raise MissingCumulant(f"moment of order {j} not available (have 1..{self.max_order})")
        return self.moments[j - 1]

    def _cumulant(self, j: int) -> Number:
        if not 1 <= j <= self.max_order:
            raise MissingCumulant(
                f"cumulant of order {j} not available (have 1..{self.max_order})"
            )
        return self.cumulants[j - 1]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(moments={self.moments!r})"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.moments == other.moments


class ClassicalLaw(_LawBase):
    """A classical entry law given by its moments ``m_1..m_K``."""

    _noncrossing = False
    _label = "ClassicalLaw"

    def chi(self, j: int) -> Number:
        return self._cumulant(j)

    def assumption_a_violations(self) -> list[str]:
        """Assumption (A): centered, unit variance, zero third moment."""
        out = []
        if self.moment(1) != 0:
            out.append(f"m1 = {self.moment(1)} (need 0)")
        if self.moment(2) != 1:
            out.append(f"m2 = {self.moment(2)} (need 1)")
        if self.moment(3) != 0:
            out.append(f"m3 = {self.moment(3)} (need 0)")
        return out

    @classmethod
    def gaussian(cls) -> "ClassicalLaw":
        return cls((0, 1, 0, 3, 0, 15, 0, 105), sampler="gaussian")

    @classmethod
    def rademacher(cls) -> "ClassicalLaw":
        return cls((0, 1, 0, 1, 0, 1, 0, 1), sampler="rademacher")

    @classmethod
    def from_fourth_moment(cls, m4, m3=0) -> "ClassicalLaw":
        return cls((0, 1, m3, m4))


class FreeLaw(_LawBase):
    """A non-commutative entry law given by its moments."""

    _noncrossing = True
    _label = "FreeLaw"

    def kappa(self, j: int) -> Number:
        return self._cumulant(j)

    def assumption_b_violations(self) -> list[str]:
        """Assumption (B): centered with unit variance."""
        out = []
        if self.moment(1) != 0:
            out.append(f"m1 = {self.moment(1)} (need 0)")
        if self.moment(2) != 1:
            out.append(f"m2 = {self.moment(2)} (need 1)")
        return out

    @classmethod
    def semicircle(cls) -> "FreeLaw":
        table = CatalanTable(8)
        return cls(tuple(table.semicircle_moment(j) for j in range(1, 9)))

    @classmethod
    def free_rademacher(cls) -> "FreeLaw":
        return cls((0, 1, 0, 1, 0, 1, 0, 1))

    @classmethod
    def from_fourth_moment(cls, m4, m3=0) -> "FreeLaw":
        return cls((0, 1, m3, m4))
