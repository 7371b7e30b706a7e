"""Symmetric kernels vanishing on diagonals: construction, admissibility,
slices, influences, contractions, and the named kernel families.

Storage convention: only strictly increasing index tuples are kept, with the
full symmetric extension implied and every diagonal tuple structurally zero.
A kernel value is ``entry * sqrt(scale2)``: entries are exact rationals and
``scale2`` is an exact rational carrying the squared normalization constant
(e.g. ``1/(2n(n-1))`` for the uniform pair kernel), so every even-degree
moment computed downstream stays an exact rational even when the kernel
values themselves are irrational.  Perfect-square ``scale2`` factors are
folded into the entries at construction.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, isqrt, lcm
from typing import Iterable, Mapping

from .errors import HomsumError, KernelFormatError, NotNormalizable

FLOAT_GAMMA_RTOL = 1e-9

FAMILY_IDS = ("off-diagonal-pair", "product", "star", "free-clt")


def _sqrt_exact(q: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None."""
    if q < 0:
        return None
    pn, pd = isqrt(q.numerator), isqrt(q.denominator)
    if pn * pn == q.numerator and pd * pd == q.denominator:
        return Fraction(pn, pd)
    return None


class Kernel:
    """Symmetric degree-``d`` kernel on ``[n]^d`` vanishing on diagonals."""

    __slots__ = ("n", "d", "entries", "scale2", "mode", "_ints", "_cache")

    def __init__(
        self,
        n: int,
        d: int,
        entries: Mapping[tuple[int, ...], Fraction | int],
        scale2: Fraction | int = 1,
        mode: str = "exact",
    ):
        if d < 1:
            raise HomsumError(f"kernel degree must be >= 1, got {d}")
        if n < 0:
            raise HomsumError(f"kernel index range must be >= 0, got {n}")
        if mode not in ("exact", "float"):
            raise HomsumError(f"kernel mode must be 'exact' or 'float', got {mode!r}")
        s2 = Fraction(scale2)
        if s2 <= 0:
            raise HomsumError("scale2 must be positive")
        clean: dict[tuple[int, ...], Fraction] = {}
        for t, v in entries.items():
            t = tuple(int(i) for i in t)
            if len(t) != d:
                raise KernelFormatError(f"index tuple {t} has length {len(t)}, expected {d}")
            if any(t[i] >= t[i + 1] for i in range(d - 1)):
                raise KernelFormatError(f"index tuple {t} is not strictly increasing")
            if t and (t[0] < 1 or t[-1] > n):
                raise KernelFormatError(f"index tuple {t} out of range [1, {n}]")
            fv = Fraction(v)
            if fv:
                clean[t] = fv
        root = _sqrt_exact(s2)
        if root is not None and root != 1:
            clean = {t: v * root for t, v in clean.items()}
            s2 = Fraction(1)
        self.n = n
        self.d = d
        self.entries = dict(sorted(clean.items()))
        self.scale2 = s2
        self.mode = mode
        self._ints: tuple[int, dict[tuple[int, ...], int]] | None = None
        # derived-value memo; kernels are immutable after construction
        self._cache: dict = {}

    # -- basic queries ------------------------------------------------------

    @property
    def support_size(self) -> int:
        return len(self.entries)

    @property
    def is_exact_valued(self) -> bool:
        """True when every kernel value is itself a rational number."""
        return self.scale2 == 1

    def coeff(self, idx: Iterable[int]) -> Fraction:
        """Rational part of the kernel value at an arbitrary ordered tuple
        (full symmetric extension; diagonals and missing tuples give 0)."""
        t = tuple(idx)
        if len(set(t)) != len(t):
            return Fraction(0)
        return self.entries.get(tuple(sorted(t)), Fraction(0))

    def value(self, idx: Iterable[int]) -> Fraction | float:
        c = self.coeff(idx)
        if self.scale2 == 1:
            return c
        return float(c) * math.sqrt(self.scale2)

    def sq_norm(self) -> Fraction:
        """Sum of squared values over the full ordered extension."""
        orbit = factorial(self.d)
        return self.scale2 * orbit * sum((v * v for v in self.entries.values()), Fraction(0))

    def gamma_norm(self) -> Fraction:
        """The admissibility normalization ``d! * sum(f^2)``."""
        return factorial(self.d) * self.sq_norm()

    def int_entries(self) -> tuple[int, dict[tuple[int, ...], int]]:
        """Entries over a common denominator: ``entry = num / den``."""
        if self._ints is None:
            den = 1
            for v in self.entries.values():
                den = lcm(den, v.denominator)
            self._ints = (den, {t: int(v * den) for t, v in self.entries.items()})
        return self._ints

    # -- transforms ---------------------------------------------------------

    def relabel(self, perm: Mapping[int, int]) -> "Kernel":
        """Apply a permutation of ``[n]`` to the kernel indices."""
        if sorted(perm) != list(range(1, self.n + 1)) or sorted(perm.values()) != list(
            range(1, self.n + 1)
        ):
            raise HomsumError("relabeling must be a permutation of [n]")
        new = {tuple(sorted(perm[i] for i in t)): v for t, v in self.entries.items()}
        return Kernel(self.n, self.d, new, self.scale2, self.mode)

    def scaled(self, c: Fraction | int) -> "Kernel":
        """Kernel with every value multiplied by a rational constant."""
        c = Fraction(c)
        if c == 0:
            return Kernel(self.n, self.d, {}, 1, self.mode)
        sign = 1 if c > 0 else -1
        return Kernel(
            self.n,
            self.d,
            {t: sign * v for t, v in self.entries.items()},
            self.scale2 * c * c,
            self.mode,
        )

    # -- equality / repr ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Kernel)
            and (self.n, self.d, self.scale2, self.mode) == (other.n, other.d, other.scale2, other.mode)
            and self.entries == other.entries
        )

    def __repr__(self) -> str:
        return (
            f"Kernel(n={self.n}, d={self.d}, support={self.support_size}, "
            f"scale2={self.scale2}, mode={self.mode!r})"
        )

    # -- JSON interchange ----------------------------------------------------

    def to_json(self) -> dict:
        """Spec interchange format.  Kernels whose values are irrational
        (non-square ``scale2``) are exported in float mode."""
        if self.mode == "exact" and self.is_exact_valued:
            ents = [
                {"idx": list(t), "num": v.numerator, "den": v.denominator}
                for t, v in self.entries.items()
            ]
            return {"n": self.n, "d": self.d, "mode": "exact", "entries": ents}
        root = math.sqrt(self.scale2)
        ents = [
            {"idx": list(t), "val": float(v) * root} for t, v in self.entries.items()
        ]
        return {"n": self.n, "d": self.d, "mode": "float", "entries": ents}

    @classmethod
    def from_json(cls, data: dict) -> "Kernel":
        if not isinstance(data, dict):
            raise KernelFormatError("kernel JSON must be an object")
        for field in ("n", "d", "mode", "entries"):
            if field not in data:
                raise KernelFormatError(f"kernel JSON missing field {field!r}")
        n, d, mode = data["n"], data["d"], data["mode"]
        if not isinstance(n, int) or not isinstance(d, int):
            raise KernelFormatError("fields 'n' and 'd' must be integers")
        if mode not in ("exact", "float"):
            raise KernelFormatError(f"mode must be 'exact' or 'float', got {mode!r}")
        entries: dict[tuple[int, ...], Fraction] = {}
        for pos, ent in enumerate(data["entries"]):
            idx = ent.get("idx")
            if not isinstance(idx, list) or len(idx) != d or not all(isinstance(i, int) for i in idx):
                raise KernelFormatError(f"entry {pos}: 'idx' must be a list of {d} integers")
            t = tuple(idx)
            if any(t[i] >= t[i + 1] for i in range(d - 1)):
                raise KernelFormatError(
                    f"entry {pos}: idx {idx} rejected (must be strictly increasing; "
                    "diagonal tuples are structurally zero)"
                )
            if t[0] < 1 or t[-1] > n:
                raise KernelFormatError(f"entry {pos}: idx {idx} out of range [1, {n}]")
            if t in entries:
                raise KernelFormatError(f"entry {pos}: duplicate idx {idx}")
            if mode == "exact":
                if "num" not in ent or "den" not in ent:
                    raise KernelFormatError(f"entry {pos}: exact mode needs 'num' and 'den'")
                num, den = ent["num"], ent["den"]
                if not isinstance(num, int) or not isinstance(den, int) or den == 0:
                    raise KernelFormatError(f"entry {pos}: bad rational {num}/{den}")
                entries[t] = Fraction(num, den)
            else:
                if "val" not in ent or not isinstance(ent["val"], (int, float)):
                    raise KernelFormatError(f"entry {pos}: float mode needs numeric 'val'")
                entries[t] = Fraction(ent["val"])
        return cls(n, d, entries, 1, mode)

    def dump(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path: str) -> "Kernel":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise KernelFormatError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_json(data)


@dataclass(frozen=True)
class AdmissibilityReport:
    """Per-property verdicts: ``alpha`` (diagonal vanishing) and ``beta``
    (symmetry) are structural for a constructed kernel; ``gamma`` is the
    computed normalization ``d! * sum(f^2)``."""

    alpha: bool
    beta: bool
    gamma: bool
    gamma_norm: Fraction

    @property
    def ok(self) -> bool:
        return self.alpha and self.beta and self.gamma


def check_admissible(kernel: Kernel) -> AdmissibilityReport:
    norm = kernel.gamma_norm()
    if kernel.mode == "float":
        gamma_ok = abs(float(norm) - 1.0) <= FLOAT_GAMMA_RTOL
    else:
        gamma_ok = norm == 1
    return AdmissibilityReport(alpha=True, beta=True, gamma=gamma_ok, gamma_norm=norm)


def make_admissible(
    raw: Mapping[tuple[int, ...], object] | Kernel,
    n: int | None = None,
    d: int | None = None,
) -> Kernel:
    """Zero diagonals, symmetrize (average over argument permutations) and
    rescale so the normalization holds exactly.

    Accepts either a raw tuple-to-value mapping (with explicit ``n``, ``d``)
    or an existing kernel, and is idempotent.
    """
    if isinstance(raw, Kernel):
        norm = raw.gamma_norm()
        if norm == 0:
            raise NotNormalizable("kernel has no off-diagonal mass")
        return Kernel(raw.n, raw.d, raw.entries, raw.scale2 / norm, raw.mode)
    if n is None or d is None:
        raise HomsumError("make_admissible on a raw mapping needs explicit n and d")
    mode = "exact"
    sums: dict[tuple[int, ...], Fraction] = {}
    for t, v in raw.items():
        t = tuple(int(i) for i in t)
        if len(t) != d:
            raise KernelFormatError(f"raw tuple {t} has length {len(t)}, expected {d}")
        if any(i < 1 or i > n for i in t):
            raise KernelFormatError(f"raw tuple {t} out of range [1, {n}]")
        if isinstance(v, float):
            mode = "float"
        if len(set(t)) != len(t):
            continue  # diagonal: structurally zero
        key = tuple(sorted(t))
        sums[key] = sums.get(key, Fraction(0)) + Fraction(v)
    dfact = factorial(d)
    entries = {t: s / dfact for t, s in sums.items() if s}
    if not entries:
        raise NotNormalizable("raw kernel has zero off-diagonal part after symmetrization")
    base = Kernel(n, d, entries, 1, mode)
    return Kernel(n, d, entries, 1 / base.gamma_norm(), mode)


def slice_kernel(kernel: Kernel, fixed: Iterable[int]) -> Kernel:
    """Kernel of degree ``d - m`` obtained by freezing the first ``m``
    arguments.  Not renormalized; repeated fixed indices give the zero
    kernel (diagonal vanishing)."""
    fixed = tuple(int(j) for j in fixed)
    m = len(fixed)
    if m < 1 or m >= kernel.d:
        raise HomsumError(f"slice size must satisfy 1 <= m <= d-1, got m={m}, d={kernel.d}")
    if any(j < 1 or j > kernel.n for j in fixed):
        raise HomsumError(f"slice indices {fixed} out of range [1, {kernel.n}]")
    if len(set(fixed)) != m:
        return Kernel(kernel.n, kernel.d - m, {}, 1, kernel.mode)
    fset = frozenset(fixed)
    new: dict[tuple[int, ...], Fraction] = {}
    for t, v in kernel.entries.items():
        if fset <= set(t):
            rest = tuple(i for i in t if i not in fset)
            new[rest] = v
    return Kernel(kernel.n, kernel.d - m, new, kernel.scale2, kernel.mode)


def influence(kernel: Kernel, i: int) -> Fraction:
    """Squared-value mass of all ordered tuples whose first coordinate is
    ``i``, over the full symmetric extension."""
    if i < 1 or i > kernel.n:
        raise HomsumError(f"index {i} out of range [1, {kernel.n}]")
    orbit = factorial(kernel.d - 1)
    acc = sum((v * v for t, v in kernel.entries.items() if i in t), Fraction(0))
    return kernel.scale2 * orbit * acc


def influence_max(kernel: Kernel) -> Fraction:
    if kernel.n == 0:
        return Fraction(0)
    return max(influence(kernel, i) for i in range(1, kernel.n + 1))


def contraction_square_sum(kernel: Kernel, s: int) -> Fraction:
    """Sum over two free ``(d-s)``-tuples of the squared overlap contraction
    of the kernel with itself along ``s`` shared slots."""
    d = kernel.d
    if s < 1 or s > d - 1:
        raise HomsumError(f"overlap size must satisfy 1 <= s <= d-1, got s={s}, d={d}")
    den, ints = kernel.int_entries()
    # group the ordered extension by its ordered s-suffix
    by_suffix: dict[tuple[int, ...], list[tuple[tuple[int, ...], int]]] = {}
    for t, v in ints.items():
        for p in itertools.permutations(t):
            by_suffix.setdefault(p[d - s :], []).append((p[: d - s], v))
    overlaps: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}
    for group in by_suffix.values():
        for (j, vj) in group:
            for (k, vk) in group:
                key = (j, k)
                overlaps[key] = overlaps.get(key, 0) + vj * vk
    total = sum(v * v for v in overlaps.values())
    return Fraction(total, den**4) * kernel.scale2**2


# -- kernel families ---------------------------------------------------------


@dataclass(frozen=True)
class KernelFamily:
    """A named generator of admissible kernels indexed by a size parameter."""

    family_id: str
    d: int

    def __post_init__(self) -> None:
        if self.family_id not in FAMILY_IDS:
            raise HomsumError(f"unknown kernel family {self.family_id!r}; "
                              f"known: {', '.join(FAMILY_IDS)}")
        if self.family_id == "off-diagonal-pair":
            if self.d != 2:
                raise HomsumError("off-diagonal-pair family is degree 2 only")
        elif self.d < 2:
            raise HomsumError(f"family {self.family_id!r} needs degree >= 2")

    def kernel(self, n: int) -> Kernel:
        return family_kernel(self, n)

    @property
    def min_n(self) -> int:
        return {"off-diagonal-pair": 2, "product": self.d, "star": 2, "free-clt": 1}[
            self.family_id
        ]


def family_kernel(family: KernelFamily, n: int) -> Kernel:
    """The ``n``-th admissible kernel of a named family."""
    d = family.d
    if n < family.min_n:
        raise HomsumError(
            f"family {family.family_id!r} (d={d}) needs n >= {family.min_n}, got {n}"
        )
    if family.family_id == "off-diagonal-pair":
        entries = {t: Fraction(1) for t in itertools.combinations(range(1, n + 1), 2)}
        return Kernel(n, 2, entries, Fraction(1, 2 * n * (n - 1)))
    if family.family_id == "product":
        return Kernel(n, d, {tuple(range(1, d + 1)): Fraction(1, factorial(d))}, 1)
    if family.family_id == "star":
        # hub index 1 plus (n-1) disjoint blocks of d-1 fresh indices
        entries: dict[tuple[int, ...], Fraction] = {}
        nxt = 2
        for _ in range(n - 1):
            block = tuple(range(nxt, nxt + d - 1))
            nxt += d - 1
            entries[(1, *block)] = Fraction(1, factorial(d))
        return Kernel(nxt - 1, d, entries, Fraction(1, n - 1))
    # free-clt: block sums over residue classes mod d on [n*d]
    entries = {}
    for choices in itertools.product(range(n), repeat=d):
        t = tuple(sorted(j * d + r for r, j in enumerate(choices, start=1)))
        entries[t] = Fraction(1, factorial(d))
    return Kernel(n * d, d, entries, Fraction(1, n**d))


def random_admissible_kernel(
    rng: random.Random,
    d: int,
    n: int,
    density: float = 0.85,
    max_num: int = 3,
    max_den: int = 3,
) -> Kernel:
    """Random exact-rational admissible kernel: small random rational entries
    with the normalization carried exactly by ``scale2``."""
    if n < d:
        raise HomsumError(f"need n >= d for a non-trivial kernel, got n={n}, d={d}")
    entries: dict[tuple[int, ...], Fraction] = {}
    for t in itertools.combinations(range(1, n + 1), d):
        if rng.random() < density:
            v = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
            if v:
                entries[t] = v
    if not entries:
        entries[tuple(range(1, d + 1))] = Fraction(1)
    base = Kernel(n, d, entries, 1)
    return Kernel(n, d, entries, 1 / base.gamma_norm())
