"""Fourth moments of classical homogeneous sums, three independent ways:
the Wick pairing sum for Gaussian entries, the nested-cumulant closed form,
and a full partition-lattice oracle.

A note on the closed form's combinatorial constant: the number of
interval-respecting partitions of the four index groups with ``m`` blocks of
size 4 is ``binom(d,m)^4 * m!^3`` (choose an m-subset of slots in each of the
four groups, then match three of the subsets onto the first), so that is the
multiplier used here.  It is pinned by exact agreement with the partition
oracle and by the product- and star-kernel identities in the test suite.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .contract import KernelContractor, cap_check, partition_class_size, weighted_sum
from .errors import AssumptionViolation, GroundCapExceeded
from .kernels import Kernel, slice_kernel
from .laws import ClassicalLaw
from .partitions import GROUND_CAP
from .reports import MomentReport

PAIRS = frozenset({2})
ORACLE_SIZES = frozenset({2, 3, 4})

#: The partition oracle enumerates the full lattice on [4d]; degrees above
#: this are closed-form territory.
ORACLE_MAX_DEGREE = 4


def classical_second_moment(kernel: Kernel) -> Fraction:
    """``E[Q(f)^2] = d! * sum(f^2)`` for centered unit-variance entries."""
    return kernel.gamma_norm()


def gaussian_fourth_moment(kernel: Kernel) -> MomentReport:
    """``E[Q_N(f)^4]`` as the Wick sum over interval-respecting pairings of
    the 4d index positions.  Exact for exact kernels; admissibility is not
    required."""
    cap_check(4 * kernel.d)
    value = kernel._cache.get("gaussian4")
    if value is None:
        contractor = KernelContractor.of(kernel)
        value, _ = weighted_sum(contractor, 4, PAIRS, False, lambda sizes: Fraction(1))
        kernel._cache["gaussian4"] = value
    detail = {
        "pairings": partition_class_size(kernel.d, PAIRS, 4, False),
        "ground": 4 * kernel.d,
    }
    return MomentReport(value=value, method="enumeration", detail=detail)


def _quartic_diagonal_sum(kernel: Kernel) -> Fraction:
    """Sum of ``f(j_1..j_d)^4`` over all ordered tuples: the degenerate
    degree-0 slice term of the closed form."""
    acc = sum((v**4 for v in kernel.entries.values()), Fraction(0))
    return factorial(kernel.d) * acc * kernel.scale2**2


def _slice_fourth_sum(kernel: Kernel, m: int) -> Fraction:
    """``sum over j in [n]^m of E[Q_N(f(j,.)^4)]``.

    Tuples with repeats slice to the zero kernel, and the slice only depends
    on the index set, so the sum runs over m-subsets weighted by ``m!``.
    """
    if m == kernel.d:
        return _quartic_diagonal_sum(kernel)
    support: set[int] = set()
    for t in kernel.entries:
        support.update(t)
    total = Fraction(0)
    for subset in itertools.combinations(sorted(support), m):
        sl = slice_kernel(kernel, subset)
        if not sl.entries:
            continue
        total += gaussian_fourth_moment(sl).value
    return factorial(m) * total


def _formula_components(kernel: Kernel) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Law-independent pieces of the closed form: the Gaussian base value and
    the slice fourth-moment sums for every slice order."""
    comps = kernel._cache.get("formula_components")
    if comps is None:
        base = gaussian_fourth_moment(kernel).value
        sums = tuple(_slice_fourth_sum(kernel, m) for m in range(1, kernel.d + 1))
        comps = (base, sums)
        kernel._cache["formula_components"] = comps
    return comps


def classical_fourth_moment_formula(
    kernel: Kernel, law: ClassicalLaw, check_assumptions: bool = True
) -> MomentReport:
    """``E[Q_X(f)^4]`` by the nested-cumulant closed form: the Gaussian Wick
    term plus fourth-cumulant corrections from lower-order slice moments."""
    if check_assumptions:
        violations = law.assumption_a_violations()
        if violations:
            raise AssumptionViolation(
                "closed form needs a centered, unit-variance law with zero third "
                "moment; violated: " + "; ".join(violations)
            )
    d = kernel.d
    chi4 = law.chi(4)
    base, slice_sums = _formula_components(kernel)
    detail: dict = {"m=0": base}
    value = base
    for m in range(1, d + 1):
        if not chi4:
            detail[f"m={m}"] = Fraction(0)
            continue
        coeff = Fraction(comb(d, m)) ** 4 * Fraction(factorial(m)) ** 3 * chi4**m
        term = coeff * slice_sums[m - 1]
        detail[f"m={m}"] = term
        value = value + term
    detail["chi4"] = chi4
    return MomentReport(value=value, method="closed-form", detail=detail)


def classical_fourth_moment_oracle(kernel: Kernel, law: ClassicalLaw) -> MomentReport:
    """Ground-truth ``E[Q_X(f)^4]``: enumerate every partition of the 4d
    positions that respects the four index groups with block sizes in
    {2, 3, 4}, weight each by the product of blockwise cumulants, and contract
    the four kernel copies over block-constant index assignments."""
    d = kernel.d
    if d > ORACLE_MAX_DEGREE:
        raise GroundCapExceeded(
            f"partition oracle supports degree <= {ORACLE_MAX_DEGREE}, got {d}"
        )
    cap_check(4 * d)
    if law.moment(1) != 0:
        raise AssumptionViolation("partition oracle needs a centered law (m1 = 0)")
    chi = {s: law.chi(s) for s in (2, 3, 4)}

    def weight(sizes: tuple[int, ...]):
        w = Fraction(1)
        for s in sizes:
            w *= chi[s]
        return w

    contractor = KernelContractor.of(kernel)
    value, by_sizes = weighted_sum(contractor, 4, ORACLE_SIZES, False, weight)
    detail = {
        "partitions": partition_class_size(d, ORACLE_SIZES, 4, False),
        "by_block_sizes": {" +".join(map(str, k)): v for k, v in sorted(by_sizes.items())},
    }
    return MomentReport(value=value, method="enumeration", detail=detail)


# -- the mixture identity ------------------------------------------------------


def rescaled_kernel(kernel: Kernel, t_values: Sequence) -> Kernel:
    """Entrywise reweighting ``f(i_1..i_d) * t_{i_1} ... t_{i_d}``: symmetric,
    diagonal-vanishing, deliberately not renormalized."""
    t = [Fraction(x) for x in t_values]
    if len(t) != kernel.n:
        raise AssumptionViolation(
            f"need one weight per index: got {len(t)} for n = {kernel.n}"
        )
    if any(x <= 0 for x in t):
        raise AssumptionViolation("mixture weights must be positive")
    entries = {}
    for tup, v in kernel.entries.items():
        w = v
        for i in tup:
            w *= t[i - 1]
        entries[tup] = w
    return Kernel(kernel.n, kernel.d, entries, kernel.scale2, kernel.mode)


def mixture_identity_check(
    kernel: Kernel, law: ClassicalLaw, t_values: Sequence, use_oracle: bool | None = None
) -> dict:
    """Check the conditional-moment separation identity behind the mixture
    construction: with ``a = E[Q^4]`` and ``b = E[Q^2]`` conditioned on the
    weights,

        ``a - 6b + 3  ==  (a - 3b^2) + 3(b - 1)^2``

    evaluated exactly on the reweighted kernel.  (Averaging the left side
    over the weights gives back ``E[Q^4] - 3``; the displayed form is the
    pointwise identity under the average.)  Optionally cross-checks the
    closed-form fourth moment against the partition oracle.
    """
    resc = rescaled_kernel(kernel, t_values)
    b = classical_second_moment(resc)
    a = classical_fourth_moment_formula(resc, law).value
    lhs = a - 6 * b + 3
    rhs = (a - 3 * b * b) + 3 * (b - 1) ** 2
    if use_oracle is None:
        use_oracle = kernel.d <= ORACLE_MAX_DEGREE and 4 * kernel.d <= GROUND_CAP
    oracle_agrees = None
    if use_oracle:
        oracle_agrees = classical_fourth_moment_oracle(resc, law).value == a
    return {
        "second_moment": b,
        "fourth_moment": a,
        "lhs": lhs,
        "rhs": rhs,
        "equal": lhs == rhs,
        "oracle_agrees": oracle_agrees,
    }
