"""Moments of free homogeneous sums: semicircular moments via non-crossing
pairings, the fourth-moment contraction identity, the nested free-cumulant
closed form, and the non-crossing partition oracle with its structural
pairs-plus-one-four-block decomposition.

Scaling convention: a homogeneous sum over an admissible kernel has second
moment ``1/d!``, so "target" comparisons use the ``d!``-rescaled sum.  Reports
carry both the raw value and the ``d!^(k/2)``-scaled value.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import factorial

from .contract import KernelContractor, cap_check, partition_class_size, weighted_sum
from .errors import AssumptionViolation, HomsumError
from .kernels import Kernel, contraction_square_sum, slice_kernel
from .laws import FreeLaw
from .partitions import rho_partitions
from .reports import MomentReport

PAIRS = frozenset({2})
PAIRS_FOURS = frozenset({2, 4})
PAIRS_TRIPLES = frozenset({2, 3})


def free_second_moment(kernel: Kernel) -> Fraction:
    """``phi(Q(f)^2) = sum(f^2)`` (note: no ``d!`` here, unlike the classical
    case; only one non-crossing matching of the two index groups survives)."""
    return kernel.sq_norm()


def _with_scale(report_value: Fraction, kernel: Kernel, order: int):
    """Apply the outstanding half-power of the kernel scale for odd orders."""
    if order % 2 == 0 or kernel.scale2 == 1:
        return report_value
    return float(report_value) * math.sqrt(kernel.scale2)


def _scaled(value, d: int, order: int):
    s = factorial(d) ** Fraction(order, 2)
    if order % 2 == 0:
        return value * int(factorial(d) ** (order // 2))
    return float(value) * float(s)


def semicircular_moment(kernel: Kernel, order: int) -> MomentReport:
    """``phi(Q_S(f)^k)`` by enumerating non-crossing pairings of the ``k*d``
    positions that respect the ``k`` index groups."""
    if order < 1:
        raise HomsumError(f"moment order must be >= 1, got {order}")
    cap_check(order * kernel.d)
    contractor = KernelContractor.of(kernel)
    coeff, _ = weighted_sum(contractor, order, PAIRS, True, lambda sizes: Fraction(1))
    value = _with_scale(coeff, kernel, order)
    detail = {
        "pairings": partition_class_size(kernel.d, PAIRS, order, True),
        "coefficient": coeff,
        "scale2": kernel.scale2,
    }
    return MomentReport(
        value=value,
        method="enumeration",
        detail=detail,
        order=order,
        scaled_value=_scaled(value, kernel.d, order),
    )


def _contraction_fourth(kernel: Kernel) -> Fraction:
    total = 2 * free_second_moment(kernel) ** 2
    for s in range(1, kernel.d):
        total += contraction_square_sum(kernel, s)
    return total


def semicircular_fourth_moment_contraction(kernel: Kernel) -> MomentReport:
    """``phi(Q_S(f)^4)`` from the contraction identity
    ``2 (sum f^2)^2 + sum_s ||overlap-s contraction||^2``."""
    detail = {"2*(sum f^2)^2": 2 * free_second_moment(kernel) ** 2}
    for s in range(1, kernel.d):
        detail[f"s={s}"] = contraction_square_sum(kernel, s)
    value = _contraction_fourth(kernel)
    return MomentReport(
        value=value,
        method="closed-form",
        detail=detail,
        order=4,
        scaled_value=_scaled(value, kernel.d, 4),
    )


def slice_fourth_sum(kernel: Kernel) -> Fraction:
    """``sum over k in [n] of phi(Q_S(f(k,.))^4)`` via the contraction
    identity on each degree-(d-1) slice."""
    if kernel.d < 2:
        raise HomsumError("slice fourth moments need degree >= 2")
    _, per_k = _free_components(kernel)
    return sum(per_k.values(), Fraction(0))


def _free_components(kernel: Kernel) -> tuple[Fraction, dict[int, Fraction]]:
    """Law-independent pieces of the free closed form: the semicircular fourth
    moment and each slice's semicircular fourth moment."""
    comps = kernel._cache.get("free_components")
    if comps is None:
        semi = _contraction_fourth(kernel)
        per_k = {}
        for k in range(1, kernel.n + 1):
            sl = slice_kernel(kernel, (k,))
            if sl.entries:
                per_k[k] = _contraction_fourth(sl)
        comps = (semi, per_k)
        kernel._cache["free_components"] = comps
    return comps


def free_fourth_moment(kernel: Kernel, law: FreeLaw) -> MomentReport:
    """``phi(Q_Y(f)^4)``: the semicircular value plus the fourth free cumulant
    of the law times the slice fourth-moment sum.  No third-moment condition
    is needed."""
    violations = law.assumption_b_violations()
    if violations:
        raise AssumptionViolation(
            "free closed form needs a centered unit-variance law; violated: "
            + "; ".join(violations)
        )
    if kernel.d < 2:
        raise HomsumError("free fourth moment needs degree >= 2")
    kappa4 = law.kappa(4)
    semi, per_k = _free_components(kernel)
    correction_per_k = {f"k={k}": kappa4 * v for k, v in per_k.items()}
    total_slices = sum(per_k.values(), Fraction(0))
    value = semi + kappa4 * total_slices
    detail = {
        "semicircular": semi,
        "kappa4": kappa4,
        "slice_fourth_sum": total_slices,
        "correction": correction_per_k,
    }
    return MomentReport(
        value=value,
        method="closed-form",
        detail=detail,
        order=4,
        scaled_value=_scaled(value, kernel.d, 4),
    )


def free_fourth_moment_oracle(kernel: Kernel, law: FreeLaw) -> MomentReport:
    """Ground-truth ``phi(Q_Y(f)^4)``: enumerate the non-crossing partitions
    of the 4d positions respecting the four groups with block sizes {2, 4},
    weight by blockwise free cumulants, and contract.

    Also re-derives the structural decomposition: the class splits into pure
    pairings plus the ``d`` single-four-block partitions, whose contribution
    must equal ``kappa_4`` times the slice fourth-moment sum.
    """
    violations = law.assumption_b_violations()
    if violations:
        raise AssumptionViolation(
            "free oracle needs a centered unit-variance law; violated: "
            + "; ".join(violations)
        )
    d = kernel.d
    if d < 2:
        raise HomsumError("free oracle needs degree >= 2")
    cap_check(4 * d)
    kappa = {2: law.kappa(2), 4: law.kappa(4)}

    def weight(sizes: tuple[int, ...]):
        w = Fraction(1)
        for s in sizes:
            w *= kappa[s]
        return w

    contractor = KernelContractor.of(kernel)
    value, by_sizes = weighted_sum(contractor, 4, PAIRS_FOURS, True, weight)
    pairing_part, _ = weighted_sum(contractor, 4, PAIRS, True, weight)
    rho_part = Fraction(0)
    for rho in rho_partitions(d):
        rho_part += weight(rho.block_sizes()) * contractor.partition_value(rho, 4)
    if pairing_part + rho_part != value:
        raise HomsumError("pairs + rho decomposition failed to re-sum (bug)")
    expected_rho = kappa[4] * slice_fourth_sum(kernel) * kappa[2] ** (2 * d - 2)
    if rho_part != expected_rho:
        raise HomsumError(
            "rho-partition contribution disagrees with the slice fourth-moment sum"
        )
    n_pairings = partition_class_size(d, PAIRS, 4, True)
    detail = {
        "partitions": partition_class_size(d, PAIRS_FOURS, 4, True),
        "pairings": n_pairings,
        "rho_count": d,
        "pairing_part": pairing_part,
        "rho_part": rho_part,
        "by_block_sizes": {" +".join(map(str, k)): v for k, v in sorted(by_sizes.items())},
    }
    return MomentReport(
        value=value,
        method="enumeration",
        detail=detail,
        order=4,
        scaled_value=_scaled(value, d, 4),
    )


def free_third_moment_oracle(kernel: Kernel, law: FreeLaw) -> MomentReport:
    """``phi(Q_Y(f)^3)`` by enumerating non-crossing, group-respecting
    partitions with blocks of sizes {2, 3}.  For even degree the class
    contains no 3-blocks, which is exactly why the third moment matches the
    semicircular one there."""
    cap_check(3 * kernel.d)
    kappa = {2: law.kappa(2), 3: law.kappa(3)}

    def weight(sizes: tuple[int, ...]):
        w = Fraction(1)
        for s in sizes:
            w *= kappa[s]
        return w

    contractor = KernelContractor.of(kernel)
    coeff, by_sizes = weighted_sum(contractor, 3, PAIRS_TRIPLES, True, weight)
    value = _with_scale(coeff, kernel, 3)
    detail = {
        "partitions": partition_class_size(kernel.d, PAIRS_TRIPLES, 3, True),
        "coefficient": coeff,
        "by_block_sizes": {" +".join(map(str, k)): v for k, v in sorted(by_sizes.items())},
    }
    return MomentReport(
        value=value,
        method="enumeration",
        detail=detail,
        order=3,
        scaled_value=_scaled(value, kernel.d, 3),
    )


def free_kappa4_of_sum(kernel: Kernel, law: FreeLaw) -> Fraction:
    """``kappa_4(Q_Y(f)) = phi(Q^4) - 2 phi(Q^2)^2``."""
    return free_fourth_moment(kernel, law).value - 2 * free_second_moment(kernel) ** 2


def free_difference_identity(kernel: Kernel, law_a: FreeLaw, law_b: FreeLaw) -> dict:
    """Check the two-law difference identity: the gap between the scaled
    fourth cumulants of the two sums equals the gap between the laws' fourth
    moments times the scaled slice fourth-moment sum."""
    d = kernel.d
    dfact2 = factorial(d) ** 2
    second = free_second_moment(kernel)
    phi_a = free_fourth_moment(kernel, law_a).value
    phi_b = free_fourth_moment(kernel, law_b).value
    kappa_a = phi_a - 2 * second**2
    kappa_b = phi_b - 2 * second**2
    slices = slice_fourth_sum(kernel)
    lhs = dfact2 * kappa_a
    rhs = dfact2 * kappa_b + (law_a.moment(4) - law_b.moment(4)) * dfact2 * slices
    return {
        "lhs": lhs,
        "rhs": rhs,
        "equal": lhs == rhs,
        "kappa4_A": dfact2 * kappa_a,
        "kappa4_B": dfact2 * kappa_b,
        "slice_fourth_sum": slices,
    }
