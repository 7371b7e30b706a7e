"""Randomized verification suites: formula-vs-oracle identities and property
invariants, runnable from the CLI and reused by the acceptance tests.

All identities are exact in exact mode: a check fails on any nonzero
deviation, and the first failing case is serialized for replay.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .classical import (
    classical_fourth_moment_formula,
    classical_fourth_moment_oracle,
    gaussian_fourth_moment,
    mixture_identity_check,
)
from .free import (
    free_difference_identity,
    free_fourth_moment,
    free_fourth_moment_oracle,
    semicircular_fourth_moment_contraction,
    semicircular_moment,
)
from .kernels import Kernel, random_admissible_kernel
from .laws import ClassicalLaw, FreeLaw
from .partitions import (
    BlockProfile,
    IntervalPattern,
    enumerate_partitions,
    is_noncrossing,
    respects,
    rho_partitions,
)
from .reports import jsonable

CLASSICAL_M4 = (Fraction(1), Fraction(2), Fraction(3), Fraction(9, 2))
FREE_KAPPA4 = (Fraction(-1), Fraction(0), Fraction(1), Fraction(3))


@dataclass
class IdentityCheck:
    name: str
    cases: int = 0
    failures: int = 0
    max_deviation: float = 0.0
    failing_case: dict | None = None

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def record(self, equal: bool, deviation: float = 0.0, case: dict | None = None) -> None:
        self.cases += 1
        if not equal:
            self.failures += 1
            self.max_deviation = max(self.max_deviation, abs(deviation))
            if self.failing_case is None:
                self.failing_case = case

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "cases": self.cases,
            "failures": self.failures,
            "max_deviation": self.max_deviation,
            "pass": self.ok,
        }
        if self.failing_case is not None:
            out["failing_case"] = jsonable(self.failing_case)
        return out


@dataclass
class VerificationReport:
    scope: str
    checks: list[IdentityCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> dict:
        return {
            "scope": self.scope,
            "pass": self.ok,
            "checks": [c.to_json() for c in self.checks],
        }


def _double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def verify_partitions(max_ground: int = 10, rho_degrees=(2, 3)) -> VerificationReport:
    """Counting identities and predicate cross-checks for the partition engine."""
    report = VerificationReport("partitions")
    pairs = BlockProfile({2})

    counts = IdentityCheck("pairing count is (m-1)!! for even m, 0 for odd m")
    for m in range(2, max_ground + 1):
        got = len(enumerate_partitions(m, pairs))
        want = _double_factorial(m - 1) if m % 2 == 0 else 0
        counts.record(got == want, abs(got - want), {"m": m, "got": got, "want": want})
    report.checks.append(counts)

    catalan = IdentityCheck("non-crossing pairing count is Catalan C_{m/2}")
    for m in range(2, max_ground + 1, 2):
        got = len(enumerate_partitions(m, pairs, noncrossing=True))
        k = m // 2
        want = comb(2 * k, k) // (k + 1)
        catalan.record(got == want, abs(got - want), {"m": m, "got": got, "want": want})
    report.checks.append(catalan)

    filt = IdentityCheck("constrained enumeration equals post-filtering")
    for d, k in ((2, 4), (1, 6), (3, 2)):
        m = d * k
        pattern = IntervalPattern(d, k)
        profile = BlockProfile({2, 3, 4}) if m <= 8 else pairs
        direct = enumerate_partitions(m, profile, respect=pattern, noncrossing=True)
        filtered = [
            p
            for p in enumerate_partitions(m, profile)
            if respects(p, pattern) and is_noncrossing(p)
        ]
        filt.record(direct == sorted(filtered), 0.0, {"d": d, "k": k})
    report.checks.append(filt)

    rho = IdentityCheck("rho partitions: unique completions, disjoint-union counts")
    for d in rho_degrees:
        rhos = rho_partitions(d)  # self-asserts uniqueness and the decomposition
        pattern = IntervalPattern(d, 4)
        full = enumerate_partitions(4 * d, BlockProfile({2, 4}), pattern, noncrossing=True)
        pure = enumerate_partitions(4 * d, pairs, pattern, noncrossing=True)
        ok = (
            len(rhos) == d
            and len(set(rhos)) == d
            and not any(r.is_pairing() for r in rhos)
            and len(full) == len(pure) + d
        )
        rho.record(ok, 0.0, {"d": d})
    report.checks.append(rho)
    return report


def _dev(a, b) -> float:
    try:
        return abs(float(a) - float(b))
    except OverflowError:
        return float("inf")


def _case(kernel: Kernel, extra: dict) -> dict:
    return {"kernel": kernel.to_json(), **extra}


def verify_classical(
    d: int = 2,
    n: int = 4,
    cases: int = 50,
    seed: int = 0,
    m4_values=CLASSICAL_M4,
) -> VerificationReport:
    """Formula-vs-oracle agreement plus the classical property invariants on
    random exact-rational admissible kernels."""
    rng = random.Random(seed)
    report = VerificationReport("classical")
    agree = IdentityCheck(f"closed form == partition oracle (d={d}, n={n})")
    positive = IdentityCheck("Gaussian fourth cumulant of the sum is >= 0")
    monotone = IdentityCheck("fourth moment monotone in the entry law when chi4 >= 0")
    scale_cov = IdentityCheck("scaling the kernel by c scales the fourth moment by c^4")
    relabel_inv = IdentityCheck("index relabeling leaves the fourth moment unchanged")
    laws = [ClassicalLaw.from_fourth_moment(m4) for m4 in m4_values]
    for _ in range(cases):
        kernel = random_admissible_kernel(rng, d, n)
        gauss = gaussian_fourth_moment(kernel).value
        positive.record(gauss - 3 >= 0, _dev(gauss, 3), _case(kernel, {"E4_gaussian": gauss}))
        for law in laws:
            lhs = classical_fourth_moment_formula(kernel, law).value
            rhs = classical_fourth_moment_oracle(kernel, law).value
            agree.record(
                lhs == rhs,
                _dev(lhs, rhs),
                _case(kernel, {"m4": law.moment(4), "formula": lhs, "oracle": rhs}),
            )
            if law.chi(4) >= 0:
                monotone.record(
                    lhs >= gauss, _dev(lhs, gauss), _case(kernel, {"m4": law.moment(4)})
                )
        c = Fraction(rng.randint(1, 5), rng.randint(1, 5))
        law = laws[-1]
        scaled = classical_fourth_moment_formula(kernel.scaled(c), law).value
        base = classical_fourth_moment_formula(kernel, law).value
        scale_cov.record(scaled == c**4 * base, _dev(scaled, c**4 * base), _case(kernel, {"c": c}))
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        permuted = kernel.relabel({i + 1: p for i, p in enumerate(perm)})
        relabeled = classical_fourth_moment_formula(permuted, law).value
        relabel_inv.record(relabeled == base, _dev(relabeled, base), _case(kernel, {"perm": perm}))
    report.checks.extend([agree, positive, monotone, scale_cov, relabel_inv])
    return report


def verify_free(
    d: int = 2,
    n: int = 4,
    cases: int = 50,
    seed: int = 0,
    kappa4_values=FREE_KAPPA4,
) -> VerificationReport:
    """Free formula-vs-oracle agreement, the contraction identity, and the
    free property invariants."""
    rng = random.Random(seed)
    report = VerificationReport("free")
    agree = IdentityCheck(f"free closed form == non-crossing oracle (d={d}, n={n})")
    contraction = IdentityCheck("contraction identity == pairing enumeration")
    positive = IdentityCheck("semicircular scaled fourth moment >= 2")
    monotone = IdentityCheck("free fourth moment monotone when kappa4 >= 0")
    laws = [FreeLaw.from_fourth_moment(k4 + 2) for k4 in kappa4_values]
    dfact2 = factorial(d) ** 2
    for _ in range(cases):
        kernel = random_admissible_kernel(rng, d, n)
        semi_enum = semicircular_moment(kernel, 4).value
        semi_contr = semicircular_fourth_moment_contraction(kernel).value
        contraction.record(
            semi_enum == semi_contr,
            _dev(semi_enum, semi_contr),
            _case(kernel, {"enumeration": semi_enum, "contraction": semi_contr}),
        )
        positive.record(
            dfact2 * semi_contr >= 2,
            _dev(dfact2 * semi_contr, 2),
            _case(kernel, {"scaled": dfact2 * semi_contr}),
        )
        for law in laws:
            lhs = free_fourth_moment(kernel, law).value
            rhs = free_fourth_moment_oracle(kernel, law).value
            agree.record(
                lhs == rhs,
                _dev(lhs, rhs),
                _case(kernel, {"phi4": law.moment(4), "formula": lhs, "oracle": rhs}),
            )
            if law.kappa(4) >= 0:
                monotone.record(lhs >= semi_contr, _dev(lhs, semi_contr), _case(kernel, {}))
    report.checks.extend([agree, contraction, positive, monotone])
    return report


def verify_identities(
    d: int = 2,
    n: int = 4,
    cases: int = 25,
    seed: int = 0,
    include: str = "both",
) -> VerificationReport:
    """The mixture separation identity and the two-law difference identity on
    random kernels, weights and laws."""
    rng = random.Random(seed)
    report = VerificationReport("identities")
    mixture = IdentityCheck("mixture separation identity (exact)")
    difference = IdentityCheck("two-law fourth-cumulant difference identity (exact)")
    for _ in range(cases):
        kernel = random_admissible_kernel(rng, d, n)
        if include in ("both", "mixture"):
            law = ClassicalLaw.from_fourth_moment(rng.choice(CLASSICAL_M4))
            t = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n)]
            res = mixture_identity_check(kernel, law, t)
            mixture.record(
                res["equal"] and res["oracle_agrees"] in (True, None),
                _dev(res["lhs"], res["rhs"]),
                _case(kernel, {"t": t}),
            )
        if include in ("both", "difference"):
            law_a = FreeLaw.from_fourth_moment(Fraction(rng.randint(1, 8), 2))
            law_b = FreeLaw.from_fourth_moment(Fraction(rng.randint(1, 8), 2))
            res = free_difference_identity(kernel, law_a, law_b)
            difference.record(
                res["equal"],
                _dev(res["lhs"], res["rhs"]),
                _case(kernel, {"phi4_A": law_a.moment(4), "phi4_B": law_b.moment(4)}),
            )
    report.checks.extend(c for c in (mixture, difference) if c.cases)
    return report


def run_verification(
    scope: str = "all",
    d: int = 2,
    n: int = 4,
    cases: int = 50,
    seed: int = 0,
) -> list[VerificationReport]:
    reports = []
    id_d, id_n = min(d, 2), min(n, 4)
    id_cases = max(cases // 2, 10)
    if scope in ("all", "partitions"):
        reports.append(verify_partitions())
    if scope in ("all", "classical"):
        reports.append(verify_classical(d=d, n=n, cases=cases, seed=seed))
    if scope in ("all", "free"):
        reports.append(verify_free(d=d, n=n, cases=cases, seed=seed))
    if scope == "classical":
        reports.append(verify_identities(id_d, id_n, id_cases, seed + 1, include="mixture"))
    elif scope == "free":
        reports.append(verify_identities(id_d, id_n, id_cases, seed + 1, include="difference"))
    elif scope == "all":
        reports.append(verify_identities(id_d, id_n, id_cases, seed + 1, include="both"))
    if not reports:
        raise ValueError(f"unknown scope {scope!r}")
    return reports
