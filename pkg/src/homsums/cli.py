"""Command-line front end: verification suites, family diagnostics sweeps,
single-kernel moment queries, and Monte Carlo sampling.

Subcommands: ``verify``, ``analyze``, ``moments``, ``sample``.  Shared flags:
``--seed``, ``--mode exact|float``, ``--out``, ``--format csv|json``.
Output files are written atomically.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import tempfile
from fractions import Fraction

from .classical import (
    ORACLE_MAX_DEGREE,
    classical_fourth_moment_formula,
    classical_fourth_moment_oracle,
    classical_second_moment,
)
from .diagnostics import analyze_family, rows_to_csv, sweep_summary
from .errors import HomsumError
from .free import (
    free_fourth_moment,
    free_fourth_moment_oracle,
    free_second_moment,
    free_third_moment_oracle,
)
from .kernels import FAMILY_IDS, Kernel
from .laws import ClassicalLaw, FreeLaw
from .montecarlo import SamplerSpec, estimate_moment
from .partitions import GROUND_CAP
from .reports import MomentReport
from .verify import run_verification

NAMED_CLASSICAL = {
    "gaussian": ClassicalLaw.gaussian,
    "rademacher": ClassicalLaw.rademacher,
}
NAMED_FREE = {
    "semicircle": FreeLaw.semicircle,
    "free-rademacher": FreeLaw.free_rademacher,
}

_POWER = re.compile(r"^(\d+)\^\((\d+)/(\d+)\)$")


def parse_number(text: str) -> Fraction | float:
    """Accept exact rationals ('9/2'), decimals ('4.5'), and rational powers
    ('3^(1/2)' for the square root of 3)."""
    text = text.strip()
    m = _POWER.match(text)
    if m:
        base, p, q = (int(g) for g in m.groups())
        return float(base) ** (p / q)
    try:
        return Fraction(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise HomsumError(f"cannot parse number {text!r}") from None


def parse_law(spec: str, regime: str):
    """A named law ('gaussian', 'semicircle', ...) or an explicit moment list
    like 'm4=9/2' or 'm3=0,m4=4.5'."""
    spec = spec.strip()
    named = NAMED_CLASSICAL if regime == "classical" else NAMED_FREE
    if spec in named:
        return named[spec]()
    fields: dict[str, Fraction | float] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise HomsumError(
                f"bad law spec {spec!r}: use a named law ({', '.join(named)}) "
                "or 'm3=...,m4=...'"
            )
        key, _, val = part.partition("=")
        key = key.strip().lower()
        if key not in ("m3", "m4"):
            raise HomsumError(f"bad law field {key!r}: only m3 and m4 are settable")
        fields[key] = parse_number(val)
    if "m4" not in fields:
        raise HomsumError(f"law spec {spec!r} must set m4")
    m3 = fields.get("m3", Fraction(0))
    cls = ClassicalLaw if regime == "classical" else FreeLaw
    return cls.from_fourth_moment(fields["m4"], m3)


def _write_out(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".homsums-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_kernel(path: str, mode: str) -> Kernel:
    kernel = Kernel.load(path)
    if mode == "float" and kernel.mode == "exact":
        kernel = Kernel(kernel.n, kernel.d, kernel.entries, kernel.scale2, "float")
    return kernel


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="random seed (u64)")
    parser.add_argument(
        "--mode", choices=("exact", "float"), default="exact", help="arithmetic tag for loaded kernels"
    )
    parser.add_argument("--out", default=None, help="output file (atomic write); default stdout")
    parser.add_argument("--format", choices=("csv", "json"), default=None, help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homsums",
        description="Exact fourth-moment engines for homogeneous sums in "
        "independent and freely independent variables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the randomized identity/property suites")
    p.add_argument("--scope", choices=("all", "classical", "free", "partitions"), default="all")
    p.add_argument("--d", type=int, default=2, help="kernel degree for randomized suites")
    p.add_argument("--n", type=int, default=4, help="index range for randomized suites")
    p.add_argument("--cases", type=int, default=50, help="random kernels per identity")
    _add_common(p)

    p = sub.add_parser("analyze", help="sweep a kernel family, emitting diagnostics rows")
    p.add_argument("family", choices=FAMILY_IDS)
    p.add_argument("--d", type=int, default=2, help="kernel degree")
    p.add_argument("--n-min", type=int, default=None, help="first family size (default: family minimum)")
    p.add_argument("--n-max", type=int, default=16, help="last family size")
    p.add_argument("--law", required=True, help="law spec, e.g. 'gaussian' or 'm4=9/2'")
    p.add_argument("--regime", choices=("classical", "free"), default="classical")
    _add_common(p)

    p = sub.add_parser("moments", help="exact moment reports for a kernel file")
    p.add_argument("kernel", help="kernel JSON file")
    p.add_argument("--law", required=True)
    p.add_argument("--regime", choices=("classical", "free"), default="classical")
    p.add_argument("--orders", default="2,4", help="comma-separated orders from {2,3,4}")
    _add_common(p)

    p = sub.add_parser("sample", help="Monte Carlo moment estimate for a kernel file")
    p.add_argument("kernel", help="kernel JSON file")
    p.add_argument("--law", required=True, help="sampler id: rademacher|gaussian|two-point|mixture-T|product-TX")
    p.add_argument("--regime", choices=("classical", "free"), default="classical")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--count", type=int, default=10**6)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--base", default="gaussian")
    _add_common(p)
    return parser


def cmd_verify(args) -> int:
    reports = run_verification(
        scope=args.scope, d=args.d, n=args.n, cases=args.cases, seed=args.seed
    )
    payload = {"pass": all(r.ok for r in reports), "reports": [r.to_json() for r in reports]}
    _write_out(json.dumps(payload, indent=1), args.out)
    for r in reports:
        for c in r.checks:
            status = "ok" if c.ok else "FAIL"
            print(f"[{status}] {r.scope}: {c.name} ({c.cases} cases)", file=sys.stderr)
    return 0 if payload["pass"] else 1


def cmd_analyze(args) -> int:
    law = parse_law(args.law, args.regime)
    n_min = args.n_min
    from .kernels import KernelFamily

    family = KernelFamily(args.family, args.d)
    if n_min is None:
        n_min = max(family.min_n, 2)
    if n_min > args.n_max:
        raise HomsumError(f"empty sweep: n-min {n_min} > n-max {args.n_max}")
    rows = analyze_family(args.family, args.d, range(n_min, args.n_max + 1), law, args.regime)
    fmt = args.format or "csv"
    if fmt == "csv":
        _write_out(rows_to_csv(rows), args.out)
    else:
        payload = {
            "family": args.family,
            "d": args.d,
            "regime": args.regime,
            "rows": [r.to_json() for r in rows],
            "summary": sweep_summary(rows),
        }
        _write_out(json.dumps(payload, indent=1), args.out)
    return 0


def _moment_reports(kernel: Kernel, law, regime: str, order: int) -> list[MomentReport]:
    oracle_ok = kernel.d <= ORACLE_MAX_DEGREE and 4 * kernel.d <= GROUND_CAP
    if regime == "classical":
        if order == 2:
            return [
                MomentReport(
                    value=classical_second_moment(kernel),
                    method="closed-form",
                    detail={"identity": "d! * sum(f^2)"},
                    order=2,
                )
            ]
        if order == 4:
            out = [classical_fourth_moment_formula(kernel, law)]
            if oracle_ok:
                out.append(classical_fourth_moment_oracle(kernel, law))
            return out
        raise HomsumError("classical reports cover orders 2 and 4")
    if order == 2:
        v = free_second_moment(kernel)
        return [
            MomentReport(
                value=v,
                method="closed-form",
                detail={"identity": "sum(f^2)"},
                order=2,
                scaled_value=v * math.factorial(kernel.d),
            )
        ]
    if order == 3:
        if 3 * kernel.d > GROUND_CAP:
            raise HomsumError("order-3 free moment beyond the enumeration cap")
        return [free_third_moment_oracle(kernel, law)]
    if order == 4:
        out = [free_fourth_moment(kernel, law)]
        if oracle_ok:
            out.append(free_fourth_moment_oracle(kernel, law))
        return out
    raise HomsumError("free reports cover orders 2, 3 and 4")


def cmd_moments(args) -> int:
    kernel = _load_kernel(args.kernel, args.mode)
    law = parse_law(args.law, args.regime)
    try:
        orders = sorted({int(o) for o in args.orders.split(",") if o.strip()})
    except ValueError:
        raise HomsumError(f"bad orders spec {args.orders!r}") from None
    payload: dict = {"kernel": args.kernel, "regime": args.regime, "orders": {}}
    for order in orders:
        payload["orders"][str(order)] = [r.to_json() for r in _moment_reports(kernel, law, args.regime, order)]
    _write_out(json.dumps(payload, indent=1), args.out)
    return 0


def cmd_sample(args) -> int:
    if args.regime == "free":
        raise HomsumError(
            "sampling is classical-only: free laws are moment sequences here, "
            "with no operator model to draw from"
        )
    kernel = _load_kernel(args.kernel, args.mode)
    spec = SamplerSpec(
        law=args.law,
        seed=args.seed,
        sample_count=args.count,
        alpha=args.alpha,
        q=args.q,
        base=args.base,
    )
    est = estimate_moment(kernel, spec, args.order)
    _write_out(json.dumps(est.to_json(), indent=1), args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "verify": cmd_verify,
        "analyze": cmd_analyze,
        "moments": cmd_moments,
        "sample": cmd_sample,
    }
    try:
        return handlers[args.command](args)
    except HomsumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
