"""Command-line front end: trace sweeps with an on-disk cache, identity and
combinatorics verification suites, moment tables, histograms, and density export.

Exit codes: 0 success, 1 check failure, 2 usage/input error.  Worker count only
changes speed, never any emitted number.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from math import sqrt
from pathlib import Path

import numpy as np

from . import curves, ffield, hypfun, moments, theory

CACHE_ENV = "HYPMOMENTS_CACHE"
DEFAULT_PRIMES = (7, 13, 19, 31, 37, 61)
_D_FAMILY = {2: "legendre", 3: "d3", 4: "d4", 6: "d6"}

_INPUT_ERRORS = (
    ffield.CompositeInputError,
    ffield.TooSmallError,
    curves.UnknownFamilyError,
    curves.SingularFamilyError,
    curves.BadPrimeError,
    curves.SweepMismatchError,
    hypfun.ModulusMismatchError,
    moments.BadRangeError,
    theory.DomainError,
    ValueError,
    FileNotFoundError,
)


@dataclass
class RunConfig:
    cache_dir: Path
    threads: int
    output: str | None
    fmt: str


def _config(args) -> RunConfig:
    cache = getattr(args, "cache_dir", None) or os.environ.get(CACHE_ENV) or "sweep-cache"
    return RunConfig(
        cache_dir=Path(cache),
        threads=curves.resolve_threads(getattr(args, "threads", "auto")),
        output=getattr(args, "output", None),
        fmt=getattr(args, "format", "csv"),
    )


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")


def _parse_orders(spec: str) -> list[int]:
    """'0..6' -> [0..6]; '1,3,5' -> [1,3,5]; '4' -> [4]."""
    out: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if any(k < 0 for k in out):
        raise ValueError(f"negative order in {spec!r}")
    return out


def _family_from_args(args) -> curves.CurveFamily:
    if getattr(args, "family_file", None):
        return _families_from_file(args.family_file)[getattr(args, "index", 0)]
    if getattr(args, "family", None):
        return curves.builtin_family(args.family)
    raise ValueError("one of --family or --family-file is required")


def _families_from_file(path: str) -> list[curves.CurveFamily]:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("families", [data])
    fams = []
    for i, entry in enumerate(data):
        coeffs = [entry[k] for k in ("a1", "a2", "a3", "a4", "a6")]
        fams.append(curves.custom_family(coeffs, name=entry.get("name", f"custom{i}")))
    return fams


# ---------------------------------------------------------------------------
# sweep


def cmd_sweep(args) -> int:
    cfg = _config(args)
    family = _family_from_args(args)
    sweep = curves.ensure_sweep(family, args.p, cfg.cache_dir, threads=cfg.threads)
    path = cfg.cache_dir / f"{curves.sweep_cache_name(family, sweep.p)}.csv"
    print(path)
    return 0


# ---------------------------------------------------------------------------
# verify


def _check(checks: list, name: str, ok: bool, detail: str = "") -> bool:
    checks.append({"name": name, "status": "pass" if ok else "fail", "detail": detail})
    return ok


def _verify_identities(primes, checks: list) -> None:
    for p in primes:
        ctx = ffield.build_field(p)
        sweeps = {}
        negs = {}
        for d, name in _D_FAMILY.items():
            fam = curves.builtin_family(name)
            sweeps[d] = curves.trace_sweep(fam, ctx)
            negs[d] = curves.negated_sweep(fam, sweeps[d])
        cl = curves.trace_sweep(curves.builtin_family("clausen"), ctx)

        for d in (2, 3, 4, 6):
            datum = hypfun.length2_datum(d)
            if (p - 1) % datum.modulus:
                continue
            bad = None
            for lam in range(2, p):
                if sweeps[d].bad_mask[lam]:
                    continue
                direct = hypfun.hp_direct(ctx, datum, lam)
                if direct != int(sweeps[d].traces[lam]):
                    bad = (lam, direct, int(sweeps[d].traces[lam]))
                    break
            _check(checks, f"length2 trace identity p={p} d={d}", bad is None,
                   "" if bad is None else f"counterexample (p={p}, d={d}, lambda={bad[0]}): "
                                          f"direct={bad[1]} trace={bad[2]}")

        for d in (2, 3, 4, 6):
            datum = hypfun.length4_datum(d)
            if (p - 1) % datum.modulus:
                continue
            bad = None
            for mu in range(2, p):
                direct = hypfun.hp_direct(ctx, datum, mu)
                via = hypfun.hp_via_traces(d, sweeps[d], negs[d], mu)
                if direct != via:
                    bad = (mu, direct, via)
                    break
            _check(checks, f"length4 trace identity p={p} d={d}", bad is None,
                   "" if bad is None else f"counterexample (p={p}, d={d}, mu={bad[0]}): "
                                          f"direct={bad[1]} traces={bad[2]}")

        datum = hypfun.clausen_datum()
        bad = None
        for lam in range(1, p - 1):
            mu = lam * pow(lam + 1, p - 2, p) % p
            direct = hypfun.hp_direct(ctx, datum, mu)
            rhs = int(ctx.quadchar[(lam + 1) % p]) * (int(cl.traces[lam]) ** 2 - p)
            if direct != rhs:
                bad = (lam, direct, rhs)
                break
        _check(checks, f"clausen symmetric-square identity p={p}", bad is None,
               "" if bad is None else f"counterexample (p={p}, lambda={bad[0]}): "
                                      f"direct={bad[1]} curve={bad[2]}")


def _verify_combinatorics(max_order: int, checks: list) -> None:
    from math import factorial

    ok = all(
        theory.catalan(n) == factorial(2 * n) // (factorial(n) * factorial(n + 1))
        for n in range(max_order + 1)
    )
    _check(checks, "catalan factorial formula", ok)

    ok = all(
        sum(theory.multiplicity_nm(m, r) * (r + 1) for r in range(m % 2, m + 1, 2)) == 2**m
        and theory.multiplicity_nm(m, m) == 1
        for m in range(max_order + 1)
    )
    _check(checks, "tensor-power multiplicities dimension count", ok)

    from math import comb

    ok = all(
        sum(comb(m, i) * theory.sym2_multiplicity(i) for i in range(m + 1)) == theory.catalan(m)
        for m in range(max_order + 1)
    )
    _check(checks, "symmetric-square multiplicity recurrence", ok)

    ok = all(theory.combmom_check(m)[0] == theory.combmom_check(m)[1]
             for m in range(1, max_order + 1))
    _check(checks, "Catalan convolution identity", ok)

    ok = all((lambda t: t[0] == t[1])(theory.catalan_gamma_identity(m))
             for m in range(max_order + 1))
    _check(checks, "Catalan gamma-ratio identity", ok)


def _verify_density(checks: list) -> None:
    total = theory.theorem1_cdf(-4.0, 4.0)
    _check(checks, "length4 density normalization", abs(total - 1.0) <= 1e-6,
           f"integral={total!r}")
    for m in (1, 2, 3, 4):
        mom = theory.theorem1_moment(m)
        lim = theory.theorem1_limit(m)
        _check(checks, f"length4 density moment m={m}", abs(mom - lim) <= 1e-3,
               f"quadrature={mom!r} limit={lim}")
    for m in range(5):
        mom = theory.semicircle_moment(m)
        lim = theory.theorem3_limit(m)
        _check(checks, f"semicircle moment m={m}", abs(mom - lim) <= 1e-9,
               f"quadrature={mom!r} limit={lim}")
    for n, m in ((1, 1), (2, 2), (2, 0), (4, 2)):
        mom = theory.product_semicircle_moment(n, m)
        lim = theory.theorem2_limit(n, m)
        _check(checks, f"product-semicircle moment (n,m)=({n},{m})", abs(mom - lim) <= 1e-9,
               f"quadrature={mom!r} limit={lim}")
    try:
        theory.meijer_transform_checks()
        _check(checks, "Meijer-G transform identities", True)
    except theory.CheckFailureError as exc:
        _check(checks, "Meijer-G transform identities", False, str(exc))
    cdf = theory.theorem1_cdf_fn()
    grid = np.linspace(-4.0, 4.0, 1000)
    vals = cdf(grid)
    _check(checks, "length4 cdf nondecreasing", bool(np.all(np.diff(vals) >= -1e-12)))


def cmd_verify(args) -> int:
    cfg = _config(args)
    checks: list[dict] = []
    if args.suite == "identities":
        primes = [int(x) for x in args.primes.split(",")] if args.primes else list(DEFAULT_PRIMES)
        _verify_identities(primes, checks)
    elif args.suite == "combinatorics":
        _verify_combinatorics(args.max_order, checks)
    elif args.suite == "density":
        _verify_density(checks)
    else:
        raise ValueError(f"unknown suite {args.suite!r}")
    failures = [c for c in checks if c["status"] == "fail"]
    report = {"suite": args.suite, "checks": checks, "failures": len(failures)}
    _emit(json.dumps(report, indent=2), cfg.output)
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# moments


def _pair_sweeps_for_theorem1(d: int, p: int, cfg: RunConfig):
    fam = curves.builtin_family(_D_FAMILY[d])
    plus = curves.ensure_sweep(fam, p, cfg.cache_dir, threads=cfg.threads)
    minus = curves.ensure_negated_sweep(fam, p, cfg.cache_dir, threads=cfg.threads)
    return plus, minus


def _boundary_values(theorem: int, d: int, p: int) -> dict[int, int]:
    ctx = ffield.build_field(p)
    if theorem == 1:
        datum = hypfun.length4_datum(d)
        h1 = hypfun.hp_direct(ctx, datum, 1)
        return {0: 1, 1: h1, p - 1: h1}
    if theorem == 3:
        datum = hypfun.length2_datum(d)
        return {0: 1, 1: hypfun.hp_direct(ctx, datum, 1)}
    if theorem == 4:
        datum = hypfun.clausen_datum()
        return {0: 1, 1: hypfun.hp_direct(ctx, datum, 1)}
    raise ValueError("boundary contributions apply to theorems 1, 3, 4")


def cmd_moments(args) -> int:
    cfg = _config(args)
    p = args.p
    reports: list[moments.MomentReport] = []
    ms = _parse_orders(args.m)
    boundary = None
    if args.include_boundary and args.theorem in (1, 3, 4):
        boundary = _boundary_values(args.theorem, args.d, p)
    if args.theorem == 1:
        plus, minus = _pair_sweeps_for_theorem1(args.d, p, cfg)
        reports = [moments.theorem1_empirical(args.d, plus, minus, m, boundary) for m in ms]
    elif args.theorem == 2:
        if args.pair_file:
            fam1, fam2 = _families_from_file(args.pair_file)[:2]
        else:
            names = args.pair.split(",")
            if len(names) != 2:
                raise ValueError("--pair needs two comma-separated family ids")
            fam1, fam2 = (curves.builtin_family(n.strip()) for n in names)
        s1 = curves.ensure_sweep(fam1, p, cfg.cache_dir, threads=cfg.threads)
        s2 = curves.ensure_sweep(fam2, p, cfg.cache_dir, threads=cfg.threads)
        ns = _parse_orders(args.n)
        reports = [moments.mixed_empirical(s1, s2, n, m) for n in ns for m in ms]
    elif args.theorem == 3:
        fam = curves.builtin_family(_D_FAMILY[args.d])
        sweep = curves.ensure_sweep(fam, p, cfg.cache_dir, threads=cfg.threads)
        reports = [moments.theorem3_empirical(args.d, sweep, m, boundary) for m in ms]
    elif args.theorem == 4:
        fam = curves.builtin_family("clausen")
        sweep = curves.ensure_sweep(fam, p, cfg.cache_dir, threads=cfg.threads)
        ctx = ffield.build_field(p)
        reports = [moments.theorem4_empirical(sweep, ctx, m, boundary) for m in ms]
    else:
        raise ValueError(f"unknown theorem {args.theorem}")

    if cfg.fmt == "json":
        _emit(json.dumps([r.to_json_dict() for r in reports], indent=2), cfg.output)
    else:
        lines = ["order_n,order_m,empirical,limit,deviation,excluded"]
        for r in reports:
            n_s = "" if r.n is None else str(r.n)
            lines.append(f"{n_s},{r.m},{r.empirical!r},{r.limit!r},{r.deviation!r},{r.excluded}")
        _emit("\n".join(lines), cfg.output)
    return 0


# ---------------------------------------------------------------------------
# histogram


def _svg_histogram(hist: moments.Histogram, curve: list[tuple[float, float]], path: str) -> None:
    w, h, ml, mb = 800.0, 480.0, 50.0, 30.0
    edges = hist.bin_edges
    heights = hist.normalized_heights
    xmin, xmax = float(edges[0]), float(edges[-1])
    ymax = 1.05 * max(float(heights.max() if len(heights) else 0.0),
                      max((y for _, y in curve), default=0.0), 1e-9)

    def sx(x):
        return ml + (x - xmin) / (xmax - xmin) * (w - ml - 10)

    def sy(y):
        return h - mb - y / ymax * (h - mb - 10)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
        f'viewBox="0 0 {w:.0f} {h:.0f}">',
        f'<line x1="{ml}" y1="{h - mb}" x2="{w - 10}" y2="{h - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{h - mb}" x2="{ml}" y2="10" stroke="black"/>',
    ]
    for i, hv in enumerate(heights):
        x0, x1 = sx(float(edges[i])), sx(float(edges[i + 1]))
        y = sy(float(hv))
        parts.append(
            f'<rect x="{x0:.2f}" y="{y:.2f}" width="{x1 - x0:.2f}" '
            f'height="{h - mb - y:.2f}" fill="#9ecae1" stroke="#3182bd" stroke-width="0.5"/>'
        )
    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in curve)
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#d62728" stroke-width="2"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def cmd_histogram(args) -> int:
    cfg = _config(args)
    p = args.p
    if args.theorem == 1:
        plus, minus = _pair_sweeps_for_theorem1(args.d, p, cfg)
        good = plus.good_mask() & minus.good_mask()
        good[[0, 1, p - 1]] = False
        samples = (plus.traces + minus.traces)[good] / sqrt(p)
        lo, hi = -4.0, 4.0
        xs = np.linspace(lo, hi, 400)
        curve = [(float(x), theory.theorem1_pdf(float(x))) for x in xs]
    elif args.theorem == 3:
        fam = curves.builtin_family(_D_FAMILY[args.d])
        sweep = curves.ensure_sweep(fam, p, cfg.cache_dir, threads=cfg.threads)
        good = sweep.good_mask().copy()
        good[[0, 1]] = False
        samples = sweep.traces[good] / sqrt(p)
        lo, hi = -2.0, 2.0
        xs = np.linspace(lo, hi, 400)
        curve = [(float(x), theory.semicircle_pdf(float(x))) for x in xs]
    else:
        raise ValueError("histogram supports theorems 1 and 3")
    hist = moments.histogram_build(samples, lo, hi, args.bins)
    _emit("\n".join(hist.csv_lines()), cfg.output)
    if args.svg:
        _svg_histogram(hist, curve, args.svg)
    return 0


# ---------------------------------------------------------------------------
# density


def cmd_density(args) -> int:
    cfg = _config(args)
    rows = theory.density_table(args.kind, args.grid)
    if args.range:
        lo, hi = (float(x) for x in args.range.split(","))
        spec = theory.density_spec(args.kind)
        slo, shi = spec.support
        if not (slo <= lo < hi <= shi):
            raise ValueError(f"range [{lo},{hi}] outside support [{slo},{shi}]")
        ts = np.linspace(lo, hi, args.grid)
        if args.kind == "semicircle":
            rows = [(float(t), theory.semicircle_pdf(float(t)), theory.semicircle_cdf(float(t)))
                    for t in ts]
        else:
            cdf = theory.theorem1_cdf_fn()
            rows = [(float(t), theory.theorem1_pdf(float(t)), cdf(float(t))) for t in ts]
    lines = ["t,pdf,cdf"] + [f"{t!r},{pdf!r},{c!r}" for t, pdf, c in rows]
    _emit("\n".join(lines), cfg.output)
    return 0


# ---------------------------------------------------------------------------
# parser / entry point


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="hypmoments", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--cache-dir", default=None, help=f"sweep cache dir (or ${CACHE_ENV})")
        sp.add_argument("--threads", default="auto", help="worker count or 'auto'")
        sp.add_argument("--output", default=None, help="output path (default stdout)")
        sp.add_argument("--format", default="csv", choices=("csv", "json"))

    sp = sub.add_parser("sweep", help="compute or load a trace sweep")
    sp.add_argument("--family", default=None, help="builtin family id")
    sp.add_argument("--family-file", default=None, help="JSON family (or list) file")
    sp.add_argument("--index", type=int, default=0, help="entry index within --family-file")
    sp.add_argument("--p", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run an exact/numeric verification suite")
    sp.add_argument("--suite", required=True, choices=("identities", "combinatorics", "density"))
    sp.add_argument("--primes", default=None, help="comma-separated primes (identities)")
    sp.add_argument("--max-order", type=int, default=30)
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("moments", help="empirical moments against their limits")
    sp.add_argument("--theorem", type=int, required=True, choices=(1, 2, 3, 4))
    sp.add_argument("--d", type=int, default=2, choices=(2, 3, 4, 6))
    sp.add_argument("--pair", default=None, help="two builtin ids, comma-separated")
    sp.add_argument("--pair-file", default=None, help="JSON file with two families")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", default="0", help="first orders, e.g. 2 or 0..4 or 1,3")
    sp.add_argument("--m", default="0..6", help="second orders")
    sp.add_argument("--include-boundary", action="store_true",
                    help="add exact boundary H values via the Gauss-sum path")
    common(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("histogram", help="normalized-value histogram with density overlay")
    sp.add_argument("--theorem", type=int, required=True, choices=(1, 3))
    sp.add_argument("--d", type=int, default=2, choices=(2, 3, 4, 6))
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--bins", type=int, default=60)
    sp.add_argument("--svg", default=None, help="write an SVG overlay plot here")
    common(sp)
    sp.set_defaults(func=cmd_histogram)

    sp = sub.add_parser("density", help="tabulate a limiting density")
    sp.add_argument("--kind", required=True, choices=("theorem1", "semicircle"))
    sp.add_argument("--grid", type=int, default=801)
    sp.add_argument("--range", default=None, help="lo,hi within the support")
    common(sp)
    sp.set_defaults(func=cmd_density)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except theory.QuadratureFailureError as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return 1
    except theory.CheckFailureError as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return 1
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
