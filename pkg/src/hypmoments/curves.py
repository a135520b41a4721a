"""One-parameter elliptic-curve families over Q(lambda), their reductions mod p, and
Frobenius-trace sweeps computed through quadratic-character sums.

A family is six coefficient polynomials a1..a6 with exact rational coefficients.
Completing the square (valid for p != 2) turns every fiber into y^2 = f_lambda(x)
with f = 4x^3 + b2 x^2 + 2 b4 x + b6, so one quadratic-character table drives the
inner loop for all families: a_p(lambda) = -sum_x quadchar[f_lambda(x)].
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from pathlib import Path

import numpy as np

from .ffield import PrimeFieldContext, build_field

ARTIFACT_VERSION = "0.1.0"


class UnknownFamilyError(KeyError):
    """No builtin family under that identifier."""

    def __str__(self):
        return self.args[0] if self.args else ""


class SingularFamilyError(ValueError):
    """The discriminant vanishes identically; the generic fiber is not elliptic."""


class BadPrimeError(ValueError):
    """p < 5 or p divides a coefficient denominator of the family."""


class SweepMismatchError(ValueError):
    """Sweeps disagree on prime or family where agreement is required."""


# ---------------------------------------------------------------------------
# Exact rational polynomials


class RatPoly:
    """Immutable polynomial with Fraction coefficients, ascending order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *_):
        raise AttributeError("RatPoly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, RatPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RatPoly({list(self.coeffs)})"

    def __add__(self, other):
        other = other if isinstance(other, RatPoly) else RatPoly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return RatPoly([x + y for x, y in zip(a, b)])

    def __sub__(self, other):
        other = other if isinstance(other, RatPoly) else RatPoly([other])
        return self + other * -1

    def __mul__(self, other):
        if not isinstance(other, RatPoly):
            return RatPoly([c * Fraction(other) for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RatPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = RatPoly([1])
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def substitute_neg(self) -> "RatPoly":
        """Pullback lambda -> -lambda."""
        return RatPoly([c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs)])

    def as_int_pairs(self) -> tuple[int, tuple[int, ...]]:
        """(positive common denominator, integer numerators ascending)."""
        if not self.coeffs:
            return 1, (0,)
        den = lcm(*(c.denominator for c in self.coeffs))
        return den, tuple(int(c * den) for c in self.coeffs)

    def reduce_mod(self, p: int) -> tuple[int, ...]:
        """Coefficients mod p; BadPrimeError when p divides a denominator."""
        den, nums = self.as_int_pairs()
        if den % p == 0:
            raise BadPrimeError(f"p={p} divides a coefficient denominator ({den})")
        inv = pow(den % p, p - 2, p)
        return tuple(n % p * inv % p for n in nums)


def _poly_eval_mod(coeffs_mod: tuple[int, ...], lam: np.ndarray, p: int) -> np.ndarray:
    acc = np.zeros_like(lam)
    for c in reversed(coeffs_mod):
        acc = (acc * lam + c) % p
    return acc


def _as_ratpoly(obj) -> RatPoly:
    if isinstance(obj, RatPoly):
        return obj
    if isinstance(obj, dict):
        den = int(obj["den"])
        return RatPoly([Fraction(int(n), den) for n in obj["num"]])
    return RatPoly(obj if isinstance(obj, (list, tuple)) else [obj])


# ---------------------------------------------------------------------------
# Families


@dataclass(frozen=True)
class CurveFamily:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with derived quantities."""

    name: str
    a1: RatPoly
    a2: RatPoly
    a3: RatPoly
    a4: RatPoly
    a6: RatPoly
    b2: RatPoly
    b4: RatPoly
    b6: RatPoly
    b8: RatPoly
    c4: RatPoly
    c6: RatPoly
    delta: RatPoly

    def j_at(self, lam: Fraction) -> Fraction:
        # with the b-derived c4 and delta, the j-invariant is c4^3 / delta
        # (the familiar 1728 prefactor belongs to the short-form normalization)
        d = self.delta(lam)
        if d == 0:
            raise ZeroDivisionError(f"delta({lam}) = 0")
        return self.c4(lam) ** 3 / d

    def coefficient_payload(self) -> dict:
        out = {}
        for key in ("a1", "a2", "a3", "a4", "a6"):
            den, nums = getattr(self, key).as_int_pairs()
            out[key] = {"den": str(den), "num": [str(n) for n in nums]}
        return out


def family_hash(family: CurveFamily) -> str:
    blob = json.dumps(family.coefficient_payload(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def custom_family(coeffs, name: str = "custom") -> CurveFamily:
    """Build a family from (a1, a2, a3, a4, a6); derived polynomials are exact.

    Raises SingularFamilyError when the discriminant vanishes identically.
    """
    a1, a2, a3, a4, a6 = (_as_ratpoly(c) for c in coeffs)
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * (a3 * a3) - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -1 * b2**3 + 36 * b2 * b4 - 216 * b6
    delta = -1 * (b2 * b2) * b8 - 8 * b4**3 - 27 * (b6 * b6) + 9 * b2 * b4 * b6
    if delta.is_zero():
        raise SingularFamilyError(f"family {name!r} has identically zero discriminant")
    return CurveFamily(name, a1, a2, a3, a4, a6, b2, b4, b6, b8, c4, c6, delta)


F = Fraction
_BUILTINS = {
    # y^2 = x(1-x)(x-lambda), in the point-count-preserving monic model
    # y^2 = x(x+1)(x+lambda) obtained by x -> -x.
    "legendre": ((0,), (1, 1), (0,), (0, 1), (0,)),
    # its lambda -> -lambda pullback
    "legendre_neg": ((0,), (1, -1), (0,), (0, -1), (0,)),
    # y^2 + xy + (lambda/27) y = x^3
    "d3": ((1,), (0,), (0, F(1, 27)), (0,), (0,)),
    # y^2 = x(x^2 + x + lambda/4)
    "d4": ((0,), (1,), (0,), (0, F(1, 4)), (0,)),
    # y^2 + xy = x^3 - lambda/432
    "d6": ((1,), (0,), (0,), (0,), (0, F(-1, 432))),
    # y^2 = (x-1)(x^2 + lambda)
    "clausen": ((0,), (-1,), (0,), (0, 1), (0, -1)),
}


def builtin_family(family_id: str) -> CurveFamily:
    """One of legendre, legendre_neg, d3, d4, d6, clausen (exact denominators kept)."""
    try:
        coeffs = _BUILTINS[family_id]
    except KeyError:
        raise UnknownFamilyError(f"unknown builtin family {family_id!r}") from None
    return custom_family([RatPoly(c) for c in coeffs], name=family_id)


def negated_family(family: CurveFamily) -> CurveFamily:
    """The lambda -> -lambda pullback, sharing the builtin name when one exists."""
    name = {"legendre": "legendre_neg", "legendre_neg": "legendre"}.get(
        family.name, family.name[:-4] if family.name.endswith("_neg") else family.name + "_neg"
    )
    return custom_family(
        [getattr(family, k).substitute_neg() for k in ("a1", "a2", "a3", "a4", "a6")],
        name=name,
    )


# ---------------------------------------------------------------------------
# Trace sweeps


@dataclass
class TraceSweep:
    """a_p(lambda) for all lambda in F_p, with a bad-reduction mask.

    traces[lam] = p + 1 - #E_lam(F_p) where the mask is False; entries under the
    mask are 0 and carry no meaning.
    """

    p: int
    family_name: str
    family_hash: str
    traces: np.ndarray
    bad_mask: np.ndarray

    def good_mask(self) -> np.ndarray:
        return ~self.bad_mask


@dataclass
class ReductionReport:
    p: int
    family_name: str
    points: list[tuple[int, str]]  # (lambda0, "multiplicative" | "additive")
    j_nonconstant: bool


def _require_good_prime(family: CurveFamily, p: int) -> None:
    if p < 5:
        raise BadPrimeError(f"p={p} < 5")
    for key in ("a1", "a2", "a3", "a4", "a6"):
        den, _ = getattr(family, key).as_int_pairs()
        if den % p == 0:
            raise BadPrimeError(f"p={p} divides denominator of {key}")


def _reduced_b_polys(family: CurveFamily, p: int):
    _require_good_prime(family, p)
    return (
        family.b2.reduce_mod(p),
        family.b4.reduce_mod(p),
        family.b6.reduce_mod(p),
        family.delta.reduce_mod(p),
    )


def _trace_block(p, quadchar, x, x2, fx3, b2v, b4v, b6v):
    """Traces for a block of lambdas: -sum_x quadchar[4x^3 + b2 x^2 + 2 b4 x + b6]."""
    f = (fx3[None, :] + b2v[:, None] * x2[None, :]
         + (2 * b4v % p)[:, None] * x[None, :] + b6v[:, None]) % p
    return -quadchar[f].sum(axis=1, dtype=np.int64)


def _sweep_range(p, quadchar, bpolys, lo, hi):
    b2c, b4c, b6c, dltc = bpolys
    x = np.arange(p, dtype=np.int64)
    x2 = x * x % p
    fx3 = 4 * (x2 * x % p) % p
    lam = np.arange(lo, hi, dtype=np.int64)
    b2v = _poly_eval_mod(b2c, lam, p)
    b4v = _poly_eval_mod(b4c, lam, p)
    b6v = _poly_eval_mod(b6c, lam, p)
    bad = _poly_eval_mod(dltc, lam, p) == 0
    out = np.zeros(hi - lo, dtype=np.int64)
    block = max(1, 2_000_000 // p)
    for start in range(0, hi - lo, block):
        stop = min(start + block, hi - lo)
        out[start:stop] = _trace_block(
            p, quadchar, x, x2, fx3, b2v[start:stop], b4v[start:stop], b6v[start:stop]
        )
    out[bad] = 0
    return out, bad


_WORKER: dict = {}


def _sweep_init(p, qc_bytes, bpolys):
    _WORKER["p"] = p
    _WORKER["quadchar"] = np.frombuffer(qc_bytes, dtype=np.int8)
    _WORKER["bpolys"] = bpolys


def _sweep_task(bounds):
    lo, hi = bounds
    out, bad = _sweep_range(_WORKER["p"], _WORKER["quadchar"], _WORKER["bpolys"], lo, hi)
    return lo, out.tobytes(), bad.tobytes()


def resolve_threads(threads) -> int:
    if threads in (None, "auto"):
        return max(1, os.cpu_count() or 1)
    n = int(threads)
    if n < 1:
        raise ValueError("threads must be >= 1")
    return n


def trace_single(family: CurveFamily, ctx: PrimeFieldContext, lam: int) -> int | None:
    """a_p(lambda) for one fiber, or None on bad reduction (delta(lambda) = 0 mod p)."""
    p = ctx.p
    bpolys = _reduced_b_polys(family, p)
    lam_arr = np.array([lam % p], dtype=np.int64)
    out, bad = _sweep_range_at(p, ctx.quadchar, bpolys, lam_arr)
    if bad[0]:
        return None
    a = int(out[0])
    if a * a > 4 * p:
        raise RuntimeError(f"Hasse bound violated at lambda={lam}: a={a}, p={p}")
    return a


def _sweep_range_at(p, quadchar, bpolys, lam):
    b2c, b4c, b6c, dltc = bpolys
    x = np.arange(p, dtype=np.int64)
    x2 = x * x % p
    fx3 = 4 * (x2 * x % p) % p
    b2v = _poly_eval_mod(b2c, lam, p)
    b4v = _poly_eval_mod(b4c, lam, p)
    b6v = _poly_eval_mod(b6c, lam, p)
    bad = _poly_eval_mod(dltc, lam, p) == 0
    out = _trace_block(p, quadchar, x, x2, fx3, b2v, b4v, b6v)
    out[bad] = 0
    return out, bad


def trace_sweep(family: CurveFamily, ctx: PrimeFieldContext, threads=1) -> TraceSweep:
    """a_p(lambda) for every lambda in F_p; O(p^2) table lookups, split over workers.

    The result is bit-identical for any worker count: each lambda is an independent
    exact integer sum and chunks are merged in index order.
    """
    p = ctx.p
    bpolys = _reduced_b_polys(family, p)
    n_workers = resolve_threads(threads)
    if n_workers == 1 or p < 4096:
        traces, bad = _sweep_range(p, ctx.quadchar, bpolys, 0, p)
    else:
        n_chunks = n_workers * 4
        step = -(-p // n_chunks)
        bounds = [(lo, min(lo + step, p)) for lo in range(0, p, step)]
        traces = np.zeros(p, dtype=np.int64)
        bad = np.zeros(p, dtype=bool)
        with ProcessPoolExecutor(
            max_workers=n_workers,
            initializer=_sweep_init,
            initargs=(p, ctx.quadchar.tobytes(), bpolys),
        ) as pool:
            for lo, tr_bytes, bad_bytes in pool.map(_sweep_task, bounds):
                hi = min(lo + step, p)
                traces[lo:hi] = np.frombuffer(tr_bytes, dtype=np.int64)
                bad[lo:hi] = np.frombuffer(bad_bytes, dtype=bool)
    good = ~bad
    if good.any():
        amax = int(np.abs(traces[good]).max())
        if amax * amax > 4 * p:
            raise RuntimeError(f"Hasse bound violated in sweep: max|a|={amax}, p={p}")
    return TraceSweep(p, family.name, family_hash(family), traces, bad)


def negated_sweep(family: CurveFamily, sweep: TraceSweep) -> TraceSweep:
    """Sweep of the lambda -> -lambda pullback, by index negation of an existing sweep."""
    if sweep.family_hash != family_hash(family):
        raise SweepMismatchError("sweep does not belong to the given family")
    p = sweep.p
    idx = (-np.arange(p)) % p
    neg = negated_family(family)
    return TraceSweep(p, neg.name, family_hash(neg), sweep.traces[idx].copy(),
                      sweep.bad_mask[idx].copy())


def classify_reduction(family: CurveFamily, ctx: PrimeFieldContext) -> ReductionReport:
    """Classify every lambda0 with delta(lambda0) = 0 mod p, and decide whether the
    j-invariant is nonconstant by sampling one more point than its degree bound."""
    p = ctx.p
    _require_good_prime(family, p)
    lam = np.arange(p, dtype=np.int64)
    dlt = _poly_eval_mod(family.delta.reduce_mod(p), lam, p)
    c4v = _poly_eval_mod(family.c4.reduce_mod(p), lam, p)
    points = [
        (int(l0), "multiplicative" if c4v[l0] else "additive")
        for l0 in np.nonzero(dlt == 0)[0]
    ]
    needed = max(3 * max(family.c4.degree, 0), family.delta.degree) + 1
    seen = set()
    for l0 in range(p):
        if dlt[l0] == 0:
            continue
        j = pow(int(c4v[l0]), 3, p) * pow(int(dlt[l0]), p - 2, p) % p
        seen.add(j)
        needed -= 1
        if needed <= 0 or len(seen) > 1:
            break
    return ReductionReport(p, family.name, points, j_nonconstant=len(seen) > 1)


# ---------------------------------------------------------------------------
# On-disk sweep cache: <name>-<hash12>-<p>.csv plus <same>.meta.json


def sweep_cache_name(family: CurveFamily, p: int) -> str:
    return f"{family.name}-{family_hash(family)[:12]}-{p}"


def save_sweep(sweep: TraceSweep, family: CurveFamily, cache_dir) -> Path:
    """Write the CSV + metadata pair atomically; integers only, so bit-stable."""
    if sweep.family_hash != family_hash(family):
        raise SweepMismatchError("sweep does not belong to the given family")
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    stem = sweep_cache_name(family, sweep.p)
    csv_path = cache_dir / f"{stem}.csv"
    meta_path = cache_dir / f"{stem}.meta.json"
    lines = ["lambda,a,bad"]
    bad = sweep.bad_mask
    tr = sweep.traces
    for lam in range(sweep.p):
        if bad[lam]:
            lines.append(f"{lam},,1")
        else:
            lines.append(f"{lam},{int(tr[lam])},0")
    meta = {
        "family": family.name,
        "p": sweep.p,
        "version": ARTIFACT_VERSION,
        "hash": sweep.family_hash,
        "polynomials": family.coefficient_payload(),
    }
    for path, text in (
        (csv_path, "\n".join(lines) + "\n"),
        (meta_path, json.dumps(meta, sort_keys=True, indent=1) + "\n"),
    ):
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text)
        os.replace(tmp, path)
    return csv_path


def load_sweep(csv_path) -> TraceSweep:
    """Read a cached sweep, verifying its metadata hash against the stored polynomials."""
    csv_path = Path(csv_path)
    meta_path = csv_path.with_name(csv_path.name[: -len(".csv")] + ".meta.json")
    meta = json.loads(meta_path.read_text())
    coeffs = [meta["polynomials"][k] for k in ("a1", "a2", "a3", "a4", "a6")]
    family = custom_family([_as_ratpoly(c) for c in coeffs], name=meta["family"])
    if family_hash(family) != meta["hash"]:
        raise SweepMismatchError(f"metadata hash mismatch in {meta_path}")
    p = int(meta["p"])
    traces = np.zeros(p, dtype=np.int64)
    bad = np.zeros(p, dtype=bool)
    with csv_path.open() as fh:
        header = fh.readline().strip()
        if header != "lambda,a,bad":
            raise ValueError(f"unexpected sweep header {header!r} in {csv_path}")
        for line in fh:
            lam_s, a_s, bad_s = line.strip().split(",")
            lam = int(lam_s)
            if bad_s == "1":
                bad[lam] = True
            else:
                traces[lam] = int(a_s)
    return TraceSweep(p, meta["family"], meta["hash"], traces, bad)


def ensure_sweep(family: CurveFamily, p: int, cache_dir, threads=1) -> TraceSweep:
    """Load the cached sweep for (family, p) or compute and cache it."""
    cache_dir = Path(cache_dir)
    csv_path = cache_dir / f"{sweep_cache_name(family, p)}.csv"
    if csv_path.exists():
        sweep = load_sweep(csv_path)
        if sweep.family_hash != family_hash(family) or sweep.p != p:
            raise SweepMismatchError(f"cache file {csv_path} does not match request")
        return sweep
    ctx = build_field(p)
    sweep = trace_sweep(family, ctx, threads=threads)
    save_sweep(sweep, family, cache_dir)
    return sweep


def ensure_negated_sweep(family: CurveFamily, p: int, cache_dir, threads=1) -> TraceSweep:
    """Cached sweep of the lambda -> -lambda pullback, derived from the base sweep
    by index negation rather than recomputed."""
    neg = negated_family(family)
    cache_dir = Path(cache_dir)
    csv_path = cache_dir / f"{sweep_cache_name(neg, p)}.csv"
    if csv_path.exists():
        return load_sweep(csv_path)
    base = ensure_sweep(family, p, cache_dir, threads=threads)
    sweep = negated_sweep(family, base)
    save_sweep(sweep, neg, cache_dir)
    return sweep
