"""Empirical moments, mixed moments, Chebyshev-twisted sums, histograms, and KS
distances from trace sweeps.

Moment accumulators are arbitrary-precision integers (summands reach ~(4 sqrt(p))^m,
far past 64 bits) and a single floating division by p^normalization happens at the
end, so the p^(-1/2)-scale deviations under test are never contaminated by rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Callable, Mapping

import numpy as np

from . import theory
from .curves import SweepMismatchError, TraceSweep
from .ffield import PrimeFieldContext


class BadRangeError(ValueError):
    """Histogram range is empty or bin count invalid."""


class EmptySamplesError(ValueError):
    """KS distance needs at least one sample."""


@dataclass
class MomentReport:
    """One empirical moment against its theoretical limit.

    empirical = accumulator / p^normalization, with the accumulator exact.
    """

    p: int
    spec: str
    n: int | None
    m: int
    empirical: float
    limit: float
    deviation: float
    excluded: int
    normalization: float
    accumulator: int

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "spec": self.spec,
            "n": self.n,
            "m": self.m,
            "empirical": repr(self.empirical),
            "limit": repr(self.limit),
            "deviation": self.deviation,
            "excluded": self.excluded,
            "normalization": self.normalization,
        }


def _finish(p, spec, n, m, acc, excluded, normalization, limit) -> MomentReport:
    empirical = float(acc) / float(p) ** normalization
    return MomentReport(
        p=p, spec=spec, n=n, m=m, empirical=empirical, limit=float(limit),
        deviation=abs(empirical - float(limit)), excluded=excluded,
        normalization=normalization, accumulator=acc,
    )


def _exact_power_sum(values: np.ndarray, m: int) -> int:
    return sum(int(v) ** m for v in values.tolist())


def _check_same_p(*sweeps: TraceSweep) -> int:
    ps = {s.p for s in sweeps}
    if len(ps) != 1:
        raise SweepMismatchError(f"sweeps at different primes: {sorted(ps)}")
    return ps.pop()


def theorem1_empirical(d: int, sweep_plus: TraceSweep, sweep_minus: TraceSweep, m: int,
                       boundary_h: Mapping[int, int] | None = None) -> MomentReport:
    """p^(-m/2-1) sum over lambda (lambda^2 not in {0,1}, good fibers) of
    (a_d(lambda) + a_d(-lambda))^m, against the Catalan-product limit.

    boundary_h optionally supplies exact H values for excluded lambdas (keyed by
    lambda); their m-th powers join the accumulator and leave the excluded count.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    p = _check_same_p(sweep_plus, sweep_minus)
    if sweep_plus.family_name == sweep_minus.family_name:
        raise SweepMismatchError("plus and minus sweeps are the same family")
    vals = sweep_plus.traces + sweep_minus.traces
    good = sweep_plus.good_mask() & sweep_minus.good_mask()
    good[0] = False
    good[1] = False
    good[p - 1] = False
    acc = _exact_power_sum(vals[good], m)
    excluded = int(p - good.sum())
    for lam, h in (boundary_h or {}).items():
        if good[lam % p]:
            raise ValueError(f"lambda={lam} is not an excluded point")
        acc += int(h) ** m
        excluded -= 1
    return _finish(p, f"theorem1[d={d}]", None, m, acc, excluded,
                   m / 2 + 1, theory.theorem1_limit(m))


def mixed_empirical(sweep1: TraceSweep, sweep2: TraceSweep, n: int, m: int) -> MomentReport:
    """p^(-1-(n+m)/2) sum over lambda good in both sweeps of a1^n a2^m."""
    if n < 0 or m < 0:
        raise ValueError("orders must be >= 0")
    p = _check_same_p(sweep1, sweep2)
    good = sweep1.good_mask() & sweep2.good_mask()
    t1 = sweep1.traces[good].tolist()
    t2 = sweep2.traces[good].tolist()
    acc = sum(int(a) ** n * int(b) ** m for a, b in zip(t1, t2))
    return _finish(p, f"theorem2[{sweep1.family_name},{sweep2.family_name}]", n, m,
                   acc, int(p - good.sum()), (n + m) / 2 + 1, theory.theorem2_limit(n, m))


def theorem3_empirical(d: int, sweep: TraceSweep, m: int,
                       boundary_h: Mapping[int, int] | None = None) -> MomentReport:
    """p^(-1-m/2) sum over good lambda not in {0,1} of a_d(lambda)^m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    p = sweep.p
    good = sweep.good_mask().copy()
    good[0] = False
    good[1] = False
    acc = _exact_power_sum(sweep.traces[good], m)
    excluded = int(p - good.sum())
    for lam, h in (boundary_h or {}).items():
        if good[lam % p]:
            raise ValueError(f"lambda={lam} is not an excluded point")
        acc += int(h) ** m
        excluded -= 1
    return _finish(p, f"theorem3[d={d}]", None, m, acc, excluded,
                   m / 2 + 1, theory.theorem3_limit(m))


def theorem4_empirical(clausen_sweep: TraceSweep, ctx: PrimeFieldContext, m: int,
                       boundary_h: Mapping[int, int] | None = None) -> MomentReport:
    """p^(-1-m) sum of the length-3 values, read off the Clausen family:
    H(lambda/(lambda+1)) = quadchar(lambda+1) (a_cl(lambda)^2 - p) for lambda
    outside {0, -1}; the two unreached mu values {0, 1} are the excluded count."""
    if m < 0:
        raise ValueError("m must be >= 0")
    p = clausen_sweep.p
    if ctx.p != p:
        raise SweepMismatchError(f"context p={ctx.p} but sweep p={p}")
    phis = ctx.quadchar[(np.arange(p) + 1) % p].astype(np.int64)
    base = phis * (clausen_sweep.traces * clausen_sweep.traces - p)
    good = clausen_sweep.good_mask().copy()
    good[0] = False
    good[p - 1] = False
    acc = _exact_power_sum(base[good], m)
    excluded = int(p - good.sum())
    for mu, h in (boundary_h or {}).items():
        if mu % p not in (0, 1):
            raise ValueError(f"mu={mu} is not an excluded point")
        acc += int(h) ** m
        excluded -= 1
    return _finish(p, "theorem4", None, m, acc, excluded, m + 1, theory.theorem4_limit(m))


def chebyshev_sum(sweep: TraceSweep, m: int) -> float:
    """(1/p) sum over good lambda of U_m(a(lambda) / (2 sqrt(p))), in doubles."""
    if m < 0:
        raise ValueError("m must be >= 0")
    good = sweep.good_mask()
    x = sweep.traces[good] / (2.0 * sqrt(sweep.p))
    return float(theory.chebyshev_u(m, x).sum() / sweep.p)


@dataclass
class Histogram:
    """Uniform-bin histogram; bins are right-open except the last, which is closed.

    Out-of-range values are clamped into the end bins and counted in `clamped`.
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    total: int
    clamped: int

    @property
    def normalized_heights(self) -> np.ndarray:
        if self.total == 0:
            return np.zeros(len(self.counts))
        width = self.bin_edges[1] - self.bin_edges[0]
        return self.counts / (self.total * width)

    def csv_lines(self) -> list[str]:
        lines = ["bin_lo,bin_hi,count,height"]
        heights = self.normalized_heights
        for i, c in enumerate(self.counts):
            lines.append(
                f"{float(self.bin_edges[i])!r},{float(self.bin_edges[i + 1])!r},"
                f"{int(c)},{float(heights[i])!r}"
            )
        return lines


def histogram_build(values, lo: float, hi: float, bins: int) -> Histogram:
    if not lo < hi:
        raise BadRangeError(f"need lo < hi, got [{lo}, {hi}]")
    if bins < 1:
        raise BadRangeError(f"need bins >= 1, got {bins}")
    v = np.asarray(values, dtype=float)
    edges = np.linspace(lo, hi, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    clamped = 0
    if v.size:
        idx = np.floor((v - lo) / (hi - lo) * bins).astype(np.int64)
        clamped = int(((v < lo) | (v > hi)).sum())
        idx = np.clip(idx, 0, bins - 1)
        np.add.at(counts, idx, 1)
    return Histogram(edges, counts, int(v.size), clamped)


def ks_distance(samples, cdf: Callable) -> float:
    """sup over sample points of |empirical CDF - cdf|, both one-sided gaps."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.size
    if n == 0:
        raise EmptySamplesError("no samples")
    try:
        f = np.asarray(cdf(s), dtype=float)
        if f.shape != s.shape:
            raise TypeError
    except (TypeError, ValueError):
        f = np.array([cdf(x) for x in s], dtype=float)
    i = np.arange(n)
    gap_lo = np.max(f - i / n)
    gap_hi = np.max((i + 1) / n - f)
    return float(max(gap_lo, gap_hi))
