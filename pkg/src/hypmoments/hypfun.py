"""Finite-field hypergeometric values, by the Gauss-sum definition and by the exact
curve-trace identities.

The direct path evaluates, for p = 1 mod M and lambda != 0,

    H_p(alpha, beta | lambda) =
      1/(1-p) * sum_k prod_i [ g(w^(k+(p-1)a_i)) g(w^(-k-(p-1)b_i))
                               / (g(w^((p-1)a_i)) g(w^(-(p-1)b_i))) ] * w^k((-1)^n lambda)

with H_p(alpha, beta | 0) = 1, and rounds the (provably integral) real result under a
loud precision guard.  The trace path reads the same values off precomputed sweeps:
for the length-4 data, H_p(alpha_d, beta | lambda^2) = a_d(lambda) + a_d(-lambda).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm, sqrt

import numpy as np

from .curves import SweepMismatchError, TraceSweep
from .ffield import PrimeFieldContext, gauss_table, legendre_symbol, sqrt_mod


class ModulusMismatchError(ValueError):
    """p != 1 (mod M); the direct Gauss-sum path is undefined for this datum."""


class PrecisionLossError(ArithmeticError):
    """The complex sum strayed too far from an integer; p too large for doubles."""


class BoundaryLambdaError(ValueError):
    """The trace identity is not asserted at lambda^2 in {0, 1}."""


@dataclass(frozen=True)
class HypDatum:
    """Hypergeometric datum {alpha, beta} with beta[0] = 1 and its modulus M."""

    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.alpha) != len(self.beta):
            raise ValueError("alpha and beta must have equal length")
        if not self.beta or self.beta[0] != 1:
            raise ValueError("beta must start with 1")

    @property
    def length(self) -> int:
        return len(self.alpha)

    @property
    def modulus(self) -> int:
        return lcm(*(x.denominator for x in self.alpha + self.beta))


def hyp_datum(alpha, beta) -> HypDatum:
    return HypDatum(tuple(Fraction(a) for a in alpha), tuple(Fraction(b) for b in beta))


def datum_modulus(datum: HypDatum) -> int:
    """Least common multiple of all parameter denominators."""
    return datum.modulus


def length4_datum(d: int) -> HypDatum:
    """alpha_d = {1/2d, 1-1/2d, 1/2d+1/2, 1/2-1/2d}, beta = {1, 1/2, 1, 1/2}."""
    if d not in (2, 3, 4, 6):
        raise ValueError(f"d={d} not in {{2,3,4,6}}")
    q = Fraction(1, 2 * d)
    h = Fraction(1, 2)
    return hyp_datum((q, 1 - q, q + h, h - q), (1, h, 1, h))


def length2_datum(d: int) -> HypDatum:
    """{1/d, (d-1)/d; 1, 1}, the datum tied to the trace of one d-family fiber."""
    if d not in (2, 3, 4, 6):
        raise ValueError(f"d={d} not in {{2,3,4,6}}")
    return hyp_datum((Fraction(1, d), Fraction(d - 1, d)), (1, 1))


def clausen_datum() -> HypDatum:
    """{1/2, 1/2, 1/2; 1, 1, 1}."""
    h = Fraction(1, 2)
    return hyp_datum((h, h, h), (1, 1, 1))


def _hp_kernel(ctx: PrimeFieldContext, datum: HypDatum) -> np.ndarray:
    """The lambda-independent part of the H_p sum: one complex weight per k,
    including the 1/(1-p) normalization.  Cached per (context, datum)."""
    key = (datum.alpha, datum.beta)
    kern = ctx._hp_kernels.get(key)
    if kern is None:
        n = ctx.n_chars
        g = gauss_table(ctx)
        idx = np.arange(n)
        kern = np.full(n, 1.0 / (1 - ctx.p), dtype=complex)
        for a in datum.alpha:
            e = int(n * a) % n
            kern *= g[(idx + e) % n] / g[e]
        for b in datum.beta:
            e = int(n * b) % n
            kern *= g[(-idx - e) % n] / g[-e % n]
        ctx._hp_kernels[key] = kern
    return kern


def hp_direct(ctx: PrimeFieldContext, datum: HypDatum, lam: int) -> int:
    """H_p(alpha, beta | lambda) from the Gauss-sum definition, rounded to an integer.

    Requires p = 1 (mod M).  The guard |Im| <= 1e-6 sqrt(p) and the same bound on
    the distance of Re to the nearest integer raises PrecisionLossError instead of
    mis-rounding silently.
    """
    p = ctx.p
    if p > 1_000_000:
        raise ValueError(
            f"p={p}: the Gauss-sum path is limited to p <= 10^6 "
            "(table memory and double-precision rounding); use the trace path"
        )
    m = datum.modulus
    if (p - 1) % m:
        raise ModulusMismatchError(f"p={p} is not 1 mod M={m}")
    lam %= p
    if lam == 0:
        return 1
    n = ctx.n_chars
    kern = _hp_kernel(ctx, datum)
    c = (-lam) % p if datum.length % 2 else lam
    t0 = int(ctx.dlog[c])
    phase = np.exp((2j * np.pi * t0 / n) * np.arange(n))
    val = complex(np.dot(kern, phase))
    guard = 1e-6 * sqrt(p)
    nearest = round(val.real)
    if abs(val.imag) > guard or abs(val.real - nearest) > guard:
        raise PrecisionLossError(
            f"H_p sum {val} fails the integrality guard {guard:g} at p={p}, lambda={lam}"
        )
    return int(nearest)


def hp_via_traces(d: int, sweep_plus: TraceSweep, sweep_minus: TraceSweep, mu: int) -> int:
    """H_p(alpha_d, beta | mu) read off trace sweeps: 0 when mu is a nonresidue,
    else a_d(lambda) + a_d(-lambda) for either square root lambda of mu.

    sweep_plus holds a_d(lambda), sweep_minus its lambda -> -lambda pullback.
    Not asserted at mu in {0, 1} (BoundaryLambdaError); use hp_direct there.
    """
    if d not in (2, 3, 4, 6):
        raise ValueError(f"d={d} not in {{2,3,4,6}}")
    if sweep_plus.p != sweep_minus.p:
        raise SweepMismatchError(
            f"sweeps at different primes: {sweep_plus.p} vs {sweep_minus.p}"
        )
    p = sweep_plus.p
    mu %= p
    if mu in (0, 1):
        raise BoundaryLambdaError(f"mu={mu} is a boundary point; identity not asserted")
    if legendre_symbol(mu, p) == -1:
        return 0
    lam = sqrt_mod(mu, p)
    if sweep_plus.bad_mask[lam] or sweep_minus.bad_mask[lam]:
        raise ValueError(f"bad reduction at lambda={lam}; trace undefined")
    return int(sweep_plus.traces[lam]) + int(sweep_minus.traces[lam])
