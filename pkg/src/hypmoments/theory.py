"""Closed-form limiting values and limiting densities.

Combinatorial side: Catalan numbers, representation multiplicities, and the exact
limit of every moment family handled by this package.  Analytic side: the semicircle
density with closed-form CDF, and the length-4 limiting density expressed through a
Meijer G-function evaluated by Mellin-Barnes quadrature on a vertical contour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np
from scipy.integrate import cumulative_simpson, quad
from scipy.interpolate import PchipInterpolator
from scipy.special import loggamma


class NonIntegralError(ArithmeticError):
    """A multiplicity formula failed integrality (guards implementation bugs)."""


class QuadratureFailureError(RuntimeError):
    """Contour quadrature could not meet its error target."""


class DomainError(ValueError):
    """Argument outside the density's support."""


class CheckFailureError(AssertionError):
    """A numerical identity check failed; message names the failing identity."""


# ---------------------------------------------------------------------------
# Exact combinatorics


def catalan(n: int) -> int:
    """n-th Catalan number (2n)!/(n!(n+1)!)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return comb(2 * n, n) // (n + 1)


def multiplicity_nm(m: int, r: int) -> int:
    """Multiplicity of the r-th symmetric power inside the m-th tensor power of the
    rank-2 standard representation: binom(m, (m+r)/2) * 2(r+1)/(m+r+2).

    Zero when r > m or r and m have different parity; always an integer otherwise.
    """
    if m < 0 or r < 0 or r > m or (m + r) % 2:
        return 0
    num = comb(m, (m + r) // 2) * 2 * (r + 1)
    q, rem = divmod(num, m + r + 2)
    if rem:
        raise NonIntegralError(f"n_{m}({r}) = {num}/{m + r + 2} is not integral")
    return q


def sym2_multiplicity(m: int) -> int:
    """Multiplicity of the trivial representation in the m-th tensor power of the
    symmetric square: (-1)^m * sum_i (-1)^i binom(m,i) C(i)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    s = sum((-1) ** i * comb(m, i) * catalan(i) for i in range(m + 1))
    return (-1) ** m * s


def combmom_check(m: int) -> tuple[int, int]:
    """Both sides of C(m)C(m+1) = sum_s binom(2m,2s) C(m-s)C(s), computed independently."""
    if m < 1:
        raise ValueError("m must be >= 1")
    lhs = catalan(m) * catalan(m + 1)
    rhs = sum(comb(2 * m, 2 * s) * catalan(m - s) * catalan(s) for s in range(m + 1))
    return lhs, rhs


def chebyshev_u(m: int, x):
    """Chebyshev polynomial of the second kind by its explicit sum
    U_m(x) = sum_k (-1)^k binom(m-k,k) (2x)^(m-2k); accepts scalars or arrays."""
    if m < 0:
        raise ValueError("m must be >= 0")
    y = np.asarray(x, dtype=float)
    two_x = 2.0 * y
    acc = np.zeros_like(y)
    for k in range(m // 2 + 1):
        acc += (-1) ** k * comb(m - k, k) * two_x ** (m - 2 * k)
    return acc if isinstance(x, np.ndarray) else float(acc)


def theorem1_limit(m: int) -> int:
    """Limiting m-th moment of the normalized length-4 values: C(m/2)C(m/2+1) for even m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m % 2:
        return 0
    return catalan(m // 2) * catalan(m // 2 + 1)


def theorem2_limit(n: int, m: int) -> int:
    """Limiting mixed (n,m) moment for a generic pair: C(n/2)C(m/2) for even orders."""
    if n < 0 or m < 0:
        raise ValueError("orders must be >= 0")
    if n % 2 or m % 2:
        return 0
    return catalan(n // 2) * catalan(m // 2)


def theorem3_limit(m: int) -> int:
    """Limiting m-th moment of normalized traces in one family: C(m/2) for even m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return 0 if m % 2 else catalan(m // 2)


def theorem4_limit(m: int) -> int:
    """Limiting m-th moment of the normalized length-3 values; equals the even
    moments of O_3 traces: sum_i (-1)^i binom(m,i) (2i)!/(i!(i+1)!) for even m."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m % 2:
        return 0
    return sum((-1) ** i * comb(m, i) * catalan(i) for i in range(m + 1))


def _double_factorial(n: int) -> int:
    # (-1)!! = 1 by convention
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def catalan_gamma_identity(m: int) -> tuple[Fraction, Fraction]:
    """C(m)C(m+1) versus (4*16^m/pi) Gamma(m+1/2)Gamma(m+3/2)/(Gamma(m+2)Gamma(m+3)),
    with the half-integer Gamma values reduced symbolically so both sides are exact."""
    if m < 0:
        raise ValueError("m must be >= 0")
    lhs = Fraction(catalan(m) * catalan(m + 1))
    # Gamma(m+1/2)Gamma(m+3/2) = (2m-1)!! (2m+1)!! pi / 2^(2m+1); the pi cancels.
    rhs = Fraction(
        4 * 16**m * _double_factorial(2 * m - 1) * _double_factorial(2 * m + 1),
        2 ** (2 * m + 1) * factorial(m + 1) * factorial(m + 2),
    )
    return lhs, rhs


# ---------------------------------------------------------------------------
# Semicircle density


def semicircle_pdf(x: float) -> float:
    """sqrt(4-x^2)/(2*pi) on [-2,2], zero outside."""
    if abs(x) >= 2.0:
        return 0.0
    return math.sqrt(4.0 - x * x) / (2.0 * math.pi)


def semicircle_cdf(x: float) -> float:
    """Closed-form CDF: 1/2 + (x sqrt(4-x^2) + 4 asin(x/2)) / (4*pi), clamped."""
    if x <= -2.0:
        return 0.0
    if x >= 2.0:
        return 1.0
    return 0.5 + (x * math.sqrt(4.0 - x * x) + 4.0 * math.asin(x / 2.0)) / (4.0 * math.pi)


def semicircle_moment(m: int) -> float:
    """m-th moment by quadrature with the smooth substitution x = 2 sin(theta)."""
    val, _ = quad(
        lambda th: (2.0 * math.sin(th)) ** m * (2.0 / math.pi) * math.cos(th) ** 2,
        -math.pi / 2.0,
        math.pi / 2.0,
        epsabs=1e-12,
        epsrel=1e-12,
    )
    return val


def product_semicircle_moment(n: int, m: int) -> float:
    """(n, m) mixed moment of the product measure; factorizes by Fubini."""
    return semicircle_moment(n) * semicircle_moment(m)


# ---------------------------------------------------------------------------
# Meijer G by Mellin-Barnes contour quadrature
#
# G_{2,2}^{2,0}[a1,a2; b1,b2 | z] = (1/2*pi*i) int_L G(b1-s)G(b2-s)/(G(a1-s)G(a2-s)) z^s ds
# with L the vertical line Re(s) = c, c left of every pole b_j + k.  The integrand
# decays like |Im s|^(b1+b2-a1-a2) (= -3 for every parameter set used here), so the
# truncated trapezoid sum converges; the gamma-ratio samples depend only on the
# offsets b_j - c, a_j - c and are cached across evaluations at different z.


@lru_cache(maxsize=16)
def _mb_kernel(off_b1: float, off_b2: float, off_a1: float, off_a2: float, h: float, t_max: float):
    u = np.arange(0.0, t_max + h / 2.0, h)
    s = 1j * u
    lg = loggamma(off_b1 - s) + loggamma(off_b2 - s) - loggamma(off_a1 - s) - loggamma(off_a2 - s)
    return u, np.exp(lg)


def _mb_trapezoid(u: np.ndarray, f: np.ndarray, log_z: float, h: float) -> float:
    vals = (f * np.exp(1j * u * log_z)).real
    return h * (vals[0] + 2.0 * vals[1:].sum())


def meijer_g_2200(a: tuple[float, float], b: tuple[float, float], z: float,
                  tol: float = 1e-8, c: float | None = None,
                  h: float = 0.1, t_max: float = 12000.0) -> float:
    """General (2,2;2,0) evaluator; real nonnegative result for 0 < z <= 1.

    c is the contour abscissa (default min(b) - 1/2); h the coarse step, refined
    internally for the discretization-error estimate; t_max the initial truncation.
    Raises QuadratureFailureError when truncation + discretization exceed tol.
    """
    if not 0.0 < z <= 1.0:
        raise DomainError(f"z={z} outside (0, 1]")
    if c is None:
        c = min(b) - 0.5
    if c >= min(b):
        raise ValueError("contour must pass left of every right pole")
    log_z = math.log(z)
    zc = z**c
    for _ in range(6):
        u, f = _mb_kernel(b[0] - c, b[1] - c, a[0] - c, a[1] - c, h / 2.0, t_max)
        s_fine = _mb_trapezoid(u, f, log_z, h / 2.0)
        s_coarse = _mb_trapezoid(u[::2], f[::2], log_z, h)
        scale = zc / (2.0 * math.pi)
        disc = abs(s_fine - s_coarse) * scale
        tail = abs(f[-1]) * t_max * scale
        if disc + tail <= tol:
            val = s_fine * scale
            if val < -tol:
                raise QuadratureFailureError(f"negative G({z}) = {val} beyond tolerance")
            return max(val, 0.0)
        if tail > tol / 2.0:
            t_max *= 2.0
        if disc > tol / 2.0:
            h /= 2.0
    raise QuadratureFailureError(f"no convergence to {tol} at z={z}")


def meijer_g_t1(z: float, tol: float = 1e-8) -> float:
    """G_{2,2}^{2,0}[2,3; 1/2,3/2 | z] for z in (0,1], the length-4 density kernel."""
    return meijer_g_2200((2.0, 3.0), (0.5, 1.5), z, tol=tol)


def theorem1_pdf(t: float) -> float:
    """Limiting density of the normalized length-4 values on [-4,4]:
    (4/(pi |t|)) G_{2,2}^{2,0}[2,3; 1/2,3/2 | t^2/16], extended by continuity at 0."""
    if abs(t) > 4.0:
        raise DomainError(f"t={t} outside [-4, 4]")
    tt = max(abs(t), 1e-4)
    return 4.0 / (math.pi * tt) * meijer_g_t1(tt * tt / 16.0)


def theorem1_cdf(a: float, b: float) -> float:
    """Integral of theorem1_pdf over [a, b] by adaptive quadrature (abs tol 1e-6)."""
    if not (-4.0 <= a < b <= 4.0):
        raise DomainError(f"need -4 <= a < b <= 4, got [{a}, {b}]")
    pts = [x for x in (0.0,) if a < x < b] or None
    val, _ = quad(theorem1_pdf, a, b, epsabs=5e-7, limit=400, points=pts)
    return val


def theorem1_moment(m: int) -> float:
    """Quadrature oracle for the m-th moment of theorem1_pdf over [-4,4]."""
    pts = [0.0]
    val, _ = quad(lambda t: t**m * theorem1_pdf(t), -4.0, 4.0,
                  epsabs=1e-6, limit=400, points=pts)
    return val


@lru_cache(maxsize=2)
def _theorem1_half_cdf(grid_size: int = 2049):
    ts = np.linspace(0.0, 4.0, grid_size)
    pdf = np.array([theorem1_pdf(t) for t in ts])
    cum = np.concatenate(([0.0], cumulative_simpson(pdf, x=ts)))
    return ts, cum, PchipInterpolator(ts, cum)


def theorem1_cdf_fn(grid_size: int = 2049):
    """Fast vectorized CDF callable backed by a dense cached grid of the density.

    Pointwise agreement with theorem1_cdf is far below 1e-6; intended for bulk
    evaluation (distribution comparisons over ~p sample points)."""
    _, _, interp = _theorem1_half_cdf(grid_size)

    def cdf(x):
        xa = np.asarray(x, dtype=float)
        half = interp(np.clip(np.abs(xa), 0.0, 4.0))
        out = np.where(xa >= 0.0, 0.5 + half, 0.5 - half)
        out = np.clip(out, 0.0, 1.0)
        return out if isinstance(x, np.ndarray) else float(out)

    return cdf


def meijer_transform_checks(tol: float = 1e-7) -> dict:
    """Numerically verify the pole-shift identity and the moment-chain integral.

    Pole shift: z^rho G[a; b | z] = G[a+rho; b+rho | z], both sides evaluated on
    deliberately different contours/steps.  Moment chain: the weighted integral
    int_0^1 w^(-1/2) G[m1+3/2, m1+5/2; m1, m1+1 | w] dw equals the gamma-ratio
    value (pi/(4*16^m1)) C(m1)C(m1+1).  Raises CheckFailureError on any miss."""
    cached = _transform_checks_cached(tol)
    return {k: [dict(e) for e in v] for k, v in cached.items()}


@lru_cache(maxsize=4)
def _transform_checks_cached(tol: float) -> dict:
    report = {"pole_shift": [], "moment_chain": []}
    a = (2.0, 3.0)
    b = (0.5, 1.5)
    for rho in (0.0, -1.0, 0.5):
        for z in (0.3, 0.9):
            lhs = z**rho * meijer_g_t1(z)
            a_sh = (a[0] + rho, a[1] + rho)
            b_sh = (b[0] + rho, b[1] + rho)
            rhs = meijer_g_2200(a_sh, b_sh, z, c=min(b_sh) - 0.3, h=0.16)
            entry = {"rho": rho, "z": z, "lhs": lhs, "rhs": rhs, "diff": abs(lhs - rhs)}
            report["pole_shift"].append(entry)
            if entry["diff"] > tol:
                raise CheckFailureError(f"pole-shift identity failed: {entry}")
    for m1 in (0, 1, 2):
        a_sh = (m1 + 1.5, m1 + 2.5)
        b_sh = (float(m1), m1 + 1.0)
        # w = v^2 removes the w^(-1/2) endpoint singularity
        val, _ = quad(lambda v: 2.0 * meijer_g_2200(a_sh, b_sh, v * v),
                      0.0, 1.0, epsabs=1e-9, limit=300)
        expect = math.pi / (4.0 * 16**m1) * catalan(m1) * catalan(m1 + 1)
        entry = {"m1": m1, "integral": val, "expected": expect, "diff": abs(val - expect)}
        report["moment_chain"].append(entry)
        if entry["diff"] > tol:
            raise CheckFailureError(f"moment-chain identity failed: {entry}")
    return report


# ---------------------------------------------------------------------------
# Density registry


@dataclass(frozen=True)
class DensitySpec:
    kind: str
    support: tuple
    quad_tol: float


DENSITIES = {
    "semicircle": DensitySpec("semicircle", (-2.0, 2.0), 1e-9),
    "product_semicircle": DensitySpec("product_semicircle", ((-2.0, 2.0), (-2.0, 2.0)), 1e-9),
    "theorem1": DensitySpec("theorem1", (-4.0, 4.0), 1e-6),
}


def density_spec(kind: str) -> DensitySpec:
    try:
        return DENSITIES[kind]
    except KeyError:
        raise DomainError(f"unknown density kind {kind!r}") from None


def density_table(kind: str, grid: int) -> list[tuple[float, float, float]]:
    """Rows (t, pdf, cdf) on a uniform grid over the density's support."""
    if grid < 2:
        raise ValueError("grid must be >= 2")
    spec = density_spec(kind)
    if kind == "semicircle":
        lo, hi = spec.support
        ts = np.linspace(lo, hi, grid)
        return [(float(t), semicircle_pdf(float(t)), semicircle_cdf(float(t))) for t in ts]
    if kind == "theorem1":
        lo, hi = spec.support
        ts = np.linspace(lo, hi, grid)
        cdf = theorem1_cdf_fn()
        return [(float(t), theorem1_pdf(float(t)), cdf(float(t))) for t in ts]
    raise DomainError(f"no 1-d table for density kind {kind!r}")
