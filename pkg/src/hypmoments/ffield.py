"""Per-prime arithmetic substrate: primitive root, discrete-log and quadratic-character
tables, multiplicative character evaluation, and Gauss sums.

Everything downstream (hypergeometric sums, trace sweeps) does its inner-loop work
through the flat tables built here, so construction is O(p) and lookups are O(1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class CompositeInputError(ValueError):
    """The modulus failed a deterministic primality check."""


class TooSmallError(ValueError):
    """The prime is below the supported range (p >= 5)."""


# Witness set proves primality for every n < 3.3e24, far beyond desk scale.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def smallest_primitive_root(p: int) -> int:
    factors = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise CompositeInputError(f"{p} has no primitive root; not an odd prime")


@dataclass(eq=False)
class PrimeFieldContext:
    """Immutable-after-construction tables for F_p.

    dlog[x] is the index of x with respect to g (dlog[0] = -1 sentinel), and
    quadchar[x] in {-1, 0, +1} is the quadratic character.  Safe to share across
    workers; the Gauss-sum table is materialized lazily on first use.
    """

    p: int
    g: int
    dlog: np.ndarray
    quadchar: np.ndarray
    _gauss: np.ndarray | None = field(default=None, repr=False)
    _hp_kernels: dict = field(default_factory=dict, repr=False)

    @property
    def n_chars(self) -> int:
        return self.p - 1


def build_field(p: int) -> PrimeFieldContext:
    """Build the context for a prime p >= 5 (smallest primitive root, O(p) tables)."""
    p = int(p)
    if not is_prime(p):
        raise CompositeInputError(f"p={p} is not prime")
    if p < 5:
        raise TooSmallError(f"p={p} is below the supported minimum of 5")
    g = smallest_primitive_root(p)
    dlog = np.empty(p, dtype=np.int32)
    dlog[0] = -1
    acc = 1
    for t in range(p - 1):
        dlog[acc] = t
        acc = acc * g % p
    quadchar = np.where(dlog % 2 == 0, 1, -1).astype(np.int8)
    quadchar[0] = 0
    return PrimeFieldContext(p=p, g=g, dlog=dlog, quadchar=quadchar)


def char_eval(ctx: PrimeFieldContext, j: int, x: int) -> complex:
    """Evaluate the character w^j at x, where w(g) = exp(2*pi*i/(p-1)); 0 at x = 0."""
    x %= ctx.p
    if x == 0:
        return 0j
    n = ctx.n_chars
    e = (j * int(ctx.dlog[x])) % n
    return complex(np.exp(2j * np.pi * e / n))


def gauss_table(ctx: PrimeFieldContext) -> np.ndarray:
    """All p-1 Gauss sums g(w^j), j = 0..p-2, as one complex array.

    Indexed by g^t the sum is a length-(p-1) inverse DFT of zeta_p^(g^t), so the
    whole table costs O(p log p).  Cached on the context (~16 bytes per entry).
    """
    if ctx._gauss is None:
        p = ctx.p
        pows = np.empty(p - 1, dtype=np.int64)
        pows[ctx.dlog[1:]] = np.arange(1, p)
        z = np.exp(2j * np.pi * pows / p)
        ctx._gauss = np.fft.ifft(z) * (p - 1)
    return ctx._gauss


def gauss_sum(ctx: PrimeFieldContext, j: int) -> complex:
    """Gauss sum of w^j: sum over x != 0 of w^j(x) zeta_p^x (= -1 for j = 0)."""
    return complex(gauss_table(ctx)[j % ctx.n_chars])


def legendre_symbol(a: int, p: int) -> int:
    """Quadratic character of a mod p via Euler's criterion (no tables needed)."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(a: int, p: int) -> int:
    """A square root of a mod p (Tonelli-Shanks); a must be a quadratic residue."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q = p - 1
        s = 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while legendre_symbol(z, p) != -1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            t2 = t
            i = 0
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    if r * r % p != a:
        raise ValueError(f"{a} is not a quadratic residue mod {p}")
    return r
