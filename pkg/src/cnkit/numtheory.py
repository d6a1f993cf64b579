"""Sieving, squarefree factorization and quadratic residue symbols.

Everything downstream consumes bits produced here: Legendre/Jacobi
symbols in additive (F2) form, and squarefree integers together with
their ordered odd prime factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "NotSquarefreeError",
    "ResourceLimitError",
    "PrimeSieve",
    "FactoredInteger",
    "sieve_init",
    "factor_squarefree",
    "try_factor_squarefree",
    "jacobi",
    "legendre",
    "legendre_plus",
    "is_square_class",
    "is_squarefree_small",
    "enumerate_squarefree",
]


class NotSquarefreeError(ValueError):
    """Raised when an integer expected to be squarefree is not."""


class ResourceLimitError(RuntimeError):
    """Raised when a requested table would exceed the memory budget."""


# Default budget for the smallest-prime-factor table (uint32 entries).
DEFAULT_SIEVE_BUDGET = 2 ** 32  # bytes


@dataclass(frozen=True)
class PrimeSieve:
    """Smallest-prime-factor table for 2 <= m <= limit.

    spf[m] is the smallest prime factor of m; spf[p] == p exactly for
    primes.  Immutable after construction and safe to share between
    workers.
    """

    limit: int
    spf: np.ndarray  # uint32, length limit + 1

    def is_prime(self, m: int) -> bool:
        return m >= 2 and int(self.spf[m]) == m


@dataclass(frozen=True)
class FactoredInteger:
    """A positive squarefree integer with its ordered odd prime factors."""

    n: int
    odd_primes: tuple[int, ...]
    is_even: bool

    @property
    def r(self) -> int:
        return len(self.odd_primes)

    def odd_part(self) -> int:
        return self.n // 2 if self.is_even else self.n


def sieve_init(limit: int, max_bytes: int = DEFAULT_SIEVE_BUDGET) -> PrimeSieve:
    """Build a smallest-prime-factor table usable for O(log m) factorization."""
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    if 4 * (limit + 1) > max_bytes:
        raise ResourceLimitError(
            f"sieve to {limit} needs {4 * (limit + 1)} bytes, budget is {max_bytes}"
        )
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, int(limit ** 0.5) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    # Remaining zeros at indices >= 2 are primes (no factor <= sqrt(limit)).
    rest = np.nonzero(spf[2:] == 0)[0] + 2
    spf[rest] = rest
    spf[1] = 1
    return PrimeSieve(limit=limit, spf=spf)


def try_factor_squarefree(n: int, sieve: PrimeSieve) -> FactoredInteger | None:
    """FactoredInteger for n, or None when n is not squarefree."""
    if n < 1 or n > sieve.limit:
        raise ValueError(f"n={n} outside sieve range [1, {sieve.limit}]")
    m = n
    is_even = False
    if m % 2 == 0:
        m //= 2
        if m % 2 == 0:
            return None
        is_even = True
    primes = []
    spf = sieve.spf
    while m > 1:
        p = int(spf[m])
        m //= p
        if m % p == 0:
            return None
        primes.append(p)
    primes.sort()
    return FactoredInteger(n=n, odd_primes=tuple(primes), is_even=is_even)


def factor_squarefree(n: int, sieve: PrimeSieve) -> FactoredInteger:
    """Like try_factor_squarefree but raising NotSquarefreeError."""
    f = try_factor_squarefree(n, sieve)
    if f is None:
        raise NotSquarefreeError(f"{n} is not squarefree")
    return f


def jacobi(a: int, m: int) -> int:
    """Jacobi symbol (a/m) for odd positive m, via the binary algorithm.

    Handles negative and even a through the (-1/m) and (2/m)
    supplements.  Returns 0 when gcd(a, m) > 1.
    """
    if m <= 0 or m % 2 == 0:
        raise ValueError(f"Jacobi denominator must be odd and positive, got {m}")
    a %= m
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                result = -result
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            result = -result
        a %= m
    return result if m == 1 else 0


def legendre(d: int, p: int) -> int:
    """Legendre symbol (d/p) in {+1, -1} for an odd prime p with p not dividing d."""
    if p < 3 or p % 2 == 0:
        raise ValueError(f"p must be an odd prime, got {p}")
    if d % p == 0:
        raise ValueError(f"p={p} divides d={d}")
    return jacobi(d, p)


def legendre_plus(d: int, p: int) -> int:
    """Additive Legendre symbol: 0 for residues, 1 for non-residues."""
    return (1 - legendre(d, p)) // 2


def jacobi_plus(d: int, m: int) -> int:
    """Additive Jacobi symbol (d/m) for odd positive m coprime to d."""
    s = jacobi(d, m)
    if s == 0:
        raise ValueError(f"gcd({d}, {m}) > 1")
    return (1 - s) // 2


def _square_classes_mod(mod: int) -> frozenset[int]:
    return frozenset((x * x) % mod for x in range(1, mod) if _gcd(x, mod) == 1)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


_SQUARES_CACHE: dict[int, frozenset[int]] = {}


def is_square_class(a: int, n0: int, D: int) -> bool:
    """True iff a/n0 > 0 and a*n0 is a square modulo 8D.

    Membership test for the twist families indexed by (n0, D): the set of
    squarefree integers coprime to 2D landing in n0's square class.
    """
    if D <= 0 or D % 2 == 0:
        raise ValueError(f"D must be odd and positive, got {D}")
    mod = 8 * D
    if _gcd(a, 2 * D) != 1 or _gcd(n0, 2 * D) != 1:
        raise ValueError(f"arguments must be coprime to 2D: a={a}, n0={n0}, D={D}")
    if (a > 0) != (n0 > 0):
        return False
    sq = _SQUARES_CACHE.get(mod)
    if sq is None:
        sq = _square_classes_mod(mod)
        _SQUARES_CACHE[mod] = sq
    return (a * n0) % mod in sq


def is_squarefree_small(n: int) -> bool:
    """Trial-division squarefree test, for small n where no sieve is at hand."""
    if n < 1:
        return False
    if n % 4 == 0:
        return False
    p = 3
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 2
    return True


def enumerate_squarefree(
    residue: int, modulus: int, limit: int, sieve: PrimeSieve
) -> Iterator[FactoredInteger]:
    """All squarefree n <= limit with n == residue (mod modulus), ascending."""
    if limit > sieve.limit:
        raise ValueError(f"limit {limit} exceeds sieve limit {sieve.limit}")
    start = residue % modulus
    if start == 0:
        start = modulus
    for n in range(start, limit + 1, modulus):
        f = try_factor_squarefree(n, sieve)
        if f is not None:
            yield f
