"""Recursive L-value parity and the eight residue-row divisor sums.

These are the arithmetic side of the row identities: each residue row
pairs a divisor sum built from g and the recursive parity function with
a determinant form from monsky.  The divisor sums iterate literally over
(pairs of coprime) divisors; g and the parity function are memoized by
integer value since the same divisors recur across a scan.

Divisors of squarefree n are encoded as (mask over odd primes, power of
2), so subset iteration covers them exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import gf2
from .monsky import (
    ROW_RESIDUE,
    TwistData,
    build_twist,
    redei_g_parts,
    row_det,
    rows_for_residue,
)
from .numtheory import FactoredInteger

__all__ = ["LCache", "RowCheck", "lvalue_parity", "divisor_sum", "verify_rows"]


@dataclass
class LCache:
    """Memo tables for the recursive parity function and for g.

    Values are keyed by the integer they belong to, so caches can be
    shared across every n of a scan.  Single writer per cache; share
    read-only or keep one per worker.
    """

    lvals: dict[int, int] = field(default_factory=dict)
    gvals: dict[int, int] = field(default_factory=dict)


class _Ctx:
    """Divisor bookkeeping for one squarefree n: subset products and
    restrictions of the twist data."""

    __slots__ = ("twist", "prods", "cache", "members")

    def __init__(self, twist: TwistData, cache: LCache):
        self.twist = twist
        self.cache = cache
        primes = twist.f.odd_primes
        r = len(primes)
        prods = [1] * (1 << r)
        for mask in range(1, 1 << r):
            low = (mask & -mask).bit_length() - 1
            prods[mask] = prods[mask & (mask - 1)] * primes[low]
        self.prods = prods
        self.members = [
            tuple(i + 1 for i in range(r) if (mask >> i) & 1) for mask in range(1 << r)
        ]

    def g(self, mask: int, with2: bool) -> int:
        d = self.prods[mask] * (2 if with2 else 1)
        got = self.cache.gvals.get(d)
        if got is not None:
            return got
        members = self.members[mask]
        a_s = gf2.rows_normalized(self.twist.a, members, members)
        z_s = self.twist.z.restrict(members)
        val = redei_g_parts(a_s, z_s, 2 if with2 else d % 4)
        self.cache.gvals[d] = val
        return val

    def lval(self, mask: int) -> int:
        m = self.prods[mask]
        if m == 1:
            return 1
        if m % 8 != 1:
            return 0
        got = self.cache.lvals.get(m)
        if got is not None:
            return got
        low = mask & -mask
        rest = mask ^ low
        total = 0
        # Divisors d with p | d | m for the smallest prime factor p of m.
        sub = rest
        while True:
            dmask = sub | low
            if self.prods[dmask] % 8 == 1:
                gd = self.g(dmask, False)
                if gd:
                    total ^= gd & self.lval(mask ^ dmask)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        self.cache.lvals[m] = total
        return total


def _ctx(f: FactoredInteger, cache: LCache, twist: TwistData | None) -> _Ctx:
    return _Ctx(twist if twist is not None else build_twist(f), cache)


def lvalue_parity(
    f: FactoredInteger, cache: LCache, twist: TwistData | None = None
) -> int:
    """The recursive parity bit: 1 at n=1, the divisor recursion on
    n = 1 (mod 8), and 0 elsewhere."""
    if f.n == 1:
        return 1
    if f.is_even or f.n % 8 != 1:
        return 0
    ctx = _ctx(f, cache, twist)
    return ctx.lval((1 << f.r) - 1)


def _single_sum(ctx: _Ctx, f: FactoredInteger, want_mod: int, modulus: int) -> int:
    """Sum of g(d) * L(n/d) over divisors d = want_mod (mod modulus)."""
    r = f.r
    total = 0
    for mask in range(1 << r):
        for with2 in ((False, True) if f.is_even else (False,)):
            d = ctx.prods[mask] * (2 if with2 else 1)
            if d % modulus != want_mod:
                continue
            if f.is_even and not with2:
                continue  # quotient would be even, parity term vanishes
            comp = ((1 << r) - 1) ^ mask
            lv = ctx.lval(comp)
            if lv:
                total ^= ctx.g(mask, with2) & lv
    return total


def _pair_sum(
    ctx: _Ctx,
    f: FactoredInteger,
    mod0: int,
    want0: int,
    mod1: int,
    want1: int,
) -> int:
    """Sum of g(d0) g(d1) L(n/(d0 d1)) over coprime divisor pairs with
    d0 = want0 (mod mod0) and d1 = want1 (mod mod1)."""
    r = f.r
    full = (1 << r) - 1
    twos = ((False, True) if f.is_even else (False,))
    total = 0
    for mask0 in range(1 << r):
        rest = full ^ mask0
        for with2_0 in twos:
            d0 = ctx.prods[mask0] * (2 if with2_0 else 1)
            if d0 % mod0 != want0:
                continue
            g0 = ctx.g(mask0, with2_0)
            if not g0:
                continue
            sub = rest
            while True:
                for with2_1 in twos:
                    if with2_0 and with2_1:
                        continue
                    d1 = ctx.prods[sub] * (2 if with2_1 else 1)
                    if d1 % mod1 == want1:
                        if f.is_even and not (with2_0 or with2_1):
                            pass  # quotient even, term vanishes
                        else:
                            comp = rest ^ sub
                            lv = ctx.lval(comp)
                            if lv:
                                total ^= g0 & ctx.g(sub, with2_1) & lv
                if sub == 0:
                    break
                sub = (sub - 1) & rest
    return total


def divisor_sum(
    row: str, f: FactoredInteger, cache: LCache, twist: TwistData | None = None
) -> int:
    """The literal divisor-sum bit for a residue row at n."""
    if row not in ROW_RESIDUE:
        raise ValueError(f"unknown row label {row!r}")
    if f.n % 8 != ROW_RESIDUE[row]:
        raise ValueError(f"row {row} needs n = {ROW_RESIDUE[row]} (mod 8), n={f.n}")
    ctx = _ctx(f, cache, twist)
    n = f.n
    if row == "1":
        return ctx.lval((1 << f.r) - 1)
    if row == "2":
        return _single_sum(ctx, f, n % 16, 16)
    if row == "3":
        return _single_sum(ctx, f, 3, 8)
    if row == "5a":
        return _single_sum(ctx, f, 5, 8)
    if row == "5b":
        return _pair_sum(ctx, f, 8, 7, 8, 3)
    if row == "6":
        first = _pair_sum(ctx, f, 16, (7 * n) % 16, 8, 7)
        return first ^ _single_sum(ctx, f, n % 16, 16)
    if row == "7a":
        return _single_sum(ctx, f, 7, 8)
    if row == "7b":
        return _pair_sum(ctx, f, 8, 5, 8, 3)
    raise AssertionError(row)


@dataclass(frozen=True)
class RowCheck:
    """One row's divisor sum against its determinant form."""

    sum_value: int
    det_value: int

    @property
    def equal(self) -> bool:
        return self.sum_value == self.det_value


def verify_rows(
    f: FactoredInteger, cache: LCache, twist: TwistData | None = None
) -> dict[str, RowCheck]:
    """Evaluate both columns of every row applicable to n and compare."""
    if twist is None:
        twist = build_twist(f)
    out = {}
    for row in rows_for_residue(f.n % 8):
        out[row] = RowCheck(
            sum_value=divisor_sum(row, f, cache, twist),
            det_value=row_det(row, twist),
        )
    return out
