"""Range scans: rank-3 proportions, nonvanishing frequencies, certified
congruent numbers, and the 4-rank census.

Scans aggregate pure counts over contiguous blocks of n, so parallel
runs merge associatively and any worker count produces byte-identical
reports.  Every scanned n is also pushed through the row identities as a
standing cross-check.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

from .altsim import four_rank, gerth_pmf
from .lfun import LCache, divisor_sum, verify_rows
from .monsky import build_twist, rank3_indicator, rows_for_residue, selmer_rank
from .numtheory import PrimeSieve, sieve_init, try_factor_squarefree

__all__ = [
    "BLOCK",
    "DensityReport",
    "FourRankCensus",
    "Certificate",
    "wilson_ci",
    "scan",
    "certified_table",
    "fourrank_census",
]

BLOCK = 1 << 16  # block length for parallel partitioning

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


def wilson_ci(count: int, total: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total == 0:
        return (0.0, 1.0)
    p = count / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = z * math.sqrt(p * (1.0 - p) / total + z * z / (4 * total * total)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class DensityReport:
    """Counts from one residue-class scan.

    For t in {5, 6, 7}: rank-3 and nonvanishing counts plus certified
    congruent numbers.  For t in {1, 2, 3}: the 2-Selmer rank histogram.
    identity_mismatches and sel3_violations are standing assertions and
    must stay zero.
    """

    residue: int
    limit: int
    squarefree_count: int = 0
    rank3_count: int = 0
    row_nonzero: dict[str, int] = field(default_factory=dict)
    joint_nonzero: int = 0
    certified_count: int = 0
    selmer_rank_hist: dict[int, int] = field(default_factory=dict)
    identity_mismatches: int = 0
    sel3_violations: int = 0

    def merge(self, other: "DensityReport") -> None:
        self.squarefree_count += other.squarefree_count
        self.rank3_count += other.rank3_count
        for k, v in other.row_nonzero.items():
            self.row_nonzero[k] = self.row_nonzero.get(k, 0) + v
        self.joint_nonzero += other.joint_nonzero
        self.certified_count += other.certified_count
        for k, v in other.selmer_rank_hist.items():
            self.selmer_rank_hist[k] = self.selmer_rank_hist.get(k, 0) + v
        self.identity_mismatches += other.identity_mismatches
        self.sel3_violations += other.sel3_violations

    def metrics(self) -> list[tuple[str, int, int]]:
        """(metric, count, total) triples in a fixed order for reports."""
        out = [("squarefree", self.squarefree_count, self.squarefree_count)]
        if self.residue in (5, 6, 7):
            out.append(("rank3", self.rank3_count, self.squarefree_count))
            for row in rows_for_residue(self.residue):
                out.append(
                    (f"row{row}_nonzero", self.row_nonzero.get(row, 0), self.squarefree_count)
                )
                out.append(
                    (
                        f"row{row}_nonzero_given_rank3",
                        self.row_nonzero.get(row, 0),
                        self.rank3_count,
                    )
                )
            out.append(("joint_nonzero_given_rank3", self.joint_nonzero, self.rank3_count))
            out.append(("certified", self.certified_count, self.squarefree_count))
        else:
            for rank in sorted(self.selmer_rank_hist):
                out.append(
                    (f"selmer_rank{rank}", self.selmer_rank_hist[rank], self.squarefree_count)
                )
        out.append(("identity_mismatches", self.identity_mismatches, self.squarefree_count))
        out.append(("sel3_violations", self.sel3_violations, self.squarefree_count))
        return out


@dataclass(frozen=True)
class Certificate:
    """A certified congruent number and the row witnessing it."""

    n: int
    residue: int
    row: str
    rank3: bool
    value: int


@dataclass
class FourRankCensus:
    """Histogram of class-group 4-ranks over n = 3 (mod 4)."""

    limit: int
    total: int = 0
    counts: dict[int, int] = field(default_factory=dict)

    def merge(self, other: "FourRankCensus") -> None:
        self.total += other.total
        for k, v in other.counts.items():
            self.counts[k] = self.counts.get(k, 0) + v

    def frequency(self, k: int) -> float:
        return self.counts.get(k, 0) / self.total if self.total else 0.0

    def reference(self, k: int) -> float:
        return gerth_pmf(k)


# Per-worker state: the sieve is built once per process by the pool
# initializer (cheap next to the scan itself) and shared by its blocks.
_WORKER_SIEVE: dict[int, PrimeSieve] = {}


def _get_sieve(limit: int) -> PrimeSieve:
    sieve = _WORKER_SIEVE.get(limit)
    if sieve is None:
        sieve = sieve_init(limit)
        _WORKER_SIEVE[limit] = sieve
    return sieve


def _init_worker(limit: int) -> None:
    _get_sieve(limit)


def _scan_block(args) -> DensityReport:
    residue, sieve_limit, lo, hi = args
    sieve = _get_sieve(sieve_limit)
    cache = LCache()
    rep = DensityReport(residue=residue, limit=sieve_limit)
    rows = rows_for_residue(residue)
    start = lo + (residue - lo) % 8
    for n in range(start, hi, 8):
        f = try_factor_squarefree(n, sieve)
        if f is None:
            continue
        rep.squarefree_count += 1
        twist = build_twist(f)
        checks = verify_rows(f, cache, twist)
        if any(not c.equal for c in checks.values()):
            rep.identity_mismatches += 1
        if residue in (5, 6, 7):
            r3 = rank3_indicator(twist)
            if r3:
                rep.rank3_count += 1
            any_nonzero = False
            for row in rows:
                if checks[row].sum_value:
                    rep.row_nonzero[row] = rep.row_nonzero.get(row, 0) + 1
                    any_nonzero = True
                    if not r3:
                        rep.sel3_violations += 1
            if any_nonzero:
                rep.certified_count += 1
                if r3:
                    rep.joint_nonzero += 1
        else:
            rank = selmer_rank(twist)
            rep.selmer_rank_hist[rank] = rep.selmer_rank_hist.get(rank, 0) + 1
    return rep


def _blocks(residue: int, limit: int, sieve_limit: int) -> list[tuple[int, int, int, int]]:
    out = []
    lo = 1
    while lo <= limit:
        hi = min(lo + BLOCK, limit + 1)
        out.append((residue, sieve_limit, lo, hi))
        lo = hi
    return out


def scan(residue: int, limit: int, sieve: PrimeSieve, workers: int = 1) -> DensityReport:
    """Aggregate statistics over squarefree n = residue (mod 8), n <= limit."""
    if residue not in (1, 2, 3, 5, 6, 7):
        raise ValueError(f"residue must be in {{1,2,3,5,6,7}}, got {residue}")
    if limit > sieve.limit:
        raise ValueError(f"limit {limit} exceeds sieve limit {sieve.limit}")
    _WORKER_SIEVE.setdefault(sieve.limit, sieve)
    blocks = _blocks(residue, limit, sieve.limit)
    rep = DensityReport(residue=residue, limit=limit)
    if workers > 1:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(sieve.limit,)
        ) as pool:
            for part in pool.map(_scan_block, blocks):
                rep.merge(part)
    else:
        for blk in blocks:
            rep.merge(_scan_block(blk))
    return rep


def certified_table(
    residue: int, limit: int, sieve: PrimeSieve
) -> Iterator[Certificate]:
    """Certified congruent numbers n = residue (mod 8) up to limit.

    Emits each n whose applicable divisor sum is nonzero, labeled by the
    first witnessing row; by the nonvanishing criterion these n have
    analytic rank one and are congruent numbers.
    """
    if residue not in (5, 6, 7):
        raise ValueError(f"certification applies to residues 5, 6, 7; got {residue}")
    if limit > sieve.limit:
        raise ValueError(f"limit {limit} exceeds sieve limit {sieve.limit}")
    cache = LCache()
    rows = rows_for_residue(residue)
    start = residue
    for n in range(start, limit + 1, 8):
        f = try_factor_squarefree(n, sieve)
        if f is None:
            continue
        twist = build_twist(f)
        for row in rows:
            value = divisor_sum(row, f, cache, twist)
            if value:
                yield Certificate(
                    n=n,
                    residue=residue,
                    row=row,
                    rank3=rank3_indicator(twist),
                    value=value,
                )
                break


def _census_block(args) -> FourRankCensus:
    sieve_limit, lo, hi = args
    sieve = _get_sieve(sieve_limit)
    census = FourRankCensus(limit=sieve_limit)
    start = lo + (3 - lo) % 4
    for n in range(start, hi, 4):
        f = try_factor_squarefree(n, sieve)
        if f is None:
            continue
        k = four_rank(f)
        census.total += 1
        census.counts[k] = census.counts.get(k, 0) + 1
    return census


def fourrank_census(limit: int, sieve: PrimeSieve, workers: int = 1) -> FourRankCensus:
    """Empirical 4-rank distribution over squarefree n = 3 (mod 4), n <= limit."""
    if limit > sieve.limit:
        raise ValueError(f"limit {limit} exceeds sieve limit {sieve.limit}")
    _WORKER_SIEVE.setdefault(sieve.limit, sieve)
    blocks = []
    lo = 1
    while lo <= limit:
        hi = min(lo + BLOCK, limit + 1)
        blocks.append((sieve.limit, lo, hi))
        lo = hi
    census = FourRankCensus(limit=limit)
    if workers > 1:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(sieve.limit,)
        ) as pool:
            for part in pool.map(_census_block, blocks):
                census.merge(part)
    else:
        for blk in blocks:
            census.merge(_census_block(blk))
    return census
