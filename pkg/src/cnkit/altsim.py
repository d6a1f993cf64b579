"""Alternating-matrix ensembles, corank distributions and Markov models.

An ensemble is defined by an odd modulus D, admissible square classes
n0, divisor sequences T1/T2/Q1/Q2, a diagonal divisor and an alternating
seed block B.  For each admissible squarefree n (or each random bit
assignment standing in for one) it yields a (2r+t)-dimensional
alternating matrix whose corank, shifted by the structural offset delta,
follows the alpha_k distribution in the limit.

Also here: the two Markov chains (corank steps of +-2 for the ensemble,
+-1 for class-group 4-ranks), the closed-form limit laws, Monte Carlo
over bit assignments, and the 4-rank map for n = 3 (mod 4).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import gcd, isqrt

import numpy as np

from . import gf2
from ._batchrank import pack_rows, rank_batch
from .classgroup import ClassGroupInfo, classgroup_oracle
from .gf2 import F2Matrix, F2Vector
from .lfun import LCache, divisor_sum
from .numtheory import (
    FactoredInteger,
    is_square_class,
    is_squarefree_small,
    jacobi,
)

__all__ = [
    "AltConfig",
    "BitAssignment",
    "CorankHistogram",
    "EquivalenceResult",
    "ENSEMBLE_LABELS",
    "ensemble_config",
    "validate_config",
    "build_alt",
    "delta",
    "alpha",
    "equivalence_check",
    "sample_assignment",
    "draw_assignments",
    "corank_distribution_mc",
    "markov_step",
    "markov_stationary",
    "classrank_markov_step",
    "classrank_stationary",
    "gerth_pmf",
    "four_rank",
    "classgroup_oracle",
    "ClassGroupInfo",
]


@dataclass(frozen=True)
class AltConfig:
    """Data defining one alternating-matrix ensemble.

    n0 lists the admissible square classes (one entry except for the
    even-twist family, which covers both classes of n = 3 mod 4).
    """

    d: int
    n0: tuple[int, ...]
    t1: tuple[int, ...]
    t2: tuple[int, ...]
    q1: tuple[int, ...]
    q2: tuple[int, ...]
    d_diag: int = 1
    b: F2Matrix | None = None
    label: str = ""
    delta_expected: int | None = None

    @property
    def t(self) -> int:
        return len(self.t1)

    def b_block(self) -> F2Matrix:
        return self.b if self.b is not None else F2Matrix.zeros(self.t, self.t)

    def accepts(self, n: int) -> bool:
        """Membership of n in the ensemble's squarefree family (class part)."""
        return gcd(n, 2 * self.d) == 1 and any(
            is_square_class(n, n0, self.d) for n0 in self.n0
        )


def _prod(xs: tuple[int, ...]) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def _is_square(x: int) -> bool:
    return x > 0 and isqrt(x) ** 2 == x


def validate_config(cfg: AltConfig) -> None:
    """Reject configurations outside the ensemble hypotheses."""
    if cfg.d <= 0 or cfg.d % 2 == 0:
        raise ValueError(f"D must be odd and positive, got {cfg.d}")
    if len(cfg.t1) != len(cfg.t2):
        raise ValueError("T1 and T2 must have equal length")
    lim = 2 * cfg.d
    for name, seq in (("T1", cfg.t1), ("T2", cfg.t2), ("Q1", cfg.q1), ("Q2", cfg.q2)):
        for dd in seq:
            if dd == 0 or lim % abs(dd):
                raise ValueError(f"{name} entry {dd} is not a divisor of 2D={lim}")
    if cfg.d_diag == 0 or lim % abs(cfg.d_diag):
        raise ValueError(f"d_diag {cfg.d_diag} is not a divisor of 2D={lim}")
    for n0 in cfg.n0:
        if gcd(n0, lim) != 1:
            raise ValueError(f"n0={n0} not coprime to 2D={lim}")
    b = cfg.b_block()
    if b.nrows != cfg.t or b.ncols != cfg.t:
        raise ValueError("B block must be t x t")
    bt = b.transpose()
    if b.rows != bt.rows or any((row >> i) & 1 for i, row in enumerate(b.rows)):
        raise ValueError("B block must be alternating")
    b1, b2 = _prod(cfg.q1), _prod(cfg.q2)
    if _is_square(b1) or _is_square(b2) or _is_square(-b1 * b2):
        raise ValueError(f"Q products violate the non-square condition: {b1}, {b2}")
    if _is_square(-b1) and _is_square(-b2):
        raise ValueError("at least one of the Q products must not be -1 times a square")


# The seven reference ensembles (d_diag = 1, B = 0 throughout).  The
# final field is the structural corank offset each is known to have.
_ENSEMBLES = {
    "5a": AltConfig(1, (5,), (-2,), (2,), (-1,), (2,), label="5a", delta_expected=1),
    "5b": AltConfig(1, (5,), (1,), (-1,), (-1,), (2,), label="5b", delta_expected=1),
    "5ab": AltConfig(1, (5,), (-2,), (-2,), (-1,), (2,), label="5ab", delta_expected=1),
    "6": AltConfig(1, (3, 7), (2,), (-2,), (-2, -1), (2,), label="6", delta_expected=1),
    "7a": AltConfig(
        1, (7,), (-2, 1), (1, -2), (-1,), (2,), label="7a", delta_expected=0
    ),
    "7b": AltConfig(
        1, (7,), (-2, -1), (1, 1), (-1,), (2,), label="7b", delta_expected=0
    ),
    "7ab": AltConfig(
        1, (7,), (-2, -1), (1, -2), (-1,), (2,), label="7ab", delta_expected=0
    ),
}

ENSEMBLE_LABELS = tuple(_ENSEMBLES)


def ensemble_config(label: str) -> AltConfig:
    try:
        return _ENSEMBLES[label]
    except KeyError:
        raise ValueError(f"unknown ensemble label {label!r}") from None


# --- bit sources ---------------------------------------------------------------


def _sym_plus(d: int, m: int) -> int:
    """(d/m)_+ for odd positive m coprime to 2D, d a signed divisor of 2D."""
    return (1 - jacobi(d, m)) // 2


def _unit_class_reps(d: int) -> tuple[tuple[int, ...], dict[int, int]]:
    """Representatives of (Z/8D)^x modulo squares, plus unit -> rep index."""
    mod = 8 * d
    units = [u for u in range(1, mod) if gcd(u, mod) == 1]
    squares = {u * u % mod for u in units}
    reps: list[int] = []
    unit_to_idx: dict[int, int] = {}
    for u in units:
        if u in unit_to_idx:
            continue
        idx = len(reps)
        reps.append(u)
        for s in squares:
            unit_to_idx[u * s % mod] = idx
    return tuple(reps), unit_to_idx


@dataclass(frozen=True)
class BitAssignment:
    """Uniform stand-in for the Legendre-symbol bits of an admissible n.

    classes holds one unit representative mod 8D per prime; upper holds
    the strictly-upper rows of A as packed ints.  The product of the
    classes is constrained to an admissible square class.
    """

    d: int
    r: int
    classes: tuple[int, ...]
    upper: tuple[int, ...]

    def product_class(self) -> int:
        mod = 8 * self.d
        out = 1
        for c in self.classes:
            out = out * c % mod
        return out


@dataclass
class CorankHistogram:
    """Aggregated coranks from a Monte Carlo run."""

    label: str
    r: int
    samples: int
    seed: int
    counts: dict[int, int] = field(default_factory=dict)

    def frequency(self, corank: int) -> float:
        return self.counts.get(corank, 0) / self.samples

    def total(self) -> int:
        return sum(self.counts.values())


def _symbol_table(cfg: AltConfig, reps: tuple[int, ...]) -> dict[int, np.ndarray]:
    divisors = {-1, 2, cfg.d_diag, *cfg.t1, *cfg.t2, *cfg.q1, *cfg.q2}
    return {
        dd: np.array([_sym_plus(dd, rep) for rep in reps], dtype=np.uint8)
        for dd in divisors
    }


def _assignment_bits(cfg: AltConfig, src: BitAssignment):
    """Per-prime symbol bits and the A matrix encoded by an assignment."""
    r = src.r
    y = [_sym_plus(-1, c) for c in src.classes]
    rows = list(src.upper)
    for i in range(r):
        for j in range(i + 1, r):
            bit = (rows[i] >> j) & 1
            rows[j] |= (bit ^ (y[i] & y[j])) << i
    for i in range(r):
        rows[i] |= (bin(rows[i]).count("1") & 1) << i
    a = F2Matrix(r, r, tuple(rows))
    sym = lambda dd: [_sym_plus(dd, c) for c in src.classes]  # noqa: E731
    return a, sym


def build_alt(cfg: AltConfig, source: "FactoredInteger | BitAssignment") -> F2Matrix:
    """The (2r+t)-dimensional alternating matrix for one bit source."""
    if isinstance(source, FactoredInteger):
        if source.is_even or not cfg.accepts(source.n):
            raise ValueError(f"n={source.n} not in the ensemble family")
        from .monsky import build_twist

        r = source.r
        a = build_twist(source).a
        sym = lambda dd: [_sym_plus(dd, p) for p in source.odd_primes]  # noqa: E731
    else:
        a, sym = _assignment_bits(cfg, source)
        r = source.r

    def b_block(q: tuple[int, ...]) -> F2Matrix:
        rows = [0] * r
        for dd in q:
            mask = sum(bit << i for i, bit in enumerate(sym(dd)))
            for i in range(r):
                if (mask >> i) & 1:
                    rows[i] ^= mask
        rows = [row & ~(1 << i) for i, row in enumerate(rows)]
        return F2Matrix(r, r, tuple(rows))

    def r_block(t_seq: tuple[int, ...]) -> F2Matrix:
        return F2Matrix.from_rows([sym(dd) for dd in t_seq])

    ddiag = F2Matrix.diag(F2Vector.from_bits(sym(cfg.d_diag)))
    a_d = a + ddiag
    at_d = a.transpose() + ddiag
    r1 = r_block(cfg.t1)
    r2 = r_block(cfg.t2)
    return gf2.block(
        [
            [b_block(cfg.q1), at_d, r1.transpose()],
            [a_d, b_block(cfg.q2), r2.transpose()],
            [r1, r2, cfg.b_block()],
        ]
    )


# --- structural corank offset ---------------------------------------------------


def _factor_small(n: int) -> FactoredInteger | None:
    if n < 1 or not is_squarefree_small(n):
        return None
    primes = []
    m = n
    is_even = m % 2 == 0
    if is_even:
        m //= 2
    p = 3
    while p * p <= m:
        if m % p == 0:
            primes.append(p)
            m //= p
        p += 2
    if m > 1:
        primes.append(m)
    return FactoredInteger(n=n, odd_primes=tuple(sorted(primes)), is_even=is_even)


def family_members(cfg: AltConfig, count: int, hard_cap: int = 10 ** 7):
    """The first `count` squarefree members of the ensemble family, ascending."""
    found = 0
    n = 1
    while n <= hard_cap and found < count:
        if cfg.accepts(n):
            f = _factor_small(n)
            if f is not None:
                yield f
                found += 1
        n += 2


def delta(cfg: AltConfig, search_budget: int = 200) -> int:
    """Structural corank offset: t + 2 minus the best achievable rank of
    the marked column family (first-block sum, second-block sum, and the
    t border columns), over a budget of family members."""
    t = cfg.t
    best = -1
    found = 0
    for f in family_members(cfg, search_budget):
        found += 1
        m = build_alt(cfg, f)
        r = f.r
        v = F2Vector.zeros(m.nrows)
        vp = F2Vector.zeros(m.nrows)
        for j in range(r):
            v = v + m.column(j)
            vp = vp + m.column(r + j)
        vecs = [v.bits, vp.bits] + [m.column(2 * r + i).bits for i in range(t)]
        rank = gf2.rank(F2Matrix(len(vecs), m.nrows, tuple(vecs)))
        if rank > best:
            best = rank
            if best == t + 2:
                break
    if found == 0:
        raise RuntimeError("no family members found within the search budget")
    return t + 2 - best


# --- the limit law and its Markov chains -----------------------------------------


def _inv_prod() -> float:
    out = 1.0
    for j in range(0, 65):
        out /= 1.0 + 2.0 ** (-j)
    return out


_INV_PROD = _inv_prod()


def alpha(k: int) -> float:
    """Limiting proportion of family members with corank k + delta
    (within the parity class k = t + delta mod 2)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = 2.0 ** (k + 1) * _INV_PROD
    for j in range(1, k + 1):
        out /= 2.0 ** j - 1.0
    return out


def markov_step(k: int) -> tuple[float, float, float]:
    """Transition probabilities (corank +2, unchanged, -2) from corank k."""
    up = 2.0 ** (-2 * k - 1)
    stay = 3.0 * 2.0 ** (-k) - 5.0 * 2.0 ** (-2 * k - 1)
    down = 1.0 - 3.0 * 2.0 ** (-k) + 2.0 ** (-2 * k + 1)
    return up, stay, down


def _stationary(states: list[int], step, tol: float, max_iter: int) -> dict[int, float]:
    idx = {k: i for i, k in enumerate(states)}
    n = len(states)
    p = np.zeros((n, n))
    for k in states:
        i = idx[k]
        up, stay, down = step(k)
        j_up = idx.get(k + (states[1] - states[0]))
        if j_up is None:
            stay += up  # reflect the (astronomically small) top overflow
        else:
            p[i, j_up] = up
        p[i, i] += stay
        if down:
            p[i, idx[k - (states[1] - states[0])]] = down
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = pi @ p
        if np.abs(nxt - pi).sum() < tol:
            return {k: float(nxt[idx[k]]) for k in states}
        pi = nxt
    raise RuntimeError(f"stationary distribution did not converge to {tol}")


def markov_stationary(
    parity: str, k_max: int = 64, tol: float = 1e-12, max_iter: int = 200_000
) -> dict[int, float]:
    """Fixed point of the corank chain on one parity class, by power iteration."""
    if k_max < 8:
        raise ValueError("k_max must be at least 8")
    if parity == "even":
        states = list(range(0, k_max + 1, 2))
    elif parity == "odd":
        states = list(range(1, k_max + 1, 2))
    else:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    return _stationary(states, markov_step, tol, max_iter)


def classrank_markov_step(k: int) -> tuple[float, float, float]:
    """Transition probabilities (4-rank +1, unchanged, -1) from rank k."""
    up = 2.0 ** (-2 * k - 1)
    stay = 2.0 ** (-k + 1) - 3.0 * 2.0 ** (-2 * k - 1)
    down = 1.0 - 2.0 ** (-k + 1) + 2.0 ** (-2 * k)
    return up, stay, down


def classrank_stationary(
    k_max: int = 64, tol: float = 1e-12, max_iter: int = 200_000
) -> dict[int, float]:
    return _stationary(list(range(k_max + 1)), classrank_markov_step, tol, max_iter)


def gerth_pmf(k: int) -> float:
    """Limiting proportion of imaginary quadratic class groups of 4-rank k."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = 2.0 ** (-k * k)
    for i in range(1, k + 1):
        out /= (1.0 - 2.0 ** (-i)) ** 2
    for i in range(1, 65):
        out *= 1.0 - 2.0 ** (-i)
    return out


# --- equivalence with the divisor sums -------------------------------------------


@dataclass(frozen=True)
class EquivalenceResult:
    """Both sides of the nonvanishing criterion for one member."""

    label: str
    n: int
    value_nonzero: bool
    corank: int
    delta: int

    @property
    def corank_minimal(self) -> bool:
        return self.corank == self.delta

    @property
    def agrees(self) -> bool:
        return self.value_nonzero == self.corank_minimal


def _ensemble_value(label: str, f: FactoredInteger, cache: LCache) -> int:
    if label in ("5a", "5b", "7a", "7b"):
        return divisor_sum(label, f, cache)
    if label == "5ab":
        return divisor_sum("5a", f, cache) ^ divisor_sum("5b", f, cache)
    if label == "7ab":
        return divisor_sum("7a", f, cache) ^ divisor_sum("7b", f, cache)
    if label == "6":
        doubled = FactoredInteger(n=2 * f.n, odd_primes=f.odd_primes, is_even=True)
        return divisor_sum("6", doubled, cache)
    raise ValueError(f"unknown ensemble label {label!r}")


def equivalence_check(
    label: str, f: FactoredInteger, cache: LCache | None = None
) -> EquivalenceResult:
    """Compare divisor-sum nonvanishing against minimal ensemble corank."""
    cfg = ensemble_config(label)
    if f.is_even or not cfg.accepts(f.n):
        raise ValueError(f"n={f.n} not admissible for ensemble {label}")
    if cache is None:
        cache = LCache()
    value = _ensemble_value(label, f, cache)
    crk = gf2.corank(build_alt(cfg, f))
    return EquivalenceResult(
        label=label,
        n=f.n,
        value_nonzero=bool(value),
        corank=crk,
        delta=cfg.delta_expected if cfg.delta_expected is not None else delta(cfg),
    )


# --- Monte Carlo over bit assignments --------------------------------------------

MC_BLOCK = 4096


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(block,)))
    )


def _draw_block(cfg: AltConfig, r: int, rng: np.random.Generator, count: int):
    """Raw per-sample draws: class indices (count, r) and upper-bit
    tables (count, r, r), in a fixed call order for reproducibility."""
    reps, unit_to_idx = _unit_class_reps(cfg.d)
    mod = 8 * cfg.d
    cls = np.empty((count, r), dtype=np.int64)
    cls[:, : r - 1] = rng.integers(0, len(reps), size=(count, r - 1))
    if len(cfg.n0) > 1:
        targets = np.array(cfg.n0)[rng.integers(0, len(cfg.n0), size=count)]
    else:
        targets = np.full(count, cfg.n0[0])
    upper = rng.integers(0, 2, size=(count, r, r), dtype=np.uint8)
    reps_arr = np.array(reps, dtype=np.int64)
    prod = np.ones(count, dtype=np.int64)
    for j in range(r - 1):
        prod = prod * reps_arr[cls[:, j]] % mod
    inv = np.array([pow(int(x), -1, mod) for x in prod], dtype=np.int64)
    last_units = targets % mod * inv % mod
    lookup = np.zeros(mod, dtype=np.int64)
    for u, i in unit_to_idx.items():
        lookup[u] = i
    cls[:, r - 1] = lookup[last_units]
    return cls, upper


def _materialize(cfg: AltConfig, cls_row: np.ndarray, upper_tab: np.ndarray):
    reps, _ = _unit_class_reps(cfg.d)
    r = len(cls_row)
    upper_rows = []
    for i in range(r):
        row = 0
        for j in range(i + 1, r):
            row |= int(upper_tab[i, j]) << j
        upper_rows.append(row)
    return BitAssignment(
        d=cfg.d,
        r=r,
        classes=tuple(reps[i] for i in cls_row),
        upper=tuple(upper_rows),
    )


def sample_assignment(
    cfg: AltConfig, r: int, rng: np.random.Generator
) -> BitAssignment:
    """One uniform bit assignment with the product-class constraint."""
    if r < 1:
        raise ValueError("r must be positive")
    cls, upper = _draw_block(cfg, r, rng, 1)
    return _materialize(cfg, cls[0], upper[0])


def draw_assignments(
    cfg: AltConfig, r: int, rng: np.random.Generator, count: int
) -> list[BitAssignment]:
    """A block of assignments drawn exactly as the Monte Carlo path draws them."""
    cls, upper = _draw_block(cfg, r, rng, count)
    return [_materialize(cfg, cls[i], upper[i]) for i in range(count)]


def _assemble_block(cfg: AltConfig, cls: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Vectorized matrix assembly for a block of assignments; returns
    packed uint64 rows ready for rank_batch."""
    reps, _ = _unit_class_reps(cfg.d)
    tables = _symbol_table(cfg, reps)
    count, r = cls.shape
    t = cfg.t
    m = 2 * r + t

    tri_u = np.triu(np.ones((r, r), dtype=np.uint8), 1)
    tri_l = tri_u.T
    u = upper & tri_u
    y = tables[-1][cls]  # (count, r)
    yy = y[:, :, None] & y[:, None, :]
    a = u ^ np.transpose(u, (0, 2, 1)) ^ (yy & tri_l)
    diag = a.sum(axis=2, dtype=np.int64) & 1
    ii = np.arange(r)
    a[:, ii, ii] = diag.astype(np.uint8)

    def b_block(q: tuple[int, ...]) -> np.ndarray:
        out = np.zeros((count, r, r), dtype=np.uint8)
        for dd in q:
            qb = tables[dd][cls]
            out ^= qb[:, :, None] & qb[:, None, :]
        out[:, ii, ii] = 0
        return out

    dbit = tables[cfg.d_diag][cls]
    a_d = a.copy()
    a_d[:, ii, ii] ^= dbit
    at_d = np.transpose(a, (0, 2, 1)).copy()
    at_d[:, ii, ii] ^= dbit

    full = np.zeros((count, m, m), dtype=np.uint8)
    full[:, :r, :r] = b_block(cfg.q1)
    full[:, :r, r : 2 * r] = at_d
    full[:, r : 2 * r, :r] = a_d
    full[:, r : 2 * r, r : 2 * r] = b_block(cfg.q2)
    for i, dd in enumerate(cfg.t1):
        col = tables[dd][cls]
        full[:, 2 * r + i, :r] = col
        full[:, :r, 2 * r + i] = col
    for i, dd in enumerate(cfg.t2):
        col = tables[dd][cls]
        full[:, 2 * r + i, r : 2 * r] = col
        full[:, r : 2 * r, 2 * r + i] = col
    bseed = np.array(cfg.b_block().tolist(), dtype=np.uint8).reshape(t, t)
    full[:, 2 * r :, 2 * r :] = bseed
    return pack_rows(full)


def _mc_block(args) -> np.ndarray:
    label, r, seed, block, count = args
    cfg = ensemble_config(label)
    rng = _block_rng(seed, block)
    cls, upper = _draw_block(cfg, r, rng, count)
    words = _assemble_block(cfg, cls, upper)
    m = 2 * r + cfg.t
    coranks = m - rank_batch(words)
    return np.bincount(coranks, minlength=m + 1)


def corank_distribution_mc(
    cfg: AltConfig,
    r: int,
    samples: int,
    seed: int,
    workers: int = 1,
) -> CorankHistogram:
    """Empirical corank distribution over uniform bit assignments.

    Samples are partitioned into fixed blocks with per-block RNG streams
    derived from (seed, block index), so results are bit-identical for
    any worker count.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    if not cfg.label:
        raise ValueError("Monte Carlo needs a registered ensemble label")
    blocks = []
    off = 0
    b = 0
    while off < samples:
        count = min(MC_BLOCK, samples - off)
        blocks.append((cfg.label, r, seed, b, count))
        off += count
        b += 1
    m = 2 * r + cfg.t
    total = np.zeros(m + 1, dtype=np.int64)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for counts in pool.map(_mc_block, blocks):
                total += counts
    else:
        for blk in blocks:
            total += _mc_block(blk)
    hist = CorankHistogram(label=cfg.label, r=r, samples=samples, seed=seed)
    hist.counts = {k: int(c) for k, c in enumerate(total) if c}
    return hist


# --- 4-ranks of class groups ------------------------------------------------------


def four_rank(f: FactoredInteger) -> int:
    """4-rank of Cl(Q(sqrt(-n))) for squarefree n = 3 (mod 4), read off
    as the corank of A with its first row and column deleted."""
    if f.is_even or f.n % 4 != 3:
        raise ValueError(f"four_rank needs n = 3 (mod 4), got {f.n}")
    from .monsky import build_twist

    a = build_twist(f).a
    idx = tuple(range(2, f.r + 1))
    return gf2.corank(gf2.submatrix(a, idx, idx))
