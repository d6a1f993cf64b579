"""Per-twist GF(2) data: Monsky-style matrices and Redei determinants.

For a positive squarefree n with odd prime factors p_1 < ... < p_r this
module builds the vectors y, z and the matrix A of additive Legendre
symbols, the Redei determinant g(n) detecting trivial 4-rank of
Cl(Q(sqrt(-n))), the eight residue-row determinant forms, the auxiliary
block matrices used to relate them, and the 2-Selmer rank formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gf2
from .gf2 import F2Matrix, F2Vector
from .numtheory import FactoredInteger, legendre_plus

__all__ = [
    "ROW_LABELS",
    "ROW_RESIDUE",
    "TwistData",
    "rows_for_residue",
    "build_twist",
    "diag",
    "redei_g",
    "redei_g_parts",
    "row_matrix",
    "row_matrix_parts",
    "row_det",
    "recursion_q",
    "det_recursion_rhs",
    "aux_o",
    "aux_n",
    "aux_p",
    "aux_t",
    "selmer_rank",
    "rank3_indicator",
    "random_constrained_triple",
]

# Residue rows, named by n mod 8 with the a/b variants for 5 and 7.
ROW_LABELS = ("1", "2", "3", "5a", "5b", "6", "7a", "7b")
ROW_RESIDUE = {
    "1": 1,
    "2": 2,
    "3": 3,
    "5a": 5,
    "5b": 5,
    "6": 6,
    "7a": 7,
    "7b": 7,
}
_ROWS_BY_RESIDUE = {
    1: ("1",),
    2: ("2",),
    3: ("3",),
    5: ("5a", "5b"),
    6: ("6",),
    7: ("7a", "7b"),
}


def rows_for_residue(t: int) -> tuple[str, ...]:
    """Row labels applicable to squarefree n with n = t (mod 8)."""
    try:
        return _ROWS_BY_RESIDUE[t]
    except KeyError:
        raise ValueError(f"no rows for residue {t} mod 8") from None


@dataclass(frozen=True)
class TwistData:
    """The (y, z, A) bundle attached to a squarefree integer.

    y_i and z_i are the additive symbols of -1 and 2 at p_i; A has
    off-diagonal entries (p_j/p_i)_+ and diagonal entries making every
    row sum to zero.  Quadratic reciprocity forces
    A_ij + A_ji = y_i * y_j for i != j.
    """

    f: FactoredInteger
    y: F2Vector
    z: F2Vector
    a: F2Matrix


def build_twist(f: FactoredInteger) -> TwistData:
    primes = f.odd_primes
    r = len(primes)
    y = F2Vector.from_bits(legendre_plus(-1, p) for p in primes)
    z = F2Vector.from_bits(legendre_plus(2, p) for p in primes)
    rows = []
    for i, p in enumerate(primes):
        row = 0
        for j, q in enumerate(primes):
            if i != j:
                row |= legendre_plus(q, p) << j
        row |= (bin(row).count("1") & 1) << i
        rows.append(row)
    return TwistData(f=f, y=y, z=z, a=F2Matrix(r, r, tuple(rows)))


def diag(v: F2Vector) -> F2Matrix:
    """Diagonal matrix with (D_v)_ii = v_i."""
    return F2Matrix.diag(v)


def redei_g_parts(a: F2Matrix, z: F2Vector, n_mod4: int) -> int:
    """Redei determinant from (A, z) for the residue class n mod 4.

    n_mod4 = 2 means any even squarefree n, with (A, z) taken from its
    odd part.  The 0x0 conventions make g(1) = g(2) = 1.
    """
    r = a.nrows
    if r == 0:
        return 1
    full = tuple(range(1, r + 1))
    if n_mod4 == 1:
        cols = tuple(i for i in full if i != 1)
        return gf2.det(gf2.block([[gf2.submatrix(a, full, cols), z.as_col()]]))
    if n_mod4 == 2:
        return gf2.det(a + F2Matrix.diag(z))
    if n_mod4 == 3:
        reduced = tuple(i for i in full if i != 1)
        return gf2.det(gf2.submatrix(a, reduced, reduced))
    raise ValueError(f"n_mod4 must be 1, 2 or 3, got {n_mod4}")


def redei_g(f: FactoredInteger) -> int:
    """g(n): 1 iff the class group of Q(sqrt(-n)) has trivial 4-rank."""
    t = build_twist(f)
    mod4 = 2 if f.is_even else f.n % 4
    return redei_g_parts(t.a, t.z, mod4)


def _b_mat(a: F2Matrix) -> F2Matrix:
    return a + a.transpose()


def row_matrix_parts(row: str, a: F2Matrix, y: F2Vector, z: F2Vector) -> F2Matrix:
    """The determinant-form matrix for a residue row, from raw (A, y, z)."""
    r = a.nrows
    at = a.transpose()
    dz = F2Matrix.diag(z)
    z0 = F2Matrix.zeros(r, 1)
    z0r = F2Matrix.zeros(1, r)
    if row == "1":
        return gf2.block([[_b_mat(a), at], [a, dz]])
    if row == "2":
        return gf2.block([[_b_mat(a) + F2Matrix.diag(y + z), at], [a, dz]])
    if row == "3":
        return gf2.block(
            [[_b_mat(a), at, y], [a, dz, z0], [y.as_row(), z0r, 0]]
        )
    if row == "5a":
        u = y + z
        return gf2.block(
            [[_b_mat(a), at, u], [a, dz, z0], [u.as_row(), z0r, 0]]
        )
    if row == "5b":
        return gf2.block(
            [[_b_mat(a), at, z0], [a, dz, y], [z0r, y.as_row(), 0]]
        )
    if row == "6":
        return gf2.block(
            [
                [_b_mat(a) + F2Matrix.diag(y + z), at, y],
                [a, dz, y],
                [y.as_row(), y.as_row(), 0],
            ]
        )
    if row == "7a":
        u = y + z
        return gf2.block(
            [
                [_b_mat(a), at, u, z0],
                [a, dz, z0, y],
                [u.as_row(), z0r, 0, 0],
                [z0r, y.as_row(), 0, 0],
            ]
        )
    if row == "7b":
        u = y + z
        return gf2.block(
            [
                [_b_mat(a), at, u, y],
                [a, dz, z0, z0],
                [u.as_row(), z0r, 0, 0],
                [y.as_row(), z0r, 0, 0],
            ]
        )
    raise ValueError(f"unknown row label {row!r}")


def row_matrix(row: str, t: TwistData) -> F2Matrix:
    """Determinant-form matrix for a twist; the row must match n mod 8."""
    if row not in ROW_RESIDUE:
        raise ValueError(f"unknown row label {row!r}")
    if t.f.n % 8 != ROW_RESIDUE[row]:
        raise ValueError(f"row {row} needs n = {ROW_RESIDUE[row]} (mod 8), n={t.f.n}")
    return row_matrix_parts(row, t.a, t.y, t.z)


def row_det(row: str, t: TwistData) -> int:
    return gf2.det(row_matrix(row, t))


# --- auxiliary block matrices -------------------------------------------------


def aux_o(a: F2Matrix, v1: F2Vector, v2: F2Vector) -> F2Matrix:
    """(r+1)-dimensional border of A by a column v1 and a row v2."""
    return gf2.block([[a, v1], [v2.as_row(), 0]])


def aux_n(a: F2Matrix, z: F2Vector, w: F2Vector) -> F2Matrix:
    """The (2r+2)-dimensional linearization with border columns z and w."""
    r = a.nrows
    z0 = F2Matrix.zeros(r, 1)
    z0r = F2Matrix.zeros(1, r)
    return gf2.block(
        [
            [_b_mat(a), a.transpose(), z0, z0],
            [a, F2Matrix.zeros(r, r), z, w],
            [z0r, z.as_row(), 0, 0],
            [z0r, w.as_row(), 0, 0],
        ]
    )


def aux_p(a: F2Matrix, y: F2Vector, z: F2Vector) -> F2Matrix:
    """2r-dimensional block with D_{y+z} and D_z on the diagonal."""
    return gf2.block([[F2Matrix.diag(y + z), a.transpose()], [a, F2Matrix.diag(z)]])


def aux_t(a: F2Matrix, y: F2Vector, z: F2Vector) -> F2Matrix:
    """aux_p bordered by the column y and the row y-transpose."""
    r = a.nrows
    return gf2.block(
        [
            [F2Matrix.diag(y + z), a.transpose(), y],
            [a, F2Matrix.diag(z), F2Matrix.zeros(r, 1)],
            [y.as_row(), F2Matrix.zeros(1, r), 0],
        ]
    )


# --- the determinant recursion ------------------------------------------------


def recursion_q(a: F2Matrix, z: F2Vector) -> F2Matrix:
    """A with its last column dropped, augmented by z."""
    r = a.nrows
    full = tuple(range(1, r + 1))
    return gf2.block([[gf2.submatrix(a, full, full[: r - 1]), z.as_col()]])


def _restrict_parts(
    a: F2Matrix, vs: tuple[F2Vector, ...], members: tuple[int, ...]
) -> tuple[F2Matrix, tuple[F2Vector, ...]]:
    return (
        gf2.rows_normalized(a, members, members),
        tuple(v.restrict(members) for v in vs),
    )


def det_recursion_rhs(a: F2Matrix, y: F2Vector, z: F2Vector) -> int:
    """Subset-sum side of the recursion for det of the residue-1 form.

    Sums over subsets S of [r] containing 1 the term
    (1 + sum_{i in S} y_i)(1 + sum_{i in S} z_i)
    * det Q(A,z)[S] * det M_1(A,z)[S'],
    where [S] restricts A by row-normalized submatrices and the vectors
    by coordinate selection.
    """
    r = a.nrows
    if r == 0:
        return 0
    total = 0
    for mask in range(1, 1 << r, 2):  # subsets containing index 1
        members = tuple(i + 1 for i in range(r) if (mask >> i) & 1)
        comp = tuple(i + 1 for i in range(r) if not (mask >> i) & 1)
        ys = y.restrict(members)
        zs = z.restrict(members)
        coeff = (1 ^ ys.parity()) & (1 ^ zs.parity())
        if not coeff:
            continue
        a_s, (z_s,) = _restrict_parts(a, (z,), members)
        dq = gf2.det(recursion_q(a_s, z_s))
        if not dq:
            continue
        a_c, (z_c,) = _restrict_parts(a, (z,), comp)
        y_c = y.restrict(comp)
        total ^= dq & gf2.det(row_matrix_parts("1", a_c, y_c, z_c))
    return total


# --- Selmer ranks ---------------------------------------------------------------


def selmer_rank(t: TwistData) -> int:
    """2-Selmer rank of the twist, for n = 1, 2 or 3 (mod 8)."""
    n = t.f.n
    res = n % 8
    if res == 1:
        return 2 + gf2.corank(row_matrix("1", t))
    if res == 2:
        return 2 + gf2.corank(row_matrix("2", t))
    if res == 3:
        m3 = row_matrix("3", t)
        idx = tuple(range(1, m3.nrows))  # drop the border row/column
        return 1 + gf2.corank(gf2.submatrix(m3, idx, idx))
    raise ValueError(f"selmer_rank needs n = 1, 2, 3 (mod 8); n={n}")


def rank3_indicator(t: TwistData) -> bool:
    """True iff the 2-Selmer rank is exactly 3, for n = 5, 6, 7 (mod 8).

    The minimal corank of the residue-1 form (residue-2 form for even n)
    is attained exactly at Selmer rank three.
    """
    n = t.f.n
    res = n % 8
    if res == 5:
        return gf2.corank(row_matrix_parts("1", t.a, t.y, t.z)) == 1
    if res == 6:
        return gf2.corank(row_matrix_parts("2", t.a, t.y, t.z)) == 1
    if res == 7:
        return gf2.corank(row_matrix_parts("1", t.a, t.y, t.z)) == 2
    raise ValueError(f"rank3_indicator needs n = 5, 6, 7 (mod 8); n={n}")


def random_constrained_triple(rng, r: int) -> tuple[F2Matrix, F2Vector, F2Vector]:
    """Random (A, y, z) with rows of A summing to zero and A_ij + A_ji = y_i y_j.

    Samples y, z and the strictly-upper entries of A uniformly, then
    fills the lower triangle by reciprocity and the diagonal by row sums.
    rng is a numpy Generator.
    """
    y = F2Vector.from_bits(int(b) for b in rng.integers(0, 2, size=r))
    z = F2Vector.from_bits(int(b) for b in rng.integers(0, 2, size=r))
    rows = [0] * r
    for i in range(r):
        for j in range(i + 1, r):
            bit = int(rng.integers(0, 2))
            rows[i] |= bit << j
            rows[j] |= (bit ^ (y[i] & y[j])) << i
    for i in range(r):
        rows[i] |= (bin(rows[i]).count("1") & 1) << i
    return F2Matrix(r, r, tuple(rows)), y, z
