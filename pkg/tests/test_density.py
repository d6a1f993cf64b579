import pytest

from cnkit.density import (
    certified_table,
    fourrank_census,
    scan,
    wilson_ci,
)
from cnkit.numtheory import sieve_init


@pytest.fixture(scope="module")
def sieve():
    return sieve_init(10 ** 5)


def test_wilson_ci():
    lo, hi = wilson_ci(50, 100)
    assert lo < 0.5 < hi
    assert wilson_ci(0, 0) == (0.0, 1.0)
    lo, hi = wilson_ci(0, 100)
    assert lo < 1e-12 and hi < 0.05
    lo, hi = wilson_ci(100, 100)
    assert hi > 1 - 1e-12 and lo > 0.95


def test_certified_table_small(sieve):
    certs = list(certified_table(5, 40, sieve))
    assert [c.n for c in certs] == [5, 13, 21, 29, 37]
    assert all(c.rank3 and c.value == 1 for c in certs)
    assert all(c.row == "5a" for c in certs)
    certs7 = list(certified_table(7, 10, sieve))
    assert [(c.n, c.row) for c in certs7] == [(7, "7a")]
    certs6 = list(certified_table(6, 10, sieve))
    assert [(c.n, c.row) for c in certs6] == [(6, "6")]
    with pytest.raises(ValueError):
        list(certified_table(1, 10, sieve))


def test_certified_subset_of_rank3(sieve):
    rep = scan(5, 20000, sieve)
    certs = list(certified_table(5, 20000, sieve))
    assert len(certs) == rep.certified_count
    assert all(c.rank3 for c in certs)
    assert rep.certified_count <= rep.rank3_count


def test_scan_counts_against_direct_enumeration(sieve):
    from cnkit.lfun import LCache, divisor_sum
    from cnkit.monsky import build_twist, rank3_indicator
    from cnkit.numtheory import try_factor_squarefree

    rep = scan(5, 5000, sieve)
    cache = LCache()
    sf = r3 = n5a = joint = 0
    for n in range(5, 5001, 8):
        f = try_factor_squarefree(n, sieve)
        if f is None:
            continue
        sf += 1
        t = build_twist(f)
        ind = rank3_indicator(t)
        r3 += ind
        a = divisor_sum("5a", f, cache, t)
        b = divisor_sum("5b", f, cache, t)
        n5a += a
        if (a or b) and ind:
            joint += 1
    assert rep.squarefree_count == sf
    assert rep.rank3_count == r3
    assert rep.row_nonzero["5a"] == n5a
    assert rep.joint_nonzero == joint


def test_scan_identities_hold(sieve):
    for t in (1, 2, 3, 5, 6, 7):
        rep = scan(t, 3000, sieve)
        assert rep.identity_mismatches == 0
        assert rep.sel3_violations == 0
        if t in (5, 6, 7):
            for row, cnt in rep.row_nonzero.items():
                assert cnt <= rep.rank3_count


def test_scan_selmer_histogram(sieve):
    rep = scan(1, 10 ** 4, sieve)
    assert sum(rep.selmer_rank_hist.values()) == rep.squarefree_count
    assert set(rep.selmer_rank_hist) <= {2, 4, 6, 8, 10}
    rep3 = scan(3, 10 ** 4, sieve)
    assert set(rep3.selmer_rank_hist) <= {2, 4, 6, 8, 10}


def test_scan_worker_independence(sieve):
    limit = (1 << 16) + 30000  # spans two blocks
    seq = scan(5, limit, sieve, workers=1)
    par = scan(5, limit, sieve, workers=3)
    assert seq == par


def test_scan_errors(sieve):
    with pytest.raises(ValueError):
        scan(4, 100, sieve)
    with pytest.raises(ValueError):
        scan(5, 10 ** 7, sieve)


def test_census_small(sieve):
    from cnkit.altsim import four_rank
    from cnkit.numtheory import try_factor_squarefree

    census = fourrank_census(10 ** 4, sieve)
    assert census.total == sum(census.counts.values())
    # counts equal a direct enumeration
    direct: dict[int, int] = {}
    total = 0
    for n in range(3, 10 ** 4 + 1, 4):
        f = try_factor_squarefree(n, sieve)
        if f is None:
            continue
        total += 1
        k = four_rank(f)
        direct[k] = direct.get(k, 0) + 1
    assert census.total == total
    assert census.counts == direct


def test_census_worker_independence(sieve):
    limit = (1 << 16) + 30000
    seq = fourrank_census(limit, sieve, workers=1)
    par = fourrank_census(limit, sieve, workers=3)
    assert seq == par


def test_metrics_rows(sieve):
    rep = scan(5, 2000, sieve)
    metrics = {m: (c, t) for m, c, t in rep.metrics()}
    assert metrics["rank3"][1] == rep.squarefree_count
    assert "row5a_nonzero_given_rank3" in metrics
    assert metrics["identity_mismatches"][0] == 0
    rep1 = scan(1, 2000, sieve)
    names = [m for m, _, _ in rep1.metrics()]
    assert any(name.startswith("selmer_rank") for name in names)
