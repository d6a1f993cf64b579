"""Scan residue classes and compare rank frequencies with the limit law.

The limits are approached at log-log speed, so the finite-range numbers
sit visibly above the asymptotic values; the scan reports Wilson
intervals rather than a verdict.
"""

from cnkit.altsim import alpha
from cnkit.density import scan, wilson_ci
from cnkit.numtheory import sieve_init

LIMIT = 2 * 10 ** 5
sieve = sieve_init(LIMIT)

rep = scan(3, LIMIT, sieve)
count = rep.selmer_rank_hist.get(2, 0)
lo, hi = wilson_ci(count, rep.squarefree_count)
print(f"n = 3 (mod 8), n <= {LIMIT}:")
print(f"  2-Selmer rank histogram: {dict(sorted(rep.selmer_rank_hist.items()))}")
print(f"  rank-2 frequency {count / rep.squarefree_count:.4f}  CI [{lo:.4f}, {hi:.4f}]")
print(f"  limit value alpha_0 = {alpha(0):.4f}")

for t in (5, 6, 7):
    rep = scan(t, LIMIT, sieve)
    freq = rep.rank3_count / rep.squarefree_count
    lo, hi = wilson_ci(rep.rank3_count, rep.squarefree_count)
    print(f"n = {t} (mod 8): rank-3 frequency {freq:.4f}  CI [{lo:.4f}, {hi:.4f}]"
          f"  (limit alpha_1 = {alpha(1):.4f})")
    print(f"  certified congruent: {rep.certified_count / rep.squarefree_count:.4f}"
          f"  identity mismatches: {rep.identity_mismatches}")
