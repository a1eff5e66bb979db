"""Runtime scaling: doubling n should cost ~2x plus a polylog factor.

Times the vectorized engine against the non-oblivious sort-merge baseline
over a geometric size ladder and prints the n -> 2n runtime ratios.  For
an n log^2 n algorithm the ratio tends to 2 * ((lg 2n)/(lg n))^2, a bit
above 2.  The baseline is asymptotically cheaper — the gap it opens up is
the price of a size-only access pattern.

Takes about half a minute.  Pass --quick for a smaller ladder.
"""

import sys

from oblivjoin import bench, bench_csv

sizes = [1 << k for k in range(10, 15 if "--quick" in sys.argv else 17)]
rows = bench(sizes, reps=3)

print(bench_csv(rows))
print("scaling ratios t(2n)/t(n):")
for a, b in zip(rows, rows[1:]):
    k = a.n.bit_length() - 1
    model = 2 * ((k + 1) / k) ** 2
    print(f"  n={a.n:>6} -> {b.n:>6}:  measured {b.oblivious_s / a.oblivious_s:.2f}"
          f"   model {model:.2f}")
