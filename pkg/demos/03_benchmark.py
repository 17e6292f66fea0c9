"""Time per M2L translation against the expansion order.

Mirrors ``swapfmm bench``: for each order a batch of random translations is
run repeatedly and the total time is divided by the number of translations.
The naive double sum grows like P^4; the fast path does O(P^3) work in the
swaps and the z-translation but is dominated by O(P^2) passes at moderate P.

    python3 demos/03_benchmark.py [pmax] [out.csv]
"""

import sys

from swapfmm.bench import loglog_slope, run_bench, write_csv

pmax = int(sys.argv[1]) if len(sys.argv) > 1 else 40
path = sys.argv[2] if len(sys.argv) > 2 else None

records = []
print(" P    optimized ns   naive ns   speedup")
for rec in run_bench(1, pmax, batch=16, kernel="both"):
    records.append(rec)
    if rec.kernel == "naive":
        fast = records[-2].ns_per_translation
        print(f"{rec.order:2d} {fast:14.0f} {rec.ns_per_translation:10.0f} "
              f"{rec.ns_per_translation / fast:8.1f}x", flush=True)

if pmax >= 32:
    print(f"\nlog-log slope, naive on [16, {min(pmax, 40)}]: "
          f"{loglog_slope(records, 'naive', 16, 40):.2f}")
    print(f"log-log slope, optimized on [8, 32]: {loglog_slope(records, 'optimized', 8, 32):.2f}")

if path:
    with open(path, "w", newline="") as fh:
        write_csv(records, fh)
    print(f"wrote {len(records)} records to {path}")
