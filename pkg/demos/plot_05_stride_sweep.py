"""
Stride sweep: cost of each front-end
====================================

The STFT-based front-ends pay for one FFT per hop plus a dense filter product,
whatever the stride/pool pair used for the conv front-ends.  The conv
front-ends pay per kernel placement, so halving the stride doubles the cost.
"""

from lff.bench import run_bench

rows = run_bench({"pairs": [[160, 1], [80, 2], [40, 4]], "repeats": 1, "duration_s": 10.0})
print("%-6s %6s %4s %14s %9s" % ("front", "stride", "pool", "MACs", "seconds"))
for r in rows:
    print("%-6s %6d %4d %14d %9.4f" % (r["frontend"], r["stride"], r["pool"], r["total_macs"], r["median_seconds"]))
