"""
Bandwidth against cluster size
==============================

The sweep runs over nine cluster sizes from 5 to 120 peers at four
livestream ratios.  For a given size and ratio the minimum bandwidth
depends only on the mean upload, so the reference means are used directly.
"""

from acide import StreamParams, sweep
from acide.scenario import REFERENCE_RATIOS_BPS, reference_grid_specs

KBPS = 1e3
stream = StreamParams(2000, 0.2)
rows = sweep(reference_grid_specs(stream), REFERENCE_RATIOS_BPS)

print("  n  u_avg   " + "  ".join(f"{r / KBPS:>5.0f}k" for r in REFERENCE_RATIOS_BPS))
by_n = {}
for row in rows:
    by_n.setdefault((row.n, row.u_avg_bps), []).append(row)
for (n, u_avg), group in by_n.items():
    cells = [f"{r.total_bw_bps / KBPS:6.2f}" if r.feasible else "   inf" for r in group]
    print(f"{n:3d} {u_avg / KBPS:6.1f}  " + " ".join(cells))

# %%
# A second pass draws uploads uniformly from the reference ranges instead.
random_rows = sweep(reference_grid_specs(stream, seed=1, use_reference_average=False), [10 * KBPS])
print("\nrandom draw, 10 kbps:", [round(r.total_bw_bps / KBPS, 2) for r in random_rows])
