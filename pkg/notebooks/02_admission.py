"""
Fitting users under a bandwidth budget
======================================

With a fixed reserved bandwidth BW the base station admits as many users
as it can.  The greedy rule drops the slowest uploader until the
cluster fits, and a brute-force search confirms the count.
"""

from acide import (
    NoFeasibleClusterError,
    Peer,
    StreamParams,
    admit_max_peers,
    brute_force_admission,
    single_removal_comparison,
)

KBPS = 1e3
stream = StreamParams.from_ratio(10 * KBPS, 0.2)
users = [Peer(i + 1, 30 * KBPS, u * KBPS) for i, u in enumerate([10, 20, 30])]

# %%
# Which single removal helps most?  The slowest peer, always.
for pid, total in single_removal_comparison(users, stream):
    print(f"drop peer {pid}: bw = {total / KBPS:.3f} kbps")

# %%
for budget in (17, 14, 9):
    try:
        result = admit_max_peers(users, stream, budget * KBPS)
    except NoFeasibleClusterError as exc:
        print(f"BW = {budget} kbps: {exc.code}")
        continue
    oracle = brute_force_admission(users, stream, budget * KBPS)
    print(f"BW = {budget} kbps: admit {[p.id for p in result.admitted]}"
          f" using {result.allocation.total_bw_bps / KBPS:.3f} kbps"
          f" after {result.iterations} evaluations (brute force: n = {oracle.n})")
