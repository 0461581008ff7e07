"""
Peers joining mid-stream
========================

Five peers start a stream.  Then 55 peers join, and then another 60.
Every time the list changes, the base station first sends each peer its
new index and the cluster size.  That Phase 0 eats into the delay bound,
so a changed package costs more than the same cluster would in steady state.
"""

from acide import ChurnEvent, Peer, PeerListSnapshot, StreamParams, minimize_bandwidth, run_stream
from acide.model import Cluster

KBPS = 1e3
stream = StreamParams(2000, 0.2)


def uniform(n, u, first_id):
    return tuple(Peer(first_id + i, 2000 * KBPS, u) for i in range(n))


# uploads chosen so the cluster mean is 17.8, 51.7 and 68.9 kbps at each stage
initial = uniform(5, 17.8 * KBPS, 1)
join2 = uniform(55, (60 * 51.7 - 5 * 17.8) / 55 * KBPS, 6)
join3 = uniform(60, (120 * 68.9 - 60 * 51.7) / 60 * KBPS, 61)
events = [ChurnEvent(2, joins=join2), ChurnEvent(3, joins=join3)]

plans = run_stream(PeerListSnapshot(1, initial), events, stream, num_packages=3)

# %%
print("pkg   n  notif   T0 ms   T1 ms   T2 ms   bw kbps   static kbps")
peers = list(initial)
for plan, extra in zip(plans, [(), join2, join3]):
    peers += extra
    static = minimize_bandwidth(Cluster(tuple(peers), stream)).total_bw_bps
    print(f"{plan.package_index:3d} {plan.n:3d} {plan.notification_bits:6d} {plan.phase0_s * 1e3:7.2f}"
          f" {plan.phase1_s * 1e3:7.2f} {plan.phase2_s * 1e3:7.2f} {plan.bw1_bps / KBPS:9.3f} {static / KBPS:12.3f}")

# %%
# Phase 2 keeps shrinking as faster peers arrive.  The notification
# overhead grows like n log n, though, and at n = 120 it outweighs that
# gain, so the changed package costs more than the one at n = 60.
