"""
Replaying the two phases
========================

A step-by-step simulation of both Phase-2 interconnects.  Each transfer
takes block size / min(sender upload, receiver download).  With the
optimal block sizes every step takes the same time and the package
lands exactly at T.
"""

import numpy as np

from acide import Cluster, Peer, StreamParams, Topology, minimize_bandwidth, simulate
from acide.schedule import Mode, Phase

KBPS = 1e3
stream = StreamParams(2000, 0.2)
cluster = Cluster(tuple(Peer(i + 1, 20 * KBPS, u * KBPS) for i, u in enumerate([15, 17, 18, 19, 20])), stream)
alloc = minimize_bandwidth(cluster)

for topology in Topology:
    report = simulate(cluster, alloc.block_bits, alloc.peer_bw_bps, topology)
    print(f"\n{topology.value}: completion {report.completion_s * 1e3:.3f} ms,"
          f" steps {np.round(np.array(report.step_durations_s) * 1e3, 3)} ms,"
          f" violations {len(report.violations)}")
    for ev in report.events:
        if ev.phase is Phase.PHASE2 and ev.step == 1:
            arrow = "=>" if ev.mode is Mode.BROADCAST else "->"
            print(f"  step 1: {ev.sender} {arrow} {ev.receiver} block {ev.block}")

# %%
# Equal blocks are simpler, but the slowest uploader then sets the pace.
equal = np.full(cluster.n, stream.package_bits / cluster.n)
report = simulate(cluster, equal, alloc.peer_bw_bps)
print(f"\nequal split: completion {report.completion_s * 1e3:.3f} ms (bound {stream.delay_bound_s * 1e3:.0f} ms)")
