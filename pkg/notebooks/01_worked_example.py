"""
Five peers, one package
=======================

A cluster of five peers shares a 2000-bit package that must arrive within
200 ms.  We size the blocks, split the delay bound into two phases and
compare the result with plain unicast.
"""

import numpy as np

from acide import Cluster, Peer, StreamParams, minimize_bandwidth, unicast_baseline
from acide.display import display_phase_ms, floor_bits, floor_kbps

KBPS = 1e3

stream = StreamParams(package_bits=2000, delay_bound_s=0.2)
uploads = [15, 17, 18, 19, 20]
cluster = Cluster(tuple(Peer(i + 1, 20 * KBPS, u * KBPS) for i, u in enumerate(uploads)), stream)
print("S/T =", stream.ratio_bps, "bps   u_avg =", cluster.u_avg, "bps")

# %%
# Block sizes come out proportional to upload capacity, so every peer
# finishes its Phase-2 uploads at the same moment.
alloc = minimize_bandwidth(cluster)
print("blocks (bits):", [floor_bits(s) for s in alloc.block_bits])
print("s_i / u_i (s):", np.round(alloc.block_bits / cluster.uploads, 6))

# %%
# Phase 2 takes n-1 equal steps.  Whatever is left of T goes to Phase 1,
# and the base station must push every block within it.
t1_ms, t2_ms = display_phase_ms(stream.delay_bound_s, alloc.phase2_s)
print(f"T1 = {t1_ms} ms, T2 = {t2_ms} ms")
print("per-peer bw (kbps):", [floor_kbps(b) for b in alloc.peer_bw_bps])
print("total bw (kbps):", floor_kbps(alloc.total_bw_bps))

# %%
# Serving each peer directly would cost n * S/T.
print("unicast (kbps):", unicast_baseline(cluster.n, stream) / KBPS)
print("saving: %.1f %%" % (100 * (1 - alloc.total_bw_bps / unicast_baseline(cluster.n, stream))))
