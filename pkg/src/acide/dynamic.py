"""Per-package planning when peers join, leave or change capacity.

When the peer list differs from the previous package, the delay bound gets a
Phase 0 in which the base station sends every peer a notification carrying
its position and the cluster size. Phase 0 is sized so the notification
bandwidth equals the Phase-1 bandwidth, which minimizes the peak.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError
from .model import Cluster, Peer, StreamParams
from .optimizer import MIN_PHASE1_S, minimize_bandwidth, phase_times, solve_block_sizes


@dataclass(frozen=True)
class PeerListSnapshot:
    package_index: int
    peers: tuple

    def __post_init__(self):
        object.__setattr__(self, "peers", tuple(self.peers))
        if self.package_index < 1:
            raise ValueError("package_index starts at 1")
        ids = [p.id for p in self.peers]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate peer ids in {ids}")

    @property
    def n(self) -> int:
        return len(self.peers)

    def same_list(self, other: "PeerListSnapshot") -> bool:
        """Same membership and capacities, ignoring ordering and package index."""
        return sorted(self.peers, key=lambda p: p.id) == sorted(other.peers, key=lambda p: p.id)


@dataclass(frozen=True)
class ChurnEvent:
    at_package: int
    joins: tuple = ()
    leaves: tuple = ()
    # (peer id, new download bps, new upload bps)
    capacity_updates: tuple = ()

    def apply(self, peers) -> list[Peer]:
        by_id = {p.id: p for p in peers}
        for pid in list(self.leaves) + [u[0] for u in self.capacity_updates]:
            if pid not in by_id:
                raise KeyError(f"churn at package {self.at_package}: unknown peer id {pid}")
        out = [p for p in peers if p.id not in set(self.leaves)]
        updates = {pid: (d, u) for pid, d, u in self.capacity_updates}
        out = [Peer(p.id, *updates[p.id]) if p.id in updates else p for p in out]
        present = {p.id for p in out}
        for peer in self.joins:
            if peer.id in present:
                raise ValueError(f"churn at package {self.at_package}: peer id {peer.id} already present")
            present.add(peer.id)
            out.append(peer)
        return out


@dataclass
class DynamicPlan:
    package_index: int
    n: int
    notification_bits: float
    phase0_s: float
    phase1_s: float
    phase2_s: float
    bw0_bps: float
    bw1_bps: float
    block_bits: np.ndarray
    peer_bw_bps: np.ndarray
    changed: bool
    compute_time_s: float = field(default=0.0, compare=False)
    error: str | None = None

    @property
    def total_bw_bps(self) -> float:
        """Peak base-station bandwidth over the package (Phase 2 uses none)."""
        return max(self.bw0_bps, self.bw1_bps)

    @property
    def feasible(self) -> bool:
        return self.error is None


def notification_size_bits(n: int) -> int:
    """Bits needed to notify all n peers: each gets a position and the size, ceil(log2 n) bits apiece."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2 * n * (n - 1).bit_length()


def plan_package(previous: PeerListSnapshot, current: PeerListSnapshot, stream: StreamParams) -> DynamicPlan:
    started = time.perf_counter()
    cluster = Cluster(current.peers, stream)
    T, S = stream.delay_bound_s, stream.package_bits
    changed = not previous.same_list(current)

    if not changed:
        alloc = minimize_bandwidth(cluster)
        return DynamicPlan(
            package_index=current.package_index,
            n=cluster.n,
            notification_bits=0,
            phase0_s=0.0,
            phase1_s=alloc.phase1_s,
            phase2_s=alloc.phase2_s,
            bw0_bps=0.0,
            bw1_bps=alloc.total_bw_bps,
            block_bits=alloc.block_bits,
            peer_bw_bps=alloc.peer_bw_bps,
            changed=False,
            compute_time_s=time.perf_counter() - started,
        )

    s = solve_block_sizes(cluster)
    _, phase2 = phase_times(cluster, s)
    notif = notification_size_bits(cluster.n)
    phase0 = notif * (T - phase2) / (notif + S)
    phase1 = T - phase0 - phase2
    if phase1 <= MIN_PHASE1_S:
        raise InfeasibleError(f"package {current.package_index}: no Phase 1 time left after notification")
    bw = (S + notif) / (T - phase2)
    return DynamicPlan(
        package_index=current.package_index,
        n=cluster.n,
        notification_bits=notif,
        phase0_s=phase0,
        phase1_s=phase1,
        phase2_s=phase2,
        bw0_bps=bw,
        bw1_bps=bw,
        block_bits=s,
        peer_bw_bps=s / phase1,
        changed=True,
        compute_time_s=time.perf_counter() - started,
    )


def _failed_plan(index, n, error):
    nan = float("nan")
    return DynamicPlan(index, n, nan, nan, nan, nan, nan, nan, np.array([]), np.array([]), True, 0.0, error)


def run_stream(initial: PeerListSnapshot, events, stream: StreamParams, num_packages: int) -> list[DynamicPlan]:
    """Plan packages ``initial.package_index .. initial.package_index + num_packages - 1``.

    The first package is sent with no notification phase. An event tagged for
    package k is folded into that package's peer list; events tagged for the
    first (in-flight) package or earlier are deferred to the next one. An
    infeasible package gets a plan with ``error`` set and ends the stream.
    """
    events = sorted(events, key=lambda e: e.at_package)
    first = initial.package_index
    plans = []
    previous = initial
    pending = list(events)
    for k in range(first, first + num_packages):
        peers = list(previous.peers)
        if k > first:
            while pending and pending[0].at_package <= k:
                peers = pending.pop(0).apply(peers)
        current = PeerListSnapshot(k, peers)
        try:
            plan = plan_package(previous if k > first else current, current, stream)
        except InfeasibleError as exc:
            plans.append(_failed_plan(k, current.n, str(exc)))
            break
        plans.append(plan)
        previous = current
    return plans
