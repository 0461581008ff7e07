"""Step-by-step simulation of the two-phase block distribution.

Phase 1: the base station sends block i to peer i, all in parallel.
Phase 2: n-1 sequential steps of peer-to-peer exchange, either a mesh
(ring shift, every transfer unicast) or a star (peer 1 feeds one peer per
step while that peer broadcasts its own block to everyone else).

Events address peers by position 1..n in the cluster; block i is the block
peer i got from the base station. Reports translate positions to peer ids.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError
from .model import Cluster, Topology, Violation

BASE_STATION = 0


class Phase(Enum):
    PHASE1 = 1
    PHASE2 = 2


class Mode(Enum):
    UNICAST = "unicast"
    BROADCAST = "broadcast"


@dataclass(frozen=True)
class TransferEvent:
    phase: Phase
    step: int
    sender: int
    receiver: int
    block: int
    mode: Mode = Mode.UNICAST
    start_s: float = 0.0
    duration_s: float = 0.0


@dataclass
class ScheduleReport:
    events: list
    step_durations_s: list
    phase1_s: float
    phase2_s: float
    completion_s: float
    blocks_held: dict
    violations: list = field(default_factory=list)
    topology: Topology = Topology.MESH


def _phase1_events(n):
    return [TransferEvent(Phase.PHASE1, 0, BASE_STATION, i, i) for i in range(1, n + 1)]


def mesh_schedule(n: int) -> list[TransferEvent]:
    if n < 2:
        raise ValueError("a Phase-2 schedule needs n >= 2")
    events = _phase1_events(n)
    for k in range(1, n):
        for i in range(1, n + 1):
            events.append(TransferEvent(Phase.PHASE2, k, i, (i + k - 1) % n + 1, i))
    return events


def star_schedule(n: int) -> list[TransferEvent]:
    if n < 2:
        raise ValueError("a Phase-2 schedule needs n >= 2")
    events = _phase1_events(n)
    for k in range(1, n):
        hub = k + 1
        events.append(TransferEvent(Phase.PHASE2, k, 1, hub, 1))
        for j in range(1, n + 1):
            if j != hub:
                events.append(TransferEvent(Phase.PHASE2, k, hub, j, hub, Mode.BROADCAST))
    return events


def schedule_for(topology: Topology, n: int) -> list[TransferEvent]:
    if n == 1:
        return _phase1_events(1)
    return mesh_schedule(n) if topology is Topology.MESH else star_schedule(n)


def _interface_violations(step, step_events):
    found = []
    uploads = defaultdict(set)
    for ev in step_events:
        # a broadcast occupies the upload interface once, whatever the fan-out
        uploads[ev.sender].add((ev.mode, ev.block) if ev.mode is Mode.BROADCAST else (ev.mode, ev.receiver))
    for sender, acts in uploads.items():
        if len(acts) > 1:
            found.append(Violation("UPLOAD_BUSY", f"step {step}: position {sender} uploads {len(acts)} times"))
    inbound = defaultdict(set)
    for ev in step_events:
        inbound[ev.receiver].add(ev.sender)
    for receiver, senders in inbound.items():
        if len(senders) > 1:
            found.append(
                Violation("DOWNLOAD_BUSY", f"step {step}: position {receiver} receives from {sorted(senders)}")
            )
    return found


def simulate(cluster: Cluster, block_bits, peer_bw_bps, topology: Topology = Topology.MESH,
             events: list[TransferEvent] | None = None) -> ScheduleReport:
    """Time every transfer with ``size / min(sending rate, receiving rate)``.

    Works for arbitrary (not necessarily optimal) allocations. A broadcast is
    paced by its slowest receiver. ``events`` overrides the generated schedule.
    """
    n = cluster.n
    s = np.asarray(block_bits, dtype=float)
    bw = np.asarray(peer_bw_bps, dtype=float)
    if s.shape != (n,) or bw.shape != (n,):
        raise DimensionMismatchError(f"expected {n} block sizes and bandwidths, got {s.shape} and {bw.shape}")
    u, d = cluster.uploads, cluster.downloads
    if events is None:
        events = schedule_for(topology, n)

    held = {i: set() for i in range(1, n + 1)}
    violations = []
    timed = []

    p1 = [ev for ev in events if ev.phase is Phase.PHASE1]
    durations = {ev: s[ev.block - 1] / min(bw[ev.receiver - 1], d[ev.receiver - 1]) for ev in p1}
    phase1 = max(durations.values(), default=0.0)
    for ev in p1:
        timed.append(replace(ev, start_s=0.0, duration_s=durations[ev]))
        held[ev.receiver].add(ev.block)

    steps = defaultdict(list)
    for ev in events:
        if ev.phase is Phase.PHASE2:
            steps[ev.step].append(ev)

    clock = phase1
    step_durations = []
    for k in sorted(steps):
        step_events = sorted(steps[k], key=lambda e: (e.sender, e.receiver))
        violations.extend(_interface_violations(k, step_events))
        broadcast_d = defaultdict(lambda: np.inf)
        for ev in step_events:
            if ev.mode is Mode.BROADCAST:
                broadcast_d[ev.sender] = min(broadcast_d[ev.sender], d[ev.receiver - 1])
        arrivals = []
        step_time = 0.0
        for ev in step_events:
            if ev.block not in held[ev.sender]:
                violations.append(
                    Violation("BLOCK_NOT_HELD", f"step {k}: position {ev.sender} sends block {ev.block} it lacks")
                )
            recv_rate = broadcast_d[ev.sender] if ev.mode is Mode.BROADCAST else d[ev.receiver - 1]
            dur = s[ev.block - 1] / min(u[ev.sender - 1], recv_rate)
            step_time = max(step_time, dur)
            timed.append(replace(ev, start_s=clock, duration_s=dur))
            arrivals.append((ev.receiver, ev.block))
        # blocks become available only once the whole step has finished
        for receiver, block in arrivals:
            held[receiver].add(block)
        step_durations.append(step_time)
        clock += step_time

    everything = set(range(1, n + 1))
    for pos, blocks in held.items():
        missing = everything - blocks
        if missing:
            violations.append(Violation("MISSING_BLOCK", f"position {pos} lacks blocks {sorted(missing)}"))

    ids = cluster.ids

    def to_id(pos):
        return BASE_STATION if pos == BASE_STATION else ids[pos - 1]

    timed = [replace(ev, sender=to_id(ev.sender), receiver=to_id(ev.receiver)) for ev in timed]
    phase2 = float(sum(step_durations))
    return ScheduleReport(
        events=timed,
        step_durations_s=step_durations,
        phase1_s=float(phase1),
        phase2_s=phase2,
        completion_s=float(phase1) + phase2,
        blocks_held={ids[pos - 1]: frozenset(b) for pos, b in held.items()},
        violations=violations,
        topology=topology,
    )


def assert_two_phase_separation(report: ScheduleReport) -> bool:
    """True iff no Phase-2 transfer starts before every Phase-1 transfer has finished."""
    phase1_end = max((ev.start_s + ev.duration_s for ev in report.events if ev.phase is Phase.PHASE1), default=0.0)
    phase1_end = max(phase1_end, report.phase1_s)
    return all(ev.start_s >= phase1_end for ev in report.events if ev.phase is Phase.PHASE2)
