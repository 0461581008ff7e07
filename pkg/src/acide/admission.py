"""Largest cluster that fits a reserved base-station bandwidth."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import AssumptionError, InfeasibleError, NoFeasibleClusterError, SizeLimitError
from .model import Cluster, Peer, StreamParams, validate
from .optimizer import Allocation, minimize_bandwidth

BRUTE_FORCE_MAX_USERS = 20


@dataclass
class AdmissionResult:
    admitted: list
    allocation: Allocation
    reserved_bw_bps: float
    removed: list
    iterations: int
    # total bandwidth seen at each evaluation, inf where the cluster was infeasible
    totals_bps: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.admitted)


def _evaluate(peers, stream):
    try:
        alloc = minimize_bandwidth(Cluster(tuple(peers), stream))
    except InfeasibleError:
        return None, math.inf
    return alloc, alloc.total_bw_bps


def _check_users(users, stream):
    if not users:
        raise ValueError("no users to admit")
    broken = [v for v in validate(Cluster(tuple(users), stream)) if v.code in ("A1", "A2")]
    if broken:
        raise AssumptionError(broken)


def _weakest(peers):
    # lowest upload; among ties the highest id goes first
    return min(peers, key=lambda p: (p.upload_bps, -p.id))


def admit_max_peers(users: list[Peer], stream: StreamParams, reserved_bw_bps: float) -> AdmissionResult:
    """Greedy admission: drop the lowest-upload user until the optimum fits ``reserved_bw_bps``.

    Removing a peer can only lower the largest upload and raise the smallest
    download, so the capacity assumptions hold for every intermediate list.
    """
    _check_users(users, stream)
    current = list(users)
    removed = []
    alloc, total = _evaluate(current, stream)
    totals = [total]
    while total > reserved_bw_bps:
        if len(current) == 1:
            raise NoFeasibleClusterError(
                f"a single peer needs {total:.6g} bps, reserved bandwidth is {reserved_bw_bps:.6g} bps"
            )
        drop = _weakest(current)
        current.remove(drop)
        removed.append(drop)
        alloc, total = _evaluate(current, stream)
        totals.append(total)
    return AdmissionResult(current, alloc, reserved_bw_bps, removed, len(totals), totals)


def brute_force_admission(users: list[Peer], stream: StreamParams, reserved_bw_bps: float) -> AdmissionResult:
    """Exhaustive search over subsets, largest first. Exponential; for validation only."""
    if len(users) > BRUTE_FORCE_MAX_USERS:
        raise SizeLimitError(f"brute force is limited to {BRUTE_FORCE_MAX_USERS} users, got {len(users)}")
    _check_users(users, stream)
    evaluations = 0
    for size in range(len(users), 0, -1):
        best = None
        for subset in itertools.combinations(users, size):
            evaluations += 1
            alloc, total = _evaluate(subset, stream)
            if total > reserved_bw_bps:
                continue
            key = (total, sorted(p.id for p in subset))
            if best is None or key < best[0]:
                best = (key, subset, alloc)
        if best is not None:
            _, subset, alloc = best
            kept = {p.id for p in subset}
            return AdmissionResult(
                admitted=list(subset),
                allocation=alloc,
                reserved_bw_bps=reserved_bw_bps,
                removed=[p for p in users if p.id not in kept],
                iterations=evaluations,
                totals_bps=[alloc.total_bw_bps],
            )
    raise NoFeasibleClusterError(f"no subset fits within {reserved_bw_bps:.6g} bps")


def single_removal_comparison(users: list[Peer], stream: StreamParams) -> list[tuple[int, float]]:
    """Optimal total bandwidth after removing each user in turn: ``[(removed_id, total_bps), ...]``."""
    if len(users) < 2:
        raise ValueError("need at least two users")
    _check_users(users, stream)
    table = []
    for peer in users:
        rest = [p for p in users if p is not peer]
        table.append((peer.id, _evaluate(rest, stream)[1]))
    return table
