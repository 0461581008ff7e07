"""Minimum base-station bandwidth for a fixed cluster.

The optimum splits a package so every peer's block takes the same time to
upload (block size proportional to upload capacity), then gives each peer
exactly the Phase-1 bandwidth needed to land its block at the same instant.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AssumptionError, InfeasibleError, SingularSystemError
from .model import Cluster, StreamParams, validate

# Phase 1 shorter than this is reported as infeasible instead of returning
# astronomically large bandwidths.
MIN_PHASE1_S = 1e-12


@dataclass
class Allocation:
    block_bits: np.ndarray
    peer_bw_bps: np.ndarray
    phase1_s: float
    phase2_s: float
    total_bw_bps: float
    a3_violated: bool = False

    @property
    def n(self) -> int:
        return len(self.block_bits)


def alpha_coefficients(cluster: Cluster) -> np.ndarray:
    """Diagonal of the triangular block-size system.

    Entry k (0-based) is ``sum(u[:k+1]) / u[k]``; the first entry is 1 since
    row one of the system is the plain conservation row ``sum(s) = S``.
    """
    u = cluster.uploads
    alpha = np.cumsum(u) / u
    alpha[0] = 1.0
    return alpha


def block_size_system(cluster: Cluster) -> tuple[np.ndarray, np.ndarray]:
    """Upper-triangular matrix and right-hand side whose solution is the optimal split."""
    n = cluster.n
    matrix = np.triu(np.ones((n, n)))
    np.fill_diagonal(matrix, alpha_coefficients(cluster))
    rhs = np.full(n, float(cluster.stream.package_bits))
    return matrix, rhs


def back_substitute(upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``upper @ x = rhs`` for an upper-triangular matrix, bottom row first."""
    n = len(rhs)
    diag = np.diag(upper)
    if np.any(diag == 0):
        raise SingularSystemError(f"zero pivot at row {int(np.flatnonzero(diag == 0)[0]) + 1}")
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (rhs[k] - upper[k, k + 1:] @ x[k + 1:]) / upper[k, k]
    return x


def _require_capacity_assumptions(cluster: Cluster) -> None:
    broken = [v for v in validate(cluster) if v.code in ("A1", "A2")]
    if broken:
        raise AssumptionError(broken)


def solve_block_sizes(cluster: Cluster) -> np.ndarray:
    _require_capacity_assumptions(cluster)
    return back_substitute(*block_size_system(cluster))


def closed_form_block_sizes(cluster: Cluster) -> np.ndarray:
    u = cluster.uploads
    return cluster.stream.package_bits * u / u.sum()


def phase_times(cluster: Cluster, block_bits) -> tuple[float, float]:
    """Return ``(T1, T2)``.

    Each Phase-2 step lasts as long as the slowest upload in it, so
    ``T2 = (n - 1) * max(s_i / u_i)``; for an optimal split all ratios agree.
    """
    s = np.asarray(block_bits, dtype=float)
    T = cluster.stream.delay_bound_s
    phase2 = (cluster.n - 1) * float(np.max(s / cluster.uploads))
    phase1 = T - phase2
    if phase1 <= MIN_PHASE1_S:
        raise InfeasibleError(
            f"Phase 2 alone takes {phase2:.6g} s of the {T:.6g} s delay bound (n={cluster.n})"
        )
    return phase1, phase2


def per_peer_bandwidth(block_bits, phase1_s: float) -> np.ndarray:
    return np.asarray(block_bits, dtype=float) / phase1_s


def minimize_bandwidth(cluster: Cluster) -> Allocation:
    s = solve_block_sizes(cluster)
    phase1, phase2 = phase_times(cluster, s)
    bw = per_peer_bandwidth(s, phase1)
    total = float(bw.sum())
    return Allocation(
        block_bits=s,
        peer_bw_bps=bw,
        phase1_s=phase1,
        phase2_s=phase2,
        total_bw_bps=total,
        a3_violated=bool(cluster.downloads.sum() < cluster.stream.package_bits / phase1),
    )


def bandwidth_from_average(n: int, u_avg_bps: float, stream: StreamParams) -> float:
    """Minimum allocated bandwidth in terms of cluster size and mean upload only."""
    S, T = stream.package_bits, stream.delay_bound_s
    phase1 = T - (n - 1) / n * S / u_avg_bps
    if phase1 <= MIN_PHASE1_S:
        raise InfeasibleError(f"n={n}, u_avg={u_avg_bps:g} bps leaves no Phase 1 time")
    return S / phase1


def unicast_baseline(n: int, stream: StreamParams) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * stream.ratio_bps
