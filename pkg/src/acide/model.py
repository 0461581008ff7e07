"""Domain types: peers, stream parameters, clusters and topology.

All quantities are SI: bits, seconds, bits per second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


@dataclass(frozen=True)
class Peer:
    id: int
    download_bps: float
    upload_bps: float

    def __post_init__(self):
        if int(self.id) != self.id or self.id < 1:
            raise ValueError(f"peer id must be a positive integer, got {self.id!r}")
        for name in ("download_bps", "upload_bps"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"peer {self.id}: {name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class StreamParams:
    package_bits: float
    delay_bound_s: float

    def __post_init__(self):
        if not (math.isfinite(self.package_bits) and self.package_bits > 0):
            raise ValueError(f"package_bits must be finite and > 0, got {self.package_bits!r}")
        if not (math.isfinite(self.delay_bound_s) and self.delay_bound_s > 0):
            raise ValueError(f"delay_bound_s must be finite and > 0, got {self.delay_bound_s!r}")

    @property
    def ratio_bps(self) -> float:
        """Livestream ratio S/T: what one unicast viewer costs the base station."""
        return self.package_bits / self.delay_bound_s

    @classmethod
    def from_ratio(cls, ratio_bps: float, delay_bound_s: float) -> "StreamParams":
        return cls(ratio_bps * delay_bound_s, delay_bound_s)


@dataclass(frozen=True)
class Cluster:
    peers: tuple
    stream: StreamParams

    def __post_init__(self):
        peers = tuple(self.peers)
        object.__setattr__(self, "peers", peers)
        if not peers:
            raise ValueError("a cluster needs at least one peer")
        ids = [p.id for p in peers]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate peer ids in {ids}")

    @property
    def n(self) -> int:
        return len(self.peers)

    @property
    def ids(self) -> list[int]:
        return [p.id for p in self.peers]

    @property
    def uploads(self) -> np.ndarray:
        return np.array([p.upload_bps for p in self.peers], dtype=float)

    @property
    def downloads(self) -> np.ndarray:
        return np.array([p.download_bps for p in self.peers], dtype=float)

    @property
    def u_avg(self) -> float:
        return float(self.uploads.mean())

    def with_stream(self, stream: StreamParams) -> "Cluster":
        return Cluster(self.peers, stream)

    def with_peers(self, peers) -> "Cluster":
        return Cluster(tuple(peers), self.stream)


class Topology(Enum):
    MESH = "mesh"
    STAR = "star"


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


def validate(cluster: Cluster) -> list[Violation]:
    """Report which capacity assumptions the cluster breaks.

    Codes: ``A1`` (some upload exceeds that peer's download), ``A2`` (largest
    upload exceeds smallest download), ``RATIO`` (livestream ratio above the
    mean upload, where the P2P scheme stops paying off). The aggregate-download
    check depends on the optimized Phase 1 time and is done by the optimizer.
    """
    report = []
    bad = [p.id for p in cluster.peers if p.upload_bps > p.download_bps]
    if bad:
        report.append(Violation("A1", f"upload exceeds download for peers {bad}"))
    max_u = max(p.upload_bps for p in cluster.peers)
    min_d = min(p.download_bps for p in cluster.peers)
    if max_u > min_d:
        report.append(Violation("A2", f"max upload {max_u:g} bps > min download {min_d:g} bps"))
    if cluster.stream.ratio_bps > cluster.u_avg:
        report.append(
            Violation("RATIO", f"S/T = {cluster.stream.ratio_bps:g} bps exceeds u_avg = {cluster.u_avg:g} bps")
        )
    return report
