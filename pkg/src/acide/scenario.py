"""Random cluster generation and parameter sweeps over cluster size and livestream ratio."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, RangeConflictError
from .model import Cluster, Peer, StreamParams
from .optimizer import minimize_bandwidth

KBPS = 1e3

# (n, upload range, reference mean upload, download range), all bps
REFERENCE_GRID = [
    (5, (10 * KBPS, 20 * KBPS), 17.8 * KBPS, (20 * KBPS, 80 * KBPS)),
    (10, (10 * KBPS, 30 * KBPS), 22.4 * KBPS, (30 * KBPS, 160 * KBPS)),
    (15, (10 * KBPS, 40 * KBPS), 27.3 * KBPS, (40 * KBPS, 240 * KBPS)),
    (20, (10 * KBPS, 50 * KBPS), 31.8 * KBPS, (50 * KBPS, 320 * KBPS)),
    (40, (10 * KBPS, 60 * KBPS), 44.4 * KBPS, (60 * KBPS, 640 * KBPS)),
    (60, (10 * KBPS, 70 * KBPS), 51.7 * KBPS, (70 * KBPS, 960 * KBPS)),
    (80, (10 * KBPS, 80 * KBPS), 57.9 * KBPS, (80 * KBPS, 1280 * KBPS)),
    (100, (10 * KBPS, 90 * KBPS), 63.5 * KBPS, (90 * KBPS, 1600 * KBPS)),
    (120, (10 * KBPS, 100 * KBPS), 68.9 * KBPS, (100 * KBPS, 1920 * KBPS)),
]

REFERENCE_RATIOS_BPS = [10 * KBPS, 12 * KBPS, 14 * KBPS, 16 * KBPS]


@dataclass(frozen=True)
class ScenarioSpec:
    n: int
    upload_range_bps: tuple
    download_range_bps: tuple
    stream: StreamParams
    seed: int = 0
    # when set, the sweep uses identical uploads at this mean instead of random draws
    u_avg_bps: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        for name in ("upload_range_bps", "download_range_bps"):
            lo, hi = getattr(self, name)
            if not (0 < lo <= hi):
                raise ValueError(f"{name} must satisfy 0 < lo <= hi, got {(lo, hi)}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SweepResultRow:
    n: int
    ratio_bps: float
    u_avg_bps: float
    total_bw_bps: float | None
    phase1_s: float | None
    phase2_s: float
    feasible: bool


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 (numpy's default bit generator) seeded directly with ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def generate_cluster(spec: ScenarioSpec) -> Cluster:
    """Uniform uploads (sorted ascending) and downloads, downloads lifted to at least the top upload."""
    u_lo, u_hi = spec.upload_range_bps
    d_lo, d_hi = spec.download_range_bps
    if d_hi < u_hi:
        raise RangeConflictError(f"download range top {d_hi:g} is below upload range top {u_hi:g}")
    rng = make_rng(spec.seed)
    uploads = np.sort(rng.uniform(u_lo, u_hi, size=spec.n))
    downloads = np.maximum(rng.uniform(d_lo, d_hi, size=spec.n), uploads[-1])
    peers = [Peer(i + 1, float(d), float(u)) for i, (u, d) in enumerate(zip(uploads, downloads))]
    return Cluster(tuple(peers), spec.stream)


def fixed_average_cluster(n: int, u_avg_bps: float, stream: StreamParams) -> Cluster:
    # optimum depends only on n and the mean upload, so equal uploads reproduce any reference point
    download = max(u_avg_bps, n * stream.ratio_bps)
    return Cluster(tuple(Peer(i + 1, download, u_avg_bps) for i in range(n)), stream)


def reference_grid_specs(stream: StreamParams, seed: int = 0, use_reference_average: bool = True) -> list[ScenarioSpec]:
    return [
        ScenarioSpec(n, u_rng, d_rng, stream, seed, u_avg if use_reference_average else None)
        for n, u_rng, u_avg, d_rng in REFERENCE_GRID
    ]


def sweep(specs, ratios_bps) -> list[SweepResultRow]:
    """One row per (spec, ratio), spec-major. ``S`` is set to ``ratio * T`` for each point."""
    rows = []
    for spec in specs:
        T = spec.stream.delay_bound_s
        for ratio in ratios_bps:
            stream = StreamParams.from_ratio(ratio, T)
            if spec.u_avg_bps is not None:
                cluster = fixed_average_cluster(spec.n, spec.u_avg_bps, stream)
            else:
                cluster = generate_cluster(spec).with_stream(stream)
            u = cluster.uploads
            phase2 = (cluster.n - 1) * stream.package_bits / u.sum()
            try:
                alloc = minimize_bandwidth(cluster)
            except InfeasibleError:
                rows.append(SweepResultRow(cluster.n, ratio, cluster.u_avg, None, None, phase2, False))
                continue
            rows.append(
                SweepResultRow(cluster.n, ratio, cluster.u_avg, alloc.total_bw_bps, alloc.phase1_s, alloc.phase2_s, True)
            )
    return rows
