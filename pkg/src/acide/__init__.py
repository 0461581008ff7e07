"""Cluster-based peer-to-peer livestream distribution: block sizing, admission, churn planning, simulation."""
from .admission import AdmissionResult, admit_max_peers, brute_force_admission, single_removal_comparison
from .dynamic import ChurnEvent, DynamicPlan, PeerListSnapshot, notification_size_bits, plan_package, run_stream
from .errors import (
    AcideError,
    AssumptionError,
    DimensionMismatchError,
    InfeasibleError,
    NoFeasibleClusterError,
    ParseError,
    RangeConflictError,
    SingularSystemError,
    SizeLimitError,
    UnitError,
)
from .model import Cluster, Peer, StreamParams, Topology, Violation, validate
from .optimizer import (
    Allocation,
    alpha_coefficients,
    bandwidth_from_average,
    closed_form_block_sizes,
    minimize_bandwidth,
    per_peer_bandwidth,
    phase_times,
    solve_block_sizes,
    unicast_baseline,
)
from .scenario import ScenarioSpec, SweepResultRow, fixed_average_cluster, generate_cluster, sweep
from .schedule import ScheduleReport, TransferEvent, assert_two_phase_separation, mesh_schedule, simulate, star_schedule

__version__ = "0.1.0"
