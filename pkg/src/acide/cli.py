"""Block sizing, admission and churn planning for cluster livestreaming.

Exit codes: 0 success, 2 parse/unit/input error, 3 infeasible, 4 no feasible cluster.
On failure a one-line JSON error record goes to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, replace

from . import display
from .admission import admit_max_peers
from .config import Config, parse_config
from .dynamic import PeerListSnapshot, run_stream
from .errors import AcideError, AssumptionError, InfeasibleError, NoFeasibleClusterError, ParseError
from .model import Topology
from .optimizer import minimize_bandwidth
from .scenario import sweep
from .schedule import BASE_STATION, simulate

SUBCOMMANDS = ("optimize", "admit", "plan", "simulate", "sweep")

EXIT_OK, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_NO_CLUSTER = 0, 2, 3, 4


@dataclass
class RunConfig:
    subcommand: str
    input_path: str | None = None
    output_path: str | None = None
    seed: int | None = None
    format: str = "csv"
    topology: Topology = Topology.MESH
    paper_display: bool = False

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand {self.subcommand!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")


def _num(x):
    return repr(float(x))


class _Formatter:
    def __init__(self, paper_display, delay_bound_s=None):
        self.floored = paper_display
        self.T = delay_bound_s

    def bps(self, x):
        return display.floor_bps(x) if self.floored else float(x)

    def bits(self, x):
        return display.floor_bits(x) if self.floored else float(x)

    def s(self, x):
        return display.floor_ms(x) / 1000 if self.floored else float(x)

    def phases(self, phase1, phase2, phase0=0.0):
        if not self.floored:
            return float(phase1), float(phase2), float(phase0)
        t0 = display.floor_ms(phase0)
        t2 = display.floor_ms(phase2)
        return (display.floor_ms(self.T) - t0 - t2) / 1000, t2 / 1000, t0 / 1000


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return _num(x)
    return str(x)


def _optimize(cfg: Config, rc: RunConfig):
    cluster = cfg.cluster()
    alloc = minimize_bandwidth(cluster)
    f = _Formatter(rc.paper_display, cluster.stream.delay_bound_s)
    t1, t2, _ = f.phases(alloc.phase1_s, alloc.phase2_s)
    peers = [
        {"peer_id": p.id, "u_bps": float(p.upload_bps), "d_bps": float(p.download_bps),
         "block_bits": f.bits(s), "bw_bps": f.bps(bw)}
        for p, s, bw in zip(cluster.peers, alloc.block_bits, alloc.peer_bw_bps)
    ]
    summary = {"S_bits": f.bits(cluster.stream.package_bits), "bw_bps": f.bps(alloc.total_bw_bps),
               "T1_s": t1, "T2_s": t2, "a3_violated": alloc.a3_violated}
    rows = [["peer_id", "u_bps", "d_bps", "block_bits", "bw_bps"]]
    rows += [list(r.values()) for r in peers]
    rows.append(["total", "", "", summary["S_bits"], summary["bw_bps"]])
    rows.append(["phase", t1, t2])
    return rows, {"peers": peers, "summary": summary}


def _admit(cfg: Config, rc: RunConfig):
    if cfg.reserved_bw_bps is None:
        raise ParseError("admit needs [admission] BW")
    users = cfg.peers
    if not users:
        raise ParseError("missing or empty [peers] section")
    cfg.cluster()
    result = admit_max_peers(users, cfg.stream, cfg.reserved_bw_bps)
    f = _Formatter(rc.paper_display, cfg.stream.delay_bound_s)
    kept = {p.id for p in result.admitted}
    peers = [{"peer_id": p.id, "u_bps": float(p.upload_bps), "d_bps": float(p.download_bps), "admitted": p.id in kept}
             for p in users]
    summary = {"n": result.n, "bw_bps": f.bps(result.allocation.total_bw_bps),
               "BW_bps": float(result.reserved_bw_bps), "iterations": result.iterations}
    rows = [["peer_id", "u_bps", "d_bps", "admitted"]]
    rows += [list(r.values()) for r in peers]
    rows.append(list(summary))
    rows.append(list(summary.values()))
    return rows, {"peers": peers, "summary": summary, "removed": [p.id for p in result.removed]}


def _plan(cfg: Config, rc: RunConfig):
    cluster = cfg.cluster()
    packages = cfg.num_packages or (max((e.at_package for e in cfg.churn), default=1))
    plans = run_stream(PeerListSnapshot(1, cluster.peers), cfg.churn, cluster.stream, packages)
    f = _Formatter(rc.paper_display, cluster.stream.delay_bound_s)
    records = []
    for plan in plans:
        if not plan.feasible:
            records.append({"package": plan.package_index, "n": plan.n, "notif_bits": None, "T0_s": None,
                            "T1_s": None, "T2_s": None, "bw0_bps": None, "bw1_bps": None, "changed": plan.changed})
            continue
        t1, t2, t0 = f.phases(plan.phase1_s, plan.phase2_s, plan.phase0_s)
        records.append({"package": plan.package_index, "n": plan.n, "notif_bits": int(plan.notification_bits),
                        "T0_s": t0, "T1_s": t1, "T2_s": t2, "bw0_bps": f.bps(plan.bw0_bps),
                        "bw1_bps": f.bps(plan.bw1_bps), "changed": plan.changed})
    rows = [["package", "n", "notif_bits", "T0_s", "T1_s", "T2_s", "bw0_bps", "bw1_bps", "changed"]]
    rows += [list(r.values()) for r in records]
    failed = next((p for p in plans if not p.feasible), None)
    if failed is not None:
        return rows, {"packages": records, "error": failed.error}, InfeasibleError(failed.error)
    return rows, {"packages": records}


def _simulate(cfg: Config, rc: RunConfig):
    cluster = cfg.cluster()
    alloc = minimize_bandwidth(cluster)
    report = simulate(cluster, alloc.block_bits, alloc.peer_bw_bps, rc.topology)
    f = _Formatter(rc.paper_display, cluster.stream.delay_bound_s)
    events = [
        {"phase": ev.phase.value, "step": ev.step, "sender": "BS" if ev.sender == BASE_STATION else ev.sender,
         "receiver": ev.receiver, "block": ev.block, "mode": ev.mode.value, "duration_s": f.s(ev.duration_s)}
        for ev in report.events
    ]
    summary = {"topology": rc.topology.value, "completion_s": f.s(report.completion_s),
               "T1_s": f.s(report.phase1_s), "T2_s": f.s(report.phase2_s), "violations": len(report.violations)}
    rows = [["phase", "step", "sender", "receiver", "block", "mode", "duration_s"]]
    rows += [list(e.values()) for e in events]
    rows.append(list(summary))
    rows.append(list(summary.values()))
    rows += [["violation", v.code, v.message] for v in report.violations]
    return rows, {"events": events, "summary": summary,
                  "violations": [{"code": v.code, "message": v.message} for v in report.violations]}


def _sweep(cfg: Config, rc: RunConfig):
    if not cfg.sweep_specs or not cfg.ratios_bps:
        raise ParseError("sweep needs [sweep] ratios and a table or grid lines")
    specs = cfg.sweep_specs
    if rc.seed is not None:
        specs = [replace(s, seed=rc.seed) for s in specs]
    results = sweep(specs, cfg.ratios_bps)
    f = _Formatter(rc.paper_display, cfg.stream.delay_bound_s)
    records = []
    for r in results:
        if r.feasible:
            t1, t2, _ = f.phases(r.phase1_s, r.phase2_s)
            bw = f.bps(r.total_bw_bps)
        else:
            t1, t2, bw = None, f.s(r.phase2_s), None
        records.append({"n": r.n, "ratio_bps": float(r.ratio_bps), "u_avg_bps": float(r.u_avg_bps),
                        "bw_bps": bw, "T1_s": t1, "T2_s": t2, "feasible": r.feasible})
    rows = [["n", "ratio_bps", "u_avg_bps", "bw_bps", "T1_s", "T2_s", "feasible"]]
    rows += [list(r.values()) for r in records]
    return rows, {"rows": records}


_HANDLERS = {"optimize": _optimize, "admit": _admit, "plan": _plan, "simulate": _simulate, "sweep": _sweep}


def _render(rows, payload, fmt):
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _exit_code(exc):
    if isinstance(exc, NoFeasibleClusterError):
        return EXIT_NO_CLUSTER
    if isinstance(exc, InfeasibleError):
        return EXIT_INFEASIBLE
    return EXIT_PARSE


def _report_error(exc, stderr):
    stderr.write(json.dumps({"error": getattr(exc, "code", "ERROR"), "message": str(exc)}) + "\n")


def run(rc: RunConfig, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        if rc.input_path:
            with open(rc.input_path, encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = stdin.read()
        cfg = parse_config(text)
        outcome = _HANDLERS[rc.subcommand](cfg, rc)
    except (AcideError, AssumptionError, ValueError, KeyError) as exc:
        _report_error(exc, stderr)
        return _exit_code(exc)
    except OSError as exc:
        _report_error(exc, stderr)
        return EXIT_PARSE

    rows, payload, *failure = outcome
    text_out = _render(rows, payload, rc.format)
    if rc.output_path:
        with open(rc.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text_out)
    else:
        stdout.write(text_out)
    if failure:
        _report_error(failure[0], stderr)
        return _exit_code(failure[0])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH", help="config file (default: stdin)")
    common.add_argument("--output", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="override every scenario seed")
    common.add_argument("--topology", choices=[t.value for t in Topology], default="mesh")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--paper-display", action="store_true",
                        help="floor bandwidths to whole bps, times to whole ms, sizes to whole bits")
    parser = argparse.ArgumentParser(prog="acide", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    rc = RunConfig(
        subcommand=args.subcommand,
        input_path=args.input,
        output_path=args.output,
        seed=args.seed,
        format=args.format,
        topology=Topology(args.topology),
        paper_display=args.paper_display,
    )
    return run(rc)


if __name__ == "__main__":
    sys.exit(main())
