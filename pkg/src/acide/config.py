"""Line-oriented run configuration.

Format::

    # comment
    [stream]
    S = 2000bits          # or: ratio = 10kbps
    T = 200ms

    [peers]
    1 = u=15kbps, d=20kbps

    [admission]
    BW = 17kbps

    [churn]
    packages = 3
    join = at=2, id=6, u=51.7kbps, d=1000kbps, count=55
    leave = at=3, id=2
    update = at=3, id=1, u=18kbps, d=40kbps

    [sweep]
    ratios = 10kbps, 12kbps
    seed = 7
    preset = reference    # built-in nine-size grid; fixed_average = yes|no picks mean-upload mode
    grid = n=60, u_lo=10kbps, u_hi=70kbps, d_lo=70kbps, d_hi=960kbps, u_avg=51.7kbps, seed=3

Every physical quantity must carry a unit suffix; values are normalized to
bits, seconds and bits per second.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .dynamic import ChurnEvent
from .errors import ParseError, UnitError
from .model import Cluster, Peer, StreamParams
from .scenario import ScenarioSpec, reference_grid_specs

UNITS = {
    "rate": {"bps": 1.0, "kbps": 1e3, "Kbps": 1e3, "Mbps": 1e6, "Gbps": 1e9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6},
    "size": {"bit": 1.0, "bits": 1.0, "kbit": 1e3, "kbits": 1e3, "Mbit": 1e6, "Mbits": 1e6},
}

SECTIONS = ("stream", "peers", "admission", "churn", "sweep")

_QUANTITY = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]*)$")


@dataclass
class Config:
    stream: StreamParams | None = None
    peers: list = field(default_factory=list)
    reserved_bw_bps: float | None = None
    churn: list = field(default_factory=list)
    num_packages: int | None = None
    sweep_specs: list = field(default_factory=list)
    ratios_bps: list = field(default_factory=list)
    seed: int | None = None
    sections: set = field(default_factory=set, compare=False)

    def cluster(self) -> Cluster:
        if self.stream is None:
            raise ParseError("missing [stream] section")
        if not self.peers:
            raise ParseError("missing or empty [peers] section")
        return Cluster(tuple(self.peers), self.stream)


def parse_quantity(text: str, kind: str, line=None, field_name=None) -> float:
    m = _QUANTITY.match(text.strip())
    if not m:
        raise ParseError(f"cannot read {text!r} as a number with unit", line, field_name)
    number, unit = m.groups()
    if not unit:
        raise UnitError(f"{text!r} needs a {kind} unit ({', '.join(UNITS[kind])})", line, field_name)
    if unit not in UNITS[kind]:
        raise UnitError(f"unknown {kind} unit {unit!r} in {text!r}", line, field_name)
    return float(number) * UNITS[kind][unit]


def _parse_int(text, line, field_name):
    try:
        return int(text.strip())
    except ValueError:
        raise ParseError(f"expected an integer, got {text!r}", line, field_name) from None


def _fields(value, line, allowed):
    """Split ``a=1, b=2`` into a dict, rejecting unknown or repeated names."""
    out = {}
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ParseError(f"expected name=value, got {part!r}", line)
        name, val = (x.strip() for x in part.split("=", 1))
        if name not in allowed:
            raise ParseError(f"unknown field (allowed: {', '.join(allowed)})", line, name)
        if name in out:
            raise ParseError("repeated field", line, name)
        out[name] = val
    return out


def _require(fields, names, line):
    for name in names:
        if name not in fields:
            raise ParseError("required field missing", line, name)


def _iter_lines(text):
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not body.endswith("]"):
                raise ParseError(f"malformed section header {body!r}", lineno)
            section = body[1:-1].strip()
            if section not in SECTIONS:
                raise ParseError(f"unknown section [{section}]", lineno)
            yield lineno, section, None, None
            continue
        if "=" not in body:
            raise ParseError(f"expected key = value, got {body!r}", lineno)
        if section is None:
            raise ParseError("key outside any section", lineno)
        key, value = (x.strip() for x in body.split("=", 1))
        yield lineno, section, key, value


def parse_config(text: str) -> Config:
    cfg = Config()
    stream_vals = {}
    churn = {}
    preset_line = None
    fixed_average = True
    grids = []
    seen_sections = set()
    stream_line = None

    for lineno, section, key, value in _iter_lines(text):
        if key is None:
            if section in seen_sections:
                raise ParseError(f"section [{section}] appears twice", lineno)
            seen_sections.add(section)
            if section == "stream":
                stream_line = lineno
            continue
        try:
            if section == "stream":
                kinds = {"S": "size", "T": "time", "ratio": "rate"}
                if key not in kinds:
                    raise ParseError("unknown key in [stream] (S, T, ratio)", lineno, key)
                if key in stream_vals:
                    raise ParseError("repeated key", lineno, key)
                stream_vals[key] = parse_quantity(value, kinds[key], lineno, key)
            elif section == "peers":
                pid = _parse_int(key, lineno, "peer id")
                f = _fields(value, lineno, ("u", "d"))
                _require(f, ("u", "d"), lineno)
                cfg.peers.append(Peer(pid, parse_quantity(f["d"], "rate", lineno, "d"),
                                      parse_quantity(f["u"], "rate", lineno, "u")))
            elif section == "admission":
                if key != "BW":
                    raise ParseError("unknown key in [admission] (BW)", lineno, key)
                cfg.reserved_bw_bps = parse_quantity(value, "rate", lineno, key)
            elif section == "churn":
                _parse_churn_line(lineno, key, value, cfg, churn)
            elif section == "sweep":
                if key == "ratios":
                    cfg.ratios_bps = [parse_quantity(v, "rate", lineno, key) for v in value.split(",") if v.strip()]
                elif key == "seed":
                    cfg.seed = _parse_int(value, lineno, key)
                elif key == "preset":
                    if value.lower() != "reference":
                        raise ParseError(f"unknown preset {value!r}", lineno, key)
                    preset_line = lineno
                elif key == "fixed_average":
                    if value.lower() not in ("yes", "no", "true", "false"):
                        raise ParseError("expected yes or no", lineno, key)
                    fixed_average = value.lower() in ("yes", "true")
                elif key == "grid":
                    grids.append((lineno, _fields(value, lineno, ("n", "u_lo", "u_hi", "d_lo", "d_hi", "u_avg", "seed"))))
                else:
                    raise ParseError("unknown key in [sweep]", lineno, key)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), lineno, key) from None

    cfg.sections = seen_sections
    if "peers" in seen_sections and not cfg.peers:
        raise ParseError("[peers] section is empty")
    if len({p.id for p in cfg.peers}) != len(cfg.peers):
        raise ParseError("duplicate peer ids in [peers]")

    if stream_vals:
        if "T" not in stream_vals:
            raise ParseError("[stream] needs T", stream_line, "T")
        if ("S" in stream_vals) == ("ratio" in stream_vals):
            raise ParseError("[stream] needs exactly one of S or ratio", stream_line)
        T = stream_vals["T"]
        S = stream_vals["S"] if "S" in stream_vals else stream_vals["ratio"] * T
        try:
            cfg.stream = StreamParams(S, T)
        except ValueError as exc:
            raise ParseError(str(exc), stream_line) from None

    cfg.churn = [churn[k] for k in sorted(churn)]

    if preset_line is not None or grids:
        if cfg.stream is None:
            raise ParseError("[sweep] needs a [stream] section for T")
        seed = cfg.seed if cfg.seed is not None else 0
        if preset_line is not None:
            cfg.sweep_specs.extend(reference_grid_specs(cfg.stream, seed, fixed_average))
        for lineno, f in grids:
            cfg.sweep_specs.append(_grid_spec(lineno, f, cfg.stream, seed))
    return cfg


def _parse_churn_line(lineno, key, value, cfg, churn):
    if key == "packages":
        cfg.num_packages = _parse_int(value, lineno, key)
        if cfg.num_packages < 1:
            raise ParseError("packages must be >= 1", lineno, key)
        return
    allowed = {"join": ("at", "id", "u", "d", "count"), "leave": ("at", "id"), "update": ("at", "id", "u", "d")}
    if key not in allowed:
        raise ParseError("unknown key in [churn] (packages, join, leave, update)", lineno, key)
    f = _fields(value, lineno, allowed[key])
    _require(f, [x for x in allowed[key] if x != "count"], lineno)
    at = _parse_int(f["at"], lineno, "at")
    pid = _parse_int(f["id"], lineno, "id")
    event = churn.get(at, ChurnEvent(at))
    if key == "join":
        count = _parse_int(f.get("count", "1"), lineno, "count")
        u = parse_quantity(f["u"], "rate", lineno, "u")
        d = parse_quantity(f["d"], "rate", lineno, "d")
        event = replace(event, joins=event.joins + tuple(Peer(pid + i, d, u) for i in range(count)))
    elif key == "leave":
        event = replace(event, leaves=event.leaves + (pid,))
    else:
        u = parse_quantity(f["u"], "rate", lineno, "u")
        d = parse_quantity(f["d"], "rate", lineno, "d")
        event = replace(event, capacity_updates=event.capacity_updates + ((pid, d, u),))
    churn[at] = event


def _grid_spec(lineno, f, stream, default_seed):
    _require(f, ("n", "u_lo", "u_hi", "d_lo", "d_hi"), lineno)
    rate = {k: parse_quantity(f[k], "rate", lineno, k) for k in ("u_lo", "u_hi", "d_lo", "d_hi")}
    u_avg = parse_quantity(f["u_avg"], "rate", lineno, "u_avg") if "u_avg" in f else None
    seed = _parse_int(f["seed"], lineno, "seed") if "seed" in f else default_seed
    try:
        return ScenarioSpec(
            _parse_int(f["n"], lineno, "n"),
            (rate["u_lo"], rate["u_hi"]),
            (rate["d_lo"], rate["d_hi"]),
            stream,
            seed,
            u_avg,
        )
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None


def _q(x, unit):
    return f"{float(x)!r}{unit}"


def emit_config(cfg: Config) -> str:
    """Serialize ``cfg`` so that ``parse_config`` rebuilds equal domain objects."""
    out = []
    if cfg.stream is not None:
        out += ["[stream]", f"S = {_q(cfg.stream.package_bits, 'bits')}", f"T = {_q(cfg.stream.delay_bound_s, 's')}", ""]
    if cfg.peers:
        out.append("[peers]")
        out += [f"{p.id} = u={_q(p.upload_bps, 'bps')}, d={_q(p.download_bps, 'bps')}" for p in cfg.peers]
        out.append("")
    if cfg.reserved_bw_bps is not None:
        out += ["[admission]", f"BW = {_q(cfg.reserved_bw_bps, 'bps')}", ""]
    if cfg.churn or cfg.num_packages is not None:
        out.append("[churn]")
        if cfg.num_packages is not None:
            out.append(f"packages = {cfg.num_packages}")
        for ev in cfg.churn:
            for p in ev.joins:
                out.append(f"join = at={ev.at_package}, id={p.id}, u={_q(p.upload_bps, 'bps')}, d={_q(p.download_bps, 'bps')}")
            for pid in ev.leaves:
                out.append(f"leave = at={ev.at_package}, id={pid}")
            for pid, d, u in ev.capacity_updates:
                out.append(f"update = at={ev.at_package}, id={pid}, u={_q(u, 'bps')}, d={_q(d, 'bps')}")
        out.append("")
    if cfg.sweep_specs or cfg.ratios_bps or cfg.seed is not None:
        out.append("[sweep]")
        if cfg.ratios_bps:
            out.append("ratios = " + ", ".join(_q(r, "bps") for r in cfg.ratios_bps))
        if cfg.seed is not None:
            out.append(f"seed = {cfg.seed}")
        for spec in cfg.sweep_specs:
            line = (f"grid = n={spec.n}, u_lo={_q(spec.upload_range_bps[0], 'bps')}, "
                    f"u_hi={_q(spec.upload_range_bps[1], 'bps')}, d_lo={_q(spec.download_range_bps[0], 'bps')}, "
                    f"d_hi={_q(spec.download_range_bps[1], 'bps')}")
            if spec.u_avg_bps is not None:
                line += f", u_avg={_q(spec.u_avg_bps, 'bps')}"
            out.append(line + f", seed={spec.seed}")
        out.append("")
    return "\n".join(out)
