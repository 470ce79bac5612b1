"""Command line front end.

Subcommands:
  run    simulate one scenario and write the report files
  sweep  repeat a run across a parameter list and aggregate the summaries
  plan   print the initial cluster plan without simulating
  codec  dump a hex-encoded packet as JSON

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime
failure. Output defaults to $ESRP_OUT, then ./esrp-out.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import statistics
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import __version__
from .clustering import form_clusters
from .codec import decode_ch_frame, decode_cm_report, decode_signal
from .energy import LEDGER_CATEGORIES
from .engine import RunConfig, RunResult, Simulation
from .errors import ConfigError, EsrpError, MalformedPacketError
from .scenario import config_manifest, load_scenario
from .topology import SINK_ID

SWEEP_PARAMS = {
    "seed": int,
    "attack_count": int,
    "iterations": int,
    "k_clusters": int,
    "reformation_period": int,
    "security_enabled": lambda s: {"on": True, "off": False, "true": True, "false": False}[s.lower()],
}


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default of 2 is reserved for
    # configuration errors here
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="esrp", description="Clustered secure-routing WSN simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser) -> None:
        p.add_argument("scenario", nargs="?", default=None, help="scenario .toml/.json (defaults apply when omitted)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--iterations", type=int, default=None)
        p.add_argument("--horizon", type=float, default=None, metavar="SECONDS")
        p.add_argument("--attackers", type=int, default=None, metavar="N")
        p.add_argument("--security", choices=["on", "off"], default=None)

    run_p = sub.add_parser("run", help="simulate one scenario")
    add_common(run_p)
    run_p.add_argument("--out", default=None, help="output directory (else $ESRP_OUT, else ./esrp-out)")
    run_p.add_argument("--trace", action="store_true", help="also write trace.jsonl")
    run_p.add_argument("--quiet", action="store_true")

    sweep_p = sub.add_parser("sweep", help="run a scenario across a parameter list")
    add_common(sweep_p)
    sweep_p.add_argument("--param", required=True, choices=sorted(SWEEP_PARAMS))
    sweep_p.add_argument("--values", required=True, help="comma separated values")
    sweep_p.add_argument("--out", default=None)
    sweep_p.add_argument("--quiet", action="store_true")

    plan_p = sub.add_parser("plan", help="print the initial cluster plan as JSON")
    add_common(plan_p)

    codec_p = sub.add_parser("codec", help="packet codec utilities")
    codec_sub = codec_p.add_subparsers(dest="codec_command", required=True)
    dump_p = codec_sub.add_parser("dump", help="decode a hex packet")
    dump_p.add_argument("--type", required=True, choices=["signal", "frame", "report"], dest="packet_type")
    dump_p.add_argument("hex", help="packet bytes as a hex string")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    out: dict = {}
    if args.seed is not None:
        out["seed"] = args.seed
    if args.iterations is not None:
        out["iterations"] = args.iterations
    if args.horizon is not None:
        out["horizon_s"] = args.horizon
    if args.attackers is not None:
        out["attack_count"] = args.attackers
        out["attack_nodes"] = None
    if args.security is not None:
        out["security_enabled"] = args.security == "on"
    return out


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    overrides = _overrides(args)
    if args.scenario is not None:
        return load_scenario(args.scenario, overrides)
    cfg = RunConfig()
    return replace(cfg, **overrides) if overrides else cfg


def _out_dir(flag: str | None) -> Path:
    if flag:
        return Path(flag)
    env = os.environ.get("ESRP_OUT")
    if env:
        return Path(env)
    return Path("esrp-out")


def _ledger_csv(result: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["node_id", "initial_j", "residual_j", "spent_j", *LEDGER_CATEGORIES])
    for nid in sorted(result.ledger.node_ids()):
        breakdown = result.ledger.node_breakdown_j(nid)
        w.writerow([
            nid,
            repr(result.records[nid].initial_energy_j),
            repr(result.ledger.residual_j(nid)),
            repr(result.ledger.spent_j(nid)),
            *[repr(breakdown[c]) for c in LEDGER_CATEGORIES],
        ])
    return buf.getvalue()


def _write_outputs(result: RunResult, out: Path, args: argparse.Namespace, write_trace: bool) -> list[str]:
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "metrics.csv": result.metrics.csv_text(),
        "summary.json": result.metrics.summary_json() + "\n",
        "ledger.csv": _ledger_csv(result),
        "security_log.jsonl": "".join(
            json.dumps(entry, sort_keys=True) + "\n" for entry in result.security_log
        ),
    }
    manifest = config_manifest(result.config, args.scenario)
    manifest["version"] = __version__
    manifest["attackers"] = {
        str(nid): p.kind.value for nid, p in sorted(result.attack_map.items())
    }
    manifest["blocked"] = {str(nid): t for nid, t in sorted(result.blocked_at.items())}
    manifest["outputs"] = sorted(files) + (["trace.jsonl"] if write_trace else [])
    files["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    if write_trace:
        rows = []
        for ev in result.trace:
            row = {"t": ev.time, "seq": ev.seq, "kind": ev.kind.value, "src": ev.src, "dst": ev.dst}
            row.update(ev.info)
            rows.append(json.dumps(row, sort_keys=True, default=str) + "\n")
        files["trace.jsonl"] = "".join(rows)
    for name, text in sorted(files.items()):
        (out / name).write_text(text, encoding="utf-8")
    return sorted(files)


def _print_summary(result: RunResult) -> None:
    s = result.metrics.summary()
    print(f"iterations run     : {s['iterations_run']}")
    print(f"terminated early   : {s['terminated_early']}"
          + (f" (iteration {s['terminated_at_iteration']})" if s["terminated_early"] else ""))
    print(f"alive              : {s['alive_start']} -> {s['alive_end']}")
    print(f"clusters           : {s['clusters_start']} -> {s['clusters_end']}")
    print(f"delivered          : {s['delivered_frames']} frames, {s['delivered_reports']} reports")
    print(f"energy spent       : {s['energy_spent_j']:.6f} J ({s['energy_pct']:.2f}% of budget)")
    print(f"total delay        : {s['delay_ms']:.3f} ms ({s['delay_pct']:.4f}%)")
    print(f"overhead           : {s['overhead_packets']} packets, {s['overhead_bytes']} bytes "
          f"({s['overhead_pct']:.2f}% of budget)")


def _cmd_run(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    result = Simulation(config).run()
    out = _out_dir(args.out)
    written = _write_outputs(result, out, args, args.trace)
    if not args.quiet:
        _print_summary(result)
        print(f"wrote {', '.join(written)} to {out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    parse = SWEEP_PARAMS[args.param]
    try:
        values = [parse(v.strip()) for v in args.values.split(",") if v.strip() != ""]
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad --values for {args.param}: {exc}") from exc
    if not values:
        raise ConfigError("--values is empty")

    out = _out_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summaries = []
    for value in values:
        run_args = argparse.Namespace(**vars(args))
        base = _resolve_config(args)
        config = replace(base, **{args.param: value})
        result = Simulation(config).run()
        label = str(value).lower()
        sub = out / f"{args.param}={label}"
        _write_outputs(result, sub, run_args, write_trace=False)
        summary = result.metrics.summary()
        summary[args.param] = value
        summaries.append(summary)
        if not args.quiet:
            print(f"{args.param}={value}: alive {summary['alive_start']}->{summary['alive_end']}, "
                  f"energy {summary['energy_spent_j']:.4f} J, "
                  f"overhead {summary['overhead_bytes']} B")

    numeric = [
        k for k, v in summaries[0].items()
        if isinstance(v, (int, float)) and not isinstance(v, bool) and k != args.param
    ]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([args.param, *numeric])
    for s in summaries:
        w.writerow([s[args.param], *[repr(float(s[k])) for k in numeric]])
    if len(summaries) > 1:
        means = [statistics.fmean(float(s[k]) for s in summaries) for k in numeric]
        stdevs = [statistics.stdev(float(s[k]) for s in summaries) for k in numeric]
        w.writerow(["mean", *[repr(v) for v in means]])
        w.writerow(["stdev", *[repr(v) for v in stdevs]])
    (out / "sweep_summary.csv").write_text(buf.getvalue(), encoding="utf-8")
    if not args.quiet:
        print(f"wrote sweep_summary.csv to {out}")
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    sim = Simulation(config)
    plan = form_clusters(
        sim.records, SINK_ID, config.k_clusters, config.radio_range,
        sink_range=config.sink_range,
    )
    print(json.dumps(plan.as_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_codec_dump(args: argparse.Namespace) -> int:
    try:
        raw = bytes.fromhex(args.hex)
    except ValueError as exc:
        raise ConfigError(f"bad hex string: {exc}") from exc
    decoder = {
        "signal": decode_signal,
        "frame": decode_ch_frame,
        "report": decode_cm_report,
    }[args.packet_type]
    packet = decoder(raw)
    body = asdict(packet)
    for key, value in body.items():
        if isinstance(value, bytes):
            body[key] = value.hex()
        elif isinstance(value, tuple):
            body[key] = list(value)
    print(json.dumps({"type": args.packet_type, "fields": body}, indent=2, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "plan":
            return _cmd_plan(args)
        if args.command == "codec":
            return _cmd_codec_dump(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, MalformedPacketError) as exc:
        print(f"esrp: configuration error: {exc}", file=sys.stderr)
        return 2
    except EsrpError as exc:
        print(f"esrp: error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"esrp: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
