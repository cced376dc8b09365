"""Command-line entry points.

    proxycam sim    --scene scene.json --out dir
    proxycam edge   --scene scene.json --out dir [--connect HOST:PORT]
    proxycam cloud  --replay packets.bin --out dir [--listen HOST:PORT]
    proxycam e2e    --scene scene.json --out dir
    proxycam audit  --out dir [--trials N --probes N --gallery N]

Every subcommand also accepts --config PATH; explicit flags override the
file. Exit codes: 0 success, 1 validation/config error, 2 privacy-gate
violation, 3 I/O or connection error, 4 audit bound failure.
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from pathlib import Path

from .audit.report import run_full_audit
from .config import RunConfig, config_from_dict
from .errors import ConfigurationError, GateViolationError, ProxycamError, ValidationError
from .runner import CloudRunner, JsonlLog, run_e2e, run_edge, run_sim, _write_summary
from .sim.spec import load_scene_spec
from .transport.replay import (
    PacketWriter,
    connect_with_retry,
    read_packets,
    recv_packet,
    send_packet,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_GATE = 2
EXIT_IO = 3
EXIT_AUDIT = 4


def _parse_address(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise ConfigurationError(f"address must be HOST:PORT, got '{text}'")
    return host, int(port)


def _resolve_config(args) -> RunConfig:
    data = {}
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for key in ("scene", "mode", "seed", "out_dir"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    transport = dict(data.get("transport", {}) or {})
    if getattr(args, "connect", None):
        transport.update(kind="socket", connect=args.connect)
    if getattr(args, "listen", None):
        transport.update(kind="socket", listen=args.listen)
    if getattr(args, "replay", None):
        transport.update(kind="file", replay=args.replay)
    if transport:
        data["transport"] = transport
    if getattr(args, "unsafe_dump_raw", False):
        debug = dict(data.get("debug", {}) or {})
        debug["unsafe_dump_raw"] = True
        data["debug"] = debug
    return config_from_dict(data)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON run config")
    parser.add_argument("--scene", help="scene spec JSON path")
    parser.add_argument("--mode", choices=("oracle", "heuristic"))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", dest="out_dir", help="output directory")


def cmd_sim(args) -> int:
    config = _resolve_config(args)
    if config.scene is None:
        raise ConfigurationError("sim requires --scene")
    summary = run_sim(config)
    print(f"wrote {summary['frames']} frames to {config.out_dir}")
    return EXIT_OK


def cmd_edge(args) -> int:
    config = _resolve_config(args)
    if config.scene is None:
        raise ConfigurationError("edge requires --scene")
    scene = load_scene_spec(config.scene)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log = JsonlLog(out / "edge_log.jsonl")

    sock = None
    try:
        if config.transport.kind == "socket":
            if not config.transport.connect:
                raise ConfigurationError("socket transport needs --connect HOST:PORT")
            try:
                sock = connect_with_retry(_parse_address(config.transport.connect))
            except ConnectionError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_IO
            stats = run_edge(config, scene, lambda p: send_packet(sock, p), log=log)
        else:
            packets_path = out / "packets.bin"
            with open(packets_path, "wb") as fh:
                writer = PacketWriter(fh)
                stats = run_edge(config, scene, writer.send, log=log)
        _write_summary(
            out,
            {
                "command": "edge",
                "scene": str(config.scene),
                "frames": stats["frames"],
                "packets": stats["packets"],
                "files": ["edge_log.jsonl"]
                + (["packets.bin"] if config.transport.kind != "socket" else []),
            },
        )
    finally:
        log.close()
        if sock is not None:
            sock.close()
    print(f"emitted {stats['packets']} packets")
    return EXIT_OK


def _cloud_finish(config: RunConfig, cloud: CloudRunner, out: Path, source: str) -> None:
    cloud.finish()
    cloud.write_reports(out / "reports.jsonl")
    gaps = [e for e in cloud.events if type(e).__name__ == "GapEvent"]
    _write_summary(
        out,
        {
            "command": "cloud",
            "source": source,
            "reports": len(cloud.reports),
            "malformed_packets": cloud.malformed,
            "gap_events": [e.frame_id for e in gaps],
            "files": ["reports.jsonl", "cloud_log.jsonl"]
            + [f"recon/{name}" for name in cloud.recon_files],
        },
    )


def cmd_cloud(args) -> int:
    config = _resolve_config(args)
    out = Path(config.out_dir)
    recon_dir = out / "recon"
    recon_dir.mkdir(parents=True, exist_ok=True)
    log = JsonlLog(out / "cloud_log.jsonl")
    cloud = CloudRunner(config=config, out_dir=recon_dir, log=log)

    try:
        if config.transport.kind == "socket":
            if not config.transport.listen:
                raise ConfigurationError("socket transport needs --listen HOST:PORT")
            host, port = _parse_address(config.transport.listen)
            with socket.create_server((host, port)) as server:
                conn, _ = server.accept()
                with conn:
                    while True:
                        packet = recv_packet(conn)
                        if packet is None:
                            break
                        cloud.feed(packet)
            source = config.transport.listen
        else:
            if not config.transport.replay:
                raise ConfigurationError("cloud needs --replay FILE or --listen")
            for packet in read_packets(config.transport.replay):
                cloud.feed(packet)
            source = config.transport.replay
        _cloud_finish(config, cloud, out, source)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        log.close()
    print(f"processed {cloud.released} tuples ({cloud.malformed} malformed skipped)")
    return EXIT_OK


def cmd_e2e(args) -> int:
    config = _resolve_config(args)
    if config.scene is None:
        raise ConfigurationError("e2e requires --scene")
    summary = run_e2e(config)
    metrics = summary["metrics"]
    print(
        f"e2e: {summary['frames']} frames, accuracy {metrics['accuracy']:.3f}, "
        f"fall recall {metrics['fall_recall']:.3f}, "
        f"elapsed {summary['elapsed_s']:.1f}s"
    )
    return EXIT_OK


def cmd_audit(args) -> int:
    out = Path(args.out_dir or "out")
    out.mkdir(parents=True, exist_ok=True)
    report = run_full_audit(
        seed=args.seed or 0,
        independence_trials=args.trials,
        gallery_size=args.gallery,
        probes=args.probes,
    )
    path = out / "audit_report.json"
    path.write_text(json.dumps(report.to_json_dict(), indent=2) + "\n", encoding="utf-8")
    print(f"audit {'PASSED' if report.passed else 'FAILED'}: {path}")
    for failure in report.failures:
        print(f"  - {failure}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_AUDIT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxycam",
        description="privacy-preserving edge-cloud perception pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("sim", help="render a scene plus ground truth to disk")
    _add_common(p_sim)
    p_sim.set_defaults(fn=cmd_sim)

    p_edge = sub.add_parser("edge", help="run the edge pipeline, emit packets")
    _add_common(p_edge)
    p_edge.add_argument("--connect", help="send packets to HOST:PORT instead of a file")
    p_edge.add_argument("--unsafe-dump-raw", action="store_true", dest="unsafe_dump_raw")
    p_edge.set_defaults(fn=cmd_edge)

    p_cloud = sub.add_parser("cloud", help="consume packets, write reports and scenes")
    _add_common(p_cloud)
    p_cloud.add_argument("--replay", help="read packets from a file")
    p_cloud.add_argument("--listen", help="accept one packet stream on HOST:PORT")
    p_cloud.set_defaults(fn=cmd_cloud)

    p_e2e = sub.add_parser("e2e", help="edge plus cloud in one process, with metrics")
    _add_common(p_e2e)
    p_e2e.add_argument("--unsafe-dump-raw", action="store_true", dest="unsafe_dump_raw")
    p_e2e.set_defaults(fn=cmd_e2e)

    p_audit = sub.add_parser("audit", help="run the privacy audit suite")
    p_audit.add_argument("--out", dest="out_dir")
    p_audit.add_argument("--seed", type=int, default=0)
    p_audit.add_argument("--trials", type=int, default=10_000)
    p_audit.add_argument("--probes", type=int, default=400)
    p_audit.add_argument("--gallery", type=int, default=8)
    p_audit.set_defaults(fn=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GateViolationError as exc:
        print(f"privacy gate violation: {exc}", file=sys.stderr)
        return EXIT_GATE
    except (ConfigurationError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ProxycamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
