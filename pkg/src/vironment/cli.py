"""Command-line entry points.

    vironment run --scenario FILE --out FILE [--cycles N] [--seed N]
    vironment serve --scenario FILE [--port N] [--seed N]
    vironment ppi render --scenario FILE [--cycles N] [--size PX] [--out FILE]
    vironment proto encode|decode|pipe
    vironment distancer run --log FILE --focal PX

Exit codes: 0 success, 1 usage error, 2 scenario/data error.  Set
VIRONMENT_LOG_LEVEL to adjust logging.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .distancer import Calibration, parse_detection_log, step_distancer
from .ppi import render_svg
from .scanner import ScanFrame
from .scenario_io import ScenarioError, load_scenario
from .session import run_session
from .wire import StreamDecoder, DecodedFrame, encode_frame

log = logging.getLogger("vironment")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCENARIO = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the scenario-error code owns 2 here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="vironment", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"vironment {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a scenario headless and write telemetry")
    run.add_argument("--scenario", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--cycles", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)

    serve = sub.add_parser("serve", help="stream a live session over HTTP/WebSocket")
    serve.add_argument("--scenario", required=True)
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--seed", type=int, default=None)

    ppi = sub.add_parser("ppi", help="PPI display tools")
    ppi_sub = ppi.add_subparsers(dest="ppi_command", required=True, parser_class=_Parser)
    render = ppi_sub.add_parser("render", help="render the PPI after N cycles as SVG")
    render.add_argument("--scenario", required=True)
    render.add_argument("--cycles", type=int, default=1)
    render.add_argument("--size", type=int, default=512)
    render.add_argument("--out", default=None, help="output file, default stdout")
    render.add_argument("--seed", type=int, default=None)

    proto = sub.add_parser("proto", help="wire-protocol encode/decode on raw streams")
    proto_sub = proto.add_subparsers(dest="proto_command", required=True, parser_class=_Parser)
    proto_sub.add_parser("encode", help="telemetry JSON lines on stdin -> frames on stdout")
    proto_sub.add_parser("decode", help="frames on stdin -> JSON lines on stdout")
    proto_sub.add_parser("pipe", help="encode then decode, a loopback check")

    dist = sub.add_parser("distancer", help="monocular distance estimator")
    dist_sub = dist.add_subparsers(dest="distancer_command", required=True, parser_class=_Parser)
    dist_run = dist_sub.add_parser("run", help="emit one screen state per log frame")
    dist_run.add_argument("--log", required=True)
    dist_run.add_argument("--focal", type=float, required=True, help="focal length, pixels")
    dist_run.add_argument("--height", type=float, default=1.65, help="person height prior, m")
    dist_run.add_argument("--min-confidence", type=float, default=0.5)

    return parser


def _load(args):
    scene, cfg, script = load_scenario(args.scenario)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    return scene, cfg, script


def _cmd_run(args) -> int:
    scene, cfg, script = _load(args)
    if args.cycles is None and cfg.duration_s is None:
        raise ScenarioError(
            f"{args.scenario}: unbounded scenario; set config.duration_s or pass --cycles"
        )
    result = run_session(scene, cfg, script, cycles=args.cycles)
    out = Path(args.out)
    out.write_text("".join(r.to_json_line() + "\n" for r in result.records))
    for err in result.command_errors:
        log.warning("command rejected at t=%dms: %s", err.t_ms, err.message)
    minimum = result.min_distance_m
    print(f"cycles: {len(result.records)}")
    print(f"alert-on cycles: {result.alert_on_cycles}")
    print(f"min distance observed: {'none' if minimum is None else f'{minimum:.3f} m'}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .server import serve  # deferred: pulls in fastapi/uvicorn

    scene, cfg, script = _load(args)
    serve(scene, cfg, script, host=args.host, port=args.port)
    return EXIT_OK


def _cmd_ppi_render(args) -> int:
    scene, cfg, script = _load(args)
    if args.cycles < 1:
        raise ScenarioError("--cycles must be >= 1")
    result = run_session(scene, cfg, script, cycles=args.cycles)
    svg = render_svg(result.records[-1].ppi, size_px=args.size)
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def _cmd_proto_encode(stdin, stdout) -> int:
    for lineno, line in enumerate(stdin, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            frame = ScanFrame(
                seq=rec["seq"],
                readings=tuple(rec["readings"]),
                timestamp_ms=rec.get("t_ms", 0),
            )
            alert = bool(rec.get("alert", {}).get("led", False))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"stdin line {lineno}: {exc}") from exc
        stdout.write(encode_frame(frame, alert))
    stdout.flush()
    return EXIT_OK


def _cmd_proto_decode(stdin, stdout) -> int:
    decoder = StreamDecoder()
    errors = 0
    events = decoder.feed(stdin.read()) + decoder.close()
    for event in events:
        if isinstance(event, DecodedFrame):
            rec = {
                "seq": event.frame.seq,
                "t_ms": event.frame.timestamp_ms,
                "readings": list(event.frame.readings),
                "alert": {"led": event.alert, "horn": event.alert},
            }
            stdout.write(json.dumps(rec, separators=(",", ":")) + "\n")
        else:
            errors += 1
            print(
                f"error: {event.kind}: {event.length} bytes at offset {event.offset}",
                file=sys.stderr,
            )
    stdout.flush()
    log.info("decoded stream with %d error regions", errors)
    return EXIT_OK


def _cmd_proto_pipe(stdin, stdout) -> int:
    import io

    raw = io.BytesIO()
    _cmd_proto_encode(stdin, raw)
    return _cmd_proto_decode(io.BytesIO(raw.getvalue()), stdout)


def _cmd_distancer_run(args) -> int:
    cal = Calibration(focal_length=args.focal, person_height=args.height)
    try:
        frames = parse_detection_log(Path(args.log).read_text().splitlines())
    except (OSError, ValueError) as exc:
        raise ScenarioError(f"{args.log}: {exc}") from exc
    for detections in frames:
        print(step_distancer(detections, cal, min_confidence=args.min_confidence).value)
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("VIRONMENT_LOG_LEVEL", "WARNING").upper())
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "ppi":
            return _cmd_ppi_render(args)
        if args.command == "proto":
            if args.proto_command == "encode":
                return _cmd_proto_encode(sys.stdin, sys.stdout.buffer)
            if args.proto_command == "decode":
                return _cmd_proto_decode(sys.stdin.buffer, sys.stdout)
            return _cmd_proto_pipe(sys.stdin, sys.stdout)
        if args.command == "distancer":
            return _cmd_distancer_run(args)
    except ScenarioError as exc:
        print(f"vironment: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as exc:
        print(f"vironment: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
