"""Command line entry points: run, serve, analyze."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .mission import ScriptError, analyze, run_headless
from .missionlog import LogError


def _addr(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected host:port, got {text!r}")
    return (host or "127.0.0.1", int(port))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auvsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scripted mission headless and print the summary")
    run.add_argument("--config", help="config file (defaults built in when omitted)")
    run.add_argument("--script", required=True, help="mission script file")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True, help="log output directory")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="config override, repeatable")

    serve = sub.add_parser("serve", help="host a live mission with TCP/WS/HTTP endpoints")
    serve.add_argument("--config", help="config file (defaults built in when omitted)")
    serve.add_argument("--seed", type=int, default=0)
    serve.add_argument("--out", required=True, help="log output directory")
    serve.add_argument("--listen", type=_addr, default=("127.0.0.1", 7070),
                       metavar="HOST:PORT", help="raw TCP command endpoint")
    serve.add_argument("--ws", type=_addr, default=("127.0.0.1", 7071),
                       metavar="HOST:PORT", help="WebSocket bridge endpoint")
    serve.add_argument("--http", type=_addr, default=("127.0.0.1", 7072),
                       metavar="HOST:PORT", help="REST endpoint")
    serve.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="config override, repeatable")
    pace = serve.add_mutually_exclusive_group()
    pace.add_argument("--realtime", dest="realtime", action="store_true", default=True,
                      help="pace the simulation at wall clock speed (default)")
    pace.add_argument("--fast", dest="realtime", action="store_false",
                      help="run the simulation as fast as the host allows")

    an = sub.add_parser("analyze", help="summarize a completed log directory")
    an.add_argument("log_dir", help="directory holding telemetry.csv and gps_track.csv")
    an.add_argument("--config", help="config file used for band edges")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        result = run_headless(args.config, args.script, args.seed, args.out, args.overrides)
    except (ConfigError, ScriptError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for name in result.timeouts:
        print(f"timeout: {name}", file=sys.stderr)
    print(json.dumps(result.summary, indent=2))
    return result.exit_code


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app

    try:
        config = load_config(args.config, args.overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    Path(args.out).mkdir(parents=True, exist_ok=True)

    server: uvicorn.Server | None = None

    def on_end() -> None:
        if server is not None:
            server.should_exit = True

    app = create_app(
        config,
        args.out,
        args.seed,
        listen=args.listen,
        ws=args.ws,
        realtime=args.realtime,
        on_end=on_end,
    )
    server = uvicorn.Server(
        uvicorn.Config(app, host=args.http[0], port=args.http[1], log_level="warning")
    )
    server.run()
    runtime = getattr(app.state, "runtime", None)
    if runtime is None:
        return 1
    if runtime.engine.aborted:
        return 3
    if runtime.engine.timeouts:
        return 2
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config) if args.config else None
        report = analyze(args.log_dir, config)
    except (ConfigError, LogError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(report, indent=2))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "serve":
        return _cmd_serve(args)
    return _cmd_analyze(args)


if __name__ == "__main__":
    sys.exit(main())
