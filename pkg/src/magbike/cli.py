"""Command-line client for the magbike service.

Every analysis subcommand talks to the FastAPI app through its REST models;
by default the app runs in-process (no server needed), while --server sends
the same requests to a running instance.  `serve` starts the teleoperation
service itself.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import httpx


def _abs(path: str | None) -> str | None:
    return None if path is None else str(Path(path).resolve())


def _post(server: str | None, route: str, payload: dict) -> dict:
    """Send one request to the service: a running one when --server is given,
    otherwise the app mounted in-process over an ASGI transport."""
    import asyncio

    async def go():
        if server:
            client = httpx.AsyncClient(base_url=server, timeout=120.0)
        else:
            from .service.app import create_app
            client = httpx.AsyncClient(transport=httpx.ASGITransport(app=create_app()),
                                       base_url="http://magbike.internal", timeout=120.0)
        async with client:
            return await client.post(route, json=payload)

    response = asyncio.run(go())
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise SystemExit(f"error: {route} failed ({response.status_code}): {detail}")
    return response.json()


def cmd_size(args) -> int:
    import yaml

    payload = {"params": {}, "worst_cases": []}
    if args.params:
        with open(args.params, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh) or {}
        payload["params"] = doc.get("params", {}) or {}
        payload["worst_cases"] = doc.get("worst_cases", []) or []
    if args.structure:
        payload["structure_path"] = _abs(args.structure)
    if args.out:
        payload["out_path"] = _abs(args.out)
    body = _post(args.server, "/api/size", payload)
    print(body["text"])
    if body.get("traversability") is not None:
        ok = body["traversability"]["pass"]
        print(f"traversability: {'PASS' if ok else 'FAIL'} "
              f"({len(body['traversability']['checks'])} checks)")
    for f in body.get("output_files", []):
        print(f"wrote {f}")
    return 0


def cmd_simulate(args) -> int:
    payload = {
        "scenario_path": _abs(args.scenario),
        "out_dir": _abs(args.out),
        "formats": args.formats.split(","),
        "export_poses": args.export_poses,
        "pose_noise_sigma": args.noise_sigma,
        "seed": args.seed,
    }
    body = _post(args.server, "/api/simulate", payload)
    s = body["summary"]
    print(f"scenario {s.get('name') or args.scenario}: {s['steps']} steps, "
          f"{s['distance']:.3f} m, {s['joints_crossed']} joints crossed, "
          f"min margin {s['min_margin']:.2f}")
    print(f"events: {s['event_counts']}")
    print(f"trajectory hash {body['trajectory_hash']}")
    for f in body.get("output_files", []):
        print(f"wrote {f}")
    return 0


def cmd_inspect(args) -> int:
    payload = {
        "poses_path": _abs(args.poses),
        "detections_path": _abs(args.detections),
        "intrinsics_path": _abs(args.intrinsics),
        "depth_dir": _abs(args.depth_dir),
        "depth_synthetic_structure": _abs(args.depth_synthetic),
        "out_dir": _abs(args.out),
        "merge_radius": args.merge_radius,
        "max_skew": args.max_skew,
        "min_confidence": args.min_confidence,
    }
    body = _post(args.server, "/api/inspect", payload)
    print(f"{body['marker_count']} markers; dropped: {body['dropped'] or 'none'}")
    for f in body.get("output_files", []):
        print(f"wrote {f}")
    return 0


def cmd_replay(args) -> int:
    payload = {"log_path": _abs(args.session), "out_dir": _abs(args.out)}
    body = _post(args.server, "/api/replay", payload)
    print(f"replayed {body['steps']} steps")
    print(f"trajectory hash {body['trajectory_hash']}")
    if body["recorded_hash"] is not None:
        verdict = "MATCH" if body["match"] else "MISMATCH"
        print(f"recorded   hash {body['recorded_hash']}  -> {verdict}")
        if not body["match"]:
            return 1
    for f in body.get("output_files", []):
        print(f"wrote {f}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .config import load_config
    from .service.app import create_app
    from .simulator import load_scenario

    config = load_config(
        args.config,
        host=args.host, port=args.port,
        telemetry_rate_hz=args.telemetry_rate,
        record_path=_abs(args.record) if args.record else None,
        map_path=_abs(args.map) if args.map else None,
    )
    scenario = load_scenario(args.scenario)
    console = args.console
    if console is None:
        # serve the operator console too when running from a checkout
        candidate = Path(__file__).resolve().parents[2] / "frontend"
        if (candidate / "index.html").exists():
            console = str(candidate)
    app = create_app(scenario, config, console_dir=console)
    print(f"serving scenario {scenario.name or args.scenario} "
          f"on ws://{config.host}:{config.port}/ws"
          + (f" (console at http://{config.host}:{config.port}/console/)" if console else ""))
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="magbike",
                                     description="climbing robot toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("size", help="actuator/adhesion sizing report")
    p.add_argument("--params", help="YAML file with params overrides and worst_cases")
    p.add_argument("--structure", help="structure YAML for a traversability section")
    p.add_argument("-o", "--out", help="write the JSON report here")
    p.add_argument("--server", help="use a running service instead of in-process")
    p.set_defaults(func=cmd_size)

    p = sub.add_parser("simulate", help="run a scenario file")
    p.add_argument("scenario")
    p.add_argument("-o", "--out", help="output directory for trajectory/events/summary")
    p.add_argument("--formats", default="csv,jsonl")
    p.add_argument("--export-poses", action="store_true",
                   help="also write a camera pose log from the trajectory")
    p.add_argument("--noise-sigma", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--server")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("inspect", help="build an inspection map from logs")
    p.add_argument("--poses", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--intrinsics", required=True)
    p.add_argument("--depth-dir", help="directory of 16-bit mm PNG depth frames")
    p.add_argument("--depth-synthetic", metavar="STRUCTURE",
                   help="ray-cast depth from this structure file instead")
    p.add_argument("-o", "--out", help="output directory for map.json / map.ply")
    p.add_argument("--merge-radius", type=float, default=0.05)
    p.add_argument("--max-skew", type=float, default=0.05)
    p.add_argument("--min-confidence", type=float, default=0.0)
    p.add_argument("--server")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("serve", help="run the teleoperation service")
    p.add_argument("scenario")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--telemetry-rate", type=float, default=None)
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--record", help="write a replayable session log here")
    p.add_argument("--map", help="inspection map JSON to overlay in consoles")
    p.add_argument("--console", help="directory with the built operator console "
                                     "(auto-detected in a checkout)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="re-run a recorded session log")
    p.add_argument("session")
    p.add_argument("-o", "--out", help="output directory for the replayed trajectory")
    p.add_argument("--server")
    p.set_defaults(func=cmd_replay)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
