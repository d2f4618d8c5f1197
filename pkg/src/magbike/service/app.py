"""FastAPI service wrapping the toolkit.

Stateless analysis endpoints (size, validate, simulate, inspect, replay) work
with or without a loaded scenario; the WebSocket teleoperation endpoint and
the live-state routes need the app to be created with one.
"""

from __future__ import annotations

import asyncio
import json
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .. import __version__, protocol as proto
from ..config import ServiceConfig
from ..geometry import StructureError, load_structure, structure_from_dict
from ..inspection import CameraIntrinsics, PipelineConfig, build_map
from ..inspection import io as iio
from ..inspection.synthetic import SyntheticDepth
from ..simulator import (
    Scenario, ScenarioError, load_scenario, run_scenario,
    export_events_jsonl, export_trajectory_csv, export_trajectory_jsonl,
    traversability_report,
)
from ..statics import CornerLoadCase, RobotParams, StaticsDomainError, actuator_feasibility
from . import models as m
from .session import TeleopService, replay_session


def create_app(scenario: Scenario | None = None,
               config: ServiceConfig | None = None,
               console_dir: str | None = None) -> FastAPI:
    config = config or ServiceConfig()
    service = TeleopService(scenario, config) if scenario is not None else None

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(service.run()) if service else None
        yield
        if service:
            service.stop()
        if task:
            try:
                await asyncio.wait_for(task, timeout=2.0)
            except asyncio.TimeoutError:
                task.cancel()

    app = FastAPI(title="magbike", version=__version__, lifespan=lifespan)
    app.state.service = service
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    if console_dir and Path(console_dir).is_dir():
        app.mount("/console", StaticFiles(directory=console_dir, html=True), name="console")

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__,
                "teleop": service is not None}

    @app.post("/api/size", response_model=m.SizeResponse)
    def size(req: m.SizeRequest):
        try:
            params = RobotParams(**req.params)
            cases = [CornerLoadCase(c.f_edge, c.f_wall, c.weight, c.label)
                     for c in req.worst_cases]
            report = actuator_feasibility(params, cases)
        except (StaticsDomainError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        traversability = None
        if req.structure_path:
            structure = _load_structure_checked(req.structure_path)
            traversability = traversability_report(structure, params).to_dict()
        outputs = []
        if req.out_path:
            doc = {"sizing": report.to_dict()}
            if traversability is not None:
                doc["traversability"] = traversability
            Path(req.out_path).write_text(json.dumps(doc, indent=2), encoding="utf-8")
            outputs.append(req.out_path)
        return m.SizeResponse(report=report.to_dict(), text=report.to_text(),
                              traversability=traversability, output_files=outputs)

    @app.post("/api/structure/validate", response_model=m.ValidateStructureResponse)
    def validate(req: m.ValidateStructureRequest):
        if req.structure_path:
            structure = _load_structure_checked(req.structure_path)
        elif req.structure is not None:
            try:
                structure = structure_from_dict(req.structure)
            except StructureError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        else:
            raise HTTPException(status_code=422, detail="structure or structure_path required")
        issues = structure.validate()
        return m.ValidateStructureResponse(
            issues=[m.IssueModel(code=i.code, subject=i.subject, message=i.message)
                    for i in issues],
            ok=not issues)

    @app.post("/api/simulate", response_model=m.SimulateResponse)
    def simulate(req: m.SimulateRequest):
        try:
            scen = load_scenario(req.scenario_path)
        except (OSError, StructureError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if req.pose_noise_sigma is not None:
            scen.pose_noise_sigma = req.pose_noise_sigma
        if req.seed is not None:
            scen.seed = req.seed
        try:
            result = run_scenario(scen)
        except ScenarioError as exc:
            raise HTTPException(status_code=422, detail={"issues": [str(i) for i in exc.issues]})
        outputs = []
        if req.out_dir:
            out = Path(req.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            if "csv" in req.formats:
                p = out / "trajectory.csv"
                export_trajectory_csv(result.trajectory, p)
                outputs.append(str(p))
            if "jsonl" in req.formats:
                p = out / "trajectory.jsonl"
                export_trajectory_jsonl(result.trajectory, p)
                outputs.append(str(p))
            p = out / "events.jsonl"
            export_events_jsonl(result.events, p)
            outputs.append(str(p))
            p = out / "summary.json"
            p.write_text(json.dumps(result.summary, indent=2), encoding="utf-8")
            outputs.append(str(p))
            if req.export_poses:
                from ..inspection.synthetic import pose_samples_from_trajectory
                samples = pose_samples_from_trajectory(
                    result.trajectory, scen.structure,
                    noise_sigma=scen.pose_noise_sigma, seed=scen.seed)
                p = out / "poses.jsonl"
                iio.save_pose_log(samples, p)
                outputs.append(str(p))
        return m.SimulateResponse(summary=result.summary,
                                  trajectory_hash=result.trajectory_hash(),
                                  output_files=outputs)

    @app.post("/api/inspect", response_model=m.InspectResponse)
    def inspect(req: m.InspectRequest):
        try:
            poses = iio.load_pose_log(req.poses_path)
            detections = iio.load_detection_log(req.detections_path)
            k = CameraIntrinsics.load(req.intrinsics_path)
        except (OSError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if req.min_confidence > 0:
            detections = [d for d in detections if d.confidence >= req.min_confidence]
        structure = None
        if req.depth_dir:
            depth = iio.DepthImageDirectory(req.depth_dir, max_skew=req.max_skew)
        elif req.depth_synthetic_structure:
            structure = _load_structure_checked(req.depth_synthetic_structure)
            depth = SyntheticDepth.from_pose_samples(structure, poses, k)
        else:
            raise HTTPException(status_code=422,
                                detail="depth_dir or depth_synthetic_structure required")
        cfg = PipelineConfig(max_skew=req.max_skew, merge_radius=req.merge_radius)
        try:
            imap = build_map(poses, detections, depth, k, config=cfg)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        outputs = []
        if req.out_dir:
            out = Path(req.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            p = out / "map.json"
            iio.save_map_json(imap, p)
            outputs.append(str(p))
            p = out / "map.ply"
            iio.save_map_ply(imap, p, structure=structure)
            outputs.append(str(p))
        return m.InspectResponse(marker_count=len(imap.markers), dropped=imap.dropped,
                                 markers=[mk.to_dict() for mk in imap.markers],
                                 output_files=outputs)

    @app.post("/api/replay", response_model=m.ReplayResponse)
    def replay(req: m.ReplayRequest):
        try:
            result, recorded, steps = replay_session(req.log_path)
        except (OSError, ValueError, ScenarioError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        outputs = []
        if req.out_dir:
            out = Path(req.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            p = out / "trajectory.csv"
            export_trajectory_csv(result.trajectory, p)
            outputs.append(str(p))
        h = result.trajectory_hash()
        return m.ReplayResponse(steps=steps, trajectory_hash=h, recorded_hash=recorded,
                                match=None if recorded is None else recorded == h,
                                output_files=outputs)

    @app.get("/api/state", response_model=m.StateResponse)
    def state():
        if service is None:
            raise HTTPException(status_code=404, detail="no scenario loaded")
        return m.StateResponse(step=service.step_index, time=service.sim.time,
                               trajectory_hash=service.trajectory_hash,
                               paused=service.paused, sessions=len(service.sessions))

    @app.get("/api/scenario")
    def scenario_info():
        if service is None:
            raise HTTPException(status_code=404, detail="no scenario loaded")
        scen = service.scenario
        return {"name": scen.name, "dt": scen.dt,
                "patches": [{"id": p.id, "kind": p.kind,
                             "bounds": {"u": list(p.bounds.u), "v": list(p.bounds.v)},
                             "radius": p.radius}
                            for p in scen.structure.patches],
                "params": {"wheelbase": scen.params.wheelbase,
                           "sf_adhesion": scen.params.sf_adhesion},
                "telemetry_rate_hz": config.telemetry_rate_hz}

    @app.get("/api/map")
    def map_overlay():
        if config.map_path:
            try:
                with open(config.map_path, "r", encoding="utf-8") as fh:
                    return json.load(fh)
            except OSError:
                pass
        return {"markers": [], "path": []}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        if service is None:
            await ws.send_text(proto.encode(proto.ErrorMessage(
                code="no_scenario", message="server has no scenario loaded")))
            await ws.close()
            return
        try:
            first = proto.decode(await ws.receive_text())
        except (ValueError, WebSocketDisconnect):
            await ws.close()
            return
        if not isinstance(first, proto.HelloMessage):
            await ws.send_text(proto.encode(proto.ErrorMessage(
                code="expected_hello", message="first frame must be a hello message")))
            await ws.close()
            return
        session, replies = service.register(first)
        for r in replies:
            await ws.send_text(proto.encode(r))

        async def sender():
            while True:
                msg = await session.queue.get()
                await ws.send_text(proto.encode(msg))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = proto.decode(raw)
                except ValueError as exc:
                    session.push(proto.ErrorMessage(code="malformed",
                                                    message=_validation_summary(exc)))
                    continue
                if isinstance(msg, proto.CommandMessage):
                    for r in service.handle_command(session, msg):
                        session.push(r)
                elif isinstance(msg, proto.ControlMessage):
                    for r in service.handle_control(session, msg):
                        session.push(r)
                else:
                    session.push(proto.ErrorMessage(
                        code="unexpected_type",
                        message=f"cannot handle client frame of type {msg.type!r}"))
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            service.unregister(session)

    return app


def _validation_summary(exc) -> str:
    errors = getattr(exc, "errors", None)
    if callable(errors):
        parts = []
        for e in errors():
            loc = ".".join(str(p) for p in e.get("loc", ()) if p != "__root__")
            parts.append(f"{loc}: {e.get('msg')}" if loc else str(e.get("msg")))
        return "; ".join(parts)
    return str(exc)


def _load_structure_checked(path: str):
    try:
        return load_structure(path)
    except (OSError, StructureError) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
