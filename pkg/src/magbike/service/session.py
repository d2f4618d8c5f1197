"""Teleoperation core: one simulation loop owns the world, sessions talk to it
through queues, command application is last-write-wins at step boundaries,
and every applied command lands in a replayable session log."""

from __future__ import annotations

import asyncio
import hashlib
import itertools
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

from .. import protocol as proto
from ..config import ServiceConfig
from ..simulator import (
    CommandRow, RunResult, Scenario, Simulator, run_scenario,
    scenario_from_dict, scenario_to_dict,
)

SESSION_LOG_VERSION = 1


def _telemetry_divisor(rate_hz: float, dt: float) -> int:
    """Steps per telemetry frame whose actual rate lands nearest the target
    (the emitted rate must stay within +-20% of the configured one)."""
    ideal = 1.0 / (rate_hz * dt)
    lo = max(1, math.floor(ideal))
    hi = max(1, math.ceil(ideal))
    return min((lo, hi), key=lambda n: abs(1.0 / (n * dt) - rate_hz))


def _state_digest_update(hasher, state) -> None:
    hasher.update(state.pose.patch.encode())
    hasher.update(struct.pack(
        "<8d", state.time, state.pose.u, state.pose.v, state.pose.heading,
        state.roll, state.margin, state.steering.delta_front, state.steering.delta_back))


@dataclass
class Session:
    id: str
    role: str
    queue: asyncio.Queue = field(default_factory=lambda: asyncio.Queue(maxsize=256))
    last_seq: int = -1

    def push(self, message, droppable: bool = False) -> None:
        try:
            self.queue.put_nowait(message)
        except asyncio.QueueFull:
            if not droppable:
                # make room by discarding the oldest frame
                try:
                    self.queue.get_nowait()
                except asyncio.QueueEmpty:
                    pass
                self.queue.put_nowait(message)


class TeleopService:
    """Owns the simulator and the session registry.

    All mutation happens on the event loop thread: the stepping task and the
    WebSocket handlers interleave cooperatively, so no locks are needed.
    """

    def __init__(self, scenario: Scenario, config: ServiceConfig | None = None):
        self.scenario = scenario
        self.config = config or ServiceConfig()
        self.sessions: dict[str, Session] = {}
        self.driver_id: str | None = None
        self._ids = itertools.count(1)
        self.marker_count = 0
        if self.config.map_path:
            try:
                with open(self.config.map_path, "r", encoding="utf-8") as fh:
                    self.marker_count = len(json.load(fh).get("markers", []))
            except OSError:
                self.marker_count = 0
        self._telemetry_every = _telemetry_divisor(self.config.telemetry_rate_hz, scenario.dt)
        self._record_fh = None
        self._record_finalized = False
        if self.config.record_path:
            self._record_fh = open(self.config.record_path, "w", encoding="utf-8")
            self._record_fh.write(json.dumps({
                "type": "session", "version": SESSION_LOG_VERSION,
                "scenario": scenario_to_dict(self.scenario)}) + "\n")
            self._record_fh.flush()
        self._reset_world()
        self._stop = asyncio.Event()
        self.paused = False

    # -- world ----------------------------------------------------------------

    def _reset_world(self) -> None:
        self.sim = Simulator(self.scenario.structure, self.scenario.params,
                             self.scenario.initial_pose, self.scenario.tuning)
        self.step_index = 0
        self.active_command = CommandRow(t=0.0)
        self.pending_command: CommandRow | None = None
        self._hasher = hashlib.sha256()
        _state_digest_update(self._hasher, self.sim.state)
        self._event_backlog: list = []

    @property
    def trajectory_hash(self) -> str:
        return self._hasher.hexdigest()

    def step_once(self) -> None:
        """One simulator step: apply the latest command, record, broadcast."""
        if self.pending_command is not None:
            self.active_command = self.pending_command
            self.pending_command = None
            self._record({"type": "command", "step": self.step_index,
                          "row": _row_to_dict(self.active_command)})
        events = self.sim.step(self.active_command, self.scenario.dt)
        self.step_index += 1
        _state_digest_update(self._hasher, self.sim.state)
        wire_events = [proto.EventMessage(time=e.time, kind=e.kind, payload=e.payload)
                       for e in events]
        self._event_backlog.extend(wire_events)
        for session in self.sessions.values():
            for ev in wire_events:
                session.push(ev, droppable=True)
        if self.step_index % self._telemetry_every == 0:
            frame = self.telemetry()
            self._event_backlog.clear()
            for session in self.sessions.values():
                session.push(frame, droppable=True)

    def telemetry(self) -> proto.TelemetryMessage:
        s = self.sim.state
        return proto.TelemetryMessage(
            time=s.time, step=self.step_index,
            pose=proto.TelemetryPose(patch=s.pose.patch, u=s.pose.u, v=s.pose.v,
                                     heading=s.pose.heading, roll=s.roll,
                                     world=s.world_position()),
            steering=proto.TelemetrySteering(front=s.steering.delta_front,
                                             back=s.steering.delta_back),
            margin=s.margin,
            moving_torque_fraction=s.moving_torque_fraction,
            steering_torque_fraction=s.steering_torque_fraction,
            events=list(self._event_backlog),
            marker_count=self.marker_count,
            paused=self.paused,
        )

    async def run(self) -> None:
        """Paced stepping loop; runs until stop() is called."""
        loop = asyncio.get_running_loop()
        interval = self.scenario.dt * self.config.pace_scale
        next_deadline = loop.time() + interval
        while not self._stop.is_set():
            if not self.paused:
                self.step_once()
            delay = max(0.0, next_deadline - loop.time())
            next_deadline += interval
            try:
                await asyncio.wait_for(self._stop.wait(), timeout=max(delay, 1e-4))
            except asyncio.TimeoutError:
                pass

    def stop(self) -> None:
        self._stop.set()
        self._finalize_record()

    # -- sessions ---------------------------------------------------------------

    def register(self, hello: proto.HelloMessage) -> tuple[Session, list]:
        sid = f"s{next(self._ids)}"
        granted = "observer"
        extra = []
        if hello.role == "driver":
            if self.driver_id is None:
                granted = "driver"
                self.driver_id = sid
            else:
                extra.append(proto.ErrorMessage(
                    code="driver_taken",
                    message="another driver session is active; joined as observer"))
        session = Session(id=sid, role=granted)
        self.sessions[sid] = session
        reply = proto.HelloMessage(
            role=hello.role, granted_role=granted, session=sid,
            scenario=self.scenario.name or "scenario",
            telemetry_rate_hz=self.config.telemetry_rate_hz)
        return session, [reply] + extra

    def unregister(self, session: Session) -> None:
        self.sessions.pop(session.id, None)
        if self.driver_id == session.id:
            self.driver_id = None

    def handle_command(self, session: Session, msg: proto.CommandMessage) -> list:
        """Validate and buffer a command; replies to send back."""
        if session.role != "driver":
            return [proto.ErrorMessage(code="not_driver", seq=msg.seq,
                                       message="only the driver session may command")]
        if msg.seq <= session.last_seq:
            return [proto.ErrorMessage(code="stale_seq", seq=msg.seq,
                                       message=f"seq {msg.seq} not above {session.last_seq}; ignored")]
        limit = self.config.v_max
        for name in ("v_back", "v_front"):
            value = getattr(msg, name)
            if value is not None and abs(value) > limit + 1e-12:
                return [proto.ErrorMessage(
                    code="out_of_range", field=name, seq=msg.seq,
                    message=f"{name}={value} exceeds the {limit} m/s limit")]
        session.last_seq = msg.seq
        self.pending_command = CommandRow(
            t=self.sim.time,
            delta_front=math.radians(msg.delta_front_deg),
            delta_back=math.radians(msg.delta_back_deg),
            v_back=msg.v_back, v_front=msg.v_front)
        return [proto.AckMessage(seq=msg.seq)]

    def handle_control(self, session: Session, msg: proto.ControlMessage) -> list:
        if msg.action == "pause":
            self.paused = True
        elif msg.action == "resume":
            self.paused = False
        elif msg.action == "reset":
            self._finalize_record()
            self._reset_world()
        return [proto.AckMessage(action=msg.action)]

    # -- record / replay ---------------------------------------------------------

    def _record(self, entry: dict) -> None:
        if self._record_fh is not None and not self._record_finalized:
            self._record_fh.write(json.dumps(entry) + "\n")
            self._record_fh.flush()

    def _finalize_record(self) -> None:
        if self._record_fh is not None and not self._record_finalized:
            self._record_fh.write(json.dumps({
                "type": "end", "steps": self.step_index,
                "trajectory_hash": self.trajectory_hash}) + "\n")
            self._record_fh.flush()
            self._record_fh.close()
            self._record_finalized = True


def _row_to_dict(row: CommandRow) -> dict:
    return {"t": row.t, "delta_front": row.delta_front, "delta_back": row.delta_back,
            "v_back": row.v_back, "v_front": row.v_front}


def _row_from_dict(d: dict) -> CommandRow:
    return CommandRow(t=float(d.get("t", 0.0)),
                      delta_front=float(d.get("delta_front", 0.0)),
                      delta_back=float(d.get("delta_back", 0.0)),
                      v_back=float(d.get("v_back", 0.0)),
                      v_front=None if d.get("v_front") is None else float(d["v_front"]))


def replay_session(log_path) -> tuple[RunResult, str | None, int]:
    """Re-run a recorded session; returns (result, recorded hash, steps).

    The log is self-contained: the header embeds the full scenario, command
    lines carry the step index they were applied at, and the end line the live
    run's trajectory hash.
    """
    header = None
    commands: dict[int, CommandRow] = {}
    end = None
    for line in Path(log_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        entry = json.loads(line)
        if entry["type"] == "session":
            header = entry
        elif entry["type"] == "command":
            commands[int(entry["step"])] = _row_from_dict(entry["row"])
        elif entry["type"] == "end":
            end = entry
    if header is None:
        raise ValueError("session log has no header line")
    scenario = scenario_from_dict(header["scenario"])
    steps = int(end["steps"]) if end else (max(commands) + 1 if commands else 0)
    if steps == 0:
        raise ValueError("session log contains no steps to replay")
    scenario.duration = steps * scenario.dt
    scenario.commands = []
    current = {"row": CommandRow(t=0.0)}

    def override(step_index, scripted):
        if step_index in commands:
            current["row"] = commands[step_index]
        return current["row"]

    result = run_scenario(scenario, command_override=override)
    recorded = end.get("trajectory_hash") if end else None
    return result, recorded, steps
