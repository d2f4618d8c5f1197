"""Discrete-time climbing simulator.

One stepper owns the world: it slews steering at the servo rate, advances the
body-center pose in the developed plane with exact twist arcs, carries the
pose across joints, derives both wheel contacts (possibly on neighboring
patches), and raises fall-risk / torque / slip / boundary events from the
statics checks.
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from . import kinematics as kin
from .geometry import (
    StructureModel, SurfacePatch, SurfacePose, load_structure, structure_from_dict,
)
from .statics import (
    CornerLoadCase, RobotParams, SizingCheck, SizingReport, corner_hit_margin,
    required_moving_torque, required_steering_torque,
)

EV_FALL_RISK = "fall_risk"
EV_TORQUE_SATURATION = "torque_saturation"
EV_STEER_SATURATION = "steer_saturation"
EV_SLIP = "slip"
EV_JOINT_TRANSITION = "joint_transition"
EV_BOUNDARY = "boundary"
EV_COMPLETED = "completed"

CONTACT_FULL_LINE = "full_line"
CONTACT_POINT = "point"
CONTACT_CORNER = "corner_hit"


class SimError(RuntimeError):
    pass


class ScenarioError(ValueError):
    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("scenario validation failed: " + "; ".join(str(i) for i in self.issues))


@dataclass(frozen=True)
class SimTuning:
    """Stepper knobs that are assumptions rather than robot data."""

    derate_point: float = 0.5      # single-point contact on a thin cylinder
    derate_corner: float = 0.3     # wheel within reach of a joint edge
    corner_window: float = 0.03    # m, edge distance counted as a corner hit
    servo_rate: float = 3.0        # rad/s steering slew limit
    v_max: float = 0.2             # m/s wheel speed limit
    slip_tol: float = 1e-3         # m/s commanded-vs-consistent front speed
    roll_limit: float = math.pi / 2


@dataclass(frozen=True)
class SimEvent:
    time: float
    kind: str
    payload: dict = field(default_factory=dict)

    def to_dict(self):
        return {"time": self.time, "kind": self.kind, "payload": self.payload}


@dataclass(frozen=True)
class WheelContact:
    patch: str
    u: float
    v: float
    point: tuple[float, float, float]
    normal: tuple[float, float, float]
    contact_class: str


@dataclass(frozen=True)
class RobotState:
    pose: SurfacePose
    steering: kin.SteeringState
    roll: float
    contact_back: WheelContact
    contact_front: WheelContact
    time: float
    margin: float
    moving_torque_fraction: float
    steering_torque_fraction: float

    def world_position(self) -> tuple[float, float, float]:
        b, f = np.array(self.contact_back.point), np.array(self.contact_front.point)
        return tuple((b + f) / 2)

    def to_dict(self):
        return {
            "time": self.time,
            "patch": self.pose.patch,
            "u": self.pose.u, "v": self.pose.v, "heading": self.pose.heading,
            "roll": self.roll,
            "steering": {"front": self.steering.delta_front, "back": self.steering.delta_back},
            "margin": self.margin,
            "moving_torque_fraction": self.moving_torque_fraction,
            "steering_torque_fraction": self.steering_torque_fraction,
            "contacts": {
                "back": {"patch": self.contact_back.patch, "point": list(self.contact_back.point),
                         "class": self.contact_back.contact_class},
                "front": {"patch": self.contact_front.patch, "point": list(self.contact_front.point),
                          "class": self.contact_front.contact_class},
            },
            "world": list(self.world_position()),
        }


@dataclass(frozen=True)
class CommandRow:
    """One scripted command, active from time t until the next row."""

    t: float
    delta_front: float = 0.0    # rad
    delta_back: float = 0.0     # rad
    v_back: float = 0.0         # m/s
    v_front: float | None = None  # None: follow the slip-free speed


@dataclass
class Scenario:
    structure: StructureModel
    params: RobotParams
    initial_pose: SurfacePose
    commands: list[CommandRow]
    dt: float = 0.02
    duration: float = 5.0
    pose_noise_sigma: float = 0.0
    seed: int = 0
    name: str = ""
    tuning: SimTuning = field(default_factory=SimTuning)

    def validate(self) -> list[str]:
        issues = []
        if not (0.0 < self.dt <= kin.DT_MAX):
            issues.append(f"dt must lie in (0, {kin.DT_MAX}], got {self.dt}")
        if self.duration <= 0:
            issues.append(f"duration must be positive, got {self.duration}")
        structural = [i for i in self.structure.validate() if i.code == "dangling_joint"]
        issues.extend(str(i) for i in structural)
        try:
            patch = self.structure.patch(self.initial_pose.patch)
            if not patch.contains(self.initial_pose.u, self.initial_pose.v):
                issues.append("initial pose outside its patch bounds")
        except Exception as exc:
            issues.append(str(exc))
        if self.pose_noise_sigma < 0:
            issues.append("pose_noise_sigma must be >= 0")
        return issues


class Simulator:
    """Steps one robot over one structure.  Not thread-safe by design: a
    single stepping context owns the world and emits immutable snapshots."""

    def __init__(self, structure: StructureModel, params: RobotParams,
                 initial_pose: SurfacePose, tuning: SimTuning | None = None):
        self.model = structure
        self.params = params
        self.tuning = tuning or SimTuning()
        self.time = 0.0
        self.steering = kin.SteeringState(0.0, 0.0)
        patch = self.model.patch(initial_pose.patch)
        if not patch.contains(initial_pose.u, initial_pose.v):
            raise SimError("initial pose is off the structure")
        self._patch = patch
        dev = patch.develop()
        x, y = dev.to_plane(initial_pose.u, initial_pose.v)
        self._xy = np.array([x, y])
        self._heading = initial_pose.heading
        self._speed = 0.0
        self.distance = 0.0
        state = self._snapshot()
        if state is None:
            raise SimError("initial pose places a wheel off the structure")
        self.state = state

    # -- chart bookkeeping ---------------------------------------------------

    def _pose(self) -> SurfacePose:
        u, v = self._patch.develop().to_surface(self._xy[0], self._xy[1])
        return SurfacePose(self._patch.id, u, v, self._heading)

    def _locate(self, from_xy, to_xy, patch: SurfacePatch, depth: int = 0):
        """Map a developed-plane point to (patch, u, v), hopping joints.

        Follows the segment from a point known to lie on `patch` toward the
        target; each joint edge crossed re-expresses the remainder on the
        neighbor through the unfold isometry.
        """
        dev = patch.develop()
        u, v = dev.to_surface(to_xy[0], to_xy[1])
        if patch.contains(u, v, tol=1e-9):
            return patch, u, v
        if depth >= 3:
            return None
        hit = self._find_crossing(from_xy, to_xy, patch)
        if hit is None:
            return None
        joint, chart, motion, dst = hit
        return self._locate(motion.apply(from_xy), motion.apply(to_xy), dst, depth + 1)

    def _find_crossing(self, from_xy, to_xy, patch: SurfacePatch):
        """First joint edge the segment from->to crosses on this patch."""
        best = None
        seg = np.asarray(to_xy, float) - np.asarray(from_xy, float)
        for joint, chart, motion, dst in self.model.exits(patch.id):
            n = chart.inward
            d0 = float((np.asarray(from_xy) - chart.origin) @ n)
            d1 = float((np.asarray(to_xy) - chart.origin) @ n)
            if d0 < -1e-9 or d1 > -1e-12 or abs(d1 - d0) < 1e-15:
                continue  # must go from inside (>=0) to outside (<0)
            s = d0 / (d0 - d1)
            cross_pt = np.asarray(from_xy) + s * seg
            lam = chart.lambda_of(cross_pt)
            if -1e-9 <= lam <= chart.length + 1e-9:
                if best is None or s < best[0]:
                    best = (s, joint, chart, motion, dst)
        if best is None:
            return None
        return best[1], best[2], best[3], best[4]

    def _nearest_joint_kind(self, xy, patch: SurfacePatch):
        best, kind = math.inf, None
        for joint, chart, motion, dst in self.model.exits(patch.id):
            lam = min(max(chart.lambda_of(xy), 0.0), chart.length)
            foot = chart.origin + lam * chart.direction
            d = float(np.linalg.norm(np.asarray(xy) - foot))
            if d < best:
                best, kind = d, joint.kind
        return best, kind

    def _wheel_contact(self, offset_sign: float) -> WheelContact | None:
        half = self.params.wheelbase / 2
        heading_dir = np.array([math.cos(self._heading), math.sin(self._heading)])
        wheel_xy = self._xy + offset_sign * half * heading_dir
        located = self._locate(self._xy, wheel_xy, self._patch)
        if located is None:
            return None
        patch, u, v = located
        point = patch.point(u, v)
        normal = patch.normal(u, v)
        dev = patch.develop()
        edge_dist, _ = self._nearest_joint_kind(np.array(dev.to_plane(u, v)), patch)
        if edge_dist < self.tuning.corner_window:
            cls = CONTACT_CORNER
        elif patch.is_cylinder:
            cls = CONTACT_POINT
        else:
            cls = CONTACT_FULL_LINE
        return WheelContact(patch.id, u, v, tuple(point), tuple(normal), cls)

    def _derate(self, cls: str) -> float:
        return {CONTACT_FULL_LINE: 1.0, CONTACT_POINT: self.tuning.derate_point,
                CONTACT_CORNER: self.tuning.derate_corner}[cls]

    def _snapshot(self, moving_frac: float = 0.0, steer_frac: float = 0.0):
        back = self._wheel_contact(-1.0)
        front = self._wheel_contact(+1.0)
        if back is None or front is None:
            return None
        n_b, n_f = np.array(back.normal), np.array(front.normal)
        axis = np.array(front.point) - np.array(back.point)
        if np.linalg.norm(np.cross(n_b, n_f)) < 1e-12:
            roll = 0.0
        else:
            roll = kin.free_joint_roll(n_f, n_b, axis / np.linalg.norm(axis))
        p = self.params
        f_back = p.magnet_force * self._derate(back.contact_class)
        f_front = p.magnet_force * self._derate(front.contact_class)
        # corner-hit tip-over check both ways: the weaker wheel must hold the
        # robot when the other one peels off the surface
        margin = min(
            corner_hit_margin(f_front, p.wheelbase, p.weight, p.com_height),
            corner_hit_margin(f_back, p.wheelbase, p.weight, p.com_height))
        return RobotState(
            pose=self._pose(), steering=self.steering, roll=roll,
            contact_back=back, contact_front=front, time=self.time,
            margin=margin, moving_torque_fraction=moving_frac,
            steering_torque_fraction=steer_frac)

    # -- stepping ------------------------------------------------------------

    def step(self, command: CommandRow, dt: float) -> list[SimEvent]:
        if not (0.0 < dt <= kin.DT_MAX + 1e-12):
            raise SimError(f"dt must lie in (0, {kin.DT_MAX}]")
        events: list[SimEvent] = []
        tun = self.tuning
        p = self.params

        # steering slew toward the (range-clamped) target
        target_f, clipped_f = self._clamp_angle(command.delta_front)
        target_b, clipped_b = self._clamp_angle(command.delta_back)
        if clipped_f or clipped_b:
            events.append(SimEvent(self.time, EV_STEER_SATURATION, {
                "commanded_front": command.delta_front, "commanded_back": command.delta_back,
                "limit": math.pi / 2}))
        max_slew = tun.servo_rate * dt
        new_f = self._slew(self.steering.delta_front, target_f, max_slew)
        new_b = self._slew(self.steering.delta_back, target_b, max_slew)
        slewing = (abs(new_f - self.steering.delta_front) > 1e-12
                   or abs(new_b - self.steering.delta_back) > 1e-12)
        self.steering = kin.SteeringState(new_f, new_b)

        v_back = max(-tun.v_max, min(tun.v_max, command.v_back))
        v_front_cmd = command.v_front
        if v_front_cmd is not None:
            v_front_cmd = max(-tun.v_max, min(tun.v_max, v_front_cmd))

        try:
            twist, v_front_req = kin.body_twist(self.steering, v_back, p.wheelbase, v_front_cmd)
        except kin.SlipError as exc:
            events.append(SimEvent(self.time, EV_SLIP, {
                "residual": exc.residual, "reason": "back wheel pinned on the pivot"}))
            twist, v_front_req = kin.body_twist(self.steering, 0.0, p.wheelbase, v_front_cmd)
        else:
            if v_front_cmd is not None and abs(v_front_cmd - v_front_req) > tun.slip_tol:
                events.append(SimEvent(self.time, EV_SLIP, {
                    "residual": abs(v_front_cmd - v_front_req),
                    "commanded_front": v_front_cmd, "consistent_front": v_front_req}))

        moved = self._advance(twist, dt, events)
        speed = math.hypot(twist.vx, twist.vy)
        self.distance += speed * dt * moved
        self.time += dt

        state = self._snapshot()
        if state is None:
            raise SimError("robot lost contact with the structure")

        # statics checks on the new configuration
        if state.margin < p.sf_adhesion:
            events.append(SimEvent(self.time, EV_FALL_RISK, {
                "margin": state.margin, "threshold": p.sf_adhesion}))

        case = self._corner_case(state)
        moving_req = required_moving_torque(p.wheel_radius, case, p.friction_k, p.sf_torque)
        moving_frac = moving_req / p.motor_torque
        if moving_req > p.motor_torque:
            events.append(SimEvent(self.time, EV_TORQUE_SATURATION, {
                "actuator": "moving", "required": moving_req, "available": p.motor_torque}))
        steer_frac = 0.0
        if slewing:
            steer_req = required_steering_torque(
                p.wheel_radius, p.inter_wheel_force, case.f_wall, p.weight,
                p.friction_k, p.sf_torque)
            steer_frac = steer_req / p.servo_torque
            if steer_req > p.servo_torque:
                events.append(SimEvent(self.time, EV_TORQUE_SATURATION, {
                    "actuator": "steering", "required": steer_req, "available": p.servo_torque}))

        self.state = replace(state, moving_torque_fraction=moving_frac,
                             steering_torque_fraction=steer_frac)
        return events

    def _corner_case(self, state: RobotState) -> CornerLoadCase:
        """Load case for the torque formulas given current contact classes."""
        p = self.params
        pinch = 0.0
        edge = 0.0
        for contact in (state.contact_front, state.contact_back):
            if contact.contact_class != CONTACT_CORNER:
                continue
            patch = self.model.patch(contact.patch)
            dev = patch.develop()
            _, kind = self._nearest_joint_kind(np.array(dev.to_plane(contact.u, contact.v)), patch)
            edge = max(edge, p.magnet_force * self.tuning.derate_corner)
            if kind == "internal":
                pinch = max(pinch, p.magnet_force * self.tuning.derate_corner)
        return CornerLoadCase(f_edge=edge, f_wall=pinch, weight=p.weight, label="step")

    @staticmethod
    def _clamp_angle(a: float) -> tuple[float, bool]:
        lim = math.pi / 2
        if a > lim:
            return lim, True
        if a < -lim:
            return -lim, True
        return a, False

    @staticmethod
    def _slew(current: float, target: float, max_step: float) -> float:
        d = target - current
        if abs(d) <= max_step:
            return target
        return current + math.copysign(max_step, d)

    def _advance(self, twist: kin.BodyTwist, dt: float, events: list[SimEvent]) -> float:
        """Advance the center pose; returns the executed fraction of the step."""
        if self._try_place(twist, dt, events, commit=True):
            return 1.0
        # boundary: park at the largest step fraction that keeps the robot on
        # the structure and report it (never clamp silently)
        lo, hi = 0.0, 1.0
        for _ in range(40):
            mid = (lo + hi) / 2
            if self._try_place(twist, mid * dt, events, commit=False):
                lo = mid
            else:
                hi = mid
        if lo > 0.0:
            self._try_place(twist, lo * dt, events, commit=True)
        events.append(SimEvent(self.time, EV_BOUNDARY, {
            "patch": self._patch.id, "executed_fraction": lo}))
        return lo

    def _try_place(self, twist, dt, events, commit):
        """Integrate by dt and resolve joint crossings.

        Returns False when the center or a wheel would leave the structure.
        Without commit the stepper state is left untouched.
        """
        if dt <= 0.0:
            return True
        x, y, heading = kin.advance_planar(self._xy[0], self._xy[1], self._heading, twist, dt)
        patch = self._patch
        xy = np.array([x, y])
        prev_xy = self._xy.copy()
        crossings = []
        for _ in range(4):
            dev = patch.develop()
            u, v = dev.to_surface(xy[0], xy[1])
            if patch.contains(u, v, tol=1e-9):
                break
            hit = self._find_crossing(prev_xy, xy, patch)
            if hit is None:
                return False
            joint, chart, motion, dst = hit
            crossings.append((joint, patch.id, dst.id))
            prev_xy = motion.apply(prev_xy)
            xy = motion.apply(xy)
            heading = heading + motion.angle
            patch = dst
        else:
            return False
        saved = (self._patch, self._xy, self._heading)
        self._patch, self._xy, self._heading = patch, xy, heading
        ok = self._wheel_contact(-1.0) is not None and self._wheel_contact(+1.0) is not None
        if not (commit and ok):
            self._patch, self._xy, self._heading = saved
        if commit and ok:
            for joint, src, dst_id in crossings:
                events.append(SimEvent(self.time, EV_JOINT_TRANSITION, {
                    "joint": joint.id, "from": src, "to": dst_id,
                    "dihedral": joint.dihedral, "kind": joint.kind}))
        return ok


@dataclass
class RunResult:
    trajectory: list[RobotState]
    events: list[SimEvent]
    summary: dict

    def trajectory_hash(self) -> str:
        return trajectory_hash(self.trajectory)


def trajectory_hash(trajectory) -> str:
    h = hashlib.sha256()
    for s in trajectory:
        h.update(s.pose.patch.encode())
        h.update(struct.pack("<8d", s.time, s.pose.u, s.pose.v, s.pose.heading,
                             s.roll, s.margin, s.steering.delta_front, s.steering.delta_back))
    return h.hexdigest()


def run_scenario(scenario: Scenario, command_override=None) -> RunResult:
    """Run a scripted scenario to completion.

    Deterministic: identical scenarios produce bit-identical trajectories.
    command_override, when given, is called per step index and may replace the
    scripted command (used by the teleoperation service and replays).
    """
    issues = scenario.validate()
    if issues:
        raise ScenarioError(issues)
    sim = Simulator(scenario.structure, scenario.params, scenario.initial_pose,
                    scenario.tuning)
    rows = sorted(scenario.commands, key=lambda r: r.t)
    trajectory = [sim.state]
    events: list[SimEvent] = []
    n_steps = int(round(scenario.duration / scenario.dt))
    row_idx = -1
    active = CommandRow(t=0.0)
    for step_i in range(n_steps):
        t = step_i * scenario.dt
        while row_idx + 1 < len(rows) and rows[row_idx + 1].t <= t + 1e-12:
            row_idx += 1
            active = rows[row_idx]
        cmd = active
        if command_override is not None:
            replacement = command_override(step_i, cmd)
            if replacement is not None:
                cmd = replacement
        events.extend(sim.step(cmd, scenario.dt))
        trajectory.append(sim.state)
    events.append(SimEvent(sim.time, EV_COMPLETED, {"steps": n_steps}))
    counts: dict[str, int] = {}
    for e in events:
        counts[e.kind] = counts.get(e.kind, 0) + 1
    summary = {
        "name": scenario.name,
        "steps": n_steps,
        "duration": scenario.duration,
        "distance": sim.distance,
        "joints_crossed": counts.get(EV_JOINT_TRANSITION, 0),
        "min_margin": min(s.margin for s in trajectory),
        "max_moving_torque_fraction": max(s.moving_torque_fraction for s in trajectory),
        "max_steering_torque_fraction": max(s.steering_torque_fraction for s in trajectory),
        "event_counts": counts,
        "final": trajectory[-1].to_dict(),
    }
    return RunResult(trajectory, events, summary)


def traversability_report(structure: StructureModel, params: RobotParams,
                          tuning: SimTuning | None = None) -> SizingReport:
    """Static feasibility of every patch and joint for the given robot."""
    tun = tuning or SimTuning()
    report = SizingReport()
    for patch in structure.patches:
        if patch.is_cylinder:
            report.checks.append(SizingCheck(
                requirement="tube_diameter", case=f"patch:{patch.id}",
                formula="2R >= 0.150 m", theoretical=0.150, safety_factor=1.0,
                required=0.150, available=2 * patch.radius))
        report.checks.append(SizingCheck(
            requirement="patch_width", case=f"patch:{patch.id}",
            formula="width >= 0.100 m", theoretical=0.100, safety_factor=1.0,
            required=0.100, available=patch.width))
    P = params.weight
    f_corner = params.magnet_force * tun.derate_corner
    for joint in structure.joints:
        label = f"joint:{joint.id}"
        req_hold = params.sf_adhesion * P * params.com_height / params.wheelbase
        report.checks.append(SizingCheck(
            requirement="adhesion", case=label, formula="sf * P * h / lever",
            theoretical=req_hold / params.sf_adhesion, safety_factor=params.sf_adhesion,
            required=req_hold, available=f_corner))
        case = CornerLoadCase(
            f_edge=f_corner, f_wall=f_corner if joint.kind == "internal" else 0.0,
            weight=P, label=label)
        theo = required_moving_torque(params.wheel_radius, case, params.friction_k, 1.0)
        report.checks.append(SizingCheck(
            requirement="moving_torque", case=label,
            formula="sf * r * (F_edge + (F_wall + P) / k)",
            theoretical=theo, safety_factor=params.sf_torque,
            required=params.sf_torque * theo, available=params.motor_torque))
        theo = required_steering_torque(params.wheel_radius, params.inter_wheel_force,
                                        0.0, P, params.friction_k, 1.0)
        report.checks.append(SizingCheck(
            requirement="steering_torque", case=label,
            formula="sf * r * (F_12 + (F_load + P) / k)",
            theoretical=theo, safety_factor=params.sf_torque,
            required=params.sf_torque * theo, available=params.servo_torque))
    return report


# ---------------------------------------------------------------------------
# scenario files and trajectory export

SCENARIO_SCHEMA_VERSION = 1


def scenario_from_dict(data: dict, base_dir: Path | None = None) -> Scenario:
    if data.get("version", SCENARIO_SCHEMA_VERSION) != SCENARIO_SCHEMA_VERSION:
        raise ScenarioError([f"unsupported scenario schema version {data.get('version')}"])
    struct_field = data["structure"]
    if isinstance(struct_field, str):
        path = Path(struct_field)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        structure = load_structure(path)
    else:
        structure = structure_from_dict(struct_field)
    params = RobotParams(**(data.get("params") or {}))
    tuning = SimTuning(**(data.get("tuning") or {}))
    ip = data["initial_pose"]
    pose = SurfacePose(str(ip["patch"]), float(ip["u"]), float(ip["v"]),
                       float(ip.get("heading", 0.0)))
    commands = []
    for row in data.get("commands", []) or []:
        commands.append(CommandRow(
            t=float(row["t"]),
            delta_front=float(row.get("delta_front", 0.0)),
            delta_back=float(row.get("delta_back", 0.0)),
            v_back=float(row.get("v_back", 0.0)),
            v_front=None if row.get("v_front") is None else float(row["v_front"]),
        ))
    return Scenario(
        structure=structure, params=params, initial_pose=pose, commands=commands,
        dt=float(data.get("dt", 0.02)), duration=float(data.get("duration", 5.0)),
        pose_noise_sigma=float(data.get("pose_noise_sigma", 0.0)),
        seed=int(data.get("seed", 0)), name=str(data.get("name", "")), tuning=tuning)


def load_scenario(path) -> Scenario:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    return scenario_from_dict(data, base_dir=path.parent)


def scenario_to_dict(scenario: Scenario) -> dict:
    """Self-contained scenario dict (structure inlined); inverse of
    scenario_from_dict for replay logs."""
    from dataclasses import asdict
    from .geometry import structure_to_dict

    return {
        "version": SCENARIO_SCHEMA_VERSION,
        "name": scenario.name,
        "structure": structure_to_dict(scenario.structure),
        "params": asdict(scenario.params),
        "tuning": asdict(scenario.tuning),
        "initial_pose": {"patch": scenario.initial_pose.patch, "u": scenario.initial_pose.u,
                         "v": scenario.initial_pose.v, "heading": scenario.initial_pose.heading},
        "dt": scenario.dt,
        "duration": scenario.duration,
        "pose_noise_sigma": scenario.pose_noise_sigma,
        "seed": scenario.seed,
        "commands": [
            {"t": r.t, "delta_front": r.delta_front, "delta_back": r.delta_back,
             "v_back": r.v_back, "v_front": r.v_front}
            for r in scenario.commands
        ],
    }


def export_trajectory_csv(trajectory, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,patch,u,v,heading,roll,margin\n")
        for s in trajectory:
            fh.write(f"{s.time!r},{s.pose.patch},{s.pose.u!r},{s.pose.v!r},"
                     f"{s.pose.heading!r},{s.roll!r},{s.margin!r}\n")


def export_trajectory_jsonl(trajectory, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in trajectory:
            fh.write(json.dumps(s.to_dict()) + "\n")


def export_events_jsonl(events, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in events:
            fh.write(json.dumps(e.to_dict()) + "\n")
