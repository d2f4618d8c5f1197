"""Dual-steering bicycle kinematics.

Body frame convention: back wheel contact at the origin, front wheel contact
at (wheelbase, 0), +x along the body axis.  Steering angles are zero when a
wheel rolls along the body axis and positive counterclockwise as seen from the
surface normal.  Twists describe the velocity of the body center (midpoint
between the contacts) plus the yaw rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geometry import SurfacePatch, SurfacePose

PARALLEL_TOL = 1e-12
PIVOT_TOL = 1e-12
DT_MAX = 0.05

ICR_ROTATION = "rotation"
ICR_TRANSLATION = "translation"
ICR_STRAIGHT = "straight"


class KinematicsDomainError(ValueError):
    pass


class SlipError(ValueError):
    """No slip-free twist exists for the commanded speeds."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class SteeringState:
    delta_front: float = 0.0
    delta_back: float = 0.0

    def __post_init__(self):
        for name in ("delta_front", "delta_back"):
            if abs(getattr(self, name)) > math.pi / 2 + 1e-12:
                raise KinematicsDomainError(f"{name} outside [-pi/2, pi/2]")


@dataclass(frozen=True)
class WheelCommand:
    """Signed rolling speeds; v_front None lets the kinematics pick the
    consistent front speed."""

    v_back: float = 0.0
    v_front: float | None = None


@dataclass(frozen=True)
class BodyTwist:
    vx: float
    vy: float
    omega: float

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.vx, self.vy, self.omega)):
            raise KinematicsDomainError("twist components must be finite")


@dataclass(frozen=True)
class FreeJointState:
    roll: float = 0.0


class ICRResult(NamedTuple):
    kind: str
    center: tuple[float, float] | None      # rotation only
    direction: tuple[float, float] | None   # translation / straight


def icr(steer: SteeringState, wheelbase: float) -> ICRResult:
    """Instantaneous center of rotation of the two-wheel system.

    Axle lines run through each contact perpendicular to that wheel's rolling
    direction.  Non-parallel axles intersect at the ICR; equal steering
    angles give a pure translation along the shared rolling direction, which
    degenerates to straight-line motion when the wheels roll along the body
    axis.
    """
    if wheelbase <= 0:
        raise KinematicsDomainError("wheelbase must be positive")
    df, db = steer.delta_front, steer.delta_back
    d = math.sin(df - db)
    if abs(d) > PARALLEL_TOL:
        t = wheelbase * math.cos(df) / d
        center = (-t * math.sin(db), t * math.cos(db))
        return ICRResult(ICR_ROTATION, center, None)
    direction = (math.cos(db), math.sin(db))
    if abs(math.sin(db)) <= PARALLEL_TOL:
        return ICRResult(ICR_STRAIGHT, None, (1.0, 0.0))
    return ICRResult(ICR_TRANSLATION, None, direction)


def body_twist(steer: SteeringState, v_back: float, wheelbase: float,
               v_front: float | None = None) -> tuple[BodyTwist, float]:
    """Slip-free body twist plus the front wheel speed consistent with it.

    The back wheel speed is authoritative; the front speed is recomputed and
    callers compare it with what was commanded to detect slip.  Two special
    cases: when the back wheel sits on the ICR it must be stopped (commanding
    it is a SlipError) and the front wheel drives the pivot; when both wheels
    point sideways (|delta| = 90 deg) the wheel speeds are independent and
    opposite speeds rotate the robot about a point between the wheels.
    """
    res = icr(steer, wheelbase)
    half = wheelbase / 2

    if res.kind == ICR_ROTATION:
        cx, cy = res.center
        df, db = steer.delta_front, steer.delta_back
        rho_b = -(wheelbase * math.cos(df) / math.sin(df - db))
        if abs(rho_b) <= PIVOT_TOL:
            if abs(v_back) > 1e-12:
                raise SlipError(
                    "back wheel is the pivot and must be stopped", residual=abs(v_back))
            vf = 0.0 if v_front is None else v_front
            rho_f = ((wheelbase - cx) * -math.sin(df) + (0.0 - cy) * math.cos(df))
            omega = -vf / rho_f
            v_front_req = vf
        else:
            omega = -v_back / rho_b
            rho_f = ((wheelbase - cx) * -math.sin(df) + (0.0 - cy) * math.cos(df))
            v_front_req = -omega * rho_f
        vx = omega * cy
        vy = omega * (half - cx)
        return BodyTwist(vx, vy, omega), v_front_req

    db = steer.delta_back
    sb = math.sin(steer.delta_back)
    sf = math.sin(steer.delta_front)
    lateral = abs(abs(db) - math.pi / 2) <= 1e-12 and abs(abs(steer.delta_front) - math.pi / 2) <= 1e-12
    if lateral and v_front is not None:
        # wheel speeds are independent here; express both in the +y sense
        w_b = v_back * math.copysign(1.0, sb)
        w_f = v_front * math.copysign(1.0, sf)
        if w_f != w_b:
            omega = (w_f - w_b) / wheelbase
            vy = (w_b + w_f) / 2
            return BodyTwist(0.0, vy, omega), v_front
    dx, dy = res.direction
    twist = BodyTwist(v_back * dx, v_back * dy, 0.0)
    if lateral:
        v_front_req = v_back * math.copysign(1.0, sb) * math.copysign(1.0, sf)
    else:
        v_front_req = v_back
    return twist, v_front_req


def wheel_velocities(twist: BodyTwist, wheelbase: float):
    """Velocities of the two contact points implied by a body twist."""
    half = wheelbase / 2
    v_back = (twist.vx, twist.vy - twist.omega * half)
    v_front = (twist.vx, twist.vy + twist.omega * half)
    return v_back, v_front


class PoseStep(NamedTuple):
    pose: SurfacePose
    inside: bool


def advance_planar(x: float, y: float, heading: float,
                   twist: BodyTwist, dt: float) -> tuple[float, float, float]:
    """Exact rigid-motion exponential of a constant twist in the plane."""
    w = twist.omega
    if abs(w * dt) < 1e-12:
        c, s = math.cos(heading), math.sin(heading)
        return (x + (c * twist.vx - s * twist.vy) * dt,
                y + (s * twist.vx + c * twist.vy) * dt,
                heading + w * dt)
    sw = math.sin(w * dt) / w
    cw = (1.0 - math.cos(w * dt)) / w
    bx = sw * twist.vx - cw * twist.vy
    by = cw * twist.vx + sw * twist.vy
    c, s = math.cos(heading), math.sin(heading)
    return (x + c * bx - s * by, y + s * bx + c * by, heading + w * dt)


def integrate_pose(pose: SurfacePose, patch: SurfacePatch,
                   twist: BodyTwist, dt: float) -> PoseStep:
    """Advance a surface pose by the exact arc of a constant twist.

    Integration happens in the developed plane, so motion on cylinders is
    exact (constant twists trace helices).  A pose that ends up outside the
    patch bounds is returned as-is with inside=False; the caller decides
    whether a joint continues the motion or the boundary stops it.
    """
    if not (0.0 < dt <= DT_MAX + 1e-12):
        raise KinematicsDomainError(f"dt must lie in (0, {DT_MAX}]")
    if pose.patch != patch.id:
        raise KinematicsDomainError("pose/patch mismatch")
    dev = patch.develop()
    x, y = dev.to_plane(pose.u, pose.v)
    x2, y2, heading2 = advance_planar(x, y, pose.heading, twist, dt)
    u2, v2 = dev.to_surface(x2, y2)
    new_pose = SurfacePose(pose.patch, u2, v2, heading2)
    return PoseStep(new_pose, patch.contains(u2, v2))


class AxialPathError(ValueError):
    """Helix angle of 90 degrees: the path is an axial line, not a spiral."""


def spiral_pitch(cylinder_radius: float, helix_angle: float) -> float:
    """Axial advance per revolution when rolling at a fixed angle to the
    circumferential direction."""
    if cylinder_radius <= 0:
        raise KinematicsDomainError("cylinder_radius must be positive")
    if helix_angle < 0 or helix_angle > math.pi / 2:
        raise KinematicsDomainError("helix angle must lie in [0, pi/2)")
    if abs(helix_angle - math.pi / 2) < 1e-12:
        raise AxialPathError("helix angle of 90 degrees never completes a revolution")
    return 2 * math.pi * cylinder_radius * math.tan(helix_angle)


def free_joint_roll(normal_front, normal_back, body_axis) -> float:
    """Relative roll of the front frame that lets both wheels seat flat.

    The roll is the signed angle, about the body axis, from the back contact
    normal's projection to the front's.
    """
    axis = np.asarray(body_axis, float)
    axis = axis / np.linalg.norm(axis)
    p_b = np.asarray(normal_back, float) - (np.asarray(normal_back, float) @ axis) * axis
    p_f = np.asarray(normal_front, float) - (np.asarray(normal_front, float) @ axis) * axis
    nb, nf = np.linalg.norm(p_b), np.linalg.norm(p_f)
    if nb < 1e-9 or nf < 1e-9:
        raise KinematicsDomainError("contact normal is parallel to the body axis")
    return float(math.atan2(np.cross(p_b, p_f) @ axis, p_b @ p_f))
