"""Adhesion and actuator sizing for the climbing robot.

The three sizing rules used here follow the robot's design analysis verbatim:

* minimum holding force of the far wheel when the near wheel loses grip at a
  corner:  F_hold * lever > weight * com_height (safety factor 5);
* minimum wheel-motor torque when pinched in a concave corner:
  M > r * (F_edge + (F_wall + P) / k) (safety factor 2);
* minimum steering-servo torque under wheel load:
  M > r * (F_coupling + (F_wheel + P) / k) (safety factor 2).

Note the friction terms divide by the friction coefficient k rather than
multiplying by it.  That is how the source analysis states them; it is
dimensionally odd for Coulomb friction but is kept verbatim on purpose.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict, replace

import numpy as np

GRAVITY = 9.81  # m/s^2

KGCM_TO_NM = 0.01 * GRAVITY  # 1 kg*cm on a lever arm of 1 cm


class StaticsDomainError(ValueError):
    """Physically meaningless input (non-positive lever, friction, ...)."""


@dataclass(frozen=True)
class RobotParams:
    """Masses, geometry and actuator limits of the robot.

    Defaults reproduce the prototype: 1 kg body plus 0.6 kg payload,
    150x80x70 mm envelope, 100 kg*cm wheel motors and 32 kg*cm steering
    servos.  friction_k (silicone on steel), magnet_force and wheel_radius
    are assumptions, not measured values; override them per deployment.
    """

    mass: float = 1.0                 # kg, without payload
    payload: float = 0.6              # kg
    wheel_radius: float = 0.03        # m (assumed; consistent with 70 mm height)
    wheelbase: float = 0.11           # m, contact-to-contact at straight pose
    wheel_gap: float = 0.04           # m, clearance between the two wheels
    com_height: float = 0.035         # m, center of mass above the contact line
    friction_k: float = 0.6           # static, silicone on steel (assumed)
    magnet_force: float = 90.0        # N per wheel on flat thick steel (assumed)
    inter_wheel_force: float = 5.0    # N, magnetic coupling of one wheel on the other
    motor_torque: float = 100 * KGCM_TO_NM   # 9.81 N*m
    servo_torque: float = 32 * KGCM_TO_NM    # 3.1392 N*m
    sf_adhesion: float = 5.0
    sf_torque: float = 2.0

    def __post_init__(self):
        for name in ("mass", "wheel_radius", "wheelbase", "wheel_gap", "com_height",
                     "magnet_force", "inter_wheel_force", "motor_torque", "servo_torque"):
            if getattr(self, name) <= 0:
                raise StaticsDomainError(f"{name} must be positive")
        if self.payload < 0:
            raise StaticsDomainError("payload must be >= 0")
        if not (0.0 < self.friction_k <= 2.0):
            raise StaticsDomainError("friction_k must lie in (0, 2]")
        if self.sf_adhesion < 1.0 or self.sf_torque < 1.0:
            raise StaticsDomainError("safety factors must be >= 1")

    @property
    def weight(self) -> float:
        """Total weight P in newtons."""
        return (self.mass + self.payload) * GRAVITY

    def with_overrides(self, **kwargs) -> "RobotParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class CornerLoadCase:
    """Wheel loads while pinched in a concave corner.

    f_edge is the adhesion of the leading wheel on the surface it is leaving,
    f_wall the grab of the surface it is entering; weight is the full robot
    weight in newtons.
    """

    f_edge: float
    f_wall: float
    weight: float
    label: str = ""

    def __post_init__(self):
        if self.f_edge < 0 or self.f_wall < 0 or self.weight < 0:
            raise StaticsDomainError("corner load case forces must be >= 0")


@dataclass(frozen=True)
class Contact:
    point: np.ndarray
    adhesion: float
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, float))
        object.__setattr__(self, "normal", np.asarray(self.normal, float))
        if self.adhesion < 0:
            raise StaticsDomainError("adhesion must be >= 0")


@dataclass(frozen=True)
class ContactSet:
    contacts: tuple[Contact, ...]
    com: np.ndarray
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "contacts", tuple(self.contacts))
        object.__setattr__(self, "com", np.asarray(self.com, float))
        if len(self.contacts) < 1:
            raise StaticsDomainError("a contact set needs at least one contact")
        if self.weight < 0:
            raise StaticsDomainError("weight must be >= 0")


def required_adhesion(weight: float, com_height: float, lever: float, sf: float) -> float:
    """Minimum wheel holding force at the corner-hit configuration.

    Moment balance about the gripping contact: the far wheel's adhesion on the
    lever arm must beat the weight on the com-height arm, times safety factor.
    """
    if lever <= 0:
        raise StaticsDomainError("lever must be positive")
    if weight < 0 or com_height < 0:
        raise StaticsDomainError("weight and com_height must be >= 0")
    return sf * (weight * com_height / lever)


def required_moving_torque(wheel_radius: float, case: CornerLoadCase,
                           friction_k: float, sf: float) -> float:
    """Minimum wheel-motor torque to drive through a concave corner."""
    if wheel_radius <= 0:
        raise StaticsDomainError("wheel_radius must be positive")
    if friction_k <= 0:
        raise StaticsDomainError("friction_k must be positive")
    return sf * (wheel_radius * (case.f_edge + (case.f_wall + case.weight) / friction_k))


def required_steering_torque(wheel_radius: float, inter_wheel_force: float,
                             wheel_load: float, weight: float,
                             friction_k: float, sf: float) -> float:
    """Minimum steering-servo torque to pivot a loaded wheel in place."""
    if wheel_radius <= 0:
        raise StaticsDomainError("wheel_radius must be positive")
    if friction_k <= 0:
        raise StaticsDomainError("friction_k must be positive")
    return sf * (wheel_radius * (inter_wheel_force + (wheel_load + weight) / friction_k))


def tip_over_margin(contact_set: ContactSet) -> float:
    """Ratio of restoring adhesion moment to overturning weight moment.

    For every contact taken as the tipping pivot, the other contacts restore
    with moment magnitude F_j * |(X_j - X_i) x n_j| while the worst-case
    gravity direction overturns with P * |com - X_i|; the margin is the
    minimum ratio over pivots.  In the classic two-contact corner-hit
    geometry (com at distance h from the pivot, normals perpendicular to the
    contact line) this reduces exactly to F * lever / (P * h).  Margins above
    1 are statically stable; operational safety wants the adhesion safety
    factor on top.
    """
    contacts = contact_set.contacts
    if len(contacts) == 1:
        return 0.0
    for i in range(len(contacts)):
        for j in range(i + 1, len(contacts)):
            if np.linalg.norm(contacts[i].point - contacts[j].point) < 1e-12:
                raise StaticsDomainError("coincident contact points")
    margins = []
    for i, pivot in enumerate(contacts):
        restoring = 0.0
        for j, other in enumerate(contacts):
            if j == i:
                continue
            arm = other.point - pivot.point
            restoring += other.adhesion * np.linalg.norm(np.cross(arm, other.normal))
        overturning = contact_set.weight * np.linalg.norm(contact_set.com - pivot.point)
        if overturning < 1e-15:
            margins.append(math.inf)
        else:
            margins.append(restoring / overturning)
    return min(margins)


def corner_hit_margin(holding_force: float, lever: float,
                      weight: float, com_height: float) -> float:
    """Tip-over margin of the canonical corner-hit configuration.

    One wheel at a corner with degraded grip, the other holding at distance
    `lever`, center of mass `com_height` off the pivot.  Equals
    tip_over_margin of that two-contact geometry and is the per-step fall-risk
    measure used by the simulator.
    """
    if lever <= 0 or com_height < 0:
        raise StaticsDomainError("lever must be positive and com_height >= 0")
    if weight <= 0 or com_height == 0:
        return math.inf
    return holding_force * lever / (weight * com_height)


@dataclass
class SizingCheck:
    requirement: str
    case: str
    formula: str
    theoretical: float
    safety_factor: float
    required: float
    available: float

    @property
    def ok(self) -> bool:
        return self.required <= self.available

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.ok
        return d


@dataclass
class SizingReport:
    checks: list[SizingCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {"checks": [c.to_dict() for c in self.checks], "pass": self.ok}

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_text(self) -> str:
        lines = []
        header = f"{'requirement':<18} {'case':<16} {'required':>10} {'available':>10}  result"
        lines.append(header)
        lines.append("-" * len(header))
        for c in self.checks:
            lines.append(f"{c.requirement:<18} {c.case:<16} {c.required:>10.4f} "
                         f"{c.available:>10.4f}  {'PASS' if c.ok else 'FAIL'}")
        lines.append(f"overall: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


FORMULA_ADHESION = "sf * P * h / lever"
FORMULA_MOVING = "sf * r * (F_edge + (F_wall + P) / k)"
FORMULA_STEERING = "sf * r * (F_12 + (F_load + P) / k)"


def actuator_feasibility(params: RobotParams,
                         worst_cases: list[CornerLoadCase] | None = None) -> SizingReport:
    """Sizing report: adhesion / moving torque / steering torque, required vs available.

    Always includes nominal flat-surface checks with zero external wheel loads;
    each worst-case corner load adds a moving-torque and steering-torque row.
    """
    P = params.weight
    report = SizingReport()

    theo = required_adhesion(P, params.com_height, params.wheelbase, 1.0)
    report.checks.append(SizingCheck(
        requirement="adhesion", case="corner-hit", formula=FORMULA_ADHESION,
        theoretical=theo, safety_factor=params.sf_adhesion,
        required=params.sf_adhesion * theo, available=params.magnet_force))

    nominal = CornerLoadCase(0.0, 0.0, P, label="nominal-flat")
    theo = required_moving_torque(params.wheel_radius, nominal, params.friction_k, 1.0)
    report.checks.append(SizingCheck(
        requirement="moving_torque", case="nominal-flat", formula=FORMULA_MOVING,
        theoretical=theo, safety_factor=params.sf_torque,
        required=params.sf_torque * theo, available=params.motor_torque))

    theo = required_steering_torque(params.wheel_radius, 0.0, 0.0, P, params.friction_k, 1.0)
    report.checks.append(SizingCheck(
        requirement="steering_torque", case="nominal-flat", formula=FORMULA_STEERING,
        theoretical=theo, safety_factor=params.sf_torque,
        required=params.sf_torque * theo, available=params.servo_torque))

    for idx, case in enumerate(worst_cases or []):
        label = case.label or f"case{idx}"
        theo = required_moving_torque(params.wheel_radius, case, params.friction_k, 1.0)
        report.checks.append(SizingCheck(
            requirement="moving_torque", case=label, formula=FORMULA_MOVING,
            theoretical=theo, safety_factor=params.sf_torque,
            required=params.sf_torque * theo, available=params.motor_torque))
        theo = required_steering_torque(params.wheel_radius, params.inter_wheel_force,
                                        case.f_edge, case.weight, params.friction_k, 1.0)
        report.checks.append(SizingCheck(
            requirement="steering_torque", case=label, formula=FORMULA_STEERING,
            theoretical=theo, safety_factor=params.sf_torque,
            required=params.sf_torque * theo, available=params.servo_torque))
    return report
