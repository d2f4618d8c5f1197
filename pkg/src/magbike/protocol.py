"""Wire protocol of the teleoperation service.

JSON text frames over a WebSocket; every frame carries a `type` field in
{hello, command, control, telemetry, event, ack, error}.  Command angles are
in degrees (operator units); telemetry angles are radians like everywhere
else in the toolkit.
"""

from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field, TypeAdapter, model_validator

PROTOCOL_VERSION = 1


class HelloMessage(BaseModel):
    type: Literal["hello"] = "hello"
    version: int = PROTOCOL_VERSION
    role: Literal["driver", "observer"] = "observer"
    client: str = ""
    # server reply fields
    granted_role: Optional[str] = None
    session: Optional[str] = None
    scenario: Optional[str] = None
    telemetry_rate_hz: Optional[float] = None


class CommandMessage(BaseModel):
    """Operator steering command; applied at the next simulator step."""

    type: Literal["command"] = "command"
    seq: int = Field(ge=0)
    mode: Literal[1, 2] = 1
    delta_front_deg: float = Field(default=0.0, ge=-90.0, le=90.0)
    delta_back_deg: float = Field(default=0.0, ge=-90.0, le=90.0)
    v_back: float = 0.0
    v_front: Optional[float] = None

    @model_validator(mode="after")
    def _mode_consistency(self):
        if self.mode == 1 and self.delta_front_deg != 0.0 and self.delta_back_deg != 0.0:
            raise ValueError("mode 1 drives a single steering actuator; "
                             "one of delta_front_deg/delta_back_deg must stay 0")
        return self


class ControlMessage(BaseModel):
    type: Literal["control"] = "control"
    action: Literal["pause", "resume", "reset"]


class TelemetryPose(BaseModel):
    patch: str
    u: float
    v: float
    heading: float
    roll: float
    world: tuple[float, float, float]


class TelemetrySteering(BaseModel):
    front: float   # rad
    back: float    # rad


class EventMessage(BaseModel):
    type: Literal["event"] = "event"
    time: float
    kind: str
    payload: dict = Field(default_factory=dict)


class TelemetryMessage(BaseModel):
    type: Literal["telemetry"] = "telemetry"
    time: float
    step: int
    pose: TelemetryPose
    steering: TelemetrySteering
    margin: float
    moving_torque_fraction: float
    steering_torque_fraction: float
    events: list[EventMessage] = Field(default_factory=list)
    marker_count: int = 0
    paused: bool = False


class AckMessage(BaseModel):
    type: Literal["ack"] = "ack"
    seq: Optional[int] = None
    action: Optional[str] = None


class ErrorMessage(BaseModel):
    type: Literal["error"] = "error"
    code: str
    message: str
    field: Optional[str] = None
    seq: Optional[int] = None


WireMessage = Annotated[
    Union[HelloMessage, CommandMessage, ControlMessage, TelemetryMessage,
          EventMessage, AckMessage, ErrorMessage],
    Field(discriminator="type"),
]

_adapter: TypeAdapter = TypeAdapter(WireMessage)


def encode(message: BaseModel) -> str:
    return message.model_dump_json()


def decode(text: str | bytes):
    return _adapter.validate_json(text)
