import pytest
from pydantic import ValidationError

from magbike import protocol as proto


ROUND_TRIP_CASES = [
    proto.HelloMessage(role="driver", client="console"),
    proto.HelloMessage(granted_role="observer", session="s2", scenario="corner",
                       telemetry_rate_hz=20.0),
    proto.CommandMessage(seq=3, mode=2, delta_front_deg=90.0, delta_back_deg=90.0,
                         v_back=-0.1, v_front=0.1),
    proto.CommandMessage(seq=0, mode=1, delta_front_deg=12.25, v_back=0.07),
    proto.ControlMessage(action="pause"),
    proto.TelemetryMessage(
        time=1.2345678901234567, step=61,
        pose=proto.TelemetryPose(patch="floor", u=0.1, v=0.2, heading=0.3,
                                 roll=-0.01, world=(1.0, 2.0, 3.0)),
        steering=proto.TelemetrySteering(front=0.5, back=-0.5),
        margin=17.3, moving_torque_fraction=0.16, steering_torque_fraction=0.0,
        events=[proto.EventMessage(time=1.2, kind="joint_transition",
                                   payload={"joint": "corner"})],
        marker_count=4, paused=False),
    proto.EventMessage(time=0.5, kind="fall_risk", payload={"margin": 0.3}),
    proto.AckMessage(seq=9),
    proto.AckMessage(action="reset"),
    proto.ErrorMessage(code="out_of_range", message="v_back too fast", field="v_back", seq=2),
]


@pytest.mark.parametrize("msg", ROUND_TRIP_CASES, ids=lambda m: m.type + "-" + str(id(m))[-4:])
def test_encode_decode_round_trip(msg):
    assert proto.decode(proto.encode(msg)) == msg


def test_decode_rejects_unknown_type():
    with pytest.raises(ValidationError):
        proto.decode('{"type": "mystery"}')


def test_command_angle_range_enforced():
    with pytest.raises(ValidationError):
        proto.CommandMessage(seq=1, delta_front_deg=120.0)


def test_command_mode1_single_steering():
    with pytest.raises(ValidationError):
        proto.CommandMessage(seq=1, mode=1, delta_front_deg=10.0, delta_back_deg=10.0)
    # mode 2 allows both
    proto.CommandMessage(seq=1, mode=2, delta_front_deg=10.0, delta_back_deg=10.0)


def test_command_negative_seq_rejected():
    with pytest.raises(ValidationError):
        proto.CommandMessage(seq=-1)


def test_float_precision_survives_the_wire():
    msg = proto.EventMessage(time=0.1 + 0.2, kind="x", payload={"margin": 1 / 3})
    back = proto.decode(proto.encode(msg))
    assert back.time == msg.time
    assert back.payload["margin"] == 1 / 3
