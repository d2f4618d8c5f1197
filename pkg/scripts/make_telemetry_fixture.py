#!/usr/bin/env python3
"""Record a telemetry stream fixture for the console's render tests.

Steps the internal-corner scenario through the teleoperation service and
writes every telemetry frame as one encoded JSON line, exactly as a client
would receive them at 20 Hz.
"""

from pathlib import Path

from magbike import protocol as proto
from magbike.config import ServiceConfig
from magbike.service.session import TeleopService
from magbike.simulator import CommandRow, load_scenario

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "frontend" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    scenario = load_scenario(ROOT / "data" / "scenarios" / "corner_internal.yaml")
    service = TeleopService(scenario, ServiceConfig(telemetry_rate_hz=20.0))
    session, _ = service.register(proto.HelloMessage(role="observer"))
    service.pending_command = CommandRow(t=0.0, v_back=0.1)
    frames = []
    for step in range(750):
        if step == 470:  # stop before the far wall edge; tail frames sit parked
            service.pending_command = CommandRow(t=step * scenario.dt)
        service.step_once()
        while not session.queue.empty():
            msg = session.queue.get_nowait()
            if msg.type == "telemetry":
                frames.append(proto.encode(msg))
    path = OUT / "telemetry.jsonl"
    path.write_text("\n".join(frames) + "\n", encoding="utf-8")
    n_events = sum(1 for f in frames if '"events":[{' in f)
    print(f"wrote {len(frames)} telemetry frames ({n_events} carrying events) to {path}")


if __name__ == "__main__":
    main()
