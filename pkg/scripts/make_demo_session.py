#!/usr/bin/env python3
"""Record the shipped demo session log (data/sessions/demo.jsonl).

Drives the teleoperation service synchronously through a short straight run
with one steering change, exactly as a live driver session would, so the
shipped log replays bit-identically.
"""

import math
from pathlib import Path

from magbike.config import ServiceConfig
from magbike.service.session import TeleopService
from magbike.simulator import CommandRow, load_scenario

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "data" / "sessions"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    scenario = load_scenario(ROOT / "data" / "scenarios" / "straight_line.yaml")
    service = TeleopService(scenario, ServiceConfig(record_path=str(OUT / "demo.jsonl")))
    service.pending_command = CommandRow(t=0.0, v_back=0.1)
    for _ in range(100):
        service.step_once()
    service.pending_command = CommandRow(t=2.0, delta_front=math.radians(20), v_back=0.08)
    for _ in range(100):
        service.step_once()
    service.pending_command = CommandRow(t=4.0)
    for _ in range(25):
        service.step_once()
    service.stop()
    print(f"recorded {service.step_index} steps, hash {service.trajectory_hash}")


if __name__ == "__main__":
    main()
