#!/usr/bin/env python3
"""Regenerate the shipped inspection demo logs (data/inspect_demo).

Runs the internal-corner scenario, plants rust squares on both patches,
synthesizes detections through the color-threshold detector and writes the
pose log, detection log and intrinsics the `magbike inspect` example uses.
"""

from pathlib import Path

from magbike.inspection import CameraIntrinsics
from magbike.inspection import io as iio
from magbike.inspection import synthetic as syn
from magbike.simulator import load_scenario, run_scenario

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "data" / "inspect_demo"


def main():
    scenario = load_scenario(ROOT / "data" / "scenarios" / "corner_internal.yaml")
    result = run_scenario(scenario)
    k = CameraIntrinsics(fx=215.2, fy=215.2, cx=212.0, cy=120.0, width=424, height=240)
    model = scenario.structure
    floor, wall = model.patch("floor"), model.patch("wall")
    plants = [
        syn.plant_on_patch(floor, 0.24, 0.15), syn.plant_on_patch(floor, 0.32, 0.38),
        syn.plant_on_patch(floor, 0.40, 0.15), syn.plant_on_patch(floor, 0.48, 0.38),
        syn.plant_on_patch(floor, 0.56, 0.15), syn.plant_on_patch(wall, 0.08, 0.38),
        syn.plant_on_patch(wall, 0.14, 0.15), syn.plant_on_patch(wall, 0.22, 0.38),
        syn.plant_on_patch(wall, 0.30, 0.15), syn.plant_on_patch(wall, 0.38, 0.38),
    ]
    walk = syn.synthesize_walkthrough(result.trajectory, model, plants, k, frame_stride=5)
    OUT.mkdir(parents=True, exist_ok=True)
    iio.save_pose_log(walk.poses, OUT / "poses.jsonl")
    iio.save_detection_log(walk.detections, OUT / "detections.jsonl")
    k.save(OUT / "intrinsics.json")
    print(f"wrote {len(walk.poses)} poses, {len(walk.detections)} detections to {OUT}")


if __name__ == "__main__":
    main()
