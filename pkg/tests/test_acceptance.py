"""Acceptance suite: one test per release criterion, each printing a PASS line
with the tolerance it enforced (run with -s or -rP to see them)."""

import json
import math
import signal
import socket
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from magbike import kinematics as kin
from magbike import protocol as proto
from magbike import simulator as simmod
from magbike.cli import main as cli_main
from magbike.geometry import SurfacePose
from magbike.inspection import (
    CameraIntrinsics, PipelineConfig, build_map, deproject, detection_to_world,
    project,
)
from magbike.inspection import synthetic as syn
from magbike.inspection.clustering import aggregate
from magbike.kinematics import SteeringState, body_twist, wheel_velocities
from magbike.service.session import replay_session
from magbike.simulator import load_scenario, run_scenario
from magbike.statics import (
    CornerLoadCase, RobotParams, actuator_feasibility, required_adhesion,
    required_moving_torque, required_steering_torque,
)

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"

K = CameraIntrinsics(fx=215.2, fy=215.2, cx=212.0, cy=120.0, width=424, height=240)


def _report(name, detail):
    print(f"ACCEPTANCE {name}: PASS ({detail})")


def test_acceptance_statics_formulas_match_oracle():
    rng = np.random.RandomState(1234)
    t0 = time.monotonic()
    worst = 0.0
    for _ in range(1000):
        P, h, lever = rng.uniform(0.1, 100), rng.uniform(0.001, 0.2), rng.uniform(0.02, 0.5)
        r, k = rng.uniform(0.005, 0.1), rng.uniform(0.1, 2.0)
        fe, fw, f12, fl = rng.uniform(0, 200, size=4)

        # independent oracle arithmetic, spelled out without the module helpers
        want_adh = 5.0 * (P * h) / lever
        got_adh = required_adhesion(P, h, lever, 5.0)
        want_mov = 2.0 * (r * (fe + (fw + P) / k))
        got_mov = required_moving_torque(r, CornerLoadCase(fe, fw, P), k, 2.0)
        want_st = 2.0 * (r * (f12 + (fl + P) / k))
        got_st = required_steering_torque(r, f12, fl, P, k, 2.0)
        for got, want in ((got_adh, want_adh), (got_mov, want_mov), (got_st, want_st)):
            rel = abs(got - want) / max(abs(want), 1e-300)
            worst = max(worst, rel)
            assert rel < 1e-12
        # safety factors applied exactly as multipliers
        assert got_adh == 5.0 * required_adhesion(P, h, lever, 1.0)
        assert got_mov == 2.0 * required_moving_torque(r, CornerLoadCase(fe, fw, P), k, 1.0)
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    _report("statics-formulas", f"1000 draws, worst rel err {worst:.2e}, {elapsed:.2f}s")


def test_acceptance_paper_default_feasibility(capsys):
    report = actuator_feasibility(RobotParams())
    text = report.to_text()
    print(text)
    assert report.ok
    for check in report.checks:
        assert check.required <= check.available
        assert f"{check.required:.4f}" in text and f"{check.available:.4f}" in text
    by_req = {c.requirement: c for c in report.checks}
    assert by_req["moving_torque"].available == pytest.approx(9.81, rel=1e-12)
    assert by_req["steering_torque"].available == pytest.approx(3.1392, rel=1e-12)
    _report("paper-default-feasibility",
            "1kg + 0.6kg, 100 kg*cm motors, 32 kg*cm servos: all nominal checks pass")


def test_acceptance_icr_properties():
    L = 0.11
    rng = np.random.RandomState(99)
    checked = 0
    for _ in range(1000):
        df, db = rng.uniform(-math.pi / 2, math.pi / 2, size=2)
        v = rng.uniform(-0.2, 0.2)
        try:
            twist, _ = body_twist(SteeringState(df, db), v, L)
        except kin.SlipError:
            continue
        for (vx, vy), d in ((wheel_velocities(twist, L)[0], db),
                            (wheel_velocities(twist, L)[1], df)):
            residual = abs(vx * -math.sin(d) + vy * math.cos(d))
            assert residual < 1e-9
        checked += 1
    assert checked > 950

    res = kin.icr(SteeringState(math.pi / 2, 0.0), L)
    assert res.kind == kin.ICR_ROTATION
    assert np.allclose(res.center, (0.0, 0.0), atol=1e-12)

    for deg in (15.0, 45.0, 89.0):
        d = math.radians(deg)
        twist, _ = body_twist(SteeringState(d, d), 0.15, L)
        heading = 0.7
        for _ in range(200):  # 10 s at dt 0.05
            _, _, heading = kin.advance_planar(0.0, 0.0, heading, twist, 0.05)
        assert abs(heading - 0.7) < 1e-9
    _report("icr-properties",
            f"{checked} random commands, residuals < 1e-9; pivot at back contact; "
            "parallel steering drift < 1e-9 rad over 10 s")


def test_acceptance_rotation_on_spot():
    scenario = load_scenario(DATA / "scenarios" / "rotate_on_spot.yaml")
    result = run_scenario(scenario)
    start, end = result.trajectory[0].pose, result.trajectory[-1].pose
    drift = math.hypot(end.u - start.u, end.v - start.v)
    assert abs(end.heading - start.heading) >= 2 * math.pi
    assert drift < 1e-6 * scenario.params.wheelbase
    _report("rotation-on-spot", f"2*pi revolution, center drift {drift:.2e} m "
            f"< 1e-6 * wheelbase")


def test_acceptance_spiral_pitch():
    scenario = load_scenario(DATA / "scenarios" / "spiral_tube.yaml")
    result = run_scenario(scenario)
    settled = [s for s in result.trajectory if s.time >= 0.5]
    first, last = settled[0], settled[-1]
    revolutions = (last.pose.v - first.pose.v) / (2 * math.pi)
    assert abs(revolutions) > 1.0
    pitch = abs(last.pose.u - first.pose.u) / abs(revolutions)
    want = 2 * math.pi * 0.0755 * math.tan(math.radians(30))
    rel = abs(pitch - want) / want
    assert rel < 1e-6
    _report("spiral-pitch", f"R=0.0755 m, delta=30 deg: measured {pitch:.6f} m vs "
            f"2*pi*R*tan(delta)={want:.6f} m, rel err {rel:.2e}")


@pytest.mark.parametrize("name", ["corner_internal", "corner_external"])
def test_acceptance_corner_scenarios(name):
    t0 = time.monotonic()
    scenario = load_scenario(DATA / "scenarios" / f"{name}.yaml")
    result = run_scenario(scenario)
    kinds = [e.kind for e in result.events]
    assert kinds[-1] == simmod.EV_COMPLETED
    assert simmod.EV_JOINT_TRANSITION in kinds
    assert simmod.EV_FALL_RISK not in kinds

    reduced = load_scenario(DATA / "scenarios" / f"{name}.yaml")
    f_min = reduced.params.weight * reduced.params.com_height / reduced.params.wheelbase
    reduced.params = reduced.params.with_overrides(magnet_force=f_min)
    result2 = run_scenario(reduced)
    falls = [e for e in result2.events if e.kind == simmod.EV_FALL_RISK]
    assert len(falls) >= 1
    assert falls[0].payload["margin"] == pytest.approx(1.0, rel=1e-9)
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    _report(f"corner-{name}", f"clean at defaults, {len(falls)} fall_risk events at "
            f"the theoretical-minimum magnet force (margin 1 < sf 5), {elapsed:.2f}s")


def test_acceptance_deprojection_round_trip():
    us = np.linspace(0, K.width - 1, 100)
    vs = np.linspace(0, K.height - 1, 100)
    uu, vv = np.meshgrid(us, vs)
    pixels = np.stack([uu.ravel(), vv.ravel()], axis=1)  # 10^4 pixels
    worst = 0.0
    for z in np.linspace(0.1, 10.0, 10):
        pts = deproject(pixels, np.full(len(pixels), z), K)
        back = project(pts, K)
        worst = max(worst, float(np.max(np.abs(back - pixels))))
    assert worst < 1e-9

    rng = np.random.RandomState(5)
    worst_d = 0.0
    for _ in range(200):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        from magbike.inspection import RigidTransform
        chain = RigidTransform.from_quat_pos(tuple(q), rng.uniform(-2, 2, 3))
        a = deproject(rng.uniform(0, (K.width - 1, K.height - 1)), rng.uniform(0.2, 5), K)
        b = deproject(rng.uniform(0, (K.width - 1, K.height - 1)), rng.uniform(0.2, 5), K)
        d = abs(np.linalg.norm(chain.apply(a) - chain.apply(b)) - np.linalg.norm(a - b))
        worst_d = max(worst_d, d)
    assert worst_d < 1e-9
    _report("deprojection", f"10^4 px x 10 depths round trip < 1e-9 px "
            f"(worst {worst:.2e}); chain distance error < 1e-9 m (worst {worst_d:.2e})")


def _planted_layout(model):
    floor, wall = model.patch("floor"), model.patch("wall")
    return [
        syn.plant_on_patch(floor, 0.24, 0.15), syn.plant_on_patch(floor, 0.32, 0.38),
        syn.plant_on_patch(floor, 0.40, 0.15), syn.plant_on_patch(floor, 0.48, 0.38),
        syn.plant_on_patch(floor, 0.56, 0.15), syn.plant_on_patch(wall, 0.08, 0.38),
        syn.plant_on_patch(wall, 0.14, 0.15), syn.plant_on_patch(wall, 0.22, 0.38),
        syn.plant_on_patch(wall, 0.30, 0.15), syn.plant_on_patch(wall, 0.38, 0.38),
    ]


def _match_fraction(imap, planted, tol):
    hits = 0
    for plant in planted:
        gt = imap.alignment.apply(plant.center)
        if imap.markers and min(np.linalg.norm(np.asarray(m.center) - gt)
                                for m in imap.markers) <= tol:
            hits += 1
    return hits / len(planted)


def _union_find_oracle(points, radius):
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(points[i] - points[j]) <= radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def test_acceptance_end_to_end_synthetic_inspection():
    t0 = time.monotonic()
    scenario = load_scenario(DATA / "scenarios" / "corner_internal.yaml")
    result = run_scenario(scenario)
    planted = _planted_layout(scenario.structure)

    # exact poses: >= 95% of plants localized within 0.02 m
    walk = syn.synthesize_walkthrough(result.trajectory, scenario.structure, planted, K,
                                      frame_stride=5)
    detections = [d for d in walk.detections if d.confidence >= 0.5]
    cfg = PipelineConfig(merge_radius=0.05)
    imap = build_map(walk.poses, detections, walk.depth, K, config=cfg)
    frac_exact = _match_fraction(imap, planted, 0.02)
    assert frac_exact >= 0.95

    # the aggregate partition equals the union-find oracle over located points
    located = []
    for det in detections:
        pose = min(walk.poses, key=lambda p: abs(p.t - det.t))
        got = detection_to_world(det, lambda u, v: walk.depth.sample(det.t, u, v),
                                 pose, imap.alignment, K, cfg)
        if got.point is not None:
            located.append((got.point, det.confidence))
    markers = aggregate(located, cfg.merge_radius)
    oracle_groups = _union_find_oracle([p for p, _ in located], cfg.merge_radius)
    assert sorted(m.support for m in markers) == sorted(len(g) for g in oracle_groups)
    pts = np.array([p for p, _ in located])
    oracle_centroids = sorted(tuple(np.round(pts[g].mean(axis=0), 9)) for g in oracle_groups)
    marker_centroids = sorted(tuple(np.round(m.center, 9)) for m in markers)
    assert oracle_centroids == marker_centroids

    # noisy poses: sigma = 0.01 m, tolerance 0.05 m
    noisy = syn.synthesize_walkthrough(result.trajectory, scenario.structure, planted, K,
                                       frame_stride=5, noise_sigma=0.01, seed=7)
    detections_n = [d for d in noisy.detections if d.confidence >= 0.5]
    imap_n = build_map(noisy.poses, detections_n, noisy.depth, K, config=cfg)
    frac_noisy = _match_fraction(imap_n, planted, 0.05)
    assert frac_noisy >= 0.95

    elapsed = time.monotonic() - t0
    assert elapsed < 30.0
    _report("synthetic-inspection",
            f"exact: {frac_exact:.0%} within 0.02 m; noisy sigma=0.01: {frac_noisy:.0%} "
            f"within 0.05 m; partition == union-find oracle; {elapsed:.1f}s")


def test_acceptance_replay_determinism():
    result, recorded, steps = replay_session(DATA / "sessions" / "demo.jsonl")
    assert recorded is not None
    assert result.trajectory_hash() == recorded
    again, _, _ = replay_session(DATA / "sessions" / "demo.jsonl")
    assert again.trajectory_hash() == recorded
    _report("replay-determinism", f"{steps} steps, hash {recorded[:16]}... identical")


def test_acceptance_cli_subcommands(tmp_path):
    assert cli_main(["size", "--params", str(DATA / "params" / "prototype.yaml"),
                     "-o", str(tmp_path / "report.json")]) == 0
    assert cli_main(["simulate", str(DATA / "scenarios" / "corner_internal.yaml"),
                     "-o", str(tmp_path / "simout")]) == 0
    assert cli_main(["inspect",
                     "--poses", str(DATA / "inspect_demo" / "poses.jsonl"),
                     "--detections", str(DATA / "inspect_demo" / "detections.jsonl"),
                     "--intrinsics", str(DATA / "inspect_demo" / "intrinsics.json"),
                     "--depth-synthetic", str(DATA / "structures" / "corner_internal.yaml"),
                     "--min-confidence", "0.5", "-o", str(tmp_path / "mapout")]) == 0
    assert cli_main(["replay", str(DATA / "sessions" / "demo.jsonl"),
                     "-o", str(tmp_path / "replayout")]) == 0

    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    proc = subprocess.Popen(
        [sys.executable, "-m", "magbike.cli", "serve",
         str(DATA / "scenarios" / "straight_line.yaml"), "--port", str(port)],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT, cwd=str(ROOT))
    try:
        deadline = time.time() + 15
        ready = False
        while time.time() < deadline:
            try:
                with socket.create_connection(("127.0.0.1", port), timeout=0.3):
                    ready = True
                    break
            except OSError:
                time.sleep(0.1)
        assert ready
    finally:
        proc.send_signal(signal.SIGINT)
        code = proc.wait(timeout=15)
    assert code == 0
    _report("cli-subcommands", "size/simulate/inspect/replay/serve all exit 0 "
            "on shipped example files")
