"""Detections plus poses plus depth into a world-frame inspection map."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Protocol

import numpy as np

from .camera import CameraIntrinsics, deproject
from .clustering import aggregate
from .records import DetectionRecord, InspectionMap, PoseSample
from .transforms import RigidTransform


class UnsynchronizedError(ValueError):
    """No pose close enough in time to a detection frame."""


class DepthSource(Protocol):
    def sample(self, t: float, u: float, v: float) -> float:
        """Metric depth at a pixel of the frame nearest to time t; <= 0 or
        NaN marks an invalid sample."""
        ...


@dataclass(frozen=True)
class PipelineConfig:
    max_skew: float = 0.050          # s, detection-to-pose time tolerance
    depth_min: float = 0.1           # m
    depth_max: float = 5.0           # m
    min_valid_samples: int = 3       # of the 5 probed pixels
    merge_radius: float = 0.05       # m


class Deprojection(NamedTuple):
    point: np.ndarray | None
    reason: str | None


REJECT_FEW_SAMPLES = "too_few_depth_samples"
REJECT_RANGE = "depth_out_of_range"
DROP_NO_POSE = "no_pose_in_skew_window"


def _depth_probe_pixels(det: DetectionRecord) -> list[tuple[float, float]]:
    u0, v0, u1, v1 = det.bbox
    cu, cv = det.center
    return [(cu, cv),
            (cu - (u1 - u0) / 4, cv), (cu + (u1 - u0) / 4, cv),
            (cu, cv - (v1 - v0) / 4), (cu, cv + (v1 - v0) / 4)]


def detection_to_world(det: DetectionRecord, depth_at: Callable[[float, float], float],
                       pose: PoseSample, alignment: RigidTransform,
                       k: CameraIntrinsics,
                       config: PipelineConfig | None = None) -> Deprojection:
    """Locate one detection in the world frame, or reject it.

    Depth is probed at the box center and four quarter points; the median of
    the valid probes is used.  The camera point is carried through the pose
    (camera -> tracker origin) and then the alignment (tracker origin ->
    world).
    """
    cfg = config or PipelineConfig()
    if abs(pose.t - det.t) > cfg.max_skew:
        raise UnsynchronizedError(
            f"pose at t={pose.t} is {abs(pose.t - det.t):.3f}s from detection t={det.t}")
    samples = []
    for (u, v) in _depth_probe_pixels(det):
        z = depth_at(u, v)
        if z is not None and np.isfinite(z) and z > 0:
            samples.append(float(z))
    if len(samples) < cfg.min_valid_samples:
        return Deprojection(None, REJECT_FEW_SAMPLES)
    z = float(np.median(samples))
    if not (cfg.depth_min <= z <= cfg.depth_max):
        return Deprojection(None, REJECT_RANGE)
    cam_point = deproject(det.center, z, k)
    world = alignment.apply(pose.transform().apply(cam_point))
    return Deprojection(np.asarray(world, float), None)


def _nearest_pose(poses: list[PoseSample], t: float) -> PoseSample:
    times = np.array([p.t for p in poses])
    return poses[int(np.argmin(np.abs(times - t)))]


def build_map(poses: list[PoseSample], detections: list[DetectionRecord],
              depth_source: DepthSource, k: CameraIntrinsics,
              alignment: RigidTransform | None = None,
              config: PipelineConfig | None = None) -> InspectionMap:
    """End-to-end mapping: associate, deproject, aggregate, trace the path.

    The world frame defaults to the first pose sample: alignment is the
    inverse of that pose's transform unless an explicit one is given.
    Detections that cannot be placed are counted per reason, never fatal.
    """
    cfg = config or PipelineConfig()
    if not poses:
        raise ValueError("empty pose stream")
    times = [p.t for p in poses]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("pose stream must be time-ordered")
    if alignment is None:
        alignment = poses[0].transform().inverse()
    dropped: dict[str, int] = {}
    located: list[tuple[np.ndarray, float]] = []
    for det in detections:
        pose = _nearest_pose(poses, det.t)
        if abs(pose.t - det.t) > cfg.max_skew:
            dropped[DROP_NO_POSE] = dropped.get(DROP_NO_POSE, 0) + 1
            continue
        result = detection_to_world(
            det, lambda u, v: depth_source.sample(det.t, u, v), pose, alignment, k, cfg)
        if result.point is None:
            dropped[result.reason] = dropped.get(result.reason, 0) + 1
        else:
            located.append((result.point, det.confidence))
    markers = aggregate(located, cfg.merge_radius)
    path = alignment.apply(np.array([p.position for p in poses]))
    return InspectionMap(markers=markers, path=path, alignment=alignment, dropped=dropped)
