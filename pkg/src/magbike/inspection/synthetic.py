"""Analytic scene synthesis for tests and demos.

Depth frames are ray-cast against the structure model instead of rendered;
color frames are flat gray with rust-colored squares painted where defects
were planted.  Camera poses ride on simulated robot states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geometry import PLANE, StructureModel, SurfacePatch
from ..simulator import RobotState
from .camera import CameraIntrinsics, project
from .records import PoseSample
from .transforms import RigidTransform, matrix_to_quat

STEEL_GRAY = (110, 112, 118)
RUST_RGB = (150, 74, 32)


def _ray_plane(origin, dirs, patch: SurfacePatch):
    n = patch.frame.ez
    denom = dirs @ n
    s = np.full(dirs.shape[0], np.nan)
    ok = np.abs(denom) > 1e-12
    s[ok] = ((patch.frame.origin - origin) @ n) / denom[ok]
    pts = origin + s[:, None] * dirs
    rel = pts - patch.frame.origin
    u = rel @ patch.frame.ex
    v = rel @ patch.frame.ey
    inside = ((u >= patch.bounds.u[0]) & (u <= patch.bounds.u[1])
              & (v >= patch.bounds.v[0]) & (v <= patch.bounds.v[1]))
    s[~inside | (s <= 0)] = np.nan
    return s


def _ray_cylinder(origin, dirs, patch: SurfacePatch):
    a = patch.frame.ex
    q = origin - patch.frame.origin
    m = q - (q @ a) * a
    w = dirs - np.outer(dirs @ a, a)
    A = (w * w).sum(axis=1)
    B = 2 * (w @ m)
    C = float(m @ m) - patch.radius ** 2
    disc = B * B - 4 * A * C
    s = np.full(dirs.shape[0], np.nan)
    ok = (disc >= 0) & (A > 1e-15)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    for sign in (-1.0, 1.0):  # near root first
        cand = np.where(ok, (-B + sign * sq) / (2 * np.maximum(A, 1e-300)), np.nan)
        pts = origin + cand[:, None] * dirs
        u = (pts - patch.frame.origin) @ a
        vs = np.full_like(cand, np.nan)
        valid = ok & np.isfinite(cand) & (cand > 0)
        if valid.any():
            rel = pts[valid] - patch.frame.origin
            axial = rel @ a
            radial = rel - np.outer(axial, a)
            sweep = patch._sweep
            v = np.arctan2(radial @ sweep, radial @ patch.frame.ey)
            lo, hi = patch.bounds.v
            two_pi = 2 * math.pi
            k = np.ceil((lo - v) / two_pi)
            v_wrapped = v + two_pi * k
            v_ok = v_wrapped <= hi + 1e-12
            u_ok = (axial >= patch.bounds.u[0]) & (axial <= patch.bounds.u[1])
            good = v_ok & u_ok
            idx = np.where(valid)[0][good]
            take = np.isnan(s[idx]) | (cand[idx] < s[idx])
            s[idx[take]] = cand[idx][take]
    return s


def ray_cast_depth(model: StructureModel, world_from_cam: RigidTransform,
                   k: CameraIntrinsics, stride: int = 1) -> np.ndarray:
    """Depth image (meters, z-depth) of the structure from a camera pose.

    Rays use unnormalized directions with unit camera z so the ray parameter
    is the z depth directly.  Pixels that miss every patch are 0.
    """
    us = np.arange(0, k.width, stride, dtype=float)
    vs = np.arange(0, k.height, stride, dtype=float)
    uu, vv = np.meshgrid(us, vs)
    dirs_cam = np.stack([(uu - k.cx) / k.fx, (vv - k.cy) / k.fy, np.ones_like(uu)], axis=-1)
    dirs = dirs_cam.reshape(-1, 3) @ world_from_cam.rotation.T
    origin = world_from_cam.translation
    depth = np.full(dirs.shape[0], np.nan)
    for patch in model.patches:
        s = _ray_plane(origin, dirs, patch) if patch.kind == PLANE else _ray_cylinder(origin, dirs, patch)
        better = np.isfinite(s) & (np.isnan(depth) | (s < depth))
        depth[better] = s[better]
    img = depth.reshape(uu.shape)
    img[np.isnan(img)] = 0.0
    if stride > 1:
        img = np.repeat(np.repeat(img, stride, axis=0), stride, axis=1)[: k.height, : k.width]
    return img


def camera_pose_on_robot(state: RobotState, model: StructureModel,
                         lift: float = 0.10, pitch_down: float = 0.5) -> RigidTransform:
    """Camera pose (camera -> world) riding on a robot state.

    The camera sits `lift` above the body center along the surface normal and
    looks along the travel direction, pitched down toward the surface.
    Camera convention: x right, y down, z forward.
    """
    back = np.array(state.contact_back.point)
    front = np.array(state.contact_front.point)
    n_b = np.array(state.contact_back.normal)
    n_f = np.array(state.contact_front.normal)
    normal = n_b + n_f
    normal /= np.linalg.norm(normal)
    forward = front - back
    forward -= (forward @ normal) * normal
    forward /= np.linalg.norm(forward)
    position = (back + front) / 2 + lift * normal
    z_cam = math.cos(pitch_down) * forward - math.sin(pitch_down) * normal
    y_cam = -(normal - (normal @ z_cam) * z_cam)
    y_cam /= np.linalg.norm(y_cam)
    x_cam = np.cross(y_cam, z_cam)
    rot = np.column_stack([x_cam, y_cam, z_cam])
    return RigidTransform(rot, position)


def pose_samples_from_trajectory(trajectory: list[RobotState], model: StructureModel,
                                 lift: float = 0.10, pitch_down: float = 0.5,
                                 noise_sigma: float = 0.0, seed: int = 0) -> list[PoseSample]:
    """Camera pose log for a simulated trajectory, optionally position-noised."""
    rng = np.random.RandomState(seed)
    samples = []
    for state in trajectory:
        tf = camera_pose_on_robot(state, model, lift, pitch_down)
        pos = tf.translation
        if noise_sigma > 0:
            pos = pos + rng.normal(0.0, noise_sigma, size=3)
        samples.append(PoseSample(t=state.time, position=pos,
                                  quaternion=matrix_to_quat(tf.rotation)))
    return samples


@dataclass(frozen=True)
class PlantedPatch:
    """Ground-truth rust square on the structure surface."""

    center: np.ndarray   # world
    size: float          # m, edge length


def plant_on_patch(patch: SurfacePatch, u: float, v: float, size: float = 0.04) -> PlantedPatch:
    return PlantedPatch(center=patch.point(u, v), size=size)


def paint_rust(image: np.ndarray, planted: PlantedPatch,
               world_from_cam: RigidTransform, k: CameraIntrinsics,
               depth: np.ndarray | None = None) -> None:
    """Paint the projection of a planted rust square into an RGB frame.

    With a depth image given, the square is only painted when the planted
    center is actually the visible surface there (no painting through walls).
    """
    cam_from_world = world_from_cam.inverse()
    p_cam = cam_from_world.apply(planted.center)
    if p_cam[2] <= 0.05:
        return
    uv = project(p_cam, k)
    u, v = float(uv[0]), float(uv[1])
    if not (0 <= u < k.width and 0 <= v < k.height):
        return
    if depth is not None:
        z_seen = depth[int(v), int(u)]
        if z_seen <= 0 or abs(z_seen - p_cam[2]) > 0.02:
            return
    half_px_u = planted.size / 2 * k.fx / p_cam[2]
    half_px_v = planted.size / 2 * k.fy / p_cam[2]
    u0, u1 = int(u - half_px_u), int(u + half_px_u)
    v0, v1 = int(v - half_px_v), int(v + half_px_v)
    if u0 < 0 or v0 < 0 or u1 > k.width - 1 or v1 > k.height - 1:
        return  # skip clipped squares; partial boxes would bias the center
    image[v0:v1 + 1, u0:u1 + 1] = RUST_RGB


def blank_frame(k: CameraIntrinsics) -> np.ndarray:
    img = np.empty((k.height, k.width, 3), dtype=np.uint8)
    img[:] = STEEL_GRAY
    return img


class SyntheticDepth:
    """DepthSource that ray-casts the structure at each requested frame time."""

    def __init__(self, model: StructureModel, poses_by_time: dict[float, RigidTransform],
                 k: CameraIntrinsics, stride: int = 2):
        self.model = model
        self.k = k
        self.stride = stride
        self._times = np.array(sorted(poses_by_time))
        self._poses = poses_by_time
        self._cache: tuple[float, np.ndarray] | None = None

    @staticmethod
    def from_pose_samples(model: StructureModel, samples: list[PoseSample],
                          k: CameraIntrinsics, stride: int = 2) -> "SyntheticDepth":
        poses = {s.t: s.transform() for s in samples}
        return SyntheticDepth(model, poses, k, stride)

    def _frame(self, t: float) -> np.ndarray:
        nearest = float(self._times[int(np.argmin(np.abs(self._times - t)))])
        if self._cache is not None and self._cache[0] == nearest:
            return self._cache[1]
        img = ray_cast_depth(self.model, self._poses[nearest], self.k, self.stride)
        self._cache = (nearest, img)
        return img

    def sample(self, t: float, u: float, v: float) -> float:
        img = self._frame(t)
        ui, vi = int(round(u)), int(round(v))
        if not (0 <= ui < self.k.width and 0 <= vi < self.k.height):
            return 0.0
        return float(img[vi, ui])


@dataclass
class Walkthrough:
    """Everything a synthetic inspection run produces."""

    poses: list[PoseSample]
    detections: list
    depth: SyntheticDepth
    planted: list[PlantedPatch]
    model: StructureModel
    intrinsics: CameraIntrinsics


def synthesize_walkthrough(trajectory: list[RobotState], model: StructureModel,
                           planted: list[PlantedPatch], k: CameraIntrinsics,
                           frame_stride: int = 5, noise_sigma: float = 0.0,
                           seed: int = 0, ray_stride: int = 2,
                           lift: float = 0.10, pitch_down: float = 0.5) -> Walkthrough:
    """Turn a simulated trajectory into pose/detection/depth streams.

    Color frames are synthesized with the planted rust squares and pushed
    through the color-threshold detector, so the produced detection log has
    the same character as live detector output.  Depth stays exact (the
    sensor measures geometry); only the pose log carries the optional noise.
    """
    from .rust_stub import detect_rust_stub

    frames = trajectory[::frame_stride]
    exact = pose_samples_from_trajectory(frames, model, lift, pitch_down)
    transforms = {s.t: s.transform() for s in exact}
    depth_source = SyntheticDepth(model, transforms, k, stride=ray_stride)
    detections = []
    for sample in exact:
        world_from_cam = transforms[sample.t]
        depth_img = depth_source._frame(sample.t)
        img = blank_frame(k)
        for plant in planted:
            paint_rust(img, plant, world_from_cam, k, depth=depth_img)
        detections.extend(detect_rust_stub(img, t=sample.t))
    poses = exact
    if noise_sigma > 0:
        rng = np.random.RandomState(seed)
        poses = [PoseSample(t=s.t, position=np.asarray(s.position) + rng.normal(0, noise_sigma, 3),
                            quaternion=s.quaternion) for s in exact]
    return Walkthrough(poses=poses, detections=detections, depth=depth_source,
                       planted=planted, model=model, intrinsics=k)
