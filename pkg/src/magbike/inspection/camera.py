"""Pinhole camera model: intrinsics, deprojection and projection."""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np


class InvalidDepthError(ValueError):
    pass


class CameraError(ValueError):
    pass


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise CameraError("focal lengths must be positive")
        if not (0 < self.cx < self.width and 0 < self.cy < self.height):
            raise CameraError("principal point must lie inside the image")

    def contains(self, u, v) -> bool:
        return bool(np.all((np.asarray(u) >= 0) & (np.asarray(u) <= self.width - 1)
                           & (np.asarray(v) >= 0) & (np.asarray(v) <= self.height - 1)))

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "CameraIntrinsics":
        return CameraIntrinsics(fx=float(d["fx"]), fy=float(d["fy"]),
                                cx=float(d["cx"]), cy=float(d["cy"]),
                                width=int(d["width"]), height=int(d["height"]))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @staticmethod
    def load(path) -> "CameraIntrinsics":
        with open(path, "r", encoding="utf-8") as fh:
            return CameraIntrinsics.from_dict(json.load(fh))


def deproject(pixel, depth, k: CameraIntrinsics) -> np.ndarray:
    """Pixel plus depth to a camera-frame point (z forward, x right, y down).

    Accepts scalars or arrays; pixel is (u, v) or an (N, 2) array, depth a
    scalar or length-N array of metric z values.
    """
    px = np.asarray(pixel, float)
    z = np.asarray(depth, float)
    if np.any(z <= 0):
        raise InvalidDepthError("depth must be positive")
    u, v = (px[..., 0], px[..., 1]) if px.ndim > 1 else (px[0], px[1])
    x = (u - k.cx) * z / k.fx
    y = (v - k.cy) * z / k.fy
    return np.stack([x, y, z], axis=-1) if px.ndim > 1 else np.array([x, y, z])


def project(point, k: CameraIntrinsics) -> np.ndarray:
    """Camera-frame point to pixel coordinates (u, v)."""
    p = np.asarray(point, float)
    z = p[..., 2]
    if np.any(z <= 0):
        raise InvalidDepthError("cannot project points at or behind the camera")
    u = k.fx * p[..., 0] / z + k.cx
    v = k.fy * p[..., 1] / z + k.cy
    return np.stack([u, v], axis=-1)
