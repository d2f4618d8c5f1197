"""Data records flowing through the inspection pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .transforms import RigidTransform


class RecordError(ValueError):
    pass


@dataclass(frozen=True)
class PoseSample:
    """Camera pose in the tracker-origin frame at time t."""

    t: float
    position: np.ndarray
    quaternion: tuple[float, float, float, float]  # (qx, qy, qz, qw)

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, float))
        q = np.asarray(self.quaternion, float)
        if abs(np.linalg.norm(q) - 1.0) > 1e-9:
            raise RecordError("pose quaternion must be unit length within 1e-9")
        object.__setattr__(self, "quaternion", tuple(q))

    def transform(self) -> RigidTransform:
        return RigidTransform.from_quat_pos(self.quaternion, self.position)


@dataclass(frozen=True)
class DetectionRecord:
    """One detector bounding box on a color frame."""

    t: float
    bbox: tuple[float, float, float, float]  # (u_min, v_min, u_max, v_max)
    confidence: float
    label: str = "rust"

    def __post_init__(self):
        u0, v0, u1, v1 = self.bbox
        if not (u0 < u1 and v0 < v1):
            raise RecordError("bbox min must be below max on both axes")
        if u0 < 0 or v0 < 0:
            raise RecordError("bbox must not be negative")
        if not (0.0 <= self.confidence <= 1.0):
            raise RecordError("confidence must lie in [0, 1]")

    @property
    def center(self) -> tuple[float, float]:
        u0, v0, u1, v1 = self.bbox
        return ((u0 + u1) / 2, (v0 + v1) / 2)


@dataclass(frozen=True)
class RustMarker:
    """World-frame cluster of defect detections."""

    center: np.ndarray
    radius: float
    support: int
    mean_confidence: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, float))
        if self.support < 1:
            raise RecordError("marker support must be >= 1")
        if self.radius <= 0:
            raise RecordError("marker radius must be positive")

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "radius": self.radius,
                "support": self.support, "mean_confidence": self.mean_confidence}


@dataclass
class InspectionMap:
    """Markers plus the robot path, everything in the world frame."""

    markers: list[RustMarker]
    path: np.ndarray                      # (N, 3) world positions
    alignment: RigidTransform             # world <- tracker-origin
    dropped: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "markers": [m.to_dict() for m in self.markers],
            "path": np.asarray(self.path, float).tolist(),
            "alignment": self.alignment.to_dict(),
            "dropped": dict(self.dropped),
        }
