"""File formats for the inspection pipeline.

Pose logs: CSV with header ``t,x,y,z,qx,qy,qz,qw`` or JSONL with the same
keys.  Detection logs: JSONL per record.  Depth frames: 16-bit single-channel
PNGs in millimeters, one file per frame named by the frame time in
microseconds.  Maps: JSON plus an ASCII PLY point cloud for external viewers.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from PIL import Image

from ..geometry import StructureModel
from .records import DetectionRecord, InspectionMap, PoseSample, RustMarker
from .transforms import RigidTransform

POSE_CSV_HEADER = "t,x,y,z,qx,qy,qz,qw"


def save_pose_log(samples: list[PoseSample], path) -> None:
    path = Path(path)
    if path.suffix == ".csv":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(POSE_CSV_HEADER + "\n")
            for s in samples:
                row = [s.t, *(float(c) for c in s.position), *(float(c) for c in s.quaternion)]
                fh.write(",".join(repr(float(c)) for c in row) + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            for s in samples:
                x, y, z = (float(c) for c in s.position)
                qx, qy, qz, qw = (float(c) for c in s.quaternion)
                fh.write(json.dumps({"t": s.t, "x": x, "y": y, "z": z,
                                     "qx": qx, "qy": qy, "qz": qz, "qw": qw}) + "\n")


def load_pose_log(path) -> list[PoseSample]:
    path = Path(path)
    samples = []
    if path.suffix == ".csv":
        lines = path.read_text(encoding="utf-8").splitlines()
        if not lines or lines[0].strip() != POSE_CSV_HEADER:
            raise ValueError(f"pose CSV must start with header {POSE_CSV_HEADER!r}")
        for line in lines[1:]:
            if not line.strip():
                continue
            t, x, y, z, qx, qy, qz, qw = (float(tok) for tok in line.split(","))
            samples.append(PoseSample(t=t, position=(x, y, z), quaternion=(qx, qy, qz, qw)))
    else:
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            d = json.loads(line)
            samples.append(PoseSample(t=float(d["t"]),
                                      position=(d["x"], d["y"], d["z"]),
                                      quaternion=(d["qx"], d["qy"], d["qz"], d["qw"])))
    return samples


def save_detection_log(records: list[DetectionRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps({"t": r.t, "bbox": list(r.bbox),
                                 "confidence": r.confidence, "label": r.label}) + "\n")


def load_detection_log(path) -> list[DetectionRecord]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        d = json.loads(line)
        records.append(DetectionRecord(t=float(d["t"]), bbox=tuple(d["bbox"]),
                                       confidence=float(d.get("confidence", 1.0)),
                                       label=str(d.get("label", "rust"))))
    return records


# -- depth frame directories -------------------------------------------------

def depth_frame_name(t: float) -> str:
    return f"{int(round(t * 1e6)):012d}.png"


def save_depth_png(depth_m: np.ndarray, path) -> None:
    mm = np.clip(np.nan_to_num(depth_m, nan=0.0) * 1000.0, 0, 65535).astype(np.uint16)
    Image.fromarray(mm).save(path)


def load_depth_png(path) -> np.ndarray:
    img = np.asarray(Image.open(path), dtype=np.uint16)
    return img.astype(float) / 1000.0


class DepthImageDirectory:
    """DepthSource over a directory of 16-bit millimeter PNG frames."""

    def __init__(self, directory, max_skew: float = 0.05):
        self.directory = Path(directory)
        self.max_skew = max_skew
        self._times = []
        self._files = {}
        for f in sorted(self.directory.glob("*.png")):
            try:
                t = int(f.stem) / 1e6
            except ValueError:
                continue
            self._times.append(t)
            self._files[t] = f
        if not self._times:
            raise FileNotFoundError(f"no depth frames in {self.directory}")
        self._times = np.array(self._times)
        self._cache: tuple[float, np.ndarray] | None = None

    def sample(self, t: float, u: float, v: float) -> float:
        nearest = float(self._times[int(np.argmin(np.abs(self._times - t)))])
        if abs(nearest - t) > self.max_skew:
            return 0.0
        if self._cache is None or self._cache[0] != nearest:
            self._cache = (nearest, load_depth_png(self._files[nearest]))
        img = self._cache[1]
        ui, vi = int(round(u)), int(round(v))
        if not (0 <= vi < img.shape[0] and 0 <= ui < img.shape[1]):
            return 0.0
        return float(img[vi, ui])


# -- map export ----------------------------------------------------------------

def save_map_json(imap: InspectionMap, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(imap.to_dict(), fh, indent=2)


def load_map_json(path) -> InspectionMap:
    with open(path, "r", encoding="utf-8") as fh:
        d = json.load(fh)
    markers = [RustMarker(center=np.array(m["center"]), radius=float(m["radius"]),
                          support=int(m["support"]),
                          mean_confidence=float(m["mean_confidence"]))
               for m in d["markers"]]
    return InspectionMap(markers=markers, path=np.array(d["path"], float),
                         alignment=RigidTransform.from_dict(d["alignment"]),
                         dropped={k: int(v) for k, v in d.get("dropped", {}).items()})


MARKER_RGB = (40, 220, 60)
PATH_RGB = (255, 255, 255)
STRUCTURE_RGB = (128, 128, 128)


def _sphere_points(center, radius, n=26):
    pts = [np.asarray(center, float)]
    golden = math.pi * (3 - math.sqrt(5))
    for i in range(n - 1):
        y = 1 - 2 * (i + 0.5) / (n - 1)
        r = math.sqrt(max(0.0, 1 - y * y))
        th = golden * i
        pts.append(center + radius * np.array([r * math.cos(th), y, r * math.sin(th)]))
    return pts


def save_map_ply(imap: InspectionMap, path, structure: StructureModel | None = None,
                 structure_step: float = 0.02) -> None:
    """ASCII PLY: structure samples in gray, the path in white, markers as
    green sphere point clusters."""
    vertices: list[tuple[np.ndarray, tuple[int, int, int]]] = []
    if structure is not None:
        for patch in structure.patches:
            nu = max(2, int(patch.extent_u / structure_step) + 1)
            nv = max(2, int(patch.extent_v / structure_step) + 1)
            for u in np.linspace(patch.bounds.u[0], patch.bounds.u[1], nu):
                for v in np.linspace(patch.bounds.v[0], patch.bounds.v[1], nv):
                    vertices.append((patch.point(float(u), float(v)), STRUCTURE_RGB))
    for p in np.asarray(imap.path, float):
        vertices.append((p, PATH_RGB))
    for m in imap.markers:
        for p in _sphere_points(m.center, m.radius):
            vertices.append((p, MARKER_RGB))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(vertices)}\n")
        fh.write("property float x\nproperty float y\nproperty float z\n")
        fh.write("property uchar red\nproperty uchar green\nproperty uchar blue\n")
        fh.write("end_header\n")
        for p, (r, g, b) in vertices:
            fh.write(f"{p[0]:.6f} {p[1]:.6f} {p[2]:.6f} {r} {g} {b}\n")
