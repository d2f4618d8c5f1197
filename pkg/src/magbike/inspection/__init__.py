"""Inspection pipeline: deprojection, mapping and export of rust detections."""

from .camera import CameraIntrinsics, InvalidDepthError, deproject, project
from .clustering import aggregate
from .pipeline import (
    Deprojection, DepthSource, PipelineConfig, UnsynchronizedError,
    build_map, detection_to_world,
)
from .records import DetectionRecord, InspectionMap, PoseSample, RustMarker
from .rust_stub import RustThresholds, detect_rust_stub
from .transforms import RigidTransform, matrix_to_quat, quat_to_matrix

__all__ = [
    "CameraIntrinsics", "InvalidDepthError", "deproject", "project",
    "aggregate", "Deprojection", "DepthSource", "PipelineConfig",
    "UnsynchronizedError", "build_map", "detection_to_world",
    "DetectionRecord", "InspectionMap", "PoseSample", "RustMarker",
    "RustThresholds", "detect_rust_stub",
    "RigidTransform", "matrix_to_quat", "quat_to_matrix",
]
