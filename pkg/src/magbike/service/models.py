"""Request/response models of the REST surface.

Bulk inputs and outputs (scenarios, logs, depth frames, result files) are
addressed by server-local paths: the CLI runs the app in-process by default,
so the paths resolve on the same filesystem.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class WorstCaseModel(BaseModel):
    f_edge: float = Field(ge=0)
    f_wall: float = Field(ge=0)
    weight: float = Field(ge=0)
    label: str = ""


class SizeRequest(BaseModel):
    params: dict = Field(default_factory=dict)
    worst_cases: list[WorstCaseModel] = Field(default_factory=list)
    structure_path: Optional[str] = None   # adds a traversability section
    out_path: Optional[str] = None         # writes the JSON report server-side


class SizeResponse(BaseModel):
    report: dict
    text: str
    traversability: Optional[dict] = None
    output_files: list[str] = Field(default_factory=list)


class ValidateStructureRequest(BaseModel):
    structure_path: Optional[str] = None
    structure: Optional[dict] = None


class IssueModel(BaseModel):
    code: str
    subject: str
    message: str


class ValidateStructureResponse(BaseModel):
    issues: list[IssueModel]
    ok: bool


class SimulateRequest(BaseModel):
    scenario_path: str
    out_dir: Optional[str] = None
    formats: list[Literal["csv", "jsonl"]] = Field(default_factory=lambda: ["csv", "jsonl"])
    export_poses: bool = False
    pose_noise_sigma: Optional[float] = None
    seed: Optional[int] = None


class SimulateResponse(BaseModel):
    summary: dict
    trajectory_hash: str
    output_files: list[str] = Field(default_factory=list)


class InspectRequest(BaseModel):
    poses_path: str
    detections_path: str
    intrinsics_path: str
    depth_dir: Optional[str] = None
    depth_synthetic_structure: Optional[str] = None
    out_dir: Optional[str] = None
    merge_radius: float = 0.05
    max_skew: float = 0.05
    min_confidence: float = 0.0


class InspectResponse(BaseModel):
    marker_count: int
    dropped: dict
    markers: list[dict]
    output_files: list[str] = Field(default_factory=list)


class ReplayRequest(BaseModel):
    log_path: str
    out_dir: Optional[str] = None


class ReplayResponse(BaseModel):
    steps: int
    trajectory_hash: str
    recorded_hash: Optional[str]
    match: Optional[bool]
    output_files: list[str] = Field(default_factory=list)


class StateResponse(BaseModel):
    step: int
    time: float
    trajectory_hash: str
    paused: bool
    sessions: int
