"""Developable-surface structure models.

Steel structures are represented as graphs of developable patches (planes and
cylinders) glued along straight joint edges.  Every patch chart is oriented so
that (du tangent, dv tangent, outward normal) is a right-handed triple; this
keeps headings and turn directions consistent when poses move across patches
or get unrolled into the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import yaml

ORTHO_TOL = 1e-9
EDGE_MATCH_TOL = 1e-6
MIN_TUBE_DIAMETER = 0.150   # smallest climbable outer diameter, m
MIN_PATCH_WIDTH = 0.100     # smallest maneuverable patch width, m

PLANE = "plane"
CYLINDER_OUTER = "cylinder-outer"
CYLINDER_INNER = "cylinder-inner"
PATCH_KINDS = (PLANE, CYLINDER_OUTER, CYLINDER_INNER)

SIDES = ("u_min", "u_max", "v_min", "v_max")


class StructureError(ValueError):
    """Malformed model: unresolved references, duplicate ids, bad fields."""


class GeometryDomainError(ValueError):
    """Input outside an operation's geometric domain."""


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise GeometryDomainError("zero-length vector")
    return v / n


@dataclass(frozen=True)
class Frame:
    """Right-handed orthonormal frame: origin plus axes ex, ey, ez."""

    origin: np.ndarray
    ex: np.ndarray
    ey: np.ndarray
    ez: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        for name in ("ex", "ey", "ez"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        for a, b in (("ex", "ey"), ("ey", "ez"), ("ex", "ez")):
            if abs(getattr(self, a) @ getattr(self, b)) > ORTHO_TOL:
                raise StructureError(f"frame axes {a},{b} not orthogonal")
        for name in ("ex", "ey", "ez"):
            if abs(np.linalg.norm(getattr(self, name)) - 1.0) > ORTHO_TOL:
                raise StructureError(f"frame axis {name} not unit length")
        if np.linalg.norm(np.cross(self.ex, self.ey) - self.ez) > 1e-8:
            raise StructureError("frame is not right-handed (ez != ex x ey)")

    @staticmethod
    def from_two_axes(origin, ex, ey) -> "Frame":
        ex = _unit(ex)
        ey = _unit(ey)
        return Frame(np.asarray(origin, float), ex, ey, np.cross(ex, ey))


@dataclass(frozen=True)
class Bounds:
    """Parameter rectangle: u in meters, v in meters (plane) or radians (cylinder)."""

    u: tuple[float, float]
    v: tuple[float, float]

    def __post_init__(self):
        if not (self.u[1] > self.u[0] and self.v[1] > self.v[0]):
            raise StructureError("degenerate bounds (non-positive area)")

    def contains(self, u: float, v: float, tol: float = 1e-9) -> bool:
        return (self.u[0] - tol <= u <= self.u[1] + tol
                and self.v[0] - tol <= v <= self.v[1] + tol)


class Development:
    """Arc-length-preserving map between patch parameters and plane coordinates.

    x equals u directly; y is v scaled by the patch's arc factor (1 for planes,
    the radius for cylinders).  Forward and inverse are exact.
    """

    def __init__(self, scale_v: float):
        self.scale_v = float(scale_v)

    def to_plane(self, u, v):
        return float(u), float(v) * self.scale_v

    def to_surface(self, x, y):
        return float(x), float(y) / self.scale_v


@dataclass(frozen=True)
class SurfacePatch:
    """One developable patch: a bounded plane or cylinder chart.

    For cylinders u runs along the axis (m) and v is the sweep angle (rad).
    The angular sweep direction differs between outer and inner charts so that
    the (du, dv, outward normal) triple stays right-handed for every kind.
    """

    id: str
    kind: str
    frame: Frame
    bounds: Bounds
    radius: float | None = None

    def __post_init__(self):
        if self.kind not in PATCH_KINDS:
            raise StructureError(f"unknown patch kind {self.kind!r}")
        if self.is_cylinder:
            if self.radius is None or self.radius <= 0:
                raise StructureError(f"patch {self.id}: cylinder needs radius > 0")
        elif self.radius is not None:
            raise StructureError(f"patch {self.id}: plane must not define a radius")

    @property
    def is_cylinder(self) -> bool:
        return self.kind in (CYLINDER_OUTER, CYLINDER_INNER)

    @property
    def _sweep(self) -> np.ndarray:
        # third axis of the angular sweep; sign keeps charts right-handed
        return -self.frame.ez if self.kind == CYLINDER_OUTER else self.frame.ez

    def _radial(self, v: float) -> np.ndarray:
        return math.cos(v) * self.frame.ey + math.sin(v) * self._sweep

    def point(self, u: float, v: float) -> np.ndarray:
        if self.kind == PLANE:
            return self.frame.origin + u * self.frame.ex + v * self.frame.ey
        return self.frame.origin + u * self.frame.ex + self.radius * self._radial(v)

    def normal(self, u: float, v: float) -> np.ndarray:
        if self.kind == PLANE:
            return self.frame.ez.copy()
        r = self._radial(v)
        return r if self.kind == CYLINDER_OUTER else -r

    def tangents(self, u: float, v: float) -> tuple[np.ndarray, np.ndarray]:
        """Unit tangents along u and v; (t_u, t_v, normal) is right-handed."""
        if self.kind == PLANE:
            return self.frame.ex.copy(), self.frame.ey.copy()
        t_v = -math.sin(v) * self.frame.ey + math.cos(v) * self._sweep
        return self.frame.ex.copy(), t_v

    def params_from_point(self, p, wrap_into_bounds: bool = True) -> tuple[float, float]:
        """Invert point(); for cylinders v is shifted by 2*pi*k into bounds."""
        d = np.asarray(p, float) - self.frame.origin
        u = float(d @ self.frame.ex)
        if self.kind == PLANE:
            return u, float(d @ self.frame.ey)
        q = d - u * self.frame.ex
        v = math.atan2(q @ self._sweep, q @ self.frame.ey)
        if wrap_into_bounds and not (self.bounds.v[0] <= v <= self.bounds.v[1]):
            k_lo = math.ceil((self.bounds.v[0] - v) / (2 * math.pi))
            cand = v + 2 * math.pi * k_lo
            if cand <= self.bounds.v[1] + 1e-12:
                v = cand
        return u, v

    def develop(self) -> Development:
        return Development(1.0 if self.kind == PLANE else self.radius)

    @property
    def extent_u(self) -> float:
        return self.bounds.u[1] - self.bounds.u[0]

    @property
    def extent_v(self) -> float:
        s = 1.0 if self.kind == PLANE else self.radius
        return s * (self.bounds.v[1] - self.bounds.v[0])

    @property
    def width(self) -> float:
        return min(self.extent_u, self.extent_v)

    def contains(self, u: float, v: float, tol: float = 1e-9) -> bool:
        return self.bounds.contains(u, v, tol)


def point_and_normal(patch: SurfacePatch, uv) -> tuple[np.ndarray, np.ndarray]:
    """Surface point and outward unit normal at parameters (u, v).

    Outward means away from the steel: off-axis for outer cylinders, toward
    the axis for inner ones, along the frame normal for planes.
    """
    u, v = float(uv[0]), float(uv[1])
    if not patch.contains(u, v):
        raise GeometryDomainError(
            f"({u}, {v}) outside bounds of patch {patch.id}")
    return patch.point(u, v), patch.normal(u, v)


def develop(patch: SurfacePatch) -> Development:
    """Isometry between patch parameters and developed-plane coordinates."""
    return patch.develop()


@dataclass(frozen=True)
class EdgeRef:
    """One side of a joint: patch id, boundary side, span in the running parameter."""

    patch: str
    side: str
    span: tuple[float, float] | None = None

    def __post_init__(self):
        if self.side not in SIDES:
            raise StructureError(f"unknown boundary side {self.side!r}")


@dataclass(frozen=True)
class JointEdge:
    """Shared straight edge between two patches.

    The dihedral is measured through the robot's side of the fold: flat
    continuation is pi, an internal (concave) corner is below pi, an external
    (convex) corner above.
    """

    a: EdgeRef
    b: EdgeRef
    dihedral: float
    kind: str
    id: str = ""

    def __post_init__(self):
        if self.kind not in ("internal", "external"):
            raise StructureError(f"joint kind must be internal|external, got {self.kind!r}")
        if not (0.0 < self.dihedral < 2 * math.pi):
            raise StructureError("dihedral must lie in (0, 2*pi)")
        if self.kind == "internal" and self.dihedral > math.pi + 1e-9:
            raise StructureError("internal joint requires dihedral <= pi")
        if self.kind == "external" and self.dihedral < math.pi - 1e-9:
            raise StructureError("external joint requires dihedral >= pi")


@dataclass(frozen=True)
class SurfacePose:
    """Pose on a patch: parameters plus heading in the tangent plane.

    Heading 0 points along +u; positive headings turn counterclockwise as seen
    from the outward normal.
    """

    patch: str
    u: float
    v: float
    heading: float


class _EdgeChart:
    """Developed-plane description of one patch side of a joint."""

    def __init__(self, patch: SurfacePatch, ref: EdgeRef):
        self.patch = patch
        self.ref = ref
        dev = patch.develop()
        s = dev.scale_v
        u0, u1 = patch.bounds.u
        v0, v1 = patch.bounds.v
        if ref.side in ("u_min", "u_max"):
            span = ref.span if ref.span is not None else (v0, v1)
            x = u0 if ref.side == "u_min" else u1
            self.origin = np.array([x, s * span[0]])
            self.direction = np.array([0.0, 1.0])
            self.inward = np.array([1.0, 0.0]) if ref.side == "u_min" else np.array([-1.0, 0.0])
            self.length = s * (span[1] - span[0])
            self._param = lambda lam: (x, span[0] + lam / s)
        else:
            span = ref.span if ref.span is not None else (u0, u1)
            y = s * (v0 if ref.side == "v_min" else v1)
            self.origin = np.array([span[0], y])
            self.direction = np.array([1.0, 0.0])
            self.inward = np.array([0.0, 1.0]) if ref.side == "v_min" else np.array([0.0, -1.0])
            self.length = span[1] - span[0]
            self._param = lambda lam, y=y: (span[0] + lam, (v0 if ref.side == "v_min" else v1))
        if self.length <= 0:
            raise StructureError(f"joint span on patch {patch.id} has no length")

    def point3d(self, lam: float) -> np.ndarray:
        u, v = self._param(lam)
        return self.patch.point(u, v)

    def into_patch_3d(self, lam: float) -> np.ndarray:
        """3D unit tangent pointing from the edge into the patch interior."""
        u, v = self._param(lam)
        t_u, t_v = self.patch.tangents(u, v)
        return {"u_min": t_u, "u_max": -t_u, "v_min": t_v, "v_max": -t_v}[self.ref.side]

    def lambda_of(self, dev_xy) -> float:
        return float((np.asarray(dev_xy) - self.origin) @ self.direction)

    def offset_of(self, dev_xy) -> float:
        """Signed transverse offset; positive into the patch interior."""
        d = np.asarray(dev_xy) - self.origin
        return float(d @ self.inward)


@dataclass
class _PlanarMotion:
    """Proper rigid motion of the developed plane: p -> R(angle) p + t."""

    angle: float
    t: np.ndarray

    def apply(self, xy) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        x, y = float(xy[0]), float(xy[1])
        return np.array([c * x - s * y + self.t[0], s * x + c * y + self.t[1]])


class JointGeometry:
    """Resolved joint: edge charts on both patches plus the unfold maps."""

    def __init__(self, joint: JointEdge, patch_a: SurfacePatch, patch_b: SurfacePatch):
        self.joint = joint
        self.a = _EdgeChart(patch_a, joint.a)
        self.b = _EdgeChart(patch_b, joint.b)
        self.issues: list[str] = []
        if abs(self.a.length - self.b.length) > EDGE_MATCH_TOL:
            self.issues.append(
                f"edge segments differ in length ({self.a.length:.6f} vs {self.b.length:.6f} m)")
            self.reversed = False
        else:
            a0 = self.a.point3d(0.0)
            if np.linalg.norm(a0 - self.b.point3d(0.0)) <= EDGE_MATCH_TOL:
                self.reversed = False
            elif np.linalg.norm(a0 - self.b.point3d(self.b.length)) <= EDGE_MATCH_TOL:
                self.reversed = True
            else:
                self.issues.append("edge segments do not coincide in 3D")
                self.reversed = False
        if not self.issues:
            mid = self.a.length / 2
            if np.linalg.norm(self.a.point3d(mid) - self.b.point3d(self._mu(mid))) > EDGE_MATCH_TOL:
                self.issues.append("edge segments do not coincide in 3D")
        if not self.issues:
            self._check_dihedral()
            self.ab = self._build_unfold(self.a, self.b, self.reversed)
            self.ba = self._build_unfold(self.b, self.a, self.reversed)

    def _mu(self, lam: float) -> float:
        return self.b.length - lam if self.reversed else lam

    def _check_dihedral(self):
        mid = self.a.length / 2
        w_a = self.a.into_patch_3d(mid)
        w_b = self.b.into_patch_3d(self._mu(mid))
        u_mid, v_mid = self.a._param(mid)
        n_a = self.a.patch.normal(u_mid, v_mid)
        geo = math.atan2(float(w_b @ n_a), float(w_b @ w_a)) % (2 * math.pi)
        if abs(geo - self.joint.dihedral) > 1e-6 and abs(geo - self.joint.dihedral - 2 * math.pi) > 1e-6:
            self.issues.append(
                f"declared dihedral {self.joint.dihedral:.6f} does not match geometry {geo:.6f}")

    @staticmethod
    def _build_unfold(src: _EdgeChart, dst: _EdgeChart, reverse: bool) -> _PlanarMotion:
        # map src edge frame (direction, outward) onto dst (direction', inward)
        d_src = src.direction
        out_src = -src.inward
        d_dst = -dst.direction if reverse else dst.direction
        in_dst = dst.inward
        ang_src = math.atan2(out_src[1], out_src[0])
        ang_dst = math.atan2(in_dst[1], in_dst[0])
        cross_src = d_src[0] * out_src[1] - d_src[1] * out_src[0]
        cross_dst = d_dst[0] * in_dst[1] - d_dst[1] * in_dst[0]
        if cross_src * cross_dst < 0:
            raise StructureError("joint connects charts of inconsistent orientation")
        angle = ang_dst - ang_src
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        dst_anchor = dst.origin + dst.length * dst.direction if reverse else dst.origin
        t = dst_anchor - rot @ src.origin
        return _PlanarMotion(angle, t)


@dataclass
class ValidationIssue:
    code: str
    subject: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.subject}: {self.message}"


class StructureModel:
    """Patch graph with resolved joints; the world a robot climbs on."""

    def __init__(self, patches: list[SurfacePatch], joints: list[JointEdge],
                 frame_tag: str = "world", name: str = ""):
        self.patches = list(patches)
        self.joints = []
        self.frame_tag = frame_tag
        self.name = name
        self._by_id: dict[str, SurfacePatch] = {}
        for p in self.patches:
            if p.id in self._by_id:
                raise StructureError(f"duplicate patch id {p.id!r}")
            self._by_id[p.id] = p
        self._geometry: list[JointGeometry] = []
        for i, j in enumerate(joints):
            jid = j.id or f"joint{i}"
            j = JointEdge(a=j.a, b=j.b, dihedral=j.dihedral, kind=j.kind, id=jid)
            for ref in (j.a, j.b):
                if ref.patch not in self._by_id:
                    raise StructureError(
                        f"joint {jid} references unknown patch {ref.patch!r}")
            self.joints.append(j)
            self._geometry.append(JointGeometry(j, self._by_id[j.a.patch], self._by_id[j.b.patch]))

    def patch(self, pid: str) -> SurfacePatch:
        try:
            return self._by_id[pid]
        except KeyError:
            raise StructureError(f"unknown patch id {pid!r}") from None

    def joint_geometry(self, joint_id: str) -> JointGeometry:
        for g in self._geometry:
            if g.joint.id == joint_id:
                return g
        raise StructureError(f"unknown joint id {joint_id!r}")

    def exits(self, patch_id: str):
        """(joint, edge chart, unfold map, destination patch) per side of a patch."""
        out = []
        for g in self._geometry:
            if g.issues:
                continue
            if g.joint.a.patch == patch_id:
                out.append((g.joint, g.a, g.ab, self.patch(g.joint.b.patch)))
            if g.joint.b.patch == patch_id:
                out.append((g.joint, g.b, g.ba, self.patch(g.joint.a.patch)))
        return out

    def validate(self) -> list[ValidationIssue]:
        issues: list[ValidationIssue] = []
        for p in self.patches:
            if p.is_cylinder and 2 * p.radius < MIN_TUBE_DIAMETER - 1e-12:
                issues.append(ValidationIssue(
                    "diameter_below_min", p.id,
                    f"cylinder diameter {2 * p.radius * 1000:.0f}mm is below the "
                    f"{MIN_TUBE_DIAMETER * 1000:.0f}mm minimum diameter"))
            if p.width < MIN_PATCH_WIDTH - 1e-12:
                issues.append(ValidationIssue(
                    "width_below_min", p.id,
                    f"patch width {p.width * 1000:.0f}mm is below the "
                    f"{MIN_PATCH_WIDTH * 1000:.0f}mm maneuver width"))
        for g in self._geometry:
            for msg in g.issues:
                issues.append(ValidationIssue("dangling_joint", g.joint.id, msg))
        if len(self.patches) > 1:
            seen = {self.patches[0].id}
            frontier = [self.patches[0].id]
            while frontier:
                pid = frontier.pop()
                for g in self._geometry:
                    for here, there in ((g.joint.a.patch, g.joint.b.patch),
                                        (g.joint.b.patch, g.joint.a.patch)):
                        if here == pid and there not in seen:
                            seen.add(there)
                            frontier.append(there)
            for p in self.patches:
                if p.id not in seen:
                    issues.append(ValidationIssue(
                        "disconnected", p.id, "patch is not reachable through any joint"))
        return issues


def validate_structure(model: StructureModel) -> list[ValidationIssue]:
    """Spec-level checks: climbable diameters, maneuver widths, joint health."""
    return model.validate()


def cross_joint(model: StructureModel, pose: SurfacePose, joint: JointEdge) -> SurfacePose:
    """Re-express a pose sitting on a joint edge on the adjacent patch.

    The 3D point is preserved; the heading keeps its decomposition in the
    shared edge frame (component along the edge unchanged).
    """
    geo = model.joint_geometry(joint.id or "")
    if geo.issues:
        raise StructureError(f"joint {joint.id} is not well formed: {geo.issues}")
    if pose.patch == joint.a.patch:
        chart, motion, dst = geo.a, geo.ab, model.patch(joint.b.patch)
    elif pose.patch == joint.b.patch:
        chart, motion, dst = geo.b, geo.ba, model.patch(joint.a.patch)
    else:
        raise GeometryDomainError(f"pose patch {pose.patch} is not part of joint {joint.id}")
    src = model.patch(pose.patch)
    dev = src.develop()
    xy = np.array(dev.to_plane(pose.u, pose.v))
    lam = chart.lambda_of(xy)
    if abs(chart.offset_of(xy)) > EDGE_MATCH_TOL or not (-EDGE_MATCH_TOL <= lam <= chart.length + EDGE_MATCH_TOL):
        raise GeometryDomainError("pose does not lie on the joint's boundary segment")
    new_xy = motion.apply(xy)
    u2, v2 = dst.develop().to_surface(new_xy[0], new_xy[1])
    return SurfacePose(dst.id, u2, v2, _wrap_angle(pose.heading + motion.angle))


def _wrap_angle(a: float) -> float:
    return math.atan2(math.sin(a), math.cos(a))


# ---------------------------------------------------------------------------
# structure files (YAML; lengths in meters, angles in radians)

STRUCTURE_SCHEMA_VERSION = 1


def structure_to_dict(model: StructureModel) -> dict:
    out = {"version": STRUCTURE_SCHEMA_VERSION, "frame": model.frame_tag, "patches": [], "joints": []}
    if model.name:
        out["name"] = model.name
    for p in model.patches:
        d = {
            "id": p.id,
            "kind": p.kind,
            "origin": [float(x) for x in p.frame.origin],
            "bounds": {"u": [p.bounds.u[0], p.bounds.u[1]], "v": [p.bounds.v[0], p.bounds.v[1]]},
        }
        if p.kind == PLANE:
            d["axes"] = {"u": [float(x) for x in p.frame.ex], "v": [float(x) for x in p.frame.ey]}
        else:
            d["axes"] = {"axis": [float(x) for x in p.frame.ex], "ref": [float(x) for x in p.frame.ey]}
            d["radius"] = float(p.radius)
        out["patches"].append(d)
    for j in model.joints:
        out["joints"].append({
            "id": j.id,
            "a": _edge_ref_to_dict(j.a),
            "b": _edge_ref_to_dict(j.b),
            "dihedral": float(j.dihedral),
            "kind": j.kind,
        })
    return out


def _edge_ref_to_dict(ref: EdgeRef) -> dict:
    d = {"patch": ref.patch, "side": ref.side}
    if ref.span is not None:
        d["span"] = [ref.span[0], ref.span[1]]
    return d


def _edge_ref_from_dict(d: dict) -> EdgeRef:
    span = tuple(float(x) for x in d["span"]) if "span" in d and d["span"] is not None else None
    return EdgeRef(patch=str(d["patch"]), side=str(d["side"]), span=span)


def structure_from_dict(data: dict) -> StructureModel:
    if not isinstance(data, dict) or "patches" not in data:
        raise StructureError("structure file must contain a 'patches' list")
    version = data.get("version", STRUCTURE_SCHEMA_VERSION)
    if version != STRUCTURE_SCHEMA_VERSION:
        raise StructureError(f"unsupported structure schema version {version}")
    patches = []
    for pd in data["patches"]:
        kind = str(pd["kind"])
        axes = pd.get("axes", {})
        if kind == PLANE:
            frame = Frame.from_two_axes(pd["origin"], axes["u"], axes["v"])
        else:
            frame = Frame.from_two_axes(pd["origin"], axes["axis"], axes["ref"])
        patches.append(SurfacePatch(
            id=str(pd["id"]), kind=kind, frame=frame,
            bounds=Bounds(u=tuple(float(x) for x in pd["bounds"]["u"]),
                          v=tuple(float(x) for x in pd["bounds"]["v"])),
            radius=float(pd["radius"]) if "radius" in pd else None,
        ))
    joints = []
    for i, jd in enumerate(data.get("joints", []) or []):
        joints.append(JointEdge(
            a=_edge_ref_from_dict(jd["a"]), b=_edge_ref_from_dict(jd["b"]),
            dihedral=float(jd["dihedral"]), kind=str(jd["kind"]),
            id=str(jd.get("id") or f"joint{i}"),
        ))
    return StructureModel(patches, joints,
                          frame_tag=str(data.get("frame", "world")),
                          name=str(data.get("name", "")))


def load_structure(path) -> StructureModel:
    with open(path, "r", encoding="utf-8") as fh:
        return structure_from_dict(yaml.safe_load(fh))


def save_structure(model: StructureModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(structure_to_dict(model), fh, sort_keys=False)
