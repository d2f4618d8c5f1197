"""Radius-linkage clustering of world-frame detection points."""

from __future__ import annotations

import numpy as np

from .records import RustMarker

MIN_MARKER_RADIUS = 0.01  # m, floor so single detections render visibly


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def aggregate(points, merge_radius: float) -> list[RustMarker]:
    """Cluster (point, confidence) pairs into rust markers.

    Two points belong to the same marker when they are connected through the
    pairwise graph of distances <= merge_radius (single linkage).  Connectivity
    makes the partition independent of input order; points are additionally
    sorted lexicographically so marker ordering is deterministic too.
    """
    if merge_radius <= 0:
        raise ValueError("merge_radius must be positive")
    pts = [(np.asarray(p, float), float(c)) for p, c in points]
    if not pts:
        return []
    order = sorted(range(len(pts)), key=lambda i: tuple(pts[i][0]))
    coords = np.array([pts[i][0] for i in order])
    confs = np.array([pts[i][1] for i in order])
    n = len(coords)
    uf = _UnionFind(n)
    d2 = ((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2)
    r2 = merge_radius * merge_radius
    for i in range(n):
        for j in range(i + 1, n):
            if d2[i, j] <= r2:
                uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    markers = []
    for root in sorted(groups, key=lambda r: tuple(coords[min(groups[r])])):
        members = groups[root]
        sub = coords[members]
        center = sub.mean(axis=0)
        radius = max(MIN_MARKER_RADIUS, float(np.linalg.norm(sub - center, axis=1).max()))
        markers.append(RustMarker(center=center, radius=radius, support=len(members),
                                  mean_confidence=float(confs[members].mean())))
    return markers
