"""Color-threshold stand-in for a trained rust detector.

Thresholds reddish-brown regions in HSV and turns connected components into
detection boxes.  It exists so the mapping pipeline runs end to end without a
neural network; swap in real detector output through the same DetectionRecord
stream when available.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .records import DetectionRecord


@dataclass(frozen=True)
class RustThresholds:
    hue_max: float = 0.13        # up to ~47 degrees: red through brown-orange
    sat_min: float = 0.35
    val_min: float = 0.10
    val_max: float = 0.95
    min_area: int = 100          # px


def _rgb_to_hsv(img: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rgb = img.astype(float) / (255.0 if img.dtype == np.uint8 else 1.0)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = rgb.max(axis=-1)
    minc = rgb.min(axis=-1)
    delta = maxc - minc
    hue = np.zeros_like(maxc)
    nz = delta > 1e-12
    rmax = nz & (maxc == r)
    gmax = nz & (maxc == g) & ~rmax
    bmax = nz & ~rmax & ~gmax
    hue[rmax] = ((g - b)[rmax] / delta[rmax]) % 6
    hue[gmax] = (b - r)[gmax] / delta[gmax] + 2
    hue[bmax] = (r - g)[bmax] / delta[bmax] + 4
    hue /= 6.0
    sat = np.where(maxc > 1e-12, delta / np.maximum(maxc, 1e-12), 0.0)
    return hue, sat, maxc


def detect_rust_stub(image: np.ndarray, t: float = 0.0,
                     thresholds: RustThresholds | None = None) -> list[DetectionRecord]:
    """Boxes around rust-colored connected components of an RGB image."""
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError("expected an (H, W, 3) RGB image")
    th = thresholds or RustThresholds()
    hue, sat, val = _rgb_to_hsv(image)
    mask = ((hue <= th.hue_max) & (sat >= th.sat_min)
            & (val >= th.val_min) & (val <= th.val_max))
    labels, count = ndimage.label(mask)
    records = []
    for idx, sl in enumerate(ndimage.find_objects(labels), start=1):
        if sl is None:
            continue
        region = labels[sl] == idx
        area = int(region.sum())
        if area < th.min_area:
            continue
        v0, v1 = sl[0].start, sl[0].stop
        u0, u1 = sl[1].start, sl[1].stop
        fill = area / float((v1 - v0) * (u1 - u0))
        records.append(DetectionRecord(
            t=t, bbox=(float(u0), float(v0), float(u1 - 1), float(v1 - 1)),
            confidence=min(1.0, fill)))
    records.sort(key=lambda r: r.bbox)
    return records
