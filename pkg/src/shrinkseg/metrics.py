"""Region evaluation metrics: coefficient of variation and Jaccard."""

from __future__ import annotations

import numpy as np

from .grid import Array


def _as_mask(m, name: str) -> Array:
    m = np.asarray(m)
    if m.dtype != np.bool_ or m.ndim != 2:
        raise ValueError(f"{name} must be a 2d boolean mask")
    return m


def cv(u: Array, region) -> float:
    """Population standard deviation over the mean, inside the region.

    Scale invariant by construction. A region whose mean is within
    1e-12 of zero has no well-defined variation coefficient and is
    rejected.
    """
    region = _as_mask(region, "region")
    u = np.asarray(u, dtype=np.float64)
    if u.shape != region.shape:
        raise ValueError("image and region shapes disagree")
    if not region.any():
        raise ValueError("region is empty")
    vals = u[region]
    mean = float(vals.mean())
    if abs(mean) <= 1e-12:
        raise ValueError(f"region mean {mean!r} too close to zero for cv")
    return float(vals.std()) / mean


def jaccard(s1, s2) -> float:
    """Intersection over union of two pixel masks, as a fraction."""
    s1 = _as_mask(s1, "s1")
    s2 = _as_mask(s2, "s2")
    if s1.shape != s2.shape:
        raise ValueError("mask shapes disagree")
    union = int((s1 | s2).sum())
    if union == 0:
        raise ValueError("both masks are empty")
    return int((s1 & s2).sum()) / union
