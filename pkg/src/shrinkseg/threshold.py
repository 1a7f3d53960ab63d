"""Stage two: cluster the corrected image values and label phases.

Scalar clustering admits an exact solution: sorted values have an
optimal partition into contiguous runs, found by dynamic programming.
Thresholds sit midway between consecutive cluster means and each pixel
gets the 1-based label of the interval its value falls in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Array, as_grid


@dataclass(frozen=True)
class SegmentationResult:
    """Cluster means, the midpoint thresholds, and the label map."""

    k: int
    cluster_means: tuple[float, ...]
    thresholds: tuple[float, ...]
    labels: Array

    def __post_init__(self):
        if len(self.cluster_means) != self.k or len(self.thresholds) != self.k - 1:
            raise ValueError("means/thresholds lengths inconsistent with k")


def _prefix_moments(vals: Array, weights: Array):
    """Cumulative weight, weighted sum, and weighted square sum."""
    w = np.concatenate([[0.0], np.cumsum(weights)])
    s1 = np.concatenate([[0.0], np.cumsum(weights * vals)])
    s2 = np.concatenate([[0.0], np.cumsum(weights * vals * vals)])
    return w, s1, s2


def _fill_layer(cost_prev, w, s1, s2, lo, hi, opt_lo, opt_hi, out_cost, out_arg):
    """Fill out_cost[lo:hi] given the split argmin lies in [opt_lo, opt_hi).

    The optimal split index is nondecreasing in the right endpoint, so
    divide and conquer keeps the total work near-linear per layer.
    """
    if lo >= hi:
        return
    mid = (lo + hi) // 2
    upper = min(opt_hi, mid)
    a = np.arange(opt_lo, upper)
    seg_w = w[mid] - w[a]
    seg_cost = (s2[mid] - s2[a]) - (s1[mid] - s1[a]) ** 2 / seg_w
    total = cost_prev[a] + seg_cost
    best = int(np.argmin(total))
    out_cost[mid] = total[best]
    out_arg[mid] = opt_lo + best
    _fill_layer(cost_prev, w, s1, s2, lo, mid, opt_lo, out_arg[mid] + 1, out_cost, out_arg)
    _fill_layer(cost_prev, w, s1, s2, mid + 1, hi, out_arg[mid], opt_hi, out_cost, out_arg)


def kmeans_1d(values, k: int) -> np.ndarray:
    """K ascending cluster means minimizing within-cluster sum of squares.

    Duplicates collapse to weighted points first; the contiguous
    partition of the sorted distinct values is then optimized exactly,
    so the result is the deterministic global minimizer.
    """
    vals = np.asarray(values, dtype=np.float64).ravel()
    if k < 2:
        raise ValueError(f"need at least 2 clusters, got k={k}")
    distinct, weights = np.unique(vals, return_counts=True)
    m = distinct.size
    if m < k:
        raise ValueError(f"need at least {k} distinct values for k={k}, got {m}")

    w, s1, s2 = _prefix_moments(distinct, weights.astype(np.float64))

    # cost[j][b]: best WCSS of the first b points split into j+1 runs
    ends = np.arange(m + 1)
    cost = (s2[ends] - s2[0]) - np.divide(
        (s1[ends] - s1[0]) ** 2,
        w[ends] - w[0],
        out=np.zeros(m + 1),
        where=ends > 0,
    )
    splits = []
    for j in range(1, k):
        new_cost = np.full(m + 1, np.inf)
        new_arg = np.zeros(m + 1, dtype=np.intp)
        # runs must be nonempty: endpoint b >= j+1, split a >= j
        _fill_layer(cost, w, s1, s2, j + 1, m + 1, j, m, new_cost, new_arg)
        cost = new_cost
        splits.append(new_arg)

    bounds = [m]
    for arg in reversed(splits):
        bounds.append(int(arg[bounds[-1]]))
    bounds.append(0)
    bounds.reverse()

    means = np.empty(k)
    for i, (a, b) in enumerate(zip(bounds[:-1], bounds[1:])):
        means[i] = (s1[b] - s1[a]) / (w[b] - w[a])
    return means


def segment(u: Array, k: int) -> SegmentationResult:
    """Label every pixel of u into one of k phases.

    Thresholds sit halfway between consecutive cluster means; the
    label rule is threshold[i-1] < value <= threshold[i], so labels
    are monotone in pixel value.
    """
    u = as_grid(u, "u")
    means = kmeans_1d(u.ravel(), k)
    thresholds = (means[:-1] + means[1:]) / 2.0
    labels = 1 + np.searchsorted(thresholds, u, side="left")
    return SegmentationResult(
        k=k,
        cluster_means=tuple(float(m) for m in means),
        thresholds=tuple(float(t) for t in thresholds),
        labels=labels.astype(np.int64),
    )
