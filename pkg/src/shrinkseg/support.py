"""Active-gradient support sets and their monotone shrinking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .grid import Array, grad, grad_norms


@dataclass(frozen=True)
class SupportSet:
    """Partition of pixels into active (nonzero gradient) and frozen sets.

    active[i, j] is True where the gradient is treated as nonzero. The
    outer loop only ever removes pixels, never re-adds them; use
    detect_support to update so the nesting is enforced by construction.
    """

    active: Array

    def __post_init__(self):
        a = np.asarray(self.active)
        if a.dtype != np.bool_ or a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("support mask must be a square boolean array")
        object.__setattr__(self, "active", a)

    @property
    def n(self) -> int:
        return self.active.shape[0]

    @property
    def size(self) -> int:
        """Number of active pixels."""
        return int(self.active.sum())


def initial_support(u: Array, tau_supp: float) -> SupportSet:
    """Pixels whose gradient magnitude exceeds tau_supp."""
    return SupportSet(grad_norms(grad(u)) > tau_supp)


def detect_support(u: Array, prev: SupportSet, tau_supp: float) -> SupportSet:
    """Shrink prev to the pixels still above tau_supp at u.

    Intersecting with prev keeps the support sequence nested even when
    the inner solver leaves small nonzero gradients behind.
    """
    if u.shape[0] != prev.n:
        raise ValueError("support and image shapes disagree")
    return SupportSet(prev.active & (grad_norms(grad(u)) > tau_supp))


def project_to_support(u: Array, support: SupportSet) -> Array:
    """Nearest image whose gradient vanishes exactly off the support.

    A frozen pixel ties itself to its right and lower neighbors; the
    resulting connected components must be constant, and the euclidean
    projection replaces each component by its mean. Pixels touched by
    no tie are returned unchanged.
    """
    if u.shape[0] != support.n:
        raise ValueError("support and image shapes disagree")
    frozen = ~support.active
    if not frozen.any():
        return u.copy()
    n = support.n
    idx = np.arange(n * n).reshape(n, n)
    src = idx[frozen]
    right = np.roll(idx, -1, axis=1)[frozen]
    down = np.roll(idx, -1, axis=0)[frozen]
    ties = coo_matrix(
        (
            np.ones(2 * src.size, dtype=np.int8),
            (np.concatenate([src, src]), np.concatenate([right, down])),
        ),
        shape=(n * n, n * n),
    )
    _, component = connected_components(ties, directed=False)
    sums = np.bincount(component, weights=u.ravel())
    counts = np.bincount(component)
    return (sums / counts)[component].reshape(n, n)
