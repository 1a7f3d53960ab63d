"""Objective functionals for the smooth-plus-piecewise-constant split.

The full objective couples a quadratic fidelity term with a concave
penalty on gradient magnitudes of the cartoon part and Tikhonov terms
on the smooth part. The linearized objective replaces the concave
penalty by its tangent at the previous iterate, restricted to the
active support, plus a proximal anchor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Array, as_grid, grad, grad_norms, hessian
from .potential import Potential, PowerPotential
from .support import SupportSet


@dataclass(frozen=True)
class ModelParams:
    """Weights of the decomposition objective.

    alpha scales the concave gradient penalty, beta the Hessian
    smoothness term, gamma the plain quadratic on the smooth part.
    """

    alpha: float
    beta: float
    gamma: float = 1e-8
    potential: Potential = field(default_factory=PowerPotential)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive, got {val!r}")


def _check_shapes(*arrays: Array) -> None:
    shapes = {a.shape for a in arrays}
    if len(shapes) > 1:
        raise ValueError(f"grid shapes disagree: {sorted(shapes)}")


def decomposition_energy(f: Array, u: Array, v: Array, params: ModelParams) -> float:
    """Full objective: fidelity + concave gradient penalty + smoothness.

    The gradient penalty sums over every pixel; zero-gradient pixels
    contribute nothing since the potential vanishes at zero.
    """
    f = as_grid(f, "f")
    u = as_grid(u, "u")
    v = as_grid(v, "v")
    _check_shapes(f, u, v)

    resid = f - u - v
    fidelity = 0.5 * float(np.vdot(resid, resid).real)
    penalty = params.alpha * float(np.sum(params.potential.value(grad_norms(grad(u)))))
    hv = hessian(v)
    smooth = 0.5 * params.beta * float(
        np.vdot(hv.xx, hv.xx).real
        + np.vdot(hv.xy, hv.xy).real
        + np.vdot(hv.yx, hv.yx).real
        + np.vdot(hv.yy, hv.yy).real
    )
    ridge = 0.5 * params.gamma * float(np.vdot(v, v).real)
    return fidelity + penalty + smooth + ridge


def linearized_energy(
    f: Array,
    u: Array,
    v: Array,
    u_prev: Array,
    weights: Array,
    support: SupportSet,
    params: ModelParams,
    rho: float,
    feas_tol: float | None = None,
) -> float:
    """Inner objective: tangent-weighted gradient norms plus proximal term.

    weights holds the potential derivative at the linearization point;
    only entries on the active support are read. When feas_tol is given,
    a gradient above it on the frozen set makes the constrained value
    infinite and math.inf is returned.
    """
    f = as_grid(f, "f")
    u = as_grid(u, "u")
    v = as_grid(v, "v")
    u_prev = as_grid(u_prev, "u_prev")
    _check_shapes(f, u, v, u_prev, support.active)
    weights = np.asarray(weights, dtype=np.float64)
    _check_shapes(f, weights)

    norms = grad_norms(grad(u))
    if feas_tol is not None:
        frozen = ~support.active
        if frozen.any() and float(norms[frozen].max()) > feas_tol:
            return math.inf

    resid = f - u - v
    fidelity = 0.5 * float(np.vdot(resid, resid).real)
    penalty = params.alpha * float(np.sum(weights[support.active] * norms[support.active]))
    du = u - u_prev
    prox = 0.5 * rho * float(np.vdot(du, du).real)
    hv = hessian(v)
    smooth = 0.5 * params.beta * float(
        np.vdot(hv.xx, hv.xx).real
        + np.vdot(hv.xy, hv.xy).real
        + np.vdot(hv.yx, hv.yx).real
        + np.vdot(hv.yy, hv.yy).real
    )
    ridge = 0.5 * params.gamma * float(np.vdot(v, v).real)
    return fidelity + penalty + prox + smooth + ridge
