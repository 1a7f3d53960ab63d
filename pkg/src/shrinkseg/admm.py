"""Splitting solver for the support-constrained inner problem.

Each sweep alternates a closed-form shrinkage on the gradient
auxiliary, one exact coupled linear solve in Fourier space, and a dual
ascent step. The linear solve is exact per frequency because both
operator symbols are diagonal there, so no warm start is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import ModelParams
from .grid import (
    Array,
    GradientField,
    OperatorSymbols,
    as_grid,
    grad,
    grad_adjoint,
    grad_norms,
)
from .support import SupportSet


@dataclass(frozen=True)
class AdmmParams:
    """Penalty weight and stopping rule of the inner solver."""

    r: float = 10.0
    tol_in: float = 1e-4
    maxit_in: int = 100

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError(f"r must be positive, got {self.r!r}")
        if not (math.isfinite(self.tol_in) and self.tol_in >= 0):
            raise ValueError(f"tol_in must be nonnegative, got {self.tol_in!r}")
        if self.maxit_in < 1:
            raise ValueError(f"maxit_in must be at least 1, got {self.maxit_in!r}")


@dataclass(frozen=True)
class InnerResult:
    """Solution pair plus the diagnostics needed by the outer loop."""

    u: Array
    v: Array
    iters: int
    constraint_sup: float
    primal_residuals: tuple[float, ...]


def shrink_group(z, threshold: float) -> np.ndarray:
    """Minimizer of threshold*|q| + |q - z|^2/2 over 2-vectors q.

    Scales z toward the origin by 1 - threshold/|z|, clamped at zero;
    the zero vector maps to itself for any threshold.
    """
    z = np.asarray(z, dtype=np.float64)
    norm = float(np.hypot(z[0], z[1]))
    if norm == 0.0:
        return np.zeros(2)
    return max(1.0 - threshold / norm, 0.0) * z


def _shrink_field(g: GradientField, thresholds: Array, active: Array) -> GradientField:
    """Pixelwise group shrinkage, zeroed outside the active mask."""
    norms = grad_norms(g)
    scale = np.zeros_like(norms)
    pos = norms > 0
    scale[pos] = np.maximum(1.0 - thresholds[pos] / norms[pos], 0.0)
    scale[~active] = 0.0
    return GradientField(scale * g.dx, scale * g.dy)


def solve_uv(
    f: Array,
    u_k: Array,
    qbar: GradientField,
    mu: GradientField,
    symbols: OperatorSymbols,
    params: ModelParams,
    rho: float,
    r: float,
) -> tuple[Array, Array]:
    """Exact solve of the coupled stationarity system for (u, v).

    Solves
        (1 + rho) u + r D^T D u + v = f + rho u_k - D^T (mu - r qbar)
        u + (1 + gamma) v + beta H^T H v = f
    one frequency at a time: both operators diagonalize under the DFT,
    leaving a 2x2 system per frequency inverted in closed form. Raises
    when the inverse transform leaves a noticeable imaginary part,
    which would mean symbols and operators disagree.
    """
    f = as_grid(f, "f")
    u_k = as_grid(u_k, "u_k")
    if f.shape[0] != symbols.n:
        raise ValueError("symbol table size does not match grid")

    pull = GradientField(mu.dx - r * qbar.dx, mu.dy - r * qbar.dy)
    rhs1 = f + rho * u_k - grad_adjoint(pull)
    rhs2 = f

    a = 1.0 + rho + r * symbols.dtd
    b = 1.0 + params.gamma + params.beta * symbols.hth
    det = a * b - 1.0

    r1 = np.fft.fft2(rhs1)
    r2 = np.fft.fft2(rhs2)
    u = np.fft.ifft2((b * r1 - r2) / det)
    v = np.fft.ifft2((a * r2 - r1) / det)

    scale = math.sqrt(float(np.vdot(rhs1, rhs1).real + np.vdot(rhs2, rhs2).real))
    residue = max(float(np.abs(u.imag).max()), float(np.abs(v.imag).max()))
    if residue > 1e-9 * scale:
        raise FloatingPointError(
            f"imaginary residue {residue:.3e} exceeds 1e-9 * {scale:.3e}"
        )
    return np.ascontiguousarray(u.real), np.ascontiguousarray(v.real)


def admm_solve(
    f: Array,
    u_k: Array,
    v_k: Array,
    weights: Array,
    support: SupportSet,
    params: ModelParams,
    rho: float,
    admm: AdmmParams,
    symbols: OperatorSymbols,
) -> InnerResult:
    """Run the splitting iteration from (u_k, v_k) with zero duals.

    weights must hold the potential derivative at u_k on the active
    set; frozen pixels get a hard zero in the auxiliary variable, so
    their gradient is driven to zero by the penalty. Stops when the
    stacked (u, v) update is small relative to the previous iterate.
    """
    f = as_grid(f, "f")
    u = as_grid(u_k, "u_k")
    v = as_grid(v_k, "v_k")
    weights = np.asarray(weights, dtype=np.float64)
    if not (f.shape == u.shape == v.shape == weights.shape == support.active.shape):
        raise ValueError("admm_solve inputs must share one grid shape")

    thresholds = params.alpha * weights / admm.r
    mu = GradientField(np.zeros_like(f), np.zeros_like(f))
    residuals: list[float] = []
    iters = 0

    for iters in range(1, admm.maxit_in + 1):
        du = grad(u)
        shifted = GradientField(du.dx + mu.dx / admm.r, du.dy + mu.dy / admm.r)
        q = _shrink_field(shifted, thresholds, support.active)

        u_new, v_new = solve_uv(f, u_k, q, mu, symbols, params, rho, admm.r)

        du_new = grad(u_new)
        gap_x = du_new.dx - q.dx
        gap_y = du_new.dy - q.dy
        mu = GradientField(mu.dx + admm.r * gap_x, mu.dy + admm.r * gap_y)
        residuals.append(float(np.hypot(gap_x, gap_y).max()))

        change = math.sqrt(
            float(np.vdot(u_new - u, u_new - u).real)
            + float(np.vdot(v_new - v, v_new - v).real)
        )
        denom = math.sqrt(
            float(np.vdot(u, u).real) + float(np.vdot(v, v).real)
        )
        u, v = u_new, v_new
        if change <= admm.tol_in * denom:
            break

    norms = grad_norms(grad(u))
    frozen = ~support.active
    constraint_sup = float(norms[frozen].max()) if frozen.any() else 0.0
    return InnerResult(u, v, iters, constraint_sup, tuple(residuals))
