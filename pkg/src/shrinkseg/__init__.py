"""Two-stage segmentation of images with smooth intensity bias.

Stage one splits the observation into a piecewise-constant component
and a smooth bias component by iteratively shrinking the set of pixels
allowed to carry a nonzero gradient. Stage two clusters the corrected
component's values and thresholds midway between cluster means.
"""

from .admm import AdmmParams, InnerResult, admm_solve, shrink_group, solve_uv
from .decompose import (
    DecompositionResult,
    IterationTrace,
    OuterParams,
    TraceRow,
    decompose,
)
from .energy import ModelParams, decomposition_energy, linearized_energy
from .grid import (
    GradientField,
    HessianField,
    OperatorSymbols,
    compute_symbols,
    grad,
    grad_adjoint,
    grad_norms,
    hessian,
    hessian_adjoint,
)
from .imgio import RunConfig
from .metrics import cv, jaccard
from .potential import Potential, PowerPotential
from .support import SupportSet, detect_support, initial_support, project_to_support
from .synth import Disk, Phantom, PhantomSpec, Rect, gaussian_field, generate
from .threshold import SegmentationResult, kmeans_1d, segment

__all__ = [
    "AdmmParams",
    "DecompositionResult",
    "Disk",
    "GradientField",
    "HessianField",
    "InnerResult",
    "IterationTrace",
    "ModelParams",
    "OperatorSymbols",
    "OuterParams",
    "Phantom",
    "PhantomSpec",
    "Potential",
    "PowerPotential",
    "Rect",
    "RunConfig",
    "SegmentationResult",
    "SupportSet",
    "TraceRow",
    "admm_solve",
    "compute_symbols",
    "cv",
    "decompose",
    "decomposition_energy",
    "detect_support",
    "gaussian_field",
    "generate",
    "grad",
    "grad_adjoint",
    "grad_norms",
    "hessian",
    "hessian_adjoint",
    "initial_support",
    "jaccard",
    "kmeans_1d",
    "linearized_energy",
    "project_to_support",
    "segment",
    "shrink_group",
    "solve_uv",
]
