"""POD reduced-order modeling of the 1D heat equation, with and without
difference quotients, and the pointwise-in-time error studies built on it."""

__version__ = "0.1.0"

from .fem1d import Mesh1D, SpaceTag, build_mesh, mass_matrix, stiffness_matrix
from .pod import PodBasis, compute_pod, pod_project, total_error_identity
from .projections import ProjectorKind, assumption_ratio, optimality_quantities, pointwise_errors, project
from .rom import assemble_rom, cn_solve, rom_errors, rom_initial_condition, rom_ratio
from .snapshots import Cex1Params, Cex2Params, GridError, SnapshotSet, cex1, cex2, custom, generate_snapshots

__all__ = [
    "Mesh1D", "SpaceTag", "build_mesh", "mass_matrix", "stiffness_matrix",
    "PodBasis", "compute_pod", "pod_project", "total_error_identity",
    "ProjectorKind", "assumption_ratio", "optimality_quantities", "pointwise_errors", "project",
    "assemble_rom", "cn_solve", "rom_errors", "rom_initial_condition", "rom_ratio",
    "Cex1Params", "Cex2Params", "GridError", "SnapshotSet", "cex1", "cex2", "custom", "generate_snapshots",
]
