"""Projections onto the POD space and the pointwise-in-time error measures
built from them."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .fem1d import Mesh1D, SpaceTag, column_norms_sq, gram, mass_matrix, stiffness_matrix, solve_gram
from .snapshots import SnapshotSet

if TYPE_CHECKING:
    from .pod import PodBasis

TAIL_FLOOR = 1e-300


class ProjectorKind(str, enum.Enum):
    POD = "pod"
    RITZ = "ritz"
    L2 = "l2"

    @classmethod
    def parse(cls, value) -> "ProjectorKind":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


def _projector_gram(basis: "PodBasis", kind: ProjectorKind):
    if kind is ProjectorKind.POD:
        return gram(basis.mesh, basis.space)
    if kind is ProjectorKind.RITZ:
        return stiffness_matrix(basis.mesh)
    return mass_matrix(basis.mesh)


def project_coefficients(basis: "PodBasis", r: int, u: np.ndarray, kind=ProjectorKind.POD) -> np.ndarray:
    """Coefficients ``c`` of the projection ``Phi_r c`` of ``u`` (vector or columns)."""
    kind = ProjectorKind.parse(kind)
    basis.check_rank(r)
    P = basis.modes[:, :r]
    G = _projector_gram(basis, kind)
    rhs = P.T @ (G @ u)
    if kind is ProjectorKind.POD:
        return rhs
    return solve_gram(P.T @ (G @ P), rhs)


def project(basis: "PodBasis", r: int, u: np.ndarray, kind=ProjectorKind.POD) -> np.ndarray:
    """POD-orthogonal, Ritz (stiffness) or L2 (mass) projection onto the first r modes."""
    return basis.modes[:, :r] @ project_coefficients(basis, r, u, kind)


def w_projector(W: SpaceTag | str) -> ProjectorKind:
    """The W-orthogonal projector: L2 for W = L2, Ritz for W = H10."""
    return ProjectorKind.L2 if SpaceTag.parse(W) is SpaceTag.L2 else ProjectorKind.RITZ


@dataclass(frozen=True, eq=False)
class PointwiseErrorSeries:
    errors: np.ndarray  # ||u^n - project(u^n)||_W, n = 0..N
    W: SpaceTag
    r: int
    kind: ProjectorKind


def pointwise_errors(snaps: SnapshotSet, basis: "PodBasis", r: int,
                     W: SpaceTag | str = SpaceTag.L2, kind=ProjectorKind.POD) -> PointwiseErrorSeries:
    W, kind = SpaceTag.parse(W), ProjectorKind.parse(kind)
    E = snaps.U - project(basis, r, snaps.U, kind)
    err = np.sqrt(np.maximum(column_norms_sq(E, snaps.mesh, W), 0.0))
    return PointwiseErrorSeries(err, W, r, kind)


def tail_sum(basis: "PodBasis", r: int, W: SpaceTag | str = SpaceTag.L2, kind=None) -> float:
    """``sum_{i>r} lambda_i ||phi_i - R phi_i||_W^2``; ``kind=None`` means R = 0."""
    if r >= basis.s:
        return 0.0
    tail = basis.modes[:, r:]
    if kind is not None:
        tail = tail - project(basis, r, tail, kind)
    return float(np.sum(basis.eigenvalues[r:] * column_norms_sq(tail, basis.mesh, W)))


def assumption_ratio(series: PointwiseErrorSeries, basis: "PodBasis", r: int,
                     W: SpaceTag | str | None = None, index: int | None = None) -> float:
    """Squared pointwise projection error over the eigenvalue tail.

    Uses the maximum over all time indices, or the error at ``index`` only.
    """
    W = series.W if W is None else SpaceTag.parse(W)
    denom = tail_sum(basis, r, W)
    if r >= basis.s or denom < TAIL_FLOOR:
        raise ValueError(f"eigenvalue tail vanishes for r={r} (s={basis.s})")
    num = series.errors.max() if index is None else series.errors[index]
    return float(num**2 / denom)


def sobolev_constant(T: float) -> float:
    return 6.0 * max(1.0, T * T)


@dataclass(frozen=True)
class SobolevResult:
    lhs: float
    rhs: float
    holds: bool


def sobolev_check(Z: np.ndarray, dt: float, mesh: Mesh1D | None = None,
                  norm: SpaceTag | str = SpaceTag.L2) -> SobolevResult:
    """Discrete time Sobolev inequality for the columns ``z^0..z^N`` of ``Z``.

    With ``mesh=None`` the columns are measured in the Euclidean norm.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[1] < 2:
        raise ValueError("need at least two vectors")
    N = Z.shape[1] - 1
    D = (Z[:, 1:] - Z[:, :-1]) / dt
    if mesh is None:
        zn, dn = np.sum(Z * Z, axis=0), np.sum(D * D, axis=0)
    else:
        zn, dn = column_norms_sq(Z, mesh, norm), column_norms_sq(D, mesh, norm)
    lhs = float(zn.max())
    rhs = sobolev_constant(N * dt) * float(zn.sum() + dn.sum()) / (2 * N + 1)
    return SobolevResult(lhs, rhs, lhs <= rhs * (1 + 1e-12))


@dataclass(frozen=True)
class OptimalityQuantities:
    lambda_star: float
    lambda_I: float
    lambda_II: float
    r: int
    W: SpaceTag


def optimality_quantities(snaps: SnapshotSet, basis: "PodBasis", r: int,
                          W: SpaceTag | str = SpaceTag.L2) -> OptimalityQuantities:
    W = SpaceTag.parse(W)
    basis.check_rank(r, allow_full=False)
    kind = w_projector(W)
    U = snaps.U[:, 1:]
    best = column_norms_sq(U - project(basis, r, U, kind), snaps.mesh, W)
    return OptimalityQuantities(
        lambda_star=float(best.max()),
        lambda_I=tail_sum(basis, r, W),
        lambda_II=tail_sum(basis, r, W, kind),
        r=r,
        W=W,
    )


def ritz_defects(basis: "PodBasis", r: int) -> np.ndarray:
    """``||phi_i - R_r phi_i||_L2`` for the discarded modes ``i > r``."""
    tail = basis.modes[:, r:]
    return np.sqrt(column_norms_sq(tail - project(basis, r, tail, ProjectorKind.RITZ), basis.mesh, SpaceTag.L2))
