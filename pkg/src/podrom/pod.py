"""Proper orthogonal decomposition by the method of snapshots.

The correlation matrix is the weighted Gram matrix of the snapshot columns
in the chosen inner product; with difference quotients the extended column
set ``u^0..u^N, du^1..du^N`` is used with weight ``1/(2N+1)``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fem1d import Mesh1D, SpaceTag, column_norms_sq, gram
from .snapshots import SnapshotSet

RANK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    K: np.ndarray
    weight: float


@dataclass(frozen=True, eq=False)
class PodBasis:
    modes: np.ndarray
    eigenvalues: np.ndarray
    space: SpaceTag
    snapshots: SnapshotSet
    spectrum: np.ndarray  # every eigenvalue of K, sorted, before the rank cut

    @property
    def s(self) -> int:
        return self.modes.shape[1]

    @property
    def dq(self) -> bool:
        return self.snapshots.has_dq

    @property
    def weight(self) -> float:
        return self.snapshots.weight

    @property
    def mesh(self) -> Mesh1D:
        return self.snapshots.mesh

    def check_rank(self, r: int, allow_full: bool = True) -> None:
        upper = self.s if allow_full else self.s - 1
        if not 1 <= r <= upper:
            raise ValueError(f"rank r={r} outside [1, {upper}] (basis has s={self.s} modes)")


def correlation_matrix(snaps: SnapshotSet, space: SpaceTag | str = SpaceTag.L2) -> CorrelationMatrix:
    C = snaps.columns
    K = snaps.weight * (C.T @ (gram(snaps.mesh, space) @ C))
    return CorrelationMatrix(0.5 * (K + K.T), snaps.weight)


def _refine(P: np.ndarray, snaps: SnapshotSet, G) -> tuple[np.ndarray, np.ndarray]:
    """Rayleigh-Ritz refinement of the snapshot-method modes.

    Modes whose eigenvalues sit near the rank cut lose orthogonality to
    round-off (error ~ eps * lambda_1 / lambda_i). The span is
    G-orthonormalized by Cholesky QR and the snapshots' coefficients in it
    are decomposed by SVD, which resolves small eigenvalues to
    ~eps * sigma_1 / sigma_i instead.
    """
    for _ in range(2):
        B = P.T @ (G @ P)
        L = scipy.linalg.cholesky(0.5 * (B + B.T), lower=True)
        P = scipy.linalg.solve_triangular(L, P.T, lower=True).T
    coef = np.sqrt(snaps.weight) * (P.T @ (G @ snaps.columns))
    V, sigma, _ = np.linalg.svd(coef, full_matrices=False)
    return P @ V, sigma**2


def compute_pod(snaps: SnapshotSet, space: SpaceTag | str = SpaceTag.L2,
                rank_tol: float = RANK_TOL) -> PodBasis:
    space = SpaceTag.parse(space)
    corr = correlation_matrix(snaps, space)
    lam, Z = np.linalg.eigh(corr.K)
    order = np.argsort(-lam, kind="stable")
    lam, Z = lam[order], Z[:, order]
    if lam[0] <= 0:
        raise ValueError("all snapshots vanish; the POD basis is empty")
    s = int(np.count_nonzero(lam > rank_tol * lam[0]))
    modes = (snaps.columns @ Z[:, :s]) * np.sqrt(corr.weight / lam[:s])
    modes, lam_s = _refine(modes, snaps, gram(snaps.mesh, space))
    # deterministic sign: largest-magnitude entry of each mode is positive
    idx = np.argmax(np.abs(modes), axis=0)
    modes = modes * np.sign(modes[idx, np.arange(s)])
    spectrum = lam.copy()
    spectrum[:s] = lam_s
    return PodBasis(modes, lam_s, space, snaps, spectrum)


def pod_project(basis: PodBasis, r: int, u: np.ndarray) -> np.ndarray:
    """``sum_{i<=r} (u, phi_i) phi_i`` in the basis' own inner product."""
    basis.check_rank(r)
    P = basis.modes[:, :r]
    return P @ (P.T @ (gram(basis.mesh, basis.space) @ u))


def total_error_identity(snaps: SnapshotSet, basis: PodBasis, r: int,
                         W: SpaceTag | str = SpaceTag.L2, projector="pod") -> tuple[float, float]:
    """Both sides of the total projection-error identity.

    ``lhs`` is the weighted sum of squared W-norm projection errors over all
    snapshot columns (including difference quotients when present); ``rhs``
    is ``sum_{i>r} lambda_i ||phi_i - R phi_i||_W^2``.
    """
    from .projections import ProjectorKind, project

    kind = ProjectorKind.parse(projector)
    basis.check_rank(r)
    C = snaps.columns
    lhs = snaps.weight * float(np.sum(column_norms_sq(C - project(basis, r, C, kind), snaps.mesh, W)))
    if r == basis.s:
        return lhs, 0.0
    tail = basis.modes[:, r:]
    defects = column_norms_sq(tail - project(basis, r, tail, kind), basis.mesh, W)
    return lhs, float(np.sum(basis.eigenvalues[r:] * defects))


def save_basis_csv(basis: PodBasis, path) -> None:
    """First row: eigenvalues; then one row of mode values per interior node."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["eigenvalue"] + [f"{v:.17g}" for v in basis.eigenvalues])
        for j, row in enumerate(basis.modes, start=1):
            writer.writerow([j] + [f"{v:.17g}" for v in row])
