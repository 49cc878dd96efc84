"""Crank-Nicolson POD-Galerkin reduced-order model of the heat equation."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .fem1d import Mesh1D, SpaceTag, column_norms_sq, interpolate, mass_matrix, stiffness_matrix
from .pod import PodBasis
from .projections import ProjectorKind, project_coefficients
from .snapshots import ManufacturedSolution


@dataclass(frozen=True, eq=False)
class RomModel:
    mass: np.ndarray
    stiffness: np.ndarray
    nu: float
    basis: PodBasis
    r: int
    sol: ManufacturedSolution
    midpoint_forcing: bool = False

    @property
    def mesh(self) -> Mesh1D:
        return self.basis.mesh

    def forcing(self, t: float) -> np.ndarray:
        """Reduced load ``Phi_r^T M interp(f(., t))``."""
        fh = interpolate(lambda x: self.sol.f(x, t), self.mesh)
        return self.basis.modes[:, : self.r].T @ (mass_matrix(self.mesh) @ fh)


def assemble_rom(basis: PodBasis, r: int, nu: float, sol: ManufacturedSolution,
                 midpoint_forcing: bool = False) -> RomModel:
    basis.check_rank(r)
    if nu <= 0:
        raise ValueError("viscosity must be positive")
    P = basis.modes[:, :r]
    Mr = P.T @ (mass_matrix(basis.mesh) @ P)
    Sr = P.T @ (stiffness_matrix(basis.mesh) @ P)
    return RomModel(0.5 * (Mr + Mr.T), 0.5 * (Sr + Sr.T), nu, basis, r, sol, midpoint_forcing)


def rom_initial_condition(basis: PodBasis, r: int, u0: np.ndarray, kind="l2") -> np.ndarray:
    """Coefficients of the L2 or Ritz projection of ``u0`` onto the first r modes."""
    kind = ProjectorKind.parse(kind)
    if kind is ProjectorKind.POD:
        raise ValueError("initial condition kind must be 'l2' or 'ritz'")
    return project_coefficients(basis, r, u0, kind)


@dataclass(frozen=True, eq=False)
class RomTrajectory:
    coeffs: np.ndarray  # (N+1) x r
    dt: float
    basis: PodBasis

    @property
    def N(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def r(self) -> int:
        return self.coeffs.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.dt

    def fields(self) -> np.ndarray:
        """Reconstructed nodal fields ``Phi_r a^n`` as columns."""
        return self.basis.modes[:, : self.r] @ self.coeffs.T


def cn_solve(model: RomModel, a0: np.ndarray, dt: float, N: int) -> RomTrajectory:
    if N < 1 or dt <= 0:
        raise ValueError("need N >= 1 and dt > 0")
    a0 = np.asarray(a0, dtype=float)
    if a0.shape != (model.r,):
        raise ValueError(f"initial coefficients must have length {model.r}")
    lhs = model.mass / dt + 0.5 * model.nu * model.stiffness
    rhs_op = model.mass / dt - 0.5 * model.nu * model.stiffness
    # raises LinAlgError if lhs is not SPD
    factor = scipy.linalg.cho_factor(lhs)

    coeffs = np.empty((N + 1, model.r))
    coeffs[0] = a0
    f_old = None if model.midpoint_forcing else model.forcing(0.0)
    for n in range(N):
        if model.midpoint_forcing:
            f_half = model.forcing((n + 0.5) * dt)
        else:
            f_new = model.forcing((n + 1) * dt)
            f_half = 0.5 * (f_old + f_new)
            f_old = f_new
        coeffs[n + 1] = scipy.linalg.cho_solve(factor, rhs_op @ coeffs[n] + f_half)
    return RomTrajectory(coeffs, dt, model.basis)


@dataclass(frozen=True, eq=False)
class RomErrorReport:
    per_step_W: np.ndarray  # ||e^n||_W, n = 1..N
    per_step_L2: np.ndarray  # ||e^n||_L2, n = 1..N
    max_W: float
    final_L2: float
    energy: float  # dt * sum ||grad e^{n+1/2}||^2
    W: SpaceTag
    extras: dict = field(default_factory=dict)

    @property
    def max_L2_sq(self) -> float:
        return float(np.max(self.per_step_L2) ** 2)


def rom_errors(traj: RomTrajectory, sol: ManufacturedSolution,
               W: SpaceTag | str = SpaceTag.L2) -> RomErrorReport:
    """Errors ``e^n = interp(u(., t_n)) - Phi_r a^n`` of a ROM trajectory."""
    W = SpaceTag.parse(W)
    mesh = traj.basis.mesh
    for t in traj.times:
        sol.check_time(t)
    exact = np.column_stack([interpolate(lambda x: sol.u(x, t), mesh) for t in traj.times])
    E = exact - traj.fields()
    l2 = np.sqrt(np.maximum(column_norms_sq(E[:, 1:], mesh, SpaceTag.L2), 0.0))
    w = l2 if W is SpaceTag.L2 else np.sqrt(np.maximum(column_norms_sq(E[:, 1:], mesh, W), 0.0))
    mid = 0.5 * (E[:, 1:] + E[:, :-1])
    energy = traj.dt * float(np.sum(column_norms_sq(mid, mesh, SpaceTag.H10)))
    return RomErrorReport(w, l2, float(w.max()), float(l2[-1]), energy, W)


def rom_ratio(report: RomErrorReport, basis: PodBasis, r: int, dt: float, variant: str) -> float:
    """Squared max L2 ROM error over the bound's right-hand side.

    ``noDQ``: ``(N+1) sum lambda ||phi||_L2^2 + dt^4 + sum lambda ||grad phi||^2``
    with N from the basis snapshots; ``DQ``: ``sum lambda ||phi - R phi||_L2^2 + dt^4``.
    """
    from .projections import tail_sum

    basis.check_rank(r, allow_full=False)
    v = variant.strip().lower()
    if v == "nodq":
        N = basis.snapshots.N
        denom = (N + 1) * tail_sum(basis, r, SpaceTag.L2) + dt**4 + tail_sum(basis, r, SpaceTag.H10)
    elif v == "dq":
        denom = tail_sum(basis, r, SpaceTag.L2, ProjectorKind.RITZ) + dt**4
    else:
        raise ValueError(f"unknown variant {variant!r}; expected 'noDQ' or 'DQ'")
    if denom <= 0:
        raise ValueError("zero denominator")
    return report.max_L2_sq / denom


def save_trajectory_csv(traj: RomTrajectory, path) -> None:
    """One row per time step: ``n, t, a_1 .. a_r`` in full double precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["n", "t"] + [f"a{i}" for i in range(1, traj.r + 1)])
        for n, (t, row) in enumerate(zip(traj.times, traj.coeffs)):
            writer.writerow([n, f"{t:.17g}"] + [f"{v:.17g}" for v in row])


def load_trajectory_csv(path, basis: PodBasis) -> RomTrajectory:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [row for row in reader if row]
    t = np.array([float(row[1]) for row in rows])
    coeffs = np.array([[float(v) for v in row[2:]] for row in rows])
    dt = float(t[1] - t[0]) if len(t) > 1 else 0.0
    return RomTrajectory(coeffs, dt, basis)
