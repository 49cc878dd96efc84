"""Manufactured solutions of the 1D heat equation and their snapshot sets."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .fem1d import Mesh1D, build_mesh, interpolate

Field = Callable[[np.ndarray, float], np.ndarray]

# k * t must be an integer for the counterexamples to vanish at x = 1
GRID_TOL = 1e-9


class GridError(ValueError):
    """Time grid incompatible with the boundary condition of a solution."""


@dataclass(frozen=True)
class ManufacturedSolution:
    """Exact solution ``u`` of ``u_t - nu u_xx = f`` together with ``f``.

    ``k`` is set for the counterexamples: only times with ``k t`` integral
    give snapshots that vanish at both ends of the interval.
    """

    u: Field
    f: Field
    label: str
    nu: float = 1.0
    k: Optional[int] = None

    def u0(self, x: np.ndarray) -> np.ndarray:
        return self.u(x, 0.0)

    def check_time(self, t: float) -> None:
        if self.k is None:
            return
        kt = self.k * t
        if abs(kt - round(kt)) > GRID_TOL * max(1.0, abs(kt)):
            raise GridError(
                f"{self.label}: k*t = {kt:.12g} is not an integer at t = {t:.12g}; "
                "the solution does not vanish at x = 1 there (homogeneous Dirichlet "
                "boundary requires k*dt to be a positive integer)"
            )

    def check_step(self, dt: float) -> None:
        if dt <= 0:
            raise GridError(f"time step must be positive, got {dt}")
        if self.k is None:
            return
        kdt = self.k * dt
        if abs(kdt - round(kdt)) > GRID_TOL * max(1.0, kdt) or round(kdt) < 1:
            raise GridError(
                f"{self.label}: k*dt = {kdt:.12g} is not a positive integer; "
                "snapshots would not vanish at x = 1 (homogeneous Dirichlet boundary)"
            )


@dataclass(frozen=True)
class Cex1Params:
    k: int = 128
    nu: float = 1.0


@dataclass(frozen=True)
class Cex2Params:
    k: int = 100
    alpha: float = 1.0
    delta: float = 0.01
    nu: float = 1.0

    def rho(self, dt: float) -> float:
        return self.delta / dt

    def gamma(self, dt: float) -> float:
        return self.alpha * dt / self.delta

    def beta(self, dt: float, T: float) -> float:
        N = round(T / dt)
        return math.exp(-self.alpha + self.alpha * dt / self.delta) / (4.0 * self.delta * (N + 1))

    def eigenvalues(self, dt: float, T: float) -> np.ndarray:
        """Prescribed POD eigenvalues ``beta exp(-gamma n)``, ``n = 1 .. N+1``."""
        N = round(T / dt)
        n = np.arange(1, N + 2)
        return self.beta(dt, T) * np.exp(-self.gamma(dt) * n)


def cex1(params: Cex1Params = Cex1Params()) -> ManufacturedSolution:
    """``u(x, t) = sin((k t + 1) pi x)``."""
    k, nu = params.k, params.nu
    if k < 1:
        raise ValueError("k must be a positive integer")

    def u(x, t):
        return np.sin((k * t + 1) * np.pi * x)

    def f(x, t):
        w = (k * t + 1) * np.pi
        return k * np.pi * x * np.cos(w * x) + nu * w**2 * np.sin(w * x)

    return ManufacturedSolution(u, f, f"cex1(k={k})", nu=nu, k=k)


def cex2(params: Cex2Params = Cex2Params(), dt: Optional[float] = None) -> ManufacturedSolution:
    """``u(x, t) = (2 delta)^(-1/2) exp(-alpha (1 + t/delta) / 2) sin((k t + 1) pi x)``."""
    k, alpha, delta, nu = params.k, params.alpha, params.delta, params.nu
    if k < 1 or alpha <= 0 or delta <= 0:
        raise ValueError("cex2 needs k >= 1 and alpha, delta > 0")

    def amp(t):
        return math.exp(-alpha * (1.0 + t / delta) / 2.0) / math.sqrt(2.0 * delta)

    def u(x, t):
        return amp(t) * np.sin((k * t + 1) * np.pi * x)

    def f(x, t):
        w = (k * t + 1) * np.pi
        s, c = np.sin(w * x), np.cos(w * x)
        return amp(t) * (-alpha / (2.0 * delta) * s + k * np.pi * x * c + nu * w**2 * s)

    sol = ManufacturedSolution(u, f, f"cex2(k={k},alpha={alpha:g},delta={delta:g})", nu=nu, k=k)
    if dt is not None:
        sol.check_step(dt)
    return sol


def custom(u: Field, f: Field, label: str = "custom", nu: float = 1.0) -> ManufacturedSolution:
    """Wrap a caller-supplied exact solution and its forcing."""
    return ManufacturedSolution(u, f, label, nu=nu)


def difference_quotients(U: np.ndarray, dt: float) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[1] < 2:
        raise ValueError("difference quotients need at least two snapshot columns")
    if dt <= 0:
        raise ValueError("time step must be positive")
    return (U[:, 1:] - U[:, :-1]) / dt


@dataclass(frozen=True, eq=False)
class SnapshotSet:
    U: np.ndarray
    dt: float
    mesh: Mesh1D
    dq: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.U.ndim != 2 or self.U.shape[1] < 2:
            raise ValueError("a snapshot set needs at least two columns")
        if self.U.shape[0] != self.mesh.n_dof:
            raise ValueError("snapshot length does not match the mesh")
        if self.dq is not None and self.dq.shape != (self.U.shape[0], self.U.shape[1] - 1):
            raise ValueError("difference quotient block has the wrong shape")

    @property
    def N(self) -> int:
        return self.U.shape[1] - 1

    @property
    def T(self) -> float:
        return self.N * self.dt

    @property
    def has_dq(self) -> bool:
        return self.dq is not None

    @property
    def weight(self) -> float:
        return 1.0 / (2 * self.N + 1) if self.has_dq else 1.0 / (self.N + 1)

    @property
    def columns(self) -> np.ndarray:
        """All snapshot columns: ``u^0..u^N`` followed by the DQs when present."""
        return self.U if self.dq is None else np.hstack([self.U, self.dq])

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.dt

    def without_dq(self) -> "SnapshotSet":
        return SnapshotSet(self.U, self.dt, self.mesh)

    def with_dq(self) -> "SnapshotSet":
        return SnapshotSet(self.U, self.dt, self.mesh, difference_quotients(self.U, self.dt))


def steps(T: float, dt: float) -> int:
    """Number of steps ``T / dt``, which must be a positive integer."""
    if dt <= 0 or T <= 0:
        raise GridError("T and dt must be positive")
    N = round(T / dt)
    if N < 1 or abs(T / dt - N) > GRID_TOL * max(1.0, T / dt):
        raise GridError(f"T/dt = {T / dt:.12g} is not a positive integer")
    return N


def generate_snapshots(sol: ManufacturedSolution, mesh: Mesh1D, T: float, N: int,
                       with_dq: bool = False) -> SnapshotSet:
    if N < 1:
        raise ValueError("need N >= 1")
    dt = T / N
    sol.check_step(dt)
    U = np.column_stack([interpolate(lambda x: sol.u(x, n * dt), mesh) for n in range(N + 1)])
    dq = difference_quotients(U, dt) if with_dq else None
    return SnapshotSet(U, dt, mesh, dq)


def save_snapshots_csv(snaps: SnapshotSet, path) -> None:
    """Write ``u^0..u^N`` one row per interior node, header ``x_index,t0,t1,...``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x_index"] + [f"t{n}" for n in range(snaps.N + 1)])
        for j, row in enumerate(snaps.U, start=1):
            writer.writerow([j] + [f"{v:.17g}" for v in row])


def load_snapshots_csv(path, dt: float, with_dq: bool = False) -> SnapshotSet:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "x_index":
            raise ValueError(f"{path}: not a snapshot file")
        rows = [[float(v) for v in row[1:]] for row in reader if row]
    U = np.array(rows, dtype=float)
    mesh = build_mesh(U.shape[0] + 1)
    dq = difference_quotients(U, dt) if with_dq else None
    return SnapshotSet(U, dt, mesh, dq)
