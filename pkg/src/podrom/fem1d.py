"""Linear finite elements on a uniform mesh of [0, 1] with homogeneous
Dirichlet boundaries.

Only interior nodes carry degrees of freedom, so every nodal field is a
plain ``numpy`` vector of length ``n_elems - 1`` (or a matrix whose columns
are such vectors).
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg


class SpaceTag(str, enum.Enum):
    """Hilbert space selecting the Gram operator: mass (L2) or stiffness (H10)."""

    L2 = "l2"
    H10 = "h1"

    @classmethod
    def parse(cls, value: "SpaceTag | str") -> "SpaceTag":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"l2": cls.L2, "h1": cls.H10, "h10": cls.H10, "h1_0": cls.H10}
        if key not in aliases:
            raise ValueError(f"unknown space {value!r}; expected 'l2' or 'h1'")
        return aliases[key]


@dataclass(frozen=True)
class Mesh1D:
    n_elems: int

    def __post_init__(self):
        if int(self.n_elems) != self.n_elems or self.n_elems < 2:
            raise ValueError(f"a mesh needs at least 2 elements, got {self.n_elems}")

    @property
    def h(self) -> float:
        return 1.0 / self.n_elems

    @property
    def n_dof(self) -> int:
        return self.n_elems - 1

    @functools.cached_property
    def nodes(self) -> np.ndarray:
        """Interior node coordinates ``j * h``, ``j = 1 .. n_elems - 1``."""
        return np.arange(1, self.n_elems) / self.n_elems


def build_mesh(n_elems: int) -> Mesh1D:
    return Mesh1D(int(n_elems))


@dataclass(frozen=True, eq=False)
class SymTridiag:
    """Symmetric tridiagonal matrix stored by its diagonal and first off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise ValueError("offdiag must have length len(diag) - 1")

    @property
    def n(self) -> int:
        return len(self.diag)

    def __matmul__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise ValueError(f"dimension mismatch: matrix is {self.n}, vector is {x.shape[0]}")
        d = self.diag if x.ndim == 1 else self.diag[:, None]
        o = self.offdiag if x.ndim == 1 else self.offdiag[:, None]
        y = d * x
        y[:-1] += o * x[1:]
        y[1:] += o * x[:-1]
        return y

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def banded(self) -> np.ndarray:
        """Upper banded storage as expected by ``scipy.linalg.solveh_banded``."""
        ab = np.zeros((2, self.n))
        ab[0, 1:] = self.offdiag
        ab[1] = self.diag
        return ab


@functools.lru_cache(maxsize=16)
def mass_matrix(mesh: Mesh1D) -> SymTridiag:
    h, n = mesh.h, mesh.n_dof
    return SymTridiag(np.full(n, 2.0 * h / 3.0), np.full(n - 1, h / 6.0))


@functools.lru_cache(maxsize=16)
def stiffness_matrix(mesh: Mesh1D) -> SymTridiag:
    h, n = mesh.h, mesh.n_dof
    return SymTridiag(np.full(n, 2.0 / h), np.full(n - 1, -1.0 / h))


def gram(mesh: Mesh1D, space: SpaceTag | str) -> SymTridiag:
    return mass_matrix(mesh) if SpaceTag.parse(space) is SpaceTag.L2 else stiffness_matrix(mesh)


def interpolate(f: Callable[[np.ndarray], np.ndarray], mesh: Mesh1D) -> np.ndarray:
    """Nodal interpolant of ``f`` at the interior nodes (``f`` is vectorized)."""
    values = np.asarray(f(mesh.nodes), dtype=float)
    values = np.broadcast_to(values, mesh.nodes.shape).copy()
    if not np.all(np.isfinite(values)):
        raise ValueError("interpolated field has non-finite values")
    return values


def _check(u: np.ndarray, mesh: Mesh1D) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[0] != mesh.n_dof:
        raise ValueError(f"field of length {u.shape[0]} does not live on a mesh with {mesh.n_dof} dofs")
    return u


def inner_product(u, v, mesh: Mesh1D, space: SpaceTag | str = SpaceTag.L2) -> float:
    u, v = _check(u, mesh), _check(v, mesh)
    return float(u @ (gram(mesh, space) @ v))


def norm(u, mesh: Mesh1D, space: SpaceTag | str = SpaceTag.L2) -> float:
    return float(np.sqrt(max(inner_product(u, u, mesh, space), 0.0)))


def column_norms_sq(U: np.ndarray, mesh: Mesh1D, space: SpaceTag | str = SpaceTag.L2) -> np.ndarray:
    """Squared norms of every column of ``U``."""
    U = _check(U, mesh)
    if U.ndim == 1:
        U = U[:, None]
    return np.einsum("ij,ij->j", U, gram(mesh, space) @ U)


def solve_gram(G: SymTridiag | np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``G x = rhs`` for symmetric positive definite ``G`` by Cholesky.

    Raises ``numpy.linalg.LinAlgError`` when ``G`` is not positive definite.
    """
    rhs = np.asarray(rhs, dtype=float)
    if isinstance(G, SymTridiag):
        if G.n == 1:
            if G.diag[0] <= 0:
                raise np.linalg.LinAlgError("matrix is not positive definite")
            return rhs / G.diag[0]
        return scipy.linalg.solveh_banded(G.banded(), rhs)
    G = np.atleast_2d(np.asarray(G, dtype=float))
    factor = scipy.linalg.cho_factor(G)
    return scipy.linalg.cho_solve(factor, rhs)
