"""Property suite: exact identities and inequalities that must hold on the
counterexample data and on seeded random snapshot families.

Failures are reported as rows, never raised.
"""
from __future__ import annotations

import numpy as np

from ..fem1d import SpaceTag, build_mesh, column_norms_sq, gram, mass_matrix
from ..pod import compute_pod, total_error_identity
from ..projections import (ProjectorKind, assumption_ratio, optimality_quantities, pointwise_errors,
                           sobolev_check, sobolev_constant, tail_sum)
from ..rom import assemble_rom, cn_solve, rom_errors, rom_initial_condition, rom_ratio
from ..snapshots import Cex1Params, Cex2Params, SnapshotSet, cex1, cex2, custom, generate_snapshots
from .config import StudyConfig
from .report import TableReport

HEADERS = ["property", "cases", "worst", "threshold", "pass"]
SPACES = (SpaceTag.L2, SpaceTag.H10)
KINDS = (ProjectorKind.POD, ProjectorKind.RITZ, ProjectorKind.L2)


class _Row:
    """Running worst case of one property."""

    def __init__(self, name: str, threshold: float, mode: str = "max"):
        self.name, self.threshold, self.mode = name, threshold, mode
        self.cases = 0
        self.worst = -np.inf if mode == "max" else np.inf

    def add(self, value: float) -> None:
        self.cases += 1
        self.worst = max(self.worst, value) if self.mode == "max" else min(self.worst, value)

    def row(self, informational: bool = False) -> list:
        if informational:
            ok = "info"
        elif self.mode == "max":
            ok = bool(self.cases > 0 and self.worst <= self.threshold)
        else:
            ok = bool(self.cases > 0 and self.worst >= self.threshold)
        return [self.name, self.cases, float(self.worst), float(self.threshold), ok]


def _rel(a: float, b: float, scale: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), scale)


def _datasets(mesh, with_dq: bool):
    """Counterexample snapshot sets used throughout the suite."""
    yield "cex1", generate_snapshots(cex1(Cex1Params(128)), mesh, 1.0, 16, with_dq)
    yield "cex2", generate_snapshots(cex2(Cex2Params(100)), mesh, 0.2, 10, with_dq)


def _random_family(rng, mesh, with_dq: bool) -> SnapshotSet:
    """A few smooth random modes with random temporal coefficients."""
    N = int(rng.integers(2, 17))
    dt = float(rng.uniform(0.02, 0.3))
    x = mesh.nodes
    n_modes = int(rng.integers(1, 6))
    profiles = np.column_stack([np.sin((j + 1) * np.pi * x) for j in range(n_modes)])
    coeffs = rng.standard_normal((n_modes, N + 1)).cumsum(axis=1)
    U = profiles @ coeffs + 1e-3 * rng.standard_normal((mesh.n_dof, N + 1))
    snaps = SnapshotSet(U, dt, mesh)
    return snaps.with_dq() if with_dq else snaps


def check_identities(mesh) -> list:
    ident = _Row("total_error_identity_rel_err", 1e-8)
    ortho = _Row("mode_orthonormality_max_err", 1e-10)
    for dq in (False, True):
        for _, snaps in _datasets(mesh, dq):
            for space in SPACES:
                basis = compute_pod(snaps, space)
                G = gram(mesh, space)
                P = basis.modes
                ortho.add(float(np.abs(P.T @ (G @ P) - np.eye(basis.s)).max()))
                for W in SPACES:
                    scale = 1e-10 * snaps.weight * float(np.sum(column_norms_sq(snaps.columns, mesh, W)))
                    for kind in KINDS:
                        for r in range(1, basis.s + 1):
                            lhs, rhs = total_error_identity(snaps, basis, r, W, kind)
                            ident.add(_rel(lhs, rhs, scale))
    return [ident.row(), ortho.row()]


def check_sobolev(mesh, rng, n_cases: int = 1000) -> list:
    row = _Row("sobolev_lhs_over_rhs", 1.0)
    small = build_mesh(16)
    for _ in range(n_cases):
        N = int(rng.integers(2, 65))
        dt = float(rng.uniform(0.005, 0.1))
        Z = rng.standard_normal((small.n_dof, N + 1))
        for norm in SPACES:
            res = sobolev_check(Z, dt, small, norm)
            row.add(res.lhs / res.rhs if res.rhs > 0 else 0.0)
    row.threshold = 1.0 + 1e-12
    return [row.row()]


def check_projection_bounds(mesh, rng, n_random: int = 100) -> list:
    """Uniform DQ bound, the noDQ worst-case bound and the constructed equality."""
    thm = _Row("dq_pointwise_over_C_tail", 1.0 + 1e-10)
    worst = _Row("nodq_ratio_over_N_plus_1", 1.0 + 1e-8)
    prop = _Row("nodq_last_step_equality_rel_err", 1e-2)

    def dq_case(snaps, W):
        basis = compute_pod(snaps, W)
        C = sobolev_constant(snaps.T)
        for r in range(1, basis.s):
            errs = pointwise_errors(snaps, basis, r, W).errors ** 2
            thm.add(float(errs.max()) / (C * tail_sum(basis, r, W)))

    for _, snaps in _datasets(mesh, True):
        for W in SPACES:
            dq_case(snaps, W)
    for _ in range(n_random):
        snaps = _random_family(rng, mesh, True)
        dq_case(snaps, SpaceTag.L2 if rng.random() < 0.5 else SpaceTag.H10)

    for _, snaps in _datasets(mesh, False):
        for space in SPACES:
            basis = compute_pod(snaps, space)
            for W in SPACES:
                for r in range(1, basis.s):
                    series = pointwise_errors(snaps, basis, r, W)
                    worst.add(assumption_ratio(series, basis, r, W) / (snaps.N + 1))
            N = snaps.N
            # the constructed equality concerns the L2 ordering of the counterexamples
            if space is SpaceTag.L2 and basis.s == N + 1:
                series = pointwise_errors(snaps, basis, N, space)
                lhs = series.errors[N] ** 2
                rhs = (N + 1) * basis.eigenvalues[N] * column_norms_sq(basis.modes[:, [N]], mesh, space)[0]
                prop.add(_rel(lhs, float(rhs), 0.0))
    return [thm.row(), worst.row(), prop.row()]


def check_optimality(mesh) -> list:
    order = _Row("lambda_II_over_lambda_I", 1.0 + 1e-10)
    equal = _Row("lambda_I_vs_II_same_space_rel_err", 1e-10)
    star = _Row("dq_lambda_star_over_C_lambda_II", 1.0 + 1e-10)
    for dq in (False, True):
        for _, snaps in _datasets(mesh, dq):
            C = sobolev_constant(snaps.T)
            for space in SPACES:
                basis = compute_pod(snaps, space)
                for W in SPACES:
                    for r in range(1, basis.s):
                        q = optimality_quantities(snaps, basis, r, W)
                        order.add(q.lambda_II / q.lambda_I)
                        if W is space:
                            equal.add(_rel(q.lambda_I, q.lambda_II, 0.0))
                        if dq:
                            star.add(q.lambda_star / (C * q.lambda_II))
    return [order.row(), equal.row(), star.row()]


def _smooth_solution(mesh, nu: float = 1.0):
    """``exp(-t) sin(pi x)`` with forcing built from the discrete eigenvalue of the
    nodal sine, so the reduced model has no spatial consistency error."""
    h = mesh.h
    lam_h = 6.0 / h**2 * (1.0 - np.cos(np.pi * h)) / (2.0 + np.cos(np.pi * h))
    return custom(lambda x, t: np.exp(-t) * np.sin(np.pi * x),
                  lambda x, t: (nu * lam_h - 1.0) * np.exp(-t) * np.sin(np.pi * x), "smooth", nu)


def cn_errors(mesh, dts=(1 / 8, 1 / 16, 1 / 32), T: float = 1.0) -> list:
    sol = _smooth_solution(mesh)
    errs = []
    for dt in dts:
        N = round(T / dt)
        snaps = generate_snapshots(sol, mesh, T, N, with_dq=False)
        basis = compute_pod(snaps)
        model = assemble_rom(basis, basis.s, sol.nu, sol)
        a0 = rom_initial_condition(basis, basis.s, snaps.U[:, 0], "l2")
        errs.append(rom_errors(cn_solve(model, a0, dt, N), sol).max_W)
    return errs


def check_cn(mesh, rng) -> list:
    order = _Row("cn_observed_order", 1.9, mode="min")
    errs = np.array(cn_errors(mesh))
    for rate in np.log2(errs[:-1] / errs[1:]):
        order.add(float(rate))

    stab = _Row("cn_energy_increase", 1e-12)
    snaps = generate_snapshots(cex1(Cex1Params(128)), mesh, 1.0, 16, True)
    zero = custom(lambda x, t: 0.0 * x, lambda x, t: 0.0 * x, "zero")
    for space in SPACES:
        basis = compute_pod(snaps, space)
        for r in (1, basis.s // 2, basis.s):
            model = assemble_rom(basis, r, 1.0, zero)
            for dt in (1e-4, 1e-2, 1.0, 100.0):
                traj = cn_solve(model, rng.standard_normal(r), dt, 20)
                A = traj.coeffs
                energy = np.sqrt(np.einsum("ni,ij,nj->n", A, model.mass, A))
                stab.add(float(np.max(np.diff(energy) / energy[:-1])))
    return [order.row(), stab.row()]


def rom_constants(mesh) -> list:
    """Observed ROM-bound constants over a coarse Δt sweep (informational)."""
    rows = []
    for dq in (False, True):
        row = _Row(f"rom_constant_{'dq' if dq else 'nodq'}_cex1", np.nan)
        for dt in (1 / 4, 1 / 8, 1 / 16):
            N = round(1 / dt)
            sol = cex1(Cex1Params(128))
            snaps = generate_snapshots(sol, mesh, 1.0, N, dq)
            basis = compute_pod(snaps)
            model = assemble_rom(basis, N, sol.nu, sol)
            a0 = rom_initial_condition(basis, N, snaps.U[:, 0], "ritz" if dq else "l2")
            rep = rom_errors(cn_solve(model, a0, dt, N), sol)
            row.add(rom_ratio(rep, basis, N, dt, "DQ" if dq else "noDQ"))
        rows.append(row.row(informational=True))
    return rows


def run_property_suite(config: StudyConfig) -> TableReport:
    rng = np.random.default_rng(config.seed)
    mesh = build_mesh(config.n_elems)
    rows = []
    rows += check_identities(mesh)
    rows += check_sobolev(mesh, rng)
    rows += check_projection_bounds(mesh, rng)
    rows += check_optimality(mesh)
    rows += check_cn(mesh, rng)
    rows += rom_constants(mesh)
    prov = {"seed": config.seed, "h": config.h, "suite": "properties"}
    return TableReport("properties", HEADERS, rows, prov)


def suite_passed(report: TableReport) -> bool:
    return all(row[-1] is not False for row in report.rows)
