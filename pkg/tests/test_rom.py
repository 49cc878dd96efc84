import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from podrom.fem1d import SpaceTag, build_mesh, column_norms_sq, mass_matrix, stiffness_matrix
from podrom.pod import compute_pod
from podrom.projections import project
from podrom.rom import (RomTrajectory, assemble_rom, cn_solve, load_trajectory_csv, rom_errors,
                        rom_initial_condition, rom_ratio, save_trajectory_csv)
from podrom.snapshots import Cex1Params, cex1, custom, generate_snapshots

ZERO = custom(lambda x, t: 0.0 * x, lambda x, t: 0.0 * x, "zero")


def _decay(nu=1.0):
    return custom(lambda x, t: np.exp(-t) * np.sin(np.pi * x),
                  lambda x, t: (nu * np.pi**2 - 1) * np.exp(-t) * np.sin(np.pi * x), "decay", nu)


@pytest.fixture(scope="module")
def basis_l2(cex1_dq):
    return compute_pod(cex1_dq, "l2")


def test_reduced_matrices(basis_l2, cex1_dq):
    model = assemble_rom(basis_l2, 1, 1.0, ZERO)
    phi = basis_l2.modes[:, 0]
    assert_allclose(model.mass, [[1.0]], atol=1e-10)
    assert_allclose(model.stiffness, [[phi @ (stiffness_matrix(basis_l2.mesh) @ phi)]], rtol=1e-14)
    full = assemble_rom(basis_l2, basis_l2.s, 1.0, ZERO)
    assert_allclose(full.mass, np.eye(basis_l2.s), atol=1e-10)
    assert np.array_equal(full.mass, full.mass.T) and np.array_equal(full.stiffness, full.stiffness.T)
    assert np.linalg.eigvalsh(full.stiffness).min() > 0
    h1 = assemble_rom(compute_pod(cex1_dq, "h1"), 6, 1.0, ZERO)
    assert_allclose(h1.stiffness, np.eye(6), atol=1e-10)


def test_assemble_rejects_bad_input(basis_l2):
    with pytest.raises(ValueError):
        assemble_rom(basis_l2, basis_l2.s + 1, 1.0, ZERO)
    with pytest.raises(ValueError):
        assemble_rom(basis_l2, 2, 0.0, ZERO)


@pytest.mark.parametrize("kind", ["l2", "ritz"])
def test_initial_condition_in_span(basis_l2, kind, rng):
    c = rng.standard_normal(5)
    u0 = basis_l2.modes[:, :5] @ c
    assert_allclose(rom_initial_condition(basis_l2, 5, u0, kind), c, atol=1e-10)


def test_initial_condition_kinds(basis_l2, cex1_dq):
    u0 = cex1_dq.U[:, 3]
    r = 16
    c = rom_initial_condition(basis_l2, r, u0, "l2")
    M = mass_matrix(basis_l2.mesh)
    assert_allclose(c, basis_l2.modes[:, :r].T @ (M @ u0), atol=1e-12)
    cr = rom_initial_condition(basis_l2, r, u0, "ritz")
    assert_allclose(basis_l2.modes[:, :r] @ cr, project(basis_l2, r, u0, "ritz"), atol=1e-12)
    with pytest.raises(ValueError):
        rom_initial_condition(basis_l2, r, u0, "pod")


def test_zero_forcing_zero_state_stays_zero(basis_l2):
    model = assemble_rom(basis_l2, 4, 1.0, ZERO)
    traj = cn_solve(model, np.zeros(4), 0.1, 5)
    assert traj.coeffs.shape == (6, 4) and not traj.coeffs.any()
    rep = rom_errors(traj, ZERO)
    assert rep.max_W == 0 and rep.final_L2 == 0 and rep.energy == 0


def test_scalar_recurrence(basis_l2):
    nu, dt = 0.7, 0.05
    model = assemble_rom(basis_l2, 1, nu, ZERO)
    sigma = model.stiffness[0, 0]
    traj = cn_solve(model, np.array([2.0]), dt, 6)
    g = (1 / dt - nu * sigma / 2) / (1 / dt + nu * sigma / 2)
    assert_allclose(traj.coeffs[:, 0], 2.0 * g ** np.arange(7), rtol=1e-12)


def test_single_factorization(basis_l2, monkeypatch):
    calls = []
    real = scipy.linalg.cho_factor
    monkeypatch.setattr(scipy.linalg, "cho_factor", lambda *a, **k: calls.append(1) or real(*a, **k))
    cn_solve(assemble_rom(basis_l2, 3, 1.0, ZERO), np.ones(3), 0.1, 10)
    assert len(calls) == 1


def test_cn_rejects_bad_arguments(basis_l2):
    model = assemble_rom(basis_l2, 2, 1.0, ZERO)
    with pytest.raises(ValueError):
        cn_solve(model, np.ones(2), 0.1, 0)
    with pytest.raises(ValueError):
        cn_solve(model, np.ones(3), 0.1, 2)


def test_cn_second_order(mesh4096):
    sol = _decay()
    errs = []
    for N in (8, 16, 32):
        snaps = generate_snapshots(sol, mesh4096, 1.0, N)
        b = compute_pod(snaps)
        model = assemble_rom(b, b.s, sol.nu, sol)
        traj = cn_solve(model, rom_initial_condition(b, b.s, snaps.U[:, 0], "l2"), 1 / N, N)
        errs.append(rom_errors(traj, sol).max_W)
    rates = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(np.abs(rates - 2.0) <= 0.1)


def test_stability_without_forcing(basis_l2, rng):
    for dt in (1e-3, 0.1, 10.0):
        model = assemble_rom(basis_l2, basis_l2.s, 2.0, ZERO)
        A = cn_solve(model, rng.standard_normal(basis_l2.s), dt, 15).coeffs
        energy = np.einsum("ni,ij,nj->n", A, model.mass, A)
        assert np.all(np.diff(energy) <= 1e-12 * energy[0])


def test_error_report_fields(mesh256):
    sol = _decay()
    snaps = generate_snapshots(sol, mesh256, 1.0, 4)
    b = compute_pod(snaps)
    model = assemble_rom(b, 1, 1.0, sol)
    traj = cn_solve(model, rom_initial_condition(b, 1, snaps.U[:, 0]), 0.25, 4)
    rep = rom_errors(traj, sol, "h1")
    E = snaps.U - traj.fields()
    assert_allclose(rep.per_step_L2, np.sqrt(column_norms_sq(E[:, 1:], mesh256, "l2")))
    assert_allclose(rep.per_step_W, np.sqrt(column_norms_sq(E[:, 1:], mesh256, "h1")))
    assert rep.max_W == rep.per_step_W.max()
    assert rep.final_L2 == rep.per_step_L2[-1]
    mid = 0.5 * (E[:, 1:] + E[:, :-1])
    assert_allclose(rep.energy, 0.25 * column_norms_sq(mid, mesh256, "h1").sum())


def test_grid_mismatch_rejected(basis_l2):
    model = assemble_rom(basis_l2, 2, 1.0, cex1(Cex1Params(128)))
    traj = RomTrajectory(np.zeros((3, 2)), 1 / 200, basis_l2)
    with pytest.raises(ValueError, match="integer"):
        rom_errors(traj, model.sol)


def test_cex1_nodq_ratio(cex1_nodq):
    sol = cex1(Cex1Params(128))
    b = compute_pod(cex1_nodq)
    model = assemble_rom(b, 16, 1.0, sol)
    traj = cn_solve(model, rom_initial_condition(b, 16, cex1_nodq.U[:, 0], "l2"), 1 / 16, 16)
    c = rom_ratio(rom_errors(traj, sol), b, 16, 1 / 16, "noDQ")
    assert 1.0e-4 / 3 <= c <= 3 * 1.0e-4
    with pytest.raises(ValueError):
        rom_ratio(rom_errors(traj, sol), b, 16, 1 / 16, "other")
    with pytest.raises(ValueError):
        rom_ratio(rom_errors(traj, sol), b, 17, 1 / 16, "DQ")


def test_midpoint_forcing_switch(mesh4096):
    sol = _decay()
    snaps = generate_snapshots(sol, mesh4096, 1.0, 16)
    b = compute_pod(snaps)
    a0 = rom_initial_condition(b, 1, snaps.U[:, 0])
    avg = cn_solve(assemble_rom(b, 1, 1.0, sol), a0, 1 / 16, 16)
    mid = cn_solve(assemble_rom(b, 1, 1.0, sol, midpoint_forcing=True), a0, 1 / 16, 16)
    assert not np.array_equal(avg.coeffs, mid.coeffs)
    assert rom_errors(mid, sol).max_W < 1e-3 and rom_errors(avg, sol).max_W < 1e-3


def test_trajectory_csv_roundtrip(tmp_path, basis_l2, rng):
    traj = RomTrajectory(rng.standard_normal((5, 3)), 1 / 16, basis_l2)
    path = tmp_path / "traj.csv"
    save_trajectory_csv(traj, path)
    assert path.read_text().splitlines()[0] == "n,t,a1,a2,a3"
    back = load_trajectory_csv(path, basis_l2)
    assert np.array_equal(back.coeffs, traj.coeffs)
    assert back.dt == traj.dt
