import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from podrom.fem1d import SpaceTag, build_mesh, column_norms_sq, gram, interpolate
from podrom.pod import compute_pod, correlation_matrix, pod_project, save_basis_csv, total_error_identity
from podrom.snapshots import Cex2Params, SnapshotSet, cex2, generate_snapshots


def _unit_pair(mesh):
    u = interpolate(lambda x: np.sin(np.pi * x), mesh)
    u = u / np.sqrt(column_norms_sq(u, mesh, "l2"))
    return u, SnapshotSet(np.column_stack([u, u]), 0.1, mesh)


def test_repeated_unit_snapshot(mesh256):
    u, snaps = _unit_pair(mesh256)
    K = correlation_matrix(snaps, "l2").K
    assert_allclose(K, 0.5 * np.ones((2, 2)), rtol=1e-12)
    basis = compute_pod(snaps)
    assert basis.s == 1
    assert_allclose(basis.eigenvalues, [1.0], rtol=1e-12)
    assert_allclose(basis.modes[:, 0], u, atol=1e-12)


def test_correlation_matrix_scales_quadratically(cex1_nodq):
    K1 = correlation_matrix(cex1_nodq).K
    scaled = SnapshotSet(3 * cex1_nodq.U, cex1_nodq.dt, cex1_nodq.mesh)
    assert_allclose(correlation_matrix(scaled).K, 9 * K1, rtol=1e-12, atol=1e-15)


def _discrete_sine_norms(snaps):
    # nodal sin(j pi x) has squared mass norm (2 + cos(j pi h)) / 6 exactly
    j = 8 * np.arange(17) + 1
    return (2 + np.cos(j * np.pi * snaps.mesh.h)) / 6


def test_cex1_correlation_is_diagonal(cex1_nodq):
    K = correlation_matrix(cex1_nodq).K
    assert_allclose(K, np.diag(_discrete_sine_norms(cex1_nodq)) / 17, rtol=1e-12, atol=1e-15)


def test_cex1_eigenvalues_all_equal(cex1_nodq):
    basis = compute_pod(cex1_nodq)
    assert basis.s == 17
    assert_allclose(basis.eigenvalues, np.sort(_discrete_sine_norms(cex1_nodq))[::-1] / 17, rtol=1e-12)
    # continuum value 1/(2(N+1)), up to the O((k h)^2) quadrature error of sin(129 pi x)
    assert_allclose(basis.eigenvalues, 1 / 34, rtol=2e-3)


def test_cex2_spectrum_is_geometric(mesh4096):
    p, dt = Cex2Params(), 0.02
    snaps = generate_snapshots(cex2(p, dt), mesh4096, 0.2, 10)
    lam = compute_pod(snaps).eigenvalues
    assert_allclose(lam[:-1] / lam[1:], np.exp(p.gamma(dt)), rtol=1e-3)
    assert_allclose(lam, p.eigenvalues(dt, 0.2), rtol=1e-4)


@pytest.mark.parametrize("space", list(SpaceTag))
@pytest.mark.parametrize("fixture", ["cex1_nodq", "cex1_dq"])
def test_modes_orthonormal_and_sorted(space, fixture, request):
    snaps = request.getfixturevalue(fixture)
    basis = compute_pod(snaps, space)
    P = basis.modes
    assert np.abs(P.T @ (gram(snaps.mesh, space) @ P) - np.eye(basis.s)).max() < 1e-10
    assert np.all(np.diff(basis.eigenvalues) <= 0)
    assert basis.s <= snaps.columns.shape[1]
    assert basis.weight == snaps.weight


def test_sign_convention(cex1_dq):
    P = compute_pod(cex1_dq).modes
    assert np.all(P[np.argmax(np.abs(P), axis=0), np.arange(P.shape[1])] > 0)


def test_pod_project_oracles(cex1_nodq):
    basis = compute_pod(cex1_nodq)
    phi = basis.modes[:, 0]
    assert_allclose(pod_project(basis, 1, phi), phi, atol=1e-10)
    u = cex1_nodq.U[:, 7]
    assert_allclose(pod_project(basis, basis.s, u), u, atol=1e-8)
    # the snapshot with the smallest eigenvalue is the one left out at r = N
    u16 = cex1_nodq.U[:, 16]
    err = np.sqrt(column_norms_sq(u16 - pod_project(basis, 16, u16), cex1_nodq.mesh, "l2"))
    assert abs(err - 1 / np.sqrt(2)) < 1e-2
    with pytest.raises(ValueError):
        pod_project(basis, 0, u)
    with pytest.raises(ValueError):
        pod_project(basis, basis.s + 1, u)


def test_all_zero_snapshots_rejected(mesh256):
    with pytest.raises(ValueError):
        compute_pod(SnapshotSet(np.zeros((mesh256.n_dof, 3)), 0.1, mesh256))


def test_identity_full_rank_is_zero(cex1_dq):
    basis = compute_pod(cex1_dq)
    lhs, rhs = total_error_identity(cex1_dq, basis, basis.s)
    assert lhs <= 1e-10 * basis.eigenvalues[0] and rhs == 0.0


@pytest.mark.parametrize("r", [1, 5, 11, 16])
def test_identity_cex1_tail(cex1_nodq, r):
    basis = compute_pod(cex1_nodq)
    lhs, rhs = total_error_identity(cex1_nodq, basis, r, "l2", "pod")
    assert_allclose(lhs, basis.eigenvalues[r:].sum(), rtol=1e-8)
    assert_allclose(lhs, rhs, rtol=1e-8)


def test_identity_dq_h1_ritz(mesh4096):
    snaps = generate_snapshots(cex2(Cex2Params()), mesh4096, 0.2, 10, with_dq=True)
    basis = compute_pod(snaps, "l2")
    for r in range(1, basis.s):
        lhs, rhs = total_error_identity(snaps, basis, r, "h1", "ritz")
        assert_allclose(lhs, rhs, rtol=1e-8)


def test_total_error_monotone_in_r(cex1_dq):
    basis = compute_pod(cex1_dq, "h1")
    totals = [total_error_identity(cex1_dq, basis, r, "h1")[0] for r in range(1, basis.s + 1)]
    assert np.all(np.diff(totals) <= 1e-12 * totals[0])


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n_cols=st.integers(2, 9), dq=st.booleans(),
       space=st.sampled_from(list(SpaceTag)))
def test_random_snapshots_identity_and_permutation(seed, n_cols, dq, space):
    rng = np.random.default_rng(seed)
    mesh = build_mesh(32)
    snaps = SnapshotSet(rng.standard_normal((mesh.n_dof, n_cols)), 0.1, mesh)
    snaps = snaps.with_dq() if dq else snaps
    basis = compute_pod(snaps, space)
    for r in range(1, basis.s + 1):
        lhs, rhs = total_error_identity(snaps, basis, r, space)
        assert abs(lhs - rhs) <= 1e-8 * max(lhs, rhs, 1e-10 * basis.eigenvalues[0])
        assert_allclose(lhs, basis.eigenvalues[r:].sum(), rtol=1e-8, atol=1e-12 * basis.eigenvalues[0])
    perm = rng.permutation(n_cols)
    shuffled = SnapshotSet(snaps.U[:, perm], snaps.dt, mesh)
    if not dq:
        assert_allclose(compute_pod(shuffled, space).eigenvalues, basis.eigenvalues, rtol=1e-10)


def test_basis_csv(tmp_path, cex2_small):
    basis = compute_pod(cex2_small)
    path = tmp_path / "basis.csv"
    save_basis_csv(basis, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "eigenvalue"
    assert_allclose([float(v) for v in rows[0][1:]], basis.eigenvalues, rtol=1e-15)
    assert len(rows) == 1 + basis.mesh.n_dof
    assert_allclose(np.array(rows[1:], dtype=float)[:, 1:], basis.modes, rtol=1e-15)
