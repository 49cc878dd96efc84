"""Reproduction studies for the two counterexamples.

Every study is a pure function of its configuration. Cells (one per time
step, rank and case) are independent; with ``jobs > 1`` they run on a thread
pool but rows are always assembled in input order.
"""
from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .. import __version__
from ..fem1d import SpaceTag, build_mesh
from ..pod import compute_pod
from ..projections import assumption_ratio, pointwise_errors
from ..rom import assemble_rom, cn_solve, rom_errors, rom_initial_condition, rom_ratio
from ..snapshots import Cex1Params, Cex2Params, cex1, cex2, generate_snapshots, steps
from .config import ConfigError, StudyConfig, validate
from .report import TableReport

CEX1_DTS = [1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128]
CEX1_K8_DTS = [1 / 2, 1 / 4, 1 / 8]
CEX2_DTS = [0.05, 0.04, 0.02, 0.01]


def _map(fn, items, jobs: int = 1) -> list:
    if jobs <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _cases(config: StudyConfig) -> list:
    return [False, True] if config.dq is None else [bool(config.dq)]


def _case_name(dq: bool) -> str:
    return "dq" if dq else "nodq"


def _dt_label(dt: float) -> str:
    inv = 1.0 / dt
    return f"1/{round(inv)}" if abs(inv - round(inv)) < 1e-9 and inv > 1 else f"{dt:g}"


def resolve(config: StudyConfig, study: str) -> StudyConfig:
    """Fill unset fields with the defaults of ``study`` and validate."""
    c = dataclasses.replace(config)
    if study.startswith("cex1"):
        if c.example != "cex1":
            raise ConfigError(f"study {study} needs example=cex1, got {c.example}")
        c.k = 128 if c.k is None else c.k
        c.T = 1.0 if c.T is None else c.T
        if c.dt_list is None:
            c.dt_list = list(CEX1_K8_DTS if (study == "cex1-rom" and c.k == 8) else CEX1_DTS)
        if c.per_step_dt is None and study == "cex1-proj":
            c.per_step_dt = 1 / 16
    elif study == "cex2":
        if c.example != "cex2":
            raise ConfigError(f"study cex2 needs example=cex2, got {c.example}")
        c.k = 100 if c.k is None else c.k
        c.T = 0.2 if c.T is None else c.T
        c.dt_list = list(CEX2_DTS) if c.dt_list is None else c.dt_list
        c.proj_r = 4 if c.proj_r is None else c.proj_r
        c.rom_dt = 0.01 if c.rom_dt is None else c.rom_dt
        c.rom_T = 0.05 if c.rom_T is None else c.rom_T
        c.r_list = list(range(1, 7)) if c.r_list is None else c.r_list
    else:
        raise ConfigError(f"unknown study {study!r}")
    validate(c)
    if study == "cex2":
        steps(c.rom_T, c.rom_dt)
        steps(c.T, c.rom_dt)
    return c


def _provenance(config: StudyConfig, study: str, **extra) -> dict:
    prov = {"study": study, "config": config.snapshot(), "version": __version__}
    prov.update(extra)
    return prov


def _solution(config: StudyConfig):
    if config.example == "cex1":
        return cex1(Cex1Params(config.k, config.nu))
    return cex2(Cex2Params(config.k, config.alpha, config.delta, config.nu))


def _basis(config: StudyConfig, dt: float, dq: bool, T: float | None = None):
    sol = _solution(config)
    mesh = build_mesh(config.n_elems)
    T = config.T if T is None else T
    snaps = generate_snapshots(sol, mesh, T, steps(T, dt), with_dq=dq)
    return sol, snaps, compute_pod(snaps, config.space)


def _filter(reports: list, config: StudyConfig) -> list:
    if config.table is None:
        return reports
    chosen = [r for r in reports if r.label == config.table]
    if not chosen:
        raise ConfigError(f"no table {config.table!r}; available: {', '.join(r.label for r in reports)}")
    return chosen


def study_cex1_projection(config: StudyConfig, jobs: int = 1) -> list:
    """Per-step projection errors and last-step scaling factors (r = N)."""
    c = resolve(config, "cex1-proj")
    W = c.space
    reports = []
    for dq in _cases(c):
        name = _case_name(dq)
        _, snaps, basis = _basis(c, c.per_step_dt, dq)
        r = snaps.N
        series = pointwise_errors(snaps, basis, r, W)
        reports.append(TableReport(
            f"cex1-proj-{name}-steps", ["n", f"proj_error_{W.value}"],
            [[n, float(e)] for n, e in enumerate(series.errors)],
            _provenance(c, "cex1-proj", case=name, dt=c.per_step_dt, r=r, r_rule="r=N"),
        ))

        def cell(dt, dq=dq):
            _, snaps, basis = _basis(c, dt, dq)
            r = snaps.N
            series = pointwise_errors(snaps, basis, r, W)
            return [_dt_label(dt), snaps.N, r, assumption_ratio(series, basis, r, W, index=snaps.N)]

        reports.append(TableReport(
            f"cex1-proj-{name}-scaling", ["dt", "N", "r", f"C_proj_{name}"],
            _map(cell, c.dt_list, jobs),
            _provenance(c, "cex1-proj", case=name, r_rule="r=N", index="n=N"),
        ))
    return _filter(reports, c)


def rom_cell(sol, snaps, basis, r: int, dq: bool, ic_kind: str | None, rom_dt: float,
             rom_N: int, nu: float, midpoint: bool = False) -> dict:
    """Run one ROM and evaluate its ratio against the matching error bound."""
    kind = ic_kind or ("ritz" if dq else "l2")
    model = assemble_rom(basis, r, nu, sol, midpoint_forcing=midpoint)
    a0 = rom_initial_condition(basis, r, snaps.U[:, 0], kind)
    traj = cn_solve(model, a0, rom_dt, rom_N)
    report = rom_errors(traj, sol)
    ratio = rom_ratio(report, basis, r, rom_dt, "DQ" if dq else "noDQ")
    return {"max_e2": report.max_L2_sq, "ratio": ratio, "denominator": report.max_L2_sq / ratio,
            "report": report, "traj": traj}


def study_cex1_rom(config: StudyConfig, jobs: int = 1) -> list:
    """ROM error ratios over the time-step sweep; r = N unless ``r_list`` is given."""
    c = resolve(config, "cex1-rom")
    reports = []
    for dq in _cases(c):
        name = _case_name(dq)
        items = [(dt, r) for dt in c.dt_list for r in (c.r_list or [None])]

        def cell(item, dq=dq):
            dt, r = item
            sol, snaps, basis = _basis(c, dt, dq)
            r = snaps.N if r is None else r
            out = rom_cell(sol, snaps, basis, r, dq, c.ic_kind, dt, snaps.N, c.nu, c.midpoint_forcing)
            return [_dt_label(dt), snaps.N, r, out["max_e2"], out["denominator"], out["ratio"]]

        reports.append(TableReport(
            f"cex1-rom-{name}-k{c.k}", ["dt", "N", "r", "max_err_L2_sq", "denominator", f"C_rom_{name}"],
            _map(cell, items, jobs),
            _provenance(c, "cex1-rom", case=name, r_rule="r=N" if c.r_list is None else "r_list",
                        ic_kind=c.ic_kind or ("ritz" if dq else "l2")),
        ))
    return _filter(reports, c)


def study_cex2(config: StudyConfig, jobs: int = 1) -> list:
    """Projection scaling at fixed r over Δt, and ROM ratios over r at fixed Δt."""
    c = resolve(config, "cex2")
    W = c.space
    params = Cex2Params(c.k, c.alpha, c.delta, c.nu)
    reports = []
    for dq in _cases(c):
        name = _case_name(dq)

        def proj_cell(dt, dq=dq):
            _, snaps, basis = _basis(c, dt, dq)
            r = c.proj_r
            series = pointwise_errors(snaps, basis, r, W)
            if dq:
                return [f"{dt:g}", snaps.N, r, assumption_ratio(series, basis, r, W)]
            ratio = assumption_ratio(series, basis, r, W, index=r) / (snaps.N + 1)
            return [f"{dt:g}", snaps.N, r, ratio, min(1.0, params.gamma(dt)) / 2]

        headers = ["dt", "N", "r", f"C_proj_{name}"] + ([] if dq else ["lower_bound"])
        reports.append(TableReport(
            f"cex2-proj-{name}", headers, _map(proj_cell, c.dt_list, jobs),
            _provenance(c, "cex2", case=name, index="max over n" if dq else "n=r"),
        ))

        sol, snaps, basis = _basis(c, c.rom_dt, dq)
        rom_N = steps(c.rom_T, c.rom_dt)

        def rom_row(r, dq=dq, sol=sol, snaps=snaps, basis=basis):
            out = rom_cell(sol, snaps, basis, r, dq, c.ic_kind, c.rom_dt, rom_N, c.nu, c.midpoint_forcing)
            return [r, out["max_e2"], out["denominator"], out["ratio"]]

        reports.append(TableReport(
            f"cex2-rom-{name}", ["r", "max_err_L2_sq", "denominator", f"C_rom_{name}"],
            _map(rom_row, c.r_list, jobs),
            _provenance(c, "cex2", case=name, basis_T=c.T, error_T=c.rom_T, dt=c.rom_dt,
                        ic_kind=c.ic_kind or ("ritz" if dq else "l2")),
        ))
    return _filter(reports, c)


STUDIES = {
    "cex1-proj": study_cex1_projection,
    "cex1-rom": study_cex1_rom,
    "cex2": study_cex2,
}


def run_study(name: str, config: StudyConfig, jobs: int = 1) -> list:
    if name not in STUDIES:
        raise ConfigError(f"unknown study {name!r}")
    return STUDIES[name](config, jobs)


def column_values(report: TableReport, header_prefix: str = "C_") -> np.ndarray:
    """Numeric values of the first column whose header starts with ``header_prefix``."""
    name = next(h for h in report.headers if h.startswith(header_prefix))
    return np.array(report.column(name), dtype=float)
