"""Command line entry point: ``podrom study|props|basis|rom|snapshots``.

Exit codes: 0 success, 1 invalid configuration, 2 numerical failure,
3 property-suite failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from ..fem1d import build_mesh
from ..pod import compute_pod, save_basis_csv
from ..rom import assemble_rom, cn_solve, rom_errors, rom_initial_condition, rom_ratio, save_trajectory_csv
from ..snapshots import GridError, generate_snapshots, save_snapshots_csv, steps
from .config import ConfigError, load_config, validate
from .properties import run_property_suite, suite_passed
from .report import emit_all, write_reports
from .studies import STUDIES, _solution

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PROPS = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat YAML file with StudyConfig keys")
    p.add_argument("--example", choices=["cex1", "cex2", "custom"])
    p.add_argument("--k", type=int)
    p.add_argument("--alpha")
    p.add_argument("--delta")
    p.add_argument("--nu")
    p.add_argument("--T", dest="T")
    p.add_argument("--h", help="mesh width, e.g. 1/4096")
    p.add_argument("--space", choices=["l2", "h1"])
    dq = p.add_mutually_exclusive_group()
    dq.add_argument("--dq", dest="dq", action="store_const", const=True)
    dq.add_argument("--no-dq", dest="dq", action="store_const", const=False)
    p.add_argument("--ic", dest="ic_kind", choices=["l2", "ritz"])
    p.add_argument("--seed", type=int)


def _overrides(args, keys) -> dict:
    return {k: getattr(args, k, None) for k in keys}


COMMON_KEYS = ("example", "k", "alpha", "delta", "nu", "T", "h", "space", "dq", "ic_kind", "seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="podrom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    st = sub.add_parser("study", help="reproduce a table set")
    st.add_argument("study", choices=sorted(STUDIES))
    _common(st)
    st.add_argument("--dt", dest="dt_list", help="comma separated time steps, e.g. 1/4,1/8")
    st.add_argument("--r", dest="r_list", help="comma separated ranks")
    st.add_argument("--proj-r", dest="proj_r", type=int)
    st.add_argument("--rom-dt", dest="rom_dt")
    st.add_argument("--rom-T", dest="rom_T")
    st.add_argument("--per-step-dt", dest="per_step_dt")
    st.add_argument("--midpoint-forcing", dest="midpoint_forcing", action="store_const", const=True)
    st.add_argument("--table", help="emit only the table with this label")
    st.add_argument("--out", dest="output", help="output directory; stdout if omitted")
    st.add_argument("--format", choices=["csv", "md"])
    st.add_argument("--jobs", type=int, default=1)

    pr = sub.add_parser("props", help="run the property suite")
    pr.add_argument("--config")
    pr.add_argument("--seed", type=int)
    pr.add_argument("--h", help="mesh width (default 1/256 for the suite)")
    pr.add_argument("--out", dest="output")
    pr.add_argument("--format", choices=["csv", "md"])

    ba = sub.add_parser("basis", help="export a POD basis as CSV")
    _common(ba)
    ba.add_argument("--dt", required=True)
    ba.add_argument("--out", required=True)

    sn = sub.add_parser("snapshots", help="export snapshots as CSV")
    _common(sn)
    sn.add_argument("--dt", required=True)
    sn.add_argument("--out", required=True)

    rom = sub.add_parser("rom", help="reduced-order model runs")
    rsub = rom.add_subparsers(dest="rom_command", required=True)
    run = rsub.add_parser("run", help="solve one ROM and report its errors")
    _common(run)
    run.add_argument("--dt", required=True)
    run.add_argument("--r", type=int, required=True)
    run.add_argument("--rom-T", dest="rom_T")
    run.add_argument("--midpoint-forcing", dest="midpoint_forcing", action="store_const", const=True)
    run.add_argument("--out", help="trajectory CSV path")
    return parser


def _single(args, extra: dict):
    """Config, solution, mesh and snapshots for the single-run commands."""
    config = load_config(args.config, {**_overrides(args, COMMON_KEYS), **extra})
    if config.example == "custom":
        raise ConfigError("custom solutions are only available through the Python API")
    defaults = {"cex1": (128, 1.0), "cex2": (100, 0.2)}[config.example]
    config = dataclasses.replace(config, k=config.k or defaults[0], T=config.T or defaults[1])
    validate(config)
    dt = config.dt_list[0]
    sol = _solution(config)
    snaps = generate_snapshots(sol, build_mesh(config.n_elems), config.T, steps(config.T, dt), bool(config.dq))
    return config, sol, snaps, dt


def _run(args) -> int:
    if args.command == "study":
        keys = COMMON_KEYS + ("dt_list", "r_list", "proj_r", "rom_dt", "rom_T", "per_step_dt",
                              "midpoint_forcing", "table", "output", "format")
        default_example = "cex2" if args.study == "cex2" else "cex1"
        config = load_config(args.config, _overrides(args, keys), {"example": default_example})
        validate(config)
        reports = STUDIES[args.study](config, args.jobs)
        if config.output:
            for path in write_reports(reports, config.output, config.format):
                print(path)
        else:
            sys.stdout.buffer.write(emit_all(reports, config.format))
        return EXIT_OK

    if args.command == "props":
        config = load_config(args.config, _overrides(args, ("seed", "h", "output", "format")), {"h": "1/256"})
        report = run_property_suite(config)
        if config.output:
            write_reports([report], config.output, config.format)
        sys.stdout.buffer.write(emit_all([report], config.format))
        return EXIT_OK if suite_passed(report) else EXIT_PROPS

    if args.command in ("basis", "snapshots"):
        config, _, snaps, _ = _single(args, {"dt_list": args.dt})
        if args.command == "basis":
            basis = compute_pod(snaps, config.space)
            save_basis_csv(basis, args.out)
            print(f"{args.out}: s={basis.s} lambda_1={basis.eigenvalues[0]:.6e}")
        else:
            save_snapshots_csv(snaps, args.out)
            print(f"{args.out}: {snaps.U.shape[0]} nodes x {snaps.N + 1} snapshots")
        return EXIT_OK

    if args.command == "rom":
        config, sol, snaps, dt = _single(args, {"dt_list": args.dt, "rom_T": args.rom_T,
                                                "midpoint_forcing": args.midpoint_forcing})
        dq = bool(config.dq)
        basis = compute_pod(snaps, config.space)
        rom_T = config.rom_T or config.T
        n_steps = steps(rom_T, dt)
        model = assemble_rom(basis, args.r, config.nu, sol, config.midpoint_forcing)
        kind = config.ic_kind or ("ritz" if dq else "l2")
        traj = cn_solve(model, rom_initial_condition(basis, args.r, snaps.U[:, 0], kind), dt, n_steps)
        rep = rom_errors(traj, sol)
        if args.out:
            save_trajectory_csv(traj, args.out)
        ratio = rom_ratio(rep, basis, args.r, dt, "DQ" if dq else "noDQ") if args.r < basis.s else float("nan")
        print(f"max_err_L2_sq={rep.max_L2_sq:.6e} final_L2={rep.final_L2:.6e} "
              f"energy={rep.energy:.6e} C_rom={ratio:.6e}")
        return EXIT_OK
    return EXIT_CONFIG


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ConfigError, GridError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
