"""Command-line interface.

Every subcommand reads an optional dotted-key config file, applies flag
overrides, runs one experiment, and writes CSV or JSON to --out (stdout by
default). Outputs embed the resolved configuration for provenance.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .atoms import coherence_ratio, entanglement_rabi_bound, steady_state
from .config import ExperimentConfig
from .correlations import MomentSpec, moment
from .errors import ConfigError
from .experiments import (
    chain_positions,
    optimize_scale,
    run_angle_scan,
    run_monte_carlo,
    run_random_ensemble,
    run_threshold_map,
    verify_spot_checks,
    scene_from_positions,
)
from .geometry import detector_in_plane, phase_factors
from .kernels import BACKEND
from .oracle import MAX_ATOMS, build_joint_state, oracle_moment
from .output import csv_text, emit, json_text
from .trap import E_CHARGE, build_chain, equilibrium_positions, max_scale, force_residual


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resfluo",
        description="Entanglement witnesses for fluorescence of regular atom arrays",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="dotted-key config file")
    common.add_argument("--seed", type=int, help="override mc.seed")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), dest="fmt")
    common.add_argument(
        "--verify",
        action="store_true",
        help="re-check emitted minors against the brute-force backend (N <= 6)",
    )

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("steady", parents=[common], help="stationary state and thresholds")
    sub.add_parser("scan-angle", parents=[common], help="normalized minor vs phi2")
    sub.add_parser("threshold", parents=[common], help="drive bound map over (N, gamma2, detuning)")
    sub.add_parser("trap", parents=[common], help="chain equilibria and jitter budget")
    sub.add_parser("optimize", parents=[common], help="best trap scale on the search interval")
    mc = sub.add_parser("mc", parents=[common], help="jitter Monte Carlo at the optimized scale")
    mc.add_argument("--workers", type=int, default=1, help="thread count (results identical)")
    sub.add_parser("random", parents=[common], help="minor statistics for random placements")
    mom = sub.add_parser("moments", parents=[common], help="one normally ordered moment")
    mom.add_argument(
        "--powers", nargs=4, type=int, required=True, metavar=("P", "Q", "R", "S"),
        help="powers of A1+, A2+, A1, A2",
    )
    ver = sub.add_parser("verify", parents=[common], help="engine vs brute-force spot checks")
    ver.add_argument("--trials", type=int, default=25)
    return parser


def _load_config(args) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config.mc_seed = args.seed
    return config


def _report_out(args, payload: dict, default_fmt: str = "json") -> None:
    fmt = args.fmt or default_fmt
    if fmt == "json":
        emit(json_text(payload), args.out)
    else:
        rows = _flatten_report(payload)
        emit(csv_text(["key", "value"], rows), args.out)


def _flatten_report(payload: dict, prefix: str = "") -> list:
    rows = []
    for key in sorted(payload):
        value = payload[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten_report(value, prefix=f"{name}."))
        elif isinstance(value, (list, tuple)):
            rows.append([name, " ".join(str(v) for v in value)])
        else:
            rows.append([name, value])
    return rows


def cmd_steady(args) -> int:
    config = _load_config(args)
    params = config.atom_params()
    state = steady_state(params)
    bounds = {
        str(n): entanglement_rabi_bound(n, config.gamma1, config.gamma2, config.detuning)
        for n in config.n_atoms
    }
    payload = {
        "config": config.resolved(),
        "report": {
            "rabi": params.rabi,
            "sigma22": state.sigma22,
            "sigma21_real": state.sigma21.real,
            "sigma21_imag": state.sigma21.imag,
            "coherence_ratio": coherence_ratio(params) if params.rabi > 0 else None,
            "beta": state.beta,
            "rabi_max": bounds,
        },
    }
    _report_out(args, payload)
    return 0


def cmd_scan_angle(args) -> int:
    config = _load_config(args)
    scan = run_angle_scan(config, verify=args.verify)
    ns = sorted(scan.n_values)
    fmt = args.fmt or "csv"
    if fmt == "csv":
        header = ["phi2_rad"] + [f"mu_norm_n{n}" for n in ns]
        rows = [
            [float(scan.phi2[i])] + [float(scan.columns[n][i]) for n in ns]
            for i in range(scan.phi2.size)
        ]
        emit(csv_text(header, rows, provenance=config.resolved()), args.out)
    else:
        payload = {
            "config": config.resolved(),
            "phi2_rad": [float(v) for v in scan.phi2],
            "mu_norm": {str(n): [float(v) for v in scan.columns[n]] for n in ns},
        }
        emit(json_text(payload), args.out)
    return 0


def cmd_threshold(args) -> int:
    config = _load_config(args)
    rows = run_threshold_map(config)
    fmt = args.fmt or "csv"
    if fmt == "csv":
        header = ["n", "gamma2", "detuning", "rabi_max", "entangled_possible", "squeezed_possible"]
        data = [
            [r.n_atoms, r.gamma2, r.detuning, r.rabi_max, r.entangled_possible, r.squeezed_possible]
            for r in rows
        ]
        emit(csv_text(header, data, provenance=config.resolved()), args.out)
    else:
        payload = {
            "config": config.resolved(),
            "rows": [
                {
                    "n": r.n_atoms,
                    "gamma2": r.gamma2,
                    "detuning": r.detuning,
                    "rabi_max": r.rabi_max,
                    "entangled_possible": r.entangled_possible,
                    "squeezed_possible": r.squeezed_possible,
                }
                for r in rows
            ],
        }
        emit(json_text(payload), args.out)
    return 0


def cmd_trap(args) -> int:
    config = _load_config(args)
    n = config.single_n()
    chain = build_chain(
        n, config.trap_scale_lambda, config.mass_kg, config.charge_e, config.wavelength_m
    )
    gamma_max = max_scale(
        config.mass_kg, config.charge_e * E_CHARGE, config.wavelength_m,
        config.jitter_cap_lambda,
    )
    payload = {
        "config": config.resolved(),
        "report": {
            "count": chain.count,
            "scale_lambda": chain.scale_lambda,
            "positions": [float(v) for v in chain.positions],
            "force_residual_max": float(np.max(np.abs(force_residual(chain.positions)))) if n > 1 else 0.0,
            "delta_z_m": chain.delta_z_m,
            "delta_z_lambda": chain.delta_z_lambda,
            "gamma_max_lambda": gamma_max,
        },
    }
    _report_out(args, payload)
    return 0


def cmd_optimize(args) -> int:
    config = _load_config(args)
    n = config.single_n()
    state = config.state()
    u = equilibrium_positions(n)
    opt = optimize_scale(
        u, state, config.dipole, config.laser, config.detector1,
        detector_in_plane(config.phi2_rad),
        config.gamma_min_lambda, config.gamma_max_lambda,
    )
    payload = {
        "config": config.resolved(),
        "report": {
            "gamma_star": opt.gamma_star,
            "mu_ideal": opt.mu_ideal,
            "interval": [config.gamma_min_lambda, config.gamma_max_lambda],
        },
    }
    _report_out(args, payload)
    return 0


def cmd_mc(args) -> int:
    config = _load_config(args)
    report = run_monte_carlo(config, workers=args.workers, verify=args.verify)
    payload = {"config": config.resolved(), "report": report.as_dict(), "backend": BACKEND}
    _report_out(args, payload)
    return 0


def cmd_random(args) -> int:
    config = _load_config(args)
    report = run_random_ensemble(config, verify=args.verify)
    payload = {"config": config.resolved(), "report": report.as_dict()}
    _report_out(args, payload)
    return 0


def cmd_moments(args) -> int:
    config = _load_config(args)
    n = config.single_n()
    state = config.state()
    spec = MomentSpec(*args.powers)
    positions = chain_positions(config, n)
    scene = scene_from_positions(config, positions, config.phi2_rad)
    phases = phase_factors(scene)
    value = moment(phases, state, spec)
    report = {
        "p": spec.p,
        "q": spec.q,
        "r": spec.r,
        "s": spec.s,
        "real": value.real,
        "imag": value.imag,
        "exceeds_order": spec.exceeds(n),
    }
    if args.verify:
        if n > MAX_ATOMS:
            raise ConfigError(f"--verify needs atoms.n <= {MAX_ATOMS}")
        ref = oracle_moment(build_joint_state(state, n), phases, spec)
        report["oracle_real"] = ref.real
        report["oracle_imag"] = ref.imag
    _report_out(args, {"config": config.resolved(), "report": report})
    return 0


def cmd_verify(args) -> int:
    config = _load_config(args)
    seed = config.mc_seed if config.mc_seed is not None else 0
    result = verify_spot_checks(config, seed=seed, trials=args.trials)
    ok = result["worst_minor_rel"] < 1e-10 and result["worst_moment_rel"] < 1e-10
    payload = {
        "config": config.resolved(),
        "report": {**result, "ok": ok, "trials": args.trials},
    }
    _report_out(args, payload)
    return 0 if ok else 1


_COMMANDS = {
    "steady": cmd_steady,
    "scan-angle": cmd_scan_angle,
    "threshold": cmd_threshold,
    "trap": cmd_trap,
    "optimize": cmd_optimize,
    "mc": cmd_mc,
    "random": cmd_random,
    "moments": cmd_moments,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
