#!/usr/bin/env python3
"""
Command-line front end.

Exit codes: 0 success, 1 domain error (reported as "ErrorName: message" on
standard error), 2 usage error. Results go to standard output or the
requested files; logs go to standard error.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

import numpy as np

import config
from control.pmp import ExtremalParams, extremal_traj, sample_extremal
from control.reach import ReachConfig, SystemKind, equivalence_gap, metric_bound, sample_reach
from control.timeopt import PulseSequence, alpha_star, expand_native, simulate, synthesize, verify
from lie.cartan import check_symmetric_pair, kostant_sample
from lie.kakdec import kak, pi_A
from lie.kron import parse_combination
from lie.matcore import MatC
from systems.registry import SYSTEMS, build_system
from utils.errors import MalformedInput, SpinOptError
from utils.serialization import (
    dump_json,
    load_json,
    parse_coefficients,
    parse_tolerance,
    read_matrix,
    write_csv,
)
from utils.verification_log import VerificationLog

logger = logging.getLogger("spinopt")


def _system_from_args(args, validate: bool = True):
    coeffs = parse_coefficients(args.hd) if args.hd else None
    return build_system(args.system, coeffs, validate)


def _parse_point(text: str) -> np.ndarray:
    """Coordinates written as "(a, b, c)" or "a,b,c" """
    return np.array(parse_coefficients(text.strip().strip("()[]")))


def cmd_synthesize(args) -> None:
    system = _system_from_args(args)
    seq = synthesize(read_matrix(args.target), system)
    if args.native:
        seq = expand_native(seq, system)
    dump_json(seq.to_dict(), args.out)


def _load_sequence(path: str):
    seq = PulseSequence.from_dict(load_json(path))
    return seq, build_system(seq.system_id, seq.hd)


def cmd_simulate(args) -> None:
    seq, system = _load_sequence(args.seq)
    trajectory = simulate(seq, system, step=args.step, v_max=args.v_max)
    if args.csv:
        write_csv(trajectory.to_frame(), args.csv)
    dump_json(MatC.of(trajectory.endpoint).to_dict(), args.out)


def cmd_verify(args) -> None:
    seq, system = _load_sequence(args.seq)
    U_F = read_matrix(args.target)
    report = verify(seq, U_F, system)
    if args.log:
        log = VerificationLog(args.log)
        if os.path.exists(args.log):
            log.load_entries()
        log.record(report, target_label=os.path.basename(args.target), system=system.system_name)
        log.save_entries()
    dump_json(report.to_dict(), args.out)


def cmd_kak(args) -> None:
    system = _system_from_args(args, validate=False)
    dump_json(kak(read_matrix(args.target), system).to_dict(), args.out)


def cmd_orbit(args) -> None:
    system = _system_from_args(args, validate=False)
    dump_json(system.orbit.to_dict(), args.out)


def cmd_alpha(args) -> None:
    system = _system_from_args(args)
    if os.path.isfile(args.target):
        x = pi_A(read_matrix(args.target), system)
    else:
        x = _parse_point(args.target)
    result = alpha_star(x, system.orbit, method=args.method)
    dump_json({"alpha": result.alpha, "betas": [float(b) for b in result.betas], "x_target": x.tolist()}, args.out)


def cmd_kostant(args) -> None:
    system = _system_from_args(args, validate=False)
    x = _parse_point(args.x) if args.x else system.h_coeffs
    report = kostant_sample(x, system.pair, system.roots, args.n, args.seed, args.workers)
    dump_json(report.to_dict(), args.out)


def _reach_config(args) -> ReachConfig:
    defaults = config.REACH_DEFAULTS
    return ReachConfig(
        n_samples=args.n,
        n_switches=args.switches,
        v_max=args.v_max if args.v_max is not None else defaults["v_max"],
        unreduced_mode=args.mode,
        seed=args.seed,
        workers=args.workers,
    )


def cmd_reach(args) -> None:
    system = _system_from_args(args)
    cloud = sample_reach(SystemKind(args.which), system, args.t, _reach_config(args))
    if args.csv:
        write_csv(cloud.to_frame(), args.csv)
    summary = cloud.to_dict()
    distances = cloud.identity_distances()
    summary["max_identity_distance"] = float(distances.max()) if distances.size else 0.0
    summary["metric_bound"] = metric_bound(system, args.t)
    dump_json(summary, args.out)


def cmd_equiv_gap(args) -> None:
    system = _system_from_args(args)
    ladder = parse_coefficients(args.ladder)
    report = equivalence_gap(args.t, system, _reach_config(args), ladder)
    if args.csv:
        write_csv(report.to_frame(), args.csv)
    dump_json(report.to_dict(), args.json)


def cmd_pmp_extremal(args) -> None:
    system = _system_from_args(args)
    A = parse_combination(args.A, system.n_spins)
    C = parse_combination(args.C, system.n_spins) if args.C else np.zeros_like(A)
    params = ExtremalParams.build(A, C, system)
    frame = sample_extremal(params, system.pair, args.t_max, args.samples)
    if args.csv:
        write_csv(frame, args.csv)
    end = extremal_traj(params, args.t_max)
    dump_json({
        "g_final": MatC.of(end.g).to_dict(),
        "max_residual": float(frame["residual"].max()),
        "hamiltonian_drift": float(frame["hamiltonian"].max() - frame["hamiltonian"].min()),
    }, args.out)


def cmd_check_pair(args) -> None:
    result = check_symmetric_pair(args.n)
    if result.is_symmetric:
        sys.stdout.write(f"symmetric (n={args.n})\n")
    else:
        first, second = result.witness
        sys.stdout.write(
            f"not symmetric (n={args.n}): [{first}, {second}] has p-component "
            f"{result.p_component_norm:.6g}\n"
        )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", choices=sorted(SYSTEMS), default="su2")
    common.add_argument("--hd", help="drift coefficients over the Cartan basis, e.g. 1,2,4")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=config.DEFAULT_SEED)
    common.add_argument("--workers", type=int, default=config.WORKERS)
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")
    common.add_argument("--log-level", default=config.LOG_LEVEL)
    common.add_argument("--out", help="write the JSON result here instead of standard output")

    parser = argparse.ArgumentParser(prog="spinopt", description="Time-optimal control of coupled spins")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", parents=[common], help="optimal pulse sequence for a target")
    p.add_argument("--target", required=True)
    p.add_argument("--native", action="store_true", help="express drifts along H_d only")
    p.set_defaults(handler=cmd_synthesize)

    p = sub.add_parser("simulate", parents=[common], help="endpoint and trajectory of a sequence")
    p.add_argument("--seq", required=True)
    p.add_argument("--csv")
    p.add_argument("--step", type=float)
    p.add_argument("--v-max", dest="v_max", type=float)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="endpoint error and optimality certificate")
    p.add_argument("--seq", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--log", help="append the result to this verification log")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("kak", parents=[common], help="g = k1 a k2")
    p.add_argument("--target", required=True)
    p.set_defaults(handler=cmd_kak)

    p = sub.add_parser("orbit", parents=[common], help="Weyl orbit of the drift")
    p.set_defaults(handler=cmd_orbit)

    p = sub.add_parser("alpha", parents=[common], help="minimal time for a folded target or a matrix file")
    p.add_argument("--target", required=True)
    p.add_argument("--method", choices=["enumerate", "simplex"], default="enumerate")
    p.set_defaults(handler=cmd_alpha)

    p = sub.add_parser("kostant-sample", parents=[common], help="projected adjoint orbit vs Weyl hull")
    p.add_argument("--x", help="point of h, defaults to the drift")
    p.add_argument("--n", type=int, default=config.KOSTANT_DEFAULTS["n_samples"])
    p.set_defaults(handler=cmd_kostant)

    reach_common = argparse.ArgumentParser(add_help=False)
    reach_common.add_argument("--t", type=float, required=True)
    reach_common.add_argument("--n", type=int, default=config.REACH_DEFAULTS["n_samples"])
    reach_common.add_argument("--switches", type=int, default=config.REACH_DEFAULTS["n_switches"])
    reach_common.add_argument("--v-max", dest="v_max", type=float)
    reach_common.add_argument("--mode", choices=["uniform", "pulsed"], default=config.REACH_DEFAULTS["unreduced_mode"])
    reach_common.add_argument("--csv")

    p = sub.add_parser("reach-sample", parents=[common, reach_common], help="Monte Carlo reachable set")
    p.add_argument("--which", choices=[k.value for k in SystemKind], default=SystemKind.ADJOINT.value)
    p.set_defaults(handler=cmd_reach)

    p = sub.add_parser("equiv-gap", parents=[common, reach_common], help="unreduced vs adjoint set gaps")
    p.add_argument("--ladder", default=",".join(str(v) for v in config.REACH_DEFAULTS["ladder"]))
    p.add_argument("--json", help="write the report here instead of standard output")
    p.set_defaults(handler=cmd_equiv_gap)

    p = sub.add_parser("pmp-extremal", parents=[common], help="sample the extremal family")
    p.add_argument("--A", required=True, help='e.g. "Iz:1"')
    p.add_argument("--C", help='e.g. "Ix:0.5"')
    p.add_argument("--t-max", dest="t_max", type=float, default=2 * np.pi)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--csv")
    p.set_defaults(handler=cmd_pmp_extremal)

    p = sub.add_parser("check-pair", help="test the weight-one symmetric pair for n spins")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--log-level", default=config.LOG_LEVEL)
    p.set_defaults(handler=cmd_check_pair)
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    saved = dict(config.TOLERANCES)
    try:
        overrides = {}
        for item in getattr(args, "tol", []):
            overrides.update(parse_tolerance(item))
        config.override_tolerances(overrides)
        args.handler(args)
    except SpinOptError as e:
        sys.stderr.write(f"{e.name}: {e}\n")
        return 1
    except KeyError as e:
        sys.stderr.write(f"{MalformedInput.__name__}: missing field {e}\n")
        return 1
    finally:
        config.TOLERANCES.update(saved)
    return 0


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
