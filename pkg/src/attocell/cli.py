"""Command-line front end: validate configs, dump channels, solve, run sweeps.

Exit codes: 0 success, 2 configuration problem, 3 infeasible demand,
4 solver failure.  Quantities on the command line accept unit suffixes
("4mW", "8.5 mA"); bare numbers are SI base units.
"""

import argparse
import json
import os
import sys

import numpy as np

from .beamforming import build_eh_targets, extract_beams, solve_aggregate_sdp
from .channels import build_vlc_matrix, sample_rf_channel
from .errors import (InfeasibleError, ScenarioError, SolverStallError,
                     TargetUnreachableError, UnservableDeviceError)
from .experiments import (exp_eh_allocation, exp_feasibility_vs_theta,
                          exp_illuminance, exp_rf_power, exp_snr_eh_region,
                          exp_subopt_gap)
from .lightwave import solve_op1
from .orchestrator import run_centralized, run_semi_decentralized
from .scenario import default_scenario, load_scenario, parse_quantity

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_SOLVER = 4


def _load(args):
    if args.config:
        return load_scenario(args.config, seed=args.seed)
    return default_scenario(seed=args.seed)


def _add_common(parser):
    parser.add_argument("--config", help="scenario YAML (default: bundled)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    parser.add_argument("--out-dir", default=".", help="where to write outputs")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def _write_result(result, args):
    os.makedirs(args.out_dir, exist_ok=True)
    path = os.path.join(args.out_dir, f"{result.name}.{args.format}")
    if args.format == "csv":
        result.to_csv(path)
    else:
        result.to_json(path)
    return path


def _cmd_scenario_validate(args):
    sc = _load(args)
    print(f"scenario ok: hash {sc.hash}")
    print(f"  transmitters {len(sc.transmitters)}  "
          f"elements {len(sc.transmitters[0].elements)}  "
          f"devices {len(sc.devices)}  rf antennas {sc.rf_ap.antennas}")
    print(f"  room {sc.room_size[0]:g} x {sc.room_size[1]:g} x "
          f"{sc.room_size[2]:g} m  seed {sc.seed}")
    return EXIT_OK


def _cmd_channels_dump(args):
    sc = _load(args)
    matrix = build_vlc_matrix(sc.transmitters, sc.devices)
    rf = sample_rf_channel(sc.rf_ap, sc.devices, sc.rician_factor_db,
                           sc.path_loss_exponent, sc.seed)
    os.makedirs(args.out_dir, exist_ok=True)

    from .experiments import ExperimentResult
    n_tx, n_el, n_dev = matrix.gains.shape
    vcols = {"transmitter": [], "element": [], "device": [], "gain": []}
    for o in range(n_tx):
        for i in range(n_el):
            for j in range(n_dev):
                vcols["transmitter"].append(o)
                vcols["element"].append(i)
                vcols["device"].append(j)
                vcols["gain"].append(float(matrix.gains[o, i, j]))
    vcols["scenario_hash"] = [sc.hash] * len(vcols["gain"])
    vcols["seed"] = [sc.seed] * len(vcols["gain"])
    vres = ExperimentResult(name="vlc_channels", columns=vcols)

    rcols = {"device": [], "antenna": [], "re": [], "im": []}
    n_dev, n_ant = rf.vectors.shape
    for j in range(n_dev):
        for a in range(n_ant):
            rcols["device"].append(j)
            rcols["antenna"].append(a)
            rcols["re"].append(float(rf.vectors[j, a].real))
            rcols["im"].append(float(rf.vectors[j, a].imag))
    rcols["scenario_hash"] = [sc.hash] * len(rcols["re"])
    rcols["seed"] = [sc.seed] * len(rcols["re"])
    rres = ExperimentResult(name="rf_channels", columns=rcols)

    for res in (vres, rres):
        print(f"wrote {_write_result(res, args)}")
    return EXIT_OK


def _solution_dict(sol, beams=None):
    out = {
        "feasible": sol.feasible,
        "bias_a": sol.bias,
        "ac_swing_a": sol.ac_swing,
        "worst_user": sol.worst_user,
        "min_snr_db": sol.min_snr_db,
        "method": sol.method,
        "theta_w": sol.theta,
        "rf_cap_w": sol.rf_cap,
        "fallback_used": sol.fallback_used,
        "rf_targets_w": [float(v) for v in sol.rf_targets],
        "light_harvests_w": [float(v) for v in sol.light_harvests],
    }
    if beams is not None:
        out["rf_total_power_w"] = beams.total_power
        out["rf_beam_count"] = len(beams.beams)
        out["rf_rank_one_ratio"] = beams.rank_one_ratio
        out["rf_delivered_w"] = [float(v) for v in beams.delivered]
    return out


def _cmd_solve(args):
    sc = _load(args)
    theta = parse_quantity(args.theta)
    rf_cap = parse_quantity(args.theta_rf) if args.theta_rf else sc.rf_exposure_cap

    if args.mode == "direct":
        matrix = build_vlc_matrix(sc.transmitters, sc.devices)
        sol = solve_op1(matrix, sc.drive, sc.vlc_eh, sc.bias, sc.noise_power,
                        theta, rf_cap, method=args.method)
        if not sol.feasible:
            print(f"infeasible: theta {theta:g} W exceeds reach under "
                  f"cap {rf_cap:g} W", file=sys.stderr)
            return EXIT_INFEASIBLE
        rf = sample_rf_channel(sc.rf_ap, sc.devices, sc.rician_factor_db,
                               sc.path_loss_exponent, sc.seed)
        channels = rf.outer_products()
        targets = build_eh_targets(sol.rf_targets, sc.rf_nonlinear)
        beams = extract_beams(solve_aggregate_sdp(channels, targets), channels)
        trace = None
    else:
        runner = (run_centralized if args.mode == "centralized"
                  else run_semi_decentralized)
        kwargs = {"rf_cap": rf_cap}
        if args.mode == "centralized":
            kwargs["method"] = args.method
        sol, beams, trace = runner(sc, theta, **kwargs)

    print(f"bias {sol.bias*1e3:.6f} mA  swing {sol.ac_swing*1e3:.6f} mA  "
          f"min SNR {sol.min_snr_db:.3f} dB  worst user {sol.worst_user}")
    print(f"rf targets mW: " +
          " ".join(f"{v*1e3:.4f}" for v in sol.rf_targets))
    print(f"rf transmit power {beams.total_power*1e3:.6f} mW  "
          f"beams {len(beams.beams)}")

    if args.out_dir != ".":
        os.makedirs(args.out_dir, exist_ok=True)
    if trace is not None:
        trace_path = os.path.join(args.out_dir, f"trace_{args.mode}.jsonl")
        os.makedirs(args.out_dir, exist_ok=True)
        trace.to_jsonl(trace_path)
        print(f"wrote {trace_path} ({len(trace)} messages)")
    sol_path = os.path.join(args.out_dir, "solution.json")
    os.makedirs(args.out_dir, exist_ok=True)
    with open(sol_path, "w") as fh:
        json.dump(_solution_dict(sol, beams), fh, sort_keys=True, indent=1)
        fh.write("\n")
    print(f"wrote {sol_path}")
    return EXIT_OK


def _cmd_exp(args):
    sc = _load(args)
    if args.experiment == "snr-eh-region":
        result = exp_snr_eh_region(sc, n_points=args.points)
    elif args.experiment == "feasibility":
        result = exp_feasibility_vs_theta(sc)
    elif args.experiment == "eh-allocation":
        result = exp_eh_allocation(sc, theta=parse_quantity(args.theta),
                                   rf_cap=parse_quantity(args.theta_rf))
    elif args.experiment == "rf-power":
        result = exp_rf_power(sc, trials=args.trials,
                              theta=parse_quantity(args.theta))
    elif args.experiment == "subopt-gap":
        grid = np.linspace(0.0, 8e-3, args.points)
        result = exp_subopt_gap(sc, theta_grid=grid)
    elif args.experiment == "illuminance":
        result = exp_illuminance(sc, bias=parse_quantity(args.bias))
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(args.experiment)
    path = _write_result(result, args)
    summary = " ".join(f"{k}={v}" for k, v in sorted(result.meta.items())
                       if isinstance(v, (int, float, str)))
    print(f"wrote {path} ({result.n_rows} rows) {summary}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="attocell",
        description="hybrid RF/lightwave cell simulator and optimizer")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sc = sub.add_parser("scenario", help="scenario file operations")
    sc_sub = p_sc.add_subparsers(dest="action", required=True)
    p_val = sc_sub.add_parser("validate", help="parse and validate a scenario")
    _add_common(p_val)
    p_val.set_defaults(func=_cmd_scenario_validate)

    p_ch = sub.add_parser("channels", help="channel matrix operations")
    ch_sub = p_ch.add_subparsers(dest="action", required=True)
    p_dump = ch_sub.add_parser("dump", help="write VLC and RF channel tables")
    _add_common(p_dump)
    p_dump.set_defaults(func=_cmd_channels_dump)

    p_solve = sub.add_parser("solve", help="solve one allocation instance")
    p_solve.add_argument("--theta", required=True,
                         help="per-device energy demand, e.g. 4mW")
    p_solve.add_argument("--theta-rf", default=None,
                         help="RF exposure cap (default: scenario value)")
    p_solve.add_argument("--method", choices=("bisection", "closed_form"),
                         default="bisection")
    p_solve.add_argument("--mode",
                         choices=("direct", "centralized", "semi"),
                         default="direct")
    _add_common(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_exp = sub.add_parser("exp", help="run a sweep experiment")
    p_exp.add_argument("experiment",
                       choices=("snr-eh-region", "feasibility",
                                "eh-allocation", "rf-power", "subopt-gap",
                                "illuminance"))
    p_exp.add_argument("--theta", default="4mW")
    p_exp.add_argument("--theta-rf", default="5mW")
    p_exp.add_argument("--trials", type=int, default=100)
    p_exp.add_argument("--points", type=int, default=None)
    p_exp.add_argument("--bias", default="8.5mA")
    _add_common(p_exp)
    p_exp.set_defaults(func=_cmd_exp)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "points", None) is None:
        args.points = 201 if getattr(args, "experiment", "") == "snr-eh-region" else 20
    try:
        return args.func(args)
    except (ScenarioError, UnservableDeviceError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleError, TargetUnreachableError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverStallError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
