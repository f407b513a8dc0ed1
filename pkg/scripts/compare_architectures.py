#!/usr/bin/env python3
"""Side-by-side run of the two control architectures at one demand level.

Prints the solution from each mode, the per-kind message counts, and the
numerical differences, then writes both traces as JSON lines for replay.
"""

import argparse
import os

import numpy as np

from attocell.orchestrator import run_centralized, run_semi_decentralized
from attocell.scenario import default_scenario, load_scenario
from attocell.scenario import parse_quantity


def describe(tag, sol, beams, trace):
    print(f"[{tag}]")
    print(f"  bias {sol.bias*1e3:.6f} mA  swing {sol.ac_swing*1e3:.6f} mA  "
          f"min SNR {sol.min_snr_db:.4f} dB")
    print(f"  rf targets mW: " + " ".join(f"{v*1e3:.4f}" for v in sol.rf_targets))
    print(f"  rf transmit power {beams.total_power*1e3:.6f} mW")
    counts = ", ".join(f"{k} x{n}" for k, n in sorted(trace.count_by_kind().items()))
    print(f"  {len(trace)} messages: {counts}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--theta", default="4mW")
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()

    if args.config:
        sc = load_scenario(args.config, seed=args.seed)
    else:
        sc = default_scenario(seed=args.seed)
    theta = parse_quantity(args.theta)

    sol_c, beams_c, trace_c = run_centralized(sc, theta, method="closed_form")
    sol_s, beams_s, trace_s = run_semi_decentralized(sc, theta)
    describe("centralized", sol_c, beams_c, trace_c)
    describe("semi-decentralized", sol_s, beams_s, trace_s)

    print("[differences]")
    print(f"  bias        {abs(sol_c.bias - sol_s.bias):.3e} A")
    print(f"  min SNR     {abs(sol_c.min_snr_db - sol_s.min_snr_db):.3e} dB")
    print(f"  rf targets  {np.max(np.abs(sol_c.rf_targets - sol_s.rf_targets)):.3e} W")

    os.makedirs(args.out_dir, exist_ok=True)
    for tag, trace in (("centralized", trace_c), ("semi", trace_s)):
        path = os.path.join(args.out_dir, f"trace_{tag}.jsonl")
        trace.to_jsonl(path)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
