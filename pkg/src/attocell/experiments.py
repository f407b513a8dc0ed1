"""Seeded experiment runners emitting tidy tables for external plotting.

Each runner returns an ExperimentResult: named columns of equal length
plus provenance (scenario hash, seed, solver tag) repeated on every row
so a detached CSV still identifies its origin.  Formatting is fixed at
12 significant digits, so identical (config, seed) reruns produce
byte-identical files.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .beamforming import build_eh_targets, required_power_linear, solve_aggregate_sdp
from .channels import build_vlc_matrix, sample_rf_channel
from .energy import vlc_harvested_power, vlc_snr_db
from .errors import InfeasibleError, SolverStallError, TargetUnreachableError
from .illumination import illuminance_map
from .lightwave import solve_op1
from .orchestrator import compare_modes

__all__ = [
    "ExperimentResult",
    "exp_snr_eh_region",
    "exp_feasibility_vs_theta",
    "exp_eh_allocation",
    "exp_rf_power",
    "exp_subopt_gap",
    "exp_illuminance",
]

DEFAULT_THETA_GRID = np.arange(0.0, 8.0 + 1e-12, 0.25) * 1e-3
DEFAULT_RF_LEVELS = np.array([0.0, 2.0, 4.0, 6.0]) * 1e-3


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


@dataclass(frozen=True)
class ExperimentResult:
    """Column-oriented result table with provenance metadata."""

    name: str
    columns: dict
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns in {self.name}: {lengths}")

    @property
    def n_rows(self):
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def to_csv(self, path):
        names = list(self.columns)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(names)
            for i in range(self.n_rows):
                writer.writerow([_fmt(self.columns[c][i]) for c in names])

    def to_json(self, path):
        payload = {
            "name": self.name,
            "meta": self.meta,
            "columns": {k: [None if (isinstance(v, float) and not np.isfinite(v))
                            else (float(v) if isinstance(v, (float, np.floating))
                                  else (int(v) if isinstance(v, (int, np.integer))
                                        and not isinstance(v, bool) else v))
                            for v in vals]
                        for k, vals in self.columns.items()},
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1)
            fh.write("\n")


def _provenance(scenario, n_rows, solver):
    return {
        "scenario_hash": [scenario.hash] * n_rows,
        "seed": [scenario.seed] * n_rows,
        "solver": [solver] * n_rows,
    }


def exp_snr_eh_region(scenario, n_points=201):
    """Per-user tradeoff curve between detection SNR and light harvest.

    Sweeps the DC bias from the swing-maximizing midpoint up to the top
    of the range.  The swing at each bias is what is left to the signal,
    so the curve is the boundary of the per-user (SNR, harvest) region.
    """
    matrix = build_vlc_matrix(scenario.transmitters, scenario.devices)
    serving = matrix.serving_gains()
    sums = matrix.gain_sums()
    biases = np.linspace(scenario.bias.midpoint, scenario.bias.high, n_points)
    cols = {"user": [], "bias_a": [], "snr_db": [], "light_eh_w": []}
    for j in range(matrix.n_devices):
        for b in biases:
            swing = scenario.bias.swing_at(b)
            cols["user"].append(j)
            cols["bias_a"].append(float(b))
            cols["snr_db"].append(vlc_snr_db(scenario.drive, serving[j], swing,
                                             scenario.noise_power))
            cols["light_eh_w"].append(vlc_harvested_power(
                scenario.drive, scenario.vlc_eh, sums[j], b))
    n = len(cols["user"])
    cols.update(_provenance(scenario, n, "direct"))
    return ExperimentResult(name="snr_eh_region", columns=cols,
                            meta={"n_points": n_points})


def exp_feasibility_vs_theta(scenario, theta_grid=None, rf_levels=None):
    """Feasibility flag and achieved min SNR over a demand/cap grid."""
    if theta_grid is None:
        theta_grid = DEFAULT_THETA_GRID
    if rf_levels is None:
        rf_levels = DEFAULT_RF_LEVELS
    matrix = build_vlc_matrix(scenario.transmitters, scenario.devices)
    cols = {"theta_w": [], "rf_cap_w": [], "feasible": [], "min_snr_db": [],
            "bias_a": []}
    for cap in np.asarray(rf_levels, dtype=float):
        for theta in np.asarray(theta_grid, dtype=float):
            sol = solve_op1(matrix, scenario.drive, scenario.vlc_eh,
                            scenario.bias, scenario.noise_power,
                            float(theta), float(cap))
            cols["theta_w"].append(float(theta))
            cols["rf_cap_w"].append(float(cap))
            cols["feasible"].append(bool(sol.feasible))
            cols["min_snr_db"].append(sol.min_snr_db if sol.feasible else -np.inf)
            cols["bias_a"].append(sol.bias if sol.feasible else np.nan)
    n = len(cols["theta_w"])
    cols.update(_provenance(scenario, n, "bisection"))
    return ExperimentResult(name="feasibility_vs_theta", columns=cols,
                            meta={"n_theta": len(theta_grid),
                                  "n_levels": len(rf_levels)})


def exp_eh_allocation(scenario, theta=4e-3, rf_cap=5e-3):
    """Optimized per-user RF harvest targets against the uniform cap.

    The uniform reference hands every device the full cap; the solver
    assigns only the shortfall its light harvest leaves.  The summed
    difference is how much RF harvesting demand the optimization avoids.
    """
    matrix = build_vlc_matrix(scenario.transmitters, scenario.devices)
    sol = solve_op1(matrix, scenario.drive, scenario.vlc_eh, scenario.bias,
                    scenario.noise_power, theta, rf_cap)
    if not sol.feasible:
        raise InfeasibleError(
            f"demand {theta} W with cap {rf_cap} W has no feasible bias")
    n_dev = matrix.n_devices
    savings = float(np.sum(rf_cap - sol.rf_targets))
    cols = {
        "user": list(range(n_dev)),
        "rf_optimal_w": [float(v) for v in sol.rf_targets],
        "rf_uniform_w": [float(rf_cap)] * n_dev,
        "light_harvest_w": [float(v) for v in sol.light_harvests],
    }
    cols.update(_provenance(scenario, n_dev, "bisection"))
    return ExperimentResult(
        name="eh_allocation", columns=cols,
        meta={"theta_w": float(theta), "rf_cap_w": float(rf_cap),
              "bias_a": sol.bias, "savings_w": savings,
              "worst_user": sol.worst_user})


def exp_rf_power(scenario, rf_levels=None, trials=100, theta=4e-3):
    """Mean AP transmit power per harvest level, rectifier model, allocation.

    For every level the uniform allocation targets the level at each
    device; the optimized allocation takes the per-device split from the
    bias solver run with the level as the cap (flagged infeasible when
    the demand cannot be covered).  Rician draws are reseeded per trial
    from the scenario seed so the table is reproducible.
    """
    if rf_levels is None:
        rf_levels = DEFAULT_RF_LEVELS
    matrix = build_vlc_matrix(scenario.transmitters, scenario.devices)
    n_dev = matrix.n_devices
    xi = scenario.rf_linear.efficiency

    plans = []  # (level, model, allocation, harvest targets or None)
    for level in np.asarray(rf_levels, dtype=float):
        uniform = np.full(n_dev, float(level))
        sol = solve_op1(matrix, scenario.drive, scenario.vlc_eh, scenario.bias,
                        scenario.noise_power, theta, float(level))
        optimal = sol.rf_targets if sol.feasible else None
        for model in ("nonlinear", "linear"):
            plans.append((float(level), model, "uniform", uniform))
            plans.append((float(level), model, "optimal", optimal))

    cols = {"rf_level_w": [], "model": [], "allocation": [], "feasible": [],
            "mean_power_w": [], "trials_ok": [], "solver_failures": []}
    channels = []
    for trial in range(trials):
        rf = sample_rf_channel(scenario.rf_ap, scenario.devices,
                               scenario.rician_factor_db,
                               scenario.path_loss_exponent,
                               scenario.seed ^ trial)
        channels.append(rf.outer_products())

    for level, model, allocation, harvest in plans:
        cols["rf_level_w"].append(level)
        cols["model"].append(model)
        cols["allocation"].append(allocation)
        if harvest is None:
            cols["feasible"].append(False)
            cols["mean_power_w"].append(np.nan)
            cols["trials_ok"].append(0)
            cols["solver_failures"].append(0)
            continue
        powers = []
        failures = 0
        for ch in channels:
            try:
                if model == "nonlinear":
                    targets = build_eh_targets(harvest, scenario.rf_nonlinear)
                    agg = solve_aggregate_sdp(ch, targets)
                    powers.append(agg.objective)
                else:
                    powers.append(required_power_linear(
                        ch, harvest, scenario.rf_linear))
            except (SolverStallError, TargetUnreachableError):
                failures += 1
        cols["feasible"].append(True)
        cols["mean_power_w"].append(float(np.mean(powers)) if powers else np.nan)
        cols["trials_ok"].append(len(powers))
        cols["solver_failures"].append(failures)

    n = len(cols["rf_level_w"])
    cols.update(_provenance(scenario, n, "barrier_sdp"))
    return ExperimentResult(
        name="rf_power", columns=cols,
        meta={"trials": trials, "theta_w": float(theta),
              "linear_efficiency": xi})


def exp_subopt_gap(scenario, theta_grid=None):
    """Optimal-vs-closed-form min SNR across a demand sweep."""
    if theta_grid is None:
        theta_grid = np.linspace(0.0, 8e-3, 20)
    report = compare_modes(scenario, theta_grid)
    cols = {"theta_w": [], "feasible": [], "min_snr_db_bisection": [],
            "min_snr_db_closed_form": [], "gap_db": [],
            "messages_centralized": [], "messages_semi": []}
    for p in report.points:
        cols["theta_w"].append(p.theta)
        cols["feasible"].append(p.feasible)
        cols["min_snr_db_bisection"].append(p.min_snr_db_centralized)
        cols["min_snr_db_closed_form"].append(p.min_snr_db_semi)
        cols["gap_db"].append(p.gap_db)
        cols["messages_centralized"].append(p.messages_centralized)
        cols["messages_semi"].append(p.messages_semi)
    n = len(cols["theta_w"])
    cols.update(_provenance(scenario, n, "bisection+closed_form"))
    return ExperimentResult(name="subopt_gap", columns=cols,
                            meta={"max_gap_db": report.max_gap_db})


def exp_illuminance(scenario, bias=8.5e-3, grid_step=0.1):
    """Floor illuminance grid with the coverage summary used by the checks."""
    imap = illuminance_map(scenario.transmitters, scenario.drive, bias,
                           scenario.efficacy, scenario.room_size,
                           grid_step=grid_step)
    xs, ys = np.meshgrid(imap.xs, imap.ys, indexing="ij")
    cols = {
        "x_m": [float(v) for v in xs.ravel()],
        "y_m": [float(v) for v in ys.ravel()],
        "lux": [float(v) for v in imap.values.ravel()],
    }
    n = len(cols["x_m"])
    cols.update(_provenance(scenario, n, "direct"))
    cx, cy = scenario.room_size[0] / 2.0, scenario.room_size[1] / 2.0
    return ExperimentResult(
        name="illuminance", columns=cols,
        meta={"bias_a": float(bias), "center_lux": imap.at(cx, cy),
              "fraction_above_500": imap.fraction_above(500.0),
              "grid_step_m": grid_step})
