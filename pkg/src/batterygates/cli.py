"""Command-line front end.

Every command reads one JSON config (or flags), writes JSON or CSV, and is
deterministic for a fixed seed. Energies are in units of the battery gap
omega and hbar = 1 unless a config sets omega explicitly.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import battery, channel, gates, qudit, spectral, variational
from .errors import QuadratureNoConvergence, SupportViolation, UnknownResource

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

UNITS_NOTE = "hbar = 1; energies in units of omega (battery gap); infidelities dimensionless"


class ConfigError(Exception):
    pass


class NumericalFailure(Exception):
    pass


# config helpers


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _require(cfg, key):
    if key not in cfg:
        raise ConfigError(f"missing config key {key!r}")
    return cfg[key]


def make_profile(spec: dict, omega: float = 1.0) -> battery.ShapeProfile:
    """Build a profile from {"tag": ..., parameters...}."""
    tag = _require(spec, "tag")
    if tag == "sine":
        return battery.sine_profile(float(spec.get("length", 1.0)))
    if tag == "airy":
        return variational.airy_profile(float(_require(spec, "mean_energy")), omega)
    if tag == "hermite1":
        return variational.hermite1_profile(float(_require(spec, "mean_sq_energy")), omega)
    if tag == "gaussian_qfi":
        return variational.qfi_profile(float(_require(spec, "qfi")), omega)
    if tag == "coherent":
        return variational.coherent_profile(float(_require(spec, "alpha")))
    if tag == "gaussian":
        return battery.gaussian_profile(float(_require(spec, "center")), float(_require(spec, "width")))
    raise ConfigError(f"unknown profile tag {tag!r}")


def make_state(cfg: dict):
    """Return (state, profile or None, delta or None) from an infidelity config."""
    omega = float(cfg.get("omega", 1.0))
    if "state" in cfg:
        return battery.BatteryState.from_json(cfg["state"]), None, None
    if "profile" in cfg:
        profile = make_profile(cfg["profile"], omega)
        delta = float(cfg.get("delta", 1.0))
        trunc = cfg.get("truncation")
        state = battery.sample_ansatz(profile, delta, None if trunc is None else int(trunc), omega)
        return state, profile, delta
    if "coherent_alpha" in cfg:
        return variational.coherent_state(float(cfg["coherent_alpha"]), omega), None, None
    if "sine_levels" in cfg:
        return spectral.optimal_sine_state(int(cfg["sine_levels"]), omega), None, None
    raise ConfigError("config needs one of 'state', 'profile', 'coherent_alpha', 'sine_levels'")


def _finite(x):
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        raise NumericalFailure(f"non-finite result {x}")
    return x


def _resources(state: battery.BatteryState) -> dict:
    return {"omega": state.omega, **battery.resource_report(state).to_json()}


# evaluations


def evaluate(gate, state, profile=None, delta=None, restarts=16, seed=0, worst_case=True) -> dict:
    """All infidelity evaluators available for a (gate, state) pair."""
    out = {"eps_c_closed": None, "eps_c_spectral": None, "eps_c_asymptotic": None, "eps_wc_lb": None}
    if isinstance(gate, gates.QubitGate):
        k = channel.kraus_set(channel.target_copy_unitary(gate, max(state.truncation, 2)), state)
        out["eps_c_exact"] = channel.choi_infidelity_exact(k, gate)
        out["eps_c_closed"] = channel.choi_infidelity_closed(state, gate)
        try:
            n = state.truncation
            out["eps_c_spectral"] = spectral.infidelity_spectral(spectral.dst_forward(state, n), gate)
        except SupportViolation:
            pass  # ground level occupied: no sine expansion
    else:
        u = qudit.qudit_target_copy(gate, max(state.truncation, gate.dim))
        k = qudit.qudit_kraus_set(u, state)
        out["eps_c_exact"] = channel.choi_infidelity_exact(k, gate)
    if profile is not None and delta is not None:
        out["eps_c_asymptotic"] = qudit.qudit_asymptotic_infidelity(profile, delta, gate)
    if worst_case:
        out["eps_wc_lb"] = channel.worst_case_infidelity(k, gate, restarts=restarts, seed=seed).estimate
    return {key: _finite(v) for key, v in out.items()}


def cmd_infidelity(cfg: dict, seed: int) -> dict:
    gate = gates.gate_from_json(_require(cfg, "gate"))
    state, profile, delta = make_state(cfg)
    restarts = int(cfg.get("restarts", 16))
    ev = evaluate(gate, state, profile, delta, restarts=restarts, seed=seed, worst_case=bool(cfg.get("worst_case", True)))
    report = {
        "units": UNITS_NOTE,
        "gate": gate.to_json(),
        "resources": _resources(state),
        **ev,
    }
    if isinstance(gate, gates.QubitGate):
        report["v01_abs"] = gate.v01_abs
        if ev["eps_c_spectral"] is not None:
            report["closed_minus_spectral"] = ev["eps_c_closed"] - ev["eps_c_spectral"]
        if gate.v01_abs > 0:
            rep = battery.resource_report(state)
            report["intrinsic_error_floor"] = variational.intrinsic_error(rep, state.omega) * gate.v01_abs**2
    else:
        report["asymmetry"] = gates.qudit_asymmetry(gate)
    if delta is not None:
        report["delta"] = delta
    return report


def optimal_state(resource: str, budget: float, omega: float = 1.0) -> battery.BatteryState:
    """The minimal-Unitary-Defect state for a resource budget (level spacing delta = 1)."""
    if not budget > 0:
        raise ConfigError("budget must be positive")
    if resource == "n_levels":
        n = int(round(budget))
        if n != budget or n < 2:
            raise ConfigError("n_levels budget must be an integer >= 2")
        return spectral.optimal_sine_state(n, omega)
    if resource == "mean_energy":
        profile = variational.airy_profile(budget / omega, 1.0)
    elif resource == "mean_sq_energy":
        profile = variational.hermite1_profile(budget / omega**2, 1.0)
    elif resource == "qfi":
        profile = variational.qfi_profile(budget / omega**2, 1.0)
    else:
        raise UnknownResource(f"unknown resource {resource!r}")
    return battery.sample_ansatz(profile, 1.0, omega=omega)


def cmd_optimal_state(cfg: dict, seed: int) -> dict:
    resource = str(_require(cfg, "resource"))
    budget = float(_require(cfg, "budget"))
    omega = float(cfg.get("omega", 1.0))
    state = optimal_state(resource, budget, omega)
    return {
        "units": UNITS_NOTE,
        "resource": resource,
        "budget": budget,
        "predicted_ud": variational.predicted_min_ud(resource, budget, omega),
        "state": state.to_json(),
        "resources": _resources(state),
    }


SWEEP_VARIABLES = ("delta", "n_levels", "alpha", "mean_energy", "qfi")

# column name -> header with units
COLUMNS = {
    "eps_c_exact": "eps_c_exact[1]",
    "eps_c_closed": "eps_c_closed[1]",
    "eps_c_spectral": "eps_c_spectral[1]",
    "eps_c_asymptotic": "eps_c_asymptotic[1]",
    "eps_wc_lb": "eps_wc_lb[1]",
    "eps_over_delta2": "eps_over_delta2[1]",
    "eps_times_n2": "eps_times_n2[1]",
    "eps_times_mean_energy": "eps_times_mean_energy[omega]",
    "eps_times_mean_energy_sq": "eps_times_mean_energy_sq[omega^2]",
    "eps_times_mean_sq_energy": "eps_times_mean_sq_energy[omega^2]",
    "mean_energy": "mean_energy[omega]",
    "mean_sq_energy": "mean_sq_energy[omega^2]",
    "qfi": "qfi[omega^2]",
    "level_count": "level_count[1]",
    "ground_population": "ground_population[1]",
    "discrete_ud": "discrete_ud[1]",
    "truncation": "truncation[1]",
    "intrinsic_error_floor": "intrinsic_error_floor[1]",
}
VARIABLE_HEADERS = {
    "delta": "delta[1]",
    "n_levels": "n_levels[1]",
    "alpha": "alpha[1]",
    "mean_energy": "target_mean_energy[omega]",
    "qfi": "target_qfi[omega^2]",
}


def _sweep_point(spec: dict, gate, value: float, seed: int) -> dict:
    variable = spec["variable"]
    omega = float(spec.get("omega", 1.0))
    profile, delta = None, None
    if variable == "delta":
        profile = make_profile(_require(spec, "profile"), omega)
        delta = value
        state = battery.sample_ansatz(profile, delta, omega=omega)
    elif variable == "n_levels":
        state = spectral.optimal_sine_state(int(value), omega)
    elif variable == "alpha":
        state = variational.coherent_state(value, omega)
    elif variable == "mean_energy":
        profile, delta = variational.airy_profile(value, 1.0), 1.0
        state = battery.sample_ansatz(profile, 1.0, omega=omega)
    else:
        profile, delta = variational.qfi_profile(value, 1.0), 1.0
        state = battery.sample_ansatz(profile, 1.0, omega=omega)
    need_wc = "eps_wc_lb" in spec["outputs"]
    ev = evaluate(gate, state, profile, delta, restarts=int(spec.get("restarts", 16)), seed=seed, worst_case=need_wc)
    rep = battery.resource_report(state)
    eps = ev["eps_c_exact"]
    row = dict(ev)
    row.update(rep.to_json())
    row["truncation"] = state.truncation
    row["eps_over_delta2"] = eps / delta**2 if delta else None
    row["eps_times_n2"] = eps * rep.level_count**2
    row["eps_times_mean_energy"] = eps * rep.mean_energy
    row["eps_times_mean_energy_sq"] = eps * rep.mean_energy**2
    row["eps_times_mean_sq_energy"] = eps * rep.mean_sq_energy
    row["intrinsic_error_floor"] = (
        variational.intrinsic_error(rep, omega) * gate.v01_abs**2 if isinstance(gate, gates.QubitGate) else None
    )
    return row


def run_sweep(spec: dict, seed: int) -> dict:
    variable = _require(spec, "variable")
    if variable not in SWEEP_VARIABLES:
        raise ConfigError(f"sweep variable must be one of {SWEEP_VARIABLES}")
    grid = [float(x) for x in _require(spec, "grid")]
    if not grid:
        raise ConfigError("grid must be nonempty")
    diffs = np.diff(grid)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ConfigError("grid must be strictly monotone")
    outputs = list(_require(spec, "outputs"))
    if not outputs:
        raise ConfigError("outputs must name at least one column")
    unknown = [c for c in outputs if c not in COLUMNS]
    if unknown:
        raise ConfigError(f"unknown output columns {unknown}; choose from {sorted(COLUMNS)}")
    gate = gates.gate_from_json(_require(spec, "gate"))
    workers = int(spec.get("workers", 1))

    def point(v):
        row = _sweep_point(spec, gate, v, seed)
        return [v] + [_finite(row[c]) if row[c] is not None else None for c in outputs]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(point, grid))  # map keeps grid order
    else:
        rows = [point(v) for v in grid]
    return {
        "units": UNITS_NOTE,
        "header": [VARIABLE_HEADERS[variable]] + [COLUMNS[c] for c in outputs],
        "rows": rows,
    }


def cmd_bounds(report: dict, seed: int) -> dict:
    """Compare each resource of an infidelity report with its necessary minimum."""
    gate = gates.gate_from_json(_require(report, "gate"))
    if not isinstance(gate, gates.QubitGate):
        raise ConfigError("resource bounds are defined for qubit gates")
    eps = float(_require(report, "eps_c_exact"))
    res = _require(report, "resources")
    omega = float(res.get("omega", 1.0))
    v01 = gate.v01_abs
    if not eps > 0 or v01 == 0:
        raise ConfigError("bounds need a positive infidelity and a non-energy-preserving gate")
    b = variational.resource_bounds(min(eps, 1.0), v01, omega)
    required = {
        "mean_energy": b.mean_energy_min,
        "mean_sq_energy": b.mean_sq_energy_min,
        "level_count": spectral.min_levels_bound(min(eps, 1.0), v01).exact,
        "qfi": b.qfi_min,
    }
    band = 0.10
    out = {}
    for name, need in required.items():
        have = float(_require(res, name))
        slack = have - need
        rel = slack / need
        out[name] = {
            "required": need,
            "actual": have,
            "slack": slack,
            "relative_slack": rel,
            "violation": bool(rel < -band),
        }
    return {
        "units": UNITS_NOTE,
        "eps_c": eps,
        "v01_abs": v01,
        "tolerance_band": band,
        "bounds": out,
        "any_violation": any(v["violation"] for v in out.values()),
    }


def cmd_constants(cfg: dict, seed: int) -> dict:
    c = variational.compute_constants().to_json()
    ref = variational.REFERENCE_VALUES
    return {
        "rows": [
            {"name": k, "computed": c[k], "reference": ref[k], "difference": c[k] - ref[k]}
            for k in ("airy_root", "cbar", "c1", "c2", "eta", "eta_sq", "eta_prime")
        ]
    }


def cmd_qudit_compare(cfg: dict, seed: int) -> dict:
    d = int(_require(cfg, "d"))
    if d < 2:
        raise ConfigError("d must be at least 2")
    gate = gates.gate_from_json(_require(cfg, "gate"))
    omega = float(cfg.get("omega", 1.0))
    profile = make_profile(cfg.get("profile", {"tag": "sine"}), 1.0)
    delta = float(cfg.get("delta", 1.0 / 64))
    r = qudit.scheme_two_compare(gate, d, profile, delta, omega)
    return {"units": UNITS_NOTE, **r.to_json()}


# output


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and all(isinstance(v, (int, float)) for v in obj):
        for i, v in enumerate(obj):
            yield f"{prefix}{i}", v
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), obj


def render(result: dict, fmt: str, command: str) -> str:
    if fmt == "json":
        return json.dumps(result, sort_keys=True, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    if command == "sweep":
        w.writerow(result["header"])
        for row in result["rows"]:
            w.writerow([_fmt(v) for v in row])
    elif command == "constants":
        w.writerow(["name", "computed[1]", "reference[1]", "difference[1]"])
        for r in result["rows"]:
            w.writerow([r["name"], _fmt(r["computed"]), _fmt(r["reference"]), _fmt(r["difference"])])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(result):
            w.writerow([k, _fmt(v)])
    return buf.getvalue()


COMMANDS = {
    "infidelity": cmd_infidelity,
    "optimal-state": cmd_optimal_state,
    "sweep": run_sweep,
    "bounds": cmd_bounds,
    "constants": cmd_constants,
    "qudit-compare": cmd_qudit_compare,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="batterygates", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config (for 'bounds': an infidelity report)")
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, default=None, help="seed for randomized estimators")
        sp.add_argument("--format", choices=("json", "csv"), default=None)
        if name == "optimal-state":
            sp.add_argument("--resource", choices=("mean_energy", "mean_sq_energy", "n_levels", "qfi"))
            sp.add_argument("--budget", type=float)
            sp.add_argument("--omega", type=float)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format or ("csv" if args.command == "sweep" else "json")
    try:
        cfg = _load_config(args.config)
        if args.command == "optimal-state":
            for key in ("resource", "budget", "omega"):
                if getattr(args, key) is not None:
                    cfg[key] = getattr(args, key)
        if args.command in ("sweep", "infidelity", "bounds") and args.config is None:
            raise ConfigError(f"{args.command} needs --config")
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        result = COMMANDS[args.command](cfg, seed)
        text = render(result, fmt, args.command)
    except (ConfigError, UnknownResource, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, QuadratureNoConvergence, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
