"""Command line interface: sweeps, noise evolution, oracle checks, fitting.

Every subcommand writes its data file(s), a standalone matplotlib plot
script, and a JSON manifest recording the fully resolved parameters so the
run can be reproduced bit for bit. Exit codes: 0 success, 1 usage or domain
error, 2 oracle tolerance breach.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys

import numpy as np

from .errors import DomainError, FitConvergenceError, UsageError
from .fitting import (
    PARAM_NAMES,
    FitParams,
    TransmissionDataset,
    _model_both,
    fit as run_fit,
)
from .medium import MediumParams
from .noise import InputFieldState, variance_evolution
from .oracle import (
    DETERMINISTIC,
    MONTE_CARLO,
    OracleConfig,
    deterministic_noise_integral,
    monte_carlo_fluctuations,
)
from .pump import solve_profile, zeta_for_gain
from . import __version__

_DEFAULT_DET_TOLERANCE = 1e-6
_DEFAULT_MC_TOLERANCE = 0.05


class _Parser(argparse.ArgumentParser):
    # argparse wants exit code 2 for usage problems; this package reserves 2
    # for oracle tolerance breaches, so route through UsageError instead
    def error(self, message):
        raise UsageError(message)


def _utc_now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _ensure_out(path):
    os.makedirs(path, exist_ok=True)
    return path


def _write_csv(path, header, rows):
    import csv as _csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else repr(float(v)) for v in row])


def _write_manifest(out_dir, stem, subcommand, parameters, outputs, seed, config=None):
    manifest = {
        "subcommand": subcommand,
        "parameters": parameters,
        "config": config,
        "outputs": sorted(outputs),
        "seed": seed,
        "version": __version__,
        "timestamp": _utc_now(),
    }
    path = os.path.join(out_dir, f"{stem}.manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _load_flat_config(path, allowed):
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected 'key = value'")
                key, _, text = line.partition("=")
                key = key.strip()
                if key not in allowed:
                    raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
                try:
                    values[key] = float(text.strip())
                except ValueError:
                    raise UsageError(f"{path}:{lineno}: bad number {text.strip()!r}") from None
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return values


def _resolve_fit_params(args):
    """Built-in defaults, overridden by config file, overridden by flags."""
    merged = FitParams.default().as_dict()
    config_path = args.config or os.environ.get("CPO_SIM_CONFIG")
    if config_path:
        merged.update(_load_flat_config(config_path, PARAM_NAMES))
    for name in PARAM_NAMES:
        flag = getattr(args, name, None)
        if flag is not None:
            merged[name] = flag
    try:
        return FitParams(**merged), config_path
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _add_fit_param_flags(parser):
    parser.add_argument("--gamma-ratio", dest="gamma_ratio", type=float, default=None)
    parser.add_argument("--optical-depth", dest="optical_depth", type=float, default=None)
    parser.add_argument("--s-per-watt", dest="s_per_watt", type=float, default=None)
    parser.add_argument(
        "--residual-transmission", dest="residual_transmission", type=float, default=None
    )


# ---------------------------------------------------------------------------
# transmission-sweep

_SWEEP_PLOT = """\
\"\"\"Render the transmission sweep. Generated file; edit freely.\"\"\"
import csv

import matplotlib.pyplot as plt

powers, t0, tpi2 = [], [], []
with open({csv_name!r}) as fh:
    for row in csv.DictReader(fh):
        powers.append(float(row["power_W"]) * 1e3)
        t0.append(float(row["T_theta0"]))
        tpi2.append(float(row["T_thetaPi2"]))

fig, ax = plt.subplots(figsize=(6, 4))
ax.semilogx(powers, tpi2, label="T (theta = pi/2)")
ax.semilogx(powers, t0, label="T (theta = 0)", linestyle="--")
ax.set_xlabel("pump power (mW)")
ax.set_ylabel("amplitude transmission")
ax.legend()
fig.tight_layout()
fig.savefig("transmission_sweep.png", dpi=160)
"""


def _cmd_transmission_sweep(args):
    if not (args.power_min_mw > 0.0 and args.power_max_mw > args.power_min_mw):
        raise UsageError("need 0 < --power-min-mw < --power-max-mw")
    if args.n_points < 2:
        raise UsageError("--n-points must be >= 2")
    params, config_path = _resolve_fit_params(args)
    out = _ensure_out(args.out)

    powers = np.geomspace(args.power_min_mw * 1e-3, args.power_max_mw * 1e-3, args.n_points)
    rows = []
    for power in powers:
        t0, tpi2 = _model_both(params, float(power))
        rows.append((float(power), params.s_per_watt * float(power), t0, tpi2))

    csv_path = os.path.join(out, "transmission_sweep.csv")
    _write_csv(csv_path, ["power_W", "s0", "T_theta0", "T_thetaPi2"], rows)
    plot_path = os.path.join(out, "plot_transmission_sweep.py")
    with open(plot_path, "w", encoding="utf-8") as fh:
        fh.write(_SWEEP_PLOT.format(csv_name="transmission_sweep.csv"))
    _write_manifest(
        out,
        "transmission_sweep",
        "transmission-sweep",
        {
            "power_min_mw": args.power_min_mw,
            "power_max_mw": args.power_max_mw,
            "n_points": args.n_points,
            **params.as_dict(),
        },
        [os.path.basename(csv_path), os.path.basename(plot_path)],
        seed=None,
        config=config_path,
    )
    return 0


# ---------------------------------------------------------------------------
# noise-evolution

_NOISE_PLOT = """\
\"\"\"Render the variance evolution panels. Generated file; edit freely.\"\"\"
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(lambda: ([], [], []))
with open({csv_name!r}) as fh:
    for row in csv.DictReader(fh):
        zeta, sp, sq = curves[row["input_preset"]]
        zeta.append(float(row["zeta"]))
        sp.append(float(row["S_P"]))
        sq.append(float(row["S_Q"]))

presets = list(curves)
fig, axes = plt.subplots(1, len(presets), figsize=(4 * len(presets), 3.5), squeeze=False)
for ax, preset in zip(axes[0], presets):
    zeta, sp, sq = curves[preset]
    ax.plot(zeta, sq, label="S_Q", color="tab:orange")
    ax.plot(zeta, sp, label="S_P", color="tab:blue", linestyle="--")
    ax.axhline(1.0, color="gray", linewidth=0.8, label="SQL")
    ax.set_yscale("log")
    ax.set_xlabel("depth zeta")
    ax.set_title(preset)
axes[0][0].set_ylabel("variance (SQL units)")
axes[0][0].legend()
fig.tight_layout()
fig.savefig("noise_evolution.png", dpi=160)
"""

_STANDARD_PRESETS = ("coherent", "p_squeezed_10", "q_squeezed_10")


def _cmd_noise_evolution(args):
    if args.s0 <= 0.0 or not math.isfinite(args.s0):
        raise UsageError("--s0 must be finite and > 0")
    if args.zeta_max <= 0.0 or args.n_points < 2:
        raise UsageError("need --zeta-max > 0 and --n-points >= 2")
    names = _STANDARD_PRESETS if args.preset == "all" else (args.preset,)
    try:
        states = [InputFieldState.from_preset(name) for name in names]
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    out = _ensure_out(args.out)

    grid = np.linspace(0.0, args.zeta_max, args.n_points)
    rows = []
    for state in states:
        table = variance_evolution(state, args.s0, grid)
        for zeta, sp, sq in zip(table.zeta, table.s_p, table.s_q):
            rows.append((float(zeta), 0.0, float(sp), float(sq), state.label))

    csv_path = os.path.join(out, "noise_evolution.csv")
    _write_csv(csv_path, ["zeta", "nu_over_gamma0", "S_P", "S_Q", "input_preset"], rows)
    plot_path = os.path.join(out, "plot_noise_evolution.py")
    with open(plot_path, "w", encoding="utf-8") as fh:
        fh.write(_NOISE_PLOT.format(csv_name="noise_evolution.csv"))
    _write_manifest(
        args.out,
        "noise_evolution",
        "noise-evolution",
        {
            "preset": args.preset,
            "s0": args.s0,
            "zeta_max": args.zeta_max,
            "n_points": args.n_points,
        },
        [os.path.basename(csv_path), os.path.basename(plot_path)],
        seed=None,
    )
    return 0


# ---------------------------------------------------------------------------
# oracle


def _canonical_quantum_medium(zeta_total):
    # unit-rate medium: gamma0 = 1, L = 1, so kappa L = 2 * coupling_density
    return MediumParams(
        gamma0=1.0,
        gamma_opt=0.5,
        gamma_t=0.0,
        coupling_density=zeta_total / 2.0,
        length=1.0,
        zeeman_shift=1e6,
    )


def _cmd_oracle(args):
    if args.s0 <= 0.0 or not math.isfinite(args.s0):
        raise UsageError("--s0 must be finite and > 0")
    zeta = args.zeta if args.zeta is not None else zeta_for_gain(args.s0, 2.0)
    if zeta <= 0.0:
        raise UsageError("--zeta must be > 0")
    mode = DETERMINISTIC if args.mode == "deterministic" else MONTE_CARLO
    medium = _canonical_quantum_medium(zeta)
    profile = solve_profile(args.s0, medium, n_points=129)
    out = _ensure_out(args.out)

    tolerance = args.tolerance
    if tolerance is None:
        tolerance = _DEFAULT_DET_TOLERANCE if mode == DETERMINISTIC else _DEFAULT_MC_TOLERANCE

    reports = []
    for ratio in args.nu_over_gamma0:
        nu = ratio * medium.gamma0
        if mode == DETERMINISTIC:
            report = deterministic_noise_integral(
                args.quadrature, profile, medium, nu=nu, delta_model=args.delta_model
            )
        else:
            config = OracleConfig(
                n_trajectories=args.n_trajectories,
                spatial_steps=args.spatial_steps,
                seed=args.seed,
                delta_model=args.delta_model,
                mode=MONTE_CARLO,
            )
            report = monte_carlo_fluctuations(
                args.quadrature, profile, medium, config=config, nu=nu
            )
        reports.append(report)

    json_path = os.path.join(out, "oracle_reports.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump([r.as_dict() for r in reports], fh, indent=2)
        fh.write("\n")
    _write_manifest(
        out,
        "oracle",
        "oracle",
        {
            "mode": args.mode,
            "quadrature": args.quadrature,
            "nu_over_gamma0": list(args.nu_over_gamma0),
            "s0": args.s0,
            "zeta": zeta,
            "delta_model": args.delta_model,
            "n_trajectories": args.n_trajectories,
            "spatial_steps": args.spatial_steps,
            "tolerance": tolerance,
        },
        [os.path.basename(json_path)],
        seed=args.seed,
    )

    failures = [r for r in reports if r.rel_error > tolerance]
    if failures:
        worst = max(failures, key=lambda r: r.rel_error)
        print(
            f"oracle tolerance breach: {worst.quadrature} at nu = {worst.nu!r} "
            f"rel_error = {worst.rel_error:.3e} > {tolerance:.3e} "
            f"(delta_model = {worst.delta_model})",
            file=sys.stderr,
        )
        return 2
    return 0


# ---------------------------------------------------------------------------
# fit

_FIT_PLOT = """\
\"\"\"Overlay the measured points and the fitted curves. Generated file.\"\"\"
import csv
import math

import matplotlib.pyplot as plt

import cpo_sim

with open({fit_json!r}) as fh:
    import json

    fitted = json.load(fh)["params"]
params = cpo_sim.FitParams(**fitted)

data = {{"0": ([], []), "pi2": ([], [])}}
with open({data_csv!r}) as fh:
    for row in csv.DictReader(fh):
        xs, ys = data[row["theta"].strip()]
        xs.append(float(row["power_mW"]))
        ys.append(float(row["transmission"]))

grid = [10 ** (math.log10(0.1) + i * (math.log10(120) - math.log10(0.1)) / 199) for i in range(200)]
curves = {{
    theta: [cpo_sim.model_transmission(params, p * 1e-3, theta) for p in grid]
    for theta in ("0", "pi2")
}}

fig, ax = plt.subplots(figsize=(6, 4))
ax.semilogx(data["pi2"][0], data["pi2"][1], "o", ms=3, label="data, theta = pi/2")
ax.semilogx(data["0"][0], data["0"][1], "s", ms=3, label="data, theta = 0")
ax.semilogx(grid, curves["pi2"], color="tab:blue")
ax.semilogx(grid, curves["0"], color="tab:orange")
ax.set_xlabel("pump power (mW)")
ax.set_ylabel("transmission")
ax.legend()
fig.tight_layout()
fig.savefig("fit_overlay.png", dpi=160)
"""


def _cmd_fit(args):
    dataset = TransmissionDataset.from_csv(args.data_csv)
    initial, config_path = _resolve_fit_params(args)
    out = _ensure_out(args.out)
    try:
        result = run_fit(dataset, initial=initial)
    except FitConvergenceError as exc:
        best = exc.best_params.as_dict() if exc.best_params is not None else None
        print(f"error: {exc} (best so far: {best})", file=sys.stderr)
        return 1

    json_path = os.path.join(out, "fit_result.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(result.as_dict(), fh, indent=2)
        fh.write("\n")
    plot_path = os.path.join(out, "plot_fit.py")
    with open(plot_path, "w", encoding="utf-8") as fh:
        fh.write(
            _FIT_PLOT.format(
                fit_json="fit_result.json", data_csv=os.path.abspath(args.data_csv)
            )
        )
    _write_manifest(
        out,
        "fit",
        "fit",
        {"data_csv": os.path.abspath(args.data_csv), "initial": initial.as_dict()},
        [os.path.basename(json_path), os.path.basename(plot_path)],
        seed=None,
        config=config_path,
    )
    return 0


# ---------------------------------------------------------------------------


def _build_parser():
    parser = _Parser(prog="cpo-sim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("transmission-sweep", help="transmission vs pump power, both phases")
    sweep.add_argument("--power-min-mw", type=float, default=0.1)
    sweep.add_argument("--power-max-mw", type=float, default=100.0)
    sweep.add_argument("--n-points", type=int, default=200)
    sweep.add_argument("--config", default=None)
    sweep.add_argument("--out", default=".")
    _add_fit_param_flags(sweep)
    sweep.set_defaults(func=_cmd_transmission_sweep)

    noise = sub.add_parser("noise-evolution", help="quadrature variances vs depth")
    noise.add_argument("--preset", default="all", help="all, coherent, p_squeezed_<dB>, q_squeezed_<dB>")
    noise.add_argument("--s0", type=float, default=1.0)
    noise.add_argument("--zeta-max", type=float, default=6.0)
    noise.add_argument("--n-points", type=int, default=200)
    noise.add_argument("--out", default=".")
    noise.set_defaults(func=_cmd_noise_evolution)

    oracle = sub.add_parser("oracle", help="verify closed-form spectra against the noise integrals")
    oracle.add_argument("--mode", choices=("deterministic", "monte-carlo"), default="deterministic")
    oracle.add_argument("--quadrature", choices=("P", "Q"), default="P")
    oracle.add_argument(
        "--nu-over-gamma0", type=float, nargs="+", default=[0.0], metavar="RATIO"
    )
    oracle.add_argument("--s0", type=float, default=1.0)
    oracle.add_argument("--zeta", type=float, default=None, help="total depth; default: half depletion")
    oracle.add_argument("--delta-model", choices=("gamma0_s", "saturated"), default="gamma0_s")
    oracle.add_argument("--n-trajectories", type=int, default=100_000)
    oracle.add_argument("--spatial-steps", type=int, default=512)
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--tolerance", type=float, default=None)
    oracle.add_argument("--out", default=".")
    oracle.set_defaults(func=_cmd_oracle)

    fit_cmd = sub.add_parser("fit", help="fit the four-parameter model to a transmission CSV")
    fit_cmd.add_argument("data_csv")
    fit_cmd.add_argument("--config", default=None)
    fit_cmd.add_argument("--out", default=".")
    _add_fit_param_flags(fit_cmd)
    fit_cmd.set_defaults(func=_cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
