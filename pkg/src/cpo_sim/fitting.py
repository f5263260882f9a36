"""Transmission-data ingestion and the four-parameter model fit.

The model: s0 = s_per_watt * power, pump profile solved over the cell, the
two phase-sensitive transmissions evaluated on it, and everything multiplied
by a power-independent residual transmission accounting for the far-detuned
line. Fitting runs on log-transmission residuals with positivity bounds.

The depth parameter is g^2 N L / (2 Gamma c). The pump equation's natural
depth scale is kappa L = 4 (Gamma/Gamma0) * depth; the narrowband closure
Gamma = Gamma0/2 (kappa L = 2 depth) is the one that reproduces the observed
power dependence, so the fit medium is built that way. See the project notes
for the regime discussion.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, FitConvergenceError, UsageError
from .medium import MediumParams
from .probe import transmission
from .pump import solve_profile

PARAM_NAMES = ("gamma_ratio", "optical_depth", "s_per_watt", "residual_transmission")

THETA_ORTHOGONAL = "0"
THETA_PARALLEL = "pi2"
_THETA_VALUES = (THETA_ORTHOGONAL, THETA_PARALLEL)

# internal grid for fit-lane profiles; transmission quadrature evaluates the
# implicit solution exactly, so this only sets the exported grid density
_PROFILE_POINTS = 17


@dataclass(frozen=True)
class FitParams:
    gamma_ratio: float  # gamma_t / Gamma0
    optical_depth: float  # g^2 N L / (2 Gamma c)
    s_per_watt: float  # saturation per watt of pump power
    residual_transmission: float  # 1 - residual absorption, in (0, 1]

    def __post_init__(self):
        for name in PARAM_NAMES[:3]:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")
        r = self.residual_transmission
        if not (math.isfinite(r) and 0.0 < r <= 1.0):
            raise DomainError(f"residual_transmission must be in (0, 1], got {r!r}")

    @classmethod
    def default(cls) -> "FitParams":
        """Built-in defaults; also the fit's default initial guess."""
        return cls(
            gamma_ratio=0.096,
            optical_depth=2.8,
            s_per_watt=0.47,
            residual_transmission=0.80,
        )

    def as_array(self):
        return np.array([getattr(self, n) for n in PARAM_NAMES])

    def as_dict(self):
        return {n: float(getattr(self, n)) for n in PARAM_NAMES}


def medium_for(params: FitParams) -> MediumParams:
    """Canonical unit medium realizing the fit parameters (gamma0 = 1, L = 1)."""
    return MediumParams(
        gamma0=1.0,
        gamma_opt=0.5,
        gamma_t=params.gamma_ratio,
        coupling_density=params.optical_depth,
        length=1.0,
        zeeman_shift=1e6,
    )


@dataclass(frozen=True)
class DataRow:
    power_w: float
    theta: str  # "0" or "pi2"
    transmission: float
    sigma: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.power_w) and self.power_w >= 0.0):
            raise DomainError(f"power must be finite and >= 0, got {self.power_w!r}")
        if self.theta not in _THETA_VALUES:
            raise DomainError(f"theta must be one of {_THETA_VALUES}, got {self.theta!r}")
        if not (math.isfinite(self.transmission) and self.transmission > 0.0):
            raise DomainError(f"transmission must be > 0, got {self.transmission!r}")
        if self.sigma is not None and not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise DomainError(f"sigma must be > 0 when present, got {self.sigma!r}")


@dataclass(frozen=True)
class TransmissionDataset:
    rows: tuple

    def __post_init__(self):
        if not self.rows:
            raise UsageError("dataset has no rows")

    @property
    def thetas(self):
        return tuple(sorted(set(r.theta for r in self.rows)))

    @classmethod
    def from_csv(cls, path) -> "TransmissionDataset":
        """Read the fixed schema: power_mW, theta ("0"|"pi2"), transmission[, sigma]."""
        try:
            with open(path, "r", encoding="utf-8", newline="") as fh:
                reader = csv.DictReader(fh)
                if reader.fieldnames is None:
                    raise UsageError(f"{path}: empty file")
                fields = [f.strip() for f in reader.fieldnames]
                for required in ("power_mW", "theta", "transmission"):
                    if required not in fields:
                        raise UsageError(f"{path}: missing column {required!r}")
                rows = []
                for lineno, rec in enumerate(reader, start=2):
                    rec = {k.strip(): (v.strip() if v is not None else "") for k, v in rec.items() if k}
                    try:
                        power = float(rec["power_mW"]) * 1e-3
                        theta = rec["theta"]
                        trans = float(rec["transmission"])
                        sigma_text = rec.get("sigma", "")
                        sigma = float(sigma_text) if sigma_text else None
                        rows.append(DataRow(power, theta, trans, sigma))
                    except (KeyError, ValueError, DomainError) as exc:
                        raise UsageError(f"{path}:{lineno}: bad row ({exc})") from None
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
        if not rows:
            raise UsageError(f"{path}: no data rows")
        return cls(rows=tuple(rows))

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            has_sigma = any(r.sigma is not None for r in self.rows)
            header = ["power_mW", "theta", "transmission"] + (["sigma"] if has_sigma else [])
            writer.writerow(header)
            for r in self.rows:
                row = [repr(r.power_w * 1e3), r.theta, repr(r.transmission)]
                if has_sigma:
                    row.append("" if r.sigma is None else repr(r.sigma))
                writer.writerow(row)


def model_transmission(params: FitParams, power, theta) -> float:
    """Model transmission at one power and probe phase."""
    theta = _normalize_theta(theta)
    if not (isinstance(power, (int, float)) and math.isfinite(power) and power >= 0.0):
        raise DomainError(f"power must be finite and >= 0, got {power!r}")
    both = _model_both(params, float(power))
    return both[0] if theta == THETA_ORTHOGONAL else both[1]


def _normalize_theta(theta):
    if theta in _THETA_VALUES:
        return theta
    if theta == 0 or theta == 0.0:
        return THETA_ORTHOGONAL
    if isinstance(theta, float) and math.isclose(theta, math.pi / 2.0):
        return THETA_PARALLEL
    raise DomainError(f"theta must be 0 or pi/2 (or '0'/'pi2'), got {theta!r}")


def _model_both(params: FitParams, power: float):
    """(T_theta0, T_thetaPi2) at one power, residual factor included."""
    medium = medium_for(params)
    s0 = params.s_per_watt * power
    if s0 == 0.0:
        # unsaturated limit: both phases reduce to plain absorption
        base = math.exp(-params.optical_depth)
        return (
            params.residual_transmission * base,
            params.residual_transmission * base,
        )
    profile = solve_profile(s0, medium, n_points=_PROFILE_POINTS)
    result = transmission(profile, medium, pump_power=power)
    return (
        params.residual_transmission * result.t_orthogonal,
        params.residual_transmission * result.t_parallel,
    )


def synthesize_dataset(
    params: FitParams,
    powers_w,
    noise: float = 0.01,
    seed: int = 0,
    with_sigma: bool = True,
) -> TransmissionDataset:
    """Model dataset with multiplicative lognormal noise, both probe phases."""
    rng = np.random.default_rng(seed)
    rows = []
    for theta in _THETA_VALUES:
        for power in powers_w:
            clean = model_transmission(params, float(power), theta)
            value = clean * math.exp(noise * rng.standard_normal()) if noise > 0 else clean
            rows.append(
                DataRow(
                    power_w=float(power),
                    theta=theta,
                    transmission=value,
                    sigma=(noise * clean if with_sigma and noise > 0 else None),
                )
            )
    return TransmissionDataset(rows=tuple(rows))


@dataclass(frozen=True)
class FitResult:
    params: FitParams
    covariance: np.ndarray  # 4x4, parameter order PARAM_NAMES
    residuals: np.ndarray  # weighted log-space residuals, canonical row order
    converged: bool
    iterations: int
    degenerate_parameters: tuple

    def as_dict(self):
        return {
            "params": self.params.as_dict(),
            "covariance": [[float(v) for v in row] for row in self.covariance],
            "residuals": [float(r) for r in self.residuals],
            "converged": self.converged,
            "iterations": self.iterations,
            "degenerate_parameters": list(self.degenerate_parameters),
        }


_BOUNDS_LO = np.array([1e-10, 1e-10, 1e-10, 1e-10])
_BOUNDS_HI = np.array([np.inf, np.inf, np.inf, 1.0])


def fit(dataset: TransmissionDataset, initial: FitParams | None = None) -> FitResult:
    """Bounded least squares on log-transmission residuals.

    Rows are put in a canonical order first, so the result is invariant under
    dataset row reordering. Weights are relative uncertainties when a sigma
    column is present, otherwise uniform.
    """
    if initial is None:
        initial = FitParams.default()
    rows = sorted(dataset.rows, key=lambda r: (r.theta, r.power_w, r.transmission))
    if len(rows) < 4:
        raise UsageError(f"need at least 4 rows to fit 4 parameters, got {len(rows)}")

    log_obs = np.array([math.log(r.transmission) for r in rows])
    weights = np.array(
        [(r.sigma / r.transmission) if r.sigma is not None else 1.0 for r in rows]
    )
    powers = sorted(set(r.power_w for r in rows))
    theta_index = {THETA_ORTHOGONAL: 0, THETA_PARALLEL: 1}

    def residual_vector(x):
        p = FitParams(*np.clip(x, _BOUNDS_LO, _BOUNDS_HI))
        by_power = {pw: _model_both(p, pw) for pw in powers}
        log_model = np.array(
            [math.log(by_power[r.power_w][theta_index[r.theta]]) for r in rows]
        )
        return (log_model - log_obs) / weights

    x0 = np.clip(initial.as_array(), _BOUNDS_LO, _BOUNDS_HI)
    result = least_squares(
        residual_vector,
        x0,
        bounds=(_BOUNDS_LO, _BOUNDS_HI),
        method="trf",
        x_scale=np.maximum(x0, 1e-6),
        ftol=1e-14,
        xtol=1e-14,
        gtol=1e-14,
        max_nfev=2000,
    )
    best = FitParams(*result.x)
    if result.status <= 0:
        raise FitConvergenceError(
            f"fit did not converge: {result.message}",
            best_params=best,
            diagnostic={"status": int(result.status), "nfev": int(result.nfev)},
        )

    jac = result.jac
    dof = max(len(rows) - 4, 1)
    variance_scale = 2.0 * result.cost / dof
    jtj = jac.T @ jac
    covariance = np.linalg.pinv(jtj) * variance_scale

    # structural degeneracy: singular directions of the Jacobian
    _, singulars, v_rows = np.linalg.svd(jac)
    degenerate = []
    if singulars[0] > 0.0:
        for sv, v in zip(singulars, v_rows):
            if sv < 1e-10 * singulars[0]:
                degenerate.append(PARAM_NAMES[int(np.argmax(np.abs(v)))])
    degenerate = tuple(dict.fromkeys(degenerate))

    return FitResult(
        params=best,
        covariance=covariance,
        residuals=result.fun,
        converged=True,
        iterations=int(result.nfev),
        degenerate_parameters=degenerate,
    )
