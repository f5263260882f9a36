"""Physical parameters of the Lambda-type medium and its pump-only steady state.

Conventions: angular frequencies (rad/s) everywhere inside the library; plain
Hz appear only at the CLI/config boundary. The atomic basis is ordered
(e, +1, -1): excited state first, then the two ground states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UsageError

TWO_PI = 2.0 * math.pi

# basis order for all 3x3 matrices in the package
BASIS = ("e", "+1", "-1")

_CONFIG_KEYS = (
    "gamma0_hz",
    "gamma_opt_hz",
    "gamma_t_hz",
    "coupling_density",
    "length_m",
    "zeeman_shift_hz",
)


@dataclass(frozen=True)
class MediumParams:
    """Rates and coupling strengths of the medium.

    gamma0: excited-state decay rate (rad/s).
    gamma_opt: optical-coherence decay rate Gamma (rad/s).
    gamma_t: transit decay rate (rad/s); 0 in the quantum-noise regime.
    coupling_density: g^2 N / c (rad/s per metre).
    length: cell length (m).
    zeeman_shift: ground-state Zeeman splitting (rad/s), validity bookkeeping
        only; it must dominate every analysis frequency used.
    """

    gamma0: float
    gamma_opt: float
    gamma_t: float
    coupling_density: float
    length: float
    zeeman_shift: float

    def __post_init__(self):
        for name in ("gamma0", "gamma_opt", "coupling_density", "length", "zeeman_shift"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.gamma_t) and self.gamma_t >= 0.0):
            raise DomainError(f"gamma_t must be finite and >= 0, got {self.gamma_t!r}")

    @property
    def depletion_rate(self):
        """Pump depth per metre: kappa = 2 g^2 N / (c Gamma0)."""
        return 2.0 * self.coupling_density / self.gamma0

    @property
    def is_quantum_regime(self) -> bool:
        """True when gamma_t = 0 and Gamma = Gamma0/2 (noise formulas assume this)."""
        return self.gamma_t == 0.0 and math.isclose(
            self.gamma_opt, 0.5 * self.gamma0, rel_tol=1e-12
        )

    @classmethod
    def quantum_defaults(cls) -> "MediumParams":
        """Noise-regime parameter set: Gamma = Gamma0/2, no transit decay.

        Rates follow the experimental cell: Gamma0/2pi = 1.6 MHz, cell 2.5 cm,
        coupling density chosen so the full cell is about 5.6 depth units.
        """
        gamma0 = TWO_PI * 1.6e6
        length = 0.025
        return cls(
            gamma0=gamma0,
            gamma_opt=0.5 * gamma0,
            gamma_t=0.0,
            coupling_density=5.6 * gamma0 / (2.0 * length),
            length=length,
            zeeman_shift=TWO_PI * 100e6,
        )

    @classmethod
    def classical_defaults(cls) -> "MediumParams":
        """Transmission-fit regime: broadened optical coherence, finite transit."""
        gamma0 = TWO_PI * 1.6e6
        length = 0.025
        return cls(
            gamma0=gamma0,
            gamma_opt=TWO_PI * 0.8e9,
            gamma_t=TWO_PI * 20e3,
            coupling_density=5.6 * gamma0 / (2.0 * length),
            length=length,
            zeeman_shift=TWO_PI * 100e6,
        )

    @classmethod
    def from_config(cls, path) -> "MediumParams":
        """Load from a flat key-value file; *_hz keys are converted to rad/s.

        Lines look like ``gamma0_hz = 1.6e6``; '#' starts a comment.
        """
        values = {}
        try:
            with open(path, "r", encoding="utf-8") as fh:
                for lineno, raw in enumerate(fh, start=1):
                    line = raw.split("#", 1)[0].strip()
                    if not line:
                        continue
                    if "=" not in line:
                        raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
                    key, _, text = line.partition("=")
                    key = key.strip()
                    if key not in _CONFIG_KEYS:
                        raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
                    try:
                        values[key] = float(text.strip())
                    except ValueError:
                        raise UsageError(f"{path}:{lineno}: bad number {text.strip()!r}") from None
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        missing = [k for k in _CONFIG_KEYS if k not in values]
        if missing:
            raise UsageError(f"config {path} is missing keys: {', '.join(missing)}")
        return cls(
            gamma0=TWO_PI * values["gamma0_hz"],
            gamma_opt=TWO_PI * values["gamma_opt_hz"],
            gamma_t=TWO_PI * values["gamma_t_hz"],
            coupling_density=values["coupling_density"],
            length=values["length_m"],
            zeeman_shift=TWO_PI * values["zeeman_shift_hz"],
        )


@dataclass(frozen=True)
class SteadyStateDensityMatrix:
    """Pump-only steady state of the Lambda system at saturation s."""

    entries: np.ndarray  # 3x3 complex, basis order BASIS
    saturation: float

    @property
    def excited_population(self) -> float:
        return float(self.entries[0, 0].real)


def steady_state(s, params: MediumParams) -> SteadyStateDensityMatrix:
    """Zeroth-order density matrix under a resonant pump of saturation s.

    Populations: sigma_ee = s/(1+3s), each ground state (1+2s)/(2+6s); the
    ground-ground coherence vanishes. Optical coherences carry the sqrt(2)
    factor on all four entries so the matrix is Hermitian.
    """
    try:
        s = float(s)
    except (TypeError, ValueError):
        raise DomainError(f"saturation must be a finite real number, got {s!r}") from None
    if not math.isfinite(s) or s < 0.0:
        raise DomainError(f"saturation must be finite and >= 0, got {s}")

    denom = 1.0 + 3.0 * s
    excited = s / denom
    ground = (1.0 + 2.0 * s) / (2.0 * denom)
    # pump Rabi frequency, taken real
    omega_d = math.sqrt(s * params.gamma_opt * params.gamma0)
    optical = 1j * math.sqrt(2.0) * omega_d / (params.gamma0 * denom)

    m = np.zeros((3, 3), dtype=complex)
    m[0, 0] = excited
    m[1, 1] = ground
    m[2, 2] = ground
    m[0, 1] = optical
    m[0, 2] = optical
    m[1, 0] = optical.conjugate()
    m[2, 0] = optical.conjugate()
    m.flags.writeable = False
    return SteadyStateDensityMatrix(entries=m, saturation=s)


def saturation_from_power(power, conversion):
    """Map optical pump power (W) to the saturation parameter, s = conversion * power."""
    try:
        power = float(power)
        conversion = float(conversion)
    except (TypeError, ValueError):
        raise DomainError("power and conversion must be finite real numbers") from None
    if not math.isfinite(power) or power < 0.0:
        raise DomainError(f"power must be finite and >= 0, got {power}")
    if not math.isfinite(conversion) or conversion <= 0.0:
        raise DomainError(f"conversion must be finite and > 0, got {conversion}")
    return conversion * power
